//! Relevance scoring within a publication category.
//!
//! Each candidate carries four raw subscores: query/title cosine, a 0/1 flag
//! for the title containing every query token, days since 1990-01-01, and the
//! journal impact factor. Any raw subscore equal to zero forces relevance to
//! zero. The remaining candidates are min-max normalized per subscore, the
//! normalized values are combined with per-category boosting factors, and
//! documents more than twenty years old are scaled by a tenth.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PartialDate;
use crate::Pmid;

pub const DEFAULT_TOP_K: usize = 500;
pub const PENALTY_AGE_YEARS: i32 = 20;
pub const PENALTY_FACTOR: f64 = 0.1;
/// Earliest publication year served, and the date-score epoch.
pub const EPOCH_YEAR: i32 = 1990;

const GUIDELINE_TYPES: [&str; 3] = [
    "Guideline",
    "Practice Guideline",
    "Consensus Development Conference",
];
const REVIEW_TYPES: [&str; 2] = ["Review", "Systematic Review"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PublicationCategory {
    Reviews,
    Guidelines,
    Studies,
}

impl PublicationCategory {
    pub const ALL: [PublicationCategory; 3] = [Self::Reviews, Self::Guidelines, Self::Studies];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Reviews => "reviews",
            Self::Guidelines => "guidelines",
            Self::Studies => "studies",
        }
    }
}

impl fmt::Display for PublicationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PublicationCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown tab {s:?}; valid tabs are reviews, guidelines, studies"
                ))
            })
    }
}

/// Guidelines take precedence over reviews; everything else is a study.
pub fn categorize<S: AsRef<str>>(pub_types: impl IntoIterator<Item = S>) -> PublicationCategory {
    let mut category = PublicationCategory::Studies;
    for label in pub_types {
        let label = label.as_ref().trim();
        if GUIDELINE_TYPES.iter().any(|g| g.eq_ignore_ascii_case(label)) {
            return PublicationCategory::Guidelines;
        }
        if REVIEW_TYPES.iter().any(|r| r.eq_ignore_ascii_case(label)) {
            category = PublicationCategory::Reviews;
        }
    }
    category
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostingFactors {
    pub title_cosine: f64,
    pub title_count: f64,
    pub date: f64,
    pub journal: f64,
}

impl BoostingFactors {
    pub const REVIEWS: Self = Self::from_array([4.0, 3.0, 1.0, 2.0]);
    pub const GUIDELINES: Self = Self::from_array([6.0, 8.0, 1.0, 4.0]);
    pub const STUDIES: Self = Self::from_array([3.0, 5.0, 1.0, 1.0]);

    const fn from_array(f: [f64; 4]) -> Self {
        Self {
            title_cosine: f[0],
            title_count: f[1],
            date: f[2],
            journal: f[3],
        }
    }

    pub fn new(title_cosine: f64, title_count: f64, date: f64, journal: f64) -> Result<Self> {
        let f = Self::from_array([title_cosine, title_count, date, journal]);
        if f.as_array().iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(f)
        } else {
            Err(Error::Config(format!("boosting factors must be positive: {f:?}")))
        }
    }

    pub fn defaults_for(category: PublicationCategory) -> Self {
        match category {
            PublicationCategory::Reviews => Self::REVIEWS,
            PublicationCategory::Guidelines => Self::GUIDELINES,
            PublicationCategory::Studies => Self::STUDIES,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.title_cosine, self.title_count, self.date, self.journal]
    }
}

/// Boosting factors for all three categories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostTable {
    pub reviews: BoostingFactors,
    pub guidelines: BoostingFactors,
    pub studies: BoostingFactors,
}

impl Default for BoostTable {
    fn default() -> Self {
        Self {
            reviews: BoostingFactors::REVIEWS,
            guidelines: BoostingFactors::GUIDELINES,
            studies: BoostingFactors::STUDIES,
        }
    }
}

impl BoostTable {
    pub fn get(&self, category: PublicationCategory) -> &BoostingFactors {
        match category {
            PublicationCategory::Reviews => &self.reviews,
            PublicationCategory::Guidelines => &self.guidelines,
            PublicationCategory::Studies => &self.studies,
        }
    }

    /// Parses three `category, cosine, count, date, journal` records
    /// (comma or whitespace separated, `#` comments allowed).
    pub fn parse(source: &str) -> Result<Self> {
        let mut found: [Option<BoostingFactors>; 3] = [None; 3];
        for (n, line) in source.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let bad = |why: &str| Error::Config(format!("boost file line {}: {why}", n + 1));
            if fields.len() != 5 {
                return Err(bad("expected a category and four factors"));
            }
            let category: PublicationCategory = fields[0].parse().map_err(|_| bad("unknown category"))?;
            let mut values = [0.0; 4];
            for (v, raw) in values.iter_mut().zip(&fields[1..]) {
                *v = raw.parse().map_err(|_| bad("factor is not a number"))?;
            }
            let factors = BoostingFactors::new(values[0], values[1], values[2], values[3])
                .map_err(|_| bad("factors must be positive"))?;
            let slot = &mut found[category as usize];
            if slot.is_some() {
                return Err(bad("category listed twice"));
            }
            *slot = Some(factors);
        }
        match found {
            [Some(reviews), Some(guidelines), Some(studies)] => Ok(Self {
                reviews,
                guidelines,
                studies,
            }),
            _ => Err(Error::Config(
                "boost file must define reviews, guidelines and studies".into(),
            )),
        }
    }

    /// Reads a boost file; `None` yields the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => Self::parse(&std::fs::read_to_string(p).map_err(Error::at_path(p))?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSubscores {
    pub semantic: f64,
    pub title_count: f64,
    pub date: f64,
    pub journal: f64,
}

impl RawSubscores {
    pub fn as_array(&self) -> [f64; 4] {
        [self.semantic, self.title_count, self.date, self.journal]
    }

    pub fn any_zero(&self) -> bool {
        self.as_array().contains(&0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub pmid: Pmid,
    pub raw: RawSubscores,
    pub pub_year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredResult {
    pub pmid: Pmid,
    pub category: PublicationCategory,
    pub raw: RawSubscores,
    /// Semantic, title count, date, journal; all zero for zeroed candidates.
    pub normalized: [f64; 4],
    pub relevance: f64,
    pub pub_year: i32,
}

/// Days from 1990-01-01 to the publication date, estimating a missing month
/// as July and a missing day as the 15th.
pub fn date_score(date: &PartialDate) -> f64 {
    let month = u32::from(date.month().unwrap_or(7));
    let day = u32::from(date.day().unwrap_or(15));
    // Days past the end of a month (e.g. Feb 30) fall back to its last day.
    let published = (1..=day)
        .rev()
        .find_map(|d| NaiveDate::from_ymd_opt(date.year(), month, d))
        .expect("PartialDate holds a valid year and month");
    let epoch = NaiveDate::from_ymd_opt(EPOCH_YEAR, 1, 1).expect("valid epoch");
    (published - epoch).num_days() as f64
}

/// `(x - min) / (max - min)`; all ones when every value is equal.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    values
        .iter()
        .map(|x| if range > 0.0 { (x - min) / range } else { 1.0 })
        .collect()
}

pub fn is_penalized(pub_year: i32, current_year: i32) -> bool {
    current_year - pub_year > PENALTY_AGE_YEARS
}

/// Highest relevance first; ties go to the larger PMID.
pub fn by_relevance(a: &ScoredResult, b: &ScoredResult) -> Ordering {
    b.relevance
        .total_cmp(&a.relevance)
        .then_with(|| b.pmid.cmp(&a.pmid))
}

/// Scores one category's candidates and sorts them by relevance.
pub fn score_category(
    category: PublicationCategory,
    candidates: &[Candidate],
    boosts: &BoostingFactors,
    current_year: i32,
) -> Vec<ScoredResult> {
    let survivors: Vec<usize> = (0..candidates.len())
        .filter(|&i| !candidates[i].raw.any_zero())
        .collect();

    // normalized[d][k] for the k-th survivor.
    let normalized: Vec<Vec<f64>> = (0..4)
        .map(|d| {
            let pool: Vec<f64> = survivors
                .iter()
                .map(|&i| candidates[i].raw.as_array()[d])
                .collect();
            min_max_normalize(&pool)
        })
        .collect();

    let boost = boosts.as_array();
    let mut results: Vec<ScoredResult> = candidates
        .iter()
        .map(|c| ScoredResult {
            pmid: c.pmid,
            category,
            raw: c.raw,
            normalized: [0.0; 4],
            relevance: 0.0,
            pub_year: c.pub_year,
        })
        .collect();
    for (k, &i) in survivors.iter().enumerate() {
        let norm = [normalized[0][k], normalized[1][k], normalized[2][k], normalized[3][k]];
        let mut relevance = boost[0] * norm[0] + boost[1] * norm[1] + boost[2] * norm[2] + boost[3] * norm[3];
        if is_penalized(candidates[i].pub_year, current_year) {
            relevance *= PENALTY_FACTOR;
        }
        results[i].normalized = norm;
        results[i].relevance = relevance;
    }
    results.sort_by(by_relevance);
    results
}

pub fn top_k<T>(mut results: Vec<T>, k: usize) -> Vec<T> {
    results.truncate(k);
    results
}
