//! Shared fixtures and an independent, straight-line reference implementation
//! of query ranking. The reference scans every document instead of using the
//! index and recomputes IDF, vectors, filters, categories, dates and scores
//! from scratch.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use clinsearch::build::tokenize_corpus;
use clinsearch::embedding::EmbeddingMatrix;
use clinsearch::ingest::CorpusStore;
use clinsearch::search::Snapshot;
use clinsearch::synth::random_matrix;
use clinsearch::text::{Lexicon, TextPipeline};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// Snapshot over `store` with a fresh lexicon and seeded random vectors.
pub fn random_snapshot(store: &CorpusStore, pipeline: &TextPipeline, dim: usize, seed: u64) -> (Snapshot, Lexicon, EmbeddingMatrix) {
    let corpus = tokenize_corpus(store, pipeline);
    let index = corpus.index().expect("unique pmids");
    let matrix = random_matrix(&corpus.lexicon, dim, seed);
    let snapshot = Snapshot::new(store, corpus.lexicon.clone(), matrix.clone(), index, pipeline);
    (snapshot, corpus.lexicon, matrix)
}

/// Days since 0000-03-01, proleptic Gregorian.
pub fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe
}

fn days_in_month(y: i64, m: i64) -> i64 {
    match m {
        2 if (y % 4 == 0 && y % 100 != 0) || y % 400 == 0 => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

struct RefDoc {
    pmid: u32,
    title: Vec<String>,
    tokens: HashSet<String>,
    language: String,
    erratum: bool,
    retracted: bool,
    date: Option<(i64, Option<i64>, Option<i64>)>,
    types: Vec<String>,
    jif: f64,
}

pub struct ReferenceRanker {
    docs: Vec<RefDoc>,
    df: HashMap<String, u32>,
    n: u32,
    vectors: HashMap<String, Vec<f64>>,
    pipeline: TextPipeline,
}

impl ReferenceRanker {
    pub fn new(store: &CorpusStore, pipeline: &TextPipeline, lexicon: &Lexicon, matrix: &EmbeddingMatrix) -> Self {
        let mut df: HashMap<String, u32> = HashMap::new();
        let docs: Vec<RefDoc> = store
            .documents()
            .map(|d| {
                let r = &d.record;
                let title = pipeline.normalized_tokens(&r.title);
                let mut tokens: HashSet<String> = title.iter().cloned().collect();
                tokens.extend(pipeline.normalized_tokens(&r.abstract_text));
                for t in &tokens {
                    *df.entry(t.clone()).or_default() += 1;
                }
                RefDoc {
                    pmid: r.pmid,
                    title,
                    tokens,
                    language: r.language.clone(),
                    erratum: r.is_erratum,
                    retracted: r.is_retracted,
                    date: r.pub_date.map(|p| {
                        (p.year() as i64, p.month().map(i64::from), p.day().map(i64::from))
                    }),
                    types: r.pub_types.iter().cloned().collect(),
                    jif: d.jif,
                }
            })
            .collect();
        let vectors = lexicon
            .iter()
            .filter_map(|(tid, token)| {
                matrix
                    .get(tid)
                    .map(|v| (token.to_string(), v.iter().map(|x| *x as f64).collect()))
            })
            .collect();
        Self {
            n: docs.len() as u32,
            docs,
            df,
            vectors,
            pipeline: pipeline.clone(),
        }
    }

    fn weighted_sum(&self, tokens: &[String]) -> Vec<f64> {
        let dim = self.vectors.values().next().map_or(0, Vec::len);
        let mut acc = vec![0.0; dim];
        for t in tokens {
            let (Some(v), Some(df)) = (self.vectors.get(t), self.df.get(t)) else {
                continue;
            };
            let w = (self.n as f64 / *df as f64).ln();
            for (a, x) in acc.iter_mut().zip(v) {
                *a += w * x;
            }
        }
        acc
    }

    fn category(types: &[String]) -> &'static str {
        let lower: Vec<String> = types.iter().map(|t| t.to_lowercase()).collect();
        let has = |labels: &[&str]| lower.iter().any(|t| labels.contains(&t.as_str()));
        if has(&["guideline", "practice guideline", "consensus development conference"]) {
            "guidelines"
        } else if has(&["review", "systematic review"]) {
            "reviews"
        } else {
            "studies"
        }
    }

    fn boosts(tab: &str) -> [f64; 4] {
        match tab {
            "reviews" => [4.0, 3.0, 1.0, 2.0],
            "guidelines" => [6.0, 8.0, 1.0, 4.0],
            "studies" => [3.0, 5.0, 1.0, 1.0],
            other => panic!("unknown tab {other}"),
        }
    }

    /// `None` when the query has no tokens after stopword removal.
    pub fn rank(&self, query: &str, tab: &str, current_year: i64) -> Option<Vec<(u32, f64)>> {
        let q = self.pipeline.normalized_tokens(query);
        if q.is_empty() {
            return None;
        }
        if q.iter().any(|t| !self.df.contains_key(t)) {
            return Some(Vec::new());
        }
        let qv = self.weighted_sum(&q);
        let epoch = days_from_civil(1990, 1, 1);

        struct Row {
            pmid: u32,
            raw: [f64; 4],
            year: i64,
        }
        let mut rows = Vec::new();
        for d in &self.docs {
            let Some((y, m, day)) = d.date else { continue };
            let title_set: HashSet<&String> = d.title.iter().collect();
            if !q.iter().all(|t| d.tokens.contains(t))
                || d.language.to_lowercase() != "eng"
                || d.erratum
                || d.retracted
                || y < 1990
                || Self::category(&d.types) != tab
            {
                continue;
            }
            let tv = self.weighted_sum(&d.title);
            let dot: f64 = qv.iter().zip(&tv).map(|(a, b)| a * b).sum();
            let nq = qv.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nt = tv.iter().map(|x| x * x).sum::<f64>().sqrt();
            let semantic = if nq == 0.0 || nt == 0.0 { 0.0 } else { dot / (nq * nt) };
            let title_count = if q.iter().all(|t| title_set.contains(t)) { 1.0 } else { 0.0 };
            let m = m.unwrap_or(7);
            let day = day.unwrap_or(15).min(days_in_month(y, m));
            let date = (days_from_civil(y, m, day) - epoch) as f64;
            rows.push(Row {
                pmid: d.pmid,
                raw: [semantic, title_count, date, d.jif],
                year: y,
            });
        }

        let live: Vec<&Row> = rows.iter().filter(|r| r.raw.iter().all(|x| *x != 0.0)).collect();
        let mut lo = [f64::INFINITY; 4];
        let mut hi = [f64::NEG_INFINITY; 4];
        for r in &live {
            for k in 0..4 {
                lo[k] = lo[k].min(r.raw[k]);
                hi[k] = hi[k].max(r.raw[k]);
            }
        }
        let boost = Self::boosts(tab);
        let mut out: Vec<(u32, f64)> = rows
            .iter()
            .map(|r| {
                if r.raw.contains(&0.0) {
                    return (r.pmid, 0.0);
                }
                let mut s = 0.0;
                for k in 0..4 {
                    let norm = if hi[k] > lo[k] { (r.raw[k] - lo[k]) / (hi[k] - lo[k]) } else { 1.0 };
                    s += boost[k] * norm;
                }
                if current_year - r.year > 20 {
                    s *= 0.1;
                }
                (r.pmid, s)
            })
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(b.0.cmp(&a.0)));
        out.truncate(500);
        Some(out)
    }
}

/// Same members in the same order with scores within `tol`. Neighbours whose
/// scores differ by at most `tol` may appear in either order.
pub fn compare_rankings(got: &[(u32, f64)], want: &[(u32, f64)], tol: f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("length {} != {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if (g.1 - w.1).abs() > tol {
            return Err(format!("rank {i}: score {} vs {} (pmids {} / {})", g.1, w.1, g.0, w.0));
        }
    }
    let mut i = 0;
    while i < got.len() {
        let mut j = i + 1;
        while j < got.len() && (want[j - 1].1 - want[j].1).abs() <= tol {
            j += 1;
        }
        let mut a: Vec<u32> = got[i..j].iter().map(|r| r.0).collect();
        let mut b: Vec<u32> = want[i..j].iter().map(|r| r.0).collect();
        if j - i == 1 && a != b {
            return Err(format!("rank {i}: pmid {} vs {}", a[0], b[0]));
        }
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(format!("ranks {i}..{j}: members differ"));
        }
        i = j;
    }
    Ok(())
}
