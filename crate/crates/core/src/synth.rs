//! Seeded synthetic corpora with MEDLINE-like shape, for examples, tests and
//! benchmarks.

use std::collections::{BTreeSet, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::embedding::EmbeddingMatrix;
use crate::ingest::{
    join_journal_metadata, CorpusStore, DocumentRecord, JournalRecord, PartialDate,
    PUBLISHED_ERRATUM, RETRACTED_PUBLICATION,
};
use crate::text::Lexicon;

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ren", "tus", "vi", "dor", "pha", "ne", "sta", "gli", "cor", "bu", "xen",
    "thy", "ro", "li", "cy", "ter", "mab", "pra", "zol", "ine", "ax",
];

const PUB_TYPE_MIX: [&[&str]; 9] = [
    &["Journal Article"],
    &["Journal Article", "Randomized Controlled Trial"],
    &["Journal Article", "Review"],
    &["Systematic Review"],
    &["Practice Guideline"],
    &["Guideline", "Journal Article"],
    &["Consensus Development Conference"],
    &["Review", "Practice Guideline"],
    &["Comparative Study"],
];

const OTHER_LANGUAGES: [&str; 3] = ["fre", "ger", "jpn"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub documents: usize,
    pub vocabulary: usize,
    pub journals: usize,
    pub title_words: (usize, usize),
    pub abstract_words: (usize, usize),
    pub first_year: i32,
    pub last_year: i32,
    /// Probability a journal lies outside the medicine subject.
    pub non_medicine_rate: f64,
    /// Probability a medicine journal is unranked (JIF 0).
    pub unranked_rate: f64,
    pub non_english_rate: f64,
    pub erratum_rate: f64,
    pub retracted_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            documents: 1000,
            vocabulary: 400,
            journals: 40,
            title_words: (3, 10),
            abstract_words: (20, 60),
            first_year: 1980,
            last_year: 2019,
            non_medicine_rate: 0.15,
            unranked_rate: 0.1,
            non_english_rate: 0.05,
            erratum_rate: 0.03,
            retracted_rate: 0.02,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    /// Every generated record, before the journal filter.
    pub records: Vec<DocumentRecord>,
    pub journals: Vec<JournalRecord>,
    /// Medicine-subject documents only.
    pub store: CorpusStore,
    /// Word list in descending sampling frequency.
    pub words: Vec<String>,
}

/// `count` distinct pronounceable words.
pub fn make_words(count: usize, rng: &mut impl Rng) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let syllables = rng.random_range(2..=4);
        let w: String = (0..syllables)
            .map(|_| *SYLLABLES.choose(rng).expect("non-empty"))
            .collect();
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

fn random_date(rng: &mut impl Rng, first: i32, last: i32) -> PartialDate {
    let year = rng.random_range(first..=last);
    let month = rng.random_bool(0.8).then(|| rng.random_range(1..=12u8));
    let day = month.and_then(|_| rng.random_bool(0.7).then(|| rng.random_range(1..=28u8)));
    PartialDate::new(year, month, day).expect("generated date in range")
}

fn sentence(rng: &mut impl Rng, words: &[String], zipf: &WeightedAliasIndex<f64>, range: (usize, usize)) -> String {
    let n = rng.random_range(range.0..=range.1.max(range.0));
    (0..n)
        .map(|_| words[zipf.sample(rng)].as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates journals and documents and ingests them as one batch.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let words = make_words(config.vocabulary.max(1), &mut rng);
    // Roughly Zipfian word frequencies.
    let weights: Vec<f64> = (0..words.len()).map(|r| 1.0 / (r as f64 + 1.0)).collect();
    let zipf = WeightedAliasIndex::new(weights).expect("positive weights");

    let journals: Vec<JournalRecord> = (0..config.journals.max(1))
        .map(|j| {
            let medicine = !rng.random_bool(config.non_medicine_rate);
            let jif = if rng.random_bool(config.unranked_rate) {
                0.0
            } else {
                (rng.random_range(0.2..80.0f64) * 1000.0).round() / 1000.0
            };
            JournalRecord {
                journal_name: format!("Journal of {} Medicine {j}", capitalize(&words[j % words.len()])),
                iso_abbrev: format!("J {} Med {j}", capitalize(&words[j % words.len()])),
                in_medicine_subject: medicine,
                jif,
            }
        })
        .collect();

    let records: Vec<DocumentRecord> = (0..config.documents)
        .map(|i| {
            let pmid = 10_000 + i as u32 * 3 + rng.random_range(0..3);
            let mut r = DocumentRecord::new(pmid, sentence(&mut rng, &words, &zipf, config.title_words));
            r.abstract_text = sentence(&mut rng, &words, &zipf, config.abstract_words);
            let journal = journals.choose(&mut rng).expect("at least one journal");
            r.journal_name = journal.journal_name.clone();
            r.journal_iso_abbrev = journal.iso_abbrev.clone();
            r.authors = (0..rng.random_range(1..=4))
                .map(|_| format!("{} {}", capitalize(&words[rng.random_range(0..words.len())]), "AB"))
                .collect();
            r.pub_date = Some(random_date(&mut rng, config.first_year, config.last_year));
            r.pub_types = PUB_TYPE_MIX
                .choose(&mut rng)
                .expect("non-empty")
                .iter()
                .map(|s| s.to_string())
                .collect::<BTreeSet<_>>();
            if rng.random_bool(config.non_english_rate) {
                r.language = OTHER_LANGUAGES.choose(&mut rng).expect("non-empty").to_string();
            }
            if rng.random_bool(config.erratum_rate) {
                r.is_erratum = true;
                r.pub_types.insert(PUBLISHED_ERRATUM.to_owned());
            }
            if rng.random_bool(config.retracted_rate) {
                r.is_retracted = true;
                r.pub_types.insert(RETRACTED_PUBLICATION.to_owned());
            }
            r
        })
        .collect();

    let joined = join_journal_metadata(records.clone(), &journals);
    let mut store = CorpusStore::new();
    store.set_journal_table(&journals);
    let store = store.ingest_batch_at("synthetic", joined.kept, "2019-06-01T00:00:00Z".into());
    SynthCorpus {
        records,
        journals,
        store,
        words,
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Uniform random vectors in `[-1, 1)` for every lexicon token. Stands in for
/// trained embeddings where only the ranking arithmetic matters.
pub fn random_matrix(lexicon: &Lexicon, dim: usize, seed: u64) -> EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = EmbeddingMatrix::new(dim);
    for (tid, _) in lexicon.iter() {
        let v = (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        m.insert(tid, v).expect("dimension matches");
    }
    m
}

/// Journal table as comma-separated text with a header row.
pub fn journal_table_csv(journals: &[JournalRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["journal_name", "iso_abbrev", "in_medicine_subject", "jif"])
        .expect("in-memory write");
    for j in journals {
        w.write_record([
            j.journal_name.as_str(),
            j.iso_abbrev.as_str(),
            if j.in_medicine_subject { "1" } else { "0" },
            &j.jif.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_journal_table;

    #[test]
    fn deterministic_and_filtered() {
        let cfg = SynthConfig {
            documents: 200,
            ..SynthConfig::default()
        };
        let a = generate(&cfg);
        let b = generate(&cfg);
        assert_eq!(a.store, b.store);
        assert_eq!(a.records.len(), 200);
        assert!(a.store.len() < 200 && !a.store.is_empty());
        let medicine: HashSet<&str> = a
            .journals
            .iter()
            .filter(|j| j.in_medicine_subject)
            .map(|j| j.journal_name.as_str())
            .collect();
        assert!(a.store.documents().all(|d| medicine.contains(d.record.journal_name.as_str())));
    }

    #[test]
    fn journal_csv_round_trips() {
        let corpus = generate(&SynthConfig {
            documents: 1,
            ..SynthConfig::default()
        });
        let parsed = parse_journal_table(journal_table_csv(&corpus.journals).as_bytes()).unwrap();
        assert_eq!(parsed, corpus.journals);
    }
}
