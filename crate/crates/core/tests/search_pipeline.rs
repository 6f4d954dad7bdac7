mod common;

use common::{compare_rankings, random_snapshot, ReferenceRanker};

use clinsearch::ingest::{
    decode_batch_bytes, join_journal_metadata, parse_document_batch, read_journal_table,
    CorpusStore, DocumentRecord, JournalRecord, PartialDate,
};
use clinsearch::ranking::PublicationCategory;
use clinsearch::search::{SearchEngine, SearchRequest};
use clinsearch::synth::{generate, SynthConfig};
use clinsearch::text::TextPipeline;
use clinsearch::Error;

const YEAR: i32 = 2019;

fn fixture_store() -> CorpusStore {
    let dir = common::fixture_dir();
    let journals = read_journal_table(dir.join("journals.csv")).unwrap();
    let mut store = CorpusStore::new();
    for name in ["batch01.xml", "batch02.xml.gz"] {
        let bytes = std::fs::read(dir.join("medline").join(name)).unwrap();
        let batch = parse_document_batch(&decode_batch_bytes(&bytes).unwrap()).unwrap();
        store = store.ingest_batch_at(name, join_journal_metadata(batch.records, &journals).kept, "t".into());
    }
    store
}

fn engine_for(store: &CorpusStore, seed: u64) -> (SearchEngine, ReferenceRanker) {
    let pipeline = TextPipeline::default();
    let (snapshot, lexicon, matrix) = random_snapshot(store, &pipeline, 8, seed);
    let reference = ReferenceRanker::new(store, &pipeline, &lexicon, &matrix);
    (SearchEngine::new(snapshot, pipeline).with_current_year(YEAR), reference)
}

fn ranked(engine: &SearchEngine, q: &str, tab: PublicationCategory) -> Vec<(u32, f64)> {
    engine
        .ranked(q, tab)
        .unwrap()
        .iter()
        .map(|r| (r.pmid, r.relevance))
        .collect()
}

#[test]
fn fixture_queries_match_reference() {
    let store = fixture_store();
    let (engine, reference) = engine_for(&store, 3);
    for q in ["stroke", "Stroke", "depression", "myocardial infarction", "stroke depression", "thrombolysis stroke"] {
        for tab in PublicationCategory::ALL {
            let got = ranked(&engine, q, tab);
            let want = reference.rank(q, tab.as_str(), YEAR as i64).unwrap();
            compare_rankings(&got, &want, 1e-9).unwrap_or_else(|e| panic!("{q:?} {tab}: {e}"));
        }
    }
}

#[test]
fn fixture_stroke_membership_respects_filters() {
    let store = fixture_store();
    let (engine, _) = engine_for(&store, 3);
    let pmids = |tab| ranked(&engine, "stroke", tab).into_iter().map(|r| r.0).collect::<Vec<_>>();
    // French, erratum and retracted stroke papers never appear.
    let mut studies = pmids(PublicationCategory::Studies);
    studies.sort_unstable();
    assert_eq!(studies, [30000003, 30000012]);
    let mut reviews = pmids(PublicationCategory::Reviews);
    reviews.sort_unstable();
    assert_eq!(reviews, [30000001, 30000008]);
    assert_eq!(pmids(PublicationCategory::Guidelines), [30000002]);
    // The 1997 registry is over twenty years old in 2019.
    let studies = ranked(&engine, "stroke", PublicationCategory::Studies);
    assert_eq!(studies[0].0, 30000003);
}

fn hand_built() -> CorpusStore {
    let date = |y| Some(PartialDate::new(y, Some(6), Some(1)).unwrap());
    let mk = |pmid, title: &str, abs: &str, year, kind: &str| {
        let mut r = DocumentRecord::new(pmid, title);
        r.abstract_text = abs.into();
        r.journal_name = "Medicine Journal".into();
        r.pub_date = date(year);
        r.pub_types = [kind.to_string()].into();
        r
    };
    let docs = vec![
        mk(1, "aspirin trial outcomes", "aspirin reduced events", 2010, "Review"),
        mk(2, "aspirin dosing review", "low dose", 2015, "Review"),
        mk(3, "statin therapy", "aspirin was not studied", 2012, "Review"),
        mk(4, "statin therapy outcomes", "lipids", 2016, "Review"),
        mk(5, "heparin bridging", "bleeding", 2014, "Review"),
        mk(6, "heparin dosing", "statin background", 2013, "Clinical Trial"),
        mk(7, "warfarin outcomes", "inr control", 2011, "Review"),
        mk(8, "warfarin and statin", "interaction", 2009, "Review"),
        mk(9, "beta blockers", "heart failure", 2008, "Review"),
        mk(10, "beta blockers and statin outcomes", "mortality", 2018, "Review"),
    ];
    let journal = JournalRecord {
        journal_name: "Medicine Journal".into(),
        iso_abbrev: "Med J".into(),
        in_medicine_subject: true,
        jif: 3.5,
    };
    CorpusStore::new().ingest_batch_at("hand", join_journal_metadata(docs, &[journal]).kept, "t".into())
}

#[test]
fn single_token_query_returns_its_three_documents() {
    let store = hand_built();
    let (engine, reference) = engine_for(&store, 11);
    let got = ranked(&engine, "aspirin", PublicationCategory::Reviews);
    let mut members: Vec<u32> = got.iter().map(|r| r.0).collect();
    members.sort_unstable();
    assert_eq!(members, [1, 2, 3]);
    assert!(got.windows(2).all(|w| w[0].1 >= w[1].1));
    compare_rankings(&got, &reference.rank("aspirin", "reviews", 2019).unwrap(), 1e-9).unwrap();
    // Doc 3 mentions aspirin only in its abstract, so its title-count subscore
    // is zero and so is its relevance.
    assert_eq!(got.iter().find(|r| r.0 == 3).unwrap().1, 0.0);
}

#[test]
fn conjunctive_and_unknown_token_handling() {
    let store = hand_built();
    let (engine, _) = engine_for(&store, 11);
    let both: Vec<u32> = ranked(&engine, "statin outcomes", PublicationCategory::Reviews)
        .into_iter()
        .map(|r| r.0)
        .collect();
    assert!(both.contains(&4) && both.contains(&10));
    assert!(!both.contains(&3) && !both.contains(&8), "doc with one token kept: {both:?}");
    assert!(ranked(&engine, "zebrafish", PublicationCategory::Reviews).is_empty());
    assert!(ranked(&engine, "statin zebrafish", PublicationCategory::Reviews).is_empty());
    assert!(matches!(engine.ranked("the of and", PublicationCategory::Reviews), Err(Error::EmptyQuery)));
    assert!(matches!(engine.ranked("   ", PublicationCategory::Reviews), Err(Error::EmptyQuery)));
}

#[test]
fn cache_is_transparent_and_keyed_on_tokens() {
    let store = fixture_store();
    let (engine, _) = engine_for(&store, 5);
    let req = SearchRequest::new("stroke", PublicationCategory::Reviews, 1);
    let cold = engine.search(&req).unwrap();
    assert_eq!(engine.cache().len(), 1);
    let warm = engine.search(&req).unwrap();
    assert_eq!(cold, warm);
    let upper = engine.search(&SearchRequest::new("  STROKE ", PublicationCategory::Reviews, 1));
    // A fully capitalized token keeps its case, so it is a different key.
    assert!(upper.is_ok());
    engine.search(&SearchRequest::new("Stroke", PublicationCategory::Reviews, 1)).unwrap();
    assert_eq!(engine.cache().len(), 2);
}

#[test]
fn publishing_a_snapshot_invalidates_the_cache() {
    let store = fixture_store();
    let (engine, _) = engine_for(&store, 5);
    let before = engine.search(&SearchRequest::new("stroke", PublicationCategory::Studies, 1)).unwrap();
    assert_eq!(before.total, 2);

    let mut smaller = CorpusStore::new();
    let journals = read_journal_table(common::fixture_dir().join("journals.csv")).unwrap();
    let keep: Vec<DocumentRecord> = store
        .documents()
        .filter(|d| d.record.pmid != 30000003)
        .map(|d| d.record.clone())
        .collect();
    smaller = smaller.ingest_batch_at("b", join_journal_metadata(keep, &journals).kept, "t".into());
    let (snapshot, _, _) = random_snapshot(&smaller, engine.pipeline(), 8, 5);
    let old_version = engine.snapshot().version().to_string();
    engine.publish(snapshot);
    assert_ne!(engine.snapshot().version(), old_version);
    let after = engine.search(&SearchRequest::new("stroke", PublicationCategory::Studies, 1)).unwrap();
    assert_eq!(after.total, 1);
}

#[test]
fn pages_concatenate_to_the_ranked_list() {
    let corpus = generate(&SynthConfig {
        documents: 1500,
        vocabulary: 60,
        ..SynthConfig::default()
    });
    let (engine, _) = engine_for(&corpus.store, 9);
    let word = &corpus.words[0];
    let full: Vec<u32> = engine
        .ranked(word, PublicationCategory::Studies)
        .unwrap()
        .iter()
        .map(|r| r.pmid)
        .collect();
    assert!(full.len() > 10);
    let mut concatenated = Vec::new();
    for page in 1.. {
        let resp = engine.search(&SearchRequest::new(word.as_str(), PublicationCategory::Studies, page)).unwrap();
        assert_eq!(resp.total, full.len());
        if resp.results.is_empty() {
            break;
        }
        assert!(resp.results.len() <= 10);
        concatenated.extend(resp.results.iter().map(|r| r.pmid));
    }
    assert_eq!(concatenated, full);
    assert!(engine.search(&SearchRequest::new(word.as_str(), PublicationCategory::Studies, 0)).is_err());
}

#[test]
fn random_corpora_match_reference() {
    for seed in 0..5 {
        let corpus = generate(&SynthConfig {
            documents: 300,
            vocabulary: 80,
            seed,
            ..SynthConfig::default()
        });
        let (engine, reference) = engine_for(&corpus.store, seed);
        for (i, tab) in PublicationCategory::ALL.into_iter().enumerate() {
            let q = format!("{} {}", corpus.words[i], corpus.words[i + 5]);
            let got = ranked(&engine, &q, tab);
            let want = reference.rank(&q, tab.as_str(), YEAR as i64).unwrap();
            compare_rankings(&got, &want, 1e-9).unwrap_or_else(|e| panic!("seed {seed} {q:?} {tab}: {e}"));
        }
    }
}
