//! Ingest the fixtures, train, index and run paged searches on every tab.
//!
//!     cargo run --release --example search_end_to_end [query]

use std::path::PathBuf;

use clinsearch::build::tokenize_corpus;
use clinsearch::embedding::{SkipGramTrainer, TrainingConfig};
use clinsearch::ingest::{decode_batch_bytes, join_journal_metadata, parse_document_batch, read_journal_table, CorpusStore};
use clinsearch::ranking::PublicationCategory;
use clinsearch::search::{SearchEngine, SearchRequest, Snapshot};
use clinsearch::text::TextPipeline;

fn main() -> clinsearch::Result<()> {
    let query = std::env::args().nth(1).unwrap_or_else(|| "stroke".into());
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let journals = read_journal_table(fixtures.join("journals.csv"))?;
    let mut store = CorpusStore::new();
    for name in ["batch01.xml", "batch02.xml.gz"] {
        let bytes = std::fs::read(fixtures.join("medline").join(name))?;
        let batch = parse_document_batch(&decode_batch_bytes(&bytes)?)?;
        store = store.ingest_batch(name, join_journal_metadata(batch.records, &journals).kept);
    }

    let pipeline = TextPipeline::default();
    let corpus = tokenize_corpus(&store, &pipeline);
    let config = TrainingConfig {
        dim: 32,
        window: 20,
        ..TrainingConfig::default()
    };
    let matrix = SkipGramTrainer::new(config)?.train(&corpus.streams())?.matrix;
    let index = corpus.index()?;
    let snapshot = Snapshot::new(&store, corpus.lexicon, matrix, index, &pipeline);
    let engine = SearchEngine::new(snapshot, pipeline).with_current_year(2019).with_page_size(2)?;

    for tab in PublicationCategory::ALL {
        let first = engine.search(&SearchRequest::new(query.as_str(), tab, 1))?;
        println!("{tab}: {} results for {query:?}", first.total);
        let pages = first.total.div_ceil(engine.page_size()).max(1);
        for page in 1..=pages {
            for (i, r) in engine.search(&SearchRequest::new(query.as_str(), tab, page))?.results.iter().enumerate() {
                let rank = (page - 1) * engine.page_size() + i + 1;
                println!("  {rank}. [{}] {} ({}, {}) {:.3}", r.pmid, r.title, r.journal, r.year, r.score);
            }
        }
    }
    println!("cached result lists: {}", engine.cache().len());
    Ok(())
}
