//! Build the postings index, extend it incrementally and persist it.
//!
//!     cargo run --example build_index

use clinsearch::build::tokenize_corpus;
use clinsearch::index::{build_index, PostingsIndex};
use clinsearch::synth::{generate, SynthConfig};
use clinsearch::text::TextPipeline;

fn main() -> clinsearch::Result<()> {
    let corpus = generate(&SynthConfig {
        documents: 2000,
        ..SynthConfig::default()
    });
    let tokenized = tokenize_corpus(&corpus.store, &TextPipeline::default());
    let docs = &tokenized.documents;
    let (old, new) = docs.split_at(docs.len() / 2);

    let base = build_index(old.iter().map(|d| (d.pmid, d.title.as_slice(), d.abstract_tids.as_slice())))?;
    let merged = base.merge_incremental(new.iter().map(|d| (d.pmid, d.stream())));
    println!(
        "base: {} docs {} rows; merged: {} docs {} rows",
        base.document_count(),
        base.row_count(),
        merged.document_count(),
        merged.row_count()
    );
    assert_eq!(merged, tokenized.index()?);

    let word = &corpus.words[5];
    let tid = tokenized.lexicon.tid(word).expect("generated word");
    let postings = merged.lookup(tid);
    println!("{word:?} (tid {tid}) occurs in {} documents, first {:?}", postings.len(), &postings[..postings.len().min(5)]);

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("index.bin");
    merged.save(&path)?;
    let loaded = PostingsIndex::load(&path)?;
    println!(
        "saved {} bytes, version {}, reload equal: {}",
        std::fs::metadata(&path)?.len(),
        loaded.fingerprint(),
        loaded == merged
    );
    Ok(())
}
