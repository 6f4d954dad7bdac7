//! Parse the bundled MEDLINE batches, keep medicine journals and show what
//! the corpus store ends up holding.
//!
//!     cargo run --example ingest_medline

use std::path::PathBuf;

use clinsearch::ingest::{
    decode_batch_bytes, md5_hex, join_journal_metadata, parse_document_batch, read_journal_table, CorpusStore,
};

fn main() -> clinsearch::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let journals = read_journal_table(fixtures.join("journals.csv"))?;
    let mut store = CorpusStore::new();
    store.set_journal_table(&journals);

    for name in ["batch01.xml", "batch02.xml.gz", "batch01.xml"] {
        if store.has_batch(name) {
            println!("{name}: already ingested, skipping");
            continue;
        }
        let bytes = std::fs::read(fixtures.join("medline").join(name))?;
        println!("{name}: md5 {}", md5_hex(&bytes));
        let batch = parse_document_batch(&decode_batch_bytes(&bytes)?)?;
        let parsed = batch.records.len();
        let joined = join_journal_metadata(batch.records, &journals);
        println!("  parsed {parsed}, kept {}, dropped {}", joined.kept.len(), joined.dropped);
        store = store.ingest_batch(name, joined.kept);
    }

    println!("\n{} documents", store.len());
    for doc in store.documents() {
        let r = &doc.record;
        let year = r.year().map_or("----".to_string(), |y| y.to_string());
        let mut flags = Vec::new();
        if r.is_erratum {
            flags.push("erratum");
        }
        if r.is_retracted {
            flags.push("retracted");
        }
        if !r.is_english() {
            flags.push("non-English");
        }
        println!("{} {year} jif {:>6.3} {:<40.40} {}", r.pmid, doc.jif, r.title, flags.join(","));
    }
    Ok(())
}
