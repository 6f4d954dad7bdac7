//! Serve a synthetic corpus over HTTP.
//!
//!     cargo run --release --example serve_http
//!     curl 'http://127.0.0.1:8080/api/search?q=<word>&tab=studies&page=1'
//!     curl http://127.0.0.1:8080/api/health

use std::net::SocketAddr;
use std::sync::Arc;

use clinsearch::build::tokenize_corpus;
use clinsearch::search::{serve, SearchEngine, Snapshot, DEFAULT_LISTEN};
use clinsearch::synth::{generate, random_matrix, SynthConfig};
use clinsearch::text::TextPipeline;

#[tokio::main]
async fn main() -> clinsearch::Result<()> {
    let addr: SocketAddr = std::env::args()
        .nth(1)
        .unwrap_or_else(|| DEFAULT_LISTEN.to_string())
        .parse()
        .map_err(|e| clinsearch::Error::Config(format!("bad listen address: {e}")))?;

    let corpus = generate(&SynthConfig::default());
    let pipeline = TextPipeline::default();
    let tokenized = tokenize_corpus(&corpus.store, &pipeline);
    // Random vectors keep start-up instant; use `clinsearch train` for real ones.
    let matrix = random_matrix(&tokenized.lexicon, 50, 1);
    let index = tokenized.index()?;
    let snapshot = Snapshot::new(&corpus.store, tokenized.lexicon, matrix, index, &pipeline);
    let engine = Arc::new(SearchEngine::new(snapshot, pipeline));

    println!("try: curl 'http://{addr}/api/search?q={}&tab=studies'", corpus.words[0]);
    serve(engine, addr).await
}
