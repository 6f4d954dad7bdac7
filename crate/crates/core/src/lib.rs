//! Search engine for clinical literature.
//!
//! MEDLINE citations are ingested, joined with journal metadata, tokenized,
//! and indexed by token. Queries retrieve candidates through an inverted
//! index, filter them, split them into reviews, guidelines and studies, and
//! rank each group by a boosted blend of semantic similarity, title match,
//! recency and journal impact.

pub mod error;
mod fsutil;
pub mod build;
pub mod cli;
pub mod embedding;
pub mod index;
pub mod ingest;
pub mod ranking;
pub mod search;
pub mod synth;
pub mod text;

pub use error::{Error, Result};

/// PubMed identifier.
pub type Pmid = u32;
/// Token identifier; dense and starting at 1.
pub type Tid = u32;
