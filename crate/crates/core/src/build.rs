//! Derives the lexicon, training streams and index from a corpus store.

use crate::error::Result;
use crate::index::{build_index, PostingsIndex};
use crate::ingest::CorpusStore;
use crate::text::{Lexicon, TextPipeline};
use crate::{Pmid, Tid};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub pmid: Pmid,
    pub title: Vec<Tid>,
    pub abstract_tids: Vec<Tid>,
}

impl TokenizedDocument {
    /// Title followed by abstract, the unit a training window stays inside.
    pub fn stream(&self) -> Vec<Tid> {
        self.title.iter().chain(&self.abstract_tids).copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct TokenizedCorpus {
    pub lexicon: Lexicon,
    /// In ascending PMID order.
    pub documents: Vec<TokenizedDocument>,
}

impl TokenizedCorpus {
    pub fn streams(&self) -> Vec<Vec<Tid>> {
        self.documents.iter().map(TokenizedDocument::stream).collect()
    }

    pub fn index(&self) -> Result<PostingsIndex> {
        build_index(
            self.documents
                .iter()
                .map(|d| (d.pmid, d.title.as_slice(), d.abstract_tids.as_slice())),
        )
    }
}

/// Builds a fresh lexicon over every stored document.
pub fn tokenize_corpus(store: &CorpusStore, pipeline: &TextPipeline) -> TokenizedCorpus {
    let mut lexicon = Lexicon::new();
    let documents = store
        .documents()
        .map(|doc| {
            let r = &doc.record;
            let (title, abstract_tids) = pipeline.add_document(&mut lexicon, &r.title, &r.abstract_text);
            TokenizedDocument {
                pmid: r.pmid,
                title,
                abstract_tids,
            }
        })
        .collect();
    TokenizedCorpus { lexicon, documents }
}

/// Tokenizes stored documents against a frozen lexicon. Tokens the lexicon
/// has never seen are dropped.
pub fn tokenize_with_lexicon<'a>(
    store: &'a CorpusStore,
    lexicon: &'a Lexicon,
    pipeline: &'a TextPipeline,
) -> impl Iterator<Item = TokenizedDocument> + 'a {
    store.documents().map(move |doc| {
        let r = &doc.record;
        TokenizedDocument {
            pmid: r.pmid,
            title: pipeline.text_to_tids(&r.title, lexicon),
            abstract_tids: pipeline.text_to_tids(&r.abstract_text, lexicon),
        }
    })
}

pub fn index_store(store: &CorpusStore, lexicon: &Lexicon, pipeline: &TextPipeline) -> Result<PostingsIndex> {
    let docs: Vec<TokenizedDocument> = tokenize_with_lexicon(store, lexicon, pipeline).collect();
    build_index(docs.iter().map(|d| (d.pmid, d.title.as_slice(), d.abstract_tids.as_slice())))
}

/// Adds stored documents that `index` does not cover yet.
pub fn merge_new_documents(
    index: &PostingsIndex,
    store: &CorpusStore,
    lexicon: &Lexicon,
    pipeline: &TextPipeline,
) -> (PostingsIndex, usize) {
    let fresh: Vec<(Pmid, Vec<Tid>)> = tokenize_with_lexicon(store, lexicon, pipeline)
        .filter(|d| index.document_tids(d.pmid).is_none())
        .map(|d| (d.pmid, d.stream()))
        .filter(|(_, tids)| !tids.is_empty())
        .collect();
    let added = fresh.len();
    (index.merge_incremental(fresh), added)
}
