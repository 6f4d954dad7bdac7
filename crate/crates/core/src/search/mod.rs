//! Query execution over an immutable snapshot, with result caching,
//! pagination and an HTTP front end.

mod cache;
mod config;
mod http;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::{Arc, RwLock};

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::embedding::{cosine, embed_weighted, read_matrix, EmbeddingMatrix, WeightedVector};
use crate::error::{Error, Result};
use crate::index::{rarest_token, PostingsIndex};
use crate::ingest::{CorpusStore, DocumentRecord};
use crate::ranking::{
    categorize, date_score, score_category, top_k, BoostTable, Candidate, PublicationCategory,
    RawSubscores, ScoredResult, DEFAULT_TOP_K, EPOCH_YEAR,
};
use crate::text::{Lexicon, TextPipeline};
use crate::{Pmid, Tid};

pub use cache::{CacheEntry, CacheKey, ResultCache};
pub use config::{
    ServiceConfig, SnapshotPaths, DEFAULT_LISTEN, EMBEDDINGS_FILE, INDEX_FILE, LEXICON_FILE, STORE_FILE,
};
pub use http::{router, serve};

pub const DEFAULT_PAGE_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub query: String,
    pub category: PublicationCategory,
    /// 1-based.
    pub page: usize,
}

impl SearchRequest {
    pub fn new(query: impl Into<String>, category: PublicationCategory, page: usize) -> Self {
        Self {
            query: query.into(),
            category,
            page,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayResult {
    pub pmid: Pmid,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub authors: Vec<String>,
    /// ISO abbreviation, or the full name when the record has none.
    pub journal: String,
    pub year: i32,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    /// Size of the cached ranked list (at most 500).
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
    pub results: Vec<DisplayResult>,
}

/// Items `[(page - 1) * page_size, page * page_size)`; empty past the end.
pub fn paginate<T>(items: &[T], page: usize, page_size: usize) -> Result<&[T]> {
    if page < 1 {
        return Err(Error::InvalidInput("page must be at least 1".into()));
    }
    if page_size == 0 {
        return Err(Error::InvalidInput("page size must be positive".into()));
    }
    let start = (page - 1).saturating_mul(page_size).min(items.len());
    let end = start.saturating_add(page_size).min(items.len());
    Ok(&items[start..end])
}

#[derive(Debug, Clone)]
struct SnapshotDocument {
    record: DocumentRecord,
    jif: f64,
    category: PublicationCategory,
    /// Sorted, deduplicated.
    title_tids: Vec<Tid>,
    title_vector: WeightedVector,
}

/// Everything a query reads: documents, lexicon, embeddings and index.
#[derive(Debug, Clone)]
pub struct Snapshot {
    documents: HashMap<Pmid, SnapshotDocument>,
    lexicon: Lexicon,
    matrix: EmbeddingMatrix,
    index: PostingsIndex,
    version: String,
}

impl Snapshot {
    /// Precomputes title vectors and categories for every stored document.
    pub fn new(
        store: &CorpusStore,
        lexicon: Lexicon,
        matrix: EmbeddingMatrix,
        index: PostingsIndex,
        pipeline: &TextPipeline,
    ) -> Self {
        let documents = store
            .documents()
            .map(|doc| {
                let record = doc.record.clone();
                let tids = pipeline.text_to_tids(&record.title, &lexicon);
                let title_vector = embed_weighted(&tids, &matrix, &lexicon);
                let title_tids = tids.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
                let category = categorize(&record.pub_types);
                let entry = SnapshotDocument {
                    record,
                    jif: doc.jif,
                    category,
                    title_tids,
                    title_vector,
                };
                (entry.record.pmid, entry)
            })
            .collect();
        let version = index.fingerprint();
        Self {
            documents,
            lexicon,
            matrix,
            index,
            version,
        }
    }

    pub fn load(paths: &SnapshotPaths, pipeline: &TextPipeline) -> Result<Self> {
        paths.check_exist()?;
        let store = CorpusStore::load(&paths.store)?;
        let lexicon = Lexicon::load(&paths.lexicon)?;
        let file = std::fs::File::open(&paths.embeddings).map_err(Error::at_path(&paths.embeddings))?;
        let matrix = read_matrix(std::io::BufReader::new(file)).map_err(corrupt_at(&paths.embeddings))?;
        let index = PostingsIndex::load(&paths.index).map_err(|e| match e {
            Error::Path { .. } => e,
            other => corrupt_at(&paths.index)(other),
        })?;
        Ok(Self::new(&store, lexicon, matrix, index, pipeline))
    }

    /// Fingerprint of the index rows.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn document(&self, pmid: Pmid) -> Option<&DocumentRecord> {
        self.documents.get(&pmid).map(|d| &d.record)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn matrix(&self) -> &EmbeddingMatrix {
        &self.matrix
    }

    pub fn index(&self) -> &PostingsIndex {
        &self.index
    }

    /// Ranks every retained document of `category` for already-normalized
    /// query tokens, truncated to the top 500.
    pub fn rank(
        &self,
        tokens: &[String],
        category: PublicationCategory,
        boosts: &BoostTable,
        current_year: i32,
    ) -> Result<Vec<ScoredResult>> {
        if tokens.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let Some(tids) = tokens
            .iter()
            .map(|t| self.lexicon.tid(t))
            .collect::<Option<Vec<Tid>>>()
        else {
            // A token no document contains means no document contains them all.
            return Ok(Vec::new());
        };
        let query_vector = embed_weighted(&tids, &self.matrix, &self.lexicon);
        let distinct: Vec<Tid> = tids.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let rarest = rarest_token(&distinct, &self.lexicon)?;

        let candidates: Vec<Candidate> = self
            .index
            .lookup(rarest)
            .iter()
            .filter_map(|&pmid| {
                let doc = self.documents.get(&pmid)?;
                let doc_tids = self.index.document_tids(pmid)?;
                if !contains_all(doc_tids, &distinct) || !is_servable(&doc.record) || doc.category != category {
                    return None;
                }
                let date = doc.record.pub_date?;
                Some(Candidate {
                    pmid,
                    raw: RawSubscores {
                        semantic: cosine(&query_vector, &doc.title_vector),
                        title_count: if contains_all(&doc.title_tids, &distinct) { 1.0 } else { 0.0 },
                        date: date_score(&date),
                        journal: doc.jif,
                    },
                    pub_year: date.year(),
                })
            })
            .collect();

        let scored = score_category(category, &candidates, boosts.get(category), current_year);
        Ok(top_k(scored, DEFAULT_TOP_K))
    }

    pub fn display(&self, result: &ScoredResult) -> Option<DisplayResult> {
        let doc = &self.documents.get(&result.pmid)?.record;
        let journal = if doc.journal_iso_abbrev.is_empty() {
            doc.journal_name.clone()
        } else {
            doc.journal_iso_abbrev.clone()
        };
        Some(DisplayResult {
            pmid: doc.pmid,
            title: doc.title.clone(),
            abstract_text: doc.abstract_text.clone(),
            authors: doc.authors.clone(),
            journal,
            year: result.pub_year,
            score: result.relevance,
        })
    }
}

fn corrupt_at(path: &Path) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::Corrupt(format!("{}: {e}", path.display()))
}

/// Both slices sorted ascending.
fn contains_all(haystack: &[Tid], needles: &[Tid]) -> bool {
    needles.iter().all(|t| haystack.binary_search(t).is_ok())
}

/// English, not an erratum or retracted, and published in 1990 or later.
pub fn is_servable(record: &DocumentRecord) -> bool {
    record.is_english()
        && !record.is_erratum
        && !record.is_retracted
        && record.year().is_some_and(|y| y >= EPOCH_YEAR)
}

/// Serves queries against the current snapshot. Publishing a new snapshot
/// swaps it atomically; queries already running finish on the old one.
#[derive(Debug)]
pub struct SearchEngine {
    snapshot: RwLock<Arc<Snapshot>>,
    pipeline: TextPipeline,
    boosts: BoostTable,
    cache: ResultCache,
    page_size: usize,
    fixed_year: Option<i32>,
}

impl SearchEngine {
    pub fn new(snapshot: Snapshot, pipeline: TextPipeline) -> Self {
        Self {
            snapshot: RwLock::new(Arc::new(snapshot)),
            pipeline,
            boosts: BoostTable::default(),
            cache: ResultCache::new(),
            page_size: DEFAULT_PAGE_SIZE,
            fixed_year: None,
        }
    }

    pub fn with_boosts(mut self, boosts: BoostTable) -> Self {
        self.boosts = boosts;
        self
    }

    pub fn with_page_size(mut self, page_size: usize) -> Result<Self> {
        if page_size == 0 {
            return Err(Error::Config("page size must be positive".into()));
        }
        self.page_size = page_size;
        Ok(self)
    }

    /// Pins the year the age penalty is measured against.
    pub fn with_current_year(mut self, year: i32) -> Self {
        self.fixed_year = Some(year);
        self
    }

    pub fn current_year(&self) -> i32 {
        self.fixed_year.unwrap_or_else(|| chrono::Utc::now().year())
    }

    pub fn page_size(&self) -> usize {
        self.page_size
    }

    pub fn pipeline(&self) -> &TextPipeline {
        &self.pipeline
    }

    pub fn cache(&self) -> &ResultCache {
        &self.cache
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        Arc::clone(&self.snapshot.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn publish(&self, snapshot: Snapshot) {
        *self.snapshot.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(snapshot);
        self.cache.clear();
    }

    /// The full ranked list for a query, served from cache when possible.
    pub fn ranked(&self, query: &str, category: PublicationCategory) -> Result<Arc<Vec<ScoredResult>>> {
        let tokens = self.pipeline.normalized_tokens(query);
        if tokens.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let snapshot = self.snapshot();
        let year = self.current_year();
        let key = CacheKey::new(&tokens, category);
        if let Some(hit) = self.cache.get(&key, snapshot.version(), year) {
            return Ok(hit);
        }
        let results = Arc::new(snapshot.rank(&tokens, category, &self.boosts, year)?);
        self.cache.put(key, snapshot.version(), year, Arc::clone(&results));
        Ok(results)
    }

    pub fn search(&self, request: &SearchRequest) -> Result<SearchResponse> {
        if request.page < 1 {
            return Err(Error::InvalidInput("page must be at least 1".into()));
        }
        let snapshot = self.snapshot();
        let ranked = self.ranked(&request.query, request.category)?;
        let page = paginate(&ranked, request.page, self.page_size)?;
        Ok(SearchResponse {
            total: ranked.len(),
            page: request.page,
            page_size: self.page_size,
            results: page.iter().filter_map(|r| snapshot.display(r)).collect(),
        })
    }
}
