use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::SystemTime;

use crate::ranking::{PublicationCategory, ScoredResult};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    /// Normalized query tokens joined by single spaces.
    pub query: String,
    pub category: PublicationCategory,
}

impl CacheKey {
    pub fn new(tokens: &[String], category: PublicationCategory) -> Self {
        Self {
            query: tokens.join(" "),
            category,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CacheEntry {
    pub index_version: String,
    /// Year the penalty was evaluated against.
    pub current_year: i32,
    pub results: Arc<Vec<ScoredResult>>,
    pub created: SystemTime,
}

/// Ranked lists per (query, category). Entries built against another index
/// version or year read as misses.
#[derive(Debug, Default)]
pub struct ResultCache {
    entries: Mutex<HashMap<CacheKey, CacheEntry>>,
}

impl ResultCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &CacheKey, index_version: &str, current_year: i32) -> Option<Arc<Vec<ScoredResult>>> {
        let entries = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        entries
            .get(key)
            .filter(|e| e.index_version == index_version && e.current_year == current_year)
            .map(|e| Arc::clone(&e.results))
    }

    pub fn put(&self, key: CacheKey, index_version: &str, current_year: i32, results: Arc<Vec<ScoredResult>>) {
        let entry = CacheEntry {
            index_version: index_version.to_owned(),
            current_year,
            results,
            created: SystemTime::now(),
        };
        self.entries
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, entry);
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.entries.lock().unwrap_or_else(|e| e.into_inner()).clear();
    }
}
