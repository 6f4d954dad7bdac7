use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::checksum::md5_hex;
use super::journal::{journal_key, JoinedDocument, JournalRecord};
use super::DocumentRecord;
use crate::error::{Error, Result};
use crate::Pmid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredDocument {
    pub record: DocumentRecord,
    pub jif: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestLogEntry {
    pub batch_id: String,
    /// MD5 over the batch's joined documents.
    pub checksum: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

/// Medicine-subject documents keyed by PMID, the journal table they were
/// joined against, and the log of applied batches.
///
/// Ingestion consumes the store and returns the next version, so a reader
/// holding the previous value never observes a half-applied batch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStore {
    documents: BTreeMap<Pmid, StoredDocument>,
    journal_table: BTreeMap<String, JournalRecord>,
    ingest_log: Vec<IngestLogEntry>,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, pmid: Pmid) -> Option<&StoredDocument> {
        self.documents.get(&pmid)
    }

    /// Documents in ascending PMID order.
    pub fn documents(&self) -> impl ExactSizeIterator<Item = &StoredDocument> + '_ {
        self.documents.values()
    }

    pub fn journal_table(&self) -> &BTreeMap<String, JournalRecord> {
        &self.journal_table
    }

    pub fn ingest_log(&self) -> &[IngestLogEntry] {
        &self.ingest_log
    }

    pub fn has_batch(&self, batch_id: &str) -> bool {
        self.ingest_log.iter().any(|e| e.batch_id == batch_id)
    }

    /// Replaces the journal table and re-applies the medicine-subject filter
    /// to stored documents, refreshing their JIFs. Returns how many stored
    /// documents were removed.
    pub fn set_journal_table(&mut self, journals: &[JournalRecord]) -> usize {
        self.journal_table = journals
            .iter()
            .map(|j| (journal_key(&j.journal_name), j.clone()))
            .collect();
        let before = self.documents.len();
        let table = &self.journal_table;
        self.documents.retain(|_, doc| {
            match table.get(&journal_key(&doc.record.journal_name)) {
                Some(j) if j.in_medicine_subject => {
                    doc.jif = j.jif;
                    true
                }
                _ => false,
            }
        });
        before - self.documents.len()
    }

    /// Upserts `docs` by PMID and logs the batch. A batch id that is already
    /// in the log leaves the store unchanged.
    pub fn ingest_batch(self, batch_id: &str, docs: Vec<JoinedDocument>) -> Self {
        let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        self.ingest_batch_at(batch_id, docs, now)
    }

    pub fn ingest_batch_at(
        mut self,
        batch_id: &str,
        docs: Vec<JoinedDocument>,
        timestamp: String,
    ) -> Self {
        if self.has_batch(batch_id) {
            return self;
        }
        let stored: Vec<StoredDocument> = docs
            .into_iter()
            .map(|d| {
                let (record, jif) = d.into_parts();
                StoredDocument { record, jif }
            })
            .collect();
        let checksum = serde_json::to_vec(&stored)
            .map(|bytes| md5_hex(&bytes))
            .unwrap_or_default();
        for doc in stored {
            self.documents.insert(doc.record.pmid, doc);
        }
        self.ingest_log.push(IngestLogEntry {
            batch_id: batch_id.to_owned(),
            checksum,
            timestamp,
        });
        self
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let store: CorpusStore = serde_json::from_slice(bytes)?;
        for (pmid, doc) in &store.documents {
            if *pmid != doc.record.pmid {
                return Err(Error::Corrupt(format!(
                    "store key {pmid} holds document {}",
                    doc.record.pmid
                )));
            }
        }
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::fsutil::write_atomic(path.as_ref(), &self.to_json()?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(Error::at_path(path))?;
        Self::from_json(&bytes)
    }
}
