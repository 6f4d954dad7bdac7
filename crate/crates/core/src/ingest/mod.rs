//! Corpus ingestion: MEDLINE-style XML batches, journal metadata, and the
//! incrementally updated corpus store.

mod checksum;
mod journal;
mod medline;
mod store;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Pmid;

pub use checksum::{md5_hex, parse_sidecar, verify_checksum};
pub use journal::{
    join_journal_metadata, journal_key, parse_journal_table, read_journal_table, JoinOutcome,
    JoinedDocument, JournalRecord,
};
pub use medline::{decode_batch_bytes, parse_document_batch, write_document_batch, ParsedBatch};
pub use store::{CorpusStore, IngestLogEntry, StoredDocument};

pub const PUBLISHED_ERRATUM: &str = "Published Erratum";
pub const RETRACTED_PUBLICATION: &str = "Retracted Publication";

/// Year with optional month and day. A day is only present with a month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDate", into = "RawDate")]
pub struct PartialDate {
    year: i32,
    month: Option<u8>,
    day: Option<u8>,
}

#[derive(Serialize, Deserialize)]
struct RawDate {
    year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    month: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    day: Option<u8>,
}

impl TryFrom<RawDate> for PartialDate {
    type Error = Error;

    fn try_from(raw: RawDate) -> Result<Self> {
        PartialDate::new(raw.year, raw.month, raw.day)
    }
}

impl From<PartialDate> for RawDate {
    fn from(d: PartialDate) -> Self {
        RawDate {
            year: d.year,
            month: d.month,
            day: d.day,
        }
    }
}

impl PartialDate {
    pub const MIN_YEAR: i32 = 1800;
    pub const MAX_YEAR: i32 = 2100;

    pub fn new(year: i32, month: Option<u8>, day: Option<u8>) -> Result<Self> {
        if !(Self::MIN_YEAR..=Self::MAX_YEAR).contains(&year) {
            return Err(Error::InvalidInput(format!("year {year} out of range")));
        }
        if let Some(m) = month {
            if !(1..=12).contains(&m) {
                return Err(Error::InvalidInput(format!("month {m} out of range")));
            }
        }
        match (month, day) {
            (None, Some(_)) => Err(Error::InvalidInput("day given without month".into())),
            (_, Some(d)) if !(1..=31).contains(&d) => {
                Err(Error::InvalidInput(format!("day {d} out of range")))
            }
            _ => Ok(Self { year, month, day }),
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> Option<u8> {
        self.month
    }

    pub fn day(&self) -> Option<u8> {
        self.day
    }
}

/// One MEDLINE citation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub pmid: Pmid,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub journal_name: String,
    pub journal_iso_abbrev: String,
    pub authors: Vec<String>,
    /// `None` when the citation carries no usable publication date; such
    /// documents never pass the search-time year filter.
    pub pub_date: Option<PartialDate>,
    pub pub_types: BTreeSet<String>,
    pub language: String,
    pub is_erratum: bool,
    pub is_retracted: bool,
}

impl DocumentRecord {
    /// A record with the given id and title and MEDLINE defaults elsewhere.
    pub fn new(pmid: Pmid, title: impl Into<String>) -> Self {
        Self {
            pmid,
            title: title.into(),
            abstract_text: String::new(),
            journal_name: String::new(),
            journal_iso_abbrev: String::new(),
            authors: Vec::new(),
            pub_date: None,
            pub_types: BTreeSet::from([DEFAULT_PUB_TYPE.to_owned()]),
            language: "eng".into(),
            is_erratum: false,
            is_retracted: false,
        }
    }

    pub fn year(&self) -> Option<i32> {
        self.pub_date.map(|d| d.year())
    }

    pub fn is_english(&self) -> bool {
        self.language.eq_ignore_ascii_case("eng")
    }
}

pub(crate) const DEFAULT_PUB_TYPE: &str = "Journal Article";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_date_invariants() {
        assert!(PartialDate::new(2017, None, None).is_ok());
        assert!(PartialDate::new(2017, Some(2), Some(29)).is_ok());
        assert!(PartialDate::new(1799, None, None).is_err());
        assert!(PartialDate::new(2101, None, None).is_err());
        assert!(PartialDate::new(2017, None, Some(3)).is_err());
        assert!(PartialDate::new(2017, Some(13), None).is_err());
        assert!(PartialDate::new(2017, Some(1), Some(32)).is_err());
    }

    #[test]
    fn partial_date_serde_validates() {
        let ok: PartialDate = serde_json::from_str(r#"{"year":2001,"month":3}"#).unwrap();
        assert_eq!(ok, PartialDate::new(2001, Some(3), None).unwrap());
        assert!(serde_json::from_str::<PartialDate>(r#"{"year":2001,"day":3}"#).is_err());
    }
}
