use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DocumentRecord;
use crate::error::{Error, Result};

/// Journal-level metadata joined onto documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub journal_name: String,
    pub iso_abbrev: String,
    pub in_medicine_subject: bool,
    /// Journal impact factor; 0 when unranked.
    pub jif: f64,
}

/// Join key: case-folded, punctuation replaced by spaces, whitespace collapsed.
pub fn journal_key(name: &str) -> String {
    let folded: String = name
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .flat_map(char::to_lowercase)
        .collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A document that passed the medicine-subject filter, paired with its JIF.
///
/// Only [`join_journal_metadata`] constructs these, so everything that reaches
/// the corpus store has been through the filter.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinedDocument {
    record: DocumentRecord,
    jif: f64,
}

impl JoinedDocument {
    pub fn record(&self) -> &DocumentRecord {
        &self.record
    }

    pub fn jif(&self) -> f64 {
        self.jif
    }

    pub fn into_parts(self) -> (DocumentRecord, f64) {
        (self.record, self.jif)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JoinOutcome {
    pub kept: Vec<JoinedDocument>,
    pub dropped: usize,
}

/// Keeps documents whose journal is flagged as medicine, attaching its JIF.
/// Documents in unknown or non-medicine journals are counted as dropped.
pub fn join_journal_metadata(docs: Vec<DocumentRecord>, journals: &[JournalRecord]) -> JoinOutcome {
    let table: HashMap<String, &JournalRecord> = journals
        .iter()
        .map(|j| (journal_key(&j.journal_name), j))
        .collect();
    let mut out = JoinOutcome::default();
    for record in docs {
        match table.get(&journal_key(&record.journal_name)) {
            Some(j) if j.in_medicine_subject => out.kept.push(JoinedDocument { record, jif: j.jif }),
            _ => out.dropped += 1,
        }
    }
    out
}

fn parse_flag(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" | "t" => Some(true),
        "0" | "false" | "no" | "n" | "f" | "" => Some(false),
        _ => None,
    }
}

/// Parses a journal metadata table: one header row, then
/// `(journal name, iso abbreviation, medicine flag, jif)` rows. The delimiter
/// (comma, tab, semicolon or pipe) is detected from the header.
pub fn parse_journal_table(mut input: impl Read) -> Result<Vec<JournalRecord>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let header = text.lines().next().unwrap_or("");
    let delimiter = b"\t;|,"
        .iter()
        .copied()
        .find(|d| header.as_bytes().contains(d))
        .unwrap_or(b',');

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut journals = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "journal table line {line}: expected 4 columns, found {}",
                row.len()
            )));
        }
        let in_medicine_subject = parse_flag(&row[2]).ok_or_else(|| {
            Error::InvalidInput(format!("journal table line {line}: bad flag {:?}", &row[2]))
        })?;
        let jif = if row[3].is_empty() {
            0.0
        } else {
            row[3].parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("journal table line {line}: bad JIF {:?}", &row[3]))
            })?
        };
        if !jif.is_finite() || jif < 0.0 {
            return Err(Error::InvalidInput(format!(
                "journal table line {line}: JIF must be a non-negative number"
            )));
        }
        journals.push(JournalRecord {
            journal_name: row[0].to_owned(),
            iso_abbrev: row[1].to_owned(),
            in_medicine_subject,
            jif,
        });
    }
    Ok(journals)
}

pub fn read_journal_table(path: impl AsRef<Path>) -> Result<Vec<JournalRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(Error::at_path(path))?;
    parse_journal_table(file)
}
