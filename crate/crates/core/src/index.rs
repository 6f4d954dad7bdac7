//! Inverted index from TIDs to the PMIDs of documents containing them.
//!
//! Persisted as a two-column table of `(tid, pmid)` rows:
//!
//! ```text
//! "PIDX" | version: u32 | rows: u64 | rows × (tid: u32, pmid: u32)     all LE
//! ```
//!
//! Rows are sorted by `(tid, pmid)` and unique. A companion reverse-record
//! file keeps each document's TID set so re-indexed documents can have their
//! old postings removed:
//!
//! ```text
//! "PREV" | version: u32 | docs: u64 | docs × (pmid: u32, n: u32, n × tid: u32)
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::Lexicon;
use crate::{Pmid, Tid};

pub const ROWS_MAGIC: [u8; 4] = *b"PIDX";
pub const REVERSE_MAGIC: [u8; 4] = *b"PREV";
pub const INDEX_VERSION: u32 = 1;
pub const ROWS_HEADER_LEN: usize = 16;
pub const ROW_LEN: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PostingsIndex {
    postings: BTreeMap<Tid, Vec<Pmid>>,
    /// Sorted, deduplicated TIDs per indexed document.
    doc_tids: BTreeMap<Pmid, Vec<Tid>>,
}

fn sorted_set<'a>(tids: impl IntoIterator<Item = &'a Tid>) -> Vec<Tid> {
    tids.into_iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Builds postings from `(pmid, title_tids, abstract_tids)`. Each document
/// contributes one posting per distinct TID.
pub fn build_index<'a>(
    docs: impl IntoIterator<Item = (Pmid, &'a [Tid], &'a [Tid])>,
) -> Result<PostingsIndex> {
    let mut postings: BTreeMap<Tid, Vec<Pmid>> = BTreeMap::new();
    let mut doc_tids = BTreeMap::new();
    let mut seen = HashSet::new();
    for (pmid, title, abstract_tids) in docs {
        if !seen.insert(pmid) {
            return Err(Error::DuplicatePmid(pmid));
        }
        let tids: HashSet<Tid> = title.iter().chain(abstract_tids).copied().collect();
        for &tid in &tids {
            postings.entry(tid).or_default().push(pmid);
        }
        if !tids.is_empty() {
            doc_tids.insert(pmid, sorted_set(&tids));
        }
    }
    for list in postings.values_mut() {
        list.sort_unstable();
    }
    Ok(PostingsIndex { postings, doc_tids })
}

/// The TID with the smallest document frequency; ties go to the smaller TID.
pub fn rarest_token(tids: &[Tid], lexicon: &Lexicon) -> Result<Tid> {
    let mut best: Option<(u32, Tid)> = None;
    for &tid in tids {
        let df = lexicon.doc_freq(tid).ok_or(Error::UnknownTid(tid))?;
        if best.is_none_or(|b| (df, tid) < b) {
            best = Some((df, tid));
        }
    }
    best.map(|(_, tid)| tid)
        .ok_or_else(|| Error::InvalidInput("rarest_token of an empty token list".into()))
}

impl PostingsIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ascending PMIDs containing `tid`; empty when unknown.
    pub fn lookup(&self, tid: Tid) -> &[Pmid] {
        self.postings.get(&tid).map_or(&[], Vec::as_slice)
    }

    /// Sorted TID set of an indexed document.
    pub fn document_tids(&self, pmid: Pmid) -> Option<&[Tid]> {
        self.doc_tids.get(&pmid).map(Vec::as_slice)
    }

    pub fn token_count(&self) -> usize {
        self.postings.len()
    }

    pub fn document_count(&self) -> usize {
        self.doc_tids.len()
    }

    pub fn row_count(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    pub fn postings(&self) -> impl Iterator<Item = (Tid, &[Pmid])> + '_ {
        self.postings.iter().map(|(t, p)| (*t, p.as_slice()))
    }

    /// Returns a new index with `new_docs` applied. A PMID that is already
    /// indexed has its previous postings replaced.
    pub fn merge_incremental(
        &self,
        new_docs: impl IntoIterator<Item = (Pmid, Vec<Tid>)>,
    ) -> PostingsIndex {
        let mut next = self.clone();
        next.apply(new_docs);
        next
    }

    pub fn apply(&mut self, new_docs: impl IntoIterator<Item = (Pmid, Vec<Tid>)>) {
        for (pmid, tids) in new_docs {
            self.remove_document(pmid);
            let tids = sorted_set(&tids);
            for &tid in &tids {
                let list = self.postings.entry(tid).or_default();
                if let Err(pos) = list.binary_search(&pmid) {
                    list.insert(pos, pmid);
                }
            }
            if !tids.is_empty() {
                self.doc_tids.insert(pmid, tids);
            }
        }
    }

    fn remove_document(&mut self, pmid: Pmid) {
        let Some(old) = self.doc_tids.remove(&pmid) else {
            return;
        };
        for tid in old {
            if let Some(list) = self.postings.get_mut(&tid) {
                if let Ok(pos) = list.binary_search(&pmid) {
                    list.remove(pos);
                }
                if list.is_empty() {
                    self.postings.remove(&tid);
                }
            }
        }
    }

    pub fn write_rows(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&ROWS_MAGIC)?;
        w.write_all(&INDEX_VERSION.to_le_bytes())?;
        w.write_all(&(self.row_count() as u64).to_le_bytes())?;
        for (tid, pmids) in &self.postings {
            for pmid in pmids {
                w.write_all(&tid.to_le_bytes())?;
                w.write_all(&pmid.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn rows_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(ROWS_HEADER_LEN + ROW_LEN * self.row_count());
        self.write_rows(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    /// Loads the row table, rebuilding reverse records from it.
    pub fn read_rows(mut r: impl Read) -> Result<Self> {
        let rows = read_header(&mut r, ROWS_MAGIC, "index")?;
        let mut postings: BTreeMap<Tid, Vec<Pmid>> = BTreeMap::new();
        let mut doc_tids: BTreeMap<Pmid, Vec<Tid>> = BTreeMap::new();
        let mut prev: Option<(Tid, Pmid)> = None;
        let mut row = [0u8; ROW_LEN];
        for i in 0..rows {
            r.read_exact(&mut row)
                .map_err(|_| Error::Corrupt(format!("index truncated at row {i} of {rows}")))?;
            let tid = u32::from_le_bytes([row[0], row[1], row[2], row[3]]);
            let pmid = u32::from_le_bytes([row[4], row[5], row[6], row[7]]);
            if prev.is_some_and(|p| p >= (tid, pmid)) {
                return Err(Error::Corrupt(format!(
                    "index row {i} ({tid}, {pmid}) out of order or duplicated"
                )));
            }
            prev = Some((tid, pmid));
            postings.entry(tid).or_default().push(pmid);
            // Rows arrive in TID order, so each document's list stays sorted.
            doc_tids.entry(pmid).or_default().push(tid);
        }
        expect_eof(&mut r, "index")?;
        Ok(Self { postings, doc_tids })
    }

    pub fn write_reverse(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&REVERSE_MAGIC)?;
        w.write_all(&INDEX_VERSION.to_le_bytes())?;
        w.write_all(&(self.doc_tids.len() as u64).to_le_bytes())?;
        for (pmid, tids) in &self.doc_tids {
            w.write_all(&pmid.to_le_bytes())?;
            w.write_all(&(tids.len() as u32).to_le_bytes())?;
            for tid in tids {
                w.write_all(&tid.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Parses a reverse-record file into `pmid -> sorted TIDs`.
    pub fn read_reverse(mut r: impl Read) -> Result<BTreeMap<Pmid, Vec<Tid>>> {
        let docs = read_header(&mut r, REVERSE_MAGIC, "reverse record")?;
        let mut out = BTreeMap::new();
        let mut word = [0u8; 4];
        let mut next = |r: &mut dyn Read| -> Result<u32> {
            r.read_exact(&mut word)
                .map_err(|_| Error::Corrupt("reverse record file truncated".into()))?;
            Ok(u32::from_le_bytes(word))
        };
        for _ in 0..docs {
            let pmid = next(&mut r)?;
            let n = next(&mut r)?;
            let tids = (0..n).map(|_| next(&mut r)).collect::<Result<Vec<_>>>()?;
            if tids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Corrupt(format!("reverse record for {pmid} is not sorted")));
            }
            if out.insert(pmid, tids).is_some() {
                return Err(Error::Corrupt(format!("duplicate reverse record for {pmid}")));
            }
        }
        expect_eof(&mut r, "reverse record")?;
        Ok(out)
    }

    /// Writes `<path>` (rows) and `<path>.rev` (reverse records).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        crate::fsutil::write_atomic(path, &self.rows_bytes())?;
        let mut rev = Vec::new();
        self.write_reverse(&mut rev)?;
        crate::fsutil::write_atomic(&reverse_path(path), &rev)
    }

    /// Loads `<path>` and, if present, checks `<path>.rev` against it.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(Error::at_path(path))?;
        let index = Self::read_rows(bytes.as_slice())?;
        let rev_path = reverse_path(path);
        if rev_path.exists() {
            let rev_bytes = std::fs::read(&rev_path).map_err(Error::at_path(&rev_path))?;
            if Self::read_reverse(rev_bytes.as_slice())? != index.doc_tids {
                return Err(Error::Corrupt(format!(
                    "{} does not match {}",
                    rev_path.display(),
                    path.display()
                )));
            }
        }
        Ok(index)
    }

    /// Content hash of the row table, used as the index version.
    pub fn fingerprint(&self) -> String {
        crate::ingest::md5_hex(&self.rows_bytes())[..16].to_owned()
    }
}

pub fn reverse_path(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".rev");
    p.into()
}

fn read_header(r: &mut impl Read, magic: [u8; 4], what: &str) -> Result<u64> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)
        .map_err(|_| Error::Corrupt(format!("{what} file shorter than its header")))?;
    if head[..4] != magic {
        return Err(Error::Corrupt(format!("bad {what} file magic")));
    }
    let version = u32::from_le_bytes([head[4], head[5], head[6], head[7]]);
    if version != INDEX_VERSION {
        return Err(Error::Corrupt(format!("unsupported {what} file version {version}")));
    }
    let mut count = [0u8; 8];
    count.copy_from_slice(&head[8..16]);
    Ok(u64::from_le_bytes(count))
}

fn expect_eof(r: &mut impl Read, what: &str) -> Result<()> {
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Corrupt(format!("trailing bytes in {what} file")));
    }
    Ok(())
}
