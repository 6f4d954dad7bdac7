//! Text pipeline: raw title/abstract/query text to normalized token ids.
//!
//! Order of operations is tokenize, stopword removal on the raw tokens,
//! normalization, then lexicon lookup. Stopwords are removed before
//! case-folding so that a fully capitalized form ("WHO") can be told apart
//! from its lowercase stopword twin ("who").

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Tid;

const DEFAULT_STOPWORDS: &str = include_str!("stopwords.txt");

/// Splits text on whitespace and hyphens, trimming leading and trailing
/// non-alphanumeric characters from each fragment. Empty fragments are dropped.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split(|c: char| c.is_whitespace() || c == '-')
        .map(|frag| frag.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|frag| !frag.is_empty())
        .collect()
}

/// At least two characters, at least one letter, and no lowercase letters.
pub fn is_fully_capitalized(token: &str) -> bool {
    let mut chars = 0usize;
    let mut letters = 0usize;
    for c in token.chars() {
        chars += 1;
        if c.is_alphabetic() {
            if !c.is_uppercase() {
                return false;
            }
            letters += 1;
        }
    }
    chars >= 2 && letters > 0
}

/// Hook applied to every token after case handling. The default is identity.
pub trait TokenNormalizer: Send + Sync {
    fn normalize(&self, token: String) -> String;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct IdentityNormalizer;

impl TokenNormalizer for IdentityNormalizer {
    fn normalize(&self, token: String) -> String {
        token
    }
}

/// Case-folds `token` unless it is fully capitalized, then applies the hook.
pub fn normalize_token_with(token: &str, hook: &dyn TokenNormalizer) -> String {
    let folded = if is_fully_capitalized(token) {
        token.to_owned()
    } else {
        token.to_lowercase()
    };
    hook.normalize(folded)
}

pub fn normalize_token(token: &str) -> String {
    normalize_token_with(token, &IdentityNormalizer)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// Parses one word per line; blank lines and `#` comments are ignored.
    /// Entries are lowercased on load.
    pub fn parse(source: &str) -> Self {
        let words = source
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path).map_err(Error::at_path(path))?;
        Ok(Self::parse(&source))
    }

    pub fn empty() -> Self {
        Self {
            words: HashSet::new(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

/// Drops a token iff its lowercase form is a stopword and it is not fully
/// capitalized.
pub fn remove_stopwords<'a>(tokens: Vec<&'a str>, stops: &StopwordList) -> Vec<&'a str> {
    tokens
        .into_iter()
        .filter(|t| is_fully_capitalized(t) || !stops.contains(&t.to_lowercase()))
        .collect()
}

/// Bidirectional token/TID map with per-token document frequency.
///
/// TIDs are dense and start at 1.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Lexicon {
    tokens: Vec<String>,
    doc_freq: Vec<u32>,
    corpus_size: u32,
    #[serde(skip)]
    token_to_tid: HashMap<String, Tid>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
            && self.doc_freq == other.doc_freq
            && self.corpus_size == other.corpus_size
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn corpus_size(&self) -> u32 {
        self.corpus_size
    }

    pub fn tid(&self, token: &str) -> Option<Tid> {
        self.token_to_tid.get(token).copied()
    }

    pub fn token(&self, tid: Tid) -> Option<&str> {
        let idx = (tid as usize).checked_sub(1)?;
        self.tokens.get(idx).map(String::as_str)
    }

    pub fn doc_freq(&self, tid: Tid) -> Option<u32> {
        let idx = (tid as usize).checked_sub(1)?;
        self.doc_freq.get(idx).copied()
    }

    pub fn contains(&self, tid: Tid) -> bool {
        tid >= 1 && (tid as usize) <= self.tokens.len()
    }

    /// Iterates `(tid, token)` in TID order.
    pub fn iter(&self) -> impl Iterator<Item = (Tid, &str)> + '_ {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (i as Tid + 1, t.as_str()))
    }

    /// Returns the TID of `token`, assigning the next dense id if unseen.
    pub fn intern(&mut self, token: &str) -> Tid {
        if let Some(tid) = self.token_to_tid.get(token) {
            return *tid;
        }
        self.tokens.push(token.to_owned());
        self.doc_freq.push(0);
        let tid = self.tokens.len() as Tid;
        self.token_to_tid.insert(token.to_owned(), tid);
        tid
    }

    /// Counts one more document containing the deduplicated set of `tids`.
    pub fn record_document<'a>(&mut self, tids: impl IntoIterator<Item = &'a Tid>) {
        self.corpus_size += 1;
        let unique: HashSet<Tid> = tids.into_iter().copied().collect();
        for tid in unique {
            if let Some(df) = (tid as usize)
                .checked_sub(1)
                .and_then(|i| self.doc_freq.get_mut(i))
            {
                *df += 1;
            }
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let mut lexicon: Lexicon = serde_json::from_slice(bytes)?;
        if lexicon.doc_freq.len() != lexicon.tokens.len() {
            return Err(Error::Corrupt(format!(
                "lexicon has {} tokens but {} frequencies",
                lexicon.tokens.len(),
                lexicon.doc_freq.len()
            )));
        }
        lexicon.token_to_tid = lexicon
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as Tid + 1))
            .collect();
        if lexicon.token_to_tid.len() != lexicon.tokens.len() {
            return Err(Error::Corrupt("lexicon contains duplicate tokens".into()));
        }
        Ok(lexicon)
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

/// Stopword list plus normalization hook; cheap to clone and share.
#[derive(Clone)]
pub struct TextPipeline {
    stops: Arc<StopwordList>,
    normalizer: Arc<dyn TokenNormalizer>,
}

impl fmt::Debug for TextPipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TextPipeline")
            .field("stopwords", &self.stops.len())
            .finish_non_exhaustive()
    }
}

impl Default for TextPipeline {
    fn default() -> Self {
        Self::new(StopwordList::default())
    }
}

impl TextPipeline {
    pub fn new(stops: StopwordList) -> Self {
        Self {
            stops: Arc::new(stops),
            normalizer: Arc::new(IdentityNormalizer),
        }
    }

    pub fn with_normalizer(mut self, normalizer: impl TokenNormalizer + 'static) -> Self {
        self.normalizer = Arc::new(normalizer);
        self
    }

    pub fn stopwords(&self) -> &StopwordList {
        &self.stops
    }

    /// Tokenize, drop stopwords, normalize.
    pub fn normalized_tokens(&self, text: &str) -> Vec<String> {
        remove_stopwords(tokenize(text), &self.stops)
            .into_iter()
            .map(|t| normalize_token_with(t, self.normalizer.as_ref()))
            .filter(|t| !t.is_empty())
            .collect()
    }

    /// Maps text to TIDs against a frozen lexicon; unseen tokens are dropped.
    pub fn text_to_tids(&self, text: &str, lexicon: &Lexicon) -> Vec<Tid> {
        self.normalized_tokens(text)
            .iter()
            .filter_map(|t| lexicon.tid(t))
            .collect()
    }

    /// Maps text to TIDs, assigning fresh TIDs to unseen tokens.
    pub fn text_to_tids_mut(&self, text: &str, lexicon: &mut Lexicon) -> Vec<Tid> {
        self.normalized_tokens(text)
            .iter()
            .map(|t| lexicon.intern(t))
            .collect()
    }

    /// Tokenizes one document into the lexicon and records its document
    /// frequencies. Returns `(title_tids, abstract_tids)`.
    pub fn add_document(
        &self,
        lexicon: &mut Lexicon,
        title: &str,
        abstract_text: &str,
    ) -> (Vec<Tid>, Vec<Tid>) {
        let title_tids = self.text_to_tids_mut(title, lexicon);
        let abstract_tids = self.text_to_tids_mut(abstract_text, lexicon);
        lexicon.record_document(title_tids.iter().chain(&abstract_tids));
        (title_tids, abstract_tids)
    }
}
