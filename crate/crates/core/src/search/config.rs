use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{SearchEngine, Snapshot, DEFAULT_PAGE_SIZE};
use crate::error::{Error, Result};
use crate::ranking::BoostTable;
use crate::text::{StopwordList, TextPipeline};

pub const STORE_FILE: &str = "store.json";
pub const LEXICON_FILE: &str = "lexicon.json";
pub const EMBEDDINGS_FILE: &str = "embeddings.bin";
pub const INDEX_FILE: &str = "index.bin";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

const ENV_PREFIX: &str = "CLINSEARCH_";

/// Files a snapshot is loaded from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotPaths {
    pub store: PathBuf,
    pub lexicon: PathBuf,
    pub embeddings: PathBuf,
    pub index: PathBuf,
}

impl SnapshotPaths {
    /// The conventional file names inside one data directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            store: dir.join(STORE_FILE),
            lexicon: dir.join(LEXICON_FILE),
            embeddings: dir.join(EMBEDDINGS_FILE),
            index: dir.join(INDEX_FILE),
        }
    }

    /// Fails naming every missing file.
    pub fn check_exist(&self) -> Result<()> {
        let missing: Vec<String> = [&self.store, &self.lexicon, &self.embeddings, &self.index]
            .into_iter()
            .filter(|p| !p.is_file())
            .map(|p| p.display().to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("missing snapshot file(s): {}", missing.join(", "))))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub paths: SnapshotPaths,
    pub listen: String,
    pub page_size: usize,
    pub boosts: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// Pins the year the age penalty is measured against.
    pub current_year: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data_dir: Option<PathBuf>,
    store: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    index: Option<PathBuf>,
    listen: Option<String>,
    page_size: Option<usize>,
    boosts: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    current_year: Option<i32>,
}

impl RawConfig {
    fn from_env(env: &dyn Fn(&str) -> Option<String>) -> Result<Self> {
        let var = |name: &str| env(&format!("{ENV_PREFIX}{name}")).filter(|v| !v.is_empty());
        let path = |name: &str| var(name).map(PathBuf::from);
        let number = |name: &str| -> Result<Option<i64>> {
            var(name)
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("{ENV_PREFIX}{name} is not an integer: {v:?}")))
                })
                .transpose()
        };
        Ok(Self {
            data_dir: path("DATA_DIR"),
            store: path("STORE"),
            lexicon: path("LEXICON"),
            embeddings: path("EMBEDDINGS"),
            index: path("INDEX"),
            listen: var("LISTEN"),
            page_size: number("PAGE_SIZE")?.map(|n| n.max(0) as usize),
            boosts: path("BOOSTS"),
            stopwords: path("STOPWORDS"),
            current_year: number("CURRENT_YEAR")?.map(|n| n as i32),
        })
    }

    fn rebase(mut self, base: &Path) -> Self {
        for p in [
            &mut self.data_dir,
            &mut self.store,
            &mut self.lexicon,
            &mut self.embeddings,
            &mut self.index,
            &mut self.boosts,
            &mut self.stopwords,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        self
    }

    /// Fields set in `over` win.
    fn overlay(self, over: RawConfig) -> Self {
        Self {
            data_dir: over.data_dir.or(self.data_dir),
            store: over.store.or(self.store),
            lexicon: over.lexicon.or(self.lexicon),
            embeddings: over.embeddings.or(self.embeddings),
            index: over.index.or(self.index),
            listen: over.listen.or(self.listen),
            page_size: over.page_size.or(self.page_size),
            boosts: over.boosts.or(self.boosts),
            stopwords: over.stopwords.or(self.stopwords),
            current_year: over.current_year.or(self.current_year),
        }
    }
}

impl ServiceConfig {
    /// Defaults for a data directory.
    pub fn for_data_dir(dir: impl AsRef<Path>) -> Self {
        Self {
            paths: SnapshotPaths::in_dir(dir),
            listen: DEFAULT_LISTEN.to_owned(),
            page_size: DEFAULT_PAGE_SIZE,
            boosts: None,
            stopwords: None,
            current_year: None,
        }
    }

    /// Reads an optional TOML file, then applies `CLINSEARCH_*` environment
    /// variables on top. Relative paths in the file resolve against its
    /// directory.
    pub fn load(file: Option<&Path>) -> Result<Self> {
        Self::resolve(file, &|k| std::env::var(k).ok())
    }

    pub fn resolve(file: Option<&Path>, env: &dyn Fn(&str) -> Option<String>) -> Result<Self> {
        let from_file = match file {
            None => RawConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(Error::at_path(path))?;
                let raw: RawConfig = toml::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                raw.rebase(path.parent().unwrap_or(Path::new(".")))
            }
        };
        let raw = from_file.overlay(RawConfig::from_env(env)?);
        let defaults = Self::for_data_dir(raw.data_dir.as_deref().unwrap_or(Path::new(".")));
        let config = Self {
            paths: SnapshotPaths {
                store: raw.store.unwrap_or(defaults.paths.store),
                lexicon: raw.lexicon.unwrap_or(defaults.paths.lexicon),
                embeddings: raw.embeddings.unwrap_or(defaults.paths.embeddings),
                index: raw.index.unwrap_or(defaults.paths.index),
            },
            listen: raw.listen.unwrap_or(defaults.listen),
            page_size: raw.page_size.unwrap_or(defaults.page_size),
            boosts: raw.boosts,
            stopwords: raw.stopwords,
            current_year: raw.current_year,
        };
        if config.page_size == 0 {
            return Err(Error::Config("page_size must be positive".into()));
        }
        Ok(config)
    }

    pub fn pipeline(&self) -> Result<TextPipeline> {
        let stops = match &self.stopwords {
            Some(p) => StopwordList::from_file(p)?,
            None => StopwordList::default(),
        };
        Ok(TextPipeline::new(stops))
    }

    /// Loads the snapshot and boost table and assembles an engine.
    pub fn engine(&self) -> Result<SearchEngine> {
        let pipeline = self.pipeline()?;
        let boosts = BoostTable::load(self.boosts.as_deref())?;
        let snapshot = Snapshot::load(&self.paths, &pipeline)?;
        let mut engine = SearchEngine::new(snapshot, pipeline)
            .with_boosts(boosts)
            .with_page_size(self.page_size)?;
        if let Some(year) = self.current_year {
            engine = engine.with_current_year(year);
        }
        Ok(engine)
    }
}
