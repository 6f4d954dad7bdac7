//! Command-line front end: `ingest`, `train`, `index`, `search`, `serve`,
//! `stats`.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for data
//! errors.

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::build::{index_store, merge_new_documents, tokenize_corpus};
use crate::embedding::{read_matrix, write_matrix, write_token_sidecar, SkipGramTrainer, TrainingConfig};
use crate::error::{Error, Result};
use crate::index::PostingsIndex;
use crate::ingest::{
    decode_batch_bytes, join_journal_metadata, parse_document_batch, parse_sidecar,
    read_journal_table, verify_checksum, CorpusStore,
};
use crate::ranking::PublicationCategory;
use crate::search::{serve, SearchRequest, ServiceConfig, SnapshotPaths};
use crate::text::{Lexicon, StopwordList, TextPipeline};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "clinsearch", version, about = "Clinical literature search engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse MEDLINE XML batches into the corpus store.
    Ingest(IngestArgs),
    /// Build the lexicon and train skip-gram embeddings.
    Train(TrainArgs),
    /// Build or extend the inverted index.
    Index(IndexArgs),
    /// Run one query and print tab-separated results.
    Search(SearchArgs),
    /// Serve the JSON API over HTTP.
    Serve(ServeArgs),
    /// Print corpus, lexicon and index sizes.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// XML files (optionally gzipped) or directories of them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Journal table (CSV or TSV with a header row).
    #[arg(long)]
    journals: PathBuf,
    #[arg(long)]
    store: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    window: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    negative: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    #[arg(long, default_value_t = 1)]
    min_count: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stopword list, one word per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Add documents missing from an existing index instead of rebuilding.
    #[arg(long)]
    merge: bool,
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SnapshotArgs {
    /// Directory holding store.json, lexicon.json, embeddings.bin, index.bin.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Service configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    boosts: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Year the age penalty is measured against; defaults to now.
    #[arg(long)]
    current_year: Option<i32>,
}

impl SnapshotArgs {
    fn config(&self) -> Result<ServiceConfig> {
        let mut config = match (&self.config, &self.data_dir) {
            (Some(file), _) => ServiceConfig::load(Some(file))?,
            (None, Some(dir)) => ServiceConfig::for_data_dir(dir),
            (None, None) => ServiceConfig::load(None)?,
        };
        if let (Some(_), Some(dir)) = (&self.config, &self.data_dir) {
            config.paths = SnapshotPaths::in_dir(dir);
        }
        let p = &mut config.paths;
        for (slot, over) in [
            (&mut p.store, &self.store),
            (&mut p.lexicon, &self.lexicon),
            (&mut p.embeddings, &self.embeddings),
            (&mut p.index, &self.index),
        ] {
            if let Some(o) = over {
                *slot = o.clone();
            }
        }
        config.boosts = self.boosts.clone().or(config.boosts);
        config.stopwords = self.stopwords.clone().or(config.stopwords);
        config.current_year = self.current_year.or(config.current_year);
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    query: String,
    /// reviews, guidelines or studies.
    #[arg(long, default_value = "reviews")]
    tab: String,
    #[arg(long, default_value_t = 1)]
    page: usize,
    #[command(flatten)]
    snapshot: SnapshotArgs,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Address to bind, e.g. 127.0.0.1:8080.
    #[arg(long)]
    listen: Option<String>,
    #[command(flatten)]
    snapshot: SnapshotArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    snapshot: SnapshotArgs,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => ingest(&a, out),
        Command::Train(a) => train(&a, out),
        Command::Index(a) => index(&a, out),
        Command::Search(a) => search(&a, out),
        Command::Serve(a) => serve_cmd(&a, out),
        Command::Stats(a) => stats(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::EmptyQuery => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} not found: {}", path.display())))
    }
}

fn load_pipeline(stopwords: Option<&Path>) -> Result<TextPipeline> {
    Ok(TextPipeline::new(match stopwords {
        Some(p) => {
            require_file(p, "stopword list")?;
            StopwordList::from_file(p)?
        }
        None => StopwordList::default(),
    }))
}

fn is_batch_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(".xml") || name.ends_with(".xml.gz")
}

/// Expands directories into their batch files, sorted by name.
fn batch_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(Error::at_path(input))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_batch_file(p))
                .collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(Error::Config(format!("input not found: {}", input.display())));
        }
    }
    Ok(files)
}

fn sidecar_path(file: &Path) -> PathBuf {
    let mut s = file.as_os_str().to_owned();
    s.push(".md5");
    PathBuf::from(s)
}

fn ingest(args: &IngestArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&args.journals, "journal table")?;
    let files = batch_files(&args.inputs)?;
    let journals = read_journal_table(&args.journals)?;
    let mut store = if args.store.is_file() {
        CorpusStore::load(&args.store)?
    } else {
        CorpusStore::new()
    };
    store.set_journal_table(&journals);

    let (mut parsed, mut kept, mut dropped, mut skipped, mut already) = (0, 0, 0, 0, 0);
    for file in &files {
        let bytes = fs::read(file).map_err(Error::at_path(file))?;
        let sidecar = sidecar_path(file);
        if sidecar.is_file() {
            let expected = parse_sidecar(&fs::read_to_string(&sidecar).map_err(Error::at_path(&sidecar))?)?;
            if !verify_checksum(&bytes, &expected)? {
                return Err(Error::Corrupt(format!("checksum mismatch for {}", file.display())));
            }
        }
        let batch_id = file
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| file.display().to_string());
        if store.has_batch(&batch_id) {
            already += 1;
            continue;
        }
        let xml = decode_batch_bytes(&bytes).map_err(|e| Error::Corrupt(format!("{}: {e}", file.display())))?;
        let batch = parse_document_batch(&xml).map_err(|e| Error::Corrupt(format!("{}: {e}", file.display())))?;
        parsed += batch.records.len();
        skipped += batch.skipped;
        let joined = join_journal_metadata(batch.records, &journals);
        kept += joined.kept.len();
        dropped += joined.dropped;
        store = store.ingest_batch(&batch_id, joined.kept);
    }
    store.save(&args.store)?;
    writeln!(
        out,
        "parsed {parsed} kept {kept} dropped {dropped} skipped {skipped} (batches: {} new, {already} already ingested; store holds {} documents)",
        files.len() - already,
        store.len()
    )?;
    Ok(())
}

fn train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let config = TrainingConfig {
        dim: args.dim,
        window: args.window,
        epochs: args.epochs,
        negative_samples: args.negative,
        initial_learning_rate: args.lr,
        min_token_count: args.min_count,
        rng_seed: args.seed,
    };
    let trainer = SkipGramTrainer::new(config)?;
    let pipeline = load_pipeline(args.stopwords.as_deref())?;
    require_file(&args.store, "corpus store")?;
    let store = CorpusStore::load(&args.store)?;
    if store.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let corpus = tokenize_corpus(&store, &pipeline);
    let mut io_err = None;
    let outcome = trainer.train_with(&corpus.streams(), |epoch, loss| {
        if let Err(e) = writeln!(out, "epoch {} loss {loss:.6}", epoch + 1) {
            io_err.get_or_insert(e);
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }

    fs::create_dir_all(&args.out_dir).map_err(Error::at_path(&args.out_dir))?;
    let lexicon_path = args.out_dir.join(crate::search::LEXICON_FILE);
    let matrix_path = args.out_dir.join(crate::search::EMBEDDINGS_FILE);
    let tokens_path = args.out_dir.join("embeddings.tokens.tsv");
    corpus.lexicon.save(&lexicon_path)?;
    let mut bytes = Vec::new();
    write_matrix(&outcome.matrix, &mut bytes)?;
    crate::fsutil::write_atomic(&matrix_path, &bytes)?;
    let mut listing = Vec::new();
    write_token_sidecar(&outcome.matrix, &corpus.lexicon, &mut listing)?;
    crate::fsutil::write_atomic(&tokens_path, &listing)?;
    writeln!(
        out,
        "trained {} vectors of dim {} over {} documents; wrote {} and {}",
        outcome.matrix.len(),
        outcome.matrix.dim(),
        store.len(),
        lexicon_path.display(),
        matrix_path.display()
    )?;
    Ok(())
}

fn index(args: &IndexArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&args.store, "corpus store")?;
    require_file(&args.lexicon, "lexicon")?;
    let pipeline = load_pipeline(args.stopwords.as_deref())?;
    let store = CorpusStore::load(&args.store)?;
    let lexicon = Lexicon::load(&args.lexicon)?;
    let (index, added) = if args.merge && args.out.is_file() {
        merge_new_documents(&PostingsIndex::load(&args.out)?, &store, &lexicon, &pipeline)
    } else {
        let index = index_store(&store, &lexicon, &pipeline)?;
        let n = index.document_count();
        (index, n)
    };
    index.save(&args.out)?;
    writeln!(
        out,
        "indexed {added} new documents; {} documents, {} tokens, {} rows; version {}",
        index.document_count(),
        index.token_count(),
        index.row_count(),
        index.fingerprint()
    )?;
    Ok(())
}

fn search(args: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let category: PublicationCategory = args.tab.parse().map_err(|e: Error| match e {
        Error::InvalidInput(msg) => Error::Config(msg),
        other => other,
    })?;
    if args.page < 1 {
        return Err(Error::Config("--page must be at least 1".into()));
    }
    let engine = args.snapshot.config()?.engine()?;
    let response = engine.search(&SearchRequest::new(args.query.clone(), category, args.page))?;
    let first_rank = (response.page - 1) * response.page_size;
    let mut w = BufWriter::new(out);
    for (i, r) in response.results.iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            first_rank + i + 1,
            r.pmid,
            r.year,
            r.journal,
            r.score,
            r.title
        )?;
    }
    w.flush()?;
    Ok(())
}

fn serve_cmd(args: &ServeArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = args.snapshot.config()?;
    if let Some(listen) = &args.listen {
        config.listen = listen.clone();
    }
    let addr: SocketAddr = config
        .listen
        .parse()
        .map_err(|_| Error::Config(format!("invalid listen address {:?}", config.listen)))?;
    let engine = Arc::new(config.engine()?);
    writeln!(
        out,
        "serving {} documents (index {}) on http://{addr}",
        engine.snapshot().document_count(),
        engine.snapshot().version()
    )?;
    out.flush()?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(serve(engine, addr))
}

fn stats(args: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    let paths = args.snapshot.config()?.paths;
    let store = if paths.store.is_file() {
        CorpusStore::load(&paths.store)?
    } else {
        CorpusStore::new()
    };
    let lexicon = if paths.lexicon.is_file() {
        Lexicon::load(&paths.lexicon)?
    } else {
        Lexicon::new()
    };
    let embedded = if paths.embeddings.is_file() {
        let file = fs::File::open(&paths.embeddings).map_err(Error::at_path(&paths.embeddings))?;
        read_matrix(BufReader::new(file))?.len()
    } else {
        0
    };
    let index = if paths.index.is_file() {
        PostingsIndex::load(&paths.index)?
    } else {
        PostingsIndex::new()
    };
    let rows = [
        ("documents", store.len()),
        ("journals", store.journal_table().len()),
        ("batches", store.ingest_log().len()),
        ("lexicon_tokens", lexicon.len()),
        ("embedded_tokens", embedded),
        ("indexed_documents", index.document_count()),
        ("indexed_tokens", index.token_count()),
        ("index_rows", index.row_count()),
    ];
    for (name, n) in rows {
        writeln!(out, "{name}\t{n}")?;
    }
    Ok(())
}
