//! The ingestion pipeline: crawl, fetch, convert, analyze, report. Each stage
//! reads the corpus store, does its work, and drops a marker file under
//! `<root>/stages/`. Stages are idempotent: rerunning one only touches
//! documents still waiting at its entry status, and artifact files are
//! rewritten byte-identically.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use misl_core::acquire::{
    fetch, parse_index_page, resolve_link, write_index_csv, AcquireError, ConversionOutcome,
    FetchOutcome, Transport,
};
use misl_core::analytics::{facts_to_partial, merge, StatsPartial};
use misl_core::extract::{analyze_document, AnalysisContext, DocFacts, ExtractError, Extractor};
use misl_core::normalize::{load_overrides, parse_release_date, NormalizeError};
use misl_core::report::{bundle_from_partial, write_bundle, ReportError};
use misl_core::store::{
    failure_reasons, CorpusStore, DocStatus, MetadataRecord, StatusCounts, StoreError,
};

use crate::config::Config;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage `{attempted}` needs `{needed}` to run first: {detail}")]
    StageOrder { attempted: &'static str, needed: &'static str, detail: String },
    #[error("index_url is not set (config key `index_url` or MISL_INDEX_URL)")]
    MissingIndexUrl,
    #[error("index page unavailable: {0}")]
    IndexUnavailable(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Acquire(#[from] AcquireError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const STAGES: [&str; 5] = ["crawl", "fetch", "convert", "analyze", "report"];

fn marker_path(root: &Path, stage: &str) -> PathBuf {
    root.join("stages").join(format!("{stage}.done"))
}

pub fn has_marker(root: &Path, stage: &str) -> bool {
    marker_path(root, stage).exists()
}

/// Marker content is fixed so a rerun rewrites the same bytes.
pub fn write_marker(root: &Path, stage: &str) -> std::io::Result<()> {
    let path = marker_path(root, stage);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    write_atomic(&path, b"done\n")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn open_store(cfg: &Config, attempted: &'static str) -> Result<CorpusStore, PipelineError> {
    CorpusStore::open(&cfg.root).map_err(|e| match e {
        StoreError::NoStore(path) => PipelineError::StageOrder {
            attempted,
            needed: "crawl",
            detail: format!("no corpus store at {}", path.display()),
        },
        other => other.into(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrawlStats {
    pub rows: usize,
    pub new_docs: usize,
    pub total_docs: usize,
    pub overridden_dates: usize,
    pub empty_index: bool,
}

impl fmt::Display for CrawlStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "crawl: {} index rows, {} new documents, {} total",
            self.rows, self.new_docs, self.total_docs
        )?;
        if self.overridden_dates > 0 {
            write!(f, ", {} dates overridden", self.overridden_dates)?;
        }
        if self.empty_index {
            write!(f, " (warning: index page yielded no rows)")?;
        }
        Ok(())
    }
}

/// Fetch the index page, parse it into metadata rows, and register every row
/// in the store. Reruns are safe: rows already present are recognized by
/// their link. The parsed rows are also written to `<root>/index.csv`.
pub fn crawl(cfg: &Config, transport: &dyn Transport) -> Result<CrawlStats, PipelineError> {
    if cfg.index_url.trim().is_empty() {
        return Err(PipelineError::MissingIndexUrl);
    }
    let page = match fetch(transport, &cfg.index_url, &cfg.fetch_policy())? {
        FetchOutcome::Fetched { body, .. } => body,
        FetchOutcome::DeadLink { status } => {
            return Err(PipelineError::IndexUnavailable(format!("http {status}")));
        }
        FetchOutcome::TransportError { detail } => {
            return Err(PipelineError::IndexUnavailable(detail));
        }
    };
    let html = String::from_utf8_lossy(&page);
    let (records, warnings) = parse_index_page(&html, &cfg.row_selector)?;
    let empty_index = !warnings.is_empty();
    if empty_index {
        log::warn!("index page {} yielded no rows", cfg.index_url);
    }

    let overrides = match &cfg.overrides_path {
        Some(path) => load_overrides(&fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };

    let store = CorpusStore::open_or_create(&cfg.root)?;
    let before = store.len();
    let mut overridden = 0;
    for rec in &records {
        let link = resolve_link(&cfg.index_url, &rec.link);
        let date = rec.date.as_deref().and_then(parse_release_date);
        let id = store.add_record(MetadataRecord {
            link,
            title: rec.title.clone(),
            release_date: date,
            description: rec.description.clone(),
        })?;
        if let Some(date) = overrides.get(id.as_str()) {
            store.update_date(&id, Some(*date))?;
            overridden += 1;
        }
    }

    let mut csv = Vec::new();
    write_index_csv(&records, &mut csv)?;
    write_atomic(&cfg.root.join("index.csv"), &csv)?;
    write_marker(&cfg.root, "crawl")?;
    Ok(CrawlStats {
        rows: records.len(),
        new_docs: store.len() - before,
        total_docs: store.len(),
        overridden_dates: overridden,
        empty_index,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FetchStats {
    pub attempted: usize,
    pub fetched: usize,
    pub dead_links: usize,
    pub transport_errors: usize,
}

impl fmt::Display for FetchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fetch: {} attempted, {} fetched, {} dead links, {} transport errors",
            self.attempted, self.fetched, self.dead_links, self.transport_errors
        )
    }
}

enum FetchResult {
    Stored,
    Dead(u16),
    Failed(String),
}

/// Download every indexed document. Dead links (4xx) are terminal; transport
/// errors leave the document indexed so a rerun retries it.
pub fn fetch_stage(cfg: &Config, transport: &dyn Transport) -> Result<FetchStats, PipelineError> {
    let store = open_store(cfg, "fetch")?;
    let todo = store.scan(|d| matches!(d.status, DocStatus::Indexed));
    let policy = cfg.fetch_policy();

    // Network and raw-file writes run in parallel; manifest updates are
    // applied serially afterwards so the store lock is never contended.
    let results: Vec<(usize, Result<FetchResult, PipelineError>)> = todo
        .par_iter()
        .enumerate()
        .map(|(i, doc)| {
            let res = (|| {
                match fetch(transport, &doc.meta.link, &policy)? {
                    FetchOutcome::Fetched { body, .. } => {
                        fs::write(store.raw_path(&doc.id), body)?;
                        Ok(FetchResult::Stored)
                    }
                    FetchOutcome::DeadLink { status } => Ok(FetchResult::Dead(status)),
                    FetchOutcome::TransportError { detail } => Ok(FetchResult::Failed(detail)),
                }
            })();
            (i, res)
        })
        .collect();

    let mut stats = FetchStats { attempted: todo.len(), ..FetchStats::default() };
    for (i, res) in results {
        let doc = &todo[i];
        match res? {
            FetchResult::Stored => {
                store.mark_fetched(&doc.id)?;
                stats.fetched += 1;
            }
            FetchResult::Dead(status) => {
                store.mark_dead_link(&doc.id, &format!("http {status}"))?;
                stats.dead_links += 1;
            }
            FetchResult::Failed(detail) => {
                log::warn!("fetch failed for {} ({}): {detail}", doc.id, doc.meta.link);
                stats.transport_errors += 1;
            }
        }
    }
    write_marker(&cfg.root, "fetch")?;
    Ok(stats)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConvertStats {
    pub attempted: usize,
    pub converted: usize,
    pub non_latin: usize,
    pub corrupt: usize,
    pub converter_failures: usize,
}

impl fmt::Display for ConvertStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "convert: {} attempted, {} converted, {} non-latin, {} corrupt, {} converter failures",
            self.attempted, self.converted, self.non_latin, self.corrupt, self.converter_failures
        )
    }
}

/// Convert every fetched document to text with the external converter
/// command. Every outcome is terminal: success attaches text, the rest record
/// a conversion failure with a machine-readable reason.
pub fn convert_stage(cfg: &Config) -> Result<ConvertStats, PipelineError> {
    let store = open_store(cfg, "convert")?;
    let counts = store.status_counts();
    if !has_marker(&cfg.root, "fetch") && counts.total() == counts.indexed && counts.total() > 0 {
        return Err(PipelineError::StageOrder {
            attempted: "convert",
            needed: "fetch",
            detail: "no document has been fetched".to_string(),
        });
    }
    let converter = cfg.converter()?;
    let todo = store.scan(|d| matches!(d.status, DocStatus::Fetched));

    let outcomes: Vec<(usize, ConversionOutcome)> = todo
        .par_iter()
        .enumerate()
        .map(|(i, doc)| (i, converter.convert(&store.raw_path(&doc.id))))
        .collect();

    let mut stats = ConvertStats { attempted: todo.len(), ..ConvertStats::default() };
    for (i, outcome) in outcomes {
        let doc = &todo[i];
        match outcome {
            ConversionOutcome::Converted { text } => {
                store.attach_text(&doc.id, &text)?;
                stats.converted += 1;
            }
            ConversionOutcome::NonLatinScript => {
                store.mark_conversion_failed(&doc.id, failure_reasons::NON_LATIN_SCRIPT)?;
                stats.non_latin += 1;
            }
            ConversionOutcome::CorruptSource => {
                store.mark_conversion_failed(&doc.id, failure_reasons::CORRUPT_SOURCE)?;
                stats.corrupt += 1;
            }
            ConversionOutcome::ConverterFailed { detail } => {
                log::warn!("converter failed for {}: {detail}", doc.id);
                store.mark_conversion_failed(
                    &doc.id,
                    &format!("{}: {detail}", failure_reasons::CONVERTER_FAILED),
                )?;
                stats.converter_failures += 1;
            }
        }
    }
    write_marker(&cfg.root, "convert")?;
    Ok(stats)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalyzeStats {
    pub docs: usize,
    pub with_text: usize,
    pub metadata_only: usize,
}

impl fmt::Display for AnalyzeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "analyze: {} documents ({} with text, {} metadata-only)",
            self.docs, self.with_text, self.metadata_only
        )
    }
}

/// Extract facts from every document in the store. Documents without text
/// degrade to metadata-only facts. Always a full recompute; output is
/// `<root>/facts.jsonl` (one document per line, id order) and
/// `<root>/partial.json` (the merged aggregate).
pub fn analyze_stage(cfg: &Config) -> Result<AnalyzeStats, PipelineError> {
    let store = open_store(cfg, "analyze")?;
    let lookup = cfg.lookup()?;
    let roster = cfg.roster()?;
    let extractor = Extractor::new(cfg.grammar());
    let ctx = AnalysisContext { extractor: &extractor, lookup: &lookup, roster: &roster };

    let docs = store.scan(|_| true);
    let facts: Vec<DocFacts> = docs
        .par_iter()
        .map(|doc| match &doc.status {
            DocStatus::Converted => {
                let text = store.load_text(&doc.id)?;
                Ok(analyze_document(doc, Some(&text), &ctx, false)?)
            }
            _ => Ok(analyze_document(doc, None, &ctx, true)?),
        })
        .collect::<Result<_, PipelineError>>()?;

    let mut jsonl = Vec::new();
    for f in &facts {
        serde_json::to_writer(&mut jsonl, f).map_err(std::io::Error::other)?;
        jsonl.push(b'\n');
    }
    write_atomic(&cfg.root.join("facts.jsonl"), &jsonl)?;

    let partial = facts
        .iter()
        .map(facts_to_partial)
        .fold(StatsPartial::empty(), merge);
    let mut pretty = serde_json::to_vec_pretty(&partial).map_err(std::io::Error::other)?;
    pretty.push(b'\n');
    write_atomic(&cfg.root.join("partial.json"), &pretty)?;
    write_marker(&cfg.root, "analyze")?;

    let with_text = facts.iter().filter(|f| f.text_analyzed).count();
    Ok(AnalyzeStats {
        docs: facts.len(),
        with_text,
        metadata_only: facts.len() - with_text,
    })
}

/// Render the report bundle from `<root>/partial.json` into
/// `<root>/reports/`. Returns the report directory.
pub fn report_stage(cfg: &Config) -> Result<PathBuf, PipelineError> {
    let partial_path = cfg.root.join("partial.json");
    if !partial_path.exists() {
        return Err(PipelineError::StageOrder {
            attempted: "report",
            needed: "analyze",
            detail: format!("{} does not exist", partial_path.display()),
        });
    }
    let partial: StatsPartial = serde_json::from_str(&fs::read_to_string(&partial_path)?)
        .map_err(std::io::Error::other)?;
    let roster = cfg.roster()?;
    let bundle = bundle_from_partial(&partial, &roster, &cfg.report_options())?;
    let dir = cfg.root.join("reports");
    write_bundle(&dir, &bundle)?;
    write_marker(&cfg.root, "report")?;
    Ok(dir)
}

/// Funnel accounting over the store, independent of any one stage run.
#[derive(Clone, Copy, Debug)]
pub struct Funnel {
    pub counts: StatusCounts,
}

impl Funnel {
    pub fn read(cfg: &Config) -> Result<Self, PipelineError> {
        let store = open_store(cfg, "status")?;
        Ok(Funnel { counts: store.status_counts() })
    }

    /// Fraction of indexed documents that never reached converted text.
    pub fn failure_rate(&self) -> f64 {
        let total = self.counts.total();
        if total == 0 {
            0.0
        } else {
            (total - self.counts.converted) as f64 / total as f64
        }
    }
}

impl fmt::Display for Funnel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.counts;
        write!(
            f,
            "funnel: {} indexed -> {} fetched -> {} converted ({} dead links, {} conversion failures, {} still pending); failure rate {:.1}%",
            c.total(),
            c.total() - c.dead_link - c.indexed,
            c.converted,
            c.dead_link,
            c.conversion_failed,
            c.indexed + c.fetched,
            self.failure_rate() * 100.0
        )
    }
}

pub struct AllStats {
    pub crawl: CrawlStats,
    pub fetch: FetchStats,
    pub convert: ConvertStats,
    pub analyze: AnalyzeStats,
    pub report_dir: PathBuf,
    pub funnel: Funnel,
}

/// Run the whole pipeline in order.
pub fn run_all(cfg: &Config, transport: &dyn Transport) -> Result<AllStats, PipelineError> {
    let crawl = crawl(cfg, transport)?;
    let fetch = fetch_stage(cfg, transport)?;
    let convert = convert_stage(cfg)?;
    let analyze = analyze_stage(cfg)?;
    let report_dir = report_stage(cfg)?;
    let funnel = Funnel::read(cfg)?;
    Ok(AllStats { crawl, fetch, convert, analyze, report_dir, funnel })
}

/// Per-status and per-reason breakdown for the `status` command.
pub struct StatusReport {
    pub funnel: Funnel,
    pub failure_reasons: BTreeMap<String, usize>,
    pub stages_done: Vec<&'static str>,
}

pub fn status(cfg: &Config) -> Result<StatusReport, PipelineError> {
    let store = open_store(cfg, "status")?;
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    for doc in store.scan(|d| matches!(d.status, DocStatus::ConversionFailed { .. })) {
        if let DocStatus::ConversionFailed { reason } = &doc.status {
            // Converter failures carry per-document detail after the colon;
            // bucket on the stable prefix.
            let key = reason.split(':').next().unwrap_or(reason).to_string();
            *reasons.entry(key).or_default() += 1;
        }
    }
    Ok(StatusReport {
        funnel: Funnel { counts: store.status_counts() },
        failure_reasons: reasons,
        stages_done: STAGES
            .iter()
            .copied()
            .filter(|s| has_marker(&cfg.root, s))
            .collect(),
    })
}

impl fmt::Display for StatusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.funnel.counts;
        writeln!(
            f,
            "documents: {} total ({} indexed, {} fetched, {} converted, {} conversion failed, {} dead links)",
            c.total(),
            c.indexed,
            c.fetched,
            c.converted,
            c.conversion_failed,
            c.dead_link
        )?;
        for (reason, n) in &self.failure_reasons {
            writeln!(f, "  {reason}: {n}")?;
        }
        writeln!(f, "{}", self.funnel)?;
        write!(f, "stages done: ")?;
        if self.stages_done.is_empty() {
            write!(f, "none")?;
        } else {
            write!(f, "{}", self.stages_done.join(", "))?;
        }
        Ok(())
    }
}
