//! Durable corpus store: one directory holding a metadata manifest and the
//! extracted text of every converted document.
//!
//! Layout under the corpus root:
//!
//! ```text
//! <root>/
//!   manifest.jsonl     # one JSON object per document, sorted by id
//!   text/<docid>.txt   # extracted text, present iff status = converted
//!   raw/<docid>        # fetched source bytes (cache, written by callers)
//! ```
//!
//! The manifest is the source of truth. Every mutation rewrites it through a
//! temp file + rename, so a crashed run leaves either the old or the new
//! manifest, never a torn one. A store handle serializes writers internally;
//! clones of document data handed out by reads are snapshots.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Stable identifier for one document, derived from its source link.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocId(String);

impl DocId {
    pub fn new(id: impl Into<String>) -> Self {
        DocId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DocId {
    fn from(s: &str) -> Self {
        DocId(s.to_string())
    }
}

/// Metadata for one document as indexed from the source site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetadataRecord {
    pub link: String,
    pub title: String,
    pub release_date: Option<NaiveDate>,
    pub description: Option<String>,
}

/// Canonical failure-reason vocabulary for `conversion_failed` documents, so
/// every writer records the same strings and funnel accounting can group on
/// them.
pub mod failure_reasons {
    pub const NON_LATIN_SCRIPT: &str = "non_latin_script";
    pub const CORRUPT_SOURCE: &str = "corrupt_source";
    pub const CONVERTER_FAILED: &str = "converter_failed";
}

/// Lifecycle state of a document. Transitions are forward-only:
/// indexed -> fetched -> (converted | conversion_failed), indexed -> dead_link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DocStatus {
    Indexed,
    Fetched,
    Converted,
    ConversionFailed { reason: String },
    DeadLink { detail: String },
}

impl DocStatus {
    pub fn name(&self) -> &'static str {
        match self {
            DocStatus::Indexed => "indexed",
            DocStatus::Fetched => "fetched",
            DocStatus::Converted => "converted",
            DocStatus::ConversionFailed { .. } => "conversion_failed",
            DocStatus::DeadLink { .. } => "dead_link",
        }
    }

    fn failure_reason(&self) -> Option<&str> {
        match self {
            DocStatus::ConversionFailed { reason } => Some(reason),
            DocStatus::DeadLink { detail } => Some(detail),
            _ => None,
        }
    }
}

/// One document as returned by reads: metadata plus current status.
/// Text is loaded separately via [`CorpusStore::load_text`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: DocId,
    pub meta: MetadataRecord,
    pub status: DocStatus,
}

/// Per-status document counts for funnel accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub indexed: usize,
    pub fetched: usize,
    pub converted: usize,
    pub conversion_failed: usize,
    pub dead_link: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.indexed + self.fetched + self.converted + self.conversion_failed + self.dead_link
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("document not found: {0}")]
    NotFound(DocId),
    #[error("invalid transition for {id}: {from} -> {to}")]
    InvalidTransition { id: DocId, from: String, to: String },
    #[error("manifest corrupt at line {line}: {detail}")]
    ManifestCorrupt { line: usize, detail: String },
    #[error("text missing for converted document {0}")]
    TextMissing(DocId),
    #[error("store already exists at {0}")]
    AlreadyExists(PathBuf),
    #[error("no manifest at {0}")]
    NoStore(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Serialized manifest line. Field set and names are a stable on-disk contract.
#[derive(Serialize, Deserialize)]
struct ManifestLine {
    id: String,
    link: String,
    title: String,
    date: Option<String>,
    description: Option<String>,
    status: String,
    failure_reason: Option<String>,
}

struct Entry {
    meta: MetadataRecord,
    status: DocStatus,
}

struct Inner {
    docs: BTreeMap<DocId, Entry>,
    by_link: HashMap<String, DocId>,
}

/// Handle to a corpus directory. Thread-safe; all writes go through the
/// internal lock and rewrite the manifest atomically.
pub struct CorpusStore {
    root: PathBuf,
    date_min: NaiveDate,
    date_max: NaiveDate,
    inner: RwLock<Inner>,
}

const MANIFEST: &str = "manifest.jsonl";

/// Derive the base document id from a source link: final path segment with
/// query/fragment and final extension stripped, lowercased, sanitized to
/// `[a-z0-9._-]`. Empty results fall back to a hash of the whole link.
pub fn derive_doc_id(link: &str) -> String {
    let path = link.split(['#', '?']).next().unwrap_or("");
    let seg = path.rsplit('/').next().unwrap_or("");
    let stem = match seg.rfind('.') {
        Some(i) if i > 0 => &seg[..i],
        _ => seg,
    };
    let sanitized: String = stem
        .to_lowercase()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect();
    let sanitized = sanitized.trim_matches('-');
    if sanitized.is_empty() {
        format!("doc-{:016x}", fnv1a64(link.as_bytes()))
    } else {
        sanitized.to_string()
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

impl CorpusStore {
    /// Create an empty store at `root`. Errors if a manifest already exists.
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        if root.join(MANIFEST).exists() {
            return Err(StoreError::AlreadyExists(root));
        }
        fs::create_dir_all(root.join("text"))?;
        fs::create_dir_all(root.join("raw"))?;
        let store = CorpusStore::with_inner(
            root,
            Inner {
                docs: BTreeMap::new(),
                by_link: HashMap::new(),
            },
        );
        store.persist(&store.inner.read().unwrap())?;
        Ok(store)
    }

    /// Open an existing store, replaying the manifest.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        let manifest = root.join(MANIFEST);
        if !manifest.exists() {
            return Err(StoreError::NoStore(root));
        }
        let mut docs = BTreeMap::new();
        let mut by_link: HashMap<String, DocId> = HashMap::new();
        let reader = BufReader::new(fs::File::open(&manifest)?);
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let corrupt = |detail: String| StoreError::ManifestCorrupt {
                line: lineno,
                detail,
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: ManifestLine =
                serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
            let release_date = match &parsed.date {
                None => None,
                Some(d) => Some(
                    NaiveDate::parse_from_str(d, "%Y-%m-%d")
                        .map_err(|e| corrupt(format!("bad date {d:?}: {e}")))?,
                ),
            };
            let status = match parsed.status.as_str() {
                "indexed" => DocStatus::Indexed,
                "fetched" => DocStatus::Fetched,
                "converted" => DocStatus::Converted,
                "conversion_failed" => DocStatus::ConversionFailed {
                    reason: parsed.failure_reason.clone().unwrap_or_default(),
                },
                "dead_link" => DocStatus::DeadLink {
                    detail: parsed.failure_reason.clone().unwrap_or_default(),
                },
                other => return Err(corrupt(format!("unknown status {other:?}"))),
            };
            let id = DocId::new(parsed.id.clone());
            if docs.contains_key(&id) {
                return Err(corrupt(format!("duplicate id {id}")));
            }
            if by_link.contains_key(&parsed.link) {
                return Err(corrupt(format!("duplicate link {:?}", parsed.link)));
            }
            by_link.insert(parsed.link.clone(), id.clone());
            docs.insert(
                id,
                Entry {
                    meta: MetadataRecord {
                        link: parsed.link,
                        title: parsed.title,
                        release_date,
                        description: parsed.description,
                    },
                    status,
                },
            );
        }
        Ok(CorpusStore::with_inner(root, Inner { docs, by_link }))
    }

    pub fn open_or_create(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        if root.join(MANIFEST).exists() {
            CorpusStore::open(root)
        } else {
            CorpusStore::create(root)
        }
    }

    fn with_inner(root: PathBuf, inner: Inner) -> Self {
        CorpusStore {
            root,
            date_min: NaiveDate::from_ymd_opt(1947, 1, 1).unwrap(),
            date_max: chrono::Utc::now().date_naive(),
            inner: RwLock::new(inner),
        }
    }

    /// Override the accepted release-date range (default 1947-01-01..today).
    pub fn set_date_range(&mut self, min: NaiveDate, max: NaiveDate) {
        self.date_min = min;
        self.date_max = max;
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn text_path(&self, id: &DocId) -> PathBuf {
        self.root.join("text").join(format!("{id}.txt"))
    }

    pub fn raw_path(&self, id: &DocId) -> PathBuf {
        self.root.join("raw").join(id.as_str())
    }

    fn check_date(&self, date: Option<NaiveDate>) -> Result<(), StoreError> {
        if let Some(d) = date {
            if d < self.date_min || d > self.date_max {
                return Err(StoreError::InvalidRecord(format!(
                    "release date {d} outside {}..{}",
                    self.date_min, self.date_max
                )));
            }
        }
        Ok(())
    }

    /// Add an indexed document. Idempotent per link: re-adding a known link
    /// returns the stored id and changes nothing.
    pub fn add_record(&self, rec: MetadataRecord) -> Result<DocId, StoreError> {
        if rec.link.trim().is_empty() {
            return Err(StoreError::InvalidRecord("empty link".into()));
        }
        self.check_date(rec.release_date)?;
        let mut inner = self.inner.write().unwrap();
        if let Some(id) = inner.by_link.get(&rec.link) {
            return Ok(id.clone());
        }
        let base = derive_doc_id(&rec.link);
        let mut id = DocId::new(base.clone());
        let mut n = 2;
        while inner.docs.contains_key(&id) {
            id = DocId::new(format!("{base}-{n}"));
            n += 1;
        }
        inner.by_link.insert(rec.link.clone(), id.clone());
        inner.docs.insert(
            id.clone(),
            Entry {
                meta: rec,
                status: DocStatus::Indexed,
            },
        );
        self.persist(&inner)?;
        Ok(id)
    }

    /// Replace the release date of a stored document (curated overrides).
    pub fn update_date(&self, id: &DocId, date: Option<NaiveDate>) -> Result<(), StoreError> {
        self.check_date(date)?;
        let mut inner = self.inner.write().unwrap();
        let entry = inner.docs.get_mut(id).ok_or_else(|| StoreError::NotFound(id.clone()))?;
        if entry.meta.release_date == date {
            return Ok(());
        }
        entry.meta.release_date = date;
        self.persist(&inner)
    }

    fn transition(&self, id: &DocId, from: &DocStatus, to: DocStatus) -> Result<(), StoreError> {
        let mut inner = self.inner.write().unwrap();
        let entry = inner.docs.get_mut(id).ok_or_else(|| StoreError::NotFound(id.clone()))?;
        if entry.status != *from {
            return Err(StoreError::InvalidTransition {
                id: id.clone(),
                from: entry.status.name().to_string(),
                to: to.name().to_string(),
            });
        }
        entry.status = to;
        self.persist(&inner)
    }

    pub fn mark_fetched(&self, id: &DocId) -> Result<(), StoreError> {
        self.transition(id, &DocStatus::Indexed, DocStatus::Fetched)
    }

    pub fn mark_dead_link(&self, id: &DocId, detail: &str) -> Result<(), StoreError> {
        self.transition(
            id,
            &DocStatus::Indexed,
            DocStatus::DeadLink {
                detail: detail.to_string(),
            },
        )
    }

    pub fn mark_conversion_failed(&self, id: &DocId, reason: &str) -> Result<(), StoreError> {
        self.transition(
            id,
            &DocStatus::Fetched,
            DocStatus::ConversionFailed {
                reason: reason.to_string(),
            },
        )
    }

    /// Store extracted text and move the document from fetched to converted.
    pub fn attach_text(&self, id: &DocId, text: &str) -> Result<(), StoreError> {
        let mut inner = self.inner.write().unwrap();
        let entry = inner.docs.get_mut(id).ok_or_else(|| StoreError::NotFound(id.clone()))?;
        if entry.status != DocStatus::Fetched {
            return Err(StoreError::InvalidTransition {
                id: id.clone(),
                from: entry.status.name().to_string(),
                to: DocStatus::Converted.name().to_string(),
            });
        }
        // Text lands on disk before the manifest records converted, keeping
        // "text present iff converted" true across a crash between the writes.
        write_atomic(&self.text_path(id), text.as_bytes())?;
        entry.status = DocStatus::Converted;
        self.persist(&inner)
    }

    /// Load the extracted text of a converted document.
    pub fn load_text(&self, id: &DocId) -> Result<String, StoreError> {
        {
            let inner = self.inner.read().unwrap();
            let entry = inner.docs.get(id).ok_or_else(|| StoreError::NotFound(id.clone()))?;
            if entry.status != DocStatus::Converted {
                return Err(StoreError::TextMissing(id.clone()));
            }
        }
        fs::read_to_string(self.text_path(id)).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                StoreError::TextMissing(id.clone())
            } else {
                StoreError::Io(e)
            }
        })
    }

    pub fn get(&self, id: &DocId) -> Result<Document, StoreError> {
        let inner = self.inner.read().unwrap();
        let entry = inner.docs.get(id).ok_or_else(|| StoreError::NotFound(id.clone()))?;
        Ok(Document {
            id: id.clone(),
            meta: entry.meta.clone(),
            status: entry.status.clone(),
        })
    }

    /// Snapshot of all documents matching `filter`, ascending by id.
    pub fn scan(&self, filter: impl Fn(&Document) -> bool) -> Vec<Document> {
        let inner = self.inner.read().unwrap();
        inner
            .docs
            .iter()
            .map(|(id, entry)| Document {
                id: id.clone(),
                meta: entry.meta.clone(),
                status: entry.status.clone(),
            })
            .filter(|d| filter(d))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn status_counts(&self) -> StatusCounts {
        let inner = self.inner.read().unwrap();
        let mut counts = StatusCounts::default();
        for entry in inner.docs.values() {
            match entry.status {
                DocStatus::Indexed => counts.indexed += 1,
                DocStatus::Fetched => counts.fetched += 1,
                DocStatus::Converted => counts.converted += 1,
                DocStatus::ConversionFailed { .. } => counts.conversion_failed += 1,
                DocStatus::DeadLink { .. } => counts.dead_link += 1,
            }
        }
        counts
    }

    fn persist(&self, inner: &Inner) -> Result<(), StoreError> {
        let mut out = String::new();
        for (id, entry) in &inner.docs {
            let line = ManifestLine {
                id: id.as_str().to_string(),
                link: entry.meta.link.clone(),
                title: entry.meta.title.clone(),
                date: entry.meta.release_date.map(|d| d.format("%Y-%m-%d").to_string()),
                description: entry.meta.description.clone(),
                status: entry.status.name().to_string(),
                failure_reason: entry.status.failure_reason().map(str::to_string),
            };
            out.push_str(&serde_json::to_string(&line).expect("manifest line serializes"));
            out.push('\n');
        }
        write_atomic(&self.root.join(MANIFEST), out.as_bytes())?;
        Ok(())
    }
}
