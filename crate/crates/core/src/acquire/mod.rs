//! Acquisition: parsing the source index page into metadata records, fetching
//! documents politely through a pluggable transport, and converting fetched
//! sources to text with an external converter command.
//!
//! Everything here is deterministic at the interface: the transport is a
//! trait, so tests script exact response sequences, and file-backed corpora
//! work with no network at all.

mod convert;
mod fetch;
mod index;

pub use convert::{ConversionOutcome, Converter};
pub use fetch::{
    fetch, DispatchTransport, FetchOutcome, FetchPolicy, FileTransport, HttpTransport,
    PolitenessGate, ScriptedTransport, Transport, TransportFailure, TransportResponse,
};
pub use index::{
    parse_index_page, read_index_csv, resolve_link, write_index_csv, IndexRecord, IndexWarning,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AcquireError {
    #[error("bad row selector {selector:?}: {detail}")]
    BadSelector { selector: String, detail: String },
    #[error("index csv shape error at row {row}: {detail}")]
    CsvShape { row: usize, detail: String },
    #[error("invalid url {0:?}")]
    InvalidUrl(String),
    #[error("bad converter template {template:?}: {detail}")]
    BadTemplate { template: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
