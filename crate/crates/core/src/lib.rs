//! Core library for building and analyzing corpora of court judgment documents.
//!
//! The crate is organized as a pipeline over a corpus rooted in a single
//! directory on disk:
//!
//! * [`store`]: durable document store (metadata manifest plus extracted text),
//! * [`acquire`]: index-page parsing, polite fetching and text conversion,
//! * [`normalize`]: case-type lookup, judge-name canonicalization, date parsing,
//! * [`extract`]: per-document legal facts (jurisdiction, bench, citations),
//! * [`analytics`]: mergeable corpus statistics and ranked queries,
//! * [`report`]: deterministic CSV/JSON report tables.
//!
//! Every stage is deterministic given its inputs; per-document failures are
//! recorded as data, never panics.

pub mod acquire;
pub mod analytics;
pub mod extract;
pub mod normalize;
pub mod report;
pub mod store;
