//! Normalization of noisy source fields: case-type designators found in
//! titles, judge names matched against a curated roster, and release dates in
//! the handful of formats the source site uses.
//!
//! Normalization never guesses. A designator matching several case types is
//! surfaced as an [`Ambiguity`], a judge name too far from every roster entry
//! comes back as [`MatchResult::New`], and an unparseable date is `None`.

mod case_types;
mod dates;
mod judges;

pub use case_types::{normalize_key, resolve_case_types, Ambiguity, CaseType, LookupTable};
pub use dates::{apply_overrides, load_overrides, parse_release_date};
pub use judges::{
    canonicalize_judge, levenshtein, normalize_judge_name, Judge, JudgeId, JudgeRoster,
    MatchResult, MATCH_THRESHOLD,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("lookup table: {0}")]
    BadLookup(String),
    #[error("roster: {0}")]
    BadRoster(String),
    #[error("invalid override at line {line}: {detail}")]
    InvalidOverride { line: usize, detail: String },
}
