//! Synthetic corpus generation with exact ground truth, and an independent
//! oracle that computes the expected reports straight from that truth.
//!
//! The generator and the production pipeline deliberately share only the
//! fact vocabulary (types, citations, rosters) and the table rendering
//! contract. The oracle re-counts, re-ranks and re-rounds on its own, so a
//! counting bug in the pipeline cannot hide behind shared code.

pub mod gen;
pub mod oracle;
pub mod truth;

pub use gen::{generate_corpus, generate_site, CorpusSpec, FaultPlan, GenError, NoiseProfile};
pub use oracle::oracle_bundle;
pub use truth::{GroundTruth, MentionTally, TruthEntry};
