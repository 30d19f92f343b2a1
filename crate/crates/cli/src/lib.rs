//! Library surface of the `misl` binary: layered configuration and the
//! staged ingestion pipeline. Exposed as a crate so integration tests can
//! drive whole pipeline runs in-process.

pub mod config;
pub mod pipeline;
