//! Command-line driver for mulab-core: argument parsing, cached resources,
//! corpus ingestion and deterministic JSON output.

pub mod cache;
pub mod commands;
pub mod corpus;

pub use cache::{Cache, JobSpec};
pub use commands::{run, Outcome};
