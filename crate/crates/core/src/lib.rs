//! Simulator and numerical verification suite for the diamond-free random
//! graph process.
//!
//! The process starts from n isolated vertices and repeatedly inserts an
//! edge chosen uniformly among the open pairs, the non-edges whose insertion
//! keeps every edge on at most one triangle. This crate provides:
//!
//! * [`process`]: an incremental engine with O(1) sampling and O(max degree)
//!   insertion, plus whole-run drivers;
//! * [`observables`]: local pair/vertex statistics and run snapshots;
//! * [`trajectory`]: the deterministic scaling limit (closed forms, the
//!   governing differential system, error envelopes);
//! * [`oracle`]: slow reference implementations used to cross-check the
//!   engine, and exact one-step expectation formulas;
//! * [`harness`]: ensembles, file formats, empirical-vs-predicted
//!   comparison reports, and the command-line interface.

pub mod error;
pub mod harness;
pub mod independence;
pub mod observables;
pub mod oracle;
pub mod pair;
pub mod process;
pub mod rng;
pub mod trajectory;

pub use error::{Error, Result};
pub use pair::{PairId, PairState};
pub use process::{ProcessState, RecordRule, RunRecord, StopRule};
