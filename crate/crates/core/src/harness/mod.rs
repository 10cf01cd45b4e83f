//! Batch execution and everything around it: on-disk formats, ensemble
//! aggregation, empirical-versus-predicted reports, self-verification, and
//! the command-line interface.

pub mod blue;
pub mod cli;
pub mod compare;
pub mod ensemble;
pub mod fit;
pub mod persist;
pub mod verify;
