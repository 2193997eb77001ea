//! Learning-curve economics for requirement dependency classifiers.

pub mod classify;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod format;
pub mod harness;
pub mod report;
pub mod roi;
pub mod rng;

pub use error::{Error, Result};
