//! Interpretable change-point diagnosis from binary indicators.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`signal`] simulates labelled univariate signals with variance, mean or
//!    slope shifts.
//! 2. [`window`] slides windows over each signal and runs a two-sample test
//!    ([`stats`]) between the two halves of every window.
//! 3. [`indicators`] folds the per-window rejections into a bank of binary
//!    indicators (simple and confirmatory) and removes duplicate columns.
//! 4. [`select`] ranks indicators by mRMR on mutual information.
//! 5. [`classify`] fits Bernoulli naive Bayes and random forests, and
//!    [`eval`] runs the train/test protocol and writes the report tables.
//!
//! With the default `parallel` feature, per-signal and per-tree work is spread
//! over rayon; every result is independent of scheduling.

pub mod classify;
pub mod dataset_io;
pub mod error;
pub mod eval;
pub mod exec;
pub mod indicators;
pub mod matrix;
pub mod select;
pub mod signal;
pub mod stats;
pub mod window;

pub use error::{Error, Result};
pub use exec::Exec;
pub use matrix::BinaryMatrix;
pub use signal::{AnomalyClass, DatasetSpec, DatasetVariant, Signal};
