//! Exact solver and dominance-rule engine for single-machine scheduling with
//! power-law completion-time costs: minimize `F(S) = sum_j w_j * C_j^beta`
//! over all permutations of n jobs, where `C_j` is the completion time of
//! job j and `beta > 0` is a run parameter, not instance data.
//!
//! The crate is organized around five layers:
//!
//! * [`instance`]: jobs, schedules, cost evaluation, the text file format,
//!   and the Smith-ratio schedule that is optimal at `beta = 1`.
//! * [`oracle`]: brute-force and subset-DP exact references used to validate
//!   everything else.
//! * [`penalty`]: the cost function `f(t) = t^beta` and the comparison
//!   ratios built from it.
//! * [`dominance`]: pairwise precedence relations (local, global, interval,
//!   and the beta = 2 weight-and-ratio rule) and the per-instance table the
//!   solver consults.
//! * [`search`]: best-first search over the subset DAG with dominance
//!   pruning, in forward or backward direction.
//!
//! [`instgen`] and [`bench`] provide the reproducible instance generator and
//! the benchmark experiments built on top of the solver.

pub mod bench;
pub mod dominance;
pub mod exec;
pub mod instance;
pub mod instgen;
pub mod oracle;
pub mod penalty;
pub mod search;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("job {id}: {reason}")]
    InvalidJob { id: usize, reason: String },
    #[error("jobs {a} and {b} have equal Smith ratio {ratio}")]
    DuplicateSmithRatio { a: usize, b: usize, ratio: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("instance has {n} jobs, limit for {what} is {limit}")]
    TooLarge { n: usize, what: &'static str, limit: usize },
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("{0}")]
    DomainError(String),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
