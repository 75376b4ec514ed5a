//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by the library modules.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Qubit counts of two operands disagree.
    #[error("qubit count mismatch: {left} vs {right}")]
    NMismatch { left: usize, right: usize },

    /// Qubit count outside the supported range.
    #[error("unsupported qubit count n={n} (expected {min} <= n <= {max})")]
    InvalidN { n: usize, min: usize, max: usize },

    /// A truth-table literal could not be parsed.
    #[error("invalid truth table: {0}")]
    BadTable(String),

    /// States handed to the cloner have a complex mutual overlap.
    #[error("overlap <{i}|{j}> is not real (imaginary part {imag:e})")]
    ComplexOverlap { i: usize, j: usize, imag: f64 },

    /// No per-state sign assignment makes every pairwise overlap nonnegative.
    #[error("overlap signs cannot be gauged nonnegative on edge ({i}, {j})")]
    GaugeConflict { i: usize, j: usize },

    /// Clone targets are not linearly independent.
    #[error("states are linearly dependent (Gram min eigenvalue {min_eig:e})")]
    LinearlyDependent { min_eig: f64 },

    /// Candidate measurement states are not pairwise orthogonal.
    #[error("measurement states {i} and {j} overlap (|<i|j>| = {overlap:e})")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },

    /// The measured state has weight outside the span of the basis.
    #[error("state leaks outside the measurement basis (total probability {total})")]
    OutsideBasis { total: f64 },

    /// An efficiency vector is malformed or not achievable.
    #[error("invalid efficiency vector: {0}")]
    BadGammas(String),

    /// A run configuration field is out of range.
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
