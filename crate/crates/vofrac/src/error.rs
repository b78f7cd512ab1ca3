//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum VofracError {
    /// A constructor or operation received an argument outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation requested at a pole of the transform.
    #[error("pole of the transform at s = {0}")]
    Pole(num_complex::Complex64),

    /// Evaluation requested on the branch cut (negative real axis for the
    /// principal logarithm, or real ξ ≥ 1 for the shifted kernel).
    #[error("evaluation on the branch cut: {0}")]
    BranchCut(String),

    /// No admissible weight plan exists for the requested parameters.
    #[error("infeasible weight plan: {0}")]
    InfeasiblePlan(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Unknown problem preset name.
    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    /// I/O failure while reading or writing artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VofracError>;
