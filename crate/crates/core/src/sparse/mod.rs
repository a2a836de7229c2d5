//! Sparse and dense matrix types, Matrix Market I/O, random SPD generation
//! and norm/condition estimates shared by the rest of the crate.

mod csc;
mod dense;
mod generate;
pub mod krylov;
mod mm;
mod norm;

pub use csc::CscMatrix;
pub use dense::DenseMatrix;
pub use generate::{generate_sparse_spd, GeneratorSpec, MatrixKind};
pub use krylov::{LinearOperator, Preconditioner};
pub use mm::{read_matrix_market, write_matrix_market};
pub use norm::{estimate_condition, spectral_norm, spectral_norm_estimate};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}) outside a {n}x{n} matrix")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("invalid matrix structure: {0}")]
    InvalidStructure(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("inverse iteration broke down; matrix is not positive definite")]
    BreakdownOnIndefinite,
    #[error("no convergence after {iterations} iterations (best estimate {estimate})")]
    NoConvergence { estimate: f64, iterations: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
