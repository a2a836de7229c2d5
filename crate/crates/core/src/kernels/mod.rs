//! Dense kernels applied to individual submatrices.

mod eig;
mod lu;
mod proot;
mod refine;

pub use eig::{sym_eig, EigenDecomposition};
pub use lu::{lu_factor, lu_invert, LuFactors};
pub use proot::{inverse_proot_dense, inverse_proot_eig, PD_TOL};
pub use refine::{dense_residual, newton_step, refine_inverse_proot, refine_with_history};

pub(crate) use proot::{checked_eig, root_fn, singular_to_pd};

use thiserror::Error;

/// Off-diagonal stopping tolerance for the Jacobi solver, relative to `‖D‖_F`.
pub const EIG_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("matrix is singular (zero pivot in column {column})")]
    SingularMatrix { column: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iteration diverged at step {iterations} (residual {residual:e})")]
    Diverged { iterations: usize, residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
