//! Approximate inverse p-th roots of sparse symmetric matrices by the
//! submatrix method, with the sparse infrastructure, dense kernels, parallel
//! scheduler and applications built around it.

pub mod apps;
pub mod kernels;
pub mod scheduler;
pub mod sparse;
pub mod submatrix;

pub use scheduler::{SchedulerConfig, Strategy, TimingReport};
pub use sparse::{CscMatrix, DenseMatrix, SparseError};
pub use submatrix::{residual_norm, submatrix_inverse_proot, MethodConfig, MethodError};
