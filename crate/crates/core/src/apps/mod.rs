//! Applications: preconditioned CG and band-structure energies.

mod cg;
mod energy;
mod ilu;

pub use cg::{
    cg_solve, cg_solve_preconditioned, cg_solve_split_preconditioned, default_max_iter,
    make_sm_preconditioner, CgReport, SplitOperator, DEFAULT_TOL,
};
pub use energy::{band_energy, band_energy_sm, EnergyReport};
pub use ilu::{ilu0, Ilu0Factors};

use thiserror::Error;

use crate::sparse::{CscMatrix, SparseError};
use crate::submatrix::MethodError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("CG breakdown at iteration {iteration} (curvature {curvature:e}); matrix is not positive definite")]
    Breakdown { iteration: usize, curvature: f64 },
    #[error("zero pivot in column {column}")]
    ZeroPivot { column: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("non-finite right-hand side at index {0}")]
    NonFiniteRhs(usize),
    #[error(transparent)]
    Method(#[from] MethodError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// The `JGD_Trefethen/Trefethen_{n}` matrix: the primes `2, 3, 5, …` on the
/// diagonal and ones wherever `|i − j|` is a power of two.
pub fn trefethen_matrix(n: usize) -> CscMatrix {
    let primes = first_primes(n);
    let mut entries = Vec::new();
    for j in 0..n {
        entries.push((j, j, primes[j] as f64));
        let mut step = 1;
        while step < n {
            if j >= step {
                entries.push((j - step, j, 1.0));
            }
            if j + step < n {
                entries.push((j + step, j, 1.0));
            }
            step *= 2;
        }
    }
    CscMatrix::from_triplets(&entries, n).expect("entries are in range and unique")
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefethen_small() {
        let t = trefethen_matrix(5);
        assert!(t.is_symmetric());
        assert_eq!(t.diagonal(), vec![2.0, 3.0, 5.0, 7.0, 11.0]);
        // offsets 1, 2, 4
        assert_eq!(t.get(0, 4), Some(1.0));
        assert_eq!(t.get(0, 3), None);
        assert_eq!(t.get(1, 3), Some(1.0));
        assert_eq!(t.column_nnz(0), 4);
    }

    #[test]
    fn trefethen_2000_shape() {
        let t = trefethen_matrix(2000);
        assert_eq!(t.get(1999, 1999), Some(17389.0));
        // the collection lists 41906 stored entries
        assert_eq!(t.nnz(), 41906);
    }
}
