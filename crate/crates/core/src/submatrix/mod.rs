//! The submatrix method.
//!
//! For every column `j` of a sparse symmetric `A`:
//!
//! 1. `R` = the rows where column `j` is nonzero ([`build_index_set`]);
//! 2. the dense principal submatrix `A[R, R]` is gathered ([`extract_submatrix`]);
//! 3. a dense kernel computes its inverse p-th root and the column that sits
//!    at the position of `j` inside `R` is kept ([`solve_submatrix`]);
//! 4. the kept columns are concatenated into the value array of the result,
//!    which reuses `A`'s `col_ptr` and `row_ind` ([`assemble_result`]).
//!
//! The result therefore has exactly the sparsity pattern of `A`, and is in
//! general not symmetric.

mod config;
mod pipeline;

pub use config::{KernelKind, MethodConfig, RefineConfig};
pub use pipeline::{residual_norm, residual_norm_with, submatrix_inverse_proot, ResidualOperator};

use thiserror::Error;

use crate::kernels::{
    checked_eig, inverse_proot_eig, lu_factor, refine_inverse_proot, root_fn, singular_to_pd,
    KernelError,
};
use crate::sparse::{CscMatrix, DenseMatrix, SparseError};

#[derive(Debug, Error)]
pub enum MethodError {
    #[error("input matrix is not flagged symmetric")]
    NotSymmetric,
    #[error("structurally zero diagonal in column(s) {columns:?}")]
    DiagonalZero { columns: Vec<usize> },
    #[error("kernel failed on column {column}: {source}")]
    Kernel {
        column: usize,
        #[source]
        source: KernelError,
    },
    #[error("column {column}: expected {expected} values, got {got}")]
    LengthMismatch {
        column: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// Sorted nonzero rows `R` of one column, and where that column sits in `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    col: usize,
    rows: Vec<usize>,
    pos_of_col: usize,
}

impl IndexSet {
    pub fn col(&self) -> usize {
        self.col
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn pos_of_col(&self) -> usize {
        self.pos_of_col
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One unit of work: an index set and its dense submatrix.
#[derive(Clone, Debug)]
pub struct SubmatrixTask {
    pub index_set: IndexSet,
    pub dense: DenseMatrix,
}

impl SubmatrixTask {
    pub fn new(a: &CscMatrix, j: usize) -> Result<Self, MethodError> {
        let index_set = build_index_set(a, j)?;
        let dense = extract_submatrix(a, &index_set);
        Ok(SubmatrixTask { index_set, dense })
    }
}

/// `R = { i : A[i][j] ≠ 0 }`, read straight from the CSC column slice.
pub fn build_index_set(a: &CscMatrix, j: usize) -> Result<IndexSet, MethodError> {
    if !a.is_symmetric() {
        return Err(MethodError::NotSymmetric);
    }
    assert!(j < a.n(), "column {j} out of range for n = {}", a.n());
    let rows = a.column(j).0.to_vec();
    match rows.binary_search(&j) {
        Ok(pos_of_col) => Ok(IndexSet {
            col: j,
            rows,
            pos_of_col,
        }),
        Err(_) => Err(MethodError::DiagonalZero { columns: vec![j] }),
    }
}

/// Gathers `A[R, R]` without densifying `A`: each target column is a
/// two-pointer merge of the CSC column `R[l]` against the sorted `R`.
pub fn extract_submatrix(a: &CscMatrix, set: &IndexSet) -> DenseMatrix {
    let r = &set.rows;
    let m = r.len();
    let mut dense = DenseMatrix::zeros(m);
    for (l, &c) in r.iter().enumerate() {
        let (rows, vals) = a.column(c);
        let out = dense.column_mut(l);
        let (mut k, mut s) = (0, 0);
        while k < m && s < rows.len() {
            match r[k].cmp(&rows[s]) {
                std::cmp::Ordering::Less => k += 1,
                std::cmp::Ordering::Greater => s += 1,
                std::cmp::Ordering::Equal => {
                    out[k] = vals[s];
                    k += 1;
                    s += 1;
                }
            }
        }
    }
    dense
}

/// Applies the configured kernel to the task's submatrix and returns only the
/// result column at `pos_of_col`.
pub fn solve_submatrix(task: &SubmatrixTask, cfg: &MethodConfig) -> Result<Vec<f64>, MethodError> {
    let column = task.index_set.col;
    let pos = task.index_set.pos_of_col;
    let wrap = |source: KernelError| MethodError::Kernel { column, source };
    let p = cfg.p();

    let Some(refine) = cfg.refine() else {
        return match cfg.kernel() {
            KernelKind::Lu => {
                let f = lu_factor(&task.dense).map_err(singular_to_pd).map_err(wrap)?;
                Ok(f.inverse_column(pos))
            }
            KernelKind::Eig => {
                let e = checked_eig(&task.dense).map_err(wrap)?;
                Ok(e.apply_function_column(root_fn(p), pos))
            }
        };
    };

    let full = match cfg.kernel() {
        KernelKind::Lu => crate::kernels::inverse_proot_dense(&task.dense, 1),
        KernelKind::Eig => inverse_proot_eig(&task.dense, p),
    }
    .map_err(wrap)?;
    let (refined, _) = refine_inverse_proot(&task.dense, &full, p, refine.tol, refine.max_iter)
        .map_err(wrap)?;
    Ok(refined.column(pos).to_vec())
}

/// Concatenates per-column results into a matrix with `A`'s pattern.
pub fn assemble_result(a: &CscMatrix, columns: &[Vec<f64>]) -> Result<CscMatrix, MethodError> {
    if columns.len() != a.n() {
        return Err(MethodError::LengthMismatch {
            column: columns.len().min(a.n()),
            expected: a.n(),
            got: columns.len(),
        });
    }
    let mut val = Vec::with_capacity(a.nnz());
    for (j, col) in columns.iter().enumerate() {
        let expected = a.column_nnz(j);
        if col.len() != expected {
            return Err(MethodError::LengthMismatch {
                column: j,
                expected,
                got: col.len(),
            });
        }
        val.extend_from_slice(col);
    }
    Ok(a.with_values(val))
}
