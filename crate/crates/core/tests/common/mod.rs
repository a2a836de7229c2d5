#![allow(dead_code)]

use submatrix_core::kernels::inverse_proot_dense;
use submatrix_core::sparse::{generate_sparse_spd, GeneratorSpec, MatrixKind};
use submatrix_core::{CscMatrix, DenseMatrix, SchedulerConfig, Strategy};

pub fn random_spd(n: usize, density: f64, kappa: f64, seed: u64) -> CscMatrix {
    let d = density.max(1.0 / n as f64);
    generate_sparse_spd(&GeneratorSpec::new(n, d, kappa, MatrixKind::Balanced, seed)).unwrap()
}

pub fn serial() -> SchedulerConfig {
    SchedulerConfig::new(1, Strategy::Static).unwrap()
}

/// Densifies `A` and runs the column-wise construction and assembly literally:
/// `R = { i : A[i][j] ≠ 0 }`, `S = A[R, R]`, `X[R[i]][j] = f(S)[i][R.indexof(j)]`.
pub fn naive_reference(a: &CscMatrix, p: u32) -> DenseMatrix {
    let n = a.n();
    let dense = a.to_dense();
    let mut x = DenseMatrix::zeros(n);
    for j in 0..n {
        let r: Vec<usize> = (0..n).filter(|&i| dense[(i, j)] != 0.0).collect();
        let m = r.len();
        let mut sub = DenseMatrix::zeros(m);
        for k in 0..m {
            for l in 0..m {
                sub[(k, l)] = dense[(r[k], r[l])];
            }
        }
        let f = inverse_proot_dense(&sub, p).unwrap();
        let pos = r.iter().position(|&i| i == j).unwrap();
        for (i, &ri) in r.iter().enumerate() {
            x[(ri, j)] = f[(i, pos)];
        }
    }
    x
}

/// Block-diagonal SPD matrix with fully dense blocks of the given sizes.
pub fn block_diagonal(sizes: &[usize], seed: u64) -> CscMatrix {
    let mut entries = Vec::new();
    let mut offset = 0;
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    for &m in sizes {
        for j in 0..m {
            for i in j..m {
                if i == j {
                    entries.push((offset + i, offset + j, m as f64 + 1.0));
                } else {
                    let v = next();
                    let v = if v == 0.0 { 0.25 } else { v };
                    entries.push((offset + i, offset + j, v));
                    entries.push((offset + j, offset + i, v));
                }
            }
        }
        offset += m;
    }
    CscMatrix::from_triplets(&entries, offset).unwrap()
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).max_abs()
}
