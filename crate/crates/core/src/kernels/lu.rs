use super::KernelError;
use crate::sparse::DenseMatrix;

/// `P·A = L·U` with unit lower `L` and upper `U` packed into one matrix.
///
/// `perm[i]` is the row of the original matrix that ends up in row `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LuFactors {
    pub lu: DenseMatrix,
    pub perm: Vec<usize>,
}

/// Relative pivot threshold against `max |a_ij|`.
const PIVOT_TOL: f64 = 1e-14;

/// Columns of the identity solved together per pass over the factors.
const RHS_BLOCK: usize = 16;

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    /// Unit lower triangular factor.
    pub fn l(&self) -> DenseMatrix {
        let m = self.dim();
        let mut l = DenseMatrix::identity(m);
        for j in 0..m {
            for i in (j + 1)..m {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn u(&self) -> DenseMatrix {
        let m = self.dim();
        let mut u = DenseMatrix::zeros(m);
        for j in 0..m {
            for i in 0..=j {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let permuted: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&permuted);
        self.forward(b, 0);
        self.backward(b);
    }

    /// Column `j` of `A⁻¹`.
    pub fn inverse_column(&self, j: usize) -> Vec<f64> {
        let m = self.dim();
        let mut x = vec![0.0; m];
        let start = self.perm.iter().position(|&p| p == j).expect("perm is a permutation");
        x[start] = 1.0;
        self.forward(&mut x, start);
        self.backward(&mut x);
        x
    }

    fn forward(&self, y: &mut [f64], start: usize) {
        let m = self.dim();
        for k in start..m {
            let yk = y[k];
            if yk == 0.0 {
                continue;
            }
            let col = &self.lu.column(k)[k + 1..];
            for (yi, &l) in y[k + 1..].iter_mut().zip(col) {
                *yi -= l * yk;
            }
        }
    }

    fn backward(&self, x: &mut [f64]) {
        let m = self.dim();
        for k in (0..m).rev() {
            let col = self.lu.column(k);
            x[k] /= col[k];
            let xk = x[k];
            if xk == 0.0 {
                continue;
            }
            for (xi, &u) in x[..k].iter_mut().zip(&col[..k]) {
                *xi -= u * xk;
            }
        }
    }
}

/// LU factorization with partial (row) pivoting.
pub fn lu_factor(d: &DenseMatrix) -> Result<LuFactors, KernelError> {
    let m = d.dim();
    let mut lu = d.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let threshold = PIVOT_TOL * d.max_abs();
    for k in 0..m {
        let col = lu.column(k);
        let (p, pivot) = col[k..]
            .iter()
            .enumerate()
            .fold((k, 0.0_f64), |(bi, bv), (off, &v)| {
                if v.abs() > bv {
                    (k + off, v.abs())
                } else {
                    (bi, bv)
                }
            });
        if pivot <= threshold || pivot == 0.0 {
            return Err(KernelError::SingularMatrix { column: k });
        }
        if p != k {
            perm.swap(k, p);
            let data = lu.as_mut_slice();
            for j in 0..m {
                data.swap(j * m + k, j * m + p);
            }
        }
        let data = lu.as_mut_slice();
        let inv = 1.0 / data[k * m + k];
        for v in &mut data[k * m + k + 1..(k + 1) * m] {
            *v *= inv;
        }
        let (head, tail) = data.split_at_mut((k + 1) * m);
        let lcol = &head[k * m + k + 1..(k + 1) * m];
        for col in tail.chunks_exact_mut(m) {
            let ukj = col[k];
            if ukj == 0.0 {
                continue;
            }
            for (a, &l) in col[k + 1..].iter_mut().zip(lcol) {
                *a -= l * ukj;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

/// Full inverse from LU factors by blocked triangular solves against `P·I`.
pub fn lu_invert(f: &LuFactors) -> Result<DenseMatrix, KernelError> {
    let m = f.dim();
    for k in 0..m {
        if f.lu[(k, k)] == 0.0 {
            return Err(KernelError::SingularMatrix { column: k });
        }
    }
    let mut inv = DenseMatrix::zeros(m);
    let mut pos_of = vec![0usize; m];
    for (i, &p) in f.perm.iter().enumerate() {
        pos_of[p] = i;
    }
    let lu = f.lu.as_slice();
    let mut block_start = 0;
    while block_start < m {
        let block_end = (block_start + RHS_BLOCK).min(m);
        let width = block_end - block_start;
        let mut rhs = vec![0.0; width * m];
        for (c, j) in (block_start..block_end).enumerate() {
            rhs[c * m + pos_of[j]] = 1.0;
        }
        let first = (block_start..block_end).map(|j| pos_of[j]).min().unwrap_or(0);
        for k in first..m {
            let lcol = &lu[k * m + k + 1..(k + 1) * m];
            for c in 0..width {
                let col = &mut rhs[c * m..(c + 1) * m];
                let yk = col[k];
                if yk == 0.0 {
                    continue;
                }
                for (yi, &l) in col[k + 1..].iter_mut().zip(lcol) {
                    *yi -= l * yk;
                }
            }
        }
        for k in (0..m).rev() {
            let ucol = &lu[k * m..k * m + k];
            let ukk = lu[k * m + k];
            for c in 0..width {
                let col = &mut rhs[c * m..(c + 1) * m];
                col[k] /= ukk;
                let xk = col[k];
                if xk == 0.0 {
                    continue;
                }
                for (xi, &u) in col[..k].iter_mut().zip(ucol) {
                    *xi -= u * xk;
                }
            }
        }
        for (c, j) in (block_start..block_end).enumerate() {
            inv.column_mut(j).copy_from_slice(&rhs[c * m..(c + 1) * m]);
        }
        block_start = block_end;
    }
    Ok(inv)
}
