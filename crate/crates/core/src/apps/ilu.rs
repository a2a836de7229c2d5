use super::AppError;
use crate::sparse::{CscMatrix, Preconditioner};

/// Zero fill-in incomplete LU: `L` unit lower, `U` upper, both on `pattern(A)`.
#[derive(Clone, Debug)]
pub struct Ilu0Factors {
    pub l: CscMatrix,
    pub u: CscMatrix,
}

/// IKJ-ordered ILU(0) on the rows of `A`.
pub fn ilu0(a: &CscMatrix) -> Result<Ilu0Factors, AppError> {
    let n = a.n();
    // rows of A are the columns of Aᵀ
    let at = a.transpose();
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut vals: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut diag_pos = vec![usize::MAX; n];
    for i in 0..n {
        let (c, v) = at.column(i);
        cols.push(c.to_vec());
        vals.push(v.to_vec());
        if let Ok(p) = c.binary_search(&i) {
            diag_pos[i] = p;
        }
    }

    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        for (p, &j) in cols[i].iter().enumerate() {
            pos[j] = p;
        }
        for kp in 0..cols[i].len() {
            let k = cols[i][kp];
            if k >= i {
                break;
            }
            let pivot = pivot(&vals, &diag_pos, k)?;
            let lik = vals[i][kp] / pivot;
            vals[i][kp] = lik;
            let start = diag_pos[k] + 1;
            for up in start..cols[k].len() {
                let j = cols[k][up];
                if pos[j] != usize::MAX {
                    let ukj = vals[k][up];
                    vals[i][pos[j]] -= lik * ukj;
                }
            }
        }
        pivot(&vals, &diag_pos, i)?;
        for &j in &cols[i] {
            pos[j] = usize::MAX;
        }
    }

    let mut l_entries = Vec::with_capacity(a.nnz() / 2 + n);
    let mut u_entries = Vec::with_capacity(a.nnz() / 2 + n);
    for i in 0..n {
        l_entries.push((i, i, 1.0));
        for (&j, &v) in cols[i].iter().zip(&vals[i]) {
            if j < i {
                l_entries.push((i, j, v));
            } else {
                u_entries.push((i, j, v));
            }
        }
    }
    Ok(Ilu0Factors {
        l: CscMatrix::from_triplets(&l_entries, n)?,
        u: CscMatrix::from_triplets(&u_entries, n)?,
    })
}

fn pivot(vals: &[Vec<f64>], diag_pos: &[usize], k: usize) -> Result<f64, AppError> {
    match diag_pos[k] {
        usize::MAX => Err(AppError::ZeroPivot { column: k }),
        p if vals[k][p] == 0.0 || !vals[k][p].is_finite() => Err(AppError::ZeroPivot { column: k }),
        p => Ok(vals[k][p]),
    }
}

impl Ilu0Factors {
    /// Solves `L·U·z = r` by forward then backward substitution.
    pub fn solve(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        let n = z.len();
        for j in 0..n {
            let (rows, v) = self.l.column(j);
            let zj = z[j];
            for (&i, &lij) in rows.iter().zip(v) {
                if i > j {
                    z[i] -= lij * zj;
                }
            }
        }
        for j in (0..n).rev() {
            let (rows, v) = self.u.column(j);
            let d = *v.last().expect("U has a full diagonal");
            debug_assert_eq!(*rows.last().unwrap(), j);
            z[j] /= d;
            let zj = z[j];
            for (&i, &uij) in rows.iter().zip(v) {
                if i < j {
                    z[i] -= uij * zj;
                }
            }
        }
    }
}

impl Preconditioner for Ilu0Factors {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.solve(r, z)
    }
}
