use super::KernelError;
use crate::sparse::DenseMatrix;

/// Symmetric eigendecomposition `A = V·diag(λ)·Vᵀ`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(f(λ))·Vᵀ`, computed on the upper triangle and mirrored.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let m = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = DenseMatrix::zeros(m);
        for j in 0..m {
            for k in 0..m {
                let w = fl[k] * v[(j, k)];
                if w == 0.0 {
                    continue;
                }
                let vk = v.column(k);
                let col = out.column_mut(j);
                for i in 0..=j {
                    col[i] += vk[i] * w;
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                out[(j, i)] = out[(i, j)];
            }
        }
        out
    }

    /// Column `j` of `V·diag(f(λ))·Vᵀ`.
    pub fn apply_function_column(&self, f: impl Fn(f64) -> f64, j: usize) -> Vec<f64> {
        let m = self.dim();
        let v = &self.eigenvectors;
        let mut col = vec![0.0; m];
        for k in 0..m {
            let w = f(self.eigenvalues[k]) * v[(j, k)];
            for (c, &vik) in col.iter_mut().zip(v.column(k)) {
                *c += vik * w;
            }
        }
        col
    }
}

/// Symmetry tolerance on `|a_ij − a_ji|`.
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 50;

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the largest off-diagonal magnitude is below `tol·‖D‖_F`.
pub fn sym_eig(d: &DenseMatrix, tol: f64) -> Result<EigenDecomposition, KernelError> {
    if d.asymmetry() > SYMMETRY_TOL {
        return Err(KernelError::NotSymmetric);
    }
    let m = d.dim();
    let mut a = d.clone();
    // use the exact mirror of the lower triangle so rounding noise is symmetric
    for j in 0..m {
        for i in (j + 1)..m {
            a[(j, i)] = a[(i, j)];
        }
    }
    let mut v = DenseMatrix::identity(m);
    let threshold = tol * d.frobenius_norm();

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        if max_off_diagonal(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let worst = max_off_diagonal(&a);
        if worst > threshold {
            return Err(KernelError::NoConvergence {
                iterations: MAX_SWEEPS,
                residual: worst,
            });
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let eigenvalues = order.iter().map(|&k| a[(k, k)]).collect();
    let mut eigenvectors = DenseMatrix::zeros(m);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).copy_from_slice(v.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn max_off_diagonal(a: &DenseMatrix) -> f64 {
    let m = a.dim();
    let mut worst = 0.0_f64;
    for j in 0..m {
        for (i, &x) in a.column(j).iter().enumerate() {
            if i != j {
                worst = worst.max(x.abs());
            }
        }
    }
    worst
}

/// Applies the rotation annihilating `a[p][q]` to both sides of `a` and to `v`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let m = a.dim();
    let apq = a[(p, q)];
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let data = a.as_mut_slice();
    let (pc, qc) = (p * m, q * m);
    for r in 0..m {
        if r == p || r == q {
            continue;
        }
        let arp = data[pc + r];
        let arq = data[qc + r];
        let new_p = c * arp - s * arq;
        let new_q = s * arp + c * arq;
        data[pc + r] = new_p;
        data[qc + r] = new_q;
        data[r * m + p] = new_p;
        data[r * m + q] = new_q;
    }
    data[pc + p] = app - t * apq;
    data[qc + q] = aqq + t * apq;
    data[qc + p] = 0.0;
    data[pc + q] = 0.0;

    let vd = v.as_mut_slice();
    for r in 0..m {
        let vrp = vd[pc + r];
        let vrq = vd[qc + r];
        vd[pc + r] = c * vrp - s * vrq;
        vd[qc + r] = s * vrp + c * vrq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_by_hand() {
        let d = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let e = sym_eig(&d, 1e-14).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.eigenvectors.column(0);
        let v1 = e.eigenvectors.column(1);
        assert!((v0[0].abs() - s).abs() < 1e-14 && (v0[0] + v0[1]).abs() < 1e-14);
        assert!((v1[0].abs() - s).abs() < 1e-14 && (v1[0] - v1[1]).abs() < 1e-14);
    }

    #[test]
    fn diagonal_gives_permutation_vectors() {
        let e = sym_eig(&DenseMatrix::from_diagonal(&[5.0, 1.0, 3.0]), 1e-14).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0, 5.0]);
        assert_eq!(e.eigenvectors.column(0), &[0.0, 1.0, 0.0]);
        assert_eq!(e.eigenvectors.column(1), &[0.0, 0.0, 1.0]);
        assert_eq!(e.eigenvectors.column(2), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn asymmetric_is_rejected() {
        let d = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&d, 1e-14), Err(KernelError::NotSymmetric)));
    }

    #[test]
    fn column_helper_matches_full_function() {
        let d = DenseMatrix::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]])
            .unwrap();
        let e = sym_eig(&d, 1e-15).unwrap();
        let full = e.apply_function(|l| l.powf(-0.5));
        for j in 0..3 {
            let col = e.apply_function_column(|l| l.powf(-0.5), j);
            for i in 0..3 {
                assert!((col[i] - full[(i, j)]).abs() < 1e-15);
            }
        }
        let back = e.apply_function(|l| l);
        assert!(back.sub(&d).max_abs() < 1e-14);
    }
}
