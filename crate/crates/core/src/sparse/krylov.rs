//! Matrix-free operators and a (preconditioned) conjugate gradient loop.

use super::{CscMatrix, DenseMatrix};

/// Square linear map applied through matrix-vector products only.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = M x`
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// `y = Mᵀ x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CscMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_transpose(x, y)
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        DenseMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_transpose(x, y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_transpose(x, y)
    }
}

/// Approximate inverse applied inside PCG: `z ≈ M⁻¹ r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

/// No preconditioning.
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// True residual `‖b − A x‖₂` of the returned iterate.
    pub residual: f64,
}

/// Curvature `pᵀAp` (or `rᵀz`) was not positive at the given iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgBreakdown {
    pub iteration: usize,
    pub curvature: f64,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned CG from a zero initial guess.
///
/// Stops once `‖b − A x‖₂ / ‖b‖₂ < tol`. The recursive residual is confirmed
/// against the true residual before convergence is reported; on mismatch the
/// true residual replaces it and the iteration continues.
pub fn conjugate_gradient<O, P>(
    op: &O,
    b: &[f64],
    precond: &P,
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome, CgBreakdown>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let n = op.dim();
    assert_eq!(b.len(), n);
    let mut x = vec![0.0; n];
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            converged: true,
            residual: 0.0,
        });
    }
    let mut r = b.to_vec();
    if norm2(&r) / b_norm < tol {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            converged: true,
            residual: b_norm,
        });
    }
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut rz = dot(&r, &z);
    if !(rz > 0.0) {
        return Err(CgBreakdown {
            iteration: 0,
            curvature: rz,
        });
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];

    for k in 1..=max_iter {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) || !pq.is_finite() {
            return Err(CgBreakdown {
                iteration: k,
                curvature: pq,
            });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if norm2(&r) / b_norm < tol {
            op.apply(&x, &mut q);
            for i in 0..n {
                r[i] = b[i] - q[i];
            }
            let true_res = norm2(&r);
            if true_res / b_norm < tol {
                return Ok(CgOutcome {
                    x,
                    iterations: k,
                    converged: true,
                    residual: true_res,
                });
            }
        }
        precond.apply(&r, &mut z);
        let rz_next = dot(&r, &z);
        if !(rz_next > 0.0) {
            return Err(CgBreakdown {
                iteration: k,
                curvature: rz_next,
            });
        }
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    op.apply(&x, &mut q);
    let residual = b.iter().zip(&q).map(|(bi, qi)| (bi - qi).powi(2)).sum::<f64>().sqrt();
    Ok(CgOutcome {
        x,
        iterations: max_iter,
        converged: false,
        residual,
    })
}
