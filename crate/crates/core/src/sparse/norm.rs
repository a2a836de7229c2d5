//! Spectral norm and condition number estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::krylov::{conjugate_gradient, dot, norm2, IdentityPreconditioner, LinearOperator};
use super::{CscMatrix, SparseError};

const START_SEED: u64 = 0x05ee_d0f5_ca1e;

fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    if nv == 0.0 {
        v.iter_mut().for_each(|x| *x = 1.0);
    }
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// `‖M‖₂ = sqrt(λ_max(MᵀM))` by power iteration on `MᵀM`.
///
/// Iterates until the relative change of the estimate drops below `tol`.
/// After `max_iter` steps the best estimate is returned inside
/// [`SparseError::NoConvergence`].
pub fn spectral_norm<O: LinearOperator + ?Sized>(
    op: &O,
    tol: f64,
    max_iter: usize,
) -> Result<f64, SparseError> {
    if !(tol > 0.0) {
        return Err(SparseError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = op.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = start_vector(n);
    let mut mv = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut estimate = 0.0;
    for iter in 1..=max_iter {
        op.apply(&v, &mut mv);
        let sigma = norm2(&mv);
        op.apply_transpose(&mv, &mut w);
        let wn = norm2(&w);
        if sigma == 0.0 || wn == 0.0 {
            // v lies in the null space; for a nonzero operator retry from ones once
            if iter == 1 && estimate == 0.0 {
                let ones = vec![1.0 / (n as f64).sqrt(); n];
                op.apply(&ones, &mut mv);
                if norm2(&mv) != 0.0 {
                    v = ones;
                    continue;
                }
            }
            return Ok(sigma);
        }
        let converged = iter > 1 && (sigma - estimate).abs() <= tol * sigma;
        estimate = sigma;
        if converged {
            return Ok(estimate);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    Err(SparseError::NoConvergence {
        estimate,
        iterations: max_iter,
    })
}

/// Spectral norm where non-convergence still yields the best estimate.
pub fn spectral_norm_estimate<O: LinearOperator + ?Sized>(op: &O, tol: f64, max_iter: usize) -> f64 {
    match spectral_norm(op, tol, max_iter) {
        Ok(v) => v,
        Err(SparseError::NoConvergence { estimate, .. }) => estimate,
        Err(e) => panic!("spectral norm: {e}"),
    }
}

/// Estimates `κ = λ_max / λ_min` of a symmetric positive definite matrix.
///
/// `λ_max` comes from power iteration, `λ_min` from inverse iteration whose
/// solves are done with CG. Accuracy target is a factor of 2.
pub fn estimate_condition(a: &CscMatrix) -> Result<f64, SparseError> {
    if !a.is_symmetric() {
        return Err(SparseError::NotSymmetric);
    }
    let n = a.n();
    if n == 0 {
        return Ok(1.0);
    }
    let lambda_max = spectral_norm_estimate(a, 1e-6, 2000);
    if lambda_max == 0.0 {
        return Err(SparseError::BreakdownOnIndefinite);
    }

    let mut v = start_vector(n);
    let mut inv_lambda = 0.0;
    for iter in 0..60 {
        let solve = conjugate_gradient(a, &v, &IdentityPreconditioner, 1e-8, 2 * n.max(10))
            .map_err(|_| SparseError::BreakdownOnIndefinite)?;
        let w = solve.x;
        let mu = dot(&v, &w);
        if !(mu > 0.0) {
            return Err(SparseError::BreakdownOnIndefinite);
        }
        let wn = norm2(&w);
        let done = iter > 0 && (mu - inv_lambda).abs() <= 1e-4 * mu;
        inv_lambda = mu;
        if done {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    Ok(lambda_max * inv_lambda)
}

/// Extreme eigenvalues of a symmetric operator via Lanczos with full
/// reorthogonalization. Ritz values lie inside the spectrum, so the interval
/// returned is a slight under-estimate of the true one.
pub(crate) fn lanczos_extremes<O: LinearOperator + ?Sized>(op: &O, steps: usize, seed: u64) -> (f64, f64) {
    let n = op.dim();
    if n == 0 {
        return (0.0, 0.0);
    }
    let steps = steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut w = vec![0.0; n];
    for k in 0..steps {
        op.apply(&v, &mut w);
        let a = dot(&w, &v);
        alpha.push(a);
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let b = norm2(&w);
        let scale = alpha.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
        if k + 1 == steps || b <= 1e-12 * scale {
            break;
        }
        beta.push(b);
        v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / b);
    }
    let m = alpha.len();
    (
        tridiagonal_eigenvalue(&alpha, &beta[..m - 1], 0),
        tridiagonal_eigenvalue(&alpha, &beta[..m - 1], m - 1),
    )
}

/// `k`-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix by
/// Sturm-sequence bisection.
fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let m = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r = off.get(i).map_or(0.0, |b| b.abs()) + if i > 0 { off[i - 1].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..m {
            let b2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
