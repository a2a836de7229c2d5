use super::KernelError;
use crate::sparse::{spectral_norm_estimate, DenseMatrix};

/// Dense residual `‖X^p·A − I‖₂`.
pub fn dense_residual(a: &DenseMatrix, x: &DenseMatrix, p: u32) -> f64 {
    let r = x.pow(p).matmul(a).sub_identity();
    spectral_norm_estimate(&r, 1e-8, 500)
}

/// Newton refinement of an approximate inverse p-th root:
///
/// ```text
/// X_{k+1} = (1/p) · X_k · ((p+1)·I − A·X_k^p)
/// ```
///
/// Stops once `‖X_k^p·A − I‖₂ < tol`. Two consecutive residual increases are
/// reported as divergence.
///
/// For `p = 1` this is Newton–Schulz and the residual squares each step. For
/// `p ≥ 2` a start that does not commute with `A` converges only linearly, and
/// only while `(λ_max/λ_min)^{1/p}` stays below the root of
/// `1 + r + … + r^{p−1} = 2p` (`κ < 9` for `p = 2`).
pub fn refine_inverse_proot(
    a: &DenseMatrix,
    x0: &DenseMatrix,
    p: u32,
    tol: f64,
    max_iter: usize,
) -> Result<(DenseMatrix, usize), KernelError> {
    refine_with_history(a, x0, p, tol, max_iter).map(|(x, history)| (x, history.len() - 1))
}

/// Same as [`refine_inverse_proot`], returning the residual of `X0` and of
/// every accepted iterate instead of the count.
pub fn refine_with_history(
    a: &DenseMatrix,
    x0: &DenseMatrix,
    p: u32,
    tol: f64,
    max_iter: usize,
) -> Result<(DenseMatrix, Vec<f64>), KernelError> {
    if p == 0 {
        return Err(KernelError::InvalidArgument("p must be at least 1".into()));
    }
    if a.dim() != x0.dim() {
        return Err(KernelError::InvalidArgument(format!(
            "A is {0}x{0} but X0 is {1}x{1}",
            a.dim(),
            x0.dim()
        )));
    }
    let mut x = x0.clone();
    let mut history = vec![dense_residual(a, &x, p)];
    if history[0] < tol {
        return Ok((x, history));
    }
    let mut increases = 0;
    for k in 1..=max_iter {
        let residual = history[history.len() - 1];
        let next = newton_step(a, &x, p);
        let next_residual = dense_residual(a, &next, p);
        if !next_residual.is_finite() {
            return Err(KernelError::Diverged {
                iterations: k,
                residual: next_residual,
            });
        }
        if next_residual > residual {
            increases += 1;
            if increases >= 2 {
                return Err(KernelError::Diverged {
                    iterations: k,
                    residual: next_residual,
                });
            }
        } else {
            increases = 0;
        }
        x = next;
        history.push(next_residual);
        if next_residual < tol {
            return Ok((x, history));
        }
    }
    Err(KernelError::NoConvergence {
        iterations: max_iter,
        residual: history[history.len() - 1],
    })
}

/// One step `(1/p) · X · ((p+1)·I − A·X^p)`.
pub fn newton_step(a: &DenseMatrix, x: &DenseMatrix, p: u32) -> DenseMatrix {
    let mut step = a.matmul(&x.pow(p));
    step.scale(-1.0);
    for i in 0..a.dim() {
        step[(i, i)] += (p + 1) as f64;
    }
    let mut next = x.matmul(&step);
    next.scale(1.0 / p as f64);
    next
}
