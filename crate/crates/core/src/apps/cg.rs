use super::AppError;
use crate::scheduler::SchedulerConfig;
use crate::sparse::krylov::{conjugate_gradient, CgBreakdown, IdentityPreconditioner};
use crate::sparse::{CscMatrix, LinearOperator, Preconditioner};
use crate::submatrix::{submatrix_inverse_proot, MethodConfig};

pub const DEFAULT_TOL: f64 = 1e-6;

pub fn default_max_iter(n: usize) -> usize {
    2 * n
}

#[derive(Clone, Debug)]
pub struct CgReport {
    pub iterations: usize,
    pub converged: bool,
    /// `‖b − A x‖₂` of the system CG actually ran on.
    pub final_residual: f64,
    /// `‖b − A x‖₂` of the original system.
    pub true_residual: f64,
    pub x: Vec<f64>,
}

impl From<CgBreakdown> for AppError {
    fn from(b: CgBreakdown) -> Self {
        AppError::Breakdown {
            iteration: b.iteration,
            curvature: b.curvature,
        }
    }
}

fn check_inputs(a: &CscMatrix, b: &[f64]) -> Result<(), AppError> {
    if !a.is_symmetric() {
        return Err(AppError::NotSymmetric);
    }
    if b.len() != a.n() {
        return Err(AppError::SizeMismatch {
            left: a.n(),
            right: b.len(),
        });
    }
    if let Some(i) = b.iter().position(|v| !v.is_finite()) {
        return Err(AppError::NonFiniteRhs(i));
    }
    Ok(())
}

fn residual(a: &CscMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.n()];
    a.mul_vec(x, &mut ax);
    b.iter().zip(&ax).map(|(bi, yi)| (bi - yi).powi(2)).sum::<f64>().sqrt()
}

/// Unpreconditioned CG with relative residual test `‖b − Ax‖₂/‖b‖₂ < tol`.
pub fn cg_solve(a: &CscMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<CgReport, AppError> {
    cg_solve_preconditioned(a, b, &IdentityPreconditioner, tol, max_iter)
}

/// CG with a left preconditioner such as [`Ilu0Factors`](super::Ilu0Factors).
pub fn cg_solve_preconditioned<P: Preconditioner + ?Sized>(
    a: &CscMatrix,
    b: &[f64],
    precond: &P,
    tol: f64,
    max_iter: usize,
) -> Result<CgReport, AppError> {
    check_inputs(a, b)?;
    let out = conjugate_gradient(a, b, precond, tol, max_iter)?;
    Ok(CgReport {
        iterations: out.iterations,
        converged: out.converged,
        final_residual: out.residual,
        true_residual: out.residual,
        x: out.x,
    })
}

/// `K ≈ A^{-1/2}` from the submatrix method.
pub fn make_sm_preconditioner(a: &CscMatrix, sched: &SchedulerConfig) -> Result<CscMatrix, AppError> {
    let cfg = MethodConfig::new(2)?;
    Ok(submatrix_inverse_proot(a, &cfg, sched)?.0)
}

/// `v ↦ Kᵀ·A·K·v` without forming the product.
pub struct SplitOperator<'a> {
    pub a: &'a CscMatrix,
    pub k: &'a CscMatrix,
}

impl LinearOperator for SplitOperator<'_> {
    fn dim(&self) -> usize {
        self.a.n()
    }

    fn apply(&self, v: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; v.len()];
        let mut s = vec![0.0; v.len()];
        self.k.mul_vec(v, &mut t);
        self.a.mul_vec(&t, &mut s);
        self.k.mul_vec_transpose(&s, y);
    }

    fn apply_transpose(&self, v: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; v.len()];
        let mut s = vec![0.0; v.len()];
        self.k.mul_vec(v, &mut t);
        self.a.mul_vec_transpose(&t, &mut s);
        self.k.mul_vec_transpose(&s, y);
    }
}

/// Solves `KᵀAK·y = Kᵀb` with CG and returns `x = K·y`.
///
/// Iterations and `final_residual` refer to the transformed system.
pub fn cg_solve_split_preconditioned(
    a: &CscMatrix,
    b: &[f64],
    k: &CscMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<CgReport, AppError> {
    check_inputs(a, b)?;
    if k.n() != a.n() {
        return Err(AppError::SizeMismatch {
            left: a.n(),
            right: k.n(),
        });
    }
    let mut kb = vec![0.0; a.n()];
    k.mul_vec_transpose(b, &mut kb);
    let op = SplitOperator { a, k };
    let out = conjugate_gradient(&op, &kb, &IdentityPreconditioner, tol, max_iter)?;
    let mut x = vec![0.0; a.n()];
    k.mul_vec(&out.x, &mut x);
    let true_residual = residual(a, &x, b);
    Ok(CgReport {
        iterations: out.iterations,
        converged: out.converged,
        final_residual: out.residual,
        true_residual,
        x,
    })
}
