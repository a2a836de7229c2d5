use super::{lu_factor, lu_invert, sym_eig, EigenDecomposition, KernelError, EIG_TOL};
use crate::sparse::DenseMatrix;

/// Rejects `λ_min ≤ PD_TOL · λ_max`.
pub const PD_TOL: f64 = 1e-12;

/// Dense `D^{-1/p}` for symmetric positive definite `D`.
///
/// `p = 1` goes through LU inversion; `p ≥ 2` through the eigendecomposition,
/// which makes the result symmetric by construction.
pub fn inverse_proot_dense(d: &DenseMatrix, p: u32) -> Result<DenseMatrix, KernelError> {
    match p {
        0 => Err(KernelError::InvalidArgument("p must be at least 1".into())),
        1 => inverse_lu(d),
        _ => inverse_proot_eig(d, p),
    }
}

pub(crate) fn inverse_lu(d: &DenseMatrix) -> Result<DenseMatrix, KernelError> {
    let f = lu_factor(d).map_err(singular_to_pd)?;
    lu_invert(&f).map_err(singular_to_pd)
}

/// `D^{-1/p}` through the eigendecomposition, valid for any `p ≥ 1`.
pub fn inverse_proot_eig(d: &DenseMatrix, p: u32) -> Result<DenseMatrix, KernelError> {
    let e = checked_eig(d)?;
    Ok(e.apply_function(root_fn(p)))
}

pub(crate) fn checked_eig(d: &DenseMatrix) -> Result<EigenDecomposition, KernelError> {
    let e = sym_eig(d, EIG_TOL)?;
    if let (Some(&lo), Some(&hi)) = (e.eigenvalues.first(), e.eigenvalues.last()) {
        if lo <= 0.0 || lo <= PD_TOL * hi {
            return Err(KernelError::NotPositiveDefinite { min_eigenvalue: lo });
        }
    }
    Ok(e)
}

pub(crate) fn root_fn(p: u32) -> impl Fn(f64) -> f64 {
    let exponent = -1.0 / p as f64;
    move |l: f64| match p {
        1 => 1.0 / l,
        2 => 1.0 / l.sqrt(),
        _ => l.powf(exponent),
    }
}

pub(crate) fn singular_to_pd(e: KernelError) -> KernelError {
    match e {
        KernelError::SingularMatrix { .. } => KernelError::NotPositiveDefinite { min_eigenvalue: 0.0 },
        other => other,
    }
}
