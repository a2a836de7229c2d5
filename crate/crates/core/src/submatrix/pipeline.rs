use std::time::Instant;

use super::{assemble_result, MethodConfig, MethodError};
use crate::scheduler::{run_parallel, SchedulerConfig, TimingReport};
use crate::sparse::{spectral_norm_estimate, CscMatrix, LinearOperator};

/// Full method: validate, solve every column in parallel, assemble.
///
/// All columns with a structurally zero diagonal are reported together.
pub fn submatrix_inverse_proot(
    a: &CscMatrix,
    cfg: &MethodConfig,
    sched: &SchedulerConfig,
) -> Result<(CscMatrix, TimingReport), MethodError> {
    let start = Instant::now();
    if !a.is_symmetric() {
        return Err(MethodError::NotSymmetric);
    }
    let missing: Vec<usize> = (0..a.n())
        .filter(|&j| a.column(j).0.binary_search(&j).is_err())
        .collect();
    if !missing.is_empty() {
        return Err(MethodError::DiagonalZero { columns: missing });
    }

    let (columns, mut report) = run_parallel(a, cfg, sched)?;
    let t = Instant::now();
    let x = assemble_result(a, &columns)?;
    report.assemble = t.elapsed();
    report.wall_time = start.elapsed();
    Ok((x, report))
}

/// Matrix-free `M = X^p·A − I`.
pub struct ResidualOperator<'a> {
    pub a: &'a CscMatrix,
    pub x: &'a CscMatrix,
    pub p: u32,
}

impl LinearOperator for ResidualOperator<'_> {
    fn dim(&self) -> usize {
        self.a.n()
    }

    fn apply(&self, v: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; v.len()];
        let mut s = vec![0.0; v.len()];
        self.a.mul_vec(v, &mut t);
        for _ in 0..self.p {
            self.x.mul_vec(&t, &mut s);
            std::mem::swap(&mut t, &mut s);
        }
        for ((yi, ti), vi) in y.iter_mut().zip(&t).zip(v) {
            *yi = ti - vi;
        }
    }

    fn apply_transpose(&self, v: &[f64], y: &mut [f64]) {
        let mut t = v.to_vec();
        let mut s = vec![0.0; v.len()];
        for _ in 0..self.p {
            self.x.mul_vec_transpose(&t, &mut s);
            std::mem::swap(&mut t, &mut s);
        }
        self.a.mul_vec_transpose(&t, &mut s);
        for ((yi, si), vi) in y.iter_mut().zip(&s).zip(v) {
            *yi = si - vi;
        }
    }
}

/// `‖X^p·A − I‖₂` by power iteration, never forming the product.
pub fn residual_norm(a: &CscMatrix, x: &CscMatrix, p: u32) -> f64 {
    residual_norm_with(a, x, p, 1e-12, 3000)
}

pub fn residual_norm_with(a: &CscMatrix, x: &CscMatrix, p: u32, tol: f64, max_iter: usize) -> f64 {
    assert_eq!(a.n(), x.n(), "A and X differ in size");
    spectral_norm_estimate(&ResidualOperator { a, x, p }, tol, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduler::Strategy;

    #[test]
    fn identity_and_diagonal() {
        let sched = SchedulerConfig::new(2, Strategy::Static).unwrap();
        for p in 1..=3 {
            let (x, _) = submatrix_inverse_proot(
                &CscMatrix::identity(5),
                &MethodConfig::new(p).unwrap(),
                &sched,
            )
            .unwrap();
            assert_eq!(x.to_dense(), CscMatrix::identity(5).to_dense());
        }
        let d = CscMatrix::from_diagonal(&[4.0, 9.0, 16.0]);
        let (x, _) = submatrix_inverse_proot(&d, &MethodConfig::new(2).unwrap(), &sched).unwrap();
        assert_eq!(x.diagonal(), vec![0.5, 1.0 / 3.0, 0.25]);
        assert!(residual_norm(&d, &x, 2) < 1e-15);
    }

    #[test]
    fn reports_every_missing_diagonal() {
        let a = CscMatrix::from_triplets(
            &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0), (4, 4, 1.0)],
            5,
        )
        .unwrap();
        let sched = SchedulerConfig::new(1, Strategy::Static).unwrap();
        let err = submatrix_inverse_proot(&a, &MethodConfig::new(1).unwrap(), &sched).unwrap_err();
        assert!(matches!(err, MethodError::DiagonalZero { columns } if columns == vec![0, 1, 2, 3]));
    }

    #[test]
    fn residual_of_exact_inverse_is_tiny() {
        let a = CscMatrix::from_triplets(
            &[(0, 0, 2.0), (1, 0, 1.0), (0, 1, 1.0), (1, 1, 2.0)],
            2,
        )
        .unwrap();
        let x = a.with_values(vec![2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0]);
        assert!(residual_norm(&a, &x, 1) < 1e-15);
        // X = I gives A − I = [[1,1],[1,1]], norm 2
        let x = a.with_values(vec![1.0, 0.0, 0.0, 1.0]);
        assert!((residual_norm(&a, &x, 1) - 2.0).abs() < 1e-6);
    }
}
