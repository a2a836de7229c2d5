use super::AppError;
use crate::scheduler::SchedulerConfig;
use crate::sparse::CscMatrix;
use crate::submatrix::{submatrix_inverse_proot, MethodConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub e_bs: f64,
    pub e_bs_sm: f64,
    /// Relative deviation; absolute when `e_bs = 0`.
    pub delta_rel: f64,
}

/// `tr(P·H) = Σ_j Σ_k P_jk·H_kj` over the stored entries of `H`.
///
/// Summed column by column in the same order as the diagonal of a sparse
/// product, so `tr(I·(P·H))` reproduces this value bit for bit.
pub fn band_energy(p: &CscMatrix, h: &CscMatrix) -> Result<f64, AppError> {
    if p.n() != h.n() {
        return Err(AppError::SizeMismatch {
            left: p.n(),
            right: h.n(),
        });
    }
    let mut sum = 0.0;
    for j in 0..h.n() {
        let (rows, vals) = h.column(j);
        let mut col = 0.0;
        for (&k, &hkj) in rows.iter().zip(vals) {
            if let Some(pjk) = p.get(j, k) {
                col += pjk * hkj;
            }
        }
        sum += col;
    }
    Ok(sum)
}

/// Band energy through an orthogonalized Hamiltonian `H·S⁻¹`, with `S⁻¹`
/// approximated by the submatrix method.
pub fn band_energy_sm(
    s: &CscMatrix,
    p: &CscMatrix,
    h: &CscMatrix,
    sched: &SchedulerConfig,
) -> Result<EnergyReport, AppError> {
    for other in [p, h] {
        if other.n() != s.n() {
            return Err(AppError::SizeMismatch {
                left: s.n(),
                right: other.n(),
            });
        }
    }
    let e_bs = band_energy(p, h)?;
    let (x, _) = submatrix_inverse_proot(s, &MethodConfig::new(1)?, sched)?;
    let h_ortho = h.matmul(&x)?;
    let ph = p.matmul(&h_ortho)?;
    let e_bs_sm = band_energy(s, &ph)?;
    let diff = (e_bs - e_bs_sm).abs();
    let delta_rel = if e_bs == 0.0 { diff } else { diff / e_bs.abs() };
    Ok(EnergyReport {
        e_bs,
        e_bs_sm,
        delta_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduler::Strategy;

    fn m(entries: &[(usize, usize, f64)], n: usize) -> CscMatrix {
        CscMatrix::from_triplets(entries, n).unwrap()
    }

    #[test]
    fn band_energy_by_hand() {
        let p = m(&[(0, 0, 1.0), (1, 0, 2.0), (0, 1, 2.0), (1, 1, 1.0)], 2);
        let h = m(&[(1, 0, 1.0), (0, 1, 1.0)], 2);
        assert_eq!(band_energy(&p, &h).unwrap(), 4.0);
        let h2 = m(&[(0, 0, 3.0), (1, 0, 7.0), (1, 1, -1.0)], 2);
        assert_eq!(band_energy(&CscMatrix::identity(2), &h2).unwrap(), 2.0);
        assert_eq!(band_energy(&CscMatrix::zeros(2), &h2).unwrap(), 0.0);
        assert!(band_energy(&CscMatrix::identity(3), &h2).is_err());
    }

    #[test]
    fn identity_overlap_is_exact() {
        let p = m(&[(0, 0, 1.0), (1, 0, 0.5), (0, 1, 0.5), (1, 1, 2.0)], 2);
        let h = m(&[(0, 0, -1.0), (1, 0, 0.25), (0, 1, 0.25), (1, 1, 3.0)], 2);
        let sched = SchedulerConfig::new(1, Strategy::Static).unwrap();
        let r = band_energy_sm(&CscMatrix::identity(2), &p, &h, &sched).unwrap();
        assert_eq!(r.e_bs, r.e_bs_sm);
        assert_eq!(r.delta_rel, 0.0);
    }
}
