mod common;

use common::{block_diagonal, random_spd, serial};
use proptest::prelude::*;
use submatrix_core::apps::{
    band_energy, band_energy_sm, cg_solve, cg_solve_preconditioned, cg_solve_split_preconditioned,
    ilu0, make_sm_preconditioner, trefethen_matrix, AppError, DEFAULT_TOL,
};
use submatrix_core::kernels::inverse_proot_dense;
use submatrix_core::CscMatrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cg_terminates_within_n_plus_five(n in 8usize..128, d in 0.05f64..0.5, kappa in 1.5f64..20.0, seed in any::<u64>()) {
        let a = random_spd(n, d, kappa, seed);
        let r = cg_solve(&a, &vec![1.0; n], 1e-10, 2 * n).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.iterations <= n + 5);
        prop_assert!(r.final_residual < 1e-10 * (n as f64).sqrt());
    }

    #[test]
    fn exact_split_preconditioner_converges_immediately(n in 4usize..64, d in 0.1f64..1.0, seed in any::<u64>()) {
        let a = random_spd(n, d, 10.0, seed);
        let k = CscMatrix::from_dense(&inverse_proot_dense(&a.to_dense(), 2).unwrap());
        let r = cg_solve_split_preconditioned(&a, &vec![1.0; n], &k, 1e-6, 2 * n).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.iterations <= 3);
    }

    #[test]
    fn ilu0_matches_a_on_its_pattern(n in 4usize..80, d in 0.05f64..0.6, seed in any::<u64>()) {
        let a = random_spd(n, d, 5.0, seed);
        let f = ilu0(&a).unwrap();
        let lu = f.l.to_dense().matmul(&f.u.to_dense());
        for j in 0..n {
            let (rows, vals) = a.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                prop_assert!((lu[(i, j)] - v).abs() < 1e-12 * (1.0 + v.abs()));
            }
        }
        for m in [&f.l, &f.u] {
            for j in 0..n {
                for &i in m.column(j).0 {
                    prop_assert!(a.get(i, j).is_some() || i == j);
                }
            }
        }
    }

    #[test]
    fn block_overlap_energy_is_exact(sizes in prop::collection::vec(1usize..7, 1..5), seed in any::<u64>()) {
        let s = block_diagonal(&sizes, seed);
        let n = s.n();
        let p = block_diagonal(&sizes, seed ^ 1);
        let h = block_diagonal(&sizes, seed ^ 2);
        let r = band_energy_sm(&s, &p, &h, &serial()).unwrap();
        prop_assert!(r.delta_rel < 1e-12, "{r:?} n={n}");
    }
}

#[test]
fn sm_preconditioner_on_blocks_is_exact_root() {
    let a = block_diagonal(&[3, 5, 2], 4);
    let k = make_sm_preconditioner(&a, &serial()).unwrap();
    let exact = inverse_proot_dense(&a.to_dense(), 2).unwrap();
    assert!(k.to_dense().sub(&exact).max_abs() < 1e-12);
    assert!(k.same_pattern(&a));
}

#[test]
fn identity_any_preconditioner_one_step() {
    let i = CscMatrix::identity(20);
    let b = vec![1.0; 20];
    assert_eq!(cg_solve(&i, &b, DEFAULT_TOL, 40).unwrap().iterations, 1);
    let k = make_sm_preconditioner(&i, &serial()).unwrap();
    assert_eq!(cg_solve_split_preconditioned(&i, &b, &k, DEFAULT_TOL, 40).unwrap().iterations, 1);
    let f = ilu0(&i).unwrap();
    assert_eq!(cg_solve_preconditioned(&i, &b, &f, DEFAULT_TOL, 40).unwrap().iterations, 1);
}

#[test]
fn energy_with_identity_overlap() {
    let p = block_diagonal(&[4, 4], 1);
    let h = block_diagonal(&[4, 4], 2);
    let r = band_energy_sm(&CscMatrix::identity(8), &p, &h, &serial()).unwrap();
    assert_eq!(r.e_bs, band_energy(&p, &h).unwrap());
    assert_eq!(r.delta_rel, 0.0);
}

#[test]
fn split_cg_indefinite_breaks_down() {
    let a = CscMatrix::from_diagonal(&[1.0, -1.0]);
    let k = CscMatrix::identity(2);
    assert!(matches!(
        cg_solve_split_preconditioned(&a, &[1.0, 1.0], &k, 1e-6, 4),
        Err(AppError::Breakdown { .. })
    ));
}

/// Synthesized copy of the SuiteSparse Trefethen_2000 matrix. The published
/// iteration counts are 435 unpreconditioned, 6 with the submatrix method and
/// 5 with ILU(0).
#[test]
fn trefethen_2000_iteration_counts() {
    let a = trefethen_matrix(2000);
    let n = a.n();
    let b = vec![1.0; n];
    let none = cg_solve(&a, &b, DEFAULT_TOL, 2 * n).unwrap();
    let k = make_sm_preconditioner(&a, &serial()).unwrap();
    let sm = cg_solve_split_preconditioned(&a, &b, &k, DEFAULT_TOL, 2 * n).unwrap();
    let ilu = cg_solve_preconditioned(&a, &b, &ilu0(&a).unwrap(), DEFAULT_TOL, 2 * n).unwrap();
    println!(
        "Trefethen_2000 iterations: none={} sm={} ilu0={}",
        none.iterations, sm.iterations, ilu.iterations
    );
    assert!(none.converged && sm.converged && ilu.converged);
    assert!((300..=600).contains(&none.iterations));
    assert!(sm.iterations <= 15);
    assert!(ilu.iterations <= 15);
}
