mod common;

use common::*;
use ipsf::cache::TableBundle;
use ipsf::cascade::eval_phi_dyadic;
use ipsf::mask::build_mask;
use proptest::prelude::*;

fn run(check: Check) -> Result<(), TestCaseError> {
    check.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 16,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sums_of_translates_are_one(n in orders(), depth in 1u32..7) {
        run(partition_of_unity(n, depth))?;
    }

    #[test]
    fn refinement_equation_holds_exactly(n in orders(), depth in 0u32..5) {
        run(refinement_exact(n, depth))?;
    }

    #[test]
    fn polynomials_below_order_are_reproduced(n in orders(), depth in 1u32..7) {
        run(polynomial_reproduction(n, depth))?;
    }

    #[test]
    fn gram_matrix_is_positive_definite((n, level, radius) in gram_cases()) {
        run(gram_positive_definite(n, level, radius as f64))?;
    }

    #[test]
    fn eigenfunctions_have_index_many_nodes(p in sextic_params()) {
        run(sturm_nodes(p, 5))?;
    }

    #[test]
    fn constant_shift_moves_the_spectrum(p in sextic_params(), shift in -10.0..10.0f64, level in 3u32..6) {
        run(constant_shift(p, shift, level))?;
    }

    #[test]
    fn eigenvectors_are_gram_orthonormal(p in sextic_params(), level in 3u32..6) {
        run(b_orthonormal(p, level, 6))?;
    }
}

#[test]
fn connection_systems_are_satisfied() {
    for n in [2, 4, 6, 8] {
        connection_residuals(n).unwrap();
    }
}

#[test]
fn hat_function_tables_match_closed_forms() {
    let t = TableBundle::compute(order(2), 10).unwrap();
    for k in -2..=2 {
        assert!((t.connection.get(k) - hat_connection(k)).abs() < 1e-14, "L_{k}");
        for m in 0..=10 {
            let (got, want) = (t.moments.get(m, k), hat_moment(m, k));
            assert!((got - want).abs() < 1e-13, "H_{m},{k}: {got} vs {want}");
        }
    }
}

#[test]
fn hat_moment_formula_matches_quadrature() {
    let s = eval_phi_dyadic(&build_mask(order(2)), 10);
    for k in -1..=1 {
        for m in 0..=6 {
            let q = quadrature_moment(&s, m, k);
            assert!((q - hat_moment(m, k)).abs() < 1e-6, "H_{m},{k}: {q}");
        }
    }
}

#[test]
fn moments_agree_with_quadrature_for_higher_orders() {
    for n in [4, 6] {
        let t = TableBundle::compute(order(n), 6).unwrap();
        let s = t.samples(10);
        let kmax = order(n).overlap_radius();
        for m in 0..=6 {
            for k in -kmax..=kmax {
                let (got, q) = (t.moments.get(m, k), quadrature_moment(&s, m, k));
                assert!(
                    (got - q).abs() < 1e-8 * (1.0 + q.abs()),
                    "N={n} H_{m},{k}: {got} vs {q}"
                );
            }
        }
    }
}
