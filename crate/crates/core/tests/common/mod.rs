//! Independent oracles and property checks shared by the integration tests
//! and the acceptance harness.
#![allow(dead_code)]

use ipsf::assembly::{assemble, make_discretization, PolynomialPotential};
use ipsf::cache::TableBundle;
use ipsf::cascade::{eval_phi_dyadic, DyadicSamples};
use ipsf::connection::{compute_connection, compute_connection_float, refinement_residuals};
use ipsf::eigen::solve_generalized;
use ipsf::linalg::{band_matvec, dot, BandCholesky};
use ipsf::mask::{build_mask, ScaleOrder};
use ipsf::wavefunction::reconstruct;
use num::{BigRational, One, Zero};
use proptest::prelude::*;

pub type Check = Result<(), String>;

pub fn order(n: i64) -> ScaleOrder {
    ScaleOrder::new(n).unwrap()
}

/// `int x^m phi(x - k) phi(x) dx` by the trapezoid rule on the samples'
/// dyadic grid. `phi` is compactly supported, so no end corrections apply.
pub fn quadrature_moment(samples: &DyadicSamples, m: usize, k: i64) -> f64 {
    let d = samples.depth();
    let h = (-(d as f64)).exp2();
    let shift = k << d;
    let top = samples.max_index();
    let mut acc = 0.0;
    for i in -top..=top {
        let p = samples.value(i);
        if p == 0.0 {
            continue;
        }
        let q = samples.value(i - shift);
        if q != 0.0 {
            acc += (i as f64 * h).powi(m as i32) * p * q;
        }
    }
    acc * h
}

/// Closed-form `H_{m,k}` for the hat function (order 2).
pub fn hat_moment(m: usize, k: i64) -> f64 {
    let m = m as i32;
    let side = 1.0 / (m + 2) as f64 - 1.0 / (m + 3) as f64;
    match k {
        0 => (1.0 + (-1f64).powi(m)) * 2.0 / ((m + 1) * (m + 2) * (m + 3)) as f64,
        1 => side,
        -1 => (-1f64).powi(m) * side,
        _ => 0.0,
    }
}

/// Closed-form `L_k = <phi'', phi(. - k)>` for the hat function.
pub fn hat_connection(k: i64) -> f64 {
    match k.abs() {
        0 => -2.0,
        1 => 1.0,
        _ => 0.0,
    }
}

pub fn orders() -> impl Strategy<Value = i64> {
    prop_oneof![Just(2i64), Just(4), Just(6), Just(8)]
}

/// `(N, j, R)` whose index set is non-empty (`R 2^j >= N`).
pub fn gram_cases() -> impl Strategy<Value = (i64, u32, i64)> {
    (prop_oneof![Just(4i64), Just(6), Just(8)], 1u32..6, 3i64..8)
        .prop_filter("empty index set", |(n, j, r)| (r << j) >= *n)
}

/// Confining sextics with well separated low levels.
pub fn sextic_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (-3.0..3.0f64, -1.0..2.0f64, 0.5..2.0f64)
}

/// `sum_k phi(x - k) = 1` at every dyadic point of `[0, 1]`.
pub fn partition_of_unity(n: i64, depth: u32) -> Check {
    let s = eval_phi_dyadic(&build_mask(order(n)), depth);
    let step = 1i64 << depth;
    let r = order(n).support_radius();
    for i in 0..=step {
        let total: f64 = (-r - 1..=r + 1).map(|k| s.value(i - k * step)).sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(format!("N={n} x={i}/2^{depth}: sum = {total}"));
        }
    }
    Ok(())
}

/// `phi(x) = sum_l a_l phi(2x - l)` holds exactly on the dyadic grid.
pub fn refinement_exact(n: i64, depth: u32) -> Check {
    let mask = build_mask(order(n));
    let s = eval_phi_dyadic(&mask, depth + 1);
    let unit = 1i64 << (depth + 1);
    for i in -s.max_index()..=s.max_index() {
        // x = i / 2^(depth+1), so 2x - l sits at index 2i - l 2^(depth+1)
        let lhs = s.exact(i);
        let mut rhs = BigRational::zero();
        for (l, a) in mask.iter_exact() {
            rhs += a * s.exact(2 * i - l * unit);
        }
        if lhs != rhs {
            return Err(format!("N={n} x={i}/2^{}: {lhs} != {rhs}", depth + 1));
        }
    }
    Ok(())
}

/// `sum_k k^p phi(x - k) = x^p` for `p < N`, at dyadic points of `[0, 1]`.
pub fn polynomial_reproduction(n: i64, depth: u32) -> Check {
    let s = eval_phi_dyadic(&build_mask(order(n)), depth);
    let step = 1i64 << depth;
    let r = order(n).support_radius();
    for p in 0..n as i32 {
        for i in 0..=step {
            let x = i as f64 / step as f64;
            let total: f64 = (-r - 1..=r + 2)
                .map(|k| (k as f64).powi(p) * s.value(i - k * step))
                .sum();
            if (total - x.powi(p)).abs() > 1e-12 {
                return Err(format!("N={n} p={p} x={x}: {total}"));
            }
        }
    }
    // the exact samples reproduce the constant exactly
    let one: BigRational = (-r..=r).map(|k| s.exact(-k * step)).sum();
    if !one.is_one() {
        return Err(format!("N={n}: integer samples sum to {one}"));
    }
    Ok(())
}

/// Connection coefficients satisfy their refinement system to 1e-13,
/// on both the exact and the singular-value route.
pub fn connection_residuals(n: i64) -> Check {
    let mask = build_mask(order(n));
    for (route, table) in [
        ("exact", compute_connection(&mask)),
        ("float", compute_connection_float(&mask)),
    ] {
        let table = table.map_err(|e| format!("N={n} {route}: {e}"))?;
        let worst = refinement_residuals(&mask, &table)
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()));
        if worst > 1e-13 {
            return Err(format!("N={n} {route}: residual {worst:e}"));
        }
    }
    Ok(())
}

/// The Gram matrix of every discretization is positive definite.
pub fn gram_positive_definite(n: i64, level: u32, radius: f64) -> Check {
    let tables = TableBundle::compute(order(n), 0).map_err(|e| e.to_string())?;
    let disc = make_discretization(level, radius, order(n)).map_err(|e| e.to_string())?;
    let problem = assemble(&PolynomialPotential::zero(), &disc, &tables.connection, &tables.moments)
        .map_err(|e| e.to_string())?;
    BandCholesky::factor(problem.b.as_ref(), problem.bandwidth()).map_err(|e| format!("N={n} j={level}: {e}"))?;
    let low = problem
        .b
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| format!("{e:?}"))?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if low <= 0.0 {
        return Err(format!("N={n} j={level}: smallest Gram eigenvalue {low:e}"));
    }
    Ok(())
}

/// Eigenfunction `n` of a confining sextic has exactly `n` nodes.
pub fn sturm_nodes(params: (f64, f64, f64), level: u32) -> Check {
    let tables = TableBundle::compute(order(4), 6).unwrap();
    let (a, b, c) = params;
    let pot = PolynomialPotential::sextic(a, b, c).unwrap();
    let sol = ipsf::solver::solve(&tables, &pot, level, 6.0, 4).map_err(|e| e.to_string())?;
    let depth = level + 2;
    let samples = tables.samples(2);
    for state in 0..4 {
        let psi = reconstruct(&sol.spectrum, state, &sol.problem, &samples, depth).map_err(|e| e.to_string())?;
        let nodes = psi.sign_changes(1e-6);
        if nodes != state {
            return Err(format!("{pot}: state {state} has {nodes} nodes"));
        }
    }
    Ok(())
}

/// Adding a constant to `V` shifts every eigenvalue by that constant.
pub fn constant_shift(params: (f64, f64, f64), shift: f64, level: u32) -> Check {
    let tables = TableBundle::compute(order(4), 6).unwrap();
    let (a, b, c) = params;
    let pot = PolynomialPotential::sextic(a, b, c).unwrap();
    let base = ipsf::solver::solve(&tables, &pot, level, 6.0, 4).map_err(|e| e.to_string())?;
    let moved = ipsf::solver::solve(&tables, &pot.shifted(shift), level, 6.0, 4).map_err(|e| e.to_string())?;
    for (i, (e, f)) in base
        .spectrum
        .eigenvalues
        .iter()
        .zip(&moved.spectrum.eigenvalues)
        .enumerate()
    {
        if (f - e - shift).abs() > 1e-10 {
            return Err(format!("{pot} + {shift}: level {i} moved by {}", f - e));
        }
    }
    Ok(())
}

/// `c_i^T B c_j = delta_ij` for the computed eigenvectors.
pub fn b_orthonormal(params: (f64, f64, f64), level: u32, n_states: usize) -> Check {
    let tables = TableBundle::compute(order(4), 6).unwrap();
    let (a, b, c) = params;
    let pot = PolynomialPotential::sextic(a, b, c).unwrap();
    let disc = make_discretization(level, 6.0, order(4)).unwrap();
    let problem = assemble(&pot, &disc, &tables.connection, &tables.moments).map_err(|e| e.to_string())?;
    let spectrum = solve_generalized(&problem, n_states).map_err(|e| e.to_string())?;
    for (i, ci) in spectrum.eigenvectors.iter().enumerate() {
        let bci = band_matvec(problem.b.as_ref(), problem.bandwidth(), ci);
        for (j, cj) in spectrum.eigenvectors.iter().enumerate() {
            let g = dot(cj, &bci) - if i == j { 1.0 } else { 0.0 };
            if g.abs() > 1e-10 {
                return Err(format!("{pot}: <c{i}, B c{j}> off by {g:e}"));
            }
        }
    }
    Ok(())
}
