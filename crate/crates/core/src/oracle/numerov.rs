//! Three-point finite differences for `-psi'' + V psi = E psi` with
//! `psi(a) = psi(b) = 0`. Eigenvalues come from Sturm-sequence bisection on
//! the symmetric tridiagonal matrix and are Richardson-extrapolated from
//! spacings `h` and `h/2`.

use crate::assembly::PolynomialPotential;
use crate::error::{Error, Result};
use crate::linalg::solve_band_shifted;
use crate::wavefunction::{dyadic_grid, SampledWavefunction};

/// Smallest accepted grid, boundary points included.
pub const MIN_POINTS: usize = 1000;

const INVERSE_SWEEPS: usize = 3;

#[derive(Debug, Clone)]
pub struct OracleSpectrum {
    /// Richardson-extrapolated, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|E(h/2) - E(h)| / 3`, the error estimate of the unextrapolated
    /// fine-grid value and a bound on the extrapolated one.
    pub error_estimates: Vec<f64>,
}

/// Interior diagonal of the tridiagonal operator; off-diagonal is `-1/h^2`.
fn operator(pot: &PolynomialPotential, a: f64, h: f64, interior: usize) -> Vec<f64> {
    let k = 2.0 / (h * h);
    (1..=interior).map(|i| k + pot.eval(a + i as f64 * h)).collect()
}

/// Number of eigenvalues below `x`.
fn sturm_count(diag: &[f64], off2: f64, x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &t) in diag.iter().enumerate() {
        d = t - x - if i == 0 { 0.0 } else { off2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (t.abs() + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_levels(diag: &[f64], off: f64, n_states: usize) -> Result<Vec<f64>> {
    let off2 = off * off;
    let radius = 2.0 * off.abs();
    let mut lo0 = diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - radius;
    let hi0 = diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + radius;
    if !lo0.is_finite() || !hi0.is_finite() {
        return Err(Error::NonFinite("finite-difference operator"));
    }
    let mut levels = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, off2, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi - lo > 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            return Err(Error::NoConvergence);
        }
        let e = 0.5 * (lo + hi);
        levels.push(e);
        lo0 = lo;
    }
    Ok(levels)
}

fn check(pot: &PolynomialPotential, domain: (f64, f64), n_points: usize, n_states: usize) -> Result<()> {
    if n_points < MIN_POINTS {
        return Err(Error::InvalidArgument(format!(
            "finite-difference grid needs at least {MIN_POINTS} points, got {n_points}"
        )));
    }
    if !(domain.0 < domain.1) || !domain.0.is_finite() || !domain.1.is_finite() {
        return Err(Error::InvalidArgument(format!("bad domain {domain:?}")));
    }
    if n_states == 0 || n_states > n_points - 2 {
        return Err(Error::InvalidArgument(format!(
            "requested {n_states} states from {n_points} grid points"
        )));
    }
    if pot.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("potential coefficients"));
    }
    Ok(())
}

/// Lowest `n_states` eigenvalues on `domain` with `n_points` grid points
/// (boundaries included), extrapolated against the grid with halved spacing.
pub fn numerov_solve(
    pot: &PolynomialPotential,
    domain: (f64, f64),
    n_points: usize,
    n_states: usize,
) -> Result<OracleSpectrum> {
    check(pot, domain, n_points, n_states)?;
    let (a, b) = domain;
    let levels = |points: usize| {
        let h = (b - a) / (points - 1) as f64;
        let diag = operator(pot, a, h, points - 2);
        lowest_levels(&diag, -1.0 / (h * h), n_states)
    };
    let coarse = levels(n_points)?;
    let fine = levels(2 * n_points - 1)?;
    let eigenvalues = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let error_estimates = coarse.iter().zip(&fine).map(|(c, f)| (f - c).abs() / 3.0).collect();
    Ok(OracleSpectrum {
        eigenvalues,
        error_estimates,
    })
}

/// Eigenvectors on `[-radius, radius]` with spacing `2^-depth`, computed at
/// depths `depth` and `depth + 1` and Richardson-combined on the coarse grid.
/// Each is normalized by the trapezoid rule and sign-fixed.
pub fn numerov_states(
    pot: &PolynomialPotential,
    radius: i64,
    depth: u32,
    n_states: usize,
) -> Result<Vec<SampledWavefunction>> {
    let points = |d: u32| (2 * radius as usize) << d;
    check(pot, (-radius as f64, radius as f64), points(depth) + 1, n_states)?;
    let coarse = vectors_at(pot, radius, depth, n_states)?;
    let fine = vectors_at(pot, radius, depth + 1, n_states)?;
    coarse
        .into_iter()
        .zip(fine)
        .map(|(c, f)| {
            let f = f.coarsen(depth)?;
            let values = c
                .values
                .iter()
                .zip(&f.values)
                .map(|(x, y)| (4.0 * y - x) / 3.0)
                .collect();
            Ok(SampledWavefunction { values, ..c }.normalized().sign_fixed())
        })
        .collect()
}

fn vectors_at(pot: &PolynomialPotential, radius: i64, depth: u32, n_states: usize) -> Result<Vec<SampledWavefunction>> {
    let grid = dyadic_grid(radius, depth);
    let h = (-(depth as f64)).exp2();
    let interior = grid.len() - 2;
    let diag = operator(pot, grid[0], h, interior);
    let off = -1.0 / (h * h);
    let levels = lowest_levels(&diag, off, n_states)?;

    // deterministic start vector with no parity
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let start: Vec<f64> = (0..interior)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();

    levels
        .iter()
        .map(|&e| {
            let entry = |i: usize, j: usize| {
                if i == j {
                    diag[i] - e
                } else {
                    off
                }
            };
            let mut v = start.clone();
            for _ in 0..INVERSE_SWEEPS {
                v = solve_band_shifted(&entry, interior, 1, &v);
                let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if !peak.is_finite() || peak == 0.0 {
                    return Err(Error::NoConvergence);
                }
                v.iter_mut().for_each(|x| *x /= peak);
            }
            let mut values = Vec::with_capacity(grid.len());
            values.push(0.0);
            values.extend(v);
            values.push(0.0);
            Ok(SampledWavefunction {
                depth,
                grid: grid.clone(),
                values,
                norm_certificate: 0.0,
            }
            .normalized()
            .sign_fixed())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_levels_are_odd_integers() {
        let pot = PolynomialPotential::new(vec![0.0, 0.0, 1.0]).unwrap();
        let s = numerov_solve(&pot, (-6.0, 6.0), 2001, 6).unwrap();
        for (n, (e, err)) in s.eigenvalues.iter().zip(&s.error_estimates).enumerate() {
            let exact = (2 * n + 1) as f64;
            assert!((e - exact).abs() <= *err, "n = {n}: {e} +- {err}");
            assert!(*err < 1e-4);
        }
    }

    #[test]
    fn rejects_small_grids() {
        let pot = PolynomialPotential::zero();
        assert!(matches!(
            numerov_solve(&pot, (-1.0, 1.0), 999, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn box_levels_converge() {
        // infinite well of width 2: E_n = ((n+1) pi / 2)^2
        let s = numerov_solve(&PolynomialPotential::zero(), (-1.0, 1.0), 1001, 3).unwrap();
        for (n, e) in s.eigenvalues.iter().enumerate() {
            let k = (n + 1) as f64 * std::f64::consts::FRAC_PI_2;
            assert!((e - k * k).abs() < 1e-8, "{n}: {e}");
        }
    }

    #[test]
    fn harmonic_eigenvectors_match_hermite_functions() {
        let pot = PolynomialPotential::new(vec![0.0, 0.0, 1.0]).unwrap();
        let states = numerov_states(&pot, 6, 8, 2).unwrap();
        let norm0 = std::f64::consts::PI.powf(-0.25);
        let norm1 = norm0 * std::f64::consts::SQRT_2;
        // the Dirichlet wall cuts off tails of order 1e-8 near |x| = 6
        let inner = |x: &&f64| x.abs() <= 5.0;
        for (x, v) in states[0].grid.iter().zip(&states[0].values).filter(|(x, _)| inner(x)) {
            assert!((v - norm0 * (-x * x / 2.0).exp()).abs() < 1e-8, "{x}: {v}");
        }
        for (x, v) in states[1].grid.iter().zip(&states[1].values).filter(|(x, _)| inner(x)) {
            assert!((v - norm1 * x * (-x * x / 2.0).exp()).abs() < 1e-8);
        }
    }
}
