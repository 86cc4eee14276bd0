//! Closed-form ground state of the quasi-exactly-solvable sextic
//! `V = a x^2 + b x^4 + c x^6` with `a = b^2 / 4c - 3 sqrt(c)`:
//! `psi = exp(-sqrt(c) x^4 / 4 - b x^2 / (4 sqrt(c)))`, `E = b / (2 sqrt(c))`.
//!
//! The profile is only trusted after `-psi'' + V psi - E psi` has been checked
//! pointwise with a five-point difference of the formula itself.

use crate::assembly::PolynomialPotential;
use crate::error::{Error, Result};

/// Residual bound relative to the largest term of the equation on the grid.
pub const QES_RESIDUAL_TOL: f64 = 1e-8;

const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct QesProfile {
    pub potential: PolynomialPotential,
    pub energy: f64,
    /// Unnormalized, `psi(0) = 1`.
    pub values: Vec<f64>,
    /// Certified relative residual.
    pub residual: f64,
}

pub fn qes_ground_profile(b: f64, c: f64, grid: &[f64]) -> Result<QesProfile> {
    if !(c > 0.0) || !b.is_finite() || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "closed-form ground state needs finite b and c > 0, got b = {b}, c = {c}"
        )));
    }
    let rc = c.sqrt();
    let psi = |x: f64| (-rc * x.powi(4) / 4.0 - b * x * x / (4.0 * rc)).exp();
    let potential = PolynomialPotential::sextic(b * b / (4.0 * c) - 3.0 * rc, b, c)?;
    let energy = b / (2.0 * rc);

    let (values, residual) = certify(&psi, &potential, energy, grid)?;
    Ok(QesProfile {
        potential,
        energy,
        values,
        residual,
    })
}

/// Sample `psi` on `grid` after checking `-psi'' + V psi = E psi` there.
fn certify(
    psi: &dyn Fn(f64) -> f64,
    potential: &PolynomialPotential,
    energy: f64,
    grid: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let h = FD_STEP;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    let mut worst_at = 0.0;
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let p = psi(x);
            let d2 = (-psi(x + 2.0 * h) + 16.0 * psi(x + h) - 30.0 * p + 16.0 * psi(x - h) - psi(x - 2.0 * h))
                / (12.0 * h * h);
            let vp = potential.eval(x) * p;
            let r = (-d2 + vp - energy * p).abs();
            scale = scale.max(d2.abs() + vp.abs() + (energy * p).abs());
            if r > worst {
                worst = r;
                worst_at = x;
            }
            p
        })
        .collect();
    let residual = if scale > 0.0 { worst / scale } else { 0.0 };
    if !(residual <= QES_RESIDUAL_TOL) {
        return Err(Error::Certification(format!(
            "closed-form profile residual {residual:.3e} at x = {worst_at} exceeds {QES_RESIDUAL_TOL:e}"
        )));
    }
    Ok((values, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunction::dyadic_grid;

    #[test]
    fn certified_for_both_parameter_sets() {
        let grid = dyadic_grid(6, 8);
        let p = qes_ground_profile(1.0, 1.0, &grid).unwrap();
        assert_eq!(p.energy, 0.5);
        assert_eq!(p.potential.coeff(2), -2.75);
        let p = qes_ground_profile(-4.0, 1.0, &grid).unwrap();
        assert_eq!(p.energy, -2.0);
        assert_eq!(p.potential.coeff(2), 1.0);
    }

    #[test]
    fn peak_and_symmetry() {
        let grid = dyadic_grid(6, 6);
        let p = qes_ground_profile(1.0, 1.0, &grid).unwrap();
        let mid = grid.len() / 2;
        assert_eq!(grid[mid], 0.0);
        assert_eq!(p.values[mid], 1.0);
        for i in 0..mid {
            assert_eq!(p.values[i], p.values[grid.len() - 1 - i]);
        }
    }

    #[test]
    fn certification_catches_wrong_energy_or_profile() {
        let grid = dyadic_grid(6, 6);
        let pot = PolynomialPotential::sextic(-2.75, 1.0, 1.0).unwrap();
        let good = |x: f64| (-x.powi(4) / 4.0 - x * x / 4.0).exp();
        assert!(certify(&good, &pot, 0.5, &grid).is_ok());
        assert!(matches!(
            certify(&good, &pot, 0.5001, &grid),
            Err(Error::Certification(_))
        ));
        let bad = |x: f64| (-x.powi(4) / 4.0 - x * x / 3.9).exp();
        assert!(matches!(certify(&bad, &pot, 0.5, &grid), Err(Error::Certification(_))));
    }

    #[test]
    fn rejects_nonpositive_c() {
        assert!(matches!(
            qes_ground_profile(1.0, 0.0, &[0.0]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
