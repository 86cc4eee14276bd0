//! Truncated index sets and assembly of the generalized eigenproblem
//! `A c = E B c` for a polynomial potential.

use std::fmt;

use faer::Mat;
use rayon::prelude::*;

use crate::connection::ConnectionTable;
use crate::error::{Error, Result};
use crate::mask::ScaleOrder;
use crate::moments::MomentTable;

/// Domain half-width used for all published reference values.
pub const DEFAULT_RADIUS: i64 = 6;

/// `V(x) = sum_m c_m x^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    coeffs: Vec<f64>,
}

impl PolynomialPotential {
    /// Coefficients in ascending degree; trailing zeros are dropped.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coeffs = coeffs.into();
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("potential coefficients must be finite".into()));
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(PolynomialPotential { coeffs })
    }

    /// `a x^2 + b x^4 + c x^6`.
    pub fn sextic(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(vec![0.0, 0.0, a, 0.0, b, 0.0, c])
    }

    /// `a x^2 + b x^4 + c x^6 + d x^8 + e x^10`.
    pub fn decatic(a: f64, b: f64, c: f64, d: f64, e: f64) -> Result<Self> {
        Self::new(vec![0.0, 0.0, a, 0.0, b, 0.0, c, 0.0, d, 0.0, e])
    }

    pub fn zero() -> Self {
        PolynomialPotential { coeffs: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Return a copy with `shift` added to the constant term.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += shift;
        PolynomialPotential { coeffs }
    }

    /// Even leading degree with positive coefficient.
    pub fn is_confining(&self) -> bool {
        let d = self.degree();
        d > 0 && d.is_multiple_of(2) && self.coeffs[d] > 0.0
    }

    /// Symmetric under `x -> -x`.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }
}

impl fmt::Display for PolynomialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 && !(m == 0 && self.coeffs.len() == 1) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match m {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c} x")?,
                _ => write!(f, "{c} x^{m}")?,
            }
        }
        Ok(())
    }
}

/// Resolution level, domain and translate range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discretization {
    pub level: u32,
    pub radius: i64,
    pub order: ScaleOrder,
    pub k_min: i64,
    pub k_max: i64,
}

impl Discretization {
    pub fn dimension(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    /// Translates whose support lies inside `[-R, R]` at this level.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.k_min..=self.k_max
    }

    pub fn domain(&self) -> (f64, f64) {
        (-self.radius as f64, self.radius as f64)
    }
}

/// Index set `k_min = -R 2^j + N - 1`, `k_max = R 2^j - N + 1`.
pub fn make_discretization(level: u32, radius: f64, order: ScaleOrder) -> Result<Discretization> {
    if !(radius > 0.0) || radius.fract() != 0.0 || radius > 1e9 {
        return Err(Error::InvalidArgument(format!(
            "domain half-width must be a positive integer, got {radius}"
        )));
    }
    if level > 24 {
        return Err(Error::InvalidArgument(format!("resolution level {level} is too large")));
    }
    let r = radius as i64;
    let k_max = (r << level) - order.support_radius();
    if k_max < 0 {
        return Err(Error::InvalidArgument(format!(
            "domain [-{r}, {r}] holds no interior translates at level {level} for N = {order}"
        )));
    }
    Ok(Discretization {
        level,
        radius: r,
        order,
        k_min: -k_max,
        k_max,
    })
}

/// Dense symmetric pair `(A, B)` on the index set of `disc`.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub a: Mat<f64>,
    pub b: Mat<f64>,
    pub disc: Discretization,
    // -2^{2j} L_d for d = 0..=2N-3
    kinetic: Vec<f64>,
    // potential part of A, upper band: potential[i][d] = V[i, i + d]
    potential: Vec<Vec<f64>>,
}

impl SpectralProblem {
    pub fn dimension(&self) -> usize {
        self.disc.dimension()
    }

    /// Largest `|i - j|` with a structurally nonzero entry, `2N - 3`.
    pub fn bandwidth(&self) -> usize {
        self.disc.order.overlap_radius() as usize
    }

    /// Kinetic Toeplitz weights `-2^{2j} L_d`, `d = 0..=2N-3`.
    pub fn kinetic_stencil(&self) -> &[f64] {
        &self.kinetic
    }

    /// Potential part of `A` in upper band storage, `row[i][d] = V[i, i + d]`.
    pub fn potential_band(&self) -> &[Vec<f64>] {
        &self.potential
    }

    /// `(P A P^T, P B P^T)` for the permutation
    /// `perm` (new index `i` takes old index `perm[i]`). Bandedness is lost,
    /// so only the dense paths remain valid.
    pub fn permuted(&self, perm: &[usize]) -> (Mat<f64>, Mat<f64>) {
        let n = self.dimension();
        let a = Mat::from_fn(n, n, |i, j| self.a[(perm[i], perm[j])]);
        let b = Mat::from_fn(n, n, |i, j| self.b[(perm[i], perm[j])]);
        (a, b)
    }
}

/// Assemble `A = -2^{2j} L + sum_m c_m 2^{-jm} H_m` and `B = H_0`.
pub fn assemble(
    pot: &PolynomialPotential,
    disc: &Discretization,
    conn: &ConnectionTable,
    moments: &MomentTable,
) -> Result<SpectralProblem> {
    for (what, found) in [("connection table", conn.order()), ("moment table", moments.order())] {
        if found != disc.order {
            return Err(Error::OrderMismatch {
                what,
                expected: disc.order.get(),
                found: found.get(),
            });
        }
    }
    if pot.degree() > moments.m_max() {
        return Err(Error::MomentOrder {
            requested: pot.degree(),
            available: moments.m_max(),
        });
    }

    let n = disc.dimension();
    let band = disc.order.overlap_radius();
    let j = disc.level as i32;
    let kinetic = (2.0 * j as f64).exp2();
    let terms: Vec<(usize, f64)> = pot
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(m, c)| (m, c * (-(j as f64) * m as f64).exp2()))
        .collect();

    // upper triangle, one band row per translate: (kinetic, potential, gram)
    let rows: Vec<Vec<(f64, f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let k1 = disc.k_min + i as i64;
            (0..=band)
                .take_while(|d| i + (*d as usize) < n)
                .map(|d| {
                    let k2 = k1 + d;
                    let mut v = 0.0;
                    for &(m, c) in &terms {
                        v += c * moments.shift_moment_unchecked(m, k1, k2);
                    }
                    (-kinetic * conn.get(k2 - k1), v, moments.gram_coefficient(k1, k2))
                })
                .collect()
        })
        .collect();

    let mut a = Mat::<f64>::zeros(n, n);
    let mut b = Mat::<f64>::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (d, &(kv, vv, bv)) in row.iter().enumerate() {
            let av = kv + vv;
            a[(i, i + d)] = av;
            a[(i + d, i)] = av;
            b[(i, i + d)] = bv;
            b[(i + d, i)] = bv;
        }
    }

    let stencil = (0..=band).map(|d| -kinetic * conn.get(d)).collect();
    let potential = rows
        .into_iter()
        .map(|row| row.into_iter().map(|(_, v, _)| v).collect())
        .collect();

    Ok(SpectralProblem {
        a,
        b,
        disc: *disc,
        kinetic: stencil,
        potential,
    })
}
