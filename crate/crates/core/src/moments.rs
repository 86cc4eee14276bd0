//! Monomial Galerkin coefficients `H_{m,k} = <x^m phi(x - k), phi(x)>`.
//!
//! Inserting the refinement equation into both factors and substituting
//! `y = 2x - l2` gives
//!
//! ```text
//! H_{m,k} = 2^-(m+1) sum_{l1,l2} a_{l1} a_{l2}
//!           sum_{r=0}^{m} C(m,r) l2^(m-r) H_{r, 2k + l1 - l2}
//! ```
//!
//! The `r = m` terms are the unknowns of a fixed-`m` linear system; the
//! `r < m` terms are known from lower orders. `m = 0` is homogeneous and is
//! normalized by `sum_k H_{0,k} = 1`.

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::connection::null_vector;
use crate::error::{Error, Result};
use crate::mask::{RefinementMask, ScaleOrder};

/// Condition estimates above this reject a fixed-`m` system as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Default highest monomial degree (decatic potentials).
pub const DEFAULT_M_MAX: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    order: ScaleOrder,
    // rows[m][k + K], K = 2N - 3
    rows: Vec<Vec<f64>>,
}

impl MomentTable {
    pub fn order(&self) -> ScaleOrder {
        self.order
    }

    pub fn m_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `H_{m,k}`; zero for `|k| >= 2N - 2`. Panics if `m > m_max`.
    pub fn get(&self, m: usize, k: i64) -> f64 {
        let kmax = self.order.overlap_radius();
        if k.abs() > kmax {
            return 0.0;
        }
        self.rows[m][(k + kmax) as usize]
    }

    /// `H_{m,-K..=K}`.
    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m]
    }

    pub fn from_rows(order: ScaleOrder, rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = 2 * order.overlap_radius() as usize + 1;
        if rows.is_empty() || rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidArgument(format!(
                "moment table for N = {order} needs rows of {width} entries"
            )));
        }
        Ok(MomentTable { order, rows })
    }

    /// `H_{m,k1,k2} = <x^m phi(x - k1), phi(x - k2)>`.
    pub fn shift_moment(&self, m: usize, k1: i64, k2: i64) -> Result<f64> {
        if m > self.m_max() {
            return Err(Error::MomentOrder {
                requested: m,
                available: self.m_max(),
            });
        }
        Ok(self.shift_moment_unchecked(m, k1, k2))
    }

    pub(crate) fn shift_moment_unchecked(&self, m: usize, k1: i64, k2: i64) -> f64 {
        let d = k1 - k2;
        if d.abs() > self.order.overlap_radius() {
            return 0.0;
        }
        if k2 == 0 {
            return self.get(m, k1);
        }
        let shift = k2 as f64;
        let mut binom = 1.0;
        let mut acc = 0.0;
        // r = m, m-1, ..., 0 with C(m, r) built incrementally
        for i in 0..=m {
            let r = m - i;
            acc += binom * shift.powi(i as i32) * self.get(r, d);
            binom = binom * r as f64 / (i + 1) as f64;
        }
        acc
    }

    /// Gram coefficient `<phi(. - k1), phi(. - k2)> = H_{0, k1 - k2}`.
    pub fn gram_coefficient(&self, k1: i64, k2: i64) -> f64 {
        self.get(0, k1 - k2)
    }
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub(crate) fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn compute_moments(mask: &RefinementMask, m_max: usize) -> Result<MomentTable> {
    let order = mask.order();
    let kmax = order.overlap_radius();
    let n = 2 * kmax as usize + 1;
    let taps = mask.nonzero();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m_max + 1);

    for m in 0..=m_max {
        let scale = (-((m + 1) as f64)).exp2();
        let mut system = vec![vec![0.0; n]; n];
        let mut rhs = vec![0.0; n];
        for k in -kmax..=kmax {
            let row = (k + kmax) as usize;
            system[row][row] += 1.0;
            for &(l1, a1) in &taps {
                for &(l2, a2) in &taps {
                    let kk = 2 * k + l1 - l2;
                    if kk.abs() > kmax {
                        continue;
                    }
                    let w = scale * a1 * a2;
                    let col = (kk + kmax) as usize;
                    system[row][col] -= w;
                    let shift = l2 as f64;
                    for (r, lower) in rows.iter().enumerate() {
                        rhs[row] += w * binomial(m, r) * shift.powi((m - r) as i32) * lower[col];
                    }
                }
            }
        }

        let h = if m == 0 {
            let v = null_vector(&system)?;
            let total: f64 = v.iter().sum();
            v.iter().map(|x| x / total).collect()
        } else {
            solve_checked(&system, &rhs, m)?
        };
        rows.push(project_parity(h, m));
    }

    Ok(MomentTable { order, rows })
}

/// `phi` is even, so row `m` has the parity of `m`; remove the rounding-level
/// asymmetry left by the solver.
fn project_parity(mut h: Vec<f64>, m: usize) -> Vec<f64> {
    let n = h.len();
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let v = 0.5 * (h[i] + sign * h[j]);
        h[i] = v;
        h[j] = sign * v;
    }
    if sign < 0.0 {
        h[n / 2] = 0.0;
    }
    h
}

fn solve_checked(system: &[Vec<f64>], rhs: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = system.len();
    let mat = Mat::from_fn(n, n, |i, j| system[i][j]);
    let lu = mat.partial_piv_lu();
    let inv = lu.solve(Mat::<f64>::identity(n, n));
    let norm1 = |f: &dyn Fn(usize, usize) -> f64| {
        (0..n)
            .map(|j| (0..n).map(|i| f(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let condition = norm1(&|i, j| mat[(i, j)]) * norm1(&|i, j| inv[(i, j)]);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularMoments { m, condition });
    }
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(b);
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::build_mask;

    fn table() -> MomentTable {
        compute_moments(&build_mask(ScaleOrder::new(4).unwrap()), 10).unwrap()
    }

    #[test]
    fn gram_row_matches_published_values() {
        let t = table();
        let expect = [
            8.00968e-1,
            1.37042e-1,
            -4.02449e-2,
            2.79513e-3,
            -7.59247e-5,
            -1.48291e-7,
        ];
        for (k, e) in expect.iter().enumerate() {
            let k = k as i64;
            assert!((t.get(0, k) - e).abs() < 5e-6 * e.abs().max(1e-6), "k = {k}");
            assert_eq!(t.get(0, k), t.get(0, -k));
        }
        let total: f64 = (-5..=5).map(|k| t.get(0, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_moments_match_published_values() {
        let t = table();
        for (m, e) in [
            (2, 9.07914e-2),
            (4, 4.38699e-2),
            (6, 5.92416e-2),
            (8, 1.28922e-1),
            (10, 3.32909e-1),
        ] {
            assert!((t.get(m, 0) - e).abs() < 5e-6, "m = {m}");
        }
    }

    #[test]
    fn parity_of_rows() {
        let t = table();
        for m in 0..=10usize {
            let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            for k in 0..=5 {
                let d = t.get(m, k) - sign * t.get(m, -k);
                assert!(d.abs() < 1e-13, "m = {m} k = {k}: {d}");
            }
        }
    }

    #[test]
    fn shift_moment_branches() {
        let t = table();
        assert_eq!(t.shift_moment(0, 3, 0).unwrap(), t.get(0, 3));
        let expect = t.get(2, 0) + 2.0 * t.get(1, 0) + t.get(0, 0);
        assert!((t.shift_moment(2, 1, 1).unwrap() - expect).abs() < 1e-15);
        assert_eq!(t.shift_moment(4, 10, 4).unwrap(), 0.0);
        assert_eq!(t.shift_moment(4, -2, 4).unwrap(), 0.0);
        assert!(matches!(
            t.shift_moment(11, 0, 0),
            Err(Error::MomentOrder { requested: 11, .. })
        ));
    }

    #[test]
    fn shift_moment_is_symmetric() {
        let t = table();
        for m in 0..=10 {
            for k1 in -7..=7 {
                for k2 in -7..=7 {
                    let a = t.shift_moment(m, k1, k2).unwrap();
                    let b = t.shift_moment(m, k2, k1).unwrap();
                    // the binomial sum cancels; compare against its term scale
                    let scale = (1.0 + k1.abs().max(k2.abs()) as f64).powi(m as i32);
                    assert!((a - b).abs() <= 1e-14 * scale, "{m} {k1} {k2}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn gram_coefficients() {
        let t = table();
        assert!((t.gram_coefficient(2, 2) - 8.00968e-1).abs() < 5e-7);
        assert!((t.gram_coefficient(5, 4) - 1.37042e-1).abs() < 5e-7);
        assert_eq!(t.gram_coefficient(10, 4), 0.0);
        assert_eq!(t.gram_coefficient(3, 9), 0.0);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(10, 10), 1.0);
    }
}
