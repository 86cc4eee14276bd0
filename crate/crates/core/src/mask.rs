//! Deslauriers-Dubuc refinement masks.
//!
//! The order-`N` interpolating scaling function satisfies the two-scale
//! relation `phi(x) = sum_k a_k phi(2x - k)` with `a_k` supported on
//! `[-N+1, N-1]`. Even taps are the Kronecker sequence; odd taps are the
//! Lagrange basis polynomials on the nodes `{-N/2+1, ..., N/2}` evaluated
//! at one half.

use std::fmt;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Order of the interpolating scaling function. Always even and at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScaleOrder(u32);

impl ScaleOrder {
    pub fn new(n: i64) -> Result<Self> {
        if n >= 2 && n % 2 == 0 && n <= u32::MAX as i64 {
            Ok(ScaleOrder(n as u32))
        } else {
            Err(Error::InvalidOrder(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Largest `|k|` with a (possibly) nonzero mask tap, `N - 1`.
    pub fn support_radius(self) -> i64 {
        self.0 as i64 - 1
    }

    /// Largest `|k|` for which two translates overlap, `2N - 3`.
    pub fn overlap_radius(self) -> i64 {
        2 * self.0 as i64 - 3
    }
}

impl Default for ScaleOrder {
    fn default() -> Self {
        ScaleOrder(4)
    }
}

impl fmt::Display for ScaleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<i64> for ScaleOrder {
    type Error = Error;
    fn try_from(n: i64) -> Result<Self> {
        ScaleOrder::new(n)
    }
}

/// Exact two-scale coefficients `a_k`, `k in [-N+1, N-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementMask {
    order: ScaleOrder,
    exact: Vec<BigRational>,
    values: Vec<f64>,
}

impl RefinementMask {
    pub fn order(&self) -> ScaleOrder {
        self.order
    }

    /// Exact coefficient `a_k`; zero outside the support.
    pub fn exact(&self, k: i64) -> BigRational {
        match self.slot(k) {
            Some(i) => self.exact[i].clone(),
            None => BigRational::zero(),
        }
    }

    pub fn get(&self, k: i64) -> f64 {
        self.slot(k).map_or(0.0, |i| self.values[i])
    }

    /// `(k, a_k)` over the full support, ascending in `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let r = self.order.support_radius();
        (-r..=r).zip(self.values.iter().copied())
    }

    pub fn iter_exact(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        let r = self.order.support_radius();
        (-r..=r).zip(self.exact.iter())
    }

    /// Taps with nonzero coefficient.
    pub fn nonzero(&self) -> Vec<(i64, f64)> {
        self.iter().filter(|(_, a)| *a != 0.0).collect()
    }

    /// Rebuild a mask from stored exact entries (used by the table cache).
    pub fn from_exact(order: ScaleOrder, exact: Vec<BigRational>) -> Result<Self> {
        let expected = 2 * order.support_radius() as usize + 1;
        if exact.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "mask for N = {order} needs {expected} entries, got {}",
                exact.len()
            )));
        }
        let values = exact.iter().map(rational_to_f64).collect();
        Ok(RefinementMask { order, exact, values })
    }

    fn slot(&self, k: i64) -> Option<usize> {
        let r = self.order.support_radius();
        (-r..=r).contains(&k).then(|| (k + r) as usize)
    }
}

/// Build the order-`N` mask in exact rational arithmetic.
pub fn build_mask(order: ScaleOrder) -> RefinementMask {
    let n = order.get() as i64;
    let r = order.support_radius();
    let mut exact = vec![BigRational::zero(); (2 * r + 1) as usize];
    exact[r as usize] = BigRational::one();

    let nodes: Vec<i64> = (-n / 2 + 1..=n / 2).collect();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    for &i in &nodes {
        let mut l = BigRational::one();
        for &m in nodes.iter().filter(|&&m| m != i) {
            l *= (&half - BigRational::from_integer(m.into())) / BigRational::from_integer((i - m).into());
        }
        exact[(1 - 2 * i + r) as usize] = l;
    }

    let values = exact.iter().map(rational_to_f64).collect();
    RefinementMask { order, exact, values }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    // BigRational::to_f64 rounds correctly for the dyadic values used here.
    q.to_f64().unwrap_or(f64::NAN)
}
