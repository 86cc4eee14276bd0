//! Cascade evaluation of the scaling function on dyadic grids.
//!
//! Integers are seeded with the Kronecker sequence, then each level is
//! obtained from the previous one through the refinement equation. All
//! arithmetic is exact; floating point copies are produced once at the end.

use num::{BigRational, One, Zero};

use crate::mask::{rational_to_f64, RefinementMask, ScaleOrder};

/// Values of `phi(k / 2^depth)` for every dyadic point in the support.
#[derive(Debug, Clone)]
pub struct DyadicSamples {
    order: ScaleOrder,
    depth: u32,
    exact: Vec<BigRational>,
    values: Vec<f64>,
}

impl DyadicSamples {
    pub fn order(&self) -> ScaleOrder {
        self.order
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Largest numerator `k` with `k / 2^depth` inside the support.
    pub fn max_index(&self) -> i64 {
        self.order.support_radius() << self.depth
    }

    /// `phi(k / 2^depth)`; exactly zero outside the support.
    pub fn value(&self, k: i64) -> f64 {
        self.slot(k).map_or(0.0, |i| self.values[i])
    }

    pub fn exact(&self, k: i64) -> BigRational {
        self.slot(k).map_or_else(BigRational::zero, |i| self.exact[i].clone())
    }

    /// `phi(k / 2^level)` for a coarser `level <= depth`.
    pub fn value_at_level(&self, k: i64, level: u32) -> f64 {
        assert!(level <= self.depth, "level {level} finer than samples");
        self.value(k << (self.depth - level))
    }

    /// `(x, phi(x))` pairs over the support, ascending in `x`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = self.max_index();
        let h = (-(self.depth as f64)).exp2();
        (-m..=m).zip(self.values.iter()).map(move |(k, &v)| (k as f64 * h, v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn slot(&self, k: i64) -> Option<usize> {
        let m = self.max_index();
        (-m..=m).contains(&k).then(|| (k + m) as usize)
    }
}

/// Evaluate `phi` at all points `k / 2^depth` of its support.
pub fn eval_phi_dyadic(mask: &RefinementMask, depth: u32) -> DyadicSamples {
    let order = mask.order();
    let r = order.support_radius();
    let taps: Vec<(i64, BigRational)> = mask
        .iter_exact()
        .filter(|(_, a)| !a.is_zero())
        .map(|(k, a)| (k, a.clone()))
        .collect();

    // depth 0: Kronecker sequence on the integers
    let mut level: Vec<BigRational> = (-r..=r)
        .map(|k| {
            if k == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();

    for d in 1..=depth {
        let prev_max = r << (d - 1);
        let max = r << d;
        let half = 1i64 << (d - 1);
        let mut next = Vec::with_capacity((2 * max + 1) as usize);
        for k in -max..=max {
            if k % 2 == 0 {
                // a_{2i} = delta_{i0}, so even points carry over unchanged
                next.push(level[(k / 2 + prev_max) as usize].clone());
                continue;
            }
            // phi(k/2^d) = sum_l a_l phi((k - l 2^(d-1)) / 2^(d-1))
            let mut acc = BigRational::zero();
            for (l, a) in &taps {
                let idx = k - l * half;
                if (-prev_max..=prev_max).contains(&idx) {
                    let v = &level[(idx + prev_max) as usize];
                    if !v.is_zero() {
                        acc += a * v;
                    }
                }
            }
            next.push(acc);
        }
        level = next;
    }

    let values = level.iter().map(rational_to_f64).collect();
    DyadicSamples {
        order,
        depth,
        exact: level,
        values,
    }
}
