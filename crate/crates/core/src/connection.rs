//! Second-derivative connection coefficients `L_k = <phi'', phi(. - k)>`.
//!
//! Substituting the refinement equation gives the homogeneous system
//! `L_k = 2 sum_{l1,l2} a_{l1} a_{l2} L_{2k + l2 - l1}`, whose one-dimensional
//! null space is pinned by `sum_k k^2 L_k = 2` (differentiate
//! `x^2 = sum_k k^2 phi(x - k)` twice and pair with `phi`).

use faer::Mat;
use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::mask::{rational_to_f64, RefinementMask, ScaleOrder};

/// Singular values below this mark a null direction in the float path.
pub const NULL_SINGULAR_TOL: f64 = 1e-10;

/// `L_k` for `|k| <= 2N - 3`; symmetric, so only `k >= 0` is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTable {
    order: ScaleOrder,
    exact: Option<Vec<BigRational>>,
    values: Vec<f64>,
}

impl ConnectionTable {
    pub fn order(&self) -> ScaleOrder {
        self.order
    }

    /// `L_k`; zero for `|k| >= 2N - 2`.
    pub fn get(&self, k: i64) -> f64 {
        self.values.get(k.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Exact `L_k` when the table was solved rationally.
    pub fn exact(&self, k: i64) -> Option<BigRational> {
        let e = self.exact.as_ref()?;
        Some(
            e.get(k.unsigned_abs() as usize)
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `L_0, L_1, ..., L_{2N-3}`.
    pub fn half_values(&self) -> &[f64] {
        &self.values
    }

    pub fn half_exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn from_exact(order: ScaleOrder, exact: Vec<BigRational>) -> Result<Self> {
        check_len(order, exact.len())?;
        let values = exact.iter().map(rational_to_f64).collect();
        Ok(ConnectionTable {
            order,
            exact: Some(exact),
            values,
        })
    }

    pub fn from_values(order: ScaleOrder, values: Vec<f64>) -> Result<Self> {
        check_len(order, values.len())?;
        Ok(ConnectionTable {
            order,
            exact: None,
            values,
        })
    }
}

fn check_len(order: ScaleOrder, len: usize) -> Result<()> {
    let want = order.overlap_radius() as usize + 1;
    if len != want {
        return Err(Error::InvalidArgument(format!(
            "connection table for N = {order} needs {want} entries, got {len}"
        )));
    }
    Ok(())
}

/// Rows of `(I - T) L = 0` restricted to the symmetric unknowns `L_0..L_K`.
fn homogeneous_rows<T, F>(mask: &RefinementMask, tap: F) -> Vec<Vec<T>>
where
    T: Clone + Zero + One + std::ops::AddAssign + std::ops::SubAssign,
    F: Fn(i64) -> T,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    let kmax = mask.order().overlap_radius();
    let r = mask.order().support_radius();
    let two = T::one() + T::one();
    (0..=kmax)
        .map(|k| {
            let mut row = vec![T::zero(); kmax as usize + 1];
            row[k as usize] += T::one();
            for l1 in -r..=r {
                let a1 = tap(l1);
                if a1.is_zero() {
                    continue;
                }
                for l2 in -r..=r {
                    let a2 = tap(l2);
                    if a2.is_zero() {
                        continue;
                    }
                    let idx = (2 * k + l2 - l1).abs();
                    if idx <= kmax {
                        row[idx as usize] -= &(&two * &a1) * &a2;
                    }
                }
            }
            row
        })
        .collect()
}

/// Solve for the connection table in exact rational arithmetic.
pub fn compute_connection(mask: &RefinementMask) -> Result<ConnectionTable> {
    let order = mask.order();
    let kmax = order.overlap_radius();
    let mut rows = homogeneous_rows(mask, |k| mask.exact(k));

    let rank = exact::rank(rows.clone());
    let unknowns = kmax as usize + 1;
    if rank + 1 != unknowns {
        return Err(Error::NullSpace { dim: unknowns - rank });
    }

    // sum over +-k of k^2 L_k = 2
    let norm: Vec<BigRational> = (0..=kmax)
        .map(|k| BigRational::from_integer((2 * k * k).into()))
        .collect();
    rows.push(norm);
    let mut rhs = vec![BigRational::zero(); unknowns];
    rhs.push(BigRational::from_integer(2.into()));

    let exact = exact::solve_unique(&rows, &rhs).ok_or(Error::NullSpace { dim: 0 })?;
    ConnectionTable::from_exact(order, exact)
}

/// Floating point route: null space from the singular value decomposition.
pub fn compute_connection_float(mask: &RefinementMask) -> Result<ConnectionTable> {
    let order = mask.order();
    let rows = homogeneous_rows(mask, |k| mask.get(k));
    let null = null_vector(&rows)?;
    let scale: f64 = null.iter().enumerate().map(|(k, v)| 2.0 * (k * k) as f64 * v).sum();
    let values = null.iter().map(|v| 2.0 * v / scale).collect();
    ConnectionTable::from_values(order, values)
}

/// Unit vector spanning the one-dimensional null space of a square matrix.
pub(crate) fn null_vector(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = rows.len();
    let m = Mat::from_fn(n, n, |i, j| rows[i][j]);
    let svd = m.svd().map_err(|_| Error::NoConvergence)?;
    let s = svd.S().column_vector();
    let dim = (0..n).filter(|&i| s[i] < NULL_SINGULAR_TOL).count();
    if dim != 1 {
        return Err(Error::NullSpace { dim });
    }
    let v = svd.V();
    Ok((0..n).map(|i| v[(i, n - 1)]).collect())
}

/// Residual of the refinement system at every `k in [0, 2N-3]`.
pub fn refinement_residuals(mask: &RefinementMask, table: &ConnectionTable) -> Vec<f64> {
    let kmax = mask.order().overlap_radius();
    let r = mask.order().support_radius();
    (0..=kmax)
        .map(|k| {
            let mut rhs = 0.0;
            for l1 in -r..=r {
                for l2 in -r..=r {
                    rhs += 2.0 * mask.get(l1) * mask.get(l2) * table.get(2 * k + l2 - l1);
                }
            }
            table.get(k) - rhs
        })
        .collect()
}
