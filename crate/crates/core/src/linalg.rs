//! Banded factorizations used by the eigensolver.
//!
//! Matrices are read from dense `faer::Mat` storage; factors are kept in
//! band storage. A bandwidth of `n - 1` makes every routine fully dense.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `G` with `B = G G^T`, band storage
/// `rows[i][d] = G[i, i - d]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    band: usize,
    rows: Vec<Vec<f64>>,
}

impl BandCholesky {
    pub fn factor(b: MatRef<'_, f64>, band: usize) -> Result<Self> {
        let n = b.nrows();
        let band = band.min(n.saturating_sub(1));
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let lo = i.saturating_sub(band);
            let mut row = vec![0.0; i - lo + 1];
            for j in lo..=i {
                let mut s = b[(i, j)];
                let jlo = j.saturating_sub(band).max(lo);
                for k in jlo..j {
                    let gjk = if j == i { row[i - k] } else { rows[j][j - k] };
                    s -= row[i - k] * gjk;
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                    }
                    row[0] = s.sqrt();
                } else {
                    row[i - j] = s / rows[j][0];
                }
            }
            rows.push(row);
        }
        Ok(BandCholesky { n, band, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        // G[i, j] for i - band <= j <= i
        self.rows[i][i - j]
    }

    /// `x <- G^{-1} x`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_lower(&self, x: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.band);
            let mut s = x[i];
            for k in lo..i {
                s -= self.at(i, k) * x[k];
            }
            x[i] = s / self.rows[i][0];
        }
    }

    /// `x <- G^{-T} x`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_upper(&self, x: &mut [f64]) {
        for i in (0..self.n).rev() {
            let hi = (i + self.band).min(self.n - 1);
            let mut s = x[i];
            for k in i + 1..=hi {
                s -= self.at(k, i) * x[k];
            }
            x[i] = s / self.rows[i][0];
        }
    }

    /// `G^{-1} A G^{-T}`, symmetrized.
    pub fn congruence(&self, a: MatRef<'_, f64>) -> Mat<f64> {
        let n = self.n;
        // X = G^{-1} A, one column at a time; X is stored transposed
        let mut xt = vec![vec![0.0; n]; n];
        for (j, col) in xt.iter_mut().enumerate() {
            for i in 0..n {
                col[i] = a[(i, j)];
            }
            self.solve_lower(col);
        }
        // C = G^{-1} X^T; columns of X^T are the rows of X
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            let col = &mut c[i];
            for (j, x) in col.iter_mut().enumerate() {
                *x = xt[j][i];
            }
            self.solve_lower(col);
        }
        Mat::from_fn(n, n, |i, j| 0.5 * (c[j][i] + c[i][j]))
    }
}

/// Banded LU with partial pivoting for `M x = rhs`, `M` of lower and upper
/// bandwidth `band`. Zero pivots are replaced by a tiny multiple of the
/// matrix scale, which is what shifted inverse iteration needs.
pub fn solve_band_shifted(m: &dyn Fn(usize, usize) -> f64, n: usize, band: usize, rhs: &[f64]) -> Vec<f64> {
    let width = 3 * band + 1;
    // row i holds columns i - band ..= i + 2 band (fill-in from pivoting)
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..width)
                .map(|t| {
                    let j = i as i64 - band as i64 + t as i64;
                    if j < 0 || j >= n as i64 || (j - i as i64).unsigned_abs() as usize > band {
                        0.0
                    } else {
                        m(i, j as usize)
                    }
                })
                .collect()
        })
        .collect();
    let mut b = rhs.to_vec();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let col = |i: usize, j: usize| j + band - i;

    for k in 0..n {
        let last = (k + band).min(n - 1);
        let p = (k..=last)
            .max_by(|&x, &y| rows[x][col(x, k)].abs().total_cmp(&rows[y][col(y, k)].abs()))
            .unwrap();
        if p != k {
            // realign row p to row k's column offsets before swapping
            let mut tmp = vec![0.0; width];
            for (t, v) in tmp.iter_mut().enumerate() {
                let j = k as i64 - band as i64 + t as i64;
                if j >= 0 && (j as usize) + band >= p && (j as usize) + band - p < width {
                    *v = rows[p][col(p, j as usize)];
                }
            }
            let mut tmk = vec![0.0; width];
            for (t, v) in tmk.iter_mut().enumerate() {
                let j = p as i64 - band as i64 + t as i64;
                if j >= 0 && (j as usize) + band >= k && (j as usize) + band - k < width {
                    *v = rows[k][col(k, j as usize)];
                }
            }
            rows[k] = tmp;
            rows[p] = tmk;
            b.swap(k, p);
        }
        if rows[k][col(k, k)] == 0.0 {
            rows[k][col(k, k)] = f64::EPSILON * scale;
        }
        let pivot = rows[k][col(k, k)];
        let hi = (k + 2 * band).min(n - 1);
        for i in k + 1..=last {
            let f = rows[i][col(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            rows[i][col(i, k)] = 0.0;
            for j in k + 1..=hi {
                if j + band < i || j + band - i >= width {
                    continue;
                }
                let v = rows[k][col(k, j)];
                rows[i][col(i, j)] -= f * v;
            }
            b[i] -= f * b[k];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let hi = (i + 2 * band).min(n - 1);
        let mut s = b[i];
        for j in i + 1..=hi {
            s -= rows[i][col(i, j)] * x[j];
        }
        x[i] = s / rows[i][col(i, i)];
    }
    x
}

/// `y = M x` for a banded symmetric `M` stored densely.
pub fn band_matvec(m: MatRef<'_, f64>, band: usize, x: &[f64]) -> Vec<f64> {
    let n = m.nrows();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(band);
            let hi = (i + band).min(n - 1);
            (lo..=hi).map(|j| m[(i, j)] * x[j]).sum()
        })
        .collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, band: usize) -> Mat<f64> {
        Mat::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j);
            if d == 0 {
                4.0 + (i % 3) as f64
            } else if d <= band {
                1.0 / (1.0 + d as f64 + ((i + j) % 2) as f64)
            } else {
                0.0
            }
        })
    }

    #[test]
    fn cholesky_reconstructs_matrix() {
        let (n, band) = (12, 3);
        let b = spd(n, band);
        let g = BandCholesky::factor(b.as_ref(), band).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..=i.min(j) {
                    let gi = if i - k <= band { g.at(i, k) } else { 0.0 };
                    let gj = if j - k <= band { g.at(j, k) } else { 0.0 };
                    s += gi * gj;
                }
                assert!((s - b[(i, j)]).abs() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn cholesky_reports_pivot() {
        let mut b = spd(6, 1);
        b[(3, 3)] = -1.0;
        match BandCholesky::factor(b.as_ref(), 1) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triangular_solves_invert_factor() {
        let (n, band) = (10, 2);
        let b = spd(n, band);
        let g = BandCholesky::factor(b.as_ref(), band).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut y = band_matvec(b.as_ref(), band, &x);
        g.solve_lower(&mut y);
        g.solve_upper(&mut y);
        for (a, e) in y.iter().zip(&x) {
            assert!((a - e).abs() < 1e-13);
        }
    }

    #[test]
    fn banded_lu_solves_with_pivoting() {
        let n = 15;
        let band = 2;
        // indefinite, with a zero leading diagonal to force pivoting
        let m = Mat::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j);
            if d == 0 {
                if i == 0 {
                    0.0
                } else {
                    (i as f64) - 7.0
                }
            } else if d <= band {
                1.0 + 0.1 * (i + j) as f64
            } else {
                0.0
            }
        });
        let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.5).collect();
        let rhs = band_matvec(m.as_ref(), band, &x);
        let got = solve_band_shifted(&|i, j| m[(i, j)], n, band, &rhs);
        for (a, e) in got.iter().zip(&x) {
            assert!((a - e).abs() < 1e-11, "{a} vs {e}");
        }
    }
}
