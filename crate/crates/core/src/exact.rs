//! Small dense linear algebra over the rationals.

use num::{BigRational, Zero};

/// Reduce `rows` to reduced row echelon form in place and return the pivot
/// column of every nonzero row.
pub(crate) fn reduce(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    reduce(&mut rows).len()
}

/// Solve a (possibly overdetermined) consistent system `M x = b` with a
/// unique solution. Returns `None` if the system is inconsistent or
/// underdetermined.
pub(crate) fn solve_unique(matrix: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = matrix.first()?.len();
    let mut aug: Vec<Vec<BigRational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = reduce(&mut aug);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some(aug.iter().take(n).map(|row| row[n].clone()).collect())
}
