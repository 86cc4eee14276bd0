//! Symmetric-definite generalized eigensolver.
//!
//! `B = G G^T` (banded Cholesky), `C = G^{-1} A G^{-T}` is diagonalized
//! densely, and `c = G^{-T} y`. Each requested pair is then polished by
//! shifted inverse iteration on the banded pencil and its eigenvalue is
//! taken as the Rayleigh quotient, which removes the `eps * ||A||` error
//! the dense solve leaves on the low end of a strongly graded spectrum.

use faer::{MatRef, Side};

use crate::assembly::SpectralProblem;
use crate::error::{Error, Result};
use crate::linalg::{band_matvec, dot, solve_band_shifted, BandCholesky};
use crate::wavefunction::outward_sign;

/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-9;

/// Inverse-iteration sweeps applied to each pair.
const REFINE_SWEEPS: usize = 2;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// B-orthonormal coefficient vectors, one per eigenvalue.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `||A c - E B c||_2` per pair.
    pub residuals: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Lowest `n_states` eigenpairs of an assembled problem.
pub fn solve_generalized(problem: &SpectralProblem, n_states: usize) -> Result<Spectrum> {
    let n = problem.dimension();
    check_states(n_states, n)?;
    let band = problem.bandwidth();
    let (a, b) = (problem.a.as_ref(), problem.b.as_ref());

    let (mut values, mut vectors) = reduce_and_solve(a, b, band, n_states)?;

    for (e, c) in values.iter_mut().zip(vectors.iter_mut()) {
        let shift = *e;
        for _ in 0..REFINE_SWEEPS {
            let rhs = band_matvec(b, band, c);
            let x = solve_band_shifted(&|i, j| a[(i, j)] - shift * b[(i, j)], n, band, &rhs);
            let norm = dot(&x, &band_matvec(b, band, &x)).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            *c = x.into_iter().map(|v| v / norm).collect();
        }
        *e = rayleigh_quotient(problem, c);
    }

    // refinement can reorder nearly equal values
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors: Vec<Vec<f64>> = order.into_iter().map(|i| std::mem::take(&mut vectors[i])).collect();

    orthonormalize_clusters(&values, &mut vectors, &|x| band_matvec(b, band, x));
    finish(values, vectors, &|x| band_matvec(a, band, x), &|x| {
        band_matvec(b, band, x)
    })
}

/// Lowest `n_states` eigenpairs of an arbitrary dense symmetric pair with
/// `B` positive definite. No banded refinement.
pub fn solve_dense(a: MatRef<'_, f64>, b: MatRef<'_, f64>, n_states: usize) -> Result<Spectrum> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::InvalidArgument(
            "matrix pair must be square and equal-sized".into(),
        ));
    }
    check_states(n_states, n)?;
    let band = n.saturating_sub(1);
    let (values, mut vectors) = reduce_and_solve(a, b, band, n_states)?;
    let bmul = |x: &[f64]| band_matvec(b, band, x);
    orthonormalize_clusters(&values, &mut vectors, &bmul);
    finish(values, vectors, &|x| band_matvec(a, band, x), &bmul)
}

fn check_states(n_states: usize, n: usize) -> Result<()> {
    if n_states == 0 || n_states > n {
        return Err(Error::InvalidArgument(format!(
            "requested {n_states} states from a problem of dimension {n}"
        )));
    }
    Ok(())
}

fn reduce_and_solve(
    a: MatRef<'_, f64>,
    b: MatRef<'_, f64>,
    band: usize,
    n_states: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let g = BandCholesky::factor(b, band)?;
    let c = g.congruence(a);
    let evd = c.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = c.nrows();
    let mut values = Vec::with_capacity(n_states);
    let mut vectors = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let mut y: Vec<f64> = (0..n).map(|i| u[(i, k)]).collect();
        g.solve_upper(&mut y);
        values.push(s[k]);
        vectors.push(y);
    }
    Ok((values, vectors))
}

/// `c^T A c / c^T B c`, with the kinetic part summed in second-difference
/// form so the large Toeplitz entries cancel before rounding.
pub fn rayleigh_quotient(problem: &SpectralProblem, c: &[f64]) -> f64 {
    let band = problem.bandwidth();
    let n = c.len();
    let at = |i: i64| if i < 0 || i >= n as i64 { 0.0 } else { c[i as usize] };
    let stencil = problem.kinetic_stencil();
    let mut kinetic = 0.0;
    for i in 0..n as i64 {
        let mut s = 0.0;
        for (d, w) in stencil.iter().enumerate().skip(1) {
            let d = d as i64;
            s += w * (at(i + d) - 2.0 * at(i) + at(i - d));
        }
        kinetic += at(i) * s;
    }
    let mut potential = 0.0;
    for (i, row) in problem.potential_band().iter().enumerate() {
        for (d, v) in row.iter().enumerate() {
            let term = v * c[i] * c[i + d];
            potential += if d == 0 { term } else { 2.0 * term };
        }
    }
    let gram = dot(c, &band_matvec(problem.b.as_ref(), band, c));
    (kinetic + potential) / gram
}

/// B-Gram-Schmidt inside clusters, then B-normalization and sign fixing.
fn orthonormalize_clusters(values: &[f64], vectors: &mut [Vec<f64>], bmul: &dyn Fn(&[f64]) -> Vec<f64>) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let bj = bmul(&vectors[j]);
                let p = dot(&vectors[i], &bj);
                let (head, tail) = vectors.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= p * y;
                }
            }
            let norm = dot(&vectors[i], &bmul(&vectors[i])).sqrt();
            for x in vectors[i].iter_mut() {
                *x /= norm;
            }
            if outward_sign(&vectors[i]) < 0.0 {
                for x in vectors[i].iter_mut() {
                    *x = -*x;
                }
            }
        }
        start = end;
    }
}

fn finish(
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    amul: &dyn Fn(&[f64]) -> Vec<f64>,
    bmul: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Result<Spectrum> {
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(e, c)| {
            let ac = amul(c);
            let bc = bmul(c);
            ac.iter().zip(&bc).map(|(x, y)| (x - e * y).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        residuals,
    })
}
