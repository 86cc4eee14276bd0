//! Reconstruction and sampling of eigenfunctions
//! `psi(x) = sum_k c_k 2^{j/2} phi(2^j x - k)` on dyadic grids.

use std::io::Write;

use crate::assembly::SpectralProblem;
use crate::cascade::DyadicSamples;
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::{band_matvec, dot};

/// Default grid spacing `2^-10`.
pub const DEFAULT_DEPTH: u32 = 10;

/// Values below this fraction of the peak are ignored when fixing signs.
const SIGN_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    /// Grid points are `i / 2^depth`.
    pub depth: u32,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `|c^T B c - 1|`, zero for profiles not built from a coefficient vector.
    pub norm_certificate: f64,
}

impl SampledWavefunction {
    /// Symmetric grid `[-radius, radius]` with spacing `2^-depth`.
    pub fn from_fn(radius: i64, depth: u32, f: impl Fn(f64) -> f64) -> Self {
        let grid = dyadic_grid(radius, depth);
        let values = grid.iter().map(|&x| f(x)).collect();
        SampledWavefunction {
            depth,
            grid,
            values,
            norm_certificate: 0.0,
        }
    }

    pub fn spacing(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    /// Trapezoid estimate of `int psi^2`.
    pub fn trapezoid_norm(&self) -> f64 {
        trapezoid(&self.values.iter().map(|v| v * v).collect::<Vec<_>>(), self.spacing())
    }

    /// Rescale to unit trapezoid norm.
    pub fn normalized(mut self) -> Self {
        let n = self.trapezoid_norm().sqrt();
        for v in self.values.iter_mut() {
            *v /= n;
        }
        self
    }

    /// Apply the sign convention: first extremum outward from `x = 0` is positive.
    pub fn sign_fixed(mut self) -> Self {
        if outward_sign(&self.values) < 0.0 {
            for v in self.values.iter_mut() {
                *v = -*v;
            }
        }
        self
    }

    /// Interior sign changes, ignoring values below `tol * max|psi|`.
    pub fn sign_changes(&self, tol: f64) -> usize {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut last = 0.0;
        let mut count = 0;
        for &v in &self.values {
            if v.abs() <= tol * peak {
                continue;
            }
            if last != 0.0 && v.signum() != last {
                count += 1;
            }
            last = v.signum();
        }
        count
    }

    /// Keep every `2^(depth - coarser)`-th point.
    pub fn coarsen(&self, coarser: u32) -> Result<Self> {
        if coarser > self.depth {
            return Err(Error::GridMismatch(format!(
                "cannot coarsen depth {} to {coarser}",
                self.depth
            )));
        }
        let step = 1usize << (self.depth - coarser);
        Ok(SampledWavefunction {
            depth: coarser,
            grid: self.grid.iter().step_by(step).copied().collect(),
            values: self.values.iter().step_by(step).copied().collect(),
            norm_certificate: self.norm_certificate,
        })
    }
}

pub fn dyadic_grid(radius: i64, depth: u32) -> Vec<f64> {
    let m = radius << depth;
    let h = (-(depth as f64)).exp2();
    (-m..=m).map(|i| i as f64 * h).collect()
}

pub(crate) fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => h * (f[1..n - 1].iter().sum::<f64>() + 0.5 * (f[0] + f[n - 1])),
    }
}

/// Sign (+1 or -1) of the first significant extremum scanning from the
/// centre of `values` toward larger indices. `values` must be sampled on a
/// grid symmetric about zero with an odd number of points.
pub fn outward_sign(values: &[f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return 1.0;
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mid = n / 2;
    for i in mid..n {
        let v = values[i];
        if v.abs() <= SIGN_THRESHOLD * peak {
            continue;
        }
        let prev = if i == 0 { v } else { values[i - 1] };
        let next = if i + 1 == n { v } else { values[i + 1] };
        if (v - prev) * (next - v) <= 0.0 {
            return v.signum();
        }
    }
    1.0
}

/// Sample eigenstate `state` of `spectrum` on the grid of spacing `2^-depth`
/// over the problem domain.
pub fn reconstruct(
    spectrum: &Spectrum,
    state: usize,
    problem: &SpectralProblem,
    samples: &DyadicSamples,
    depth: u32,
) -> Result<SampledWavefunction> {
    let disc = &problem.disc;
    if state >= spectrum.len() {
        return Err(Error::InvalidArgument(format!(
            "state {state} not computed ({} available)",
            spectrum.len()
        )));
    }
    if depth < disc.level {
        return Err(Error::InvalidArgument(format!(
            "sampling depth {depth} is coarser than resolution level {}",
            disc.level
        )));
    }
    let shift = depth - disc.level;
    if samples.depth() < shift {
        return Err(Error::InvalidArgument(format!(
            "scaling function sampled to depth {}, need {shift}",
            samples.depth()
        )));
    }
    if samples.order() != disc.order {
        return Err(Error::OrderMismatch {
            what: "dyadic samples",
            expected: disc.order.get(),
            found: samples.order().get(),
        });
    }

    let c = &spectrum.eigenvectors[state];
    let amp = (disc.level as f64 / 2.0).exp2();
    let m = disc.radius << depth;
    let mut values = vec![0.0; (2 * m + 1) as usize];
    let reach = disc.order.support_radius() << shift;
    for (idx, k) in disc.indices().enumerate() {
        let ck = amp * c[idx];
        let centre = k << shift;
        for t in -reach..=reach {
            let i = centre + t;
            if (-m..=m).contains(&i) {
                values[(i + m) as usize] += ck * samples.value_at_level(t, shift);
            }
        }
    }

    let bc = band_matvec(problem.b.as_ref(), problem.bandwidth(), c);
    let norm_certificate = (dot(c, &bc) - 1.0).abs();

    Ok(SampledWavefunction {
        depth,
        grid: dyadic_grid(disc.radius, depth),
        values,
        norm_certificate,
    }
    .sign_fixed())
}

#[derive(Debug, Clone)]
pub struct Deviation {
    pub max: f64,
    pub pointwise: Vec<f64>,
    /// True if `g` was negated to align with `f`.
    pub flipped: bool,
}

/// Pointwise `|f - g|` after aligning the global sign of `g` with `f`.
pub fn deviation(f: &SampledWavefunction, g: &SampledWavefunction) -> Result<Deviation> {
    if f.grid.len() != g.grid.len() || f.grid.iter().zip(&g.grid).any(|(a, b)| a != b) {
        return Err(Error::GridMismatch(format!(
            "{} points at depth {} vs {} points at depth {}",
            f.grid.len(),
            f.depth,
            g.grid.len(),
            g.depth
        )));
    }
    let flipped = dot(&f.values, &g.values) < 0.0;
    let s = if flipped { -1.0 } else { 1.0 };
    let pointwise: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| (a - s * b).abs()).collect();
    let max = pointwise.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(Deviation {
        max,
        pointwise,
        flipped,
    })
}

/// Header fields written above the CSV columns.
#[derive(Debug, Clone)]
pub struct CsvMeta {
    pub potential: String,
    pub level: u32,
    pub order: u32,
    pub state: usize,
    pub energy: f64,
}

/// Write `x,psi[,psi_oracle,abs_dev]` with a `#` metadata line.
pub fn write_csv<W: Write>(
    out: &mut W,
    psi: &SampledWavefunction,
    oracle: Option<&SampledWavefunction>,
    meta: &CsvMeta,
) -> Result<()> {
    writeln!(
        out,
        "# potential=\"{}\" j={} N={} state={} E={:.16e}",
        meta.potential, meta.level, meta.order, meta.state, meta.energy
    )?;
    match oracle {
        None => {
            writeln!(out, "x,psi")?;
            for (x, v) in psi.grid.iter().zip(&psi.values) {
                writeln!(out, "{x:.16e},{v:.16e}")?;
            }
        }
        Some(g) => {
            let dev = deviation(psi, g)?;
            let s = if dev.flipped { -1.0 } else { 1.0 };
            writeln!(out, "x,psi,psi_oracle,abs_dev")?;
            for i in 0..psi.grid.len() {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    psi.grid[i],
                    psi.values[i],
                    s * g.values[i],
                    dev.pointwise[i]
                )?;
            }
        }
    }
    Ok(())
}
