use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{PotentialForm, RunConfig};
use crate::assembly::{assemble, make_discretization, PolynomialPotential};
use crate::cache::{default_cache_dir, load_or_compute, CacheStatus, TableBundle};
use crate::eigen::solve_generalized;
use crate::error::{Error, Result};
use crate::mask::ScaleOrder;
use crate::oracle::{numerov_states, qes_ground_profile, reference_suite, Column, Family, ReferenceCase};
use crate::solver::{solve, Solution};
use crate::wavefunction::{deviation, reconstruct, write_csv, CsvMeta, SampledWavefunction};

/// Finite-difference oracle depth; finer grids lose accuracy to rounding.
const ORACLE_DEPTH: u32 = 11;

/// What a command produced: text for stdout and whether a tolerance broke.
#[derive(Debug, Default)]
pub struct Report {
    pub text: String,
    pub breach: bool,
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn toml_list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| sci(*v)).collect();
    format!("[{}]", items.join(", "))
}

pub fn tables_for(config: &RunConfig, order: ScaleOrder, m_max: usize) -> Result<TableBundle> {
    if !config.use_cache {
        return TableBundle::compute(order, m_max);
    }
    let dir = config.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let (bundle, status) = load_or_compute(&dir, order, m_max)?;
    match status {
        CacheStatus::Replaced(reason) => eprintln!("warning: rebuilt table cache ({reason})"),
        CacheStatus::Unwritable(reason) => eprintln!("warning: table cache not written ({reason})"),
        CacheStatus::Hit | CacheStatus::Stored => {}
    }
    Ok(bundle)
}

fn pool(config: &RunConfig) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.workers {
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_solve(config: &RunConfig, machine: bool, wavefunctions: bool) -> Result<Report> {
    let tables = tables_for(config, config.order, config.m_max)?;
    let t0 = Instant::now();
    let disc = make_discretization(config.level, config.radius, config.order)?;
    let problem = assemble(&config.potential, &disc, &tables.connection, &tables.moments)?;
    let t_assemble = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let spectrum = solve_generalized(&problem, config.n_states)?;
    let t_solve = t1.elapsed().as_secs_f64();

    let mut summary = String::new();
    writeln!(summary, "potential = \"{}\"", config.potential_label()).unwrap();
    writeln!(summary, "order = {}", config.order).unwrap();
    writeln!(summary, "level = {}", config.level).unwrap();
    writeln!(summary, "radius = {}", sci(config.radius)).unwrap();
    writeln!(summary, "dimension = {}", problem.dimension()).unwrap();
    writeln!(summary, "energies = {}", toml_list(&spectrum.eigenvalues)).unwrap();
    writeln!(summary, "residuals = {}", toml_list(&spectrum.residuals)).unwrap();
    writeln!(summary, "assemble_seconds = {}", sci(t_assemble)).unwrap();
    writeln!(summary, "solve_seconds = {}", sci(t_solve)).unwrap();

    let solution = Solution { problem, spectrum };
    if let Some(dir) = &config.output {
        ensure_dir(dir)?;
        fs::write(dir.join("solve.toml"), &summary)?;
        if wavefunctions {
            write_wavefunctions(config, &tables, &solution, dir)?;
        }
    }
    Ok(Report {
        text: if machine {
            summary
        } else {
            human_solve(config, &solution, t_assemble, t_solve)
        },
        breach: false,
    })
}

fn human_solve(config: &RunConfig, s: &Solution, t_assemble: f64, t_solve: f64) -> String {
    let mut out = String::new();
    writeln!(out, "potential  {}", config.potential_label()).unwrap();
    writeln!(
        out,
        "N = {}, j = {}, R = {}, dimension {}",
        config.order,
        config.level,
        config.radius,
        s.problem.dimension()
    )
    .unwrap();
    writeln!(out, "{:>3}  {:>20}  {:>9}", "n", "E_n", "residual").unwrap();
    for (n, (e, r)) in s.spectrum.eigenvalues.iter().zip(&s.spectrum.residuals).enumerate() {
        writeln!(out, "{n:>3}  {e:>20.13}  {r:>9.2e}").unwrap();
    }
    writeln!(out, "assembly {t_assemble:.2} s, eigensolve {t_solve:.2} s").unwrap();
    out
}

pub fn cmd_convergence(config: &RunConfig) -> Result<Report> {
    let levels: Vec<u32> = config.levels.clone().collect();
    if levels.len() < 2 {
        return Err(Error::InvalidArgument(
            "convergence needs a level range with at least two levels".into(),
        ));
    }
    let tables = tables_for(config, config.order, config.m_max)?;
    let energies: Vec<f64> = pool(config)?.install(|| {
        levels
            .par_iter()
            .map(|&j| {
                Ok(solve(&tables, &config.potential, j, config.radius, 1)?
                    .spectrum
                    .eigenvalues[0])
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let deltas: Vec<f64> = energies.windows(2).map(|w| w[0] - w[1]).collect();
    let flagged: Vec<bool> = (0..deltas.len())
        .map(|i| i > 0 && deltas[i].abs() > deltas[i - 1].abs())
        .collect();

    let mut out = String::new();
    writeln!(out, "potential  {}", config.potential_label()).unwrap();
    writeln!(out, "{:>3}  {:>22}  {:>10}", "j", "E^j", "dE_j").unwrap();
    let mut csv = String::from("level,energy,delta\n");
    for (i, (&j, &e)) in levels.iter().zip(&energies).enumerate() {
        if i == 0 {
            writeln!(out, "{j:>3}  {e:>22.16}  {:>10}", "").unwrap();
            writeln!(csv, "{j},{},", sci(e)).unwrap();
        } else {
            let d = deltas[i - 1];
            let mark = if flagged[i - 1] { "  non-monotone" } else { "" };
            writeln!(out, "{j:>3}  {e:>22.16}  {d:>10.2e}{mark}").unwrap();
            writeln!(csv, "{j},{},{}", sci(e), sci(d)).unwrap();
        }
    }
    if flagged.iter().any(|f| *f) {
        writeln!(out, "warning: |dE_j| is not monotonically decreasing").unwrap();
    }
    if let Some(dir) = &config.output {
        ensure_dir(dir)?;
        fs::write(dir.join("convergence.csv"), csv)?;
    }
    Ok(Report {
        text: out,
        breach: false,
    })
}

pub fn cmd_tables(config: &RunConfig) -> Result<Report> {
    let tables = tables_for(config, config.order, config.m_max)?;
    let n = config.order.get() as i64;
    let mut out = String::new();
    writeln!(out, "N = {n}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "refinement mask a_k = a_-k").unwrap();
    for k in (-(n - 1)..=0).rev() {
        let a = tables.mask.exact(k);
        writeln!(out, "{k:>4}  {:>12}  {:>24}", a.to_string(), sci(tables.mask.get(k))).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "connection coefficients L_k = L_-k").unwrap();
    let kmax = config.order.overlap_radius();
    for k in (-kmax..=0).rev() {
        let exact = tables
            .connection
            .exact(k)
            .map(|q| q.to_string())
            .unwrap_or_else(|| "-".into());
        writeln!(out, "{k:>4}  {exact:>12}  {:>24}", sci(tables.connection.get(k))).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "moments H_(m,k), H_(m,-k) = (-1)^m H_(m,k)").unwrap();
    write!(out, "{:>4}", "m\\k").unwrap();
    for k in (-kmax..=0).rev() {
        write!(out, "  {k:>12}").unwrap();
    }
    writeln!(out).unwrap();
    for m in 0..=tables.m_max() {
        write!(out, "{m:>4}").unwrap();
        for k in (-kmax..=0).rev() {
            write!(out, "  {:>12.5e}", tables.moments.get(m, k)).unwrap();
        }
        writeln!(out).unwrap();
    }
    Ok(Report {
        text: out,
        breach: false,
    })
}

/// Which reference records `compare` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CaseSet {
    All,
    Qes,
    Exact,
    Sextic,
    Decatic,
}

impl CaseSet {
    fn admits(self, c: &ReferenceCase) -> bool {
        match self {
            CaseSet::All => true,
            CaseSet::Qes => c.label.starts_with("qes-"),
            CaseSet::Exact => c.label.starts_with("exact-"),
            CaseSet::Sextic => c.label.starts_with("sextic-"),
            CaseSet::Decatic => c.label.starts_with("decatic-"),
        }
    }
}

/// Acceptance bound for a reference record, or `None` if it is reported only.
pub fn tolerance(case: &ReferenceCase) -> Option<f64> {
    match (case.column, case.family) {
        (Column::Exact, _) if case.label.starts_with("qes-") => Some(1e-11),
        (Column::Exact, _) => Some(3e-11),
        (Column::Scm, Family::Sextic) => Some(2e-11),
        (Column::Scm, Family::Decatic) => Some(2e-9),
        (Column::Ddipsf(3), _) => Some(1e-5),
        (Column::Ddipsf(5), _) => Some(1e-8),
        (Column::Ddipsf(_), _) => None,
    }
}

/// Level at which a record is evaluated.
fn case_level(case: &ReferenceCase, default: u32) -> u32 {
    match case.column {
        Column::Ddipsf(j) => j,
        _ => default,
    }
}

pub fn cmd_compare(config: &RunConfig, set: CaseSet) -> Result<Report> {
    let cases: Vec<ReferenceCase> = reference_suite().into_iter().filter(|c| set.admits(c)).collect();
    let tables = tables_for(config, config.order, config.m_max.max(10))?;

    // one solve per (potential, level), in first-appearance order
    let mut jobs: BTreeMap<(String, u32), (usize, PolynomialPotential, usize)> = BTreeMap::new();
    for (i, c) in cases.iter().enumerate() {
        let key = (format!("{:?}", c.params), case_level(c, config.level));
        let e = jobs.entry(key).or_insert((i, c.potential.clone(), 0));
        e.2 = e.2.max(c.state + 1);
    }
    let mut jobs: Vec<_> = jobs.into_iter().collect();
    jobs.sort_by_key(|(_, (first, _, _))| *first);
    let solved: Vec<Vec<f64>> = pool(config)?.install(|| {
        jobs.par_iter()
            .map(|((_, level), (_, pot, n))| Ok(solve(&tables, pot, *level, config.radius, *n)?.spectrum.eigenvalues))
            .collect::<Result<Vec<_>>>()
    })?;
    let lookup: BTreeMap<&(String, u32), &Vec<f64>> = jobs.iter().map(|(k, _)| k).zip(solved.iter()).collect();

    let mut out = String::new();
    writeln!(
        out,
        "{:<15} {:<10} {:>2} {:>21} {:>21} {:>10} {:>8}  status",
        "case", "column", "j", "computed", "reference", "diff", "tol"
    )
    .unwrap();
    let mut csv = String::from("label,column,level,state,computed,reference,difference,tolerance,status\n");
    let mut breach = false;
    for c in &cases {
        let level = case_level(c, config.level);
        let e = lookup[&(format!("{:?}", c.params), level)][c.state];
        let diff = e - c.reference_energy;
        let tol = tolerance(c);
        let status = match tol {
            Some(t) if diff.abs() <= t => "pass",
            Some(_) => {
                breach = true;
                "FAIL"
            }
            None => "info",
        };
        let tol_text = tol.map_or("-".to_string(), |t| format!("{t:.0e}"));
        writeln!(
            out,
            "{:<15} {:<10} {:>2} {:>21.16} {:>21.16} {:>10.2e} {:>8}  {status}",
            c.label,
            c.column.to_string(),
            level,
            e,
            c.reference_energy,
            diff,
            tol_text
        )
        .unwrap();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{status}",
            c.label,
            c.column,
            level,
            c.state,
            sci(e),
            sci(c.reference_energy),
            sci(diff),
            tol.map_or(String::new(), sci)
        )
        .unwrap();
    }
    if let Some(dir) = &config.output {
        ensure_dir(dir)?;
        fs::write(dir.join("compare.csv"), csv)?;
    }
    Ok(Report { text: out, breach })
}

/// Closed-form ground state when `V` is the quasi-exactly-solvable sextic.
fn qes_parameters(config: &RunConfig) -> Option<(f64, f64)> {
    if config.form != PotentialForm::Sextic {
        return None;
    }
    let [a, b, c] = config.coefficients[..] else {
        return None;
    };
    if !(c > 0.0) {
        return None;
    }
    let expect = b * b / (4.0 * c) - 3.0 * c.sqrt();
    ((a - expect).abs() <= 1e-14 * (1.0 + expect.abs())).then_some((b, c))
}

fn oracle_profiles(config: &RunConfig) -> Result<Vec<SampledWavefunction>> {
    let depth = config.depth.max(ORACLE_DEPTH);
    let radius = config.radius as i64;
    let fd = numerov_states(&config.potential, radius, depth, config.n_states)?;
    let mut profiles: Vec<SampledWavefunction> = fd.iter().map(|p| p.coarsen(config.depth)).collect::<Result<_>>()?;
    if let Some((b, c)) = qes_parameters(config) {
        let q = qes_ground_profile(b, c, &profiles[0].grid)?;
        profiles[0] = SampledWavefunction {
            values: q.values,
            ..profiles[0].clone()
        }
        .normalized()
        .sign_fixed();
    }
    Ok(profiles)
}

fn write_wavefunctions(
    config: &RunConfig,
    tables: &TableBundle,
    solution: &Solution,
    dir: &Path,
) -> Result<Vec<Option<f64>>> {
    if config.radius.fract() != 0.0 {
        return Err(Error::InvalidArgument(
            "wavefunction export needs an integer radius".into(),
        ));
    }
    let level = solution.problem.disc.level;
    let samples = tables.samples(config.depth.saturating_sub(level));
    let oracles = if config.oracle {
        Some(oracle_profiles(config)?)
    } else {
        None
    };
    let mut devs = Vec::new();
    for state in 0..solution.spectrum.len() {
        let psi = reconstruct(&solution.spectrum, state, &solution.problem, &samples, config.depth)?;
        let oracle = oracles.as_ref().map(|o| &o[state]);
        devs.push(oracle.map(|g| deviation(&psi, g)).transpose()?.map(|d| d.max));
        let meta = CsvMeta {
            potential: config.potential_label(),
            level,
            order: config.order.get(),
            state,
            energy: solution.spectrum.eigenvalues[state],
        };
        let mut file = std::io::BufWriter::new(fs::File::create(dir.join(format!("psi_{state}.csv")))?);
        write_csv(&mut file, &psi, oracle, &meta)?;
        file.flush()?;
    }
    Ok(devs)
}

pub fn cmd_wavefunction(config: &RunConfig) -> Result<Report> {
    let dir = config.output.clone().unwrap_or_else(|| ".".into());
    ensure_dir(&dir)?;
    let tables = tables_for(config, config.order, config.m_max)?;
    let solution = solve(&tables, &config.potential, config.level, config.radius, config.n_states)?;
    let devs = write_wavefunctions(config, &tables, &solution, &dir)?;
    let mut out = String::new();
    writeln!(out, "potential  {}", config.potential_label()).unwrap();
    writeln!(out, "{:>3}  {:>20}  {:>12}  file", "n", "E_n", "max |dev|").unwrap();
    for (n, dev) in devs.iter().enumerate() {
        let d = dev.map_or("-".to_string(), |d| format!("{d:.3e}"));
        writeln!(
            out,
            "{n:>3}  {:>20.13}  {d:>12}  {}",
            solution.spectrum.eigenvalues[n],
            dir.join(format!("psi_{n}.csv")).display()
        )
        .unwrap();
    }
    Ok(Report {
        text: out,
        breach: false,
    })
}
