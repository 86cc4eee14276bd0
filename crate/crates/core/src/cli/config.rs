//! Run configuration: a TOML file overlaid by command-line flags.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::assembly::{PolynomialPotential, DEFAULT_RADIUS};
use crate::error::{Error, Result};
use crate::mask::ScaleOrder;
use crate::moments::DEFAULT_M_MAX;
use crate::wavefunction::DEFAULT_DEPTH;

pub const DEFAULT_LEVEL: u32 = 7;

/// Settings shared by all subcommands. Every field may also come from the
/// file given with `--config`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with any of the settings below
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Potential form: sextic (a b c), decatic (a b c d e) or general (c0 c1 c2 ...)
    #[arg(long)]
    pub potential: Option<String>,

    /// Potential coefficients, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    pub coeffs: Option<Vec<f64>>,

    /// Scaling function order N (even, >= 2)
    #[arg(short = 'N', long)]
    pub order: Option<i64>,

    /// Resolution level j
    #[arg(short = 'j', long)]
    pub level: Option<u32>,

    /// Level range for convergence studies, e.g. 3..7
    #[arg(long, value_name = "LO..HI")]
    pub levels: Option<String>,

    /// Domain half-width R
    #[arg(short = 'R', long)]
    pub radius: Option<f64>,

    /// Number of eigenpairs to report
    #[arg(short = 'n', long)]
    pub states: Option<usize>,

    /// Wavefunction sampling depth (grid spacing 2^-depth)
    #[arg(long)]
    pub depth: Option<u32>,

    /// Highest monomial degree in the moment tables
    #[arg(long)]
    pub m_max: Option<usize>,

    /// Directory for summaries and CSV files
    #[arg(short = 'o', long, value_name = "DIR")]
    pub output: Option<PathBuf>,

    /// Compare against the independent oracles
    #[arg(long)]
    pub oracle: bool,

    /// Worker threads for independent cases (default: all cores)
    #[arg(long)]
    pub workers: Option<usize>,

    /// Table cache directory (default from IPSF_CACHE_DIR or the user cache)
    #[arg(long, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Recompute tables instead of using the cache
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    potential: Option<String>,
    coefficients: Option<Vec<f64>>,
    order: Option<i64>,
    level: Option<u32>,
    levels: Option<String>,
    radius: Option<f64>,
    states: Option<usize>,
    depth: Option<u32>,
    m_max: Option<usize>,
    output: Option<PathBuf>,
    oracle: Option<bool>,
    workers: Option<usize>,
    cache_dir: Option<PathBuf>,
    no_cache: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialForm {
    Sextic,
    Decatic,
    General,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub form: PotentialForm,
    /// Coefficients as given, in the convention of `form`.
    pub coefficients: Vec<f64>,
    pub potential: PolynomialPotential,
    pub order: ScaleOrder,
    pub level: u32,
    pub levels: RangeInclusive<u32>,
    pub radius: f64,
    pub n_states: usize,
    pub depth: u32,
    pub m_max: usize,
    pub output: Option<PathBuf>,
    pub oracle: bool,
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub use_cache: bool,
}

impl RunConfig {
    pub fn resolve(args: &ConfigArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };

        let form = match args
            .potential
            .as_deref()
            .or(file.potential.as_deref())
            .unwrap_or("sextic")
        {
            "sextic" => PotentialForm::Sextic,
            "decatic" => PotentialForm::Decatic,
            "general" => PotentialForm::General,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown potential form `{other}` (expected sextic, decatic or general)"
                )))
            }
        };
        let coefficients = args.coeffs.clone().or(file.coefficients).unwrap_or_else(|| match form {
            PotentialForm::Sextic => vec![1.0, 1.0, 1.0],
            PotentialForm::Decatic => vec![1.0; 5],
            PotentialForm::General => vec![0.0, 0.0, 1.0],
        });
        let potential = build_potential(form, &coefficients)?;

        let order = ScaleOrder::new(args.order.or(file.order).unwrap_or(4))?;
        let level = args.level.or(file.level).unwrap_or(DEFAULT_LEVEL);
        let levels = match args.levels.as_deref().or(file.levels.as_deref()) {
            Some(s) => parse_levels(s)?,
            None => 3..=level,
        };
        let radius = args.radius.or(file.radius).unwrap_or(DEFAULT_RADIUS as f64);
        let n_states = args.states.or(file.states).unwrap_or(1);
        if n_states == 0 {
            return Err(Error::InvalidArgument("states must be at least 1".into()));
        }
        let depth = args.depth.or(file.depth).unwrap_or(DEFAULT_DEPTH);
        let m_max = args
            .m_max
            .or(file.m_max)
            .unwrap_or(DEFAULT_M_MAX)
            .max(potential.degree());
        let workers = args.workers.or(file.workers);
        if workers == Some(0) {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }

        Ok(RunConfig {
            form,
            coefficients,
            potential,
            order,
            level,
            levels,
            radius,
            n_states,
            depth,
            m_max,
            output: args.output.clone().or(file.output),
            oracle: args.oracle || file.oracle.unwrap_or(false),
            workers,
            cache_dir: args.cache_dir.clone().or(file.cache_dir),
            use_cache: !(args.no_cache || file.no_cache.unwrap_or(false)),
        })
    }

    pub fn potential_label(&self) -> String {
        let name = match self.form {
            PotentialForm::Sextic => "sextic",
            PotentialForm::Decatic => "decatic",
            PotentialForm::General => "general",
        };
        let list: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        format!("{name}({})", list.join(","))
    }
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => e.into(),
    })?;
    toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {}", path.display(), e.message())))
}

pub fn build_potential(form: PotentialForm, c: &[f64]) -> Result<PolynomialPotential> {
    let wrong =
        |n: usize| Error::InvalidArgument(format!("{form:?} potential takes {n} coefficients, got {}", c.len()));
    match form {
        PotentialForm::Sextic => match *c {
            [a, b, cc] => PolynomialPotential::sextic(a, b, cc),
            _ => Err(wrong(3)),
        },
        PotentialForm::Decatic => match *c {
            [a, b, cc, d, e] => PolynomialPotential::decatic(a, b, cc, d, e),
            _ => Err(wrong(5)),
        },
        PotentialForm::General => PolynomialPotential::new(c.to_vec()),
    }
}

/// `lo..hi`, `lo..=hi` or `lo-hi`, inclusive and ascending.
pub fn parse_levels(s: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::InvalidArgument(format!("bad level range `{s}` (expected e.g. 3..7)"));
    let (lo, hi) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'))
        .ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(Error::InvalidArgument(format!("level range `{s}` is not ascending")));
    }
    Ok(lo..=hi)
}
