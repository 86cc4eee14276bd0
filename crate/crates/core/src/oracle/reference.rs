//! Published reference energies, shipped as a versioned text file.

use std::fmt;
use std::str::FromStr;

use crate::assembly::PolynomialPotential;
use crate::error::{Error, Result};

pub const REFERENCE_DATA: &str = include_str!("../../data/reference_cases.txt");

const HEADER: &str = "# ipsf reference cases v1";

/// Published successive ground-state differences `E^{j-1} - E^j` for the ten
/// arbitrary-parameter sextic sets, `j = 4, 5, 6, 7`, as printed (two digits).
pub const SEXTIC_CONVERGENCE: [[f64; 4]; 10] = [
    [1.1e-7, 1.8e-9, 2.8e-11, 1.4e-11],
    [1.1e-6, 1.8e-8, 3.0e-10, 6.1e-12],
    [1.0e-5, 1.8e-7, 2.8e-9, 2.9e-11],
    [1.4e-5, 2.3e-7, 3.7e-9, 6.7e-11],
    [1.8e-5, 3.0e-7, 4.7e-9, 9.9e-11],
    [1.3e-7, 2.1e-9, 2.8e-11, 6.0e-12],
    [7.7e-7, 1.3e-8, 2.0e-10, 4.8e-12],
    [1.0e-5, 1.8e-7, 2.8e-9, 3.7e-11],
    [1.5e-5, 2.5e-7, 4.0e-9, 6.4e-11],
    [5.6e-6, 9.2e-8, 1.5e-9, 2.8e-11],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sextic,
    Decatic,
}

/// Which kind of value a record holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Exact,
    /// Sinc-collocation reference.
    Scm,
    /// Published value of this method at the given level.
    Ddipsf(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Published,
    Numerov,
    QesAnsatz,
}

#[derive(Debug, Clone)]
pub struct ReferenceCase {
    pub label: String,
    pub family: Family,
    /// `a, b, c[, d, e]` as written in the data file.
    pub params: Vec<f64>,
    pub potential: PolynomialPotential,
    pub state: usize,
    pub column: Column,
    pub reference_energy: f64,
    pub source: Source,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sextic" => Ok(Family::Sextic),
            "decatic" => Ok(Family::Decatic),
            _ => Err(Error::InvalidArgument(format!("unknown potential family `{s}`"))),
        }
    }
}

impl FromStr for Column {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Column::Exact),
            "scm" => Ok(Column::Scm),
            _ => s
                .strip_prefix("ddipsf-j")
                .and_then(|j| j.parse().ok())
                .map(Column::Ddipsf)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown column `{s}`"))),
        }
    }
}

impl FromStr for Source {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "published" => Ok(Source::Published),
            "numerov" => Ok(Source::Numerov),
            "qes-ansatz" => Ok(Source::QesAnsatz),
            _ => Err(Error::InvalidArgument(format!("unknown source `{s}`"))),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Exact => f.write_str("exact"),
            Column::Scm => f.write_str("scm"),
            Column::Ddipsf(j) => write!(f, "ddipsf-j{j}"),
        }
    }
}

impl Family {
    pub fn potential(self, params: &[f64]) -> Result<PolynomialPotential> {
        match (self, params) {
            (Family::Sextic, &[a, b, c]) => PolynomialPotential::sextic(a, b, c),
            (Family::Decatic, &[a, b, c, d, e]) => PolynomialPotential::decatic(a, b, c, d, e),
            _ => Err(Error::InvalidArgument(format!(
                "{self:?} potential takes {} coefficients, got {}",
                if self == Family::Sextic { 3 } else { 5 },
                params.len()
            ))),
        }
    }
}

pub fn parse_reference_cases(text: &str) -> Result<Vec<ReferenceCase>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "reference data must start with `{HEADER}`, found {other:?}"
            )))
        }
    }
    let mut cases = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::InvalidArgument(format!("reference line {}: {what}", n + 2));
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [label, family, coeffs, state, column, energy, source] = fields[..] else {
            return Err(bad("expected 7 fields"));
        };
        let family: Family = family.parse()?;
        let params = coeffs
            .split_whitespace()
            .map(|c| c.parse::<f64>().map_err(|_| bad("bad coefficient")))
            .collect::<Result<Vec<_>>>()?;
        let reference_energy: f64 = energy.parse().map_err(|_| bad("bad energy"))?;
        if !reference_energy.is_finite() {
            return Err(bad("non-finite energy"));
        }
        cases.push(ReferenceCase {
            label: label.to_string(),
            family,
            potential: family.potential(&params)?,
            params,
            state: state.parse().map_err(|_| bad("bad state index"))?,
            column: column.parse()?,
            reference_energy,
            source: source.parse()?,
        });
    }
    Ok(cases)
}

/// All shipped reference records, in file order.
pub fn reference_suite() -> Vec<ReferenceCase> {
    parse_reference_cases(REFERENCE_DATA).expect("shipped reference data parses")
}
