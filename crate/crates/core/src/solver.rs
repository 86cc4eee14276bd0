//! One-call pipeline: discretize, assemble, diagonalize.

use crate::assembly::{assemble, make_discretization, PolynomialPotential, SpectralProblem};
use crate::cache::TableBundle;
use crate::eigen::{solve_generalized, Spectrum};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Solution {
    pub problem: SpectralProblem,
    pub spectrum: Spectrum,
}

pub fn solve(
    tables: &TableBundle,
    pot: &PolynomialPotential,
    level: u32,
    radius: f64,
    n_states: usize,
) -> Result<Solution> {
    let disc = make_discretization(level, radius, tables.order())?;
    let problem = assemble(pot, &disc, &tables.connection, &tables.moments)?;
    let spectrum = solve_generalized(&problem, n_states)?;
    Ok(Solution { problem, spectrum })
}
