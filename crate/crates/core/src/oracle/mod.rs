//! Independent reference solutions: a finite-difference eigensolver on the
//! same Dirichlet domain, the closed-form quasi-exactly-solvable ground
//! state, and published reference energies.

mod numerov;
mod qes;
mod reference;

pub use numerov::{numerov_solve, numerov_states, OracleSpectrum, MIN_POINTS};
pub use qes::{qes_ground_profile, QesProfile, QES_RESIDUAL_TOL};
pub use reference::{
    parse_reference_cases, reference_suite, Column, Family, ReferenceCase, Source, REFERENCE_DATA, SEXTIC_CONVERGENCE,
};
