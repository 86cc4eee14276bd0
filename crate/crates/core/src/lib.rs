//! Wavelet-Galerkin eigensolver for one-dimensional Schrödinger operators
//! with polynomial potentials, built on interpolating scaling functions.

pub mod assembly;
pub mod cache;
pub mod cascade;
pub mod cli;
pub mod connection;
pub mod eigen;
pub mod error;
mod exact;
pub mod linalg;
pub mod mask;
pub mod moments;
pub mod oracle;
pub mod solver;
pub mod wavefunction;

pub use error::{Error, Result};
