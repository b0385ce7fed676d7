//! Numerical toolkit for ground-state studies of antiferromagnetic Ising
//! networks in transverse and longitudinal fields on planar cubic graphs:
//! lattice generation and enumeration, matrix-free exact diagonalization,
//! entanglement and majorization observables, and parameter sweeps with
//! critical-point and scaling analysis.

pub mod error;
pub mod hamiltonian;
pub mod eigensolver;
pub mod lattice;
pub mod linalg;
pub mod observables;

pub use error::{Error, Result};
