//! Simulation and verification laboratory for adiabatic quantum transistors.
//!
//! Twisted cluster-state Hamiltonians are built from graphs or small circuits,
//! their gaps are computed by exact diagonalization, free fermions or MPS sweeps,
//! and the router and measurement-amplifier gadgets are checked by exact evolution.

pub mod analysis;
pub mod cli;
pub mod compiler;
pub mod core_model;
pub mod error;
pub mod freefermion;
pub mod gadgets;
pub mod mps1d;
pub mod spectral_ed;

pub use error::{Error, Result};
