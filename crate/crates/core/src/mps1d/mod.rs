//! Matrix-product-state ground and excited states for open chains.

mod dmrg;
mod linalg;
mod mpo;
mod mps;

pub use dmrg::{dmrg, dmrg_from, gap_above_manifold, ground_state, DmrgOptions, MpsGap, MAX_EXCITED};
pub use mpo::Mpo;
pub use mps::{energy_and_variance, mpo_expectation, overlap, MpsState, MpsStats};
