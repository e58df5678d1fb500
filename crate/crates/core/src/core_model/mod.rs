//! Twisted cluster graphs, Pauli terms and interpolating Hamiltonians.

mod graph;
mod pauli;
mod spec;

pub use graph::{TwistedGraph, MAX_DEGREE, MAX_VERTICES};
pub use pauli::{
    apply_term, project_onto, unit_phase, wrap_angle, Commutation, Factor, PauliSum, PauliTerm,
    TermKernel,
};
pub use spec::{
    build_chain, build_square_lattice, build_wire, random_dual_symmetric_angles,
    random_symmetric_chain_angles, site, BoundarySign, Envelope, InterpolationSpec,
};
