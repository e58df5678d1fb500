//! Exact diagonalization and exact time evolution of interpolating Hamiltonians.

mod errormap;
mod evolve;
pub mod lanczos;
mod logical;
mod spectrum;

pub use errormap::{excited_start_error_map, ErrorMap, PauliLabel};
pub use evolve::{adiabatic_evolve, Evolution, Ramp, Sweep, MAX_EVOLVE_QUBITS};
pub use lanczos::{dense_eigen, dense_of, lowest_eigenpairs, EigenOptions, Eigenpairs, LinearOp};
pub use logical::{
    fidelity, logical_fidelity, logical_operators, prepare_by_projection, probe_constraint,
    product_state, reduced_density, FidelityReport, Probe, ProbeFidelity,
};
pub use spectrum::{
    duality_check, duality_deviation, gap_curve, gap_curve_with, golden_min, is_mirror_symmetric,
    linspace, low_spectrum, low_spectrum_with, GapCurve, SpectrumSlice, DEGENERACY_TOL,
};
