use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::evolve::{adiabatic_evolve, Sweep};
use super::logical::{fidelity, prepare_by_projection, probe_constraint, Probe};
use crate::core_model::{build_wire, BoundarySign};
use crate::error::{Error, Result};
use crate::gadgets::tableau::{graph_stabilizers, SignedPauli, StabilizerTableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn matrix(self) -> DMatrix<C> {
        let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
        match self {
            PauliLabel::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            PauliLabel::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            PauliLabel::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            PauliLabel::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLabel::I,
            (true, false) => PauliLabel::X,
            (true, true) => PauliLabel::Y,
            (false, true) => PauliLabel::Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorMap {
    /// Logical error after removing the frame set by the final X syndrome.
    pub label: PauliLabel,
    pub fidelity: f64,
    /// Best match on the bare output qubit, no syndrome decoding.
    pub raw_label: PauliLabel,
    pub raw_fidelity: f64,
}

pub const CONFIDENT: f64 = 0.99;

/// Hadamard on the listed qubits.
fn hadamard_on(psi: &mut [C], qubits: &[usize]) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for &q in qubits {
        let bit = 1usize << q;
        for b in 0..psi.len() {
            if b & bit == 0 {
                let (a0, a1) = (psi[b], psi[b | bit]);
                psi[b] = (a0 + a1) * h;
                psi[b | bit] = (a0 - a1) * h;
            }
        }
    }
}

fn single_qubit_op(p: &SignedPauli, q: usize) -> PauliLabel {
    PauliLabel::from_bits(p.x >> q & 1 == 1, p.z >> q & 1 == 1)
}

/// Start the untwisted n-qubit wire in the excited sector where the cluster terms
/// of the listed vertices are flipped, sweep for `total_time`, and identify the logical error.
pub fn excited_start_error_map(n: usize, flipped: &[usize], total_time: f64) -> Result<ErrorMap> {
    if !(3..=12).contains(&n) {
        return Err(Error::OutOfRange { what: "n", value: n as f64 });
    }
    if let Some(v) = flipped.iter().find(|&&v| v == 0 || v >= n) {
        return Err(Error::Domain(format!("vertex {v} carries no cluster term")));
    }
    let (g, spec) = build_wire(n, BoundarySign::Uniform)?;
    let out = n - 1;
    // term index i belongs to vertex i+1
    let flipped_idx: Vec<usize> = flipped.iter().map(|v| v - 1).collect();

    // logical strings carried to X/I form off the output
    let gens = graph_stabilizers(n, g.edges(), &(1..n).collect::<Vec<_>>());
    let tab = StabilizerTableau::new(n, gens)?;
    let forbid = ((1u64 << n) - 1) & !(1u64 << out);
    let xbar = tab
        .transport(&SignedPauli::from_term(n, &g.vertex_operator(0, 1.0))?, forbid)
        .ok_or_else(|| Error::Domain("logical X cannot be transported".into()))?;
    let zbar = tab
        .transport(&SignedPauli::single(n, 0, 'Z'), forbid)
        .ok_or_else(|| Error::Domain("logical Z cannot be transported".into()))?;
    let (px, pz) = (single_qubit_op(&xbar, out), single_qubit_op(&zbar, out));
    let (sx, sz) = (xbar.x & forbid, zbar.x & forbid);

    // odd wires transmit the identity, even wires a Hadamard
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = if n % 2 == 1 {
        DMatrix::<C>::identity(2, 2)
    } else {
        DMatrix::from_row_slice(2, 2, &[C::new(h, 0.0), C::new(h, 0.0), C::new(h, 0.0), C::new(-h, 0.0)])
    };
    let non_out: Vec<usize> = (0..n).filter(|&q| q != out).collect();
    let sweep = Sweep::linear(total_time);
    let mut dec = [1.0f64; 4];
    let mut raw = [1.0f64; 4];
    for (pi, probe) in Probe::ALL.iter().enumerate() {
        let c = probe_constraint(&g, 0, *probe);
        let psi0 = prepare_by_projection(n, &spec.h_init, &flipped_idx, &[c], 101 + pi as u64)?;
        let mut psi = adiabatic_evolve(&spec, &sweep, &psi0)?.state;
        hadamard_on(&mut psi, &non_out);
        let mut rho_raw = DMatrix::<C>::zeros(2, 2);
        let mut rho_dec = DMatrix::<C>::zeros(2, 2);
        let obit = 1usize << out;
        for b in 0..psi.len() {
            if b & obit != 0 {
                continue;
            }
            let phi = DVector::from_vec(vec![psi[b], psi[b | obit]]);
            if phi.norm_squared() < 1e-20 {
                continue;
            }
            // after H, bit v = 1 means X_v = −1
            let corr_z = (b as u64 & sx).count_ones() % 2 == 1;
            let corr_x = (b as u64 & sz).count_ones() % 2 == 1;
            let mut fixed = phi.clone();
            if corr_z {
                fixed = pz.matrix() * fixed;
            }
            if corr_x {
                fixed = px.matrix() * fixed;
            }
            rho_raw += &phi * phi.adjoint();
            rho_dec += &fixed * fixed.adjoint();
        }
        let target = &u * DVector::from_row_slice(&probe.ket());
        for (li, l) in PauliLabel::ALL.iter().enumerate() {
            let t = l.matrix() * &target;
            dec[li] = dec[li].min(fidelity(&rho_dec, t.as_slice()));
            raw[li] = raw[li].min(fidelity(&rho_raw, t.as_slice()));
        }
    }
    let best = |f: &[f64; 4]| {
        let i = (0..4).max_by(|&a, &b| f[a].total_cmp(&f[b])).expect("four labels");
        (PauliLabel::ALL[i], f[i])
    };
    let (label, fid) = best(&dec);
    let (raw_label, raw_fid) = best(&raw);
    if fid < CONFIDENT {
        return Err(Error::Ambiguous(format!("best decoded label {label:?} has fidelity {fid:.4}")));
    }
    Ok(ErrorMap { label, fidelity: fid, raw_label, raw_fidelity: raw_fid })
}
