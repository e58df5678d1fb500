use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::evolve::{adiabatic_evolve, Ramp, Sweep};
use super::lanczos::{norm, random_vector};
use crate::compiler::{compiled_unitary_reference, CircuitIR};
use crate::core_model::{project_onto, Factor, InterpolationSpec, PauliTerm, TwistedGraph};
use crate::error::{Error, Result};

/// Single-qubit probe states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probe {
    Zero,
    One,
    Plus,
    PlusI,
}

impl Probe {
    pub const ALL: [Probe; 4] = [Probe::Zero, Probe::One, Probe::Plus, Probe::PlusI];

    pub fn label(self) -> &'static str {
        match self {
            Probe::Zero => "0",
            Probe::One => "1",
            Probe::Plus => "+",
            Probe::PlusI => "+i",
        }
    }

    pub fn ket(self) -> [C; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            Probe::Zero => [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            Probe::One => [C::new(0.0, 0.0), C::new(1.0, 0.0)],
            Probe::Plus => [C::new(h, 0.0), C::new(h, 0.0)],
            Probe::PlusI => [C::new(h, 0.0), C::new(0.0, h)],
        }
    }

    pub fn is_basis(self) -> bool {
        matches!(self, Probe::Zero | Probe::One)
    }
}

/// Logical (X̄, Ȳ, Z̄) of the input vertex v: X̄ is its dropped vertex operator, Z̄ = Z_v.
pub fn logical_operators(g: &TwistedGraph, v: usize) -> (PauliTerm, PauliTerm, PauliTerm) {
    let x = g.vertex_operator(v, 1.0);
    let mut yf = vec![(v, Factor::rotated(g.angles()[v] + FRAC_PI_2))];
    yf.extend(g.neighbors(v).into_iter().map(|w| (w, Factor::Z)));
    let y = PauliTerm::new(1.0, yf).expect("valid");
    let z = PauliTerm::single(1.0, v, Factor::Z);
    (x, y, z)
}

/// The logical constraint (operator, eigenvalue) that fixes a probe on input v.
pub fn probe_constraint(g: &TwistedGraph, v: usize, p: Probe) -> (PauliTerm, f64) {
    let (x, y, z) = logical_operators(g, v);
    match p {
        Probe::Zero => (z, 1.0),
        Probe::One => (z, -1.0),
        Probe::Plus => (x, 1.0),
        Probe::PlusI => (y, 1.0),
    }
}

/// Common eigenstate of commuting involutive terms: each term c·O is put in its
/// ground eigenvalue −sign(c) unless listed in `flipped`, then the constraints
/// (O, σ) are imposed. Built by projecting a seeded random vector.
pub fn prepare_by_projection(
    n: usize,
    terms: &[PauliTerm],
    flipped: &[usize],
    constraints: &[(PauliTerm, f64)],
    seed: u64,
) -> Result<Vec<C>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_vector(1 << n, &mut rng);
    for (i, t) in terms.iter().enumerate() {
        // ground eigenvalue of c·O/|c| is −1
        let mut sigma = -1.0;
        if flipped.contains(&i) {
            sigma = -sigma;
        }
        project_onto(t, sigma, &mut v);
    }
    for (t, sigma) in constraints {
        project_onto(t, *sigma * t.coeff.signum(), &mut v);
    }
    let nv = norm(&v);
    if nv < 1e-8 {
        return Err(Error::Ambiguous("sector projectors annihilate the state".into()));
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Ok(v)
}

/// Reduced density matrix on `keep`; keep[j] becomes bit j of the reduced index.
pub fn reduced_density(psi: &[C], n: usize, keep: &[usize]) -> DMatrix<C> {
    let k = keep.len();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << k;
    let dr = 1usize << rest.len();
    let mut m = DMatrix::<C>::zeros(dk, dr);
    for (b, &amp) in psi.iter().enumerate() {
        let mut i = 0usize;
        for (j, &q) in keep.iter().enumerate() {
            i |= (b >> q & 1) << j;
        }
        let mut r = 0usize;
        for (j, &q) in rest.iter().enumerate() {
            r |= (b >> q & 1) << j;
        }
        m[(i, r)] = amp;
    }
    &m * m.adjoint()
}

pub fn fidelity(rho: &DMatrix<C>, target: &[C]) -> f64 {
    let t = DVector::from_column_slice(target);
    (t.adjoint() * rho * &t)[(0, 0)].re
}

/// Product state ⊗_j kets[j] with qubit j as bit j.
pub fn product_state(kets: &[[C; 2]]) -> Vec<C> {
    let mut v = vec![C::new(1.0, 0.0)];
    for (j, k) in kets.iter().enumerate() {
        let mut w = vec![C::new(0.0, 0.0); v.len() * 2];
        for (b, a) in v.iter().enumerate() {
            w[b] += a * k[0];
            w[b | 1 << j] += a * k[1];
        }
        v = w;
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeFidelity {
    pub probe: String,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub total_time: f64,
    pub probes: Vec<ProbeFidelity>,
    /// Worst over computational basis inputs.
    pub basis_min: f64,
    /// Worst over all probes.
    pub worst: f64,
}

pub const MAX_FIDELITY_QUBITS: usize = 14;

/// End-to-end check of a compiled graph against the circuit's reference unitary.
pub fn logical_fidelity(g: &TwistedGraph, circuit: &CircuitIR, total_time: f64, ramp: Ramp) -> Result<FidelityReport> {
    if g.n() > MAX_FIDELITY_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits > {MAX_FIDELITY_QUBITS}", g.n())));
    }
    if g.inputs().len() != circuit.inputs.len() || g.outputs().len() != circuit.n_qubits {
        return Err(Error::Domain("graph inputs/outputs do not match the circuit".into()));
    }
    let spec = InterpolationSpec::from_graph(g);
    let u = compiled_unitary_reference(circuit)?;
    let k = circuit.inputs.len();
    let sweep = Sweep::Ramp { total_time, ramp };
    let mut probes = Vec::new();
    let (mut basis_min, mut worst) = (1.0f64, 1.0f64);
    for code in 0..4usize.pow(k as u32) {
        let combo: Vec<Probe> = (0..k).map(|j| Probe::ALL[code / 4usize.pow(j as u32) % 4]).collect();
        let constraints: Vec<(PauliTerm, f64)> = combo
            .iter()
            .zip(g.inputs())
            .map(|(&p, &v)| probe_constraint(g, v, p))
            .collect();
        let psi0 = prepare_by_projection(g.n(), &spec.h_init, &[], &constraints, 11 + code as u64)?;
        let out = adiabatic_evolve(&spec, &sweep, &psi0)?.state;
        let rho = reduced_density(&out, g.n(), g.outputs());
        let mut kets = vec![Probe::Plus.ket(); circuit.n_qubits];
        for (p, &q) in combo.iter().zip(&circuit.inputs) {
            kets[q] = p.ket();
        }
        let t = &u * DVector::from_vec(product_state(&kets));
        let f = fidelity(&rho, t.as_slice());
        worst = worst.min(f);
        if combo.iter().all(|p| p.is_basis()) {
            basis_min = basis_min.min(f);
        }
        probes.push(ProbeFidelity { probe: combo.iter().map(|p| p.label()).collect::<Vec<_>>().join(","), fidelity: f });
    }
    Ok(FidelityReport { total_time, probes, basis_min, worst })
}
