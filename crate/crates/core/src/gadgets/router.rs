use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::core_model::{Factor, InterpolationSpec, PauliSum, PauliTerm, TwistedGraph};
use crate::error::{Error, Result};
use crate::spectral_ed::{adiabatic_evolve, prepare_by_projection, Ramp, Sweep};

/// Qubit labels of the four-qubit router.
pub const Q1: usize = 0;
pub const Q1P: usize = 1;
pub const Q2: usize = 2;
pub const QO: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouterField {
    /// Field on 1 and 2.
    F,
    /// Field on 1′ and 2.
    Fp,
}

impl std::str::FromStr for RouterField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f" => Ok(RouterField::F),
            "fp" | "f'" | "fprime" => Ok(RouterField::Fp),
            _ => Err(Error::Domain(format!("unknown router field {s:?}"))),
        }
    }
}

fn term(c: f64, f: &[(usize, Factor)]) -> PauliTerm {
    PauliTerm::new(c, f.to_vec()).expect("valid router term")
}

/// H_i = −(Z₂X₁ − Z₂X₁′ + Z₂X_o + Z₁Z₁′Z_oX₂).
pub fn router_initial() -> Vec<PauliTerm> {
    use Factor::*;
    vec![
        term(-1.0, &[(Q1, X), (Q2, Z)]),
        term(1.0, &[(Q1P, X), (Q2, Z)]),
        term(-1.0, &[(QO, X), (Q2, Z)]),
        term(-1.0, &[(Q1, Z), (Q1P, Z), (Q2, X), (QO, Z)]),
    ]
}

pub fn router_final(field: RouterField) -> Vec<PauliTerm> {
    let a = match field {
        RouterField::F => Q1,
        RouterField::Fp => Q1P,
    };
    vec![PauliTerm::single(-1.0, a, Factor::X), PauliTerm::single(-1.0, Q2, Factor::X)]
}

pub fn router_spec(field: RouterField) -> InterpolationSpec {
    InterpolationSpec::new(4, router_initial(), router_final(field)).expect("valid router spec")
}

/// Conserved sector operators S₁ = X₁X₁′, S₂ = X₁X_o and the logicals Z̄₁ = Z₁Z₁′Z_oX₂, Z̄₂ = Z₂X₁.
pub fn router_sector_ops() -> [(&'static str, PauliTerm); 4] {
    use Factor::*;
    [
        ("S1", term(1.0, &[(Q1, X), (Q1P, X)])),
        ("S2", term(1.0, &[(Q1, X), (QO, X)])),
        ("Zbar1", term(1.0, &[(Q1, Z), (Q1P, Z), (Q2, X), (QO, Z)])),
        ("Zbar2", term(1.0, &[(Q1, X), (Q2, Z)])),
    ]
}

/// Required sector of the initial state.
pub const ROUTER_SECTOR: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouterReport {
    pub field: RouterField,
    pub total_time: f64,
    pub initial_energy: f64,
    pub ground_energy: f64,
    /// (name, expectation) of S₁, S₂, Z̄₁, Z̄₂ in the initial state.
    pub sector: Vec<(String, f64)>,
    pub x_out: f64,
    /// Smallest gap within the conserved sector along the path.
    pub min_sector_gap: f64,
}

/// Ground state of H_i fixed to the router sector, checked against the true ground energy.
pub fn router_initial_state() -> Result<(Vec<C>, f64, f64)> {
    let hi = PauliSum::new(4, &router_initial());
    let cons: Vec<(PauliTerm, f64)> =
        router_sector_ops().into_iter().zip(ROUTER_SECTOR).map(|((_, t), v)| (t, v)).collect();
    let psi = prepare_by_projection(4, &[], &[], &cons, 11)?;
    let e = hi.expectation(&psi);
    let e0 = SymmetricEigen::new(hi.dense()).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if (e - e0).abs() > 1e-9 {
        return Err(Error::Ambiguous(format!("sector state energy {e} is not the ground energy {e0}")));
    }
    Ok((psi, e, e0))
}

/// Gap between the two lowest levels of H(s) within the S₁ = −1, S₂ = +1 sector.
pub fn sector_gap(spec: &InterpolationSpec, s: f64) -> Result<f64> {
    let ops = router_sector_ops();
    let id = DMatrix::<C>::identity(16, 16);
    let s1 = PauliSum::new(4, &[ops[0].1.clone()]).dense();
    let s2 = PauliSum::new(4, &[ops[1].1.clone()]).dense();
    let p = (&id - &s1) * (&id + &s2) * C::new(0.25, 0.0);
    let pe = p.clone().symmetric_eigen();
    let cols: Vec<_> = (0..16).filter(|&i| pe.eigenvalues[i] > 0.5).map(|i| pe.eigenvectors.column(i).into_owned()).collect();
    let b = DMatrix::from_columns(&cols);
    let h = spec.operator(s)?.dense();
    let hs = b.adjoint() * h * &b;
    let mut ev: Vec<f64> = hs.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev[1] - ev[0])
}

pub fn verify_router(field: RouterField, total_time: f64) -> Result<RouterReport> {
    let spec = router_spec(field);
    let (psi, initial_energy, ground_energy) = router_initial_state()?;
    let sector = router_sector_ops()
        .into_iter()
        .map(|(name, t)| (name.to_string(), PauliSum::new(4, &[t]).expectation(&psi)))
        .collect();
    let mut min_sector_gap = f64::INFINITY;
    for k in 0..=200 {
        min_sector_gap = min_sector_gap.min(sector_gap(&spec, k as f64 / 200.0)?);
    }
    let out = adiabatic_evolve(&spec, &Sweep::Ramp { total_time, ramp: Ramp::Smoother }, &psi)?.state;
    let xo = PauliSum::new(4, &[PauliTerm::single(1.0, QO, Factor::X)]).expectation(&out);
    Ok(RouterReport { field, total_time, initial_energy, ground_energy, sector, x_out: xo, min_sector_gap })
}

/// Larger router: center 0 with output 1 and two odd legs 2–3–4 and 5–6–7; leg B ends in a π twist.
pub fn extended_router_graph() -> TwistedGraph {
    let mut angles = vec![0.0; 8];
    angles[7] = PI;
    TwistedGraph::new(
        angles,
        vec![[0, 1], [0, 2], [2, 3], [3, 4], [0, 5], [5, 6], [6, 7]],
        vec![],
        vec![1],
        vec![],
    )
    .expect("valid router graph")
}

pub fn extended_router_spec(field: RouterField) -> InterpolationSpec {
    let g = extended_router_graph();
    let support: &[usize] = match field {
        RouterField::F => &[0, 2, 3, 4],
        RouterField::Fp => &[0, 5, 6, 7],
    };
    let fin = support.iter().map(|&v| PauliTerm::single(-1.0, v, Factor::X)).collect();
    InterpolationSpec::new(8, g.cluster_terms(), fin).expect("valid spec")
}

/// ⟨X_o⟩ after sweeping the extended router from its unique cluster ground state.
pub fn verify_extended_router(field: RouterField, total_time: f64) -> Result<f64> {
    let spec = extended_router_spec(field);
    let psi = prepare_by_projection(8, &spec.h_init, &[], &[], 5)?;
    let out = adiabatic_evolve(&spec, &Sweep::Ramp { total_time, ramp: Ramp::Smoother }, &psi)?.state;
    Ok(PauliSum::new(8, &[PauliTerm::single(1.0, 1, Factor::X)]).expectation(&out))
}
