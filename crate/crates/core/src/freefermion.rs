//! Free-fermion solution of the untwisted wire.
//!
//! Each uncoupled transverse Ising chain of length l (plus the extra 0th site)
//! is described by (l+1)×(l+1) matrices A (symmetric) and B (antisymmetric);
//! the single-particle energies are the square roots of the spectrum of
//! 4M = (A+B)(A−B).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const NEGATIVE_TOL: f64 = 1e-8;

/// Per-term coupling multipliers: `bond[j]` scales the (j, j+1) exchange,
/// `field[i]` the transverse term on site i+1.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    pub bond: Vec<f64>,
    pub field: Vec<f64>,
}

impl Couplings {
    pub fn uniform(l: usize) -> Self {
        Couplings { bond: vec![1.0; l], field: vec![1.0; l] }
    }
}

#[derive(Clone, Debug)]
pub struct FermionMatrices {
    pub l: usize,
    pub s: f64,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// Γ = (1−s)·l.
    pub offset: f64,
}

impl FermionMatrices {
    /// M = (A+B)(A−B)/4.
    pub fn m(&self) -> DMatrix<f64> {
        (&self.a + &self.b) * (&self.a - &self.b) / 4.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionModes {
    pub l: usize,
    pub s: f64,
    /// Ascending; `omegas[0]` is the zero mode.
    pub omegas: Vec<f64>,
}

impl FermionModes {
    pub fn zero_mode(&self) -> f64 {
        self.omegas[0]
    }
    /// Smallest nonzero single-particle energy.
    pub fn gap(&self) -> f64 {
        self.omegas[1]
    }
}

fn check_s(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "s", value: s })
    }
}

pub fn build_matrices(l: usize, s: f64, couplings: Option<&Couplings>) -> Result<FermionMatrices> {
    if l < 1 {
        return Err(Error::OutOfRange { what: "l", value: l as f64 });
    }
    check_s(s)?;
    let uniform = Couplings::uniform(l);
    let c = couplings.unwrap_or(&uniform);
    if c.bond.len() != l || c.field.len() != l {
        return Err(Error::Domain(format!(
            "expected {l} bond and {l} field multipliers, got {} and {}",
            c.bond.len(),
            c.field.len()
        )));
    }
    if c.bond.iter().chain(&c.field).any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite coupling multiplier".into()));
    }
    let d = l + 1;
    let mut a = DMatrix::zeros(d, d);
    let mut b = DMatrix::zeros(d, d);
    for i in 1..d {
        a[(i, i)] = -2.0 * (1.0 - s) * c.field[i - 1];
    }
    for j in 0..l {
        let x = s * c.bond[j];
        a[(j, j + 1)] = -x;
        a[(j + 1, j)] = -x;
        b[(j, j + 1)] = -x;
        b[(j + 1, j)] = x;
    }
    Ok(FermionMatrices { l, s, a, b, offset: (1.0 - s) * l as f64 })
}

/// ω_k = sqrt(eig(4M)). Here A−B = (A+B)ᵀ so 4M = (A+B)(A+B)ᵀ and the ω are the
/// singular values of A+B, which keeps the zero mode at machine precision instead
/// of the square root of it.
pub fn modes_numeric(m: &FermionMatrices) -> Result<FermionModes> {
    let apb = &m.a + &m.b;
    let four_m = &apb * apb.transpose();
    let sym = (&four_m + four_m.transpose()) * 0.5;
    let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    eig.sort_by(f64::total_cmp);
    if eig[0] < -NEGATIVE_TOL {
        return Err(Error::NegativeMode(eig[0]));
    }
    let mut omegas: Vec<f64> = apb.singular_values().iter().cloned().collect();
    omegas.sort_by(f64::total_cmp);
    Ok(FermionModes { l: m.l, s: m.s, omegas })
}

/// ω_k(s) = 2·sqrt(1 − 2s(1−s)[1 − cos(kπ/(l+1))]).
pub fn omega_k(l: usize, s: f64, k: usize) -> f64 {
    let c = (k as f64 * PI / (l as f64 + 1.0)).cos();
    2.0 * (1.0 - 2.0 * s * (1.0 - s) * (1.0 - c)).max(0.0).sqrt()
}

pub fn closed_form_modes(l: usize, s: f64) -> Result<FermionModes> {
    if l < 1 {
        return Err(Error::OutOfRange { what: "l", value: l as f64 });
    }
    check_s(s)?;
    let mut omegas: Vec<f64> = std::iter::once(0.0).chain((1..=l).map(|k| omega_k(l, s, k))).collect();
    omegas.sort_by(f64::total_cmp);
    Ok(FermionModes { l, s, omegas })
}

/// Φ_i = ((s−1)/s)^{l−i}, unnormalized.
pub fn zero_mode_vector(l: usize, s: f64) -> Result<Vec<f64>> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::OutOfRange { what: "s", value: s });
    }
    let r = (s - 1.0) / s;
    Ok((0..=l).map(|i| r.powi((l - i) as i32)).collect())
}

/// ‖M·Φ‖/‖Φ‖.
pub fn zero_mode_residual(m: &FermionMatrices, phi: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(phi);
    (m.m() * &v).norm() / v.norm()
}

/// Lengths of the two decoupled chains of an n-qubit wire.
pub fn wire_chain_lengths(n: usize) -> (usize, usize) {
    (n / 2, (n - 1) / 2)
}

/// Gap of the n-qubit wire above its 2-fold ground space.
pub fn wire_gap(n: usize, s: f64) -> f64 {
    let (a, b) = wire_chain_lengths(n.max(2));
    [a, b]
        .into_iter()
        .filter(|&l| l >= 1)
        .map(|l| omega_k(l, s, l))
        .fold(f64::INFINITY, f64::min)
}

/// Multipliers 1+u with u uniform in [−λ, λ], bonds first then fields.
pub fn random_couplings(l: usize, lambda: f64, seed: u64) -> Couplings {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || if lambda == 0.0 { 1.0 } else { 1.0 + rng.gen_range(-lambda..=lambda) };
    let bond = (0..l).map(|_| draw()).collect();
    let field = (0..l).map(|_| draw()).collect();
    Couplings { bond, field }
}

pub fn perturbed_modes(l: usize, s: f64, lambda: f64, seed: u64) -> Result<FermionModes> {
    if !(lambda >= 0.0) {
        return Err(Error::OutOfRange { what: "lambda", value: lambda });
    }
    let c = random_couplings(l, lambda, seed);
    modes_numeric(&build_matrices(l, s, Some(&c))?)
}

/// All single-particle energies of the n-qubit wire (both chains), ascending.
pub fn wire_modes(n: usize, s: f64, lambda: f64, seed: u64) -> Result<Vec<f64>> {
    let (a, b) = wire_chain_lengths(n.max(2));
    let mut out = Vec::new();
    for (idx, l) in [a, b].into_iter().enumerate() {
        if l == 0 {
            continue;
        }
        let modes = if lambda == 0.0 {
            closed_form_modes(l, s)?
        } else {
            perturbed_modes(l, s, lambda, seed.wrapping_add(idx as u64))?
        };
        out.extend(modes.omegas);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_half_matrices() {
        let m = build_matrices(1, 0.5, None).unwrap();
        assert_eq!(m.a.as_slice(), &[0.0, -0.5, -0.5, -1.0]);
        // column-major: B = [[0, -1/2], [1/2, 0]]
        assert_eq!(m.b.as_slice(), &[0.0, 0.5, -0.5, 0.0]);
    }

    #[test]
    fn s0_diagonal() {
        let m = build_matrices(3, 0.0, None).unwrap();
        let d: Vec<f64> = (0..4).map(|i| m.a[(i, i)]).collect();
        assert_eq!(d, vec![0.0, -2.0, -2.0, -2.0]);
        assert!(m.b.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn l4_modes() {
        let w = modes_numeric(&build_matrices(4, 0.0, None).unwrap()).unwrap();
        for (a, b) in w.omegas.iter().zip([0.0, 2.0, 2.0, 2.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let w = modes_numeric(&build_matrices(4, 0.5, None).unwrap()).unwrap();
        let expect = [0.0, 0.6180339887498949, 1.1755705045849463, 1.618033988749895, 1.902113032590307];
        for (a, b) in w.omegas.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn explicit_m() {
        let (l, s) = (5, 0.37);
        let m = build_matrices(l, s, None).unwrap().m();
        for i in 0..=l {
            for j in 0..=l {
                let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                let e = s * s * d(i, j) * (1.0 - d(i, l))
                    + (1.0 - s).powi(2) * d(i, j) * (1.0 - d(i, 0))
                    + s * (1.0 - s) * (d(i, j + 1) + d(j, i + 1));
                assert!((m[(i, j)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_mode_examples() {
        assert_eq!(zero_mode_vector(3, 0.5).unwrap(), vec![-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(zero_mode_vector(3, 1.0).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!(zero_mode_vector(3, 0.0).is_err());
        let m = build_matrices(6, 0.3, None).unwrap();
        assert!(zero_mode_residual(&m, &zero_mode_vector(6, 0.3).unwrap()) <= 1e-12);
    }

    #[test]
    fn wire_gap_examples() {
        assert!((wire_gap(80, 0.5) - 2.0 * (40.0 * PI / 82.0).cos()).abs() < 1e-14);
        assert!((wire_gap(80, 0.5) - 0.0766).abs() < 1e-4);
        assert!((wire_gap(2, 0.5) - 2f64.sqrt()).abs() < 1e-14);
        assert!((wire_gap(9, 0.0) - 2.0).abs() < 1e-14);
        let smallest = closed_form_modes(80, 0.5).unwrap().gap();
        assert!((smallest - 0.0388).abs() < 1e-4);
    }

    #[test]
    fn lambda_zero_is_unperturbed() {
        let a = perturbed_modes(7, 0.4, 0.0, 3).unwrap();
        let b = modes_numeric(&build_matrices(7, 0.4, None).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_matrices(3, 1.5, None).is_err());
        let c = Couplings::uniform(2);
        assert!(build_matrices(3, 0.5, Some(&c)).is_err());
    }
}
