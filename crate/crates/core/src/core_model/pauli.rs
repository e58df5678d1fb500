use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-vertex factor. `Rot(θ)` is cos θ X + sin θ Y.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Factor {
    X,
    Y,
    Z,
    Rot(f64),
}

/// Reduce an angle into [0, 2π).
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// e^{iθ}, exact at multiples of π/2.
pub fn unit_phase(theta: f64) -> Complex64 {
    let q = theta / FRAC_PI_2;
    let r = q.round();
    if (q - r).abs() < 1e-14 {
        match (r as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::new(theta.cos(), theta.sin())
    }
}

impl Factor {
    /// Canonical rotated factor: θ=0 gives X and θ=π/2 gives Y exactly.
    pub fn rotated(theta: f64) -> Factor {
        let t = wrap_angle(theta);
        if t == 0.0 {
            Factor::X
        } else if (t - FRAC_PI_2).abs() < 1e-15 {
            Factor::Y
        } else {
            Factor::Rot(t)
        }
    }

    /// In-plane angle, `None` for Z.
    pub fn angle(self) -> Option<f64> {
        match self {
            Factor::X => Some(0.0),
            Factor::Y => Some(FRAC_PI_2),
            Factor::Rot(t) => Some(t),
            Factor::Z => None,
        }
    }

    pub fn flips(self) -> bool {
        !matches!(self, Factor::Z)
    }

    /// 2x2 matrix in the computational basis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        match self.angle() {
            None => [[Complex64::new(1.0, 0.0), zero], [zero, Complex64::new(-1.0, 0.0)]],
            Some(t) => [[zero, unit_phase(-t)], [unit_phase(t), zero]],
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::X => write!(f, "X"),
            Factor::Y => write!(f, "Y"),
            Factor::Z => write!(f, "Z"),
            Factor::Rot(t) => write!(f, "R({t:.6})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commutation {
    Commute,
    Anticommute,
    Neither,
}

/// `coeff · ⊗_v factor_v`, factors sorted by vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub factors: Vec<(usize, Factor)>,
}

impl PauliTerm {
    pub fn new(coeff: f64, mut factors: Vec<(usize, Factor)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidTerm("no factors".into()));
        }
        if !coeff.is_finite() || coeff == 0.0 {
            return Err(Error::InvalidTerm(format!("coefficient {coeff}")));
        }
        factors.sort_by_key(|f| f.0);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidTerm("repeated vertex".into()));
        }
        for (_, f) in &factors {
            if let Factor::Rot(t) = f {
                if !t.is_finite() {
                    return Err(Error::InvalidTerm("non-finite angle".into()));
                }
            }
        }
        Ok(PauliTerm { coeff, factors })
    }

    pub fn single(coeff: f64, v: usize, f: Factor) -> Self {
        PauliTerm { coeff, factors: vec![(v, f)] }
    }

    pub fn scaled(&self, k: f64) -> Self {
        PauliTerm { coeff: self.coeff * k, factors: self.factors.clone() }
    }

    pub fn max_vertex(&self) -> usize {
        self.factors.last().map(|f| f.0).unwrap_or(0)
    }

    pub fn factor_on(&self, v: usize) -> Option<Factor> {
        self.factors
            .binary_search_by_key(&v, |f| f.0)
            .ok()
            .map(|i| self.factors[i].1)
    }

    /// Whether the operator parts commute, anticommute or neither.
    pub fn commutation(&self, other: &PauliTerm) -> Commutation {
        let mut anti = 0usize;
        for &(v, a) in &self.factors {
            let Some(b) = other.factor_on(v) else { continue };
            match (a.angle(), b.angle()) {
                (None, None) => {}
                (None, Some(_)) | (Some(_), None) => anti += 1,
                (Some(x), Some(y)) => {
                    let d = wrap_angle(x - y) / FRAC_PI_2;
                    let r = d.round();
                    if (d - r).abs() > 1e-12 {
                        return Commutation::Neither;
                    }
                    if (r as i64) % 2 == 1 {
                        anti += 1;
                    }
                }
            }
        }
        if anti % 2 == 0 {
            Commutation::Commute
        } else {
            Commutation::Anticommute
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coeff)?;
        for (v, p) in &self.factors {
            write!(f, " {p}{v}")?;
        }
        Ok(())
    }
}

/// Bit kernel of one term: maps |b> to amp(b)|b ^ flip>.
#[derive(Clone, Debug)]
pub struct TermKernel {
    pub flip: usize,
    pub zmask: usize,
    rot_bits: Vec<usize>,
    table: Vec<Complex64>,
}

impl TermKernel {
    pub fn new(term: &PauliTerm) -> Self {
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut rot = Vec::new();
        for &(v, f) in &term.factors {
            match f.angle() {
                None => zmask |= 1 << v,
                Some(t) => {
                    flip |= 1 << v;
                    rot.push((v, t));
                }
            }
        }
        let r = rot.len();
        let mut table = vec![Complex64::new(term.coeff, 0.0); 1 << r];
        for (idx, entry) in table.iter_mut().enumerate() {
            for (j, &(_, t)) in rot.iter().enumerate() {
                let sign = if idx >> j & 1 == 0 { 1.0 } else { -1.0 };
                *entry *= unit_phase(sign * t);
            }
        }
        TermKernel { flip, zmask, rot_bits: rot.iter().map(|r| r.0).collect(), table }
    }

    #[inline]
    pub fn amp(&self, b: usize) -> Complex64 {
        let mut idx = 0usize;
        for (j, &q) in self.rot_bits.iter().enumerate() {
            idx |= (b >> q & 1) << j;
        }
        let a = self.table[idx];
        if (b & self.zmask).count_ones() & 1 == 1 {
            -a
        } else {
            a
        }
    }
}

/// Matrix-free sum of Pauli terms on `n` qubits (qubit v is bit v).
#[derive(Clone, Debug)]
pub struct PauliSum {
    pub n: usize,
    kernels: Vec<TermKernel>,
    bound: f64,
}

impl PauliSum {
    /// Dense-vector operator; callers cap n well below the word size.
    pub fn new(n: usize, terms: &[PauliTerm]) -> Self {
        assert!(n < 40, "dense Pauli sum on {n} qubits");
        let kernels = terms.iter().map(TermKernel::new).collect();
        let bound = terms.iter().map(|t| t.coeff.abs()).sum();
        PauliSum { n, kernels, bound }
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Σ|c|, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.bound
    }

    /// y = H x.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        self.apply_add(x, y, 1.0);
    }

    /// y += k · H x.
    pub fn apply_add(&self, x: &[Complex64], y: &mut [Complex64], k: f64) {
        for kern in &self.kernels {
            let flip = kern.flip;
            for (b, &xb) in x.iter().enumerate() {
                if xb.re == 0.0 && xb.im == 0.0 {
                    continue;
                }
                y[b ^ flip] += kern.amp(b) * xb * k;
            }
        }
    }

    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let mut y = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply(psi, &mut y);
        psi.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for kern in &self.kernels {
            for b in 0..d {
                m[(b ^ kern.flip, b)] += kern.amp(b);
            }
        }
        m
    }
}

/// Apply a single term to a state.
pub fn apply_term(term: &PauliTerm, x: &[Complex64]) -> Vec<Complex64> {
    let k = TermKernel::new(term);
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    for (b, &xb) in x.iter().enumerate() {
        y[b ^ k.flip] += k.amp(b) * xb;
    }
    y
}

/// Replace x by (x + σ·O x)/2 for a term O with unit coefficient magnitude.
pub fn project_onto(term: &PauliTerm, sigma: f64, x: &mut [Complex64]) {
    let ox = apply_term(&term.scaled(1.0 / term.coeff.abs()), x);
    for (a, b) in x.iter_mut().zip(ox) {
        *a = (*a + b * sigma) * 0.5;
    }
}

