use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{axpy_mat, mul, mul_ad, svd, zeros, Mat, Svd};
use super::mpo::Mpo;

/// Site tensor: one chi_l × chi_r matrix per physical state.
pub(crate) type Site = [Mat; 2];

/// Summary numbers of a converged MPS.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpsStats {
    pub energy: f64,
    pub variance: f64,
    pub max_bond: usize,
    /// Largest discarded weight of the final sweep.
    pub truncation_error: f64,
    /// Discarded weight per bond in the final sweep.
    pub bond_truncation: Vec<f64>,
    pub sweeps: usize,
    /// Effective-Hamiltonian applications over the whole run.
    pub matvecs: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct MpsState {
    pub(crate) sites: Vec<Site>,
    pub stats: MpsStats,
}

impl MpsState {
    /// Random state with bond dimension ≤ chi, right-canonical with unit norm.
    pub(crate) fn random(n: usize, chi: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims: Vec<usize> = (0..=n).map(|k| chi.min(1 << k.min(20)).min(1 << (n - k).min(20))).collect();
        let mut sites: Vec<Site> = (0..n)
            .map(|i| {
                let mut g = || Mat::from_fn(dims[i], dims[i + 1], |_, _| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
                [g(), g()]
            })
            .collect();
        right_canonicalize(&mut sites);
        MpsState {
            sites,
            stats: MpsStats {
                energy: f64::NAN,
                variance: f64::NAN,
                max_bond: chi,
                truncation_error: 0.0,
                bond_truncation: vec![],
                sweeps: 0,
                matvecs: 0,
                converged: false,
            },
        }
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.sites.iter().map(|s| s[0].nrows()).collect();
        d.push(self.sites.last().map_or(1, |s| s[0].ncols()));
        d
    }

    pub fn norm(&self) -> f64 {
        overlap(self, self).re.sqrt()
    }

    pub fn energy(&self) -> f64 {
        self.stats.energy
    }

    /// Full state vector (n ≤ 20), qubit q as bit q.
    pub fn to_dense(&self) -> Vec<C> {
        let n = self.n();
        let mut out = vec![C::new(0.0, 0.0); 1 << n];
        for (b, slot) in out.iter_mut().enumerate() {
            let mut m = self.sites[0][b & 1].clone();
            for q in 1..n {
                m = &m * &self.sites[q][b >> q & 1];
            }
            *slot = m[(0, 0)];
        }
        out
    }
}

/// Sweep right to left so every site but the first is right-canonical; normalizes.
pub(crate) fn right_canonicalize(sites: &mut [Site]) {
    for i in (1..sites.len()).rev() {
        let (l, r) = (sites[i][0].nrows(), sites[i][0].ncols());
        let mut m = zeros(l, 2 * r);
        for p in 0..2 {
            m.view_mut((0, p * r), (l, r)).copy_from(&sites[i][p]);
        }
        let Svd { u, s, vt } = svd(&m);
        let k = s.len();
        let us = Mat::from_fn(l, k, |a, j| u[(a, j)] * s[j]);
        for p in 0..2 {
            sites[i][p] = vt.view((0, p * r), (k, r)).into_owned();
            sites[i - 1][p] = mul(&sites[i - 1][p], &us);
        }
    }
    let nrm = sites[0].iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
    for m in sites[0].iter_mut() {
        *m /= C::new(nrm, 0.0);
    }
}

/// ⟨a|b⟩
pub fn overlap(a: &MpsState, b: &MpsState) -> C {
    let mut e = Mat::from_element(1, 1, C::new(1.0, 0.0));
    for (sa, sb) in a.sites.iter().zip(&b.sites) {
        e = overlap_left(&e, sa, sb);
    }
    e[(0, 0)]
}

/// Overlap environment step to the right: Σ_p Φ[p]† E A[p].
pub(crate) fn overlap_left(e: &Mat, phi: &Site, a: &Site) -> Mat {
    let mut out = mul_ad(&phi[0], &mul(e, &a[0]));
    out += mul_ad(&phi[1], &mul(e, &a[1]));
    out
}

/// Overlap environment step to the left: Σ_p conj(Φ[p]) E A[p]ᵀ.
pub(crate) fn overlap_right(e: &Mat, phi: &Site, a: &Site) -> Mat {
    let mut out = mul(&phi[0].conjugate(), &mul(e, &a[0].transpose()));
    out += mul(&phi[1].conjugate(), &mul(e, &a[1].transpose()));
    out
}

/// MPO environment: one (bra × ket) matrix per channel.
pub(crate) type Env = Vec<Mat>;

pub(crate) fn left_boundary(mpo: &Mpo) -> Env {
    (0..mpo.bonds[0]).map(|w| Mat::from_element(1, 1, C::new(if w == mpo.left { 1.0 } else { 0.0 }, 0.0))).collect()
}

pub(crate) fn right_boundary(mpo: &Mpo) -> Env {
    let n = mpo.n;
    (0..mpo.bonds[n]).map(|w| Mat::from_element(1, 1, C::new(if w == mpo.right { 1.0 } else { 0.0 }, 0.0))).collect()
}

/// L′[b] = Σ op[p][q] A[p]† L[a] A[q] over entries a → b of site i.
pub(crate) fn env_left(l: &Env, mpo: &Mpo, i: usize, a: &Site) -> Env {
    let chi = a[0].ncols();
    let la: Vec<Option<[Mat; 2]>> = l
        .iter()
        .map(|m| if m.iter().all(|z| *z == C::new(0.0, 0.0)) { None } else { Some([mul(m, &a[0]), mul(m, &a[1])]) })
        .collect();
    let db = mpo.bonds[i + 1];
    let mut x: Vec<[Option<Mat>; 2]> = (0..db).map(|_| [None, None]).collect();
    for e in &mpo.sites[i] {
        let Some(t) = &la[e.a] else { continue };
        for p in 0..2 {
            for q in 0..2 {
                let c = e.op[p][q];
                if c != C::new(0.0, 0.0) {
                    let slot = x[e.b][p].get_or_insert_with(|| zeros(t[q].nrows(), t[q].ncols()));
                    axpy_mat(slot, c, &t[q]);
                }
            }
        }
    }
    x.into_iter()
        .map(|xs| {
            let mut out = zeros(chi, chi);
            for (p, m) in xs.iter().enumerate() {
                if let Some(m) = m {
                    out += mul_ad(&a[p], m);
                }
            }
            out
        })
        .collect()
}

/// R′[a] = Σ op[p][q] conj(A[p]) R[b] A[q]ᵀ over entries a → b of site i.
pub(crate) fn env_right(r: &Env, mpo: &Mpo, i: usize, a: &Site) -> Env {
    let chi = a[0].nrows();
    let at = [a[0].transpose(), a[1].transpose()];
    let ra: Vec<Option<[Mat; 2]>> = r
        .iter()
        .map(|m| if m.iter().all(|z| *z == C::new(0.0, 0.0)) { None } else { Some([mul(m, &at[0]), mul(m, &at[1])]) })
        .collect();
    let da = mpo.bonds[i];
    let mut x: Vec<[Option<Mat>; 2]> = (0..da).map(|_| [None, None]).collect();
    for e in &mpo.sites[i] {
        let Some(t) = &ra[e.b] else { continue };
        for p in 0..2 {
            for q in 0..2 {
                let c = e.op[p][q];
                if c != C::new(0.0, 0.0) {
                    let slot = x[e.a][p].get_or_insert_with(|| zeros(t[q].nrows(), t[q].ncols()));
                    axpy_mat(slot, c, &t[q]);
                }
            }
        }
    }
    let ac = [a[0].conjugate(), a[1].conjugate()];
    x.into_iter()
        .map(|xs| {
            let mut out = zeros(chi, chi);
            for (p, m) in xs.iter().enumerate() {
                if let Some(m) = m {
                    out += mul(&ac[p], m);
                }
            }
            out
        })
        .collect()
}

/// ⟨ψ|W|ψ⟩ for an MPO W (no normalization).
pub fn mpo_expectation(psi: &MpsState, mpo: &Mpo) -> C {
    let mut l = left_boundary(mpo);
    for (i, s) in psi.sites.iter().enumerate() {
        l = env_left(&l, mpo, i, s);
    }
    l[mpo.right][(0, 0)]
}

/// (⟨H⟩, ⟨H²⟩ − ⟨H⟩²) for a normalized state.
pub fn energy_and_variance(psi: &MpsState, h: &Mpo) -> (f64, f64) {
    let nn = overlap(psi, psi).re;
    let e = mpo_expectation(psi, h).re / nn;
    let e2 = mpo_expectation(psi, &h.squared()).re / nn;
    (e, (e2 - e * e).max(0.0))
}
