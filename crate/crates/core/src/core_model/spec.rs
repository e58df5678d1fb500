use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::TwistedGraph;
use super::pauli::{wrap_angle, Factor, PauliSum, PauliTerm};
use crate::error::{Error, Result};

/// Envelope pair (f, g) with H(s) = f(s)·h_init + g(s)·h_final.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Envelope {
    /// f = 1 − s, g = s.
    Linear,
    /// f = s, g = 1 − s.
    Swapped,
}

impl Envelope {
    pub fn f(self, s: f64) -> f64 {
        match self {
            Envelope::Linear => 1.0 - s,
            Envelope::Swapped => s,
        }
    }
    pub fn g(self, s: f64) -> f64 {
        match self {
            Envelope::Linear => s,
            Envelope::Swapped => 1.0 - s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSpec {
    pub n: usize,
    pub h_init: Vec<PauliTerm>,
    pub h_final: Vec<PauliTerm>,
    pub envelope: Envelope,
}

impl InterpolationSpec {
    pub fn new(n: usize, h_init: Vec<PauliTerm>, h_final: Vec<PauliTerm>) -> Result<Self> {
        if let Some(t) = h_init.iter().chain(&h_final).find(|t| t.max_vertex() >= n) {
            return Err(Error::InvalidTerm(format!("term {t} acts outside {n} qubits")));
        }
        Ok(InterpolationSpec { n, h_init, h_final, envelope: Envelope::Linear })
    }

    /// Default problem of a graph: cluster terms, then −X on every non-output vertex.
    pub fn from_graph(g: &TwistedGraph) -> Self {
        let h_final = (0..g.n())
            .filter(|v| !g.outputs().contains(v))
            .map(|v| PauliTerm::single(-1.0, v, Factor::X))
            .collect();
        InterpolationSpec { n: g.n(), h_init: g.cluster_terms(), h_final, envelope: Envelope::Linear }
    }

    /// Same problem with the roles of h_init and h_final exchanged.
    pub fn reflected(&self) -> Self {
        InterpolationSpec {
            n: self.n,
            h_init: self.h_final.clone(),
            h_final: self.h_init.clone(),
            envelope: self.envelope,
        }
    }

    pub fn with_envelope(mut self, e: Envelope) -> Self {
        self.envelope = e;
        self
    }

    pub fn assemble(&self, s: f64) -> Result<Vec<PauliTerm>> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange { what: "s", value: s });
        }
        let (f, g) = (self.envelope.f(s), self.envelope.g(s));
        let mut out = Vec::with_capacity(self.h_init.len() + self.h_final.len());
        for (k, list) in [(f, &self.h_init), (g, &self.h_final)] {
            if k != 0.0 {
                out.extend(list.iter().map(|t| t.scaled(k)));
            }
        }
        Ok(out)
    }

    pub fn operator(&self, s: f64) -> Result<PauliSum> {
        Ok(PauliSum::new(self.n, &self.assemble(s)?))
    }

    pub fn init_operator(&self) -> PauliSum {
        PauliSum::new(self.n, &self.h_init)
    }

    pub fn final_operator(&self) -> PauliSum {
        PauliSum::new(self.n, &self.h_final)
    }
}

/// Sign convention of the wire's last cluster term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BoundarySign {
    /// h_init = −(−Z_{n−2}X_{n−1} + Σ ZXZ): relative minus on the boundary term.
    #[default]
    Printed,
    /// All cluster terms carry −1.
    Uniform,
}

/// Untwisted wire on n qubits.
pub fn build_wire(n: usize, sign: BoundarySign) -> Result<(TwistedGraph, InterpolationSpec)> {
    build_chain(&vec![0.0; n], sign)
}

/// Chain with the given angles; input 0 (term dropped), output n−1 (no field).
pub fn build_chain(angles: &[f64], sign: BoundarySign) -> Result<(TwistedGraph, InterpolationSpec)> {
    let n = angles.len();
    if n < 2 {
        return Err(Error::InvalidGraph(format!("wire needs n >= 2, got {n}")));
    }
    let edges = (0..n - 1).map(|i| [i, i + 1]).collect();
    let g = TwistedGraph::new(angles.to_vec(), edges, vec![0], vec![n - 1], vec![0])?;
    let mut spec = InterpolationSpec::from_graph(&g);
    if sign == BoundarySign::Printed {
        if let Some(t) = spec.h_init.iter_mut().find(|t| t.factor_on(n - 1).is_some_and(|f| f.flips())) {
            t.coeff = -t.coeff;
        }
    }
    Ok((g, spec))
}

/// Site (i, j) of an L×L lattice, row-major.
pub fn site(l: usize, i: usize, j: usize) -> usize {
    i * l + j
}

fn angles_close(a: f64, b: f64) -> bool {
    let d = wrap_angle(a - b);
    d < 1e-12 || TAU - d < 1e-12
}

/// L×L square lattice, all cluster terms kept, field on every site.
pub fn build_square_lattice(
    l: usize,
    angles: &[f64],
    dual_symmetric: bool,
) -> Result<(TwistedGraph, InterpolationSpec)> {
    if l < 2 {
        return Err(Error::InvalidGraph(format!("lattice side {l} < 2")));
    }
    if angles.len() != l * l {
        return Err(Error::InvalidGraph(format!("{} angles for {} sites", angles.len(), l * l)));
    }
    if dual_symmetric {
        for i in 0..l {
            for j in 0..i {
                if !angles_close(angles[site(l, i, j)], angles[site(l, j, i)]) {
                    return Err(Error::Symmetry(format!("θ({i},{j}) != θ({j},{i})")));
                }
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..l {
        for j in 0..l {
            if j + 1 < l {
                edges.push([site(l, i, j), site(l, i, j + 1)]);
            }
            if i + 1 < l {
                edges.push([site(l, i, j), site(l, i + 1, j)]);
            }
        }
    }
    let g = TwistedGraph::new(angles.to_vec(), edges, vec![], vec![], vec![])?;
    let spec = InterpolationSpec::from_graph(&g);
    Ok((g, spec))
}

/// Chain angles uniform in [0, 2π) on vertices 1..n−2 with θ_v = θ_{n−1−v}; ends untwisted.
pub fn random_symmetric_chain_angles<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut a = vec![0.0; n];
    for v in 1..n.saturating_sub(1) {
        let w = n - 1 - v;
        if w < v {
            break;
        }
        let t = rng.gen::<f64>() * TAU;
        a[v] = t;
        a[w] = t;
    }
    a
}

/// Lattice angles uniform in [0, 2π) with θ(i,j) = θ(j,i).
pub fn random_dual_symmetric_angles<R: Rng>(l: usize, rng: &mut R) -> Vec<f64> {
    let mut a = vec![0.0; l * l];
    for i in 0..l {
        for j in 0..=i {
            let t = rng.gen::<f64>() * TAU;
            a[site(l, i, j)] = t;
            a[site(l, j, i)] = t;
        }
    }
    a
}
