use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pauli::{wrap_angle, Factor, PauliTerm};
use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 4;
/// Graphs this large only make sense for MPS chains; dense tools cap far lower.
pub const MAX_VERTICES: usize = 4096;

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    angles: Vec<f64>,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    inputs: Vec<usize>,
    #[serde(default)]
    outputs: Vec<usize>,
    #[serde(default)]
    dropped: Vec<usize>,
}

impl TryFrom<RawGraph> for TwistedGraph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        TwistedGraph::new(r.angles, r.edges, r.inputs, r.outputs, r.dropped).and_then(|g| {
            if g.n != r.n {
                Err(Error::InvalidGraph(format!("n = {} but {} angles", r.n, g.n)))
            } else {
                Ok(g)
            }
        })
    }
}

/// Twisted cluster graph. Vertices are 0..n with angles in [0, 2π).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct TwistedGraph {
    n: usize,
    angles: Vec<f64>,
    edges: Vec<[usize; 2]>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    dropped: Vec<usize>,
}

impl TwistedGraph {
    pub fn new(
        angles: Vec<f64>,
        edges: Vec<[usize; 2]>,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        dropped: Vec<usize>,
    ) -> Result<Self> {
        let n = angles.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::TooLarge(format!("{n} vertices")));
        }
        let mut angs = Vec::with_capacity(n);
        for a in angles {
            if !a.is_finite() {
                return Err(Error::InvalidGraph("non-finite angle".into()));
            }
            angs.push(wrap_angle(a));
        }
        let mut set = BTreeSet::new();
        for [a, b] in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range")));
            }
            if !set.insert([a.min(b), a.max(b)]) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a},{b})")));
            }
        }
        let mut deg = vec![0usize; n];
        for [a, b] in &set {
            deg[*a] += 1;
            deg[*b] += 1;
        }
        if let Some(v) = deg.iter().position(|&d| d > MAX_DEGREE) {
            return Err(Error::InvalidGraph(format!("vertex {v} has degree {}", deg[v])));
        }
        for (what, list) in [("input", &inputs), ("output", &outputs), ("dropped", &dropped)] {
            if let Some(v) = list.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidGraph(format!("{what} vertex {v} out of range")));
            }
        }
        let dropped: BTreeSet<usize> = dropped.into_iter().collect();
        Ok(TwistedGraph {
            n,
            angles: angs,
            edges: set.into_iter().collect(),
            inputs,
            outputs,
            dropped: dropped.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }
    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&[a, b]| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e[0] == v || e[1] == v).count()
    }

    /// The stabilizer [θ_v]_v ∏_{w~v} Z_w with coefficient `coeff`.
    pub fn vertex_operator(&self, v: usize, coeff: f64) -> PauliTerm {
        let mut f = vec![(v, Factor::rotated(self.angles[v]))];
        f.extend(self.neighbors(v).into_iter().map(|w| (w, Factor::Z)));
        PauliTerm::new(coeff, f).expect("valid vertex operator")
    }

    /// −[θ_v]_v ∏ Z_w for every vertex whose term is not dropped.
    pub fn cluster_terms(&self) -> Vec<PauliTerm> {
        (0..self.n)
            .filter(|v| self.dropped.binary_search(v).is_err())
            .map(|v| self.vertex_operator(v, -1.0))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidGraph(e.to_string()))
    }
}
