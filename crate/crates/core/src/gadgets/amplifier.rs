use serde::{Deserialize, Serialize};

use super::tableau::{graph_stabilizers, Membership, SignedPauli, StabilizerTableau};
use crate::core_model::{Factor, InterpolationSpec, PauliSum, PauliTerm, TwistedGraph};
use crate::error::{Error, Result};
use crate::spectral_ed::{adiabatic_evolve, prepare_by_projection, Ramp, Sweep};

/// Measurement amplifier tree. Vertex 0 is the root r, vertex 1 its child r′.
#[derive(Clone, Debug, PartialEq)]
pub struct Amplifier {
    pub graph: TwistedGraph,
    pub levels: usize,
    pub root: usize,
    pub root_child: usize,
    pub leaves: Vec<usize>,
    /// Non-leaf vertices, where the X field is turned on.
    pub field_support: Vec<usize>,
    /// Parent of each vertex (root has none).
    pub parent: Vec<Option<usize>>,
}

/// Root r (degree 1) – r′ (degree 3) – two branches per degree-3 node, each a
/// degree-2 vertex followed by another degree-3 node or, at the last level, a leaf.
pub fn build_amplifier(levels: usize) -> Result<Amplifier> {
    if levels < 1 {
        return Err(Error::OutOfRange { what: "levels", value: 0.0 });
    }
    if 2 + 4 * ((1usize << levels) - 1) > 63 {
        return Err(Error::TooLarge(format!("{levels} levels")));
    }
    let mut parent: Vec<Option<usize>> = vec![None, Some(0)];
    let mut edges = vec![[0, 1]];
    let add = |p: usize, parent: &mut Vec<Option<usize>>, edges: &mut Vec<[usize; 2]>| {
        parent.push(Some(p));
        let v = parent.len() - 1;
        edges.push([p, v]);
        v
    };
    let mut frontier = vec![1usize];
    let mut leaves = Vec::new();
    for level in 1..=levels {
        let mut next = Vec::new();
        for &node in &frontier {
            for _ in 0..2 {
                let a = add(node, &mut parent, &mut edges);
                let b = add(a, &mut parent, &mut edges);
                if level == levels {
                    leaves.push(b);
                } else {
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    let n = parent.len();
    let graph = TwistedGraph::new(vec![0.0; n], edges, vec![0], leaves.clone(), vec![0])?;
    let field_support = (0..n).filter(|v| !leaves.contains(v)).collect();
    Ok(Amplifier { graph, levels, root: 0, root_child: 1, leaves, field_support, parent })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifierReport {
    pub qubits: usize,
    pub leaves: usize,
    /// Every leaf pair Z_iZ_j lies in the post-field code.
    pub repetition_stabilizers: bool,
    /// Independent leaf-only generators of the post-field code.
    pub repetition_generators: usize,
    /// Z̄ times degree-3 and leaf stabilizers has X/I off the leaves and X on every leaf.
    pub logical_z_transport: bool,
    /// X̄ times the degree-2 stabilizers on each root-to-leaf path gives X on the path and Z on the leaf,
    /// and the results for different leaves are equivalent.
    pub logical_x_paths: bool,
    /// E(X̄ = −1) − E(X̄ = +1) under −Σ Z_leaf after an ideal sweep.
    pub splitting: Option<f64>,
    /// The same from an explicit RK4 sweep.
    pub splitting_dynamic: Option<f64>,
    pub sweep_time: f64,
}

impl AmplifierReport {
    pub fn verdict(&self) -> Result<()> {
        let expected = 2.0 * self.leaves as f64;
        if !self.repetition_stabilizers {
            return Err(Error::Domain("repetition stabilizer missing".into()));
        }
        if !self.logical_z_transport || !self.logical_x_paths {
            return Err(Error::Domain("logical transport failed".into()));
        }
        if let Some(s) = self.splitting {
            if (s - expected).abs() > 1e-9 {
                return Err(Error::Domain(format!("splitting {s} != {expected}")));
            }
        }
        Ok(())
    }
}

fn mask(vs: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

/// Graph-stabilizer group of the non-root vertices (ground signs).
fn graph_group(a: &Amplifier) -> Result<StabilizerTableau> {
    let n = a.graph.n();
    let verts: Vec<usize> = (1..n).collect();
    StabilizerTableau::new(n, graph_stabilizers(n, a.graph.edges(), &verts))
}

/// Code stabilized after the field: X on non-leaves plus graph elements commuting with it.
pub fn post_field_code(a: &Amplifier) -> Result<StabilizerTableau> {
    let n = a.graph.n();
    let g = graph_group(a)?;
    let nl = mask(&a.field_support);
    let mut gens: Vec<SignedPauli> = a.field_support.iter().map(|&u| SignedPauli::single(n, u, 'X')).collect();
    for el in g.commutant_with_x_on(nl) {
        // strip the X part on non-leaves, leaving a leaf-only Z string
        let mut e = el;
        for &u in &a.field_support {
            if e.x >> u & 1 == 1 {
                e = e.mul(&SignedPauli::single(n, u, 'X'));
            }
        }
        gens.push(e);
    }
    // keep an independent subset
    let mut out: Vec<SignedPauli> = Vec::new();
    for p in gens {
        if p.x == 0 && p.z == 0 {
            continue;
        }
        let t = StabilizerTableau::new(n, out.clone())?;
        if !t.contains(&p).is_member() {
            out.push(p);
        }
    }
    StabilizerTableau::new(n, out)
}

fn path_to_root(a: &Amplifier, v: usize) -> Vec<usize> {
    let mut p = vec![v];
    let mut cur = v;
    while let Some(q) = a.parent[cur] {
        p.push(q);
        cur = q;
    }
    p.reverse();
    p
}

pub fn verify_amplifier(a: &Amplifier, sweep_time: Option<f64>) -> Result<AmplifierReport> {
    let n = a.graph.n();
    let leaf_mask = mask(&a.leaves);
    let nl_mask = mask(&a.field_support);

    // (a) repetition code on the leaves
    let post = post_field_code(a)?;
    let mut rep = true;
    for (i, &li) in a.leaves.iter().enumerate() {
        for &lj in &a.leaves[i + 1..] {
            let mut zz = SignedPauli::single(n, li, 'Z');
            zz = zz.mul(&SignedPauli::single(n, lj, 'Z'));
            rep &= matches!(post.contains(&zz), Membership::Member { .. });
        }
    }
    let repetition_generators = post.subgroup_rank_on(leaf_mask);

    // (b) logical transport
    let g = graph_group(a)?;
    let deg = |v: usize| a.graph.degree(v);
    let mut zbar = SignedPauli::single(n, a.root, 'Z');
    for v in 1..n {
        if deg(v) == 3 || a.leaves.contains(&v) {
            zbar = zbar.mul(&g.generators[v - 1]);
        }
    }
    let z_ok = zbar.z & nl_mask == 0 && zbar.x & leaf_mask == leaf_mask && zbar.z & leaf_mask == 0;
    let xbar = SignedPauli::from_term(n, &a.graph.vertex_operator(a.root, 1.0))?;
    let mut x_ok = true;
    let mut first: Option<SignedPauli> = None;
    for &leaf in &a.leaves {
        let path = path_to_root(a, leaf);
        let mut op = xbar;
        for &v in &path {
            if v != a.root && deg(v) == 2 {
                op = op.mul(&g.generators[v - 1]);
            }
        }
        let nonleaf_path: u64 = path.iter().filter(|&&v| v != leaf).fold(0, |m, &v| m | 1 << v);
        let form = op.z == 1 << leaf && op.x & !nonleaf_path == 0 && op.sign() == Some(1);
        x_ok &= form;
        match first {
            None => first = Some(op),
            Some(f) => x_ok &= g.contains(&f.mul(&op)) == Membership::Member { sign: 1 },
        }
    }

    // (c) exact splitting
    let (splitting, splitting_dynamic) = if n <= 14 {
        let ideal = ideal_splitting(a, &xbar)?;
        let dynamic = match sweep_time {
            Some(t) => Some(dynamic_splitting(a, &xbar, t)?),
            None => None,
        };
        (Some(ideal), dynamic)
    } else {
        (None, None)
    };
    Ok(AmplifierReport {
        qubits: n,
        leaves: a.leaves.len(),
        repetition_stabilizers: rep,
        repetition_generators,
        logical_z_transport: z_ok,
        logical_x_paths: x_ok,
        splitting,
        splitting_dynamic,
        sweep_time: sweep_time.unwrap_or(0.0),
    })
}

fn leaf_field(a: &Amplifier) -> PauliSum {
    let terms: Vec<PauliTerm> = a.leaves.iter().map(|&l| PauliTerm::single(-1.0, l, Factor::Z)).collect();
    PauliSum::new(a.graph.n(), &terms)
}

/// Final state of an ideal sweep: X = +1 on non-leaves with every conserved
/// transported logical string fixed by the initial X̄ eigenvalue.
fn ideal_splitting(a: &Amplifier, xbar: &SignedPauli) -> Result<f64> {
    let n = a.graph.n();
    let g = graph_group(a)?;
    let nl = mask(&a.field_support);
    let carried = g
        .transport(xbar, nl)
        .ok_or_else(|| Error::Domain("logical X cannot be carried off the non-leaves".into()))?;
    let conserved: Vec<SignedPauli> = g.commutant_with_x_on(nl);
    let hz = leaf_field(a);
    let mut energies = [0.0; 2];
    for (slot, sign) in [(0usize, 1.0), (1, -1.0)] {
        let mut cons: Vec<(PauliTerm, f64)> =
            a.field_support.iter().map(|&u| (PauliTerm::single(1.0, u, Factor::X), 1.0)).collect();
        cons.push(fix(&carried, sign)?);
        for c in &conserved {
            cons.push(fix(c, 1.0)?);
        }
        let psi = prepare_by_projection(n, &[], &[], &cons, 3 + slot as u64)?;
        energies[slot] = hz.expectation(&psi);
    }
    Ok(energies[1] - energies[0])
}

/// Constraint fixing the signed string `p` to `value`.
fn fix(p: &SignedPauli, value: f64) -> Result<(PauliTerm, f64)> {
    let t = p.unsigned().to_term().ok_or_else(|| Error::Domain(format!("{p} is not Hermitian")))?;
    let s = p.sign().ok_or_else(|| Error::Domain(format!("{p} is not Hermitian")))?;
    Ok((t, value * s as f64))
}

fn dynamic_splitting(a: &Amplifier, xbar: &SignedPauli, total_time: f64) -> Result<f64> {
    let n = a.graph.n();
    let spec = InterpolationSpec::from_graph(&a.graph);
    let hz = leaf_field(a);
    let sweep = Sweep::Ramp { total_time, ramp: Ramp::Smoother };
    let xt = xbar.unsigned().to_term().expect("Hermitian");
    let mut e = [0.0; 2];
    for (slot, sign) in [(0usize, 1.0), (1, -1.0)] {
        let psi0 = prepare_by_projection(n, &spec.h_init, &[], &[(xt.clone(), sign)], 21 + slot as u64)?;
        let out = adiabatic_evolve(&spec, &sweep, &psi0)?.state;
        e[slot] = hz.expectation(&out);
    }
    Ok(e[1] - e[0])
}
