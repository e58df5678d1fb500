//! Circuit text format, circuit-to-graph compilation and reference unitaries.
//!
//! ```text
//! QUBITS 2 INPUTS 0,1
//! H 0        # comment
//! RZ 1 pi/4
//! CZ 0 1
//! ```

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::core_model::TwistedGraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Prep(usize),
    H(usize),
    Rz(usize, f64),
    Cz(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub n_qubits: usize,
    /// Logical input qubits in order; the rest start with PREP.
    pub inputs: Vec<usize>,
    pub ops: Vec<Gate>,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Numbers, or `[-][k*]pi[/d]`.
fn parse_angle(tok: &str) -> Option<f64> {
    if let Ok(v) = tok.parse::<f64>() {
        return Some(v);
    }
    let (neg, body) = match tok.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, tok),
    };
    let lower = body.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().ok()?),
        None => (lower.clone(), 1.0),
    };
    let mul = if num == "pi" {
        1.0
    } else {
        num.strip_suffix("*pi")?.parse::<f64>().ok()?
    };
    let v = mul * PI / den;
    Some(if neg { -v } else { v })
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
}

fn tokenize(line_no: usize, raw: &str) -> Tokens<'_> {
    let text = raw.split('#').next().unwrap_or("");
    let mut items = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                items.push((s + 1, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        items.push((s + 1, &text[s..]));
    }
    Tokens { line: line_no, items }
}

impl Tokens<'_> {
    fn qubit(&self, i: usize, n: usize) -> Result<usize> {
        let (col, t) = self.items[i];
        let q: usize = t.parse().map_err(|_| err(self.line, col, format!("bad qubit index {t:?}")))?;
        if q >= n {
            return Err(err(self.line, col, format!("qubit {q} not declared (QUBITS {n})")));
        }
        Ok(q)
    }

    fn arity(&self, k: usize) -> Result<()> {
        if self.items.len() != k + 1 {
            let col = self.items.get(k + 1).map(|t| t.0).unwrap_or(self.items[0].0);
            return Err(err(
                self.line,
                col,
                format!("{} takes {k} argument(s), got {}", self.items[0].1, self.items.len() - 1),
            ));
        }
        Ok(())
    }
}

pub fn parse_circuit(text: &str) -> Result<CircuitIR> {
    let mut header: Option<(usize, Option<Vec<usize>>)> = None;
    let mut ops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tk = tokenize(line, raw);
        if tk.items.is_empty() {
            continue;
        }
        let (col, head) = tk.items[0];
        let mnemonic = head.to_ascii_uppercase();
        let Some((n, _)) = header.as_ref() else {
            if mnemonic != "QUBITS" {
                return Err(err(line, col, "expected header `QUBITS n [INPUTS i,j,...]`"));
            }
            let (c1, t1) = *tk.items.get(1).ok_or_else(|| err(line, col, "QUBITS needs a count"))?;
            let n: usize = t1.parse().map_err(|_| err(line, c1, format!("bad qubit count {t1:?}")))?;
            if n == 0 {
                return Err(err(line, c1, "QUBITS must be positive"));
            }
            let inputs = match tk.items.get(2) {
                None => None,
                Some(&(c2, t2)) if t2.eq_ignore_ascii_case("INPUTS") => {
                    let list: String = tk.items[3..].iter().map(|t| t.1).collect::<Vec<_>>().join("");
                    let mut v = Vec::new();
                    for part in list.split(',').filter(|p| !p.is_empty()) {
                        let q: usize = part
                            .parse()
                            .map_err(|_| err(line, c2, format!("bad input index {part:?}")))?;
                        if q >= n {
                            return Err(err(line, c2, format!("input {q} not declared")));
                        }
                        v.push(q);
                    }
                    Some(v)
                }
                Some(&(c2, t2)) => return Err(err(line, c2, format!("unexpected {t2:?} in header"))),
            };
            header = Some((n, inputs));
            continue;
        };
        let n = *n;
        let gate = match mnemonic.as_str() {
            "PREP" => {
                tk.arity(1)?;
                Gate::Prep(tk.qubit(1, n)?)
            }
            "H" => {
                tk.arity(1)?;
                Gate::H(tk.qubit(1, n)?)
            }
            "RZ" => {
                tk.arity(2)?;
                let q = tk.qubit(1, n)?;
                let (c, t) = tk.items[2];
                let th = parse_angle(t).ok_or_else(|| err(line, c, format!("bad angle {t:?}")))?;
                if !th.is_finite() {
                    return Err(err(line, c, "angle must be finite"));
                }
                Gate::Rz(q, th)
            }
            "CZ" => {
                tk.arity(2)?;
                let (a, b) = (tk.qubit(1, n)?, tk.qubit(2, n)?);
                if a == b {
                    return Err(err(line, tk.items[2].0, "CZ needs two distinct qubits"));
                }
                Gate::Cz(a, b)
            }
            "QUBITS" => return Err(err(line, col, "duplicate header")),
            other => return Err(err(line, col, format!("unknown mnemonic {other:?}"))),
        };
        ops.push(gate);
    }
    let (n, inputs) = header.ok_or_else(|| err(1, 1, "missing `QUBITS` header"))?;
    let inputs = inputs.unwrap_or_else(|| {
        (0..n)
            .filter(|&q| first_op(&ops, q).map(|g| !matches!(g, Gate::Prep(_))).unwrap_or(true))
            .collect()
    });
    let c = CircuitIR { n_qubits: n, inputs, ops };
    c.validate()?;
    Ok(c)
}

fn first_op(ops: &[Gate], q: usize) -> Option<Gate> {
    ops.iter().copied().find(|g| match *g {
        Gate::Prep(a) | Gate::H(a) | Gate::Rz(a, _) => a == q,
        Gate::Cz(a, b) => a == q || b == q,
    })
}

impl CircuitIR {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        for g in &self.ops {
            let qs: Vec<usize> = match *g {
                Gate::Prep(a) | Gate::H(a) => vec![a],
                Gate::Rz(a, t) => {
                    if !t.is_finite() {
                        return bad("non-finite angle".into());
                    }
                    vec![a]
                }
                Gate::Cz(a, b) => vec![a, b],
            };
            if let Some(q) = qs.iter().find(|&&q| q >= self.n_qubits) {
                return bad(format!("gate acts on undeclared qubit {q}"));
            }
        }
        for q in 0..self.n_qubits {
            let is_input = self.inputs.contains(&q);
            let starts_prep = matches!(first_op(&self.ops, q), Some(Gate::Prep(_)));
            if is_input && starts_prep {
                return bad(format!("input qubit {q} is also prepared"));
            }
            if !is_input && !starts_prep {
                return bad(format!("qubit {q} is neither an input nor prepared"));
            }
            let preps = self.ops.iter().filter(|g| matches!(g, Gate::Prep(a) if *a == q)).count();
            if preps > 1 {
                return bad(format!("qubit {q} prepared more than once"));
            }
        }
        Ok(())
    }
}

struct Builder {
    angles: Vec<f64>,
    edges: Vec<[usize; 2]>,
    ends: Vec<Option<usize>>,
}

impl Builder {
    fn vertex(&mut self, theta: f64) -> usize {
        self.angles.push(theta);
        self.angles.len() - 1
    }

    fn extend(&mut self, q: usize, theta: f64) {
        let v = self.vertex(theta);
        let end = self.ends[q].expect("qubit started");
        self.edges.push([end, v]);
        self.ends[q] = Some(v);
    }
}

/// Compile a circuit: each appended vertex with angle θ applies R_θ·H to its chain.
pub fn compile(c: &CircuitIR) -> Result<TwistedGraph> {
    c.validate()?;
    let mut b = Builder { angles: vec![], edges: vec![], ends: vec![None; c.n_qubits] };
    let mut inputs = Vec::new();
    let mut dropped = Vec::new();
    for &q in &c.inputs {
        let v = b.vertex(0.0);
        b.ends[q] = Some(v);
        inputs.push(v);
        dropped.push(v);
    }
    for g in &c.ops {
        match *g {
            Gate::Prep(q) => {
                let v = b.vertex(0.0);
                b.ends[q] = Some(v);
            }
            Gate::H(q) => b.extend(q, 0.0),
            Gate::Rz(q, t) => {
                b.extend(q, 0.0);
                b.extend(q, t);
            }
            Gate::Cz(p, q) => {
                let (ep, eq) = (b.ends[p].expect("started"), b.ends[q].expect("started"));
                b.edges.push([ep, eq]);
                for r in [p, q] {
                    b.extend(r, 0.0);
                    b.extend(r, 0.0);
                }
            }
        }
    }
    let outputs: Vec<usize> = b.ends.iter().map(|e| e.expect("every qubit started")).collect();
    TwistedGraph::new(b.angles, b.edges, inputs, outputs, dropped)
}

pub const MAX_REFERENCE_QUBITS: usize = 10;

fn apply_1q(u: &mut DMatrix<C>, q: usize, g: [[C; 2]; 2]) {
    let d = u.nrows();
    let bit = 1usize << q;
    for col in 0..d {
        for r in 0..d {
            if r & bit == 0 {
                let (a0, a1) = (u[(r, col)], u[(r | bit, col)]);
                u[(r, col)] = g[0][0] * a0 + g[0][1] * a1;
                u[(r | bit, col)] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
    }
}

/// Dense circuit unitary (qubit q is bit q). PREP contributes nothing here.
pub fn compiled_unitary_reference(c: &CircuitIR) -> Result<DMatrix<C>> {
    if c.n_qubits > MAX_REFERENCE_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits > {MAX_REFERENCE_QUBITS}", c.n_qubits)));
    }
    let d = 1usize << c.n_qubits;
    let mut u = DMatrix::<C>::identity(d, d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C::new(0.0, 0.0);
    for g in &c.ops {
        match *g {
            Gate::Prep(_) => {}
            Gate::H(q) => apply_1q(&mut u, q, [[C::new(h, 0.0), C::new(h, 0.0)], [C::new(h, 0.0), C::new(-h, 0.0)]]),
            Gate::Rz(q, t) => apply_1q(
                &mut u,
                q,
                [[C::from_polar(1.0, -t / 2.0), z], [z, C::from_polar(1.0, t / 2.0)]],
            ),
            Gate::Cz(a, b) => {
                let m = (1usize << a) | (1usize << b);
                for r in 0..d {
                    if r & m == m {
                        for col in 0..d {
                            u[(r, col)] = -u[(r, col)];
                        }
                    }
                }
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let c = parse_circuit("QUBITS 1 INPUTS 0\nH 0\n").unwrap();
        assert_eq!(c.ops, vec![Gate::H(0)]);
        let c = parse_circuit("QUBITS 1\nRZ 0 0.785398\n").unwrap();
        assert_eq!(c.ops, vec![Gate::Rz(0, 0.785398)]);
        let c = parse_circuit("QUBITS 2\nCZ 0 1 # bridge\n").unwrap();
        assert_eq!(c.ops, vec![Gate::Cz(0, 1)]);
        assert_eq!(c.inputs, vec![0, 1]);
        let c = parse_circuit("# header next\nQUBITS 2 INPUTS 0\nPREP 1\nRZ 1 -pi/4\n").unwrap();
        assert_eq!(c.inputs, vec![0]);
        assert!(matches!(c.ops[1], Gate::Rz(1, t) if (t + PI / 4.0).abs() < 1e-15));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_circuit("QUBITS 1\nFOO 0\n") {
            Err(Error::Parse { line: 2, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_circuit("QUBITS 1\n  H 0 1\n") {
            Err(Error::Parse { line: 2, col: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_circuit("QUBITS 1\nRZ 0 nan\n") {
            Err(Error::Parse { line: 2, col: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_circuit("QUBITS 1\nH 3\n").is_err());
    }

    #[test]
    fn chain_lengths() {
        let g = compile(&parse_circuit("QUBITS 1\nH 0\n").unwrap()).unwrap();
        assert_eq!(g.n(), 2);
        let g = compile(&parse_circuit("QUBITS 1\nRZ 0 0\n").unwrap()).unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.angles().iter().all(|&a| a == 0.0));
        let g = compile(&parse_circuit("QUBITS 1\nRZ 0 pi/4\n").unwrap()).unwrap();
        assert_eq!(g.angles(), &[0.0, 0.0, PI / 4.0]);
        assert_eq!(g.inputs(), &[0]);
        assert_eq!(g.outputs(), &[2]);
    }

    #[test]
    fn reference_unitaries() {
        let u = compiled_unitary_reference(&parse_circuit("QUBITS 1\nRZ 0 pi\n").unwrap()).unwrap();
        assert!((u[(0, 0)] - C::new(0.0, -1.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - C::new(0.0, 1.0)).norm() < 1e-15);
        let u = compiled_unitary_reference(&parse_circuit("QUBITS 2\nH 0\nCZ 0 1\n").unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // columns |b0 b1>, qubit 0 is bit 0
        assert!((u[(3, 2)].re + h).abs() < 1e-15);
        assert!((u[(1, 0)].re - h).abs() < 1e-15);
    }
}
