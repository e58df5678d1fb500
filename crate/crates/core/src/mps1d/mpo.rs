use num_complex::Complex64 as C;

use crate::core_model::{Factor, PauliTerm};
use crate::error::{Error, Result};

pub(crate) type Op = [[C; 2]; 2];

const ID: Op = [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)]];

/// One nonzero MPO entry W[a → b] = op.
#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub a: usize,
    pub b: usize,
    pub op: Op,
}

/// Finite-automaton MPO. Channel 0 means "no term started", channel 1 "term
/// finished"; every other channel carries one term across one bond. The left
/// boundary selects channel 0 and the right boundary channel 1.
#[derive(Clone, Debug)]
pub struct Mpo {
    pub n: usize,
    /// Bond dimensions, length n + 1.
    pub bonds: Vec<usize>,
    pub(crate) sites: Vec<Vec<Entry>>,
    /// Channels selected at the left and right edges.
    pub(crate) left: usize,
    pub(crate) right: usize,
}

fn scale(op: Op, c: f64) -> Op {
    op.map(|r| r.map(|z| z * c))
}

fn op_mul(a: &Op, b: &Op) -> Op {
    let mut m = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

impl Mpo {
    pub fn from_terms(n: usize, terms: &[PauliTerm]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("MPO needs at least two sites".into()));
        }
        let mut bonds = vec![2usize; n + 1];
        let mut sites: Vec<Vec<Entry>> = (0..n)
            .map(|_| vec![Entry { a: 0, b: 0, op: ID }, Entry { a: 1, b: 1, op: ID }])
            .collect();
        for t in terms {
            if t.coeff == 0.0 || t.factors.is_empty() {
                continue;
            }
            let lo = t.factors.iter().map(|f| f.0).min().unwrap();
            let hi = t.max_vertex();
            if hi >= n {
                return Err(Error::InvalidTerm(format!("{t} acts outside {n} sites")));
            }
            let op_at = |v: usize| t.factor_on(v).map_or(ID, Factor::matrix);
            if lo == hi {
                sites[lo].push(Entry { a: 0, b: 1, op: scale(op_at(lo), t.coeff) });
                continue;
            }
            // one fresh channel per crossed bond
            let mut prev = 0;
            for v in lo..=hi {
                let op = if v == lo { scale(op_at(v), t.coeff) } else { op_at(v) };
                let next = if v == hi {
                    1
                } else {
                    bonds[v + 1] += 1;
                    bonds[v + 1] - 1
                };
                sites[v].push(Entry { a: prev, b: next, op });
                prev = next;
            }
        }
        Ok(Mpo { n, bonds, sites, left: 0, right: 1 })
    }

    /// The MPO of self², with channel (a, a′) ↦ a·D′ + a′.
    pub fn squared(&self) -> Mpo {
        let bonds: Vec<usize> = self.bonds.iter().map(|d| d * d).collect();
        let sites = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, es)| {
                let dr = self.bonds[i + 1];
                let mut out = Vec::with_capacity(es.len() * es.len());
                for e1 in es {
                    for e2 in es {
                        out.push(Entry { a: e1.a * self.bonds[i] + e2.a, b: e1.b * dr + e2.b, op: op_mul(&e1.op, &e2.op) });
                    }
                }
                out
            })
            .collect();
        Mpo {
            n: self.n,
            bonds,
            sites,
            left: self.left * self.bonds[0] + self.left,
            right: self.right * self.bonds[self.n] + self.right,
        }
    }

    pub fn max_bond(&self) -> usize {
        *self.bonds.iter().max().unwrap()
    }
}
