//! Signed Pauli strings and stabilizer tableaux over GF(2).

use std::fmt;

use crate::core_model::{Factor, PauliTerm};
use crate::error::{Error, Result};

/// i^phase · ∏_q X^{x_q} Z^{z_q}, qubits up to 64.
///
/// The stored operator is i^phase X^x Z^z (X part to the left), so Y = i·XZ
/// has phase 1 with both bits set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub n: usize,
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl SignedPauli {
    pub fn identity(n: usize) -> Self {
        SignedPauli { n, x: 0, z: 0, phase: 0 }
    }

    /// Parse strings like "+XIZ", "-YY", "iZ"; character k acts on qubit k.
    pub fn parse(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let mut p = SignedPauli::identity(body.len());
        p.phase = phase;
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.x |= 1 << q,
                'Z' => p.z |= 1 << q,
                'Y' => {
                    p.x |= 1 << q;
                    p.z |= 1 << q;
                    p.phase = (p.phase + 1) % 4;
                }
                _ => return Err(Error::Domain(format!("bad Pauli character {c:?}"))),
            }
        }
        Ok(p)
    }

    pub fn single(n: usize, q: usize, c: char) -> Self {
        let mut s = vec!['I'; n];
        s[q] = c;
        SignedPauli::parse(&s.into_iter().collect::<String>()).expect("valid")
    }

    /// From a term whose factors are X, Y, Z or rotations by multiples of π/2 and |coeff| = 1.
    pub fn from_term(n: usize, t: &PauliTerm) -> Result<Self> {
        if n > 64 {
            return Err(Error::TooLarge(format!("{n} qubits")));
        }
        let mut p = SignedPauli::identity(n);
        if t.coeff.abs() != 1.0 {
            return Err(Error::InvalidTerm(format!("coefficient {} is not ±1", t.coeff)));
        }
        if t.coeff < 0.0 {
            p.phase = 2;
        }
        for &(v, f) in &t.factors {
            let c = match f {
                Factor::X => 'X',
                Factor::Y => 'Y',
                Factor::Z => 'Z',
                Factor::Rot(th) => {
                    let q = th / std::f64::consts::FRAC_PI_2;
                    if (q - q.round()).abs() > 1e-12 {
                        return Err(Error::InvalidTerm(format!("rotation {th} is not a Pauli")));
                    }
                    match (q.round() as i64).rem_euclid(4) {
                        0 => 'X',
                        1 => 'Y',
                        2 => {
                            p.phase = (p.phase + 2) % 4;
                            'X'
                        }
                        _ => {
                            p.phase = (p.phase + 2) % 4;
                            'Y'
                        }
                    }
                }
            };
            p = p.mul(&SignedPauli::single(n, v, c));
        }
        Ok(p)
    }

    /// Convert to a term (Hermitian strings only).
    pub fn to_term(&self) -> Option<PauliTerm> {
        let mut ph = self.phase as i32;
        let mut f = Vec::new();
        for q in 0..self.n {
            let (x, z) = (self.x >> q & 1, self.z >> q & 1);
            match (x, z) {
                (1, 0) => f.push((q, Factor::X)),
                (0, 1) => f.push((q, Factor::Z)),
                (1, 1) => {
                    f.push((q, Factor::Y));
                    ph -= 1;
                }
                _ => {}
            }
        }
        let coeff = match ph.rem_euclid(4) {
            0 => 1.0,
            2 => -1.0,
            _ => return None,
        };
        if f.is_empty() {
            return None;
        }
        PauliTerm::new(coeff, f).ok()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn commutes(&self, o: &SignedPauli) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 0
    }

    /// self · o
    pub fn mul(&self, o: &SignedPauli) -> SignedPauli {
        // X^a Z^b X^c Z^d = (-1)^{b·c} X^{a+c} Z^{b+d}
        let sign = (self.z & o.x).count_ones() % 2;
        SignedPauli {
            n: self.n.max(o.n),
            x: self.x ^ o.x,
            z: self.z ^ o.z,
            phase: ((self.phase + o.phase) as u32 + 2 * sign) as u8 % 4,
        }
    }

    /// Sign ±1 if Hermitian, else None.
    pub fn sign(&self) -> Option<i8> {
        let ph = (self.phase as u32 + 3 * (self.x & self.z).count_ones()) % 4;
        match ph {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn negated(&self) -> SignedPauli {
        SignedPauli { phase: (self.phase + 2) % 4, ..*self }
    }

    /// Same operator without its sign (Hermitian form with +).
    pub fn unsigned(&self) -> SignedPauli {
        SignedPauli { phase: ((self.x & self.z).count_ones() % 4) as u8, ..*self }
    }

    /// Dense 2^n × 2^n matrix (qubit q is bit q), for small n.
    pub fn dense(&self) -> nalgebra::DMatrix<num_complex::Complex64> {
        use num_complex::Complex64 as C;
        let d = 1usize << self.n;
        let mut m = nalgebra::DMatrix::zeros(d, d);
        let pre = match self.phase {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        };
        for b in 0..d {
            // X^x Z^z |b> = (-1)^{z·b} |b ^ x>
            let s = if (self.z & b as u64).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(b ^ self.x as usize, b)] = pre * s;
        }
        m
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: String = (0..self.n)
            .map(|q| match (self.x >> q & 1, self.z >> q & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect();
        match self.sign() {
            Some(1) => write!(f, "+{body}"),
            Some(_) => write!(f, "-{body}"),
            None => {
                let ph = (self.phase as u32 + 3 * (self.x & self.z).count_ones()) % 4;
                write!(f, "{}{body}", if ph == 1 { "+i" } else { "-i" })
            }
        }
    }
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The queried string is ±(product of generators); the sign is that of the product.
    Member { sign: i8 },
    NonMember,
}

impl Membership {
    pub fn is_member(self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Independent commuting signed generators plus designated logical pairs.
#[derive(Clone, Debug)]
pub struct StabilizerTableau {
    pub n: usize,
    pub generators: Vec<SignedPauli>,
    pub logical_x: Vec<SignedPauli>,
    pub logical_z: Vec<SignedPauli>,
}

fn bits(p: &SignedPauli) -> u128 {
    (p.x as u128) | ((p.z as u128) << 64)
}

/// Express `target` bits as a GF(2) combination of `rows`; returns the selection.
pub(crate) fn gf2_solve(rows: &[u128], target: u128) -> Option<Vec<bool>> {
    let k = rows.len();
    // later pivot rows are reduced against earlier ones, so one pass in insertion order suffices
    let mut basis: Vec<(u32, u128, Vec<bool>)> = Vec::new();
    let reduce = |basis: &[(u32, u128, Vec<bool>)], mut v: u128, comb: &mut Vec<bool>| {
        for (p, r, c) in basis {
            if v >> p & 1 == 1 {
                v ^= r;
                comb.iter_mut().zip(c).for_each(|(x, y)| *x ^= y);
            }
        }
        v
    };
    for (i, &r) in rows.iter().enumerate() {
        let mut comb = vec![false; k];
        comb[i] = true;
        let v = reduce(&basis, r, &mut comb);
        if v != 0 {
            basis.push((127 - v.leading_zeros(), v, comb));
        }
    }
    let mut comb = vec![false; k];
    let v = reduce(&basis, target, &mut comb);
    (v == 0).then_some(comb)
}

/// Basis of combinations of `rows` that sum to zero.
pub(crate) fn gf2_kernel(rows: &[u128]) -> Vec<Vec<bool>> {
    let k = rows.len();
    let mut basis: Vec<(u32, u128, Vec<bool>)> = Vec::new();
    let mut kernel = Vec::new();
    for (i, &r) in rows.iter().enumerate() {
        let mut v = r;
        let mut comb = vec![false; k];
        comb[i] = true;
        for (p, row, c) in &basis {
            if v >> p & 1 == 1 {
                v ^= row;
                comb.iter_mut().zip(c).for_each(|(x, y)| *x ^= y);
            }
        }
        if v == 0 {
            kernel.push(comb);
        } else {
            basis.push((127 - v.leading_zeros(), v, comb));
        }
    }
    kernel
}

pub(crate) fn gf2_rank(rows: &[u128]) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

impl StabilizerTableau {
    pub fn new(n: usize, generators: Vec<SignedPauli>) -> Result<Self> {
        if n > 64 {
            return Err(Error::TooLarge(format!("{n} qubits")));
        }
        for (i, a) in generators.iter().enumerate() {
            if a.sign().is_none() {
                return Err(Error::Domain(format!("generator {a} is not Hermitian")));
            }
            for b in &generators[i + 1..] {
                if !a.commutes(b) {
                    return Err(Error::Domain(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        let rows: Vec<u128> = generators.iter().map(bits).collect();
        if gf2_rank(&rows) != generators.len() {
            return Err(Error::Domain("generators are not independent".into()));
        }
        Ok(StabilizerTableau { n, generators, logical_x: vec![], logical_z: vec![] })
    }

    pub fn with_logicals(mut self, xs: Vec<SignedPauli>, zs: Vec<SignedPauli>) -> Result<Self> {
        for l in xs.iter().chain(&zs) {
            if let Some(g) = self.generators.iter().find(|g| !g.commutes(l)) {
                return Err(Error::Domain(format!("logical {l} anticommutes with {g}")));
            }
        }
        for (i, x) in xs.iter().enumerate() {
            for (j, z) in zs.iter().enumerate() {
                if x.commutes(z) == (i == j) {
                    return Err(Error::Domain(format!("logical pair ({i},{j}) has wrong commutation")));
                }
            }
        }
        self.logical_x = xs;
        self.logical_z = zs;
        Ok(self)
    }

    /// Product of the selected generators, in generator order.
    pub fn product(&self, select: &[bool]) -> SignedPauli {
        self.generators
            .iter()
            .zip(select)
            .filter(|(_, &s)| s)
            .fold(SignedPauli::identity(self.n), |acc, (g, _)| acc.mul(g))
    }

    /// Whether ±p is a product of generators; the sign is that of the product.
    pub fn contains(&self, p: &SignedPauli) -> Membership {
        match self.express(p) {
            None => Membership::NonMember,
            Some(prod) => Membership::Member { sign: prod.sign().unwrap_or(1) },
        }
    }

    /// The product of generators equal to ±p, if any.
    pub fn express(&self, p: &SignedPauli) -> Option<SignedPauli> {
        let rows: Vec<u128> = self.generators.iter().map(bits).collect();
        gf2_solve(&rows, bits(p)).map(|sel| self.product(&sel))
    }

    /// Multiply `op` by generators so that it has no Z or Y component on `forbid` qubits.
    /// Returns the transported operator (with sign) if possible.
    pub fn transport(&self, op: &SignedPauli, forbid_z: u64) -> Option<SignedPauli> {
        let rows: Vec<u128> = self.generators.iter().map(|g| (g.z & forbid_z) as u128).collect();
        let sel = gf2_solve(&rows, (op.z & forbid_z) as u128)?;
        Some(op.mul(&self.product(&sel)))
    }

    /// Generators of the subgroup of products with no Z or Y component on `forbid` qubits.
    pub fn commutant_with_x_on(&self, forbid_z: u64) -> Vec<SignedPauli> {
        let rows: Vec<u128> = self.generators.iter().map(|g| (g.z & forbid_z) as u128).collect();
        gf2_kernel(&rows).iter().map(|sel| self.product(sel)).collect()
    }

    /// Rank of the subgroup of generators-products whose support lies in `mask`.
    pub fn subgroup_rank_on(&self, mask: u64) -> usize {
        // products with no support outside the mask: kernel of the restriction map
        let outside: Vec<u128> = self
            .generators
            .iter()
            .map(|g| ((g.x & !mask) as u128) | (((g.z & !mask) as u128) << 64))
            .collect();
        self.generators.len() - gf2_rank(&outside)
    }
}

/// Graph stabilizers X_v ∏_{w~v} Z_w (sign +) for the given adjacency.
pub fn graph_stabilizers(n: usize, edges: &[[usize; 2]], vertices: &[usize]) -> Vec<SignedPauli> {
    vertices
        .iter()
        .map(|&v| {
            let mut p = SignedPauli::single(n, v, 'X');
            for e in edges {
                if e[0] == v {
                    p.z |= 1 << e[1];
                } else if e[1] == v {
                    p.z |= 1 << e[0];
                }
            }
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yy_membership() {
        let t = StabilizerTableau::new(
            2,
            vec![SignedPauli::parse("XX").unwrap(), SignedPauli::parse("ZZ").unwrap()],
        )
        .unwrap();
        let q = SignedPauli::parse("-YY").unwrap();
        assert_eq!(t.contains(&q), Membership::Member { sign: -1 });
        assert_eq!(t.express(&q).unwrap(), q);
        assert_eq!(t.contains(&SignedPauli::parse("XI").unwrap()), Membership::NonMember);
    }

    #[test]
    fn multiplication_rules() {
        let x = SignedPauli::parse("X").unwrap();
        let z = SignedPauli::parse("Z").unwrap();
        let y = SignedPauli::parse("Y").unwrap();
        // XZ = -iY, ZX = iY
        assert_eq!(z.mul(&x).to_string(), "+iY");
        assert_eq!(x.mul(&z).to_string(), "-iY");
        assert_eq!(y.mul(&y).to_string(), "+I");
        assert_eq!(SignedPauli::parse("XX").unwrap().mul(&SignedPauli::parse("ZZ").unwrap()).to_string(), "-YY");
    }

    #[test]
    fn rejects_anticommuting() {
        let r = StabilizerTableau::new(1, vec![SignedPauli::parse("X").unwrap(), SignedPauli::parse("Z").unwrap()]);
        assert!(r.is_err());
    }
}
