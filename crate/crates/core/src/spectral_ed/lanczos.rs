//! Lanczos with full reorthogonalization and locking.
//!
//! Single-vector Lanczos sees one copy of each degenerate level per run, so
//! converged pairs are locked and the search restarts in their orthogonal
//! complement until no unseen level lies below the m-th locked value.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core_model::PauliSum;
use crate::error::{Error, Result};

pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C], y: &mut [C]);
}

impl LinearOp for PauliSum {
    fn dim(&self) -> usize {
        PauliSum::dim(self)
    }
    fn apply(&self, x: &[C], y: &mut [C]) {
        PauliSum::apply(self, x, y)
    }
}

pub(crate) fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn axpy(y: &mut [C], a: C, x: &[C]) {
    y.iter_mut().zip(x).for_each(|(u, v)| *u += a * v);
}

pub(crate) fn scale(x: &mut [C], a: f64) {
    x.iter_mut().for_each(|v| *v *= a);
}

pub(crate) fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    (0..dim).map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
}

fn orthogonalize(w: &mut [C], basis: &[Vec<C>]) {
    for q in basis {
        let c = dot(q, w);
        axpy(w, -c, q);
    }
}

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Residual ‖Hx − θx‖ required for a pair to be accepted.
    pub tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
    /// Use a dense solve up to this dimension.
    pub dense_max: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-9, max_krylov: 300, max_restarts: 60, seed: 0x5eed, dense_max: 256 }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C>>,
    /// Largest accepted residual.
    pub residual: f64,
    pub matvecs: usize,
}

struct Ritz {
    value: f64,
    vector: Vec<C>,
    residual: f64,
}

pub fn dense_of<O: LinearOp>(op: &O) -> DMatrix<C> {
    let d = op.dim();
    let mut m = DMatrix::zeros(d, d);
    let mut e = vec![C::new(0.0, 0.0); d];
    let mut y = vec![C::new(0.0, 0.0); d];
    for j in 0..d {
        e[j] = C::new(1.0, 0.0);
        op.apply(&e, &mut y);
        for i in 0..d {
            m[(i, j)] = y[i];
        }
        e[j] = C::new(0.0, 0.0);
    }
    m
}

/// Full Hermitian eigendecomposition, ascending.
pub fn dense_eigen(m: DMatrix<C>) -> (Vec<f64>, Vec<Vec<C>>) {
    let h = (&m + m.adjoint()) * C::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = idx.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    (vals, vecs)
}

fn residual_of<O: LinearOp>(op: &O, x: &[C], theta: f64, buf: &mut [C]) -> f64 {
    op.apply(x, buf);
    buf.iter().zip(x).map(|(hx, v)| (hx - v * theta).norm_sqr()).sum::<f64>().sqrt()
}

fn lanczos_run<O: LinearOp>(
    op: &O,
    locked: &[Vec<C>],
    start: Vec<C>,
    want: usize,
    kmax: usize,
    tol: f64,
    matvecs: &mut usize,
) -> Vec<Ritz> {
    let d = op.dim();
    let mut q = start;
    orthogonalize(&mut q, locked);
    orthogonalize(&mut q, locked);
    let nq = norm(&q);
    scale(&mut q, 1.0 / nq);
    let mut basis: Vec<Vec<C>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C::new(0.0, 0.0); d];
    let mut tri: Option<SymmetricEigen<f64, nalgebra::Dyn>>;
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        *matvecs += 1;
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &basis);
        }
        let b = norm(&w);
        let k = alpha.len();
        let exhausted = b < 1e-12 * (1.0 + a.abs()) || k >= kmax || k + locked.len() >= d;
        if k % 8 == 0 || exhausted {
            let mut t = DMatrix::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alpha[i];
                if i + 1 < k {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut idx: Vec<usize> = (0..k).collect();
            idx.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
            let converged = idx
                .iter()
                .take(want.min(k))
                .all(|&i| (b * eig.eigenvectors[(k - 1, i)]).abs() < 0.1 * tol);
            tri = Some(eig);
            if converged || exhausted {
                break;
            }
        }
        beta.push(b);
        scale(&mut w, 1.0 / b);
        basis.push(w.clone());
    }
    let eig = tri.expect("tridiagonal solved");
    let k = alpha.len();
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let mut buf = vec![C::new(0.0, 0.0); d];
    idx.iter()
        .take(want.max(1).min(k))
        .map(|&i| {
            let mut x = vec![C::new(0.0, 0.0); d];
            for (r, qv) in basis.iter().take(k).enumerate() {
                axpy(&mut x, C::new(eig.eigenvectors[(r, i)], 0.0), qv);
            }
            orthogonalize(&mut x, locked);
            let nx = norm(&x);
            scale(&mut x, 1.0 / nx);
            let value = eig.eigenvalues[i];
            let residual = residual_of(op, &x, value, &mut buf);
            *matvecs += 1;
            Ritz { value, vector: x, residual }
        })
        .collect()
}

/// Lowest `m` eigenpairs of a Hermitian operator, degenerate copies included.
pub fn lowest_eigenpairs<O: LinearOp>(op: &O, m: usize, opts: &EigenOptions) -> Result<Eigenpairs> {
    let d = op.dim();
    let m = m.min(d);
    if d <= opts.dense_max {
        let (vals, vecs) = dense_eigen(dense_of(op));
        return Ok(Eigenpairs {
            values: vals[..m].to_vec(),
            vectors: vecs.into_iter().take(m).collect(),
            residual: 0.0,
            matvecs: d,
        });
    }
    // keep the Krylov basis within ~1.5 GB
    let mem_cap = (1_500_000_000usize / (16 * d)).max(20);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<C>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut worst = 0.0f64;
    let mut matvecs = 0usize;
    let mut stalls = 0usize;
    let mut start = random_vector(d, &mut rng);
    loop {
        let want = m.saturating_sub(locked.len()).max(1);
        let kmax = opts.max_krylov.min(mem_cap).min(d - locked.len());
        let ritz = lanczos_run(op, &locked, start, want, kmax, opts.tol, &mut matvecs);
        if locked.len() >= m {
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let thr = sorted[m - 1];
            if ritz[0].residual < opts.tol && ritz[0].value >= thr - opts.tol {
                break;
            }
        }
        let mut took = 0;
        let mut rest = None;
        for r in ritz {
            if rest.is_none() && r.residual < opts.tol {
                worst = worst.max(r.residual);
                values.push(r.value);
                locked.push(r.vector);
                took += 1;
            } else if rest.is_none() {
                rest = Some(r.vector);
            }
        }
        if locked.len() >= d {
            break;
        }
        start = match (took, rest) {
            (0, Some(v)) => {
                stalls += 1;
                if stalls > opts.max_restarts {
                    return Err(Error::NoConvergence { iterations: matvecs, residual: f64::NAN });
                }
                v
            }
            _ => random_vector(d, &mut rng),
        };
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx.truncate(m);
    Ok(Eigenpairs {
        values: idx.iter().map(|&i| values[i]).collect(),
        vectors: idx.iter().map(|&i| locked[i].clone()).collect(),
        residual: worst,
        matvecs,
    })
}
