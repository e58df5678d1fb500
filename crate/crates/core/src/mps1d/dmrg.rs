use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::linalg::{mul, svd, zeros, Mat, Svd};
use super::mpo::{Entry, Mpo};
use super::mps::{
    energy_and_variance, env_left, env_right, left_boundary, overlap, overlap_left, overlap_right, right_boundary,
    Env, MpsState, MpsStats,
};
use crate::core_model::InterpolationSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmrgOptions {
    pub chi_max: usize,
    /// Stop when the sweep energy changes by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Discarded weight allowed per SVD.
    pub cutoff: f64,
    pub chi_init: usize,
    pub seed: u64,
    /// Variance above which a run is flagged as not converged.
    pub variance_tol: f64,
    /// Runs whose variance misses `variance_tol` are continued with 1.5× the
    /// bond dimension, up to this cap.
    pub chi_cap: usize,
}

impl Default for DmrgOptions {
    fn default() -> Self {
        DmrgOptions {
            chi_max: 64,
            tol: 1e-9,
            max_sweeps: 30,
            cutoff: 1e-12,
            chi_init: 8,
            seed: 1,
            variance_tol: 1e-6,
            chi_cap: 128,
        }
    }
}

/// Two-site block as four chi_l × chi_r matrices indexed p1·2 + p2.
type Block = [Mat; 4];

fn flatten(b: &Block) -> Vec<C> {
    b.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
}

fn unflatten(v: &[C], r: usize, c: usize) -> Block {
    let k = r * c;
    std::array::from_fn(|j| Mat::from_column_slice(r, c, &v[j * k..(j + 1) * k]))
}

struct Penalty<'a> {
    state: &'a MpsState,
    weight: f64,
    left: Vec<Mat>,
    right: Vec<Mat>,
}

struct Sweeper<'a> {
    mpo: &'a Mpo,
    psi: MpsState,
    left: Vec<Env>,
    right: Vec<Env>,
    penalties: Vec<Penalty<'a>>,
    opts: &'a DmrgOptions,
    matvecs: std::cell::Cell<usize>,
}

fn is_zero(m: &Mat) -> bool {
    m.iter().all(|z| *z == C::new(0.0, 0.0))
}

/// Effective Hamiltonian of one two-site block. Vectors hold the four
/// chi_l × chi_r blocks (index p1·2 + p2) back to back, column-major, so the
/// whole vector is also a chi_l × 4·chi_r matrix.
struct LocalOp<'a> {
    rows: usize,
    cols: usize,
    /// Left environment per channel; `None` if zero, flag set if the identity.
    left: Vec<Option<(faer::Mat<C>, bool)>>,
    /// Transposed right environment per channel.
    right_t: Vec<Option<(faer::Mat<C>, bool)>>,
    site_l: &'a [Entry],
    site_r: &'a [Entry],
    mid: usize,
}

fn to_faer(m: &Mat) -> faer::Mat<C> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn is_identity(m: &Mat) -> bool {
    m.is_square()
        && m.iter().enumerate().all(|(k, z)| {
            let d = if k % m.nrows() == k / m.nrows() { 1.0 } else { 0.0 };
            (z - d).norm() < 1e-12
        })
}

fn prepare(env: &[Mat], transpose: bool) -> Vec<Option<(faer::Mat<C>, bool)>> {
    env.iter()
        .map(|m| {
            if is_zero(m) {
                None
            } else if is_identity(m) {
                Some((faer::Mat::zeros(0, 0), true))
            } else if transpose {
                Some((to_faer(&m.transpose()), false))
            } else {
                Some((to_faer(m), false))
            }
        })
        .collect()
}

fn axpy(y: &mut [C], a: C, x: &[C]) {
    y.iter_mut().zip(x).for_each(|(u, v)| *u += a * v);
}

impl LocalOp<'_> {
    fn apply(&self, v: &[C]) -> Vec<C> {
        use faer::linalg::matmul::matmul;
        use faer::{Accum, MatMut, MatRef, Par};
        let (rows, cols) = (self.rows, self.cols);
        let blk = rows * cols;
        let one = C::new(1.0, 0.0);
        let x: Vec<Option<Vec<C>>> = self
            .right_t
            .iter()
            .map(|r| {
                let (rt, ident) = r.as_ref()?;
                if *ident {
                    return Some(v.to_vec());
                }
                let mut buf = vec![C::new(0.0, 0.0); 4 * blk];
                for k in 0..4 {
                    let src = MatRef::from_column_major_slice(&v[k * blk..(k + 1) * blk], rows, cols);
                    let dst = MatMut::from_column_major_slice_mut(&mut buf[k * blk..(k + 1) * blk], rows, cols);
                    matmul(dst, Accum::Replace, src, rt.as_ref(), one, Par::Seq);
                }
                Some(buf)
            })
            .collect();
        let mut y: Vec<Option<Vec<C>>> = vec![None; self.mid];
        for e in self.site_r {
            let Some(xb) = &x[e.b] else { continue };
            let slot = y[e.a].get_or_insert_with(|| vec![C::new(0.0, 0.0); 4 * blk]);
            for p1 in 0..2 {
                for q2 in 0..2 {
                    for p2 in 0..2 {
                        let c = e.op[q2][p2];
                        if c != C::new(0.0, 0.0) {
                            let (d, s) = ((p1 * 2 + q2) * blk, (p1 * 2 + p2) * blk);
                            axpy(&mut slot[d..d + blk], c, &xb[s..s + blk]);
                        }
                    }
                }
            }
        }
        let mut z: Vec<Option<Vec<C>>> = vec![None; self.left.len()];
        for e in self.site_l {
            let Some(yb) = &y[e.b] else { continue };
            if self.left[e.a].is_none() {
                continue;
            }
            let slot = z[e.a].get_or_insert_with(|| vec![C::new(0.0, 0.0); 4 * blk]);
            for q1 in 0..2 {
                for p1 in 0..2 {
                    let c = e.op[q1][p1];
                    if c != C::new(0.0, 0.0) {
                        for q2 in 0..2 {
                            let (d, s) = ((q1 * 2 + q2) * blk, (p1 * 2 + q2) * blk);
                            axpy(&mut slot[d..d + blk], c, &yb[s..s + blk]);
                        }
                    }
                }
            }
        }
        let mut out = vec![C::new(0.0, 0.0); 4 * blk];
        for (l, zb) in self.left.iter().zip(&z) {
            let (Some((lm, ident)), Some(zb)) = (l, zb) else { continue };
            if *ident {
                axpy(&mut out, one, zb);
            } else {
                let dst = MatMut::from_column_major_slice_mut(&mut out, rows, 4 * cols);
                let src = MatRef::from_column_major_slice(zb, rows, 4 * cols);
                matmul(dst, Accum::Add, lm.as_ref(), src, one, Par::Seq);
            }
        }
        out
    }
}

impl Sweeper<'_> {
    fn penalty_vectors(&self, i: usize) -> Vec<(f64, Vec<C>)> {
        self.penalties
            .iter()
            .map(|p| {
                let (a, b) = (&p.state.sites[i], &p.state.sites[i + 1]);
                let el = p.left[i].adjoint();
                let er = p.right[i + 2].conjugate();
                let blk: Block = std::array::from_fn(|k| mul(&mul(&el, &mul(&a[k / 2], &b[k % 2])), &er));
                (p.weight, flatten(&blk))
            })
            .collect()
    }

    /// Optimize block (i, i+1); returns the eigenvalue and the new block.
    fn solve(&self, i: usize, tol: f64) -> (f64, Block) {
        let a = &self.psi.sites[i];
        let b = &self.psi.sites[i + 1];
        let th: Block = std::array::from_fn(|k| mul(&a[k / 2], &b[k % 2]));
        let (rows, cols) = (th[0].nrows(), th[0].ncols());
        let local = LocalOp {
            rows,
            cols,
            left: prepare(&self.left[i], false),
            right_t: prepare(&self.right[i + 2], true),
            site_l: &self.mpo.sites[i],
            site_r: &self.mpo.sites[i + 1],
            mid: self.mpo.bonds[i + 1],
        };
        let pv = self.penalty_vectors(i);
        let op = |v: &[C]| -> Vec<C> {
            self.matvecs.set(self.matvecs.get() + 1);
            let mut out = local.apply(v);
            for (w, u) in &pv {
                let c: C = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<C>() * *w;
                out.iter_mut().zip(u).for_each(|(o, x)| *o += c * x);
            }
            out
        };
        let (e, v) = local_lowest(&op, flatten(&th), tol);
        (e, unflatten(&v, rows, cols))
    }

    /// SVD split of the block; `right` moves the center to i+1.
    fn split(&mut self, i: usize, th: &Block, right: bool) -> f64 {
        let (rows, cols) = (th[0].nrows(), th[0].ncols());
        let mut m = zeros(2 * rows, 2 * cols);
        for p1 in 0..2 {
            for p2 in 0..2 {
                m.view_mut((p1 * rows, p2 * cols), (rows, cols)).copy_from(&th[p1 * 2 + p2]);
            }
        }
        let Svd { u, s: sv, vt } = svd(&m);
        let order: Vec<usize> = (0..sv.len()).collect();
        let total: f64 = sv.iter().map(|s| s * s).sum();
        let mut keep = order.len().min(self.opts.chi_max);
        let mut tail: f64 = order[keep..].iter().map(|&j| sv[j] * sv[j]).sum();
        while keep > 1 {
            let s2 = sv[order[keep - 1]].powi(2);
            if tail + s2 > self.opts.cutoff * total {
                break;
            }
            tail += s2;
            keep -= 1;
        }
        let kept = &order[..keep];
        let norm = (total - tail).sqrt();
        let s: Vec<f64> = kept.iter().map(|&j| sv[j] / norm).collect();
        let uk = Mat::from_fn(2 * rows, keep, |r, c| u[(r, kept[c])]);
        let vk = Mat::from_fn(keep, 2 * cols, |r, c| vt[(kept[r], c)]);
        let (ua, vb) = if right {
            (uk, Mat::from_fn(keep, 2 * cols, |r, c| vk[(r, c)] * s[r]))
        } else {
            (Mat::from_fn(2 * rows, keep, |r, c| uk[(r, c)] * s[c]), vk)
        };
        self.psi.sites[i] = [ua.rows(0, rows).into_owned(), ua.rows(rows, rows).into_owned()];
        self.psi.sites[i + 1] = [vb.columns(0, cols).into_owned(), vb.columns(cols, cols).into_owned()];
        tail / total
    }

    fn run(mut self) -> MpsState {
        let n = self.psi.n();
        let mut energy = f64::INFINITY;
        let mut sweeps = 0;
        let mut converged = false;
        let mut bond_truncation = vec![0.0; n - 1];
        // local eigensolves only need to beat the current sweep-to-sweep change
        let mut local_tol = 1e-3;
        while sweeps < self.opts.max_sweeps {
            let mut e = 0.0;
            for i in 0..n - 1 {
                let (ei, th) = self.solve(i, local_tol);
                e = ei;
                bond_truncation[i] = self.split(i, &th, true);
                self.left[i + 1] = env_left(&self.left[i], self.mpo, i, &self.psi.sites[i]);
                for p in &mut self.penalties {
                    p.left[i + 1] = overlap_left(&p.left[i], &p.state.sites[i], &self.psi.sites[i]);
                }
            }
            for i in (0..n - 1).rev() {
                let (ei, th) = self.solve(i, local_tol);
                e = ei;
                bond_truncation[i] = bond_truncation[i].max(self.split(i, &th, false));
                self.right[i + 1] = env_right(&self.right[i + 2], self.mpo, i + 1, &self.psi.sites[i + 1]);
                for p in &mut self.penalties {
                    p.right[i + 1] = overlap_right(&p.right[i + 2], &p.state.sites[i + 1], &self.psi.sites[i + 1]);
                }
            }
            sweeps += 1;
            let change = (energy - e).abs();
            energy = e;
            local_tol = (0.01 * change).clamp(1e-11, 1e-6);
            if sweeps >= 2 && change < self.opts.tol {
                converged = true;
                break;
            }
        }
        let (e, var) = energy_and_variance(&self.psi, self.mpo);
        let max_bond = self.psi.bond_dims().into_iter().max().unwrap_or(1);
        self.psi.stats = MpsStats {
            energy: e,
            variance: var,
            max_bond,
            truncation_error: bond_truncation.iter().cloned().fold(0.0, f64::max),
            bond_truncation,
            sweeps,
            matvecs: self.matvecs.get(),
            converged: converged && var < self.opts.variance_tol,
        };
        self.psi
    }
}

/// Lowest eigenpair of a Hermitian operator by restarted Lanczos from `v0`,
/// with classical Gram-Schmidt applied twice against the stored basis.
fn local_lowest(op: &dyn Fn(&[C]) -> Vec<C>, v0: Vec<C>, tol: f64) -> (f64, Vec<C>) {
    use faer::linalg::matmul::matmul;
    use faer::{Accum, ColMut, ColRef, Par};
    let dim = v0.len();
    let kmax = dim.min(10);
    let zero = C::new(0.0, 0.0);
    let mut x = v0;
    let mut theta = f64::NAN;
    let mut basis = faer::Mat::<C>::zeros(dim, kmax);
    let mut coef = vec![zero; kmax];
    for _restart in 0..1 {
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nx == 0.0 {
            x = (0..dim).map(|j| C::new(1.0 + (j % 7) as f64, (j % 3) as f64)).collect();
            continue;
        }
        basis.col_as_slice_mut(0).iter_mut().zip(&x).for_each(|(b, v)| *b = v / nx);
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut done = false;
        let mut y: Vec<f64> = vec![1.0];
        let mut k = 1;
        loop {
            let mut w = op(basis.col_as_slice(k - 1));
            let a: f64 = basis.col_as_slice(k - 1).iter().zip(&w).map(|(q, v)| (q.conj() * v).re).sum();
            alpha.push(a);
            for _ in 0..2 {
                let bk = basis.get(.., ..k);
                let c = ColMut::from_slice_mut(&mut coef[..k]);
                matmul(c.as_mat_mut(), Accum::Replace, bk.adjoint(), ColRef::from_slice(&w).as_mat(), C::new(1.0, 0.0), Par::Seq);
                let c = ColRef::from_slice(&coef[..k]);
                matmul(ColMut::from_slice_mut(&mut w).as_mat_mut(), Accum::Add, bk, c.as_mat(), C::new(-1.0, 0.0), Par::Seq);
            }
            let b = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let t = DMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let j = (0..k).min_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q])).unwrap();
            theta = eig.eigenvalues[j];
            y = eig.eigenvectors.column(j).iter().cloned().collect();
            let resid = (b * y[k - 1]).abs();
            if resid < tol * theta.abs().max(1.0) || b < 1e-14 {
                done = true;
                break;
            }
            if k >= kmax {
                break;
            }
            beta.push(b);
            basis.col_as_slice_mut(k).iter_mut().zip(&w).for_each(|(q, v)| *q = v / b);
            k += 1;
        }
        let yc: Vec<C> = y.iter().map(|&r| C::new(r, 0.0)).collect();
        let mut nx = vec![zero; dim];
        matmul(
            ColMut::from_slice_mut(&mut nx).as_mat_mut(),
            Accum::Replace,
            basis.get(.., ..k),
            ColRef::from_slice(&yc).as_mat(),
            C::new(1.0, 0.0),
            Par::Seq,
        );
        x = nx;
        if done {
            break;
        }
    }
    let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    x.iter_mut().for_each(|z| *z /= nx);
    (theta, x)
}

/// Two-site DMRG for the lowest state of `mpo` orthogonal (by energy penalty) to `excluded`.
pub fn dmrg(mpo: &Mpo, opts: &DmrgOptions, excluded: &[(&MpsState, f64)]) -> MpsState {
    dmrg_from(mpo, opts, excluded, MpsState::random(mpo.n, opts.chi_init.max(1), opts.seed))
}

/// As [`dmrg`], starting from `start` (which is right-canonicalized first).
pub fn dmrg_from(mpo: &Mpo, opts: &DmrgOptions, excluded: &[(&MpsState, f64)], start: MpsState) -> MpsState {
    let n = mpo.n;
    let mut psi = start;
    super::mps::right_canonicalize(&mut psi.sites);
    let mut right: Vec<Env> = vec![Vec::new(); n + 1];
    right[n] = right_boundary(mpo);
    for i in (1..n).rev() {
        right[i] = env_right(&right[i + 1], mpo, i, &psi.sites[i]);
    }
    let mut left: Vec<Env> = vec![Vec::new(); n + 1];
    left[0] = left_boundary(mpo);
    let penalties = excluded
        .iter()
        .map(|&(state, weight)| {
            let one = Mat::from_element(1, 1, C::new(1.0, 0.0));
            let mut r = vec![one.clone(); n + 1];
            for i in (1..n).rev() {
                r[i] = overlap_right(&r[i + 1], &state.sites[i], &psi.sites[i]);
            }
            Penalty { state, weight, left: vec![one; n + 1], right: r }
        })
        .collect();
    Sweeper { mpo, psi, left, right, penalties, opts, matvecs: std::cell::Cell::new(0) }.run()
}

/// Continue `state` with larger bond dimension until its variance meets the tolerance.
fn refine(mpo: &Mpo, opts: &DmrgOptions, excluded: &[(&MpsState, f64)], mut state: MpsState) -> MpsState {
    let mut chi = opts.chi_max;
    while state.stats.variance > opts.variance_tol && chi < opts.chi_cap {
        chi = (chi * 3 / 2).min(opts.chi_cap);
        let o = DmrgOptions { chi_max: chi, ..opts.clone() };
        state = dmrg_from(mpo, &o, excluded, state);
    }
    state
}

fn chain_mpo(spec: &InterpolationSpec, s: f64) -> Result<Mpo> {
    Mpo::from_terms(spec.n, &spec.assemble(s)?)
}

/// Variational ground state of H(s).
pub fn ground_state(spec: &InterpolationSpec, s: f64, opts: &DmrgOptions) -> Result<MpsState> {
    if opts.chi_max < 8 {
        return Err(Error::OutOfRange { what: "chi_max", value: opts.chi_max as f64 });
    }
    let mpo = chain_mpo(spec, s)?;
    let first = dmrg(&mpo, opts, &[]);
    Ok(refine(&mpo, opts, &[], first))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpsGap {
    pub s: f64,
    /// Energies of the states found, in order.
    pub energies: Vec<f64>,
    pub variances: Vec<f64>,
    pub manifold: usize,
    /// First energy above the ground manifold minus E₀, if one was found.
    pub gap: Option<f64>,
    pub max_bond: usize,
    pub max_variance: f64,
    pub converged: bool,
}

pub const MAX_EXCITED: usize = 3;

/// E₀ and up to three penalty-projected excited states; returns the first level above the
/// ground manifold (states within 1e−8·n of E₀).
pub fn gap_above_manifold(spec: &InterpolationSpec, s: f64, opts: &DmrgOptions) -> Result<MpsGap> {
    if opts.chi_max < 8 {
        return Err(Error::OutOfRange { what: "chi_max", value: opts.chi_max as f64 });
    }
    let mpo = chain_mpo(spec, s)?;
    let terms = spec.assemble(s)?;
    // a single flipped term costs at most 2·max|c|, so this bounds the gaps of interest
    let gap_estimate = 2.0 * terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max);
    let weight = 10.0 * gap_estimate;
    let manifold_tol = 1e-8 * spec.n as f64;
    let first = dmrg(&mpo, opts, &[]);
    let mut states: Vec<MpsState> = vec![refine(&mpo, opts, &[], first)];
    let e0 = states[0].stats.energy;
    let mut gap = None;
    while states.len() <= MAX_EXCITED {
        let excluded: Vec<(&MpsState, f64)> = states.iter().map(|p| (p, weight)).collect();
        // warm start from the last state found; the penalty pushes it out of the excluded span
        let start = states.last().expect("nonempty").clone();
        let mut next = dmrg_from(&mpo, opts, &excluded, start);
        // a warm start can stay trapped in the excluded span (e.g. exact low-bond states)
        if excluded.iter().any(|(p, _)| overlap(p, &next).norm() > 1e-3) {
            let seed = opts.seed.wrapping_add(states.len() as u64);
            next = dmrg(&mpo, &DmrgOptions { seed, ..opts.clone() }, &excluded);
        }
        let next = refine(&mpo, opts, &excluded, next);
        let e = next.stats.energy;
        states.push(next);
        if e - e0 > manifold_tol {
            gap = Some(e - e0);
            break;
        }
    }
    let manifold = states.len() - usize::from(gap.is_some());
    let energies: Vec<f64> = states.iter().map(|p| p.stats.energy).collect();
    let variances: Vec<f64> = states.iter().map(|p| p.stats.variance).collect();
    Ok(MpsGap {
        s,
        manifold,
        gap,
        max_bond: states.iter().map(|p| p.stats.max_bond).max().unwrap_or(1),
        max_variance: variances.iter().cloned().fold(0.0, f64::max),
        converged: states.iter().all(|p| p.stats.converged),
        energies,
        variances,
    })
}
