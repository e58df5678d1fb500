//! Scaling scans and the desk-scale figure suites.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::output::{csv, derive_seed, Cell};
use crate::analysis::{fit_power_law, FitResult};
use crate::core_model::{build_chain, build_square_lattice, random_dual_symmetric_angles, random_symmetric_chain_angles, BoundarySign};
use crate::error::{Error, Result};
use crate::mps1d::{gap_above_manifold, DmrgOptions};
use crate::spectral_ed::{low_spectrum_with, EigenOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Mirror-symmetric random twists, MPS.
    Random1d,
    /// Untwisted wire, MPS.
    Wire,
    /// L×L lattice with θ(i,j) = θ(j,i), exact diagonalization.
    #[serde(rename = "2d")]
    TwoD,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Random1d => "random1d",
            Family::Wire => "wire",
            Family::TwoD => "2d",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random1d" => Ok(Family::Random1d),
            "wire" => Ok(Family::Wire),
            "2d" => Ok(Family::TwoD),
            _ => Err(Error::Domain(format!("unknown family {s:?} (random1d, wire, 2d)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub s: f64,
    pub chi: usize,
}

/// One (n, sample) cell. `chi` is 0 and `variance` 0 for exact diagonalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub family: Family,
    pub n: usize,
    pub sample: usize,
    pub seed: u64,
    pub s: f64,
    pub gap: f64,
    pub chi: usize,
    pub variance: f64,
    /// Ground-manifold size found.
    pub manifold: usize,
    pub converged: bool,
}

pub const SCALING_HEADER: [&str; 7] = ["family", "n", "seed", "s", "gap", "chi", "variance"];

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.family.name().into(),
                r.n.into(),
                r.seed.into(),
                r.s.into(),
                r.gap.into(),
                r.chi.into(),
                r.variance.into(),
            ]
        })
        .collect();
    csv(&SCALING_HEADER, &cells)
}

/// Worker count from `AQT_THREADS`, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("AQT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1))
}

/// Map over `items` on up to `threads` scoped workers; results keep input order.
pub fn par_map<T: Sync, R: Send, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("poisoned")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("poisoned").into_iter().map(|r| r.expect("filled")).collect()
}

fn lattice_side(n: usize) -> Result<usize> {
    let l = (n as f64).sqrt().round() as usize;
    if l * l != n || l < 2 {
        return Err(Error::Domain(format!("2d sizes are qubit counts L*L with L >= 2, got {n}")));
    }
    Ok(l)
}

fn run_cell(cfg: &ScalingConfig, n: usize, sample: usize) -> Result<ScalingRow> {
    let family = cfg.family;
    let seed = derive_seed(cfg.seed, &[family.name(), &n.to_string(), &sample.to_string()]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::Random1d | Family::Wire => {
            let angles = match family {
                Family::Random1d => random_symmetric_chain_angles(n, &mut rng),
                _ => vec![0.0; n],
            };
            let (_, spec) = build_chain(&angles, BoundarySign::Uniform)?;
            let opts = DmrgOptions { chi_max: cfg.chi, seed, ..DmrgOptions::default() };
            let g = gap_above_manifold(&spec, cfg.s, &opts)?;
            let gap = g.gap.ok_or_else(|| {
                Error::Domain(format!("n = {n}, sample {sample}: no state found above the ground manifold"))
            })?;
            Ok(ScalingRow {
                family,
                n,
                sample,
                seed,
                s: cfg.s,
                gap,
                chi: g.max_bond,
                variance: g.max_variance,
                manifold: g.manifold,
                converged: g.converged,
            })
        }
        Family::TwoD => {
            let l = lattice_side(n)?;
            let angles = random_dual_symmetric_angles(l, &mut rng);
            let (_, spec) = build_square_lattice(l, &angles, true)?;
            let opts = EigenOptions { tol: 1e-9, ..EigenOptions::default() };
            let sl = low_spectrum_with(&spec, cfg.s, 4, &opts)?;
            Ok(ScalingRow {
                family,
                n,
                sample,
                seed,
                s: cfg.s,
                gap: sl.gap,
                chi: 0,
                variance: 0.0,
                manifold: sl.ground_degeneracy,
                converged: true,
            })
        }
    }
}

/// All (size, sample) cells, sorted by (n, sample) whatever the worker count.
pub fn scaling(cfg: &ScalingConfig) -> Result<Vec<ScalingRow>> {
    if cfg.sizes.is_empty() || cfg.samples == 0 {
        return Err(Error::Domain("need at least one size and one sample".into()));
    }
    if cfg.family != Family::TwoD && cfg.chi < 8 {
        return Err(Error::OutOfRange { what: "chi", value: cfg.chi as f64 });
    }
    let samples = if cfg.family == Family::Wire { 1 } else { cfg.samples };
    let mut cells: Vec<(usize, usize)> = cfg.sizes.iter().flat_map(|&n| (0..samples).map(move |k| (n, k))).collect();
    cells.sort_unstable();
    cells.dedup();
    // largest first keeps the pool busy at the end
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(cells[i].0));
    let results = par_map(&order, worker_count(), |&i| run_cell(cfg, cells[i].0, cells[i].1));
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.sample));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub samples: usize,
    pub mean_gap: f64,
    /// mean of gap·n
    pub mean_gap_times_n: f64,
}

pub fn summarize(rows: &[ScalingRow]) -> Vec<SizeSummary> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let g: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.gap).collect();
            let k = g.len() as f64;
            SizeSummary {
                n,
                samples: g.len(),
                mean_gap: g.iter().sum::<f64>() / k,
                mean_gap_times_n: g.iter().map(|x| x * n as f64).sum::<f64>() / k,
            }
        })
        .collect()
}

/// Pooled power-law fit of gap against n.
pub fn fit_rows(rows: &[ScalingRow]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.gap)).collect();
    fit_power_law(&pts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig4 {
    pub config: ScalingConfig,
    pub rows: Vec<ScalingRow>,
    pub fit: FitResult,
    pub per_size: Vec<SizeSummary>,
    pub max_variance: f64,
    /// Cells whose ground manifold was not 2-fold or whose sweeps did not converge.
    pub flagged: Vec<(usize, usize)>,
}

pub fn fig4_config(seed: u64) -> ScalingConfig {
    ScalingConfig { family: Family::Random1d, sizes: vec![8, 16, 24, 32, 48, 64], samples: 20, seed, s: 0.5, chi: 64 }
}

/// Random symmetric chains at s = 1/2 by MPS, with a pooled fit.
pub fn fig4(config: ScalingConfig) -> Result<Fig4> {
    let rows = scaling(&config)?;
    let fit = fit_rows(&rows)?;
    Ok(Fig4 {
        per_size: summarize(&rows),
        max_variance: rows.iter().map(|r| r.variance).fold(0.0, f64::max),
        flagged: rows.iter().filter(|r| r.manifold != 2 || !r.converged).map(|r| (r.n, r.sample)).collect(),
        config,
        rows,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenOdd {
    pub l: usize,
    pub gap: f64,
    pub gap_times_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig5 {
    pub config: ScalingConfig,
    pub rows: Vec<ScalingRow>,
    pub fit: FitResult,
    pub per_size: Vec<SizeSummary>,
    /// Mean over lattice sizes of the per-size mean of gap·n.
    pub coefficient: f64,
    /// Untwisted lattices, where the even/odd alternation is cleanest.
    pub even_odd: Vec<EvenOdd>,
}

pub fn fig5_config(seed: u64) -> ScalingConfig {
    ScalingConfig { family: Family::TwoD, sizes: vec![4, 9, 16], samples: 10, seed, s: 0.5, chi: 0 }
}

/// Dual-symmetric random lattices at s = 1/2 by exact diagonalization.
pub fn fig5(config: ScalingConfig) -> Result<Fig5> {
    let rows = scaling(&config)?;
    let fit = fit_rows(&rows)?;
    let per_size = summarize(&rows);
    let coefficient = per_size.iter().map(|p| p.mean_gap_times_n).sum::<f64>() / per_size.len() as f64;
    let opts = EigenOptions { tol: 1e-9, ..EigenOptions::default() };
    let even_odd = config
        .sizes
        .iter()
        .map(|&n| {
            let l = lattice_side(n)?;
            let (_, spec) = build_square_lattice(l, &vec![0.0; n], true)?;
            let gap = low_spectrum_with(&spec, config.s, 4, &opts)?.gap;
            Ok(EvenOdd { l, gap, gap_times_n: gap * n as f64 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig5 { config, rows, fit, per_size, coefficient, even_odd })
}
