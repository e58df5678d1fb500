use serde::{Deserialize, Serialize};

use super::lanczos::{lowest_eigenpairs, EigenOptions};
use crate::core_model::{InterpolationSpec, TwistedGraph};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 25;
pub const MAX_LEVELS: usize = 12;
pub const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub s: f64,
    pub eigenvalues: Vec<f64>,
    pub degeneracy_tol: f64,
    pub ground_degeneracy: usize,
    pub gap: f64,
}

impl SpectrumSlice {
    pub fn from_values(s: f64, eigenvalues: Vec<f64>, tol: f64) -> Result<Self> {
        let e0 = eigenvalues[0];
        let deg = eigenvalues.iter().take_while(|&&e| e <= e0 + tol).count();
        let gap = eigenvalues
            .get(deg)
            .map(|e| e - e0)
            .ok_or_else(|| Error::Domain(format!("all {} levels lie in the ground manifold at s = {s}", eigenvalues.len())))?;
        Ok(SpectrumSlice { s, eigenvalues, degeneracy_tol: tol, ground_degeneracy: deg, gap })
    }
}

/// Lowest m eigenvalues of H(s) and the gap above the ground manifold.
pub fn low_spectrum(spec: &InterpolationSpec, s: f64, m: usize) -> Result<SpectrumSlice> {
    low_spectrum_with(spec, s, m, &EigenOptions::default())
}

pub fn low_spectrum_with(
    spec: &InterpolationSpec,
    s: f64,
    m: usize,
    opts: &EigenOptions,
) -> Result<SpectrumSlice> {
    if spec.n > MAX_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits > {MAX_QUBITS}", spec.n)));
    }
    if m == 0 || m > MAX_LEVELS {
        return Err(Error::OutOfRange { what: "m", value: m as f64 });
    }
    let op = spec.operator(s)?;
    let pairs = lowest_eigenpairs(&op, m, opts)?;
    SpectrumSlice::from_values(s, pairs.values, DEGENERACY_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCurve {
    pub slices: Vec<SpectrumSlice>,
    pub min_gap: f64,
    pub argmin_s: f64,
    /// Golden-section refinement of the minimum (s, gap), when requested.
    pub refined: Option<(f64, f64)>,
}

impl GapCurve {
    /// Best available location of the minimum.
    pub fn best_argmin(&self) -> f64 {
        self.refined.map(|r| r.0).unwrap_or(self.argmin_s)
    }
}

/// Grid `a:b:steps` as `steps` equally spaced points including both ends.
pub fn linspace(a: f64, b: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![a],
        _ => (0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect(),
    }
}

pub fn gap_curve(spec: &InterpolationSpec, grid: &[f64], refine: bool) -> Result<GapCurve> {
    gap_curve_with(spec, grid, refine, 6, &EigenOptions::default())
}

pub fn gap_curve_with(
    spec: &InterpolationSpec,
    grid: &[f64],
    refine: bool,
    m: usize,
    opts: &EigenOptions,
) -> Result<GapCurve> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("s-grid must be non-empty and strictly increasing".into()));
    }
    let slices = grid
        .iter()
        .map(|&s| low_spectrum_with(spec, s, m, opts))
        .collect::<Result<Vec<_>>>()?;
    let (imin, smin) = slices
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap))
        .expect("non-empty");
    let (min_gap, argmin_s) = (smin.gap, smin.s);
    let refined = if refine && grid.len() >= 2 {
        let lo = grid[imin.saturating_sub(1)];
        let hi = grid[(imin + 1).min(grid.len() - 1)];
        let f = |s: f64| low_spectrum_with(spec, s, m, opts).map(|x| x.gap);
        Some(golden_min(f, lo, hi, 1e-4)?)
    } else {
        None
    };
    Ok(GapCurve { slices, min_gap, argmin_s, refined })
}

/// Golden-section search for a minimum on [a, b] to width `tol`.
pub fn golden_min<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Whether a chain graph satisfies θ_v = θ_{n−1−v} on its interior.
pub fn is_mirror_symmetric(g: &TwistedGraph) -> bool {
    let n = g.n();
    let a = g.angles();
    (1..n.saturating_sub(1)).all(|v| {
        let d = crate::core_model::wrap_angle(a[v] - a[n - 1 - v]);
        d < 1e-12 || std::f64::consts::TAU - d < 1e-12
    })
}

/// Max over the grid of the distance between sorted low spectra of H(s) and H(1−s).
pub fn duality_check(g: &TwistedGraph, spec: &InterpolationSpec, grid: &[f64], m: usize) -> Result<f64> {
    if g.n() > 14 {
        return Err(Error::TooLarge(format!("duality check limited to n <= 14, got {}", g.n())));
    }
    if !is_mirror_symmetric(g) {
        return Err(Error::Symmetry("chain angles are not mirror symmetric".into()));
    }
    duality_deviation(spec, grid, m)
}

/// The same measurement without the symmetry precondition (negative controls).
pub fn duality_deviation(spec: &InterpolationSpec, grid: &[f64], m: usize) -> Result<f64> {
    let opts = EigenOptions::default();
    let mut worst = 0.0f64;
    for &s in grid {
        let a = lowest_eigenpairs(&spec.operator(s)?, m, &opts)?.values;
        let b = lowest_eigenpairs(&spec.operator(1.0 - s)?, m, &opts)?.values;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}
