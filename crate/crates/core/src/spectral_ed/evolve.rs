use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::lanczos::norm;
use crate::core_model::InterpolationSpec;
use crate::error::{Error, Result};

/// Shape of s(t/T).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Ramp {
    #[default]
    Linear,
    /// 3τ² − 2τ³
    Smooth,
    /// 10τ³ − 15τ⁴ + 6τ⁵
    Smoother,
}

impl Ramp {
    pub fn s(self, tau: f64) -> f64 {
        let t = tau.clamp(0.0, 1.0);
        match self {
            Ramp::Linear => t,
            Ramp::Smooth => t * t * (3.0 - 2.0 * t),
            Ramp::Smoother => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
        }
    }
}

/// Time parameterization of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    Ramp { total_time: f64, ramp: Ramp },
    /// Monotone (t, s) samples from s(0)=0 to s(T)=1, linearly interpolated.
    Samples(Vec<(f64, f64)>),
}

impl Sweep {
    pub fn linear(total_time: f64) -> Self {
        Sweep::Ramp { total_time, ramp: Ramp::Linear }
    }

    pub fn total_time(&self) -> f64 {
        match self {
            Sweep::Ramp { total_time, .. } => *total_time,
            Sweep::Samples(v) => v.last().map(|p| p.0).unwrap_or(0.0),
        }
    }

    pub fn s_at(&self, t: f64) -> f64 {
        match self {
            Sweep::Ramp { total_time, ramp } => {
                if *total_time <= 0.0 {
                    1.0
                } else {
                    ramp.s(t / total_time)
                }
            }
            Sweep::Samples(v) => {
                let i = v.partition_point(|p| p.0 <= t);
                if i == 0 {
                    return v[0].1;
                }
                if i >= v.len() {
                    return v[v.len() - 1].1;
                }
                let (a, b) = (v[i - 1], v[i]);
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: Vec<C>,
    pub steps: usize,
    pub dt: f64,
    /// Largest per-unit-time norm drift before renormalization.
    pub max_drift_rate: f64,
}

pub const MAX_EVOLVE_QUBITS: usize = 16;

/// i dψ/dt = H(s(t)) ψ by fixed-step RK4 with renormalization.
pub fn adiabatic_evolve(spec: &InterpolationSpec, sweep: &Sweep, initial: &[C]) -> Result<Evolution> {
    if spec.n > MAX_EVOLVE_QUBITS {
        return Err(Error::TooLarge(format!("{} qubits > {MAX_EVOLVE_QUBITS}", spec.n)));
    }
    let d = 1usize << spec.n;
    if initial.len() != d {
        return Err(Error::Domain(format!("state length {} != {d}", initial.len())));
    }
    if (norm(initial) - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("initial state not normalized".into()));
    }
    let total = sweep.total_time();
    let mut psi = initial.to_vec();
    if total <= 0.0 {
        return Ok(Evolution { state: psi, steps: 0, dt: 0.0, max_drift_rate: 0.0 });
    }
    let hi = spec.init_operator();
    let hf = spec.final_operator();
    let bound = hi.norm_bound().max(hf.norm_bound()).max(1e-12);
    let dt_max = (0.2 / bound).min(0.05);
    let steps = (total / dt_max).ceil() as usize;
    if steps > 200_000_000 {
        return Err(Error::StepUnderflow(0.0));
    }
    let dt = total / steps as f64;
    if dt < 1e-12 * total {
        return Err(Error::StepUnderflow(0.0));
    }
    let env = spec.envelope;
    let mut k = vec![vec![C::new(0.0, 0.0); d]; 4];
    let mut tmp = vec![C::new(0.0, 0.0); d];
    // y = -i H(t) x
    let deriv = |t: f64, x: &[C], y: &mut [C]| {
        let s = sweep.s_at(t);
        y.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        let (f, g) = (env.f(s), env.g(s));
        if f != 0.0 {
            hi.apply_add(x, y, f);
        }
        if g != 0.0 {
            hf.apply_add(x, y, g);
        }
        y.iter_mut().for_each(|v| *v = C::new(v.im, -v.re));
    };
    let mut max_drift = 0.0f64;
    for step in 0..steps {
        let t = step as f64 * dt;
        deriv(t, &psi, &mut k[0]);
        for (o, (p, a)) in tmp.iter_mut().zip(psi.iter().zip(&k[0])) {
            *o = p + a * (0.5 * dt);
        }
        deriv(t + 0.5 * dt, &tmp, &mut k[1]);
        for (o, (p, a)) in tmp.iter_mut().zip(psi.iter().zip(&k[1])) {
            *o = p + a * (0.5 * dt);
        }
        deriv(t + 0.5 * dt, &tmp, &mut k[2]);
        for (o, (p, a)) in tmp.iter_mut().zip(psi.iter().zip(&k[2])) {
            *o = p + a * dt;
        }
        deriv(t + dt, &tmp, &mut k[3]);
        for i in 0..d {
            psi[i] += (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * (dt / 6.0);
        }
        let nrm = norm(&psi);
        max_drift = max_drift.max((nrm - 1.0).abs() / dt);
        psi.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(Evolution { state: psi, steps, dt, max_drift_rate: max_drift })
}
