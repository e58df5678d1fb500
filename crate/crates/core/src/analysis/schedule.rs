use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quad::trapezoid;
use crate::error::{Error, Result};
use crate::freefermion::omega_k;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub epsilon: f64,
    /// Monotone (t, s) samples from (0, 0) to (T, 1).
    pub samples: Vec<(f64, f64)>,
    pub total_time: f64,
}

struct Closed {
    a: f64,
    phi: f64,
    shift: f64,
}

impl Closed {
    fn new(l: usize, eps: f64) -> Self {
        let lf = l as f64;
        Closed { a: 1.0 / (4.0 * eps * (PI / (lf + 1.0)).sin()), phi: PI / (2.0 * (lf + 1.0)), shift: PI * lf / (2.0 * (lf + 1.0)) }
    }
    fn t(&self, s: f64) -> f64 {
        self.a * (self.shift + ((2.0 * s - 1.0) / self.phi.tan()).atan())
    }
    fn s(&self, t: f64) -> f64 {
        0.5 * (1.0 + self.phi.tan() * (t / self.a - self.shift).tan())
    }
}

/// Total time of the closed-form schedule.
pub fn closed_form_total_time(l: usize, eps: f64) -> f64 {
    let lf = l as f64;
    PI * lf / (4.0 * eps * (lf + 1.0)) / (PI / (lf + 1.0)).sin()
}

/// t(s) of the closed-form schedule.
pub fn closed_form_time(l: usize, eps: f64, s: f64) -> f64 {
    Closed::new(l, eps).t(s)
}

/// Schedule with ds/dt = ε·ω_l(s)², sampled on a uniform t-grid of `points` points.
pub fn schedule_closed_form(l: usize, eps: f64, points: usize) -> Result<Schedule> {
    if l < 1 {
        return Err(Error::OutOfRange { what: "l", value: l as f64 });
    }
    if !(eps > 0.0) {
        return Err(Error::OutOfRange { what: "epsilon", value: eps });
    }
    let c = Closed::new(l, eps);
    let total = closed_form_total_time(l, eps);
    let points = points.max(2);
    let samples = (0..points)
        .map(|i| {
            let t = total * i as f64 / (points - 1) as f64;
            let s = if i == 0 {
                0.0
            } else if i == points - 1 {
                1.0
            } else {
                c.s(t).clamp(0.0, 1.0)
            };
            (t, s)
        })
        .collect();
    Ok(Schedule { epsilon: eps, samples, total_time: total })
}

/// Integrate dt = ds/(ε·Δ(s)²) by the trapezoid rule on the given (s, Δ) grid.
pub fn schedule_numeric(grid: &[(f64, f64)], eps: f64) -> Result<Schedule> {
    if grid.len() < 2 {
        return Err(Error::Domain("gap curve needs at least two points".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Domain(format!("zero gap at s = {}", p.0)));
    }
    let mut samples = vec![(0.0, grid[0].0)];
    let mut t = 0.0;
    for w in grid.windows(2) {
        let (s0, g0) = w[0];
        let (s1, g1) = w[1];
        t += trapezoid(&[s0, s1], &[1.0 / (eps * g0 * g0), 1.0 / (eps * g1 * g1)]);
        samples.push((t, s1));
    }
    Ok(Schedule { epsilon: eps, samples, total_time: t })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowTime {
    pub l: usize,
    pub epsilon: f64,
    pub eta: f64,
    /// Time spent with 1 − η ≤ s ≤ 1, integrated from the closed-form schedule.
    pub integrated: f64,
    /// Value of the printed t_η expression, for comparison only.
    pub printed_formula: f64,
}

pub fn window_time(l: usize, eps: f64, eta: f64) -> Result<WindowTime> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange { what: "eta", value: eta });
    }
    let c = Closed::new(l, eps);
    let total = closed_form_total_time(l, eps);
    let integrated = total - c.t(1.0 - eta);
    let lf = l as f64;
    let printed = total / (2.0 * eps)
        * (1.0 + 2.0 * (lf + 1.0) / (PI * lf) * ((2.0 * eta - 1.0) / c.phi.tan()).atan());
    Ok(WindowTime { l, epsilon: eps, eta, integrated, printed_formula: printed })
}

/// ε·ω_l(s)², the closed-form schedule's speed.
pub fn closed_form_rate(l: usize, eps: f64, s: f64) -> f64 {
    eps * omega_k(l, s, l).powi(2)
}
