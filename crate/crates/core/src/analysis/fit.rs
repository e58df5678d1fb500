use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// gap ≈ c · n^p.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub coefficient: f64,
    pub exponent_stderr: f64,
    pub coefficient_stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least squares of log y on log x.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    let distinct: BTreeSet<u64> = points.iter().map(|p| p.0.to_bits()).collect();
    if distinct.len() < 2 {
        return Err(Error::Domain("singular design: fewer than two distinct x values".into()));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Domain(format!("non-positive point ({}, {})", p.0, p.1)));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let p = sxy / sxx;
    let b = my - p * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - b - p * x).powi(2)).sum();
    let dof = (n - 2.0).max(1.0);
    let sigma2 = sse / dof;
    let se_p = (sigma2 / sxx).sqrt();
    let se_b = (sigma2 * (1.0 / n + mx * mx / sxx)).sqrt();
    let c = b.exp();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(FitResult {
        exponent: p,
        coefficient: c,
        exponent_stderr: se_p,
        coefficient_stderr: c * se_b,
        r_squared: r2,
        points: points.len(),
    })
}
