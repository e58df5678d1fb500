use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::elliptic::{ellip_e, ellip_k};
use super::quad::integrate;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationMethod {
    Quadrature,
    Elliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub s: f64,
    pub alpha: f64,
    pub value: f64,
    pub method: CorrelationMethod,
}

/// Nearest-neighbour ⟨XX⟩ of the infinite transverse Ising chain at s.
pub fn xx_correlation(s: f64, method: CorrelationMethod) -> Result<CorrelationResult> {
    let alpha = s / (1.0 - s);
    let value = match method {
        CorrelationMethod::Quadrature => {
            if !(0.0..1.0).contains(&s) {
                return Err(Error::OutOfRange { what: "s", value: s });
            }
            let f = |k: f64| (k.cos() + alpha) / (1.0 + alpha * alpha + 2.0 * alpha * k.cos()).sqrt();
            integrate(f, 0.0, PI, 1e-12) / PI
        }
        CorrelationMethod::Elliptic => {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::OutOfRange { what: "s", value: s });
            }
            if s == 0.0 {
                0.0
            } else {
                let m = 4.0 * s * (1.0 - s);
                let kpart = if 2.0 * s - 1.0 == 0.0 { 0.0 } else { (2.0 * s - 1.0) * ellip_k(m) };
                (kpart + ellip_e(m)) / (PI * s)
            }
        }
    };
    Ok(CorrelationResult { s, alpha, value, method })
}

/// ⟨XX⟩^{n/2}, the no-error amplitude of an n-qubit wire ended at s.
pub fn error_amplitude(n: usize, s: f64) -> Result<f64> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Domain(format!("n must be even and >= 2, got {n}")));
    }
    let xx = xx_correlation(s, CorrelationMethod::Elliptic)?.value;
    Ok(xx.powf(n as f64 / 2.0))
}

/// Quartic expansion of the amplitude about s = 1.
pub fn error_amplitude_series(n: usize, s: f64) -> f64 {
    let (nf, d) = (n as f64, s - 1.0);
    1.0 - nf / 8.0 * d * d + nf / 4.0 * d.powi(3) + (2.0 * nf * nf - 53.0 * nf) / 128.0 * d.powi(4)
}

/// Fraction of the l modes with 2cos(kπ/(2(l+1))) below k_BT.
pub fn thermal_fraction(l: usize, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::OutOfRange { what: "temperature", value: temperature });
    }
    if l == 0 {
        return Err(Error::OutOfRange { what: "l", value: 0.0 });
    }
    let lf = l as f64;
    let count = (1..=l).filter(|&k| 2.0 * (k as f64 * PI / (2.0 * (lf + 1.0))).cos() < temperature).count();
    Ok(count as f64 / lf)
}

/// l → ∞ limit of the thermal fraction.
pub fn thermal_fraction_limit(temperature: f64) -> f64 {
    1.0 - 2.0 / PI * (temperature / 2.0).min(1.0).acos()
}
