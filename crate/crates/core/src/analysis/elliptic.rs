//! Complete elliptic integrals in the parameter convention (m = k²).

use std::f64::consts::FRAC_PI_2;

/// K(m) by the arithmetic-geometric mean; infinite at m = 1.
pub fn ellip_k(m: f64) -> f64 {
    if m >= 1.0 {
        return f64::INFINITY;
    }
    let (mut a, mut b) = (1.0, (1.0 - m).sqrt());
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    FRAC_PI_2 / a
}

/// E(m) by the AGM with the c_n correction series; E(1) = 1.
pub fn ellip_e(m: f64) -> f64 {
    if m >= 1.0 {
        return 1.0;
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    FRAC_PI_2 / a * (1.0 - sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((ellip_k(0.0) - FRAC_PI_2).abs() < 1e-15);
        assert!((ellip_e(0.0) - FRAC_PI_2).abs() < 1e-15);
        // K(1/2), E(1/2)
        assert!((ellip_k(0.5) - 1.8540746773013719).abs() < 1e-14);
        assert!((ellip_e(0.5) - 1.3506438810476755).abs() < 1e-14);
        assert!((ellip_e(0.9) - 1.1047747327040733).abs() < 1e-13);
        // Legendre relation at m = 1/2: 2EK − K² = π/2
        let (k, e) = (ellip_k(0.5), ellip_e(0.5));
        assert!((2.0 * e * k - k * k - FRAC_PI_2).abs() < 1e-13);
    }
}
