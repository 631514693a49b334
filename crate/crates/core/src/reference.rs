//! Accurate Caputo derivatives of a few analytic functions, used as oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi_power, gauss_legendre};
use crate::special::gamma;

/// Functions with known derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnalyticFamily {
    /// u(t) = t^σ, σ ≥ 0.
    Power(f64),
    /// u(t) = sin t.
    Sin,
    /// u(t) = e^{rate·t} Σ_k coeffs[k] t^k.
    ExpPoly { rate: f64, coeffs: Vec<f64> },
}

impl AnalyticFamily {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            AnalyticFamily::Power(s) => t.powf(*s),
            AnalyticFamily::Sin => t.sin(),
            AnalyticFamily::ExpPoly { rate, coeffs } => (rate * t).exp() * horner(coeffs, t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            AnalyticFamily::Power(s) => {
                if *s == 0.0 {
                    0.0
                } else {
                    s * t.powf(s - 1.0)
                }
            }
            AnalyticFamily::Sin => t.cos(),
            AnalyticFamily::ExpPoly { rate, coeffs } => {
                let d = poly_derivative(coeffs);
                (rate * t).exp() * (rate * horner(coeffs, t) + horner(&d, t))
            }
        }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

const REFERENCE_TOL: f64 = 1e-10;

/// Caputo derivative of order α ∈ (0, 1) at time t > 0.
pub fn caputo_reference(family: &AnalyticFamily, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1), got {alpha}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    match family {
        AnalyticFamily::Power(s) => {
            if *s < 0.0 {
                return Err(Error::Domain(format!("power must be non-negative, got {s}")));
            }
            if *s == 0.0 {
                return Ok(0.0);
            }
            Ok(gamma(s + 1.0) / gamma(s + 1.0 - alpha) * t.powf(s - alpha))
        }
        _ => caputo_of_derivative(|s| family.derivative(s), alpha, t),
    }
}

/// `(1/Γ(1−α)) ∫_0^t u'(t−s) s^{−α} ds` for smooth u'.
///
/// The first panel absorbs the weak singularity with a power-weight rule; the
/// remaining unit-width panels use Gauss-Legendre. Two rule sizes are compared
/// and the result rejected if they disagree beyond the target tolerance.
pub fn caputo_of_derivative<F: Fn(f64) -> f64>(du: F, alpha: f64, t: f64) -> Result<f64> {
    let coarse = panel_sum(&du, alpha, t, 20)?;
    let fine = panel_sum(&du, alpha, t, 30)?;
    let diff = (fine - coarse).abs();
    if diff > REFERENCE_TOL * fine.abs().max(1.0) {
        return Err(Error::NoConvergence { achieved: diff / fine.abs().max(1.0), wanted: REFERENCE_TOL });
    }
    Ok(fine / gamma(1.0 - alpha))
}

fn panel_sum<F: Fn(f64) -> f64>(du: &F, alpha: f64, t: f64, n: usize) -> Result<f64> {
    let width = t.min(1.0);
    let head = gauss_jacobi_power(n, -alpha, width)?;
    let mut total = head.integrate(|s| du(t - s));
    let mut lo = width;
    while lo < t {
        let hi = (lo + 1.0).min(t);
        let rule = gauss_legendre(n, lo, hi)?;
        total += rule.integrate(|s| du(t - s) * s.powf(-alpha));
        lo = hi;
    }
    Ok(total)
}
