//! Convergence-rate fitting and the closed-form constants of the stability
//! and truncation estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma;

/// Least-squares fit of log(err) against log(dt).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    /// Strictly decreasing.
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
    pub intercept: f64,
    /// Points dropped for a non-positive or non-finite error.
    pub rejected: Vec<(f64, f64)>,
}

/// Fit `log err = slope·log dt + intercept`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<ConvergenceStudy> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!("rate fit needs at least 3 points, got {}", points.len())));
    }
    let mut kept: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    let mut rejected = Vec::new();
    for &(dt, err) in points {
        if dt > 0.0 && err > 0.0 && err.is_finite() && dt.is_finite() {
            kept.push((dt, err));
        } else {
            rejected.push((dt, err));
        }
    }
    if kept.len() < 2 {
        return Err(Error::InvalidParameter(format!("only {} usable points after rejecting {:?}", kept.len(), rejected)));
    }
    kept.sort_by(|a, b| b.0.total_cmp(&a.0));
    if kept.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter("step sizes must be distinct".into()));
    }
    let n = kept.len() as f64;
    let (sx, sy) = kept.iter().fold((0.0, 0.0), |(a, b), &(d, e)| (a + d.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(d, e) in &kept {
        let dx = d.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (e.ln() - my);
    }
    let slope = sxy / sxx;
    Ok(ConvergenceStudy {
        dts: kept.iter().map(|p| p.0).collect(),
        errors: kept.iter().map(|p| p.1).collect(),
        fitted_slope: slope,
        intercept: my - slope * mx,
        rejected,
    })
}

/// Fit split at the first point where the error grows as dt shrinks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFit {
    pub converging: Vec<(f64, f64)>,
    /// Points from the first error increase onwards (small dt).
    pub blowup: Vec<(f64, f64)>,
    pub fit: Option<ConvergenceStudy>,
    pub blowup_fit: Option<ConvergenceStudy>,
}

pub fn fit_excluding_blowup(points: &[(f64, f64)]) -> SplitFit {
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let cut = sorted.windows(2).position(|w| w[1].1 > w[0].1).map_or(sorted.len(), |i| i + 1);
    let converging = sorted[..cut].to_vec();
    let blowup = sorted[cut..].to_vec();
    SplitFit {
        fit: fit_rate(&converging).ok(),
        blowup_fit: fit_rate(&blowup).ok(),
        converging,
        blowup,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Variant {
    Fir,
    Fidr,
}

/// Constants of the discrete energy estimate for one scheme at step n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConstants {
    pub variant: Variant,
    pub alpha: f64,
    pub t_n: f64,
    pub t_prev: f64,
    pub dt: f64,
    pub eps: f64,
    /// Coefficient of the interior energy.
    pub mu: f64,
    /// Coefficient of the boundary energy.
    pub nu: f64,
    /// Weight of the initial interior data.
    pub rho: f64,
    /// Weight of the initial boundary data.
    pub varrho: f64,
    /// Both μ and ν positive; otherwise the estimate says nothing.
    pub admissible: bool,
}

pub fn energy_constants(alpha: f64, t_n: f64, t_prev: f64, dt: f64, eps: f64, variant: Variant) -> Result<EnergyConstants> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1), got {alpha}")));
    }
    if !(t_n > 0.0) || !(dt > 0.0) || t_prev < 0.0 || eps < 0.0 {
        return Err(Error::InvalidParameter("need t_n > 0, dt > 0, t_prev >= 0, eps >= 0".into()));
    }
    let half = 0.5 * alpha;
    let (mu, nu, rho, varrho) = match variant {
        Variant::Fir => (
            (t_n.powf(-alpha) - 2.0 * alpha * eps * t_prev) / gamma(1.0 - alpha),
            (t_n.powf(-half) - alpha * eps * t_prev) / gamma(1.0 - half),
            (t_n.powf(1.0 - alpha) - alpha * (1.0 - alpha) * eps * t_prev * dt) / gamma(2.0 - alpha),
            (t_n.powf(1.0 - half) - half * (1.0 - half) * eps * t_prev * dt) / gamma(2.0 - half),
        ),
        Variant::Fidr => (
            (t_n.powf(-alpha) - eps) / gamma(1.0 - alpha),
            (t_n.powf(-half) - eps) / gamma(1.0 - half),
            (dt.powf(1.0 - alpha) / (1.0 - alpha) + t_prev * dt.powf(-alpha)) / (2.0 * gamma(1.0 - alpha)),
            (dt.powf(1.0 - half) / (1.0 - half) + t_prev * dt.powf(-half)) / (2.0 * gamma(1.0 - half)),
        ),
    };
    Ok(EnergyConstants { variant, alpha, t_n, t_prev, dt, eps, mu, nu, rho, varrho, admissible: mu > 0.0 && nu > 0.0 })
}

/// Largest kernel error for which the FIR interior coefficient stays positive.
pub fn fir_eps_threshold(alpha: f64, t_n: f64, t_prev: f64) -> f64 {
    if t_prev == 0.0 {
        f64::INFINITY
    } else {
        t_n.powf(-alpha) / (2.0 * alpha * t_prev)
    }
}

/// Largest kernel error for which the FIDR interior coefficient stays positive.
pub fn fidr_eps_threshold(alpha: f64, t_n: f64) -> f64 {
    t_n.powf(-alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TruncationVariant {
    L1,
    Fidr,
}

/// Explicit bound on |exact Caputo − discrete| at one step, given
/// max|u''| on [0, t_n] and max|u'| on [0, t_{n−1}].
pub fn truncation_bound(
    variant: TruncationVariant,
    alpha: f64,
    dt: f64,
    max_u2: f64,
    max_u1: f64,
    t_prev: f64,
    eps0: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1), got {alpha}")));
    }
    let shape = (1.0 - alpha) / 12.0 + 2f64.powf(2.0 - alpha) / (2.0 - alpha) - (1.0 + 2f64.powf(-alpha));
    let l1 = dt.powf(2.0 - alpha) / gamma(2.0 - alpha) * shape * max_u2;
    Ok(match variant {
        TruncationVariant::L1 => l1,
        TruncationVariant::Fidr => l1 + eps0 * t_prev * max_u1 / gamma(1.0 - alpha),
    })
}
