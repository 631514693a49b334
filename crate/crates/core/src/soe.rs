//! Sum-of-exponentials compression of the power kernel `t^{-β}`.
//!
//! `t^{-β} = (1/Γ(β)) ∫_0^∞ e^{-ts} s^{β-1} ds`; the frequency axis is cut
//! into `[0, 2^a] ∪ [2^a, 2^{a+1}] ∪ … ∪ [2^{b-1}, 2^b]`, the first piece
//! handled by a power-weight Gauss rule, the dyadic pieces by Gauss-Legendre,
//! and the tail beyond `2^b` dropped.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi_power, gauss_legendre};
use crate::special::{gamma, gamma_q};

/// Ladder parameters. The power-weight rule covers `[0, 2^{-m}]`, the dyadic
/// ladder tops out at `2^{n_hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoEParams {
    pub m: i32,
    pub n_hi: i32,
    /// Nodes of the power-weight rule on `[0, 2^{-m}]`.
    pub n1: usize,
    /// Nodes of each Legendre rule on a dyadic interval.
    pub n2: usize,
}

impl SoEParams {
    /// Ladder `[0, 2^a]`, `[2^a, 2^{a+1}]`, …, `[2^{b-1}, 2^b]`.
    pub fn ladder(a: i32, b: i32, n1: usize, n2: usize) -> Self {
        Self { m: -a, n_hi: b, n1, n2 }
    }

    /// Exponent of the power-weight cutoff `2^a`.
    pub fn a(&self) -> i32 {
        -self.m
    }

    pub fn n_intervals(&self) -> usize {
        (self.n_hi - self.a()).max(0) as usize
    }

    pub fn n_modes(&self) -> usize {
        self.n1 + self.n2 * self.n_intervals()
    }

    /// Named ladders by total mode count: 9, 25 and 40.
    pub fn preset(n_modes: usize) -> Option<Self> {
        match n_modes {
            9 => Some(Self::ladder(3, 6, 3, 2)),
            25 => Some(Self::ladder(3, 10, 4, 3)),
            40 => Some(Self::ladder(3, 15, 4, 3)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a() >= self.n_hi {
            return Err(Error::InvalidParameter(format!(
                "ladder needs a < b (a = {}, b = {})",
                self.a(),
                self.n_hi
            )));
        }
        if self.n_hi - self.a() > 200 {
            return Err(Error::InvalidParameter("ladder spans more than 200 dyadic intervals".into()));
        }
        if self.n_modes() == 0 {
            return Err(Error::SoeConstruction(format!("parameters {self:?} yield zero modes")));
        }
        Ok(())
    }
}

impl Default for SoEParams {
    fn default() -> Self {
        Self::ladder(3, 10, 4, 3)
    }
}

/// Compressed kernel `Σ w_i e^{-s_i t} ≈ t^{-β}` on `[delta, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoEApproximation {
    pub beta: f64,
    pub delta: f64,
    pub horizon: f64,
    pub params: SoEParams,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub n_modes: usize,
    pub bound: f64,
}

impl SoEApproximation {
    /// Arbitrary positive modes, bound set to infinity (used for tests and
    /// hand-made kernels).
    pub fn from_modes(beta: f64, nodes: Vec<f64>, weights: Vec<f64>, delta: f64, horizon: f64) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::Contract("nodes and weights must be non-empty and of equal length".into()));
        }
        if nodes.iter().chain(&weights).any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter("nodes and weights must be positive".into()));
        }
        check_window(delta, horizon)?;
        let n_modes = nodes.len();
        Ok(Self {
            beta,
            delta,
            horizon,
            params: SoEParams { m: 0, n_hi: 0, n1: 0, n2: 0 },
            nodes,
            weights,
            n_modes,
            bound: f64::INFINITY,
        })
    }

    /// Σ w_i e^{-s_i t}.
    pub fn eval(&self, t: f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&s, &w)| w * (-s * t).exp()).sum()
    }
}

fn check_window(delta: f64, horizon: f64) -> Result<()> {
    if !(delta > 0.0) || !(horizon > delta) || !horizon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need 0 < delta < horizon, got delta = {delta}, horizon = {horizon}"
        )));
    }
    Ok(())
}

/// Build the compressed kernel for `t^{-β}`, β ∈ (0, 1) ∪ (1, 2).
pub fn build_soe(beta: f64, params: SoEParams, delta: f64, horizon: f64) -> Result<SoEApproximation> {
    params.validate()?;
    check_window(delta, horizon)?;
    let bound = soe_error_bound(beta, params, delta, horizon)?;
    let g = gamma(beta);
    let mut nodes = Vec::with_capacity(params.n_modes());
    let mut weights = Vec::with_capacity(params.n_modes());

    if params.n1 > 0 {
        let rule = gauss_jacobi_power(params.n1, beta - 1.0, 2f64.powi(params.a()))?;
        for (s, w) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push(*s);
            weights.push(w / g);
        }
    }
    if params.n2 > 0 {
        for j in params.a()..params.n_hi {
            let rule = gauss_legendre(params.n2, 2f64.powi(j), 2f64.powi(j + 1))?;
            for (s, w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(*s);
                weights.push(w * s.powf(beta - 1.0) / g);
            }
        }
    }
    let n_modes = nodes.len();
    if n_modes == 0 {
        return Err(Error::SoeConstruction("no modes produced".into()));
    }
    Ok(SoEApproximation { beta, delta, horizon, params, nodes, weights, n_modes, bound })
}

/// The three pieces of the analytic error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub tail: f64,
    pub head: f64,
    pub ladder: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.tail + self.head + self.ladder
    }
}

/// Analytic bound on `sup_{t ∈ [delta, horizon]} |t^{-β} − Σ w_i e^{-s_i t}|`.
pub fn soe_error_bound(beta: f64, params: SoEParams, delta: f64, horizon: f64) -> Result<f64> {
    Ok(soe_bound_terms(beta, params, delta, horizon)?.total())
}

/// Bound split into tail (frequencies above `2^b`), head (the power-weight
/// rule on `[0, 2^a]`) and ladder (sum over dyadic Legendre intervals).
pub fn soe_bound_terms(beta: f64, params: SoEParams, delta: f64, horizon: f64) -> Result<BoundTerms> {
    if !(beta > 0.0 && beta < 2.0) || beta == 1.0 {
        return Err(Error::Domain(format!("bound needs β in (0,1) or (1,2), got {beta}")));
    }
    params.validate()?;
    check_window(delta, horizon)?;
    let g = gamma(beta);
    let big_a = 2f64.powi(params.a());
    let p = 2f64.powi(params.n_hi);
    let fir = beta > 1.0;

    let tail = if fir {
        (-delta * p).exp() * 2f64.powf(beta - 1.0) * (p.powf(beta) / g + delta.powf(-beta))
    } else {
        (-delta * p).exp() / (g * delta * p.powf(1.0 - beta))
    };

    let n1 = params.n1;
    let head = match n1 {
        // segment dropped entirely: the whole of ∫_0^A s^{β-1} ds is missing
        0 => big_a.powf(beta) / beta,
        // both the integral and the one-point rule lie in [0, A^β/β]
        1 => big_a.powf(beta) / beta,
        _ => {
            let n = n1 as f64;
            if fir {
                2.0 * PI.sqrt()
                    * big_a.powf(beta)
                    * n.powf(1.5)
                    * (std::f64::consts::E / 8.0).powf(2.0 * n)
                    * (big_a * horizon / n).powf(2.0 * n)
            } else {
                let e = std::f64::consts::E;
                4.0 * PI.sqrt() * big_a.powf(beta) / (e * e) * (2.0 * n - 1.0) * n.powf(1.5) / (2.0 * n + beta)
                    * (big_a * e * n * horizon / (2.0 * (2.0 * n - 1.0).powi(2))).powf(2.0 * n)
            }
        }
    } / g;

    let mut ladder = 0.0;
    for j in params.a()..params.n_hi {
        let aj = 2f64.powi(j);
        let term = match params.n2 {
            0 => (2.0 * aj).powf(beta) / beta - aj.powf(beta) / beta,
            // integral and one-point rule both lie in [0, a_j · max(a_j, 2a_j)^{β-1}]
            1 => aj.powf(beta) * 2f64.powf(beta - 1.0).max(1.0),
            n2 => {
                let q = ((1.0 / std::f64::consts::E).exp() / 4.0).powf(2.0 * n2 as f64);
                if fir {
                    2f64.powf(beta - 1.5) * PI * aj.powf(beta) * q
                } else {
                    2.0 * 2f64.sqrt() * PI * aj.powf(beta) * q
                }
            }
        };
        ladder += term;
    }
    ladder /= g;

    Ok(BoundTerms { tail, head, ladder })
}

/// Sample `|t^{-β} − soe(t)|` at `n_samples` log-uniform points on
/// `[delta, horizon]` (endpoints included). Returns the maximum and the curve.
pub fn soe_max_error(soe: &SoEApproximation, n_samples: usize) -> Result<(f64, Vec<(f64, f64)>)> {
    soe_error_curve(soe, soe.delta, soe.horizon, n_samples)
}

/// As [`soe_max_error`] but on an explicit window `[lo, hi]`.
pub fn soe_error_curve(soe: &SoEApproximation, lo: f64, hi: f64, n_samples: usize) -> Result<(f64, Vec<(f64, f64)>)> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n_samples}")));
    }
    check_window(lo, hi)?;
    let (l0, l1) = (lo.ln(), hi.ln());
    let mut max_err: f64 = 0.0;
    let curve: Vec<(f64, f64)> = (0..n_samples)
        .map(|k| {
            let t = if k == n_samples - 1 {
                hi
            } else if k == 0 {
                lo
            } else {
                (l0 + (l1 - l0) * k as f64 / (n_samples - 1) as f64).exp()
            };
            let err = (t.powf(-soe.beta) - soe.eval(t)).abs();
            max_err = max_err.max(err);
            (t, err)
        })
        .collect();
    Ok((max_err, curve))
}

/// `(1/Γ(β)) ∫_p^∞ e^{-ts} s^{β-1} ds = Q(β, tp) / t^β`; zero once `tp > 700`.
pub fn tail_integral(beta: f64, p: f64, t: f64) -> Result<f64> {
    if !(beta > 0.0) || !(p > 0.0) || !(t > 0.0) {
        return Err(Error::Domain(format!("tail_integral needs positive arguments (β = {beta}, p = {p}, t = {t})")));
    }
    let x = t * p;
    if x > 700.0 {
        return Ok(0.0);
    }
    Ok(gamma_q(beta, x)? * t.powf(-beta))
}
