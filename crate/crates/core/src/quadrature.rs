//! Gaussian rules from the three-term recurrence (Golub-Welsch).
//!
//! Two families are needed: Legendre on an arbitrary interval, and the
//! power weight `s^γ` on `[0, a]`, which is Jacobi `(0, γ)` on `[-1, 1]`
//! after an affine map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported rule size.
pub const MAX_NODES: usize = 64;

const QL_MAX_ITER: usize = 100;
const QL_TOL: f64 = 1e-14;

/// Nodes and weights of an n-point rule for `∫_lo^hi f(s) s^γ ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
    /// γ such that the rule integrates `f(s)·s^γ`; zero for Legendre.
    pub weight_exponent: f64,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_k f(s_k).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&s, &w)| w * f(s)).sum()
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalised eigenvector (implicit QL with Wilkinson shifts).
///
/// `diag` has length n, `off[i]` couples rows i and i+1 (length n−1).
fn tridiagonal_eigen_first_row(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= QL_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::QuadratureConstruction {
                    n,
                    reason: format!("QL iteration exceeded {QL_MAX_ITER} sweeps"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// Solve for a rule on [-1, 1] given recurrence diagonals, squared
/// off-diagonals and total mass μ0. Returns (nodes, weights) sorted.
fn golub_welsch(diag: &[f64], off_sq: &[f64], mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let off: Vec<f64> = off_sq.iter().map(|b| b.sqrt()).collect();
    let (x, v) = tridiagonal_eigen_first_row(diag, &off)?;
    let mut pairs: Vec<(f64, f64)> = x.into_iter().zip(v).map(|(x, v)| (x, mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidParameter(format!("rule size n = {n} must lie in 1..={MAX_NODES}")));
    }
    Ok(())
}

/// n-point Gauss-Legendre rule on [lo, hi].
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<QuadRule> {
    check_n(n)?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let diag = vec![0.0; n];
    let off_sq: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k * k / (4.0 * k * k - 1.0)
        })
        .collect();
    let (x, w) = golub_welsch(&diag, &off_sq, 2.0)?;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    Ok(QuadRule {
        nodes: x.iter().map(|&x| mid + half * x).collect(),
        weights: w.iter().map(|&w| half * w).collect(),
        interval: (lo, hi),
        weight_exponent: 0.0,
    })
}

/// n-point rule for `∫_0^a f(s) s^γ ds`, γ ∈ (−1, 1). The weights already
/// carry the `s^γ` factor.
pub fn gauss_jacobi_power(n: usize, gamma: f64, a: f64) -> Result<QuadRule> {
    check_n(n)?;
    if !(gamma.abs() < 1.0) {
        return Err(Error::Domain(format!("power-weight exponent must satisfy |γ| < 1, got {gamma}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("interval end a must be positive, got {a}")));
    }
    // Jacobi (alpha, beta) = (0, gamma): weight (1+x)^gamma on [-1, 1]
    let (ja, jb) = (0.0_f64, gamma);
    let ab = ja + jb;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (jb - ja) / (ab + 2.0)
            } else {
                let t = 2.0 * k as f64 + ab;
                (jb * jb - ja * ja) / (t * (t + 2.0))
            }
        })
        .collect();
    let off_sq: Vec<f64> = (1..n)
        .map(|k| {
            if k == 1 {
                4.0 * (1.0 + ja) * (1.0 + jb) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let k = k as f64;
                let t = 2.0 * k + ab;
                4.0 * k * (k + ja) * (k + jb) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0))
            }
        })
        .collect();
    let (x, v) = golub_welsch(&diag, &off_sq, 1.0)?;
    let mass = a.powf(gamma + 1.0) / (gamma + 1.0);
    Ok(QuadRule {
        nodes: x.iter().map(|&x| 0.5 * a * (1.0 + x)).collect(),
        weights: v.iter().map(|&v| mass * v).collect(),
        interval: (0.0, a),
        weight_exponent: gamma,
    })
}
