//! Seeded numerical checks of the discrete inequalities behind the stability
//! and error estimates. Each suite returns a ledger entry listing every
//! violating instance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{energy_constants, truncation_bound, TruncationVariant, Variant};
use crate::error::Result;
use crate::pde::{difference_norm_sq, grid_norm_sq, summation_by_parts_lhs};
use crate::reference::{caputo_reference, AnalyticFamily};
use crate::schemes::{gl_coefficients, HistoryState, SchemeKind};
use crate::soe::{build_soe, SoEParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropertyConfig {
    pub seed: u64,
    /// Random mesh functions per coercivity and mesh suite.
    pub n_cases: usize,
    pub gl_cases: usize,
    pub gl_steps: usize,
    /// Replaces the certified FIDR kernel error in the coercivity check.
    pub eps0_override: Option<f64>,
    /// Upper end of the sampled Re(c); positive values leave the contract.
    pub gl_re_c_max: f64,
    pub truncation_steps: usize,
    pub truncation_dt: f64,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_cases: 100,
            gl_cases: 20,
            gl_steps: 2000,
            eps0_override: None,
            gl_re_c_max: 0.0,
            truncation_steps: 1000,
            truncation_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Every instance had a non-positive energy coefficient, so nothing was checked.
    Inadmissible,
    /// Some instances violated the precondition and were excluded.
    OutOfContract,
}

/// One violating (or excluded) instance. `lhs <= rhs` is the property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub status: Status,
    pub checked: usize,
    pub skipped_inadmissible: usize,
    pub out_of_contract: usize,
    pub violations: Vec<Instance>,
    pub excluded: Vec<Instance>,
    /// Smallest (rhs − lhs)/max(|lhs|, |rhs|, 1e-300) over checked instances.
    pub worst_margin: f64,
}

impl PropertyResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Pass,
            checked: 0,
            skipped_inadmissible: 0,
            out_of_contract: 0,
            violations: Vec::new(),
            excluded: Vec::new(),
            worst_margin: f64::INFINITY,
        }
    }

    /// Record `lhs <= rhs` with a relative slack for rounding.
    fn check(&mut self, params: Vec<(&str, f64)>, lhs: f64, rhs: f64, slack: f64) {
        self.checked += 1;
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        let margin = (rhs - lhs) / scale;
        self.worst_margin = self.worst_margin.min(margin);
        if !(lhs <= rhs + slack * scale) {
            self.violations.push(Instance { params: own(params), lhs, rhs });
        }
    }

    fn finish(mut self) -> Self {
        self.status = if !self.violations.is_empty() {
            Status::Fail
        } else if self.out_of_contract > 0 {
            Status::OutOfContract
        } else if self.checked == 0 && self.skipped_inadmissible > 0 {
            Status::Inadmissible
        } else {
            Status::Pass
        };
        self
    }
}

fn own(params: Vec<(&str, f64)>) -> Vec<(String, f64)> {
    params.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyLedger {
    pub config: PropertyConfig,
    pub results: Vec<PropertyResult>,
}

impl PropertyLedger {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

const ROUNDING_SLACK: f64 = 1e-10;

/// Ladder used by the coercivity suites: fine enough that the kernel error
/// stays well inside the admissible range for horizons up to about 10.
fn coercivity_ladder() -> SoEParams {
    SoEParams::ladder(0, 13, 16, 12)
}

struct CoercivityCase {
    alpha: f64,
    dt: f64,
    g: Vec<f64>,
}

fn random_case(rng: &mut ChaCha8Rng) -> CoercivityCase {
    let alpha = rng.gen_range(0.05..0.95);
    let dt = 10f64.powf(rng.gen_range(-2.0..-1.0));
    let n = rng.gen_range(2..=100usize);
    let mut g = Vec::with_capacity(n + 1);
    g.push(rng.gen_range(-3.0..3.0));
    g.extend((0..n).map(|_| rng.gen_range(-1.0..1.0)));
    CoercivityCase { alpha, dt, g }
}

/// Δt Σ_k (D g^k) g^k against the lower bound, at every prefix length.
pub fn coercivity_suite(variant: Variant, config: &PropertyConfig) -> Result<PropertyResult> {
    let (name, kind, salt) = match variant {
        Variant::Fir => ("coercivity-fir", SchemeKind::Fir, 1),
        Variant::Fidr => ("coercivity-fidr", SchemeKind::Fidr, 2),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(salt));
    let mut res = PropertyResult::new(name);
    for case in 0..config.n_cases {
        let CoercivityCase { alpha, dt, g } = random_case(&mut rng);
        let n = g.len() - 1;
        let horizon = n as f64 * dt;
        let beta = kind.kernel_exponent(alpha).unwrap_or(alpha);
        let soe = build_soe(beta, coercivity_ladder(), dt, horizon)?;
        let eps = match (variant, config.eps0_override) {
            (Variant::Fidr, Some(e)) => e,
            _ => soe.bound,
        };
        let mut st = HistoryState::scalar(kind, alpha, dt, Some(&soe), g[0])?;
        let mut lhs = 0.0;
        let mut energy = 0.0;
        let mut any_admissible = false;
        for k in 1..=n {
            let d = st.step_scalar(g[k])?;
            lhs += dt * d * g[k];
            energy += g[k] * g[k];
            let c = energy_constants(alpha, k as f64 * dt, (k - 1) as f64 * dt, dt, eps, variant)?;
            if !c.admissible {
                continue;
            }
            any_admissible = true;
            let rhs = 0.5 * c.mu * dt * energy - c.rho * g[0] * g[0];
            // property reads rhs <= lhs
            res.check(
                vec![("case", case as f64), ("alpha", alpha), ("dt", dt), ("n", k as f64), ("eps", eps)],
                rhs,
                lhs,
                ROUNDING_SLACK,
            );
        }
        if !any_admissible {
            res.skipped_inadmissible += 1;
        }
    }
    Ok(res.finish())
}

/// ‖u‖_∞² ≤ θ‖δ_x u‖² + (1/θ + 1/L)‖u‖² on random fields.
pub fn mesh_suite(config: &PropertyConfig) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(3));
    let mut res = PropertyResult::new("sobolev-mesh");
    for case in 0..config.n_cases {
        let cells = rng.gen_range(2..=200usize);
        let length = rng.gen_range(0.1..10.0);
        let h = length / cells as f64;
        let u: Vec<f64> = (0..=cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (d2, n2) = (difference_norm_sq(&u, h), grid_norm_sq(&u, h));
        for &theta in &[0.1, 1.0, 10.0] {
            let rhs = theta * d2 + (1.0 / theta + 1.0 / length) * n2;
            res.check(vec![("case", case as f64), ("cells", cells as f64), ("length", length), ("theta", theta)], sup * sup, rhs, ROUNDING_SLACK);
        }
    }
    res.finish()
}

/// The summation-by-parts identity, checked both ways.
pub fn summation_by_parts_suite(config: &PropertyConfig) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(4));
    let mut res = PropertyResult::new("summation-by-parts");
    for case in 0..config.n_cases {
        let cells = rng.gen_range(2..=200usize);
        let h = rng.gen_range(0.1..10.0) / cells as f64;
        let u: Vec<f64> = (0..=cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs = summation_by_parts_lhs(&u, h);
        let rhs = difference_norm_sq(&u, h);
        res.check(vec![("case", case as f64), ("cells", cells as f64), ("h", h)], (lhs - rhs).abs(), 1e-9 * rhs.max(1.0), 0.0);
    }
    res.finish()
}

fn family_maxima(family: &AnalyticFamily, t_n: f64, t_prev: f64) -> (f64, f64) {
    match family {
        AnalyticFamily::Power(s) if *s == 2.0 => (2.0, 2.0 * t_prev),
        AnalyticFamily::Sin => (t_n.min(std::f64::consts::FRAC_PI_2).sin(), 1.0),
        _ => (f64::NAN, f64::NAN),
    }
}

/// Pointwise L1 and FIDR errors against the analytic Caputo derivative.
pub fn truncation_suite(variant: TruncationVariant, config: &PropertyConfig) -> Result<PropertyResult> {
    let (name, kind) = match variant {
        TruncationVariant::L1 => ("truncation-l1", SchemeKind::L1),
        TruncationVariant::Fidr => ("truncation-fidr", SchemeKind::Fidr),
    };
    let mut res = PropertyResult::new(name);
    let dt = config.truncation_dt;
    let steps = config.truncation_steps;
    let families = [(AnalyticFamily::Power(2.0), 0.0), (AnalyticFamily::Sin, 1.0)];
    for &alpha in &[0.1, 0.5, 0.9] {
        let soe = match kind {
            SchemeKind::Fidr => Some(build_soe(alpha, SoEParams::default(), dt, steps as f64 * dt)?),
            _ => None,
        };
        let eps0 = soe.as_ref().map_or(0.0, |s| s.bound);
        for (family, tag) in &families {
            let mut st = HistoryState::scalar(kind, alpha, dt, soe.as_ref(), family.value(0.0))?;
            for n in 1..=steps {
                let t_n = n as f64 * dt;
                let t_prev = t_n - dt;
                let approx = st.step_scalar(family.value(t_n))?;
                let exact = caputo_reference(family, alpha, t_n)?;
                let (u2, u1) = family_maxima(family, t_n, t_prev);
                let bound = truncation_bound(variant, alpha, dt, u2, u1, t_prev, eps0)?;
                res.check(vec![("alpha", alpha), ("family", *tag), ("n", n as f64)], (approx - exact).abs(), bound, 1e-9);
            }
        }
    }
    Ok(res.finish())
}

/// Implicit Grünwald-Letnikov solve of D^p U = cU with U⁰ = 1.
pub fn gl_trajectory_max(p: f64, c: Complex64, dt: f64, steps: usize) -> f64 {
    let coeffs = gl_coefficients(p, steps + 1);
    let scale = dt.powf(-p);
    let pivot = Complex64::new(scale, 0.0) - c;
    let mut u: Vec<Complex64> = Vec::with_capacity(steps + 1);
    u.push(Complex64::new(1.0, 0.0));
    let mut peak = 1.0f64;
    for n in 1..=steps {
        let mut hist = Complex64::new(0.0, 0.0);
        for m in 1..=n {
            hist += u[n - m] * coeffs[m];
        }
        let next = -(hist * scale) / pivot;
        peak = peak.max(next.norm());
        u.push(next);
    }
    peak
}

pub fn gl_stability_suite(config: &PropertyConfig) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(5));
    let mut res = PropertyResult::new("gl-stability");
    for case in 0..config.gl_cases {
        let p = rng.gen_range(0.01..0.99);
        let re = rng.gen_range(-50.0..config.gl_re_c_max.max(0.0) + f64::EPSILON);
        let im = rng.gen_range(-50.0..50.0);
        let dt = 10f64.powf(rng.gen_range(-3.0..-1.0));
        let c = Complex64::new(re, im);
        let peak = gl_trajectory_max(p, c, dt, config.gl_steps);
        let params = vec![("case", case as f64), ("p", p), ("re_c", re), ("im_c", im), ("dt", dt)];
        if re > 0.0 {
            res.out_of_contract += 1;
            res.excluded.push(Instance { params: own(params), lhs: peak, rhs: 1.0 });
            continue;
        }
        res.check(params, peak, 1.0, 1e-12);
    }
    res.finish()
}

/// Every suite in a fixed order.
pub fn run_all(config: &PropertyConfig) -> Result<PropertyLedger> {
    let results = vec![
        coercivity_suite(Variant::Fir, config)?,
        coercivity_suite(Variant::Fidr, config)?,
        mesh_suite(config),
        summation_by_parts_suite(config),
        truncation_suite(TruncationVariant::L1, config)?,
        truncation_suite(TruncationVariant::Fidr, config)?,
        gl_stability_suite(config),
    ];
    Ok(PropertyLedger { config: config.clone(), results })
}
