//! 1D time-fractional diffusion with fractional (order α/2) boundary
//! conditions:
//!
//! ```text
//! D^α u = u_xx + f            in (x_l, x_r)
//! u_x   =  D^{α/2} u          at x_l
//! u_x   = −D^{α/2} u          at x_r
//! ```
//!
//! Central differences in space, any of the four time evaluators, one
//! tridiagonal solve per step.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::{HistoryState, SchemeKind, TimeGrid};
use crate::soe::{build_soe, SoEApproximation, SoEParams};
use crate::special::gamma;

/// Uniform spatial grid x_i = x_lo + i·h, i = 0 … n_cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub h: f64,
    pub n_cells: usize,
}

impl SpaceGrid {
    pub fn new(x_lo: f64, x_hi: f64, n_cells: usize) -> Result<Self> {
        if !(x_lo < x_hi) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::InvalidParameter(format!("need finite x_lo < x_hi, got [{x_lo}, {x_hi}]")));
        }
        if n_cells < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 cells, got {n_cells}")));
        }
        Ok(Self { x_lo, x_hi, h: (x_hi - x_lo) / n_cells as f64, n_cells })
    }

    /// Grid whose spacing is the closest to `h` that divides the interval evenly.
    pub fn with_spacing(x_lo: f64, x_hi: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        let n = ((x_hi - x_lo) / h).round().max(2.0) as usize;
        Self::new(x_lo, x_hi, n)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.h
        }
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.x(i)).collect()
    }
}

pub type Field1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Field2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Right-hand side of the equation.
#[derive(Clone)]
pub enum Source {
    None,
    /// f(x, t)
    Linear(Field2),
    /// f(u), evaluated at the previous step's solution
    Reaction(Field1),
}

/// Problem data. Functions are shared closures so problems can be cloned
/// into parallel sweeps.
#[derive(Clone)]
pub struct DiffusionProblem {
    pub name: String,
    pub alpha: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub initial: Field1,
    pub source: Source,
    pub exact: Option<Field2>,
}

impl fmt::Debug for DiffusionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionProblem")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("domain", &(self.x_lo, self.x_hi))
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl DiffusionProblem {
    /// Largest |exact(x, 0) − initial(x)| over `samples` evenly spaced points.
    pub fn initial_mismatch(&self, samples: usize) -> Option<f64> {
        let exact = self.exact.as_ref()?;
        let n = samples.max(2);
        Some(
            (0..n)
                .map(|k| {
                    let x = self.x_lo + (self.x_hi - self.x_lo) * k as f64 / (n - 1) as f64;
                    (exact(x, 0.0) - (self.initial)(x)).abs()
                })
                .fold(0.0, f64::max),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!("order must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.x_lo < self.x_hi) {
            return Err(Error::InvalidParameter("empty domain".into()));
        }
        Ok(())
    }
}

/// Linear test problem with a known smooth solution on [0, π]:
/// u = x⁴(π−x)⁴ (e^{−x} t^{3+α} + 1).
pub fn manufactured_problem(alpha: f64) -> DiffusionProblem {
    let g = gamma(4.0 + alpha);
    let source = move |x: f64, t: f64| {
        let q = x * x * (PI - x) * (PI - x);
        let bracket = x * x * (56.0 - 16.0 * x + x * x) - 2.0 * PI * x * (28.0 - 12.0 * x + x * x)
            + PI * PI * (12.0 - 8.0 * x + x * x);
        g * q * q * (-x).exp() * t.powi(3) / 6.0
            - q * (t.powf(3.0 + alpha) * (-x).exp() * bracket + 4.0 * (3.0 * PI * PI - 14.0 * PI * x + 14.0 * x * x))
    };
    DiffusionProblem {
        name: "manufactured".into(),
        alpha,
        x_lo: 0.0,
        x_hi: PI,
        initial: Arc::new(|x: f64| (x * (PI - x)).powi(4)),
        source: Source::Linear(Arc::new(source)),
        exact: Some(Arc::new(move |x: f64, t: f64| (x * (PI - x)).powi(4) * ((-x).exp() * t.powf(3.0 + alpha) + 1.0))),
    }
}

/// Logistic-type reaction f(u) = −u(1−u) with two Gaussian bumps at ±1/2.
pub fn nonlinear_problem(alpha: f64) -> DiffusionProblem {
    nonlinear_problem_on(alpha, -1.0, 1.0)
}

pub fn nonlinear_problem_on(alpha: f64, x_lo: f64, x_hi: f64) -> DiffusionProblem {
    DiffusionProblem {
        name: "nonlinear".into(),
        alpha,
        x_lo,
        x_hi,
        initial: Arc::new(|x: f64| (-10.0 * (x - 0.5).powi(2)).exp() + (-10.0 * (x + 0.5).powi(2)).exp()),
        source: Source::Reaction(Arc::new(|u: f64| -u * (1.0 - u))),
        exact: None,
    }
}

/// Zero data: the solution is identically zero.
pub fn zero_problem(alpha: f64, x_lo: f64, x_hi: f64) -> DiffusionProblem {
    DiffusionProblem {
        name: "zero".into(),
        alpha,
        x_lo,
        x_hi,
        initial: Arc::new(|_| 0.0),
        source: Source::None,
        exact: Some(Arc::new(|_, _| 0.0)),
    }
}

/// Sampled field at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: String,
    pub scheme: SchemeKind,
    pub alpha: f64,
    pub time_grid: TimeGrid,
    pub space_grid: SpaceGrid,
    pub soe_params: Option<SoEParams>,
    pub n_modes_interior: usize,
    pub n_modes_boundary: usize,
    pub soe_bound_interior: Option<f64>,
    pub soe_bound_boundary: Option<f64>,
    pub global_error: Option<f64>,
    pub related_error: Option<f64>,
    /// max_k ‖e^k‖_∞
    pub max_error: Option<f64>,
    pub wall_time: f64,
    pub final_values: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
}

/// Extra controls for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Number of evenly spaced snapshots to keep (the final step is always one).
    pub n_snapshots: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { n_snapshots: 10 }
    }
}

/// Running sums behind the global and related error norms.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorAccumulator {
    dt: f64,
    err_sq: f64,
    ref_sq: f64,
    max_err: f64,
}

impl ErrorAccumulator {
    pub fn new(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }

    /// Add one time level given numeric and reference values on the grid.
    pub fn push(&mut self, numeric: &[f64], reference: &[f64]) {
        let mut e: f64 = 0.0;
        let mut r: f64 = 0.0;
        for (u, v) in numeric.iter().zip(reference) {
            e = e.max((u - v).abs());
            r = r.max(v.abs());
        }
        self.err_sq += e * e;
        self.ref_sq += r * r;
        self.max_err = self.max_err.max(e);
    }

    /// sqrt(Δt Σ_k ‖e^k‖²_∞)
    pub fn global(&self) -> f64 {
        (self.dt * self.err_sq).sqrt()
    }

    /// Global error divided by the same norm of the reference.
    pub fn related(&self) -> Result<f64> {
        let denom = (self.dt * self.ref_sq).sqrt();
        if denom == 0.0 {
            return Err(Error::DivisionByZero("reference solution is identically zero".into()));
        }
        Ok(self.global() / denom)
    }

    pub fn max_error(&self) -> f64 {
        self.max_err
    }
}

/// Global error of stored levels; `fields[k−1]` holds time level k.
pub fn global_error<F: Fn(f64, f64) -> f64>(fields: &[Vec<f64>], exact: F, tgrid: &TimeGrid, sgrid: &SpaceGrid) -> f64 {
    accumulate(fields, exact, tgrid, sgrid).global()
}

/// Related error of stored levels; `fields[k−1]` holds time level k.
pub fn related_error<F: Fn(f64, f64) -> f64>(fields: &[Vec<f64>], exact: F, tgrid: &TimeGrid, sgrid: &SpaceGrid) -> Result<f64> {
    accumulate(fields, exact, tgrid, sgrid).related()
}

fn accumulate<F: Fn(f64, f64) -> f64>(fields: &[Vec<f64>], exact: F, tgrid: &TimeGrid, sgrid: &SpaceGrid) -> ErrorAccumulator {
    let mut acc = ErrorAccumulator::new(tgrid.dt);
    let xs = sgrid.nodes();
    for (k, f) in fields.iter().enumerate() {
        let t = tgrid.t(k + 1);
        let r: Vec<f64> = xs.iter().take(f.len()).map(|&x| exact(x, t)).collect();
        acc.push(f, &r);
    }
    acc
}

/// Solve A x = d for tridiagonal A with sub-diagonal `a` (a[0] unused),
/// diagonal `b`, super-diagonal `c` (c[n−1] unused). `scratch` has length n.
pub fn thomas_solve(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64], scratch: &mut [f64]) -> Result<()> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n || scratch.len() != n {
        return Err(Error::Contract("tridiagonal bands must share one length".into()));
    }
    let mut denom = b[0];
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::SingularPivot(0));
    }
    scratch[0] = c[0] / denom;
    d[0] /= denom;
    for i in 1..n {
        denom = b[i] - a[i] * scratch[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::SingularPivot(i));
        }
        scratch[i] = c[i] / denom;
        d[i] = (d[i] - a[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= scratch[i] * d[i + 1];
    }
    Ok(())
}

/// The four bands of the implicit step matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatrix {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl StepMatrix {
    /// Interior rows `[−1/h², σ+2/h², −1/h²]`; boundary rows
    /// `[σ + 2/h² + (2/h)σ_b, −2/h²]` and mirrored.
    pub fn assemble(n_nodes: usize, h: f64, sigma: f64, sigma_b: f64) -> Self {
        let ih2 = 1.0 / (h * h);
        let mut sub = vec![-ih2; n_nodes];
        let mut diag = vec![sigma + 2.0 * ih2; n_nodes];
        let mut sup = vec![-ih2; n_nodes];
        sub[0] = 0.0;
        sup[n_nodes - 1] = 0.0;
        diag[0] += 2.0 / h * sigma_b;
        diag[n_nodes - 1] += 2.0 / h * sigma_b;
        sup[0] = -2.0 * ih2;
        sub[n_nodes - 1] = -2.0 * ih2;
        Self { sub, diag, sup }
    }

    /// Strict row diagonal dominance.
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.diag.len()).all(|i| self.diag[i].abs() > self.sub[i].abs() + self.sup[i].abs())
    }
}

fn build_kernels(scheme: SchemeKind, alpha: f64, tgrid: &TimeGrid, params: Option<SoEParams>) -> Result<Option<(SoEApproximation, SoEApproximation)>> {
    if !scheme.uses_soe() {
        return Ok(None);
    }
    let params = params.ok_or_else(|| Error::InvalidParameter(format!("{scheme} needs sum-of-exponentials parameters")))?;
    let horizon = tgrid.horizon.max(2.0 * tgrid.dt);
    let interior = build_soe(scheme.kernel_exponent(alpha).unwrap_or(alpha), params, tgrid.dt, horizon)?;
    let boundary = build_soe(scheme.kernel_exponent(0.5 * alpha).unwrap_or(alpha), params, tgrid.dt, horizon)?;
    Ok(Some((interior, boundary)))
}

fn new_state(scheme: SchemeKind, order: f64, dt: f64, soe: Option<&SoEApproximation>, u0: &[f64]) -> Result<HistoryState> {
    match scheme {
        SchemeKind::Gl => HistoryState::gl_caputo(order, dt, u0),
        _ => HistoryState::new(scheme, order, dt, soe, u0),
    }
}

/// Run the scheme and call `observe(n, t_n, uⁿ)` after every step n ≥ 1.
/// Returns the wall time of the time loop in seconds and the kernels used.
pub fn solve_observed<F: FnMut(usize, f64, &[f64])>(
    problem: &DiffusionProblem,
    tgrid: &TimeGrid,
    sgrid: &SpaceGrid,
    scheme: SchemeKind,
    soe_params: Option<SoEParams>,
    mut observe: F,
) -> Result<(f64, Option<(SoEApproximation, SoEApproximation)>)> {
    problem.validate()?;
    if (sgrid.x_lo - problem.x_lo).abs() > 1e-12 * problem.x_hi.abs().max(1.0)
        || (sgrid.x_hi - problem.x_hi).abs() > 1e-12 * problem.x_hi.abs().max(1.0)
    {
        return Err(Error::Contract("space grid does not cover the problem domain".into()));
    }
    let alpha = problem.alpha;
    let dt = tgrid.dt;
    let h = sgrid.h;
    let nn = sgrid.n_nodes();
    let kernels = build_kernels(scheme, alpha, tgrid, soe_params)?;
    let (k_in, k_bd) = match &kernels {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };

    let xs = sgrid.nodes();
    let u0: Vec<f64> = xs.iter().map(|&x| (problem.initial)(x)).collect();
    let mut interior = new_state(scheme, alpha, dt, k_in, &u0)?;
    let mut boundary = new_state(scheme, 0.5 * alpha, dt, k_bd, &[u0[0], u0[nn - 1]])?;

    let sigma = interior.leading_coefficient();
    let sigma_b = boundary.leading_coefficient();
    let mat = StepMatrix::assemble(nn, h, sigma, sigma_b);
    debug_assert!(mat.is_diagonally_dominant());
    if !mat.is_diagonally_dominant() {
        return Err(Error::Contract("step matrix lost diagonal dominance".into()));
    }

    let mut u_prev = u0;
    let mut rhs = vec![0.0; nn];
    let mut known = vec![0.0; nn];
    let mut known_b = [0.0; 2];
    let mut scratch = vec![0.0; nn];

    let start = Instant::now();
    for n in 1..=tgrid.n_steps {
        let t = tgrid.t(n);
        interior.known_part(&mut known)?;
        boundary.known_part(&mut known_b)?;
        match &problem.source {
            Source::None => rhs.iter_mut().for_each(|r| *r = 0.0),
            Source::Linear(f) => rhs.iter_mut().zip(&xs).for_each(|(r, &x)| *r = f(x, t)),
            Source::Reaction(f) => rhs.iter_mut().zip(&u_prev).for_each(|(r, &u)| *r = f(u)),
        }
        for (r, k) in rhs.iter_mut().zip(&known) {
            *r -= k;
        }
        rhs[0] -= 2.0 / h * known_b[0];
        rhs[nn - 1] -= 2.0 / h * known_b[1];

        thomas_solve(&mat.sub, &mat.diag, &mat.sup, &mut rhs, &mut scratch)?;
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("solution became non-finite at step {n}")));
        }
        interior.commit(&rhs)?;
        boundary.commit(&[rhs[0], rhs[nn - 1]])?;
        std::mem::swap(&mut u_prev, &mut rhs);
        observe(n, t, &u_prev);
    }
    Ok((start.elapsed().as_secs_f64(), kernels))
}

/// One full run with error norms (when an exact solution is known),
/// snapshots and timing.
pub fn solve(
    problem: &DiffusionProblem,
    tgrid: &TimeGrid,
    sgrid: &SpaceGrid,
    scheme: SchemeKind,
    soe_params: Option<SoEParams>,
    options: SolveOptions,
) -> Result<SolveReport> {
    let xs = sgrid.nodes();
    let mut acc = ErrorAccumulator::new(tgrid.dt);
    let mut exact_buf = vec![0.0; xs.len()];
    let mut snapshots = Vec::new();
    let mut final_values = Vec::new();
    let stride = if options.n_snapshots == 0 {
        usize::MAX
    } else {
        (tgrid.n_steps / options.n_snapshots).max(1)
    };
    let (wall_time, kernels) = solve_observed(problem, tgrid, sgrid, scheme, soe_params, |n, t, u| {
        if let Some(ex) = &problem.exact {
            for (e, &x) in exact_buf.iter_mut().zip(&xs) {
                *e = ex(x, t);
            }
            acc.push(u, &exact_buf);
        }
        if options.n_snapshots > 0 && (n % stride == 0 || n == tgrid.n_steps) {
            if snapshots.last().map(|s: &Snapshot| s.step) != Some(n) {
                snapshots.push(Snapshot { step: n, t, values: u.to_vec() });
            }
        }
        if n == tgrid.n_steps {
            final_values = u.to_vec();
        }
    })?;
    let (global_error, related_error, max_error) = if problem.exact.is_some() {
        (Some(acc.global()), acc.related().ok(), Some(acc.max_error()))
    } else {
        (None, None, None)
    };
    Ok(SolveReport {
        problem: problem.name.clone(),
        scheme,
        alpha: problem.alpha,
        time_grid: *tgrid,
        space_grid: *sgrid,
        soe_params: if scheme.uses_soe() { soe_params } else { None },
        n_modes_interior: kernels.as_ref().map_or(0, |k| k.0.n_modes),
        n_modes_boundary: kernels.as_ref().map_or(0, |k| k.1.n_modes),
        soe_bound_interior: kernels.as_ref().map(|k| k.0.bound),
        soe_bound_boundary: kernels.as_ref().map(|k| k.1.bound),
        global_error,
        related_error,
        max_error,
        wall_time,
        final_values,
        snapshots,
    })
}

/// Discrete first difference δ_x u_{i+1/2} for i = 0 … N−1.
pub fn forward_difference(u: &[f64], h: f64) -> Vec<f64> {
    u.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

/// Discrete norm ‖δ_x u‖² = h Σ_{i=1}^{N} (δ_x u_{i−1/2})².
pub fn difference_norm_sq(u: &[f64], h: f64) -> f64 {
    h * forward_difference(u, h).iter().map(|d| d * d).sum::<f64>()
}

/// Trapezoid-weighted ‖u‖² = h [u₀²/2 + Σ_{i=1}^{N−1} u_i² + u_N²/2].
pub fn grid_norm_sq(u: &[f64], h: f64) -> f64 {
    let n = u.len() - 1;
    h * (0.5 * u[0] * u[0] + u[1..n].iter().map(|v| v * v).sum::<f64>() + 0.5 * u[n] * u[n])
}

/// Left side of the summation-by-parts identity
/// −(δ_x u_{1/2})u₀ − h Σ_{i=1}^{N−1}(δ_x² u_i)u_i + (δ_x u_{N−1/2})u_N.
pub fn summation_by_parts_lhs(u: &[f64], h: f64) -> f64 {
    let d = forward_difference(u, h);
    let n = u.len() - 1;
    let mut acc = -d[0] * u[0] + d[n - 1] * u[n];
    for i in 1..n {
        acc -= h * (d[i] - d[i - 1]) / h * u[i];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_spacing() {
        let g = SpaceGrid::with_spacing(0.0, PI, 1e-3).unwrap();
        assert_eq!(g.n_cells, 3142);
        assert_relative_eq!(g.h * g.n_cells as f64, PI, max_relative = 1e-12);
        assert_eq!(g.x(g.n_cells), PI);
        assert!(SpaceGrid::new(0.0, 1.0, 1).is_err());
        assert!(SpaceGrid::new(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn thomas_matches_dense() {
        let a = [0.0, -1.0, -2.0, 0.5];
        let b = [4.0, 5.0, 6.0, 3.0];
        let c = [1.0, 0.3, -1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut d = vec![0.0; 4];
        for i in 0..4 {
            d[i] = b[i] * x[i] + if i > 0 { a[i] * x[i - 1] } else { 0.0 } + if i < 3 { c[i] * x[i + 1] } else { 0.0 };
        }
        let mut s = vec![0.0; 4];
        thomas_solve(&a, &b, &c, &mut d, &mut s).unwrap();
        for i in 0..4 {
            assert_relative_eq!(d[i], x[i], epsilon = 1e-14);
        }
        let mut d = vec![1.0; 2];
        let mut s = vec![0.0; 2];
        assert!(matches!(thomas_solve(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &mut d, &mut s), Err(Error::SingularPivot(0))));
    }

    #[test]
    fn step_matrix_structure() {
        let m = StepMatrix::assemble(6, 0.5, 3.0, 2.0);
        assert_eq!(m.sub[2], -4.0);
        assert_eq!(m.diag[2], 11.0);
        assert_eq!(m.sup[2], -4.0);
        assert_eq!(m.diag[0], 11.0 + 8.0);
        assert_eq!(m.diag[5], 11.0 + 8.0);
        assert_eq!(m.sup[0], -8.0);
        assert_eq!(m.sub[5], -8.0);
        assert!(m.is_diagonally_dominant());
    }

    #[test]
    fn manufactured_data() {
        let p = manufactured_problem(0.3);
        let ex = p.exact.clone().unwrap();
        assert_relative_eq!(ex(PI / 2.0, 0.0), (PI / 2.0).powi(8), max_relative = 1e-14);
        assert_relative_eq!(ex(PI / 2.0, 0.0), 37.064_574_281_525_665, max_relative = 1e-12);
        assert_eq!(ex(0.0, 0.7), 0.0);
        assert!(ex(PI, 0.7).abs() < 1e-12);
        assert!(p.initial_mismatch(50).unwrap() < 1e-10);
    }

    #[test]
    fn nonlinear_data() {
        let p = nonlinear_problem(0.5);
        assert_relative_eq!((p.initial)(0.5), 1.0 + (-10.0f64).exp(), max_relative = 1e-15);
        match &p.source {
            Source::Reaction(f) => {
                assert_eq!(f(0.0), 0.0);
                assert_eq!(f(1.0), 0.0);
            }
            _ => panic!("expected a reaction source"),
        }
        assert!(p.exact.is_none());
    }

    #[test]
    fn error_norm_hand_values() {
        let tg = TimeGrid::new(0.25, 1).unwrap();
        let sg = SpaceGrid::new(0.0, 1.0, 2).unwrap();
        let fields = vec![vec![0.0, 2.0, 0.0]];
        assert_relative_eq!(global_error(&fields, |_, _| 0.0, &tg, &sg), 1.0, epsilon = 1e-15);
        let exact = |x: f64, t: f64| 1.0 + x + t;
        let tg = TimeGrid::new(0.1, 3).unwrap();
        let fields: Vec<Vec<f64>> = (1..=3).map(|k| sg.nodes().iter().map(|&x| 1.01 * exact(x, tg.t(k))).collect()).collect();
        assert_relative_eq!(related_error(&fields, exact, &tg, &sg).unwrap(), 0.01, max_relative = 1e-12);
        assert_eq!(global_error(&fields[..0], exact, &tg, &sg), 0.0);
        assert!(related_error(&[vec![0.0; 3]], |_, _| 0.0, &tg, &sg).is_err());
    }

    #[test]
    fn zero_problem_stays_zero() {
        let p = zero_problem(0.4, 0.0, 1.0);
        let tg = TimeGrid::new(0.05, 20).unwrap();
        let sg = SpaceGrid::new(0.0, 1.0, 16).unwrap();
        for scheme in [SchemeKind::L1, SchemeKind::Fir, SchemeKind::Fidr, SchemeKind::Gl] {
            let r = solve(&p, &tg, &sg, scheme, Some(SoEParams::default()), SolveOptions::default()).unwrap();
            assert!(r.final_values.iter().all(|&v| v == 0.0));
            assert_eq!(r.global_error, Some(0.0));
        }
    }

    #[test]
    fn fast_schemes_need_parameters() {
        let p = zero_problem(0.4, 0.0, 1.0);
        let tg = TimeGrid::new(0.05, 4).unwrap();
        let sg = SpaceGrid::new(0.0, 1.0, 8).unwrap();
        assert!(solve(&p, &tg, &sg, SchemeKind::Fidr, None, SolveOptions::default()).is_err());
        let wrong = SpaceGrid::new(0.0, 2.0, 8).unwrap();
        assert!(solve(&p, &tg, &wrong, SchemeKind::L1, None, SolveOptions::default()).is_err());
    }

    #[test]
    fn snapshots_and_report_shape() {
        let p = manufactured_problem(0.5);
        let tg = TimeGrid::new(0.05, 20).unwrap();
        let sg = SpaceGrid::new(0.0, PI, 40).unwrap();
        let r = solve(&p, &tg, &sg, SchemeKind::Fidr, Some(SoEParams::default()), SolveOptions { n_snapshots: 4 }).unwrap();
        assert_eq!(r.snapshots.len(), 4);
        assert_eq!(r.snapshots.last().unwrap().step, 20);
        assert_eq!(r.n_modes_interior, 25);
        assert_eq!(r.n_modes_boundary, 25);
        assert!(r.related_error.unwrap() < 0.05);
        assert!(r.wall_time >= 0.0);
    }

    #[test]
    fn summation_by_parts_on_quadratic() {
        let h = 0.25;
        let u: Vec<f64> = (0..=8).map(|i| (i as f64 * h).powi(2) - 0.3).collect();
        assert_relative_eq!(summation_by_parts_lhs(&u, h), difference_norm_sq(&u, h), max_relative = 1e-13);
    }
}
