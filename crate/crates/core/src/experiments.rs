//! Drivers that regenerate the benchmark tables and curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{manufactured_problem, nonlinear_problem, solve, solve_observed, SolveOptions, SolveReport, SpaceGrid};
use crate::schemes::{SchemeKind, TimeGrid};
use crate::soe::{build_soe, soe_error_curve, tail_integral, SoEParams};

pub const TAIL_BETA: f64 = 1.1;
pub const TAIL_T_EXPONENTS: [i32; 6] = [-5, -6, -7, -8, -9, -10];
pub const TAIL_P_EXPONENTS: [i32; 4] = [5, 10, 15, 20];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCell {
    pub t: f64,
    pub p: f64,
    pub value: f64,
}

/// Tail integral at β = 1.1 over t = 2^{-5} … 2^{-10} and p = 2^5 … 2^20, row-major in t.
pub fn tail_table() -> Result<Vec<TailCell>> {
    let mut out = Vec::with_capacity(24);
    for &te in &TAIL_T_EXPONENTS {
        for &pe in &TAIL_P_EXPONENTS {
            let (t, p) = (2f64.powi(te), 2f64.powi(pe));
            out.push(TailCell { t, p, value: tail_integral(TAIL_BETA, p, t)? });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoeErrorPoint {
    pub t: f64,
    /// α times the error of the order-(1+α) kernel.
    pub fir: f64,
    pub fidr: f64,
}

/// Pointwise errors of both kernels on a shared log-uniform grid over [lo, hi].
pub fn soe_error_curves(alpha: f64, params: SoEParams, delta: f64, horizon: f64, lo: f64, hi: f64, samples: usize) -> Result<Vec<SoeErrorPoint>> {
    let fir = build_soe(1.0 + alpha, params, delta, horizon)?;
    let fidr = build_soe(alpha, params, delta, horizon)?;
    let (_, a) = soe_error_curve(&fir, lo, hi, samples)?;
    let (_, b) = soe_error_curve(&fidr, lo, hi, samples)?;
    Ok(a.iter().zip(&b).map(|(&(t, ea), &(_, eb))| SoeErrorPoint { t, fir: alpha * ea, fidr: eb }).collect())
}

/// `count` step sizes `start, start/2, …`.
pub fn dyadic_ladder(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start / 2f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub alpha: f64,
    pub h: f64,
    pub horizon: f64,
    pub dts: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    /// Preset mode counts, see [`SoEParams::preset`].
    pub mode_counts: Vec<usize>,
    pub jobs: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            h: 1e-3,
            horizon: 1.0,
            dts: dyadic_ladder(0.1, 7),
            schemes: vec![SchemeKind::Fidr, SchemeKind::Fir, SchemeKind::Gl],
            mode_counts: vec![9, 25],
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub n_modes: usize,
    pub dt: f64,
    pub related_error: Option<f64>,
    pub global_error: Option<f64>,
    pub wall_time: f64,
    pub failure: Option<String>,
}

/// One manufactured-problem solve with a preset or explicit ladder.
pub fn run_manufactured(alpha: f64, h: f64, horizon: f64, dt: f64, scheme: SchemeKind, params: Option<SoEParams>) -> Result<SolveReport> {
    let problem = manufactured_problem(alpha);
    let tgrid = TimeGrid::covering(horizon, dt)?;
    let sgrid = SpaceGrid::with_spacing(problem.x_lo, problem.x_hi, h)?;
    solve(&problem, &tgrid, &sgrid, scheme, params, SolveOptions { n_snapshots: 0 })
}

/// Run `f` on a pool of `jobs` threads (0 means rayon's default).
pub fn with_jobs<T: Send, F: FnOnce() -> T + Send>(jobs: usize, f: F) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Manufactured-problem sweep; rows ordered scheme, mode count, dt. A failing
/// run is recorded in its row and the sweep carries on.
pub fn convergence_sweep(settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for &scheme in &settings.schemes {
        for &n in &settings.mode_counts {
            let params = SoEParams::preset(n).ok_or_else(|| Error::InvalidParameter(format!("no preset ladder with {n} modes")))?;
            for &dt in &settings.dts {
                jobs.push((scheme, n, params, dt));
            }
        }
    }
    let s = settings.clone();
    with_jobs(settings.jobs, move || {
        jobs.par_iter()
            .map(|&(scheme, n, params, dt)| match run_manufactured(s.alpha, s.h, s.horizon, dt, scheme, Some(params)) {
                Ok(r) => SweepRow {
                    scheme,
                    n_modes: n,
                    dt,
                    related_error: r.related_error,
                    global_error: r.global_error,
                    wall_time: r.wall_time,
                    failure: None,
                },
                Err(e) => SweepRow { scheme, n_modes: n, dt, related_error: None, global_error: None, wall_time: 0.0, failure: Some(e.to_string()) },
            })
            .collect()
    })
}

/// Fine FIDR solution of the reaction problem sampled on a coarse lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearReference {
    pub alpha: f64,
    pub h: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Spacing of the stored lattice in space and time.
    pub coarse_h: f64,
    pub coarse_dt: f64,
    /// `levels[k]` is the field at t = k·coarse_dt on the coarse lattice (k ≥ 1).
    pub levels: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSettings {
    pub alpha: f64,
    pub h: f64,
    pub dt: f64,
    pub horizon: f64,
    pub coarse_h: f64,
    pub coarse_dt: f64,
    pub params: SoEParams,
}

impl Default for ReferenceSettings {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            h: 1e-4,
            dt: 1e-4,
            horizon: 1.0,
            coarse_h: 1e-3,
            coarse_dt: 0.0125,
            params: SoEParams::ladder(3, 18, 4, 3),
        }
    }
}

fn ratio(coarse: f64, fine: f64) -> Result<usize> {
    let r = coarse / fine;
    let k = r.round();
    if k < 1.0 || (r - k).abs() > 1e-9 * r {
        return Err(Error::InvalidParameter(format!("{coarse} is not an integer multiple of {fine}")));
    }
    Ok(k as usize)
}

pub fn nonlinear_reference(s: &ReferenceSettings) -> Result<NonlinearReference> {
    let problem = nonlinear_problem(s.alpha);
    let tgrid = TimeGrid::covering(s.horizon, s.dt)?;
    let sgrid = SpaceGrid::with_spacing(problem.x_lo, problem.x_hi, s.h)?;
    let space_stride = ratio(s.coarse_h, s.h)?;
    let time_stride = ratio(s.coarse_dt, s.dt)?;
    let mut levels = Vec::new();
    solve_observed(&problem, &tgrid, &sgrid, SchemeKind::Fidr, Some(s.params), |n, _, u| {
        if n % time_stride == 0 {
            levels.push(u.iter().step_by(space_stride).copied().collect());
        }
    })?;
    Ok(NonlinearReference {
        alpha: s.alpha,
        h: s.h,
        dt: s.dt,
        horizon: s.horizon,
        coarse_h: s.coarse_h,
        coarse_dt: s.coarse_dt,
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfConvergencePoint {
    pub dt: f64,
    pub related_error: f64,
    pub global_error: f64,
}

/// Related error of coarse FIDR runs measured against the stored reference.
pub fn nonlinear_self_convergence(reference: &NonlinearReference, dts: &[f64], params: SoEParams, jobs: usize) -> Result<Vec<SelfConvergencePoint>> {
    let problem = nonlinear_problem(reference.alpha);
    let sgrid = SpaceGrid::with_spacing(problem.x_lo, problem.x_hi, reference.coarse_h)?;
    let runs: Vec<Result<SelfConvergencePoint>> = with_jobs(jobs, || {
        dts.par_iter()
            .map(|&dt| {
                let level_stride = ratio(dt, reference.coarse_dt)?;
                let tgrid = TimeGrid::covering(reference.horizon, dt)?;
                let (mut err, mut norm) = (0.0, 0.0);
                solve_observed(&problem, &tgrid, &sgrid, SchemeKind::Fidr, Some(params), |n, _, u| {
                    if let Some(r) = reference.levels.get(n * level_stride - 1) {
                        let e = u.iter().zip(r).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                        let s = r.iter().fold(0.0f64, |m, b| m.max(b.abs()));
                        err += dt * e * e;
                        norm += dt * s * s;
                    }
                })?;
                if norm == 0.0 {
                    return Err(Error::DivisionByZero("reference solution vanishes".into()));
                }
                Ok(SelfConvergencePoint { dt, related_error: (err / norm).sqrt(), global_error: err.sqrt() })
            })
            .collect()
    })?;
    runs.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_table_shape() {
        let t = tail_table().unwrap();
        assert_eq!(t.len(), 24);
        assert_eq!(t[0].t, 2f64.powi(-5));
        assert_eq!(t[3].p, 2f64.powi(20));
    }

    #[test]
    fn ladder_halves() {
        assert_eq!(dyadic_ladder(0.1, 3), vec![0.1, 0.05, 0.025]);
    }

    #[test]
    fn curves_share_samples() {
        let c = soe_error_curves(0.1, SoEParams::default(), 1e-3, 1.0, 1e-3, 1.0, 50).unwrap();
        assert_eq!(c.len(), 50);
        assert!(c.iter().all(|p| p.fir >= 0.0 && p.fidr >= 0.0));
    }

    #[test]
    fn sweep_records_failures_and_orders_rows() {
        let s = SweepSettings {
            h: 0.05,
            dts: vec![0.1, 0.05],
            schemes: vec![SchemeKind::Fidr, SchemeKind::Gl],
            mode_counts: vec![9],
            jobs: 2,
            ..Default::default()
        };
        let rows = convergence_sweep(&s).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].scheme, SchemeKind::Fidr);
        assert_eq!(rows[1].dt, 0.05);
        assert!(rows.iter().all(|r| r.failure.is_none()));
        let bad = SweepSettings { dts: vec![-1.0], ..s };
        let rows = convergence_sweep(&bad).unwrap();
        assert!(rows.iter().all(|r| r.failure.is_some()));
    }

    #[test]
    fn small_self_convergence() {
        let rs = ReferenceSettings { h: 0.01, dt: 0.0125 / 8.0, coarse_h: 0.05, params: SoEParams::preset(25).unwrap(), ..Default::default() };
        let r = nonlinear_reference(&rs).unwrap();
        assert_eq!(r.levels.len(), 80);
        assert_eq!(r.levels[0].len(), 41);
        let pts = nonlinear_self_convergence(&r, &[0.05, 0.025], SoEParams::preset(25).unwrap(), 1).unwrap();
        assert!(pts[1].related_error < pts[0].related_error);
        assert!(ratio(0.1, 0.03).is_err());
    }
}
