use std::path::Path;

use fraccaputo::experiments::{convergence_sweep, dyadic_ladder, soe_error_curves, tail_table as tail_cells, SweepSettings};
use fraccaputo::pde::{self, SolveOptions};
use fraccaputo::properties::{run_all, PropertyConfig};
use fraccaputo::schemes::TimeGrid;

use crate::config::RunConfig;
use crate::output::{sci, sci_opt, write_csv, write_json};
use crate::{CliError, ErrorKind};

pub fn tail_table(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = tail_cells()?
        .iter()
        .map(|c| vec![sci(c.t), sci(c.p), if c.value < 1e-15 { "0".into() } else { sci(c.value) }])
        .collect();
    write_csv(out, config, &["t", "p", "tail"], &rows)
}

pub fn soe_error(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let params = config.soe_params()?;
    let curve = soe_error_curves(config.alpha, params, config.dt, config.horizon, config.dt, config.horizon, config.samples)?;
    let rows: Vec<Vec<String>> = curve.iter().map(|p| vec![sci(p.t), sci(p.fir), sci(p.fidr)]).collect();
    write_csv(out, config, &["t", "fir_alpha_err", "fidr_err"], &rows)
}

pub fn convergence(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let settings = SweepSettings {
        alpha: config.alpha,
        h: config.h,
        horizon: config.horizon,
        dts: dyadic_ladder(config.dt_start, config.levels),
        schemes: config.schemes.clone(),
        mode_counts: config.mode_counts.clone(),
        jobs: config.jobs,
    };
    let rows: Vec<Vec<String>> = convergence_sweep(&settings)?
        .iter()
        .map(|r| {
            vec![
                r.scheme.to_string(),
                r.n_modes.to_string(),
                sci(r.dt),
                sci_opt(r.related_error),
                sci_opt(r.global_error),
                sci(r.wall_time),
                r.failure.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(out, config, &["scheme", "n_modes", "dt", "related_error", "global_error", "wall_time", "failure"], &rows)
}

pub fn solve(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let problem = match config.problem.as_str() {
        "manufactured" => pde::manufactured_problem(config.alpha),
        "nonlinear" => pde::nonlinear_problem(config.alpha),
        _ => pde::zero_problem(config.alpha, 0.0, 1.0),
    };
    let tgrid = TimeGrid::covering(config.horizon, config.dt)?;
    let sgrid = config.space_grid(problem.x_lo, problem.x_hi)?;
    let params = if config.scheme.uses_soe() { Some(config.soe_params()?) } else { None };
    let report = pde::solve(&problem, &tgrid, &sgrid, config.scheme, params, SolveOptions { n_snapshots: config.snapshots })?;
    write_json(out, &report)
}

pub fn property_suite(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let pc = PropertyConfig {
        seed: config.seed,
        eps0_override: config.eps0_override,
        gl_re_c_max: config.gl_re_c_max,
        ..PropertyConfig::default()
    };
    let ledger = run_all(&pc)?;
    write_json(out, &ledger)?;
    if ledger.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = ledger.results.iter().filter(|r| r.status == fraccaputo::properties::Status::Fail).map(|r| r.name.as_str()).collect();
        Err(CliError { kind: ErrorKind::PropertyFailure, message: format!("failed suites: {}", failed.join(", ")) })
    }
}
