use std::path::Path;

use fraccaputo::pde::SpaceGrid;
use fraccaputo::schemes::SchemeKind;
use fraccaputo::soe::SoEParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every tunable of every command. Values come from defaults, then an
/// optional JSON file, then flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub dt: f64,
    pub h: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub scheme: SchemeKind,
    pub schemes: Vec<SchemeKind>,
    /// Preset mode count; ignored once any ladder field is set.
    pub modes: usize,
    pub mode_counts: Vec<usize>,
    pub soe_a: Option<i32>,
    pub soe_b: Option<i32>,
    pub soe_n1: Option<usize>,
    pub soe_n2: Option<usize>,
    pub problem: String,
    pub seed: u64,
    pub jobs: usize,
    pub samples: usize,
    pub dt_start: f64,
    pub levels: usize,
    pub snapshots: usize,
    pub eps0_override: Option<f64>,
    pub gl_re_c_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            dt: 1e-3,
            h: 1e-3,
            horizon: 1.0,
            scheme: SchemeKind::Fidr,
            schemes: vec![SchemeKind::Fidr, SchemeKind::Fir, SchemeKind::Gl],
            modes: 25,
            mode_counts: vec![9, 25],
            soe_a: None,
            soe_b: None,
            soe_n1: None,
            soe_n2: None,
            problem: "manufactured".into(),
            seed: 42,
            jobs: 0,
            samples: 200,
            dt_start: 0.1,
            levels: 7,
            snapshots: 0,
            eps0_override: None,
            gl_re_c_max: 0.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("bad config {}: {e}", path.display())))
    }

    pub fn soe_params(&self) -> Result<SoEParams, CliError> {
        let base = SoEParams::preset(self.modes);
        let custom = self.soe_a.is_some() || self.soe_b.is_some() || self.soe_n1.is_some() || self.soe_n2.is_some();
        let params = match (base, custom) {
            (Some(p), false) => p,
            (base, true) => {
                let p = base.unwrap_or_default();
                SoEParams::ladder(
                    self.soe_a.unwrap_or(p.a()),
                    self.soe_b.unwrap_or(p.n_hi),
                    self.soe_n1.unwrap_or(p.n1),
                    self.soe_n2.unwrap_or(p.n2),
                )
            }
            (None, false) => {
                return Err(CliError::validation(format!(
                    "no preset ladder with {} modes (use 9, 25, 40 or --soe-a/--soe-b/--soe-n1/--soe-n2)",
                    self.modes
                )))
            }
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::validation(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        for (name, v) in [("dt", self.dt), ("h", self.h), ("T", self.horizon), ("dt_start", self.dt_start)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::validation(format!("{name} must be positive, got {v}")));
            }
        }
        if self.samples < 2 {
            return Err(CliError::validation("samples must be at least 2".into()));
        }
        if self.levels == 0 {
            return Err(CliError::validation("levels must be at least 1".into()));
        }
        if !matches!(self.problem.as_str(), "manufactured" | "nonlinear" | "zero") {
            return Err(CliError::validation(format!("unknown problem {:?}", self.problem)));
        }
        Ok(())
    }

    pub fn space_grid(&self, x_lo: f64, x_hi: f64) -> Result<SpaceGrid, CliError> {
        Ok(SpaceGrid::with_spacing(x_lo, x_hi, self.h)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_and_custom_ladders() {
        let c = RunConfig::default();
        assert_eq!(c.soe_params().unwrap().n_modes(), 25);
        let c = RunConfig { soe_b: Some(15), ..RunConfig::default() };
        assert_eq!(c.soe_params().unwrap().n_modes(), 40);
        let c = RunConfig { modes: 12, ..RunConfig::default() };
        assert!(c.soe_params().is_err());
    }

    #[test]
    fn config_file_uses_flag_names() {
        let c: RunConfig = serde_json::from_str(r#"{"alpha": 0.5, "T": 2.0, "scheme": "FIR"}"#).unwrap();
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.horizon, 2.0);
        assert_eq!(c.scheme, SchemeKind::Fir);
        assert_eq!(c.h, 1e-3);
        assert!(serde_json::from_str::<RunConfig>(r#"{"alpah": 0.5}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig { alpha: 1.0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { dt: 0.0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { problem: "heat".into(), ..RunConfig::default() }.validate().is_err());
    }
}
