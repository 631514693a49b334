//! Streaming evaluators of the Caputo derivative of order α ∈ (0, 1) on a
//! uniform grid.
//!
//! Every evaluator splits the value at step n as `σ·uⁿ + known`, where `known`
//! depends only on u⁰ … u^{n−1}. An implicit solver uses [`HistoryState::known_part`]
//! and [`HistoryState::leading_coefficient`] to assemble its system, then
//! hands the solution back through [`HistoryState::commit`].
//!
//! A state can carry several independent sample paths side by side (`width`),
//! which is how the diffusion solver keeps one path per grid node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::soe::SoEApproximation;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SchemeKind {
    L1,
    Fir,
    Fidr,
    Gl,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::L1 => "L1",
            SchemeKind::Fir => "FIR",
            SchemeKind::Fidr => "FIDR",
            SchemeKind::Gl => "GL",
        }
    }

    /// Whether the scheme runs on a compressed kernel.
    pub fn uses_soe(&self) -> bool {
        matches!(self, SchemeKind::Fir | SchemeKind::Fidr)
    }

    /// Exponent of the kernel the scheme compresses, for order α.
    pub fn kernel_exponent(&self, alpha: f64) -> Option<f64> {
        match self {
            SchemeKind::Fir => Some(1.0 + alpha),
            SchemeKind::Fidr => Some(alpha),
            _ => None,
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(SchemeKind::L1),
            "fir" => Ok(SchemeKind::Fir),
            "fidr" => Ok(SchemeKind::Fidr),
            "gl" => Ok(SchemeKind::Gl),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Uniform time grid t_n = n·dt, n = 0 … n_steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub horizon: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || n_steps == 0 {
            return Err(Error::InvalidParameter(format!("time grid needs dt > 0 and n_steps >= 1 (dt = {dt}, n = {n_steps})")));
        }
        Ok(Self { dt, n_steps, horizon: dt * n_steps as f64 })
    }

    /// Grid reaching `horizon` with step close to `dt`; the step count is
    /// rounded and the step adjusted so the grid ends exactly at `horizon`.
    pub fn covering(horizon: f64, dt: f64) -> Result<Self> {
        if !(horizon > 0.0) || !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("need horizon > 0 and dt > 0 (T = {horizon}, dt = {dt})")));
        }
        let n = (horizon / dt).round().max(1.0) as usize;
        Ok(Self { dt: horizon / n as f64, n_steps: n, horizon })
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}

/// L1 coefficients a_l = (l+1)^{1−α} − l^{1−α}, l = 0 … len−1.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Weights {
    pub alpha: f64,
    pub a_coeffs: Vec<f64>,
}

impl L1Weights {
    pub fn new(alpha: f64, len: usize) -> Result<Self> {
        check_order(alpha)?;
        let mut w = Self { alpha, a_coeffs: Vec::with_capacity(len) };
        w.extend_to(len);
        Ok(w)
    }

    pub fn extend_to(&mut self, len: usize) {
        let e = 1.0 - self.alpha;
        while self.a_coeffs.len() < len {
            let l = self.a_coeffs.len() as f64;
            self.a_coeffs.push((l + 1.0).powf(e) - l.powf(e));
        }
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Direct L1 value at the last sample of `buffer` = u⁰ … uⁿ.
pub fn l1_step(weights: &L1Weights, buffer: &[f64], dt: f64) -> Result<f64> {
    if buffer.len() < 2 {
        return Err(Error::InvalidParameter("L1 needs at least two samples".into()));
    }
    let n = buffer.len() - 1;
    if weights.a_coeffs.len() < n {
        return Err(Error::Contract(format!("L1 weights hold {} coefficients, step {n} needs {n}", weights.a_coeffs.len())));
    }
    let a = &weights.a_coeffs;
    let mut acc = a[0] * buffer[n] - a[n - 1] * buffer[0];
    for l in 1..n {
        acc -= (a[n - l - 1] - a[n - l]) * buffer[l];
    }
    Ok(acc * dt.powf(-weights.alpha) / gamma(2.0 - weights.alpha))
}

/// Grünwald-Letnikov weights c_m = (−1)^m C(p, m), m = 0 … len−1.
pub fn gl_coefficients(p: f64, len: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(len);
    extend_gl(&mut c, p, len);
    c
}

fn extend_gl(c: &mut Vec<f64>, p: f64, len: usize) {
    if c.is_empty() && len > 0 {
        c.push(1.0);
    }
    while c.len() < len {
        let m = c.len() as f64;
        let prev = c[c.len() - 1];
        c.push(prev * (1.0 - (p + 1.0) / m));
    }
}

/// Expanded FIDR coefficients a_l = Σ_i w_i (1 − e^{−x_i}) e^{−l x_i}/x_i,
/// x_i = s_i·dt, for l = 0 … n−1.
pub fn fidr_expanded_weights(soe: &SoEApproximation, dt: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|l| {
            soe.nodes
                .iter()
                .zip(&soe.weights)
                .map(|(&s, &w)| {
                    let x = s * dt;
                    w * one_minus_exp_over(x) * (-(l as f64) * x).exp()
                })
                .sum()
        })
        .collect()
}

/// (1 − e^{−x})/x.
pub fn one_minus_exp_over(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

const PHI_SERIES_CUTOFF: f64 = 0.5;
const PHI_SERIES_TERMS: usize = 25;

/// (e^{−x} − 1 + x)/x², weight of the newer sample in the linear-interpolant
/// history integral.
pub fn phi1(x: f64) -> f64 {
    if x.abs() < PHI_SERIES_CUTOFF {
        // Σ (−x)^k/(k+2)!
        let mut term = 0.5;
        let mut sum = term;
        for k in 1..PHI_SERIES_TERMS {
            term *= -x / (k as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        ((-x).exp_m1() + x) / (x * x)
    }
}

/// (1 − e^{−x} − x e^{−x})/x², weight of the older sample.
pub fn phi2(x: f64) -> f64 {
    if x.abs() < PHI_SERIES_CUTOFF {
        // Σ (k+1)(−x)^k/(k+2)!
        let mut fact = 0.5;
        let mut sum = fact;
        for k in 1..PHI_SERIES_TERMS {
            fact *= -x / (k as f64 + 2.0);
            sum += (k as f64 + 1.0) * fact;
        }
        sum
    } else {
        let e = (-x).exp();
        (-(-x).exp_m1() - x * e) / (x * x)
    }
}

/// Per-scheme recurrence data.
#[derive(Debug, Clone)]
enum Memory {
    L1 { weights: L1Weights },
    Fir { weights: Vec<f64>, decay: Vec<f64>, newer: Vec<f64>, older: Vec<f64>, modes: Vec<f64> },
    Fidr { weights: Vec<f64>, decay: Vec<f64>, gain: Vec<f64>, modes: Vec<f64> },
    Gl { coeffs: Vec<f64>, shift_initial: bool },
}

/// Running state of one evaluator over `width` parallel sample paths.
#[derive(Debug, Clone)]
pub struct HistoryState {
    kind: SchemeKind,
    alpha: f64,
    dt: f64,
    width: usize,
    /// Index n of the newest committed sample.
    step_index: usize,
    memory: Memory,
    /// Full history u⁰ … uⁿ, time-major (L1 and GL only).
    buffer: Vec<f64>,
    first: Vec<f64>,
    last: Vec<f64>,
    before_last: Vec<f64>,
    /// Modes already advanced to step n+1.
    advanced: bool,
    gamma_1ma: f64,
    gamma_2ma: f64,
}

impl HistoryState {
    /// New state holding u⁰ for each path. `soe` is required for FIR (kernel
    /// exponent 1+α) and FIDR (exponent α) and ignored otherwise.
    pub fn new(kind: SchemeKind, alpha: f64, dt: f64, soe: Option<&SoEApproximation>, u0: &[f64]) -> Result<Self> {
        check_order(alpha)?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("step must be positive, got {dt}")));
        }
        if u0.is_empty() {
            return Err(Error::InvalidParameter("need at least one sample path".into()));
        }
        let width = u0.len();
        let memory = match kind {
            SchemeKind::L1 => Memory::L1 { weights: L1Weights::new(alpha, 64)? },
            SchemeKind::Gl => Memory::Gl { coeffs: gl_coefficients(alpha, 64), shift_initial: false },
            SchemeKind::Fir | SchemeKind::Fidr => {
                let soe = soe.ok_or_else(|| Error::Contract(format!("{kind} needs a sum-of-exponentials kernel")))?;
                let want = kind.kernel_exponent(alpha).unwrap_or(f64::NAN);
                if (soe.beta - want).abs() > 1e-12 {
                    return Err(Error::Contract(format!("{kind} at order {alpha} needs kernel exponent {want}, got {}", soe.beta)));
                }
                let xs: Vec<f64> = soe.nodes.iter().map(|s| s * dt).collect();
                let decay: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
                let modes = vec![0.0; soe.n_modes * width];
                if kind == SchemeKind::Fir {
                    Memory::Fir {
                        weights: soe.weights.clone(),
                        newer: xs.iter().zip(&decay).map(|(&x, &e)| e * dt * phi1(x)).collect(),
                        older: xs.iter().zip(&decay).map(|(&x, &e)| e * dt * phi2(x)).collect(),
                        decay,
                        modes,
                    }
                } else {
                    Memory::Fidr {
                        weights: soe.weights.clone(),
                        gain: xs.iter().zip(&decay).map(|(&x, &e)| e * one_minus_exp_over(x)).collect(),
                        decay,
                        modes,
                    }
                }
            }
        };
        let buffer = if matches!(kind, SchemeKind::L1 | SchemeKind::Gl) { u0.to_vec() } else { Vec::new() };
        Ok(Self {
            kind,
            alpha,
            dt,
            width,
            step_index: 0,
            memory,
            buffer,
            first: u0.to_vec(),
            last: u0.to_vec(),
            before_last: u0.to_vec(),
            advanced: false,
            gamma_1ma: gamma(1.0 - alpha),
            gamma_2ma: gamma(2.0 - alpha),
        })
    }

    /// Scalar convenience constructor.
    pub fn scalar(kind: SchemeKind, alpha: f64, dt: f64, soe: Option<&SoEApproximation>, u0: f64) -> Result<Self> {
        Self::new(kind, alpha, dt, soe, &[u0])
    }

    /// Grünwald-Letnikov applied to u − u⁰, which approximates the Caputo
    /// rather than the Riemann-Liouville derivative when u⁰ ≠ 0.
    pub fn gl_caputo(alpha: f64, dt: f64, u0: &[f64]) -> Result<Self> {
        let mut s = Self::new(SchemeKind::Gl, alpha, dt, None, u0)?;
        s.memory = Memory::Gl { coeffs: gl_coefficients(alpha, 64), shift_initial: true };
        Ok(s)
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Number of compressed modes per path (zero for L1 and GL).
    pub fn n_modes(&self) -> usize {
        match &self.memory {
            Memory::Fir { weights, .. } | Memory::Fidr { weights, .. } => weights.len(),
            _ => 0,
        }
    }

    /// Mode values, mode-major: `modes[i * width + j]` is mode i of path j.
    pub fn modes(&self) -> &[f64] {
        match &self.memory {
            Memory::Fir { modes, .. } | Memory::Fidr { modes, .. } => modes,
            _ => &[],
        }
    }

    /// Stored history length in samples (zero for the compressed schemes).
    pub fn buffer_len(&self) -> usize {
        self.buffer.len() / self.width
    }

    /// σ in `value = σ·uⁿ + known`.
    pub fn leading_coefficient(&self) -> f64 {
        match self.kind {
            SchemeKind::Gl => self.dt.powf(-self.alpha),
            _ => self.dt.powf(-self.alpha) / self.gamma_2ma,
        }
    }

    fn advance_modes(&mut self) {
        if self.advanced {
            return;
        }
        let n = self.step_index + 1;
        let w = self.width;
        match &mut self.memory {
            Memory::Fir { decay, newer, older, modes, .. } if n >= 2 => {
                for i in 0..decay.len() {
                    let (d, c1, c2) = (decay[i], newer[i], older[i]);
                    let row = &mut modes[i * w..(i + 1) * w];
                    for j in 0..w {
                        row[j] = d * row[j] + c1 * self.last[j] + c2 * self.before_last[j];
                    }
                }
            }
            Memory::Fidr { decay, gain, modes, .. } if n >= 2 => {
                for i in 0..decay.len() {
                    let (d, g) = (decay[i], gain[i]);
                    let row = &mut modes[i * w..(i + 1) * w];
                    for j in 0..w {
                        row[j] = d * row[j] + g * (self.last[j] - self.before_last[j]);
                    }
                }
            }
            Memory::L1 { weights } => weights.extend_to(n + 1),
            Memory::Gl { coeffs, .. } => extend_gl(coeffs, self.alpha, n + 1),
            _ => {}
        }
        self.advanced = true;
    }

    /// Part of the value at the next step that does not involve the new sample.
    pub fn known_part(&mut self, out: &mut [f64]) -> Result<()> {
        if out.len() != self.width {
            return Err(Error::Contract(format!("output width {} != state width {}", out.len(), self.width)));
        }
        self.advance_modes();
        let n = self.step_index + 1;
        let w = self.width;
        let dt_a = self.dt.powf(-self.alpha);
        match &self.memory {
            Memory::L1 { weights } => {
                let a = &weights.a_coeffs;
                let scale = dt_a / self.gamma_2ma;
                for j in 0..w {
                    let mut acc = -a[n - 1] * self.buffer[j];
                    for l in 1..n {
                        acc -= (a[n - l - 1] - a[n - l]) * self.buffer[l * w + j];
                    }
                    out[j] = scale * acc;
                }
            }
            Memory::Gl { coeffs, shift_initial } => {
                let total: f64 = if *shift_initial { coeffs[..=n].iter().sum() } else { 0.0 };
                for j in 0..w {
                    let mut acc = 0.0;
                    for m in 1..=n {
                        acc += coeffs[m] * self.buffer[(n - m) * w + j];
                    }
                    acc -= total * self.first[j];
                    out[j] = dt_a * acc;
                }
            }
            Memory::Fir { weights, modes, .. } => {
                let local = dt_a / self.gamma_2ma;
                let tn_a = (n as f64 * self.dt).powf(-self.alpha);
                for j in 0..w {
                    let mut hist = 0.0;
                    for (i, wi) in weights.iter().enumerate() {
                        hist += wi * modes[i * w + j];
                    }
                    out[j] = -local * self.last[j]
                        + (self.last[j] * dt_a - self.first[j] * tn_a - self.alpha * hist) / self.gamma_1ma;
                }
            }
            Memory::Fidr { weights, modes, .. } => {
                let local = dt_a / self.gamma_2ma;
                for j in 0..w {
                    let mut hist = 0.0;
                    for (i, wi) in weights.iter().enumerate() {
                        hist += wi * modes[i * w + j];
                    }
                    out[j] = -local * self.last[j] + hist / self.gamma_1ma;
                }
            }
        }
        Ok(())
    }

    /// Record uⁿ and move to the next step.
    pub fn commit(&mut self, u_n: &[f64]) -> Result<()> {
        if u_n.len() != self.width {
            return Err(Error::Contract(format!("sample width {} != state width {}", u_n.len(), self.width)));
        }
        self.advance_modes();
        if matches!(self.kind, SchemeKind::L1 | SchemeKind::Gl) {
            self.buffer.extend_from_slice(u_n);
        }
        std::mem::swap(&mut self.before_last, &mut self.last);
        self.last.copy_from_slice(u_n);
        self.step_index += 1;
        self.advanced = false;
        Ok(())
    }

    /// Derivative values at the new sample, then commit it.
    pub fn step(&mut self, u_n: &[f64], out: &mut [f64]) -> Result<()> {
        self.known_part(out)?;
        let sigma = self.leading_coefficient();
        for (o, u) in out.iter_mut().zip(u_n) {
            *o += sigma * u;
        }
        self.commit(u_n)
    }

    /// Single-path step.
    pub fn step_scalar(&mut self, u_n: f64) -> Result<f64> {
        let mut out = [0.0];
        self.step(&[u_n], &mut out)?;
        Ok(out[0])
    }
}

fn check_kernel(state: &HistoryState, kind: SchemeKind, soe: Option<&SoEApproximation>) -> Result<()> {
    if state.kind != kind {
        return Err(Error::Contract(format!("state runs {}, not {kind}", state.kind)));
    }
    if let Some(soe) = soe {
        if soe.n_modes != state.n_modes() {
            return Err(Error::Contract(format!("kernel has {} modes, state has {}", soe.n_modes, state.n_modes())));
        }
    }
    Ok(())
}

/// One FIR step on a scalar state.
pub fn fir_step(state: &mut HistoryState, soe: &SoEApproximation, u_n: f64) -> Result<f64> {
    check_kernel(state, SchemeKind::Fir, Some(soe))?;
    state.step_scalar(u_n)
}

/// One FIDR step on a scalar state.
pub fn fidr_step(state: &mut HistoryState, soe: &SoEApproximation, u_n: f64) -> Result<f64> {
    check_kernel(state, SchemeKind::Fidr, Some(soe))?;
    state.step_scalar(u_n)
}

/// One Grünwald-Letnikov step on a scalar state.
pub fn gl_step(state: &mut HistoryState, u_n: f64) -> Result<f64> {
    check_kernel(state, SchemeKind::Gl, None)?;
    state.step_scalar(u_n)
}

/// Run a scheme over a whole scalar sample path; entry k−1 is the value at step k.
pub fn evaluate_path(kind: SchemeKind, alpha: f64, dt: f64, soe: Option<&SoEApproximation>, path: &[f64]) -> Result<Vec<f64>> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter("path needs at least two samples".into()));
    }
    let mut st = HistoryState::scalar(kind, alpha, dt, soe, path[0])?;
    path[1..].iter().map(|&u| st.step_scalar(u)).collect()
}
