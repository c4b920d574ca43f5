use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Spectrum,
    Entangle,
    Hotbath,
    Wstate,
    Ghz,
    Protect,
    Baseline,
}

/// Whole config file. Experiment sections not selected on the command line
/// are still validated.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub out: Option<String>,
    pub sample_every: Option<usize>,
    pub dt: Option<f64>,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub entangle: EntangleConfig,
    #[serde(default)]
    pub hotbath: HotbathConfig,
    #[serde(default)]
    pub wstate: WstateConfig,
    #[serde(default)]
    pub ghz: GhzConfig,
    #[serde(default)]
    pub protect: ProtectConfig,
    #[serde(default)]
    pub baseline: BaselineConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    /// Full two-well Hamiltonian, four levels including the singlet.
    #[default]
    H2,
    /// Symmetric sector of `n` wells.
    Sym,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub model: SpectrumModel,
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { model: SpectrumModel::H2, n: 2, omega: 0.05, lambda: 1.0, f_min: -2.0, f_max: 2.0, points: 801 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntangleConfig {
    pub omega: f64,
    pub lambda: f64,
    /// Initial bias; defaults to `−2λ`.
    pub f0: Option<f64>,
    /// Sweep rate; defaults to `λ/2000`.
    pub rate: Option<f64>,
    pub t_end: f64,
    /// Rate of each left-projector channel (one per qubit).
    pub gamma_relax: f64,
    /// Initial basis state, e.g. "11".
    pub initial: String,
}

impl Default for EntangleConfig {
    fn default() -> Self {
        Self {
            omega: 0.05,
            lambda: 1.0,
            f0: None,
            rate: None,
            t_end: 8000.0,
            gamma_relax: 0.0,
            initial: "11".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    #[default]
    PerParticle,
    Shared,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HotbathConfig {
    pub omegas: Vec<f64>,
    /// `λ(E_i, E_j) = coupling_scale·√(ω_i ω_j)`.
    pub coupling_scale: f64,
    pub f0: f64,
    pub rate: f64,
    pub t_end: f64,
    pub gamma: Vec<f64>,
    pub topology: Topology,
}

impl Default for HotbathConfig {
    fn default() -> Self {
        Self {
            omegas: vec![0.05, 0.1],
            coupling_scale: 20.0,
            f0: -3.0,
            rate: 1.0 / 500.0,
            t_end: 2500.0,
            gamma: vec![0.0, 1.0, 1000.0],
            topology: Topology::PerParticle,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WstateConfig {
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    /// Defaults to `−nλ`.
    pub f0: Option<f64>,
    pub rate: f64,
    /// Defaults to the time at which the bias reaches `+nλ`.
    pub t_end: Option<f64>,
}

impl Default for WstateConfig {
    fn default() -> Self {
        Self { n: 3, omega: 0.05, lambda: 1.0, f0: None, rate: 1e-3, t_end: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GhzConfig {
    pub omega: f64,
    pub lambda: f64,
    pub sweep_rate: f64,
    pub f_start: f64,
}

impl Default for GhzConfig {
    fn default() -> Self {
        Self { omega: 0.05, lambda: 1.0, sweep_rate: 5e-4, f_start: -2.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtectConfig {
    /// Information amplitudes as `[re, im]`.
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub t_h: f64,
    /// Encoding time; defaults to `0.01·t_h`.
    pub t_e: Option<f64>,
    pub gamma_th: Vec<f64>,
    /// Error operators by name: x1, x2, z1, z2.
    pub errors: Vec<String>,
    pub noise_during_coding: bool,
    pub fine_tune: bool,
    pub recover: bool,
}

impl Default for ProtectConfig {
    fn default() -> Self {
        Self {
            a: [1.0, 0.0],
            b: [0.0, 0.0],
            t_h: 1000.0,
            t_e: None,
            gamma_th: vec![0.02, 0.05, 0.1, 0.2, 0.5],
            errors: vec!["x1".into()],
            noise_during_coding: true,
            fine_tune: false,
            recover: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    pub gamma: Vec<f64>,
    pub t: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { gamma: vec![2e-5, 5e-5, 1e-4, 2e-4, 5e-4], t: 1020.0 }
    }
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} is not finite")))
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    finite(field, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be positive")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ConfigError> {
    finite(field, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be non-negative")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        if self.sample_every == Some(0) {
            return Err(invalid("sample_every", "must be at least 1"));
        }
        let s = &self.spectrum;
        non_negative("spectrum.omega", s.omega)?;
        positive("spectrum.lambda", s.lambda)?;
        finite("spectrum.f_min", s.f_min)?;
        finite("spectrum.f_max", s.f_max)?;
        if s.f_max <= s.f_min {
            return Err(invalid("spectrum.f_max", "must exceed f_min"));
        }
        if s.points < 3 {
            return Err(invalid("spectrum.points", "need at least 3"));
        }
        if s.n < 2 {
            return Err(invalid("spectrum.n", "need at least 2 wells"));
        }

        let e = &self.entangle;
        non_negative("entangle.omega", e.omega)?;
        positive("entangle.lambda", e.lambda)?;
        if let Some(f0) = e.f0 {
            finite("entangle.f0", f0)?;
        }
        if let Some(r) = e.rate {
            finite("entangle.rate", r)?;
        }
        positive("entangle.t_end", e.t_end)?;
        non_negative("entangle.gamma_relax", e.gamma_relax)?;
        if e.initial.len() != 2 || !e.initial.chars().all(|c| c == '0' || c == '1') {
            return Err(invalid("entangle.initial", format!("expected two bits, got {:?}", e.initial)));
        }

        let h = &self.hotbath;
        if h.omegas.is_empty() {
            return Err(invalid("hotbath.omegas", "need at least one level"));
        }
        for &w in &h.omegas {
            non_negative("hotbath.omegas", w)?;
        }
        positive("hotbath.coupling_scale", h.coupling_scale)?;
        finite("hotbath.f0", h.f0)?;
        finite("hotbath.rate", h.rate)?;
        positive("hotbath.t_end", h.t_end)?;
        if h.gamma.is_empty() {
            return Err(invalid("hotbath.gamma", "need at least one rate"));
        }
        for &g in &h.gamma {
            non_negative("hotbath.gamma", g)?;
        }

        let w = &self.wstate;
        if w.n < 2 {
            return Err(invalid("wstate.n", "need at least 2 wells"));
        }
        non_negative("wstate.omega", w.omega)?;
        positive("wstate.lambda", w.lambda)?;
        positive("wstate.rate", w.rate)?;
        if let Some(f0) = w.f0 {
            finite("wstate.f0", f0)?;
        }
        if let Some(t) = w.t_end {
            positive("wstate.t_end", t)?;
        }

        let g = &self.ghz;
        non_negative("ghz.omega", g.omega)?;
        positive("ghz.lambda", g.lambda)?;
        positive("ghz.sweep_rate", g.sweep_rate)?;
        finite("ghz.f_start", g.f_start)?;
        if g.f_start >= 0.0 {
            return Err(invalid("ghz.f_start", "must be negative"));
        }

        let p = &self.protect;
        for (k, v) in p.a.iter().chain(&p.b).enumerate() {
            finite(if k < 2 { "protect.a" } else { "protect.b" }, *v)?;
        }
        let norm = p.a[0] * p.a[0] + p.a[1] * p.a[1] + p.b[0] * p.b[0] + p.b[1] * p.b[1];
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid("protect.a", format!("|a|² + |b|² = {norm}, expected 1")));
        }
        positive("protect.t_h", p.t_h)?;
        if let Some(t) = p.t_e {
            positive("protect.t_e", t)?;
        }
        if p.gamma_th.is_empty() {
            return Err(invalid("protect.gamma_th", "need at least one point"));
        }
        for &x in &p.gamma_th {
            non_negative("protect.gamma_th", x)?;
        }
        for name in &p.errors {
            if crosswell_core::model::ErrorOperator::from_name(name).is_none() {
                return Err(invalid("protect.errors", format!("unknown operator {name:?}; expected x1, x2, z1 or z2")));
            }
        }
        if p.recover && p.errors.len() > 1 {
            return Err(invalid("protect.recover", "recovery needs exactly one error operator"));
        }

        let b = &self.baseline;
        for &x in &b.gamma {
            non_negative("baseline.gamma", x)?;
        }
        non_negative("baseline.t", b.t)?;
        Ok(())
    }
}

/// Parse and validate; absent keys take the figure defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
