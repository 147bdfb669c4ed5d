use std::fs;
use std::path::Path;

use rsf_core::casimir::{CasimirScenario, Sigma, VelocityProfile};
use rsf_core::numerics::IntegratorOptions;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_samples() -> usize {
    201
}

fn default_rel_tol() -> f64 {
    IntegratorOptions::default().rel_tol
}

fn default_abs_tol() -> f64 {
    IntegratorOptions::default().abs_tol
}

fn default_prefix() -> String {
    "casimir".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant { beta0: f64 },
    Sinusoid { beta0: f64, drive_frequency: f64 },
    SmoothPulse { beta0: f64, duration: f64 },
    LinearRampWindowed { beta0: f64, ramp_time: f64, window_end: f64 },
}

impl ProfileConfig {
    pub fn to_profile(&self) -> VelocityProfile {
        match *self {
            Self::Constant { beta0 } => VelocityProfile::Constant { beta0 },
            Self::Sinusoid { beta0, drive_frequency } => VelocityProfile::Sinusoid { beta0, drive_frequency },
            Self::SmoothPulse { beta0, duration } => VelocityProfile::SmoothPulse { beta0, duration },
            Self::LinearRampWindowed {
                beta0,
                ramp_time,
                window_end,
            } => VelocityProfile::LinearRampWindowed {
                beta0,
                ramp_time,
                window_end,
            },
        }
    }

    fn with_beta0(&self, b: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Self::Constant { beta0 }
            | Self::Sinusoid { beta0, .. }
            | Self::SmoothPulse { beta0, .. }
            | Self::LinearRampWindowed { beta0, .. } => *beta0 = b,
        }
        out
    }
}

/// `"auto"` or a positive number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaConfig {
    Keyword(String),
    Value(f64),
}

impl Default for SigmaConfig {
    fn default() -> Self {
        Self::Keyword("auto".into())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub omega: Vec<f64>,
    #[serde(default)]
    pub theta: Vec<f64>,
    #[serde(default)]
    pub drive_frequency: Vec<f64>,
    #[serde(default)]
    pub beta0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            prefix: default_prefix(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub refractive_index: f64,
    pub omega: f64,
    pub theta: f64,
    #[serde(default)]
    pub sigma: SigmaConfig,
    pub profile: ProfileConfig,
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn sigma(&self) -> Result<Sigma, CliError> {
        match &self.sigma {
            SigmaConfig::Keyword(k) if k == "auto" => Ok(Sigma::Auto),
            SigmaConfig::Keyword(k) => Err(CliError::Config(format!(
                "sigma = {k:?} must be \"auto\" or a positive number"
            ))),
            SigmaConfig::Value(v) => Ok(Sigma::Explicit(*v)),
        }
    }

    pub fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: None,
        }
    }

    /// Validated physical scenario.
    pub fn scenario(&self) -> Result<CasimirScenario, CliError> {
        if self.samples < 2 {
            return Err(CliError::Config(format!("samples = {} must be >= 2", self.samples)));
        }
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} = {v} must be positive")));
            }
        }
        let s = CasimirScenario {
            refractive_index: self.refractive_index,
            omega: self.omega,
            theta: self.theta,
            sigma: self.sigma()?,
            profile: self.profile.to_profile(),
            t_end: self.t_end,
        };
        s.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(s)
    }

    /// One config per grid point, ordered by `(ω, θ, Ω, β₀)` with the last index fastest.
    /// An empty list keeps the base value.
    pub fn grid(&self) -> Result<Vec<ScenarioConfig>, CliError> {
        let spec = self.sweep.clone().unwrap_or_default();
        let or_base = |v: &[f64], base: f64| if v.is_empty() { vec![base] } else { v.to_vec() };
        let omegas = or_base(&spec.omega, self.omega);
        let thetas = or_base(&spec.theta, self.theta);
        let betas = or_base(&spec.beta0, self.profile.to_profile().beta0());
        let drives: Vec<Option<f64>> = match (&self.profile, spec.drive_frequency.is_empty()) {
            (_, true) => vec![None],
            (ProfileConfig::Sinusoid { .. }, false) => spec.drive_frequency.iter().map(|&d| Some(d)).collect(),
            _ => {
                return Err(CliError::Config(
                    "sweep.drive_frequency requires a sinusoid profile".into(),
                ))
            }
        };
        let mut out = Vec::new();
        for &omega in &omegas {
            for &theta in &thetas {
                for &drive in &drives {
                    for &beta in &betas {
                        let mut c = self.clone();
                        c.sweep = None;
                        c.omega = omega;
                        c.theta = theta;
                        c.profile = c.profile.with_beta0(beta);
                        if let (Some(d), ProfileConfig::Sinusoid { drive_frequency, .. }) = (drive, &mut c.profile) {
                            *drive_frequency = d;
                        }
                        out.push(c);
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(CliError::Config("sweep grid is empty".into()));
        }
        Ok(out)
    }
}

fn default_amp_t_end() -> f64 {
    1.0
}

fn default_amp_samples() -> usize {
    21
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifyConfig {
    pub kappa: Vec<f64>,
    pub m: Vec<f64>,
    #[serde(default = "default_amp_t_end")]
    pub t_end: f64,
    #[serde(default = "default_amp_samples")]
    pub samples: usize,
    /// Diagonal of `r₀`; vacuum when absent.
    #[serde(default)]
    pub initial_occupation: Option<Vec<f64>>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
}

impl AmplifyConfig {
    pub fn new(kappa: Vec<f64>, m: Vec<f64>) -> Self {
        Self {
            kappa,
            m,
            t_end: default_amp_t_end(),
            samples: default_amp_samples(),
            initial_occupation: None,
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config: {e}")))
    }
}
