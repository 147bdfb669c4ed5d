use std::fmt::Write as _;

use rsf_core::amplifier::{amplified_rsf, amplifier_generators, AmplifierSpec};
use rsf_core::fock_oracle::{beam_splitter_case, identity_case, oracle_check_transform, squeeze_case, CatalogCase};
use rsf_core::kinetics::integrate_kinetics;
use rsf_core::numerics::IntegratorOptions;
use rsf_core::rsf::ReducedField;
use rsf_core::{CMatrix, CVector};
use serde::Serialize;

use crate::config::AmplifyConfig;
use crate::CliError;

pub const AMPLIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplifyReport {
    /// Largest relative deviation of `r_jj(t)` per mode over the grid.
    pub per_mode_max_rel_deviation: Vec<f64>,
    pub max_rel_deviation: f64,
    pub final_occupation: Vec<f64>,
    pub ok: bool,
    #[serde(skip)]
    pub csv: String,
}

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if b == 0.0 {
        d
    } else {
        d / b.abs()
    }
}

/// Closed-form amplification against integration of the kinetic equations.
pub fn run_amplify(config: &AmplifyConfig) -> Result<AmplifyReport, CliError> {
    let spec = AmplifierSpec::new(config.kappa.clone(), config.m.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    if config.samples < 2 {
        return Err(CliError::Config(format!("samples = {} must be >= 2", config.samples)));
    }
    if !(config.t_end > 0.0 && config.t_end.is_finite()) {
        return Err(CliError::Config(format!("t_end = {} must be positive", config.t_end)));
    }
    let n = spec.n_modes();
    let r0 = match &config.initial_occupation {
        None => CMatrix::zeros(n, n),
        Some(occ) if occ.len() == n && occ.iter().all(|x| *x >= 0.0) => CMatrix::diag_real(occ),
        Some(_) => {
            return Err(CliError::Config(format!(
                "initial_occupation needs {n} non-negative entries"
            )))
        }
    };
    let rf0 = ReducedField::new(r0, CVector::zeros(n))?;
    let ts: Vec<f64> = (0..config.samples)
        .map(|i| config.t_end * i as f64 / (config.samples - 1) as f64)
        .collect();
    let g = amplifier_generators(&spec);
    let options = IntegratorOptions {
        rel_tol: config.rel_tol,
        abs_tol: config.abs_tol,
        max_step: None,
    };
    let kinetic = integrate_kinetics(&rf0, |_| Ok(g.clone()), 0.0, config.t_end, &ts, options)?;

    let mut csv = String::from("t,mode,r_closed,r_kinetic,rel_deviation\n");
    let mut per_mode = vec![0.0f64; n];
    for (&t, rk) in ts.iter().zip(&kinetic) {
        let rc = amplified_rsf(&spec, &rf0, t)?;
        for j in 0..n {
            let (a, b) = (rk.r()[(j, j)].re, rc.r()[(j, j)].re);
            let d = rel(a, b);
            per_mode[j] = per_mode[j].max(d);
            let _ = writeln!(csv, "{t:.16e},{j},{b:.16e},{a:.16e},{d:.16e}");
        }
    }
    let max_rel_deviation = per_mode.iter().copied().fold(0.0, f64::max);
    Ok(AmplifyReport {
        final_occupation: kinetic.last().map(|r| r.occupations()).unwrap_or_default(),
        ok: max_rel_deviation <= AMPLIFY_TOL,
        per_mode_max_rel_deviation: per_mode,
        max_rel_deviation,
        csv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockCase {
    Identity,
    BeamSplitter,
    Squeeze,
    All,
}

impl FockCase {
    fn cases(self) -> Vec<CatalogCase> {
        match self {
            Self::Identity => vec![identity_case()],
            Self::BeamSplitter => vec![beam_splitter_case(0.7)],
            Self::Squeeze => vec![squeeze_case(0.3)],
            Self::All => vec![identity_case(), beam_splitter_case(0.7), squeeze_case(0.3)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockCaseReport {
    pub name: &'static str,
    pub n_max: usize,
    pub deviation: f64,
    pub threshold: f64,
    pub truncation_witness: f64,
    pub norm_drift: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockReport {
    pub cases: Vec<FockCaseReport>,
    pub ok: bool,
}

pub fn run_fock_check(which: FockCase, n_max: usize) -> Result<FockReport, CliError> {
    let mut cases = Vec::new();
    for case in which.cases() {
        let psi = case.initial_state(n_max)?;
        let rep = oracle_check_transform(&case, &psi)?;
        cases.push(FockCaseReport {
            name: case.name,
            n_max,
            deviation: rep.deviation,
            threshold: rep.threshold,
            truncation_witness: rep.truncation_witness,
            norm_drift: rep.norm_drift,
            passed: rep.passed(),
        });
    }
    Ok(FockReport {
        ok: cases.iter().all(|c| c.passed),
        cases,
    })
}
