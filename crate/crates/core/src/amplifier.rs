//! Closed-form Gaussian amplification: the RSF trajectory, its constant generators and the
//! two-mode Bogoliubov family.
//!
//! The cosh/sinh map of [`amplifier_bogoliubov`] and the constant-rate trajectory of
//! [`amplified_rsf`] are different one-parameter families (amplitude `cosh κt` against `e^{κt}`).

use crate::error::{Error, Result};
use crate::kinetics::KineticGenerators;
use crate::numerics::{CMatrix, CVector, C64};
use crate::rsf::ReducedField;
use crate::symplectic::BogoliubovMap;

/// Per-mode amplification rates `κ_j` and bath occupations `m_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifierSpec {
    kappa: Vec<f64>,
    m: Vec<f64>,
}

impl AmplifierSpec {
    pub fn new(kappa: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        if kappa.len() != m.len() || kappa.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} rates and {} bath occupations",
                kappa.len(),
                m.len()
            )));
        }
        if let Some(k) = kappa.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(Error::InvalidGenerators(format!("kappa = {k} must be >= 0")));
        }
        if let Some(x) = m.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidGenerators(format!("m = {x} must be >= 0")));
        }
        Ok(Self { kappa, m })
    }

    pub fn n_modes(&self) -> usize {
        self.kappa.len()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    /// `n_j(t) = (1 + m_j)(e^{2κ_j t} - 1)`.
    pub fn added_occupation(&self, t: f64) -> Vec<f64> {
        self.kappa
            .iter()
            .zip(&self.m)
            .map(|(k, m)| (1.0 + m) * (2.0 * k * t).exp_m1())
            .collect()
    }
}

/// `r(t) = E r₀ E + n(t)`, `α(t) = E α₀` with `E = diag(e^{κ_j t})`.
pub fn amplified_rsf(spec: &AmplifierSpec, rf0: &ReducedField, t: f64) -> Result<ReducedField> {
    let n = spec.n_modes();
    if rf0.n_modes() != n {
        return Err(Error::DimensionMismatch(format!(
            "amplifier has {n} modes, RSF {}",
            rf0.n_modes()
        )));
    }
    let e: Vec<f64> = spec.kappa.iter().map(|k| (k * t).exp()).collect();
    let added = spec.added_occupation(t);
    let r0 = rf0.r();
    let r = CMatrix::from_fn(n, n, |i, j| {
        let base = r0[(i, j)] * (e[i] * e[j]);
        if i == j {
            base + added[i]
        } else {
            base
        }
    });
    let alpha = CVector::from_fn(n, |i| rf0.alpha()[i] * e[i]);
    ReducedField::new(r, alpha)
}

/// `γ↑ = 2κ(1 + m)`, `γ↓ = 2κm`, everything else zero.
pub fn amplifier_generators(spec: &AmplifierSpec) -> KineticGenerators {
    let up: Vec<f64> = spec.kappa.iter().zip(&spec.m).map(|(k, m)| 2.0 * k * (1.0 + m)).collect();
    let down: Vec<f64> = spec.kappa.iter().zip(&spec.m).map(|(k, m)| 2.0 * k * m).collect();
    let n = spec.n_modes();
    KineticGenerators::from_rates(CMatrix::zeros(n, n), CMatrix::diag_real(&up), CMatrix::diag_real(&down))
        .expect("diagonal real rates are Hermitian")
}

/// `X_up = cosh(κt) ⊕ cosh(κt)`, `X_down = [[0, sinh κt], [sinh κt, 0]]` over `N` system and
/// `N` environment modes.
pub fn amplifier_bogoliubov(kappa: &[f64], t: f64) -> Result<BogoliubovMap> {
    let n = kappa.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("at least one rate is needed".into()));
    }
    let ch: Vec<f64> = kappa.iter().map(|k| (k * t).cosh()).collect();
    let sh: Vec<f64> = kappa.iter().map(|k| (k * t).sinh()).collect();
    let zero = C64::new(0.0, 0.0);
    let up = CMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { C64::new(ch[i % n], 0.0) } else { zero });
    let down = CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if (i + n) % (2 * n) == j {
            C64::new(sh[i % n], 0.0)
        } else {
            zero
        }
    });
    BogoliubovMap::from_blocks(&up, &down, n, n)
}
