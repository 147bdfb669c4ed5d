//! Dynamical Casimir effect for one helicity pair `(R, k) ⊕ (L, -k)` in a moving medium.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinetics::{extract_open_generators, KineticGenerators, OpenExtraction, SmoothFamily};
use crate::numerics::{solve_ode_dense, CMatrix, DenseSolution, IntegratorOptions, OdeProblem, C64};
use crate::symplectic::BogoliubovMap;

/// Bound on the CCR and helicity residuals of a mode solution.
pub const INVARIANT_TOL: f64 = 1e-8;
/// Velocities closer than this count as equal.
pub const VELOCITY_TOL: f64 = 1e-12;

/// Medium speed `β(t)` in units of `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityProfile {
    Constant { beta0: f64 },
    /// `β0 sin(Ω t)`
    Sinusoid { beta0: f64, drive_frequency: f64 },
    /// `β0 sin²(π t / duration)` on `[0, duration]`, zero afterwards.
    SmoothPulse { beta0: f64, duration: f64 },
    /// Linear rise to `β0` over `ramp_time`, hold, linear fall reaching zero at `window_end`.
    LinearRampWindowed { beta0: f64, ramp_time: f64, window_end: f64 },
}

impl VelocityProfile {
    pub fn beta0(&self) -> f64 {
        match *self {
            Self::Constant { beta0 }
            | Self::Sinusoid { beta0, .. }
            | Self::SmoothPulse { beta0, .. }
            | Self::LinearRampWindowed { beta0, .. } => beta0,
        }
    }

    pub fn beta(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { beta0 } => beta0,
            Self::Sinusoid { beta0, drive_frequency } => beta0 * (drive_frequency * t).sin(),
            Self::SmoothPulse { beta0, duration } => {
                if (0.0..=duration).contains(&t) {
                    beta0 * (PI * t / duration).sin().powi(2)
                } else {
                    0.0
                }
            }
            Self::LinearRampWindowed {
                beta0,
                ramp_time,
                window_end,
            } => {
                if t <= 0.0 || t >= window_end {
                    0.0
                } else if t < ramp_time {
                    beta0 * t / ramp_time
                } else if t > window_end - ramp_time {
                    beta0 * (window_end - t) / ramp_time
                } else {
                    beta0
                }
            }
        }
    }

    /// Times where `β` is continuous but `dβ/dt` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::LinearRampWindowed {
                ramp_time, window_end, ..
            } => vec![ramp_time, window_end - ramp_time, window_end],
            _ => Vec::new(),
        }
    }

    /// `sup_t |β(t)|`.
    pub fn sup_abs(&self) -> f64 {
        self.beta0().abs()
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.beta0();
        if !b.is_finite() || b.abs() >= 1.0 {
            return Err(Error::InvalidScenario(format!(
                "profile.beta0 = {b} violates the subluminal constraint |beta| < 1"
            )));
        }
        match *self {
            Self::Constant { .. } => {}
            Self::Sinusoid { drive_frequency, .. } => {
                if !drive_frequency.is_finite() {
                    return Err(Error::InvalidScenario("profile.drive_frequency must be finite".into()));
                }
            }
            Self::SmoothPulse { duration, .. } => {
                if !(duration > 0.0 && duration.is_finite()) {
                    return Err(Error::InvalidScenario("profile.duration must be positive".into()));
                }
            }
            Self::LinearRampWindowed {
                ramp_time, window_end, ..
            } => {
                if !(ramp_time > 0.0 && window_end.is_finite() && 2.0 * ramp_time <= window_end) {
                    return Err(Error::InvalidScenario(
                        "profile needs ramp_time > 0 and 2 * ramp_time <= window_end".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    /// `σ = [α(0)/Δ(0)]^{1/4}`.
    Auto,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirScenario {
    pub refractive_index: f64,
    /// Mode frequency `ω(k)`.
    pub omega: f64,
    /// Angle between `k` and the direction of motion.
    pub theta: f64,
    pub sigma: Sigma,
    pub profile: VelocityProfile,
    pub t_end: f64,
}

/// `δ, α, Δ, η±` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumCoefficients {
    pub beta: f64,
    pub delta: f64,
    pub alpha_coef: f64,
    pub delta_cap: f64,
    pub eta_plus: f64,
    pub eta_minus: f64,
}

impl CasimirScenario {
    pub fn validate(&self) -> Result<()> {
        let n = self.refractive_index;
        if !(n >= 1.0 && n.is_finite()) {
            return Err(Error::InvalidScenario(format!("refractive_index = {n} must be >= 1")));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidScenario(format!("omega = {} must be positive", self.omega)));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidScenario(format!("theta = {} must lie in [0, pi]", self.theta)));
        }
        if let Sigma::Explicit(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidScenario(format!("sigma = {s} must be positive")));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidScenario(format!("t_end = {} must be >= 0", self.t_end)));
        }
        self.profile.validate()
    }

    pub fn sigma_value(&self) -> f64 {
        match self.sigma {
            Sigma::Auto => auto_sigma(self),
            Sigma::Explicit(s) => s,
        }
    }

    /// `(δ, α, Δ)` for speed `beta`.
    fn medium(&self, beta: f64) -> (f64, f64, f64) {
        let n2 = self.refractive_index * self.refractive_index;
        let b2 = beta * beta;
        let delta = (n2 - 1.0) / (n2 - b2);
        let c = self.theta.cos();
        (delta, 1.0 - delta * b2, 1.0 - delta * b2 * c * c)
    }

    pub fn coefficients(&self, t: f64) -> MediumCoefficients {
        self.coefficients_with_sigma(t, self.sigma_value())
    }

    fn coefficients_with_sigma(&self, t: f64, sigma: f64) -> MediumCoefficients {
        let beta = self.profile.beta(t);
        let (delta, alpha_coef, delta_cap) = self.medium(beta);
        let s2 = sigma * sigma;
        MediumCoefficients {
            beta,
            delta,
            alpha_coef,
            delta_cap,
            eta_plus: 0.5 * (alpha_coef / s2 + s2 * delta_cap),
            eta_minus: 0.5 * (alpha_coef / s2 - s2 * delta_cap),
        }
    }

    /// `dφ/dt = ω δ β cos θ`.
    pub fn phase_rate(&self, t: f64) -> f64 {
        let beta = self.profile.beta(t);
        self.omega * self.medium(beta).0 * beta * self.theta.cos()
    }

    /// `ω √(αΔ)` at constant speed `beta`.
    pub fn dressed_frequency(&self, beta: f64) -> f64 {
        let (_, a, d) = self.medium(beta);
        self.omega * (a * d).sqrt()
    }

    /// Whether the medium ends at a different speed than it started.
    pub fn endpoint_velocity_mismatch(&self) -> bool {
        (self.profile.beta(self.t_end) - self.profile.beta(0.0)).abs() > VELOCITY_TOL
    }
}

/// `σ = [α(0)/Δ(0)]^{1/4}`, the choice with no production at constant speed.
pub fn auto_sigma(s: &CasimirScenario) -> f64 {
    let (_, a, d) = s.medium(s.profile.beta(0.0));
    (a / d).powf(0.25)
}

/// Mode functions and phase at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub f_rp: C64,
    pub f_rm: C64,
    pub f_lp: C64,
    pub f_lm: C64,
    pub phi: f64,
}

impl ModeState {
    fn from_slice(y: &[f64]) -> Self {
        Self {
            f_rp: C64::new(y[0], y[1]),
            f_rm: C64::new(y[2], y[3]),
            f_lp: C64::new(y[4], y[5]),
            f_lm: C64::new(y[6], y[7]),
            phi: y[8],
        }
    }

    /// `|f_R+|² - |f_R-|² - 1`.
    pub fn ccr_residual(&self) -> f64 {
        self.f_rp.norm_sqr() - self.f_rm.norm_sqr() - 1.0
    }

    /// `|f_L-|² - |f_L+|² - 1`.
    pub fn ccr_residual_left(&self) -> f64 {
        self.f_lm.norm_sqr() - self.f_lp.norm_sqr() - 1.0
    }

    /// `max(||f_L+| - |f_R-||, ||f_L-| - |f_R+||)`.
    pub fn helicity_residual(&self) -> f64 {
        (self.f_lp.norm() - self.f_rm.norm())
            .abs()
            .max((self.f_lm.norm() - self.f_rp.norm()).abs())
    }

    /// `e^{-iφ} f_R+`, the system block of the upper half of the map.
    pub fn x_up_s(&self) -> C64 {
        C64::from_polar(1.0, -self.phi) * self.f_rp
    }

    /// `e^{-iφ} f_R-`.
    pub fn x_down_c(&self) -> C64 {
        C64::from_polar(1.0, -self.phi) * self.f_rm
    }
}

const STATE_DIM: usize = 9;

fn mode_rhs(s: &CasimirScenario, sigma: f64, t: f64, y: &[f64], dy: &mut [f64]) {
    let k = s.coefficients_with_sigma(t, sigma);
    let w = s.omega;
    let pair = |p: C64, m: C64| {
        let i = C64::i();
        let dp = -i * w * (k.eta_plus * p - k.eta_minus * m);
        let dm = i * w * (k.eta_plus * m - k.eta_minus * p);
        (dp, dm)
    };
    let (drp, drm) = pair(C64::new(y[0], y[1]), C64::new(y[2], y[3]));
    let (dlp, dlm) = pair(C64::new(y[4], y[5]), C64::new(y[6], y[7]));
    for (j, z) in [drp, drm, dlp, dlm].into_iter().enumerate() {
        dy[2 * j] = z.re;
        dy[2 * j + 1] = z.im;
    }
    dy[8] = w * k.delta * k.beta * s.theta.cos();
}

/// Integrated mode functions sampled at `times`, plus the continuous flow.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    scenario: CasimirScenario,
    sigma: f64,
    times: Vec<f64>,
    states: Vec<ModeState>,
    flow: Flow,
}

/// Dense flow restarted at every profile breakpoint.
#[derive(Debug, Clone)]
struct Flow {
    segments: Vec<DenseSolution>,
}

impl Flow {
    fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let seg = self
            .segments
            .iter()
            .find(|d| t <= d.span().1)
            .unwrap_or_else(|| self.segments.last().expect("at least one segment"));
        seg.eval(t)
    }

    fn n_steps(&self) -> usize {
        self.segments.iter().map(DenseSolution::n_steps).sum()
    }
}

/// Integrates both pairs and the phase from `t = 0` to `t_end`; fails with
/// [`Error::InvariantViolated`] if the CCR or helicity residual exceeds [`INVARIANT_TOL`].
pub fn solve_modes(s: &CasimirScenario, samples: &[f64], options: IntegratorOptions) -> Result<ModeSolution> {
    s.validate()?;
    if samples.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidScenario("sample times must be strictly ascending".into()));
    }
    if samples.iter().any(|&t| !(0.0..=s.t_end).contains(&t)) {
        return Err(Error::InvalidScenario(format!("sample times must lie in [0, {}]", s.t_end)));
    }
    let sigma = s.sigma_value();
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        mode_rhs(s, sigma, t, y, dy);
        Ok(())
    };
    let mut ends: Vec<f64> = s
        .profile
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < s.t_end)
        .collect();
    ends.push(s.t_end);
    let mut segments = Vec::with_capacity(ends.len());
    let mut y = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let mut start = 0.0;
    for end in ends {
        let mut problem = options.apply(OdeProblem::new(STATE_DIM, rhs, start, end));
        let seg = solve_ode_dense(&mut problem, &y)?;
        y = seg.eval(end)?;
        segments.push(seg);
        start = end;
    }
    let flow = Flow { segments };

    let mut states = Vec::with_capacity(samples.len());
    let mut worst_ccr = (0.0, 0.0);
    let mut worst_hel = (0.0, 0.0);
    for &t in samples {
        let st = ModeState::from_slice(&flow.eval(t)?);
        let ccr = st.ccr_residual().abs().max(st.ccr_residual_left().abs());
        if !(ccr <= worst_ccr.0) {
            worst_ccr = (ccr, t);
        }
        let hel = st.helicity_residual();
        if !(hel <= worst_hel.0) {
            worst_hel = (hel, t);
        }
        states.push(st);
    }
    if !(worst_ccr.0 <= INVARIANT_TOL) {
        return Err(Error::InvariantViolated {
            what: "canonical commutation relation",
            residual: worst_ccr.0,
            t: worst_ccr.1,
        });
    }
    if !(worst_hel.0 <= INVARIANT_TOL) {
        return Err(Error::InvariantViolated {
            what: "helicity symmetry",
            residual: worst_hel.0,
            t: worst_hel.1,
        });
    }
    Ok(ModeSolution {
        scenario: *s,
        sigma,
        times: samples.to_vec(),
        states,
        flow,
    })
}

/// `count` equally spaced samples on `[0, t_end]`.
pub fn uniform_samples(t_end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    t_end
                } else {
                    t_end * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

impl ModeSolution {
    pub fn scenario(&self) -> &CasimirScenario {
        &self.scenario
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ModeState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, index: usize) -> Result<&ModeState> {
        self.states.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.states.len(),
        })
    }

    /// State at any `t` in `[0, t_end]` from the continuous flow.
    pub fn state_at(&self, t: f64) -> Result<ModeState> {
        Ok(ModeState::from_slice(&self.flow.eval(t)?))
    }

    /// Time derivative of the state at `t` from the equations of motion.
    pub fn derivative_at(&self, t: f64) -> Result<ModeState> {
        let y = self.flow.eval(t)?;
        let mut dy = [0.0; STATE_DIM];
        mode_rhs(&self.scenario, self.sigma, t, &y, &mut dy);
        Ok(ModeState::from_slice(&dy))
    }

    pub fn max_ccr_residual(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.ccr_residual().abs().max(s.ccr_residual_left().abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_helicity_residual(&self) -> f64 {
        self.states.iter().map(|s| s.helicity_residual()).fold(0.0, f64::max)
    }

    pub fn n_accepted_steps(&self) -> usize {
        self.flow.n_steps()
    }
}

/// `(|f_R-|², |f_L+|²)`, photon densities per mode.
pub fn photon_density(sol: &ModeSolution, index: usize) -> Result<(f64, f64)> {
    let st = sol.state(index)?;
    Ok((st.f_rm.norm_sqr(), st.f_lp.norm_sqr()))
}

/// Bogoliubov map over `(R, k) ⊕ (L, -k)`, the first mode taken as the system.
pub fn casimir_map(sol: &ModeSolution, index: usize) -> Result<BogoliubovMap> {
    map_from_state(sol.state(index)?)
}

pub fn map_from_state(st: &ModeState) -> Result<BogoliubovMap> {
    let em = C64::from_polar(1.0, -st.phi);
    let ep = C64::from_polar(1.0, st.phi);
    let up = CMatrix::diag(&[em * st.f_rp, ep * st.f_lm.conj()]);
    let zero = C64::new(0.0, 0.0);
    let down = CMatrix::from_rows(&[vec![zero, em * st.f_rm], vec![ep * st.f_lp.conj(), zero]])
        .expect("2x2 rows");
    BogoliubovMap::from_blocks(&up, &down, 1, 1)
}

/// Scalar generators in closed form at one instant.
///
/// `h = ω(η₊ - η₋ Re(f_R-/f_R+)) + ω δ β cos θ`, `γ↑ = 2ωη₋ Im(f_R+ f_R-*)/|f_R+|²`, `γ↓ = 0`.
pub fn closed_form_generators(s: &CasimirScenario, sigma: f64, t: f64, st: &ModeState) -> Result<KineticGenerators> {
    let (h, gamma_up) = closed_form_rates(s, sigma, t, st);
    KineticGenerators::from_rates(
        CMatrix::diag_real(&[h]),
        CMatrix::diag_real(&[gamma_up]),
        CMatrix::zeros(1, 1),
    )
}

fn closed_form_rates(s: &CasimirScenario, sigma: f64, t: f64, st: &ModeState) -> (f64, f64) {
    let k = s.coefficients_with_sigma(t, sigma);
    let w = s.omega;
    let ratio = st.f_rm / st.f_rp;
    let h = w * (k.eta_plus - k.eta_minus * ratio.re) + w * k.delta * k.beta * s.theta.cos();
    let gamma_up = 2.0 * w * k.eta_minus * (st.f_rp * st.f_rm.conj()).im / st.f_rp.norm_sqr();
    (h, gamma_up)
}

pub fn casimir_generators_closed_form(sol: &ModeSolution, index: usize) -> Result<KineticGenerators> {
    let st = sol.state(index)?;
    closed_form_generators(&sol.scenario, sol.sigma, sol.times[index], st)
}

/// Generators at `t` from the continuous flow, for use inside integrators.
pub fn closed_form_generators_at(sol: &ModeSolution, t: f64) -> Result<KineticGenerators> {
    let st = sol.state_at(t)?;
    closed_form_generators(&sol.scenario, sol.sigma, t, &st)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapEntry {
    /// `e^{-iφ} f_R+`
    UpS,
    /// `e^{-iφ} f_R-`
    DownC,
}

/// One entry of the Casimir map as a smooth family, differentiated through the equations of motion.
pub struct CasimirFamily<'a> {
    sol: &'a ModeSolution,
    entry: MapEntry,
}

impl<'a> CasimirFamily<'a> {
    pub fn new(sol: &'a ModeSolution, entry: MapEntry) -> Self {
        Self { sol, entry }
    }

    fn entry_value(&self, st: &ModeState) -> C64 {
        match self.entry {
            MapEntry::UpS => st.x_up_s(),
            MapEntry::DownC => st.x_down_c(),
        }
    }
}

impl SmoothFamily for CasimirFamily<'_> {
    fn value(&self, t: f64) -> Result<CMatrix> {
        Ok(CMatrix::scalar(self.entry_value(&self.sol.state_at(t)?)))
    }

    fn derivative(&self, t: f64) -> Result<CMatrix> {
        let st = self.sol.state_at(t)?;
        let d = self.sol.derivative_at(t)?;
        let (f, df) = match self.entry {
            MapEntry::UpS => (st.f_rp, d.f_rp),
            MapEntry::DownC => (st.f_rm, d.f_rm),
        };
        let e = C64::from_polar(1.0, -st.phi);
        Ok(CMatrix::scalar(e * (df - C64::i() * d.phi * f)))
    }
}

/// Generic open extraction on the Casimir family at sample `index`.
pub fn extract_casimir_generators(sol: &ModeSolution, index: usize) -> Result<OpenExtraction> {
    let t = *sol.times.get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: sol.times.len(),
    })?;
    extract_open_generators(
        &CasimirFamily::new(sol, MapEntry::UpS),
        &CasimirFamily::new(sol, MapEntry::DownC),
        t,
    )
}

/// Per-sample check of `dn/dT = γ↑ (n + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthLawReport {
    pub dn_dt: Vec<f64>,
    pub gamma_up: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub max_abs_dn_dt: f64,
}

/// Default finite-difference step of the growth-law check, in units of `1/ω`.
pub const GROWTH_STEP: f64 = 1e-4;

/// [`GROWTH_STEP`] in time units for scenario `s`.
pub fn default_growth_step(s: &CasimirScenario) -> f64 {
    GROWTH_STEP / s.omega
}

/// `|dn/dT - γ↑(n+1)|` at every sample, `dn/dT` by finite differences of `|f_R-|²`
/// on the continuous flow with step `step`. Samples closer than `step` to an end of the
/// span or to a profile breakpoint use one-sided second-order stencils that stay on one side.
pub fn growth_law_residual(sol: &ModeSolution, step: f64) -> Result<GrowthLawReport> {
    let t_end = sol.scenario.t_end;
    if !(step > 0.0) {
        return Err(Error::DerivativeUnavailable {
            t: 0.0,
            reason: format!("finite-difference step {step} must be positive"),
        });
    }
    if t_end < 2.0 * step {
        return Err(Error::DerivativeUnavailable {
            t: 0.0,
            reason: format!("span {t_end} is shorter than two steps of {step}"),
        });
    }
    let n = |t: f64| -> Result<f64> { Ok(sol.state_at(t)?.f_rm.norm_sqr()) };
    let mut report = GrowthLawReport {
        dn_dt: Vec::with_capacity(sol.len()),
        gamma_up: Vec::with_capacity(sol.len()),
        residuals: Vec::with_capacity(sol.len()),
        max_residual: 0.0,
        max_abs_dn_dt: 0.0,
    };
    let kinks = sol.scenario.profile.breakpoints();
    let straddles = |a: f64, b: f64| kinks.iter().any(|&k| a < k && k < b);
    for (&t, st) in sol.times.iter().zip(&sol.states) {
        let central = t - step >= 0.0 && t + step <= t_end && !straddles(t - step, t + step);
        let forward = t + 2.0 * step <= t_end && !straddles(t, t + 2.0 * step);
        let dn = if central {
            (n(t + step)? - n(t - step)?) / (2.0 * step)
        } else if forward {
            (-3.0 * n(t)? + 4.0 * n(t + step)? - n(t + 2.0 * step)?) / (2.0 * step)
        } else {
            (3.0 * n(t)? - 4.0 * n(t - step)? + n(t - 2.0 * step)?) / (2.0 * step)
        };
        let (_, gamma_up) = closed_form_rates(&sol.scenario, sol.sigma, t, st);
        let residual = (dn - gamma_up * (st.f_rm.norm_sqr() + 1.0)).abs();
        report.max_residual = report.max_residual.max(residual);
        report.max_abs_dn_dt = report.max_abs_dn_dt.max(dn.abs());
        report.dn_dt.push(dn);
        report.gamma_up.push(gamma_up);
        report.residuals.push(residual);
    }
    Ok(report)
}
