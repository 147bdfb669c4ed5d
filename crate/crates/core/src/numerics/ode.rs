//! Adaptive Dormand–Prince 5(4) integrator with continuous (dense) output.

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error estimate (5th minus embedded 4th order).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// An initial value problem `dy/dt = rhs(t, y)` on `[t0, t1]` over real state
/// vectors. Complex states are packed as interleaved `(re, im)` pairs.
pub struct OdeProblem<F> {
    pub dim: usize,
    pub rhs: F,
    pub t0: f64,
    pub t1: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// First trial step; estimated from the problem when `None`.
    pub initial_step: Option<f64>,
    /// Upper bound on accepted step sizes; the span length when `None`.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl<F> OdeProblem<F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(dim: usize, rhs: F, t0: f64, t1: f64) -> Self {
        Self {
            dim,
            rhs,
            t0,
            t1,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: None,
            max_step: None,
            max_steps: 2_000_000,
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_initial_step(mut self, h: f64) -> Self {
        self.initial_step = Some(h);
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }

    fn validate(&self, y0: &[f64]) -> Result<()> {
        if self.dim == 0 || y0.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "initial state of length {} for an ODE of dimension {}",
                y0.len(),
                self.dim
            )));
        }
        if !(self.t1 >= self.t0) || !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(Error::InvalidProblem(format!("span [{}, {}]", self.t0, self.t1)));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidProblem("tolerances must be positive".into()));
        }
        if y0.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { t: self.t0 });
        }
        Ok(())
    }
}

/// Tolerances and step bound shared by the physics integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn apply<F>(&self, problem: OdeProblem<F>) -> OdeProblem<F>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let problem = problem.with_tolerances(self.rel_tol, self.abs_tol);
        match self.max_step {
            Some(h) => problem.with_max_step(h),
            None => problem,
        }
    }
}

/// One accepted step's interpolation data.
#[derive(Debug, Clone)]
struct DenseStep {
    t_old: f64,
    h: f64,
    cont: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t_old) / self.h;
        let theta1 = 1.0 - theta;
        let [c0, c1, c2, c3, c4] = &self.cont;
        for i in 0..out.len() {
            out[i] = c0[i] + theta * (c1[i] + theta1 * (c2[i] + theta * (c3[i] + theta1 * c4[i])));
        }
    }
}

/// Continuous solution over the whole span.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    t0: f64,
    t1: f64,
    y0: Vec<f64>,
    y1: Vec<f64>,
    steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Accepted step boundaries, including `t0` and `t1`.
    pub fn step_times(&self) -> Vec<f64> {
        let mut ts = vec![self.t0];
        ts.extend(self.steps.iter().map(|s| s.t_old + s.h));
        ts
    }

    /// Evaluate the interpolant; fails outside `[t0, t1]`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if !(t >= self.t0 && t <= self.t1) {
            return Err(Error::InvalidProblem(format!(
                "evaluation time {t} outside [{}, {}]",
                self.t0, self.t1
            )));
        }
        if t == self.t0 || self.steps.is_empty() {
            out.copy_from_slice(&self.y0);
            return Ok(());
        }
        if t == self.t1 {
            out.copy_from_slice(&self.y1);
            return Ok(());
        }
        let idx = self
            .steps
            .partition_point(|s| s.t_old + s.h < t)
            .min(self.steps.len() - 1);
        self.steps[idx].eval_into(t, out);
        Ok(())
    }
}

/// Integrate and return the state at each of `sample_times` (ascending, inside the span).
pub fn solve_ode<F>(problem: &mut OdeProblem<F>, y0: &[f64], sample_times: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    problem.validate(y0)?;
    check_samples(problem.t0, problem.t1, sample_times)?;
    let mut out = Vec::with_capacity(sample_times.len());
    let mut next = 0;
    while next < sample_times.len() && sample_times[next] == problem.t0 {
        out.push(y0.to_vec());
        next += 1;
    }
    let dim = problem.dim;
    integrate(problem, y0, |step, y_new| {
        let t_new = step.t_old + step.h;
        while next < sample_times.len() && sample_times[next] <= t_new {
            let ts = sample_times[next];
            if ts == t_new {
                out.push(y_new.to_vec());
            } else {
                let mut y = vec![0.0; dim];
                step.eval_into(ts, &mut y);
                out.push(y);
            }
            next += 1;
        }
    })?;
    debug_assert_eq!(out.len(), sample_times.len());
    Ok(out)
}

/// Integrate over the whole span keeping every step's interpolant.
pub fn solve_ode_dense<F>(problem: &mut OdeProblem<F>, y0: &[f64]) -> Result<DenseSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    problem.validate(y0)?;
    let mut steps = Vec::new();
    let mut y_last = y0.to_vec();
    integrate(problem, y0, |step, y_new| {
        steps.push(step.clone());
        y_last.copy_from_slice(y_new);
    })?;
    Ok(DenseSolution {
        t0: problem.t0,
        t1: problem.t1,
        y0: y0.to_vec(),
        y1: y_last,
        steps,
    })
}

fn check_samples(t0: f64, t1: f64, sample_times: &[f64]) -> Result<()> {
    if sample_times.iter().any(|&t| !(t >= t0 && t <= t1)) {
        return Err(Error::InvalidProblem(format!("sample times must lie in [{t0}, {t1}]")));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidProblem("sample times must be ascending".into()));
    }
    Ok(())
}

fn rms_norm(v: &[f64], scale: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(scale).map(|(x, sk)| (x / sk).powi(2)).sum();
    (s / v.len() as f64).sqrt()
}

fn initial_step<F>(p: &mut OdeProblem<F>, y0: &[f64], f0: &[f64], h_max: f64) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let sk: Vec<f64> = y0.iter().map(|y| p.abs_tol + p.rel_tol * y.abs()).collect();
    let d0 = rms_norm(y0, &sk);
    let d1 = rms_norm(f0, &sk);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(h_max);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; p.dim];
    (p.rhs)(p.t0 + h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_norm(&diff, &sk) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(h_max))
}

/// Core stepping loop; `on_step` sees every accepted step and its end state.
fn integrate<F, S>(p: &mut OdeProblem<F>, y0: &[f64], mut on_step: S) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    S: FnMut(&DenseStep, &[f64]),
{
    let n = p.dim;
    let span = p.t1 - p.t0;
    if span == 0.0 {
        return Ok(());
    }
    let h_max = p.max_step.unwrap_or(span).min(span).abs();

    let mut t = p.t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err_vec = vec![0.0; n];

    (p.rhs)(t, &y, &mut k1)?;
    if k1.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteState { t });
    }
    let mut h = match p.initial_step {
        Some(h0) => h0.min(h_max),
        None => initial_step(p, &y, &k1, h_max)?,
    };

    let mut fac_old: f64 = 1e-4;
    let mut rejected = false;
    let mut n_steps = 0usize;

    loop {
        if n_steps >= p.max_steps {
            return Err(Error::TooManySteps {
                max_steps: p.max_steps,
                t_end: p.t1,
            });
        }
        if 0.1 * h.abs() <= t.abs().max(span.abs()) * f64::EPSILON {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let last = t + 1.01 * h >= p.t1;
        if last {
            h = p.t1 - t;
        }
        n_steps += 1;

        for i in 0..n {
            y1[i] = y[i] + h * A21 * k1[i];
        }
        (p.rhs)(t + C2 * h, &y1, &mut k2)?;
        for i in 0..n {
            y1[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        (p.rhs)(t + C3 * h, &y1, &mut k3)?;
        for i in 0..n {
            y1[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        (p.rhs)(t + C4 * h, &y1, &mut k4)?;
        for i in 0..n {
            y1[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        (p.rhs)(t + C5 * h, &y1, &mut k5)?;
        for i in 0..n {
            y1[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { p.t1 } else { t + h };
        (p.rhs)(t_new, &y1, &mut k6)?;
        for i in 0..n {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        (p.rhs)(t_new, &y1, &mut k7)?;

        for i in 0..n {
            err_vec[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let sk: Vec<f64> = (0..n)
            .map(|i| p.abs_tol + p.rel_tol * y[i].abs().max(y1[i].abs()))
            .collect();
        let err = rms_norm(&err_vec, &sk);
        if !err.is_finite() || y1.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { t: t_new });
        }

        let fac11 = err.powf(0.2 - BETA * 0.75);
        let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            let cont = {
                let mut c = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
                for i in 0..n {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    c[0][i] = y[i];
                    c[1][i] = ydiff;
                    c[2][i] = bspl;
                    c[3][i] = -h * k7[i] + ydiff - bspl;
                    c[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                c
            };
            let step = DenseStep { t_old: t, h, cont };
            std::mem::swap(&mut k1, &mut k7);
            std::mem::swap(&mut y, &mut y1);
            t = t_new;
            on_step(&step, &y);
            if last {
                return Ok(());
            }
            h_new = h_new.min(h_max);
            if rejected {
                h_new = h_new.min(h);
                rejected = false;
            }
        } else {
            h_new = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
            rejected = true;
        }
        h = h_new;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rotating(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        // dy/dt = -i y with y = re + i im.
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    }

    #[test]
    fn exponential_phase_at_pi() {
        let mut p = OdeProblem::new(2, rotating, 0.0, PI).with_tolerances(1e-10, 1e-12);
        let out = solve_ode(&mut p, &[1.0, 0.0], &[PI]).unwrap();
        let err = ((out[0][0] + 1.0).powi(2) + out[0][1].powi(2)).sqrt();
        assert!(err <= 1e-9, "error {err}");
    }

    #[test]
    fn constant_rhs_gives_constant_snapshots() {
        let mut p = OdeProblem::new(3, |_t, _y: &[f64], dy: &mut [f64]| {
            dy.fill(0.0);
            Ok(())
        }, 0.0, 5.0);
        let out = solve_ode(&mut p, &[1.0, -2.0, 3.5], &[0.0, 1.0, 2.5, 5.0]).unwrap();
        for snap in out {
            assert_eq!(snap, vec![1.0, -2.0, 3.5]);
        }
    }

    #[test]
    fn dense_output_matches_samples() {
        let mut p = OdeProblem::new(2, rotating, 0.0, 10.0);
        let dense = solve_ode_dense(&mut p, &[1.0, 0.0]).unwrap();
        for k in 0..=100 {
            let t = 0.1 * k as f64;
            let y = dense.eval(t).unwrap();
            assert!((y[0] - t.cos()).abs() < 1e-9 && (y[1] + t.sin()).abs() < 1e-9, "t = {t}");
        }
        assert!(dense.eval(10.5).is_err());
    }

    #[test]
    fn blowup_reports_non_finite_or_underflow() {
        // dy/dt = y^2 blows up at t = 1.
        let mut p = OdeProblem::new(1, |_t, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
            Ok(())
        }, 0.0, 2.0);
        let err = solve_ode(&mut p, &[1.0], &[2.0]).unwrap_err();
        assert!(
            matches!(err, Error::StepSizeUnderflow { .. } | Error::NonFiniteState { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn rejects_bad_samples() {
        let mut p = OdeProblem::new(2, rotating, 0.0, 1.0);
        assert!(solve_ode(&mut p, &[1.0, 0.0], &[0.5, 0.2]).is_err());
        assert!(solve_ode(&mut p, &[1.0, 0.0], &[1.5]).is_err());
    }

    #[test]
    fn rhs_errors_propagate() {
        let mut p = OdeProblem::new(1, |t, _y: &[f64], _dy: &mut [f64]| {
            if t > 0.5 {
                Err(Error::InvalidProblem("boom".into()))
            } else {
                Ok(())
            }
        }, 0.0, 1.0);
        assert_eq!(
            solve_ode(&mut p, &[0.0], &[1.0]).unwrap_err(),
            Error::InvalidProblem("boom".into())
        );
    }
}
