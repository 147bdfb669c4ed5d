//! Python bindings. Matrices cross the boundary as nested lists of `complex`
//! (anything with `__complex__` is accepted on input, numpy arrays included).

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsf_core::amplifier::{amplified_rsf as core_amplified_rsf, AmplifierSpec};
use rsf_core::casimir::{self, CasimirScenario, Sigma, VelocityProfile};
use rsf_core::fock_oracle::{self, CatalogCase, FockState, QuadraticHamiltonian};
use rsf_core::kinetics::KineticGenerators;
use rsf_core::numerics::IntegratorOptions;
use rsf_core::rsf::{self as core_rsf, ConjugateField, ReducedField};
use rsf_core::symplectic::BogoliubovMap;
use rsf_core::{CMatrix, CVector, C64};

create_exception!(rsf, RsfError, PyValueError);

fn err(e: rsf_core::Error) -> PyErr {
    RsfError::new_err(e.to_string())
}

type Rows = Vec<Vec<C64>>;

fn to_matrix(rows: Rows) -> PyResult<CMatrix> {
    if rows.is_empty() {
        return Ok(CMatrix::zeros(0, 0));
    }
    CMatrix::from_rows(&rows).map_err(err)
}

fn from_matrix(m: &CMatrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn options(rel_tol: f64, abs_tol: f64) -> IntegratorOptions {
    IntegratorOptions {
        rel_tol,
        abs_tol,
        max_step: None,
    }
}

/// Symplectic matrix `[[X↑, X↓], [X↓*, X↑*]]` split into system and environment modes.
#[pyclass(name = "BogoliubovMap", module = "rsf", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMap(BogoliubovMap);

#[pymethods]
impl PyMap {
    #[staticmethod]
    fn from_blocks(x_up: Rows, x_down: Rows, n_sys: usize, n_env: usize) -> PyResult<Self> {
        BogoliubovMap::from_blocks(&to_matrix(x_up)?, &to_matrix(x_down)?, n_sys, n_env)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn identity(n_sys: usize, n_env: usize) -> Self {
        Self(BogoliubovMap::identity(n_sys, n_env))
    }

    #[staticmethod]
    fn passive(u: Rows, n_sys: usize, n_env: usize) -> PyResult<Self> {
        BogoliubovMap::passive(&to_matrix(u)?, n_sys, n_env).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n_sys, n_env, scale=1.0, seed=0))]
    fn random_passive(n_sys: usize, n_env: usize, scale: f64, seed: u64) -> Self {
        Self(BogoliubovMap::random_passive(n_sys, n_env, scale, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    #[staticmethod]
    #[pyo3(signature = (n_sys, n_env, scale=0.3, seed=0))]
    fn random_symplectic(n_sys: usize, n_env: usize, scale: f64, seed: u64) -> Self {
        Self(BogoliubovMap::random_symplectic(n_sys, n_env, scale, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    #[getter]
    fn n_sys(&self) -> usize {
        self.0.n_sys()
    }

    #[getter]
    fn n_env(&self) -> usize {
        self.0.n_env()
    }

    fn x_up(&self) -> Rows {
        from_matrix(&self.0.x_up())
    }

    fn x_down(&self) -> Rows {
        from_matrix(&self.0.x_down())
    }

    fn matrix(&self) -> Rows {
        from_matrix(self.0.matrix())
    }

    /// `‖X S X† - S‖`.
    fn symplectic_residual(&self) -> f64 {
        self.0.verify_symplectic()
    }

    #[pyo3(signature = (tol=1e-9))]
    fn is_classical_closed(&self, tol: f64) -> bool {
        self.0.is_classical_closed(tol)
    }

    #[pyo3(signature = (tol=1e-9))]
    fn is_classical_open(&self, tol: f64) -> bool {
        self.0.is_classical_open(tol)
    }

    /// `self ∘ other`, i.e. `other` acts first.
    fn compose(&self, other: &PyMap) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(err)
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn repartition(&self, n_sys: usize) -> PyResult<Self> {
        self.0.repartition(n_sys).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("BogoliubovMap(n_sys={}, n_env={})", self.0.n_sys(), self.0.n_env())
    }
}

/// `r_kk' = <a†_k' a_k>` together with the mean field `α`.
#[pyclass(name = "ReducedField", module = "rsf", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyReducedField(ReducedField);

#[pymethods]
impl PyReducedField {
    #[new]
    #[pyo3(signature = (r, alpha=None))]
    fn new(r: Rows, alpha: Option<Vec<C64>>) -> PyResult<Self> {
        let r = to_matrix(r)?;
        let alpha = alpha.map(CVector::new).unwrap_or_else(|| CVector::zeros(r.rows()));
        ReducedField::new(r, alpha).map(Self).map_err(err)
    }

    #[staticmethod]
    fn vacuum(n_modes: usize) -> Self {
        Self(ReducedField::vacuum(n_modes))
    }

    #[staticmethod]
    fn coherent(alpha: Vec<C64>) -> Self {
        Self(ReducedField::coherent(CVector::new(alpha)))
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.0.n_modes()
    }

    fn r(&self) -> Rows {
        from_matrix(self.0.r())
    }

    fn alpha(&self) -> Vec<C64> {
        self.0.alpha().as_slice().to_vec()
    }

    fn occupations(&self) -> Vec<f64> {
        self.0.occupations()
    }

    fn entropy_v(&self) -> PyResult<f64> {
        core_rsf::entropy_v(&self.0).map_err(err)
    }

    fn entropy_w(&self) -> PyResult<f64> {
        core_rsf::entropy_w(&self.0).map_err(err)
    }

    /// `<Σ o_ij a_i† a_j>` for Hermitian `o`.
    fn expect_additive(&self, o: Rows) -> PyResult<f64> {
        core_rsf::expect_additive(&self.0, &to_matrix(o)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ReducedField(n_modes={}, occupations={:?})", self.0.n_modes(), self.0.occupations())
    }
}

/// `c_kk' = <a_k' a_k>` together with `α*`.
#[pyclass(name = "ConjugateField", module = "rsf", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConjugateField(ConjugateField);

#[pymethods]
impl PyConjugateField {
    #[new]
    #[pyo3(signature = (c, alpha_star=None))]
    fn new(c: Rows, alpha_star: Option<Vec<C64>>) -> PyResult<Self> {
        let c = to_matrix(c)?;
        let a = alpha_star.map(CVector::new).unwrap_or_else(|| CVector::zeros(c.rows()));
        ConjugateField::new(c, a).map(Self).map_err(err)
    }

    #[staticmethod]
    fn vacuum(n_modes: usize) -> Self {
        Self(ConjugateField::vacuum(n_modes))
    }

    #[staticmethod]
    fn coherent(alpha: Vec<C64>) -> Self {
        Self(ConjugateField::coherent(&CVector::new(alpha)))
    }

    fn c(&self) -> Rows {
        from_matrix(self.0.c())
    }

    fn alpha_star(&self) -> Vec<C64> {
        self.0.alpha_star().as_slice().to_vec()
    }
}

/// Closed-system RSF after the map.
#[pyfunction]
fn transform_closed(rf: &PyReducedField, cf: &PyConjugateField, map: &PyMap) -> PyResult<PyReducedField> {
    core_rsf::transform_closed(&rf.0, &cf.0, &map.0).map(PyReducedField).map_err(err)
}

/// System RSF after the map, the environment starting in vacuum.
#[pyfunction]
fn transform_open_vacuum_env(rf_sys: &PyReducedField, map: &PyMap) -> PyResult<PyReducedField> {
    core_rsf::transform_open_vacuum_env(&rf_sys.0, &map.0)
        .map(PyReducedField)
        .map_err(err)
}

fn generators_dict<'py>(py: Python<'py>, g: &KineticGenerators) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("h", from_matrix(g.h()))?;
    d.set_item("gamma_up", from_matrix(g.gamma_up()))?;
    d.set_item("gamma_down", from_matrix(g.gamma_down()))?;
    d.set_item("zeta", g.zeta().as_slice().to_vec())?;
    Ok(d)
}

/// One mode pair `(R, k) ⊕ (L, -k)` of a medium moving with speed `β(t)`.
#[pyclass(name = "CasimirScenario", module = "rsf", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScenario(CasimirScenario);

#[pymethods]
impl PyScenario {
    /// `profile` is one of `constant`, `sinusoid`, `smooth_pulse`, `linear_ramp_windowed`;
    /// `sigma=None` picks the automatic normalization.
    #[new]
    #[pyo3(signature = (
        refractive_index, omega, theta, t_end, profile="constant", beta0=0.0,
        drive_frequency=None, duration=None, ramp_time=None, window_end=None, sigma=None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        refractive_index: f64,
        omega: f64,
        theta: f64,
        t_end: f64,
        profile: &str,
        beta0: f64,
        drive_frequency: Option<f64>,
        duration: Option<f64>,
        ramp_time: Option<f64>,
        window_end: Option<f64>,
        sigma: Option<f64>,
    ) -> PyResult<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| RsfError::new_err(format!("profile {profile:?} needs {name}")))
        };
        let profile = match profile {
            "constant" => VelocityProfile::Constant { beta0 },
            "sinusoid" => VelocityProfile::Sinusoid {
                beta0,
                drive_frequency: need(drive_frequency, "drive_frequency")?,
            },
            "smooth_pulse" => VelocityProfile::SmoothPulse {
                beta0,
                duration: need(duration, "duration")?,
            },
            "linear_ramp_windowed" => VelocityProfile::LinearRampWindowed {
                beta0,
                ramp_time: need(ramp_time, "ramp_time")?,
                window_end: need(window_end, "window_end")?,
            },
            other => return Err(RsfError::new_err(format!("unknown profile {other:?}"))),
        };
        let s = CasimirScenario {
            refractive_index,
            omega,
            theta,
            sigma: sigma.map_or(Sigma::Auto, Sigma::Explicit),
            profile,
            t_end,
        };
        s.validate().map_err(err)?;
        Ok(Self(s))
    }

    fn beta(&self, t: f64) -> f64 {
        self.0.profile.beta(t)
    }

    fn dressed_frequency(&self, beta: f64) -> f64 {
        self.0.dressed_frequency(beta)
    }

    fn sigma_value(&self) -> f64 {
        self.0.sigma_value()
    }

    fn endpoint_velocity_mismatch(&self) -> bool {
        self.0.endpoint_velocity_mismatch()
    }
}

#[pyclass(name = "ModeSolution", module = "rsf", frozen, skip_from_py_object)]
struct PySolution(casimir::ModeSolution);

#[pymethods]
impl PySolution {
    fn times(&self) -> Vec<f64> {
        self.0.times().to_vec()
    }

    /// `|f_R-(T)|²` at every sample.
    fn photon_density(&self) -> Vec<f64> {
        self.0.states().iter().map(|s| s.f_rm.norm_sqr()).collect()
    }

    /// `(f_R+, f_R-, f_L+, f_L-, φ)` at sample `index`.
    fn mode_functions(&self, index: usize) -> PyResult<(C64, C64, C64, C64, f64)> {
        let s = self.0.state(index).map_err(err)?;
        Ok((s.f_rp, s.f_rm, s.f_lp, s.f_lm, s.phi))
    }

    fn max_ccr_residual(&self) -> f64 {
        self.0.max_ccr_residual()
    }

    fn max_helicity_residual(&self) -> f64 {
        self.0.max_helicity_residual()
    }

    fn map(&self, index: usize) -> PyResult<PyMap> {
        casimir::casimir_map(&self.0, index).map(PyMap).map_err(err)
    }

    fn closed_form_generators<'py>(&self, py: Python<'py>, index: usize) -> PyResult<Bound<'py, PyDict>> {
        let g = casimir::casimir_generators_closed_form(&self.0, index).map_err(err)?;
        generators_dict(py, &g)
    }

    /// Generic open extraction; adds `y_r`, `d` and `w` to the generator dict.
    fn extract_generators<'py>(&self, py: Python<'py>, index: usize) -> PyResult<Bound<'py, PyDict>> {
        let ex = casimir::extract_casimir_generators(&self.0, index).map_err(err)?;
        let d = generators_dict(py, &ex.generators)?;
        d.set_item("y_r", from_matrix(&ex.y_r))?;
        d.set_item("d", from_matrix(&ex.d))?;
        d.set_item("w", from_matrix(&ex.w))?;
        Ok(d)
    }

    #[pyo3(signature = (step=None))]
    fn growth_law<'py>(&self, py: Python<'py>, step: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
        let step = step.unwrap_or_else(|| casimir::default_growth_step(self.0.scenario()));
        let rep = casimir::growth_law_residual(&self.0, step).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("dn_dt", rep.dn_dt)?;
        d.set_item("gamma_up", rep.gamma_up)?;
        d.set_item("residuals", rep.residuals)?;
        d.set_item("max_residual", rep.max_residual)?;
        d.set_item("max_abs_dn_dt", rep.max_abs_dn_dt)?;
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Integrates the mode equations; `samples` is a count of uniform samples on `[0, t_end]`.
#[pyfunction]
#[pyo3(signature = (scenario, samples=201, rel_tol=1e-10, abs_tol=1e-12))]
fn solve_modes(scenario: &PyScenario, samples: usize, rel_tol: f64, abs_tol: f64) -> PyResult<PySolution> {
    let ts = casimir::uniform_samples(scenario.0.t_end, samples);
    casimir::solve_modes(&scenario.0, &ts, options(rel_tol, abs_tol))
        .map(PySolution)
        .map_err(err)
}

/// Closed-form RSF of independent phase-insensitive amplifiers at time `t`.
#[pyfunction]
fn amplified_rsf(kappa: Vec<f64>, m: Vec<f64>, rf0: &PyReducedField, t: f64) -> PyResult<PyReducedField> {
    let spec = AmplifierSpec::new(kappa, m).map_err(err)?;
    core_amplified_rsf(&spec, &rf0.0, t).map(PyReducedField).map_err(err)
}

/// Two-mode Hamiltonian `p0 a†a + p1 b†b + p2(a†b+ab†) + p3 i(a†b-ab†) + q0(a†b†+ab) + q1 i(a†b†-ab)`.
#[pyclass(name = "QuadraticHamiltonian", module = "rsf", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHamiltonian(QuadraticHamiltonian);

#[pymethods]
impl PyHamiltonian {
    #[new]
    #[pyo3(signature = (passive=[0.0; 4], active=[0.0; 2]))]
    fn new(passive: [f64; 4], active: [f64; 2]) -> Self {
        Self(QuadraticHamiltonian { passive, active })
    }

    #[staticmethod]
    fn beam_splitter(theta: f64) -> Self {
        Self(QuadraticHamiltonian::beam_splitter(theta))
    }

    #[staticmethod]
    fn two_mode_squeeze(r: f64) -> Self {
        Self(QuadraticHamiltonian::two_mode_squeeze(r))
    }

    /// Exact Bogoliubov map of the evolution for time `t`.
    fn heisenberg_map(&self, t: f64) -> PyResult<PyMap> {
        fock_oracle::heisenberg_map(&self.0, t).map(PyMap).map_err(err)
    }
}

/// Two-mode state truncated at `n_max` quanta per mode.
#[pyclass(name = "FockState", module = "rsf", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFockState(FockState);

#[pymethods]
impl PyFockState {
    #[staticmethod]
    fn vacuum(n_max: usize) -> Self {
        Self(FockState::vacuum(n_max))
    }

    #[staticmethod]
    fn number(n_max: usize, n1: usize, n2: usize) -> PyResult<Self> {
        FockState::number(n_max, n1, n2).map(Self).map_err(err)
    }

    #[staticmethod]
    fn coherent(n_max: usize, z1: C64, z2: C64) -> Self {
        Self(FockState::coherent(n_max, z1, z2))
    }

    fn amplitude(&self, n1: usize, n2: usize) -> C64 {
        self.0.amplitude(n1, n2)
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn truncation_witness(&self) -> f64 {
        self.0.truncation_witness()
    }

    fn evolve(&self, hamiltonian: &PyHamiltonian, t: f64) -> PyResult<Self> {
        fock_oracle::evolve(&self.0, &hamiltonian.0, t).map(Self).map_err(err)
    }

    /// `(ReducedField, ConjugateField)` measured on the state.
    fn measure_rsf(&self) -> PyResult<(PyReducedField, PyConjugateField)> {
        let (r, c) = fock_oracle::measure_rsf(&self.0).map_err(err)?;
        Ok((PyReducedField(r), PyConjugateField(c)))
    }
}

/// Runs the Fock-space cross-check on the named catalog case (`all` for every case).
#[pyfunction]
#[pyo3(signature = (case="all", n_max=fock_oracle::DEFAULT_N_MAX))]
fn fock_check<'py>(py: Python<'py>, case: &str, n_max: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cases: Vec<CatalogCase> = match case {
        "all" => fock_oracle::catalog(),
        "identity" => vec![fock_oracle::identity_case()],
        "beam-splitter" => vec![fock_oracle::beam_splitter_case(0.7)],
        "squeeze" => vec![fock_oracle::squeeze_case(0.3)],
        other => return Err(RsfError::new_err(format!("unknown case {other:?}"))),
    };
    let mut out = Vec::new();
    for c in &cases {
        let psi = c.initial_state(n_max).map_err(err)?;
        let rep = fock_oracle::oracle_check_transform(c, &psi).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("name", c.name)?;
        d.set_item("deviation", rep.deviation)?;
        d.set_item("threshold", rep.threshold)?;
        d.set_item("truncation_witness", rep.truncation_witness)?;
        d.set_item("norm_drift", rep.norm_drift)?;
        d.set_item("passed", rep.passed())?;
        out.push(d);
    }
    Ok(out)
}

#[pymodule]
fn rsf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RsfError", m.py().get_type::<RsfError>())?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyReducedField>()?;
    m.add_class::<PyConjugateField>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyFockState>()?;
    m.add_function(wrap_pyfunction!(transform_closed, m)?)?;
    m.add_function(wrap_pyfunction!(transform_open_vacuum_env, m)?)?;
    m.add_function(wrap_pyfunction!(solve_modes, m)?)?;
    m.add_function(wrap_pyfunction!(amplified_rsf, m)?)?;
    m.add_function(wrap_pyfunction!(fock_check, m)?)?;
    Ok(())
}
