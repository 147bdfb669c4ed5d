//! Reduced kinetic equations and generator extraction from smooth Bogoliubov families.

use crate::error::{Error, Result};
use crate::numerics::{
    central_difference, hermitian_eigenvalues, hermitian_tol, pack_complex, solve_ode, CMatrix, CVector,
    IntegratorOptions, OdeProblem, C64,
};
use crate::rsf::ReducedField;

pub const UNITARITY_TOL: f64 = 1e-10;
pub const RATE_SUM_TOL: f64 = 1e-12;
/// PSD drift allowed on integrated snapshots before [`Error::PhysicalityLost`].
pub const DRIFT_TOL: f64 = 1e-6;
/// Largest condition estimate accepted when inverting `X_up` or `X_up_S`.
pub const MAX_CONDITION: f64 = 1e12;
/// Unitarity tolerance for families handed to [`extract_closed_generator`].
pub const CLOSED_FAMILY_TOL: f64 = 1e-8;

/// Rate `η` attached to a unitary `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer {
    pub eta: f64,
    pub u: CMatrix,
}

/// `(h, ζ, γ↑, γ↓, {η_j, u_j})`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticGenerators {
    h: CMatrix,
    zeta: CVector,
    gamma_up: CMatrix,
    gamma_down: CMatrix,
    scatterers: Vec<Scatterer>,
}

impl KineticGenerators {
    /// Validates Hermiticity, unitarity of the scatterers and `Σ η_j = 1`.
    /// Positivity of the rates is not enforced; see [`KineticGenerators::psd_witnesses`].
    pub fn new(
        h: CMatrix,
        zeta: CVector,
        gamma_up: CMatrix,
        gamma_down: CMatrix,
        scatterers: Vec<Scatterer>,
    ) -> Result<Self> {
        let n = zeta.dim();
        for (name, m) in [("h", &h), ("gamma_up", &gamma_up), ("gamma_down", &gamma_down)] {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {:?}, expected {n}x{n}",
                    m.shape()
                )));
            }
            let residual = m.hermitian_residual();
            if residual > hermitian_tol(m) {
                return Err(Error::InvalidGenerators(format!(
                    "{name} is not Hermitian (residual {residual:.3e})"
                )));
            }
        }
        let mut eta_sum = 0.0;
        for (j, s) in scatterers.iter().enumerate() {
            if s.u.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!("u_{j} is {:?}", s.u.shape())));
            }
            if !(s.eta >= 0.0) {
                return Err(Error::InvalidGenerators(format!("eta_{j} = {} is negative", s.eta)));
            }
            let residual = (&s.u * &s.u.adjoint()).max_abs_diff(&CMatrix::identity(n));
            if residual > UNITARITY_TOL {
                return Err(Error::InvalidGenerators(format!(
                    "u_{j} is not unitary (residual {residual:.3e})"
                )));
            }
            eta_sum += s.eta;
        }
        if !scatterers.is_empty() && (eta_sum - 1.0).abs() > RATE_SUM_TOL {
            return Err(Error::InvalidGenerators(format!("scatterer rates sum to {eta_sum}, not 1")));
        }
        Ok(Self {
            h: h.hermitian_part(),
            zeta,
            gamma_up: gamma_up.hermitian_part(),
            gamma_down: gamma_down.hermitian_part(),
            scatterers,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            h: CMatrix::zeros(n, n),
            zeta: CVector::zeros(n),
            gamma_up: CMatrix::zeros(n, n),
            gamma_down: CMatrix::zeros(n, n),
            scatterers: Vec::new(),
        }
    }

    /// `h`, `γ↑` and `γ↓` only.
    pub fn from_rates(h: CMatrix, gamma_up: CMatrix, gamma_down: CMatrix) -> Result<Self> {
        let n = h.rows();
        Self::new(h, CVector::zeros(n), gamma_up, gamma_down, Vec::new())
    }

    pub fn n_modes(&self) -> usize {
        self.zeta.dim()
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn zeta(&self) -> &CVector {
        &self.zeta
    }

    pub fn gamma_up(&self) -> &CMatrix {
        &self.gamma_up
    }

    pub fn gamma_down(&self) -> &CMatrix {
        &self.gamma_down
    }

    pub fn scatterers(&self) -> &[Scatterer] {
        &self.scatterers
    }

    /// Smallest eigenvalues of `(γ↑, γ↓)`.
    pub fn psd_witnesses(&self) -> Result<(f64, f64)> {
        Ok((
            hermitian_eigenvalues(&self.gamma_up)?[0],
            hermitian_eigenvalues(&self.gamma_down)?[0],
        ))
    }
}

/// Right-hand side of the reduced kinetic equations at `(r, α)`.
pub fn kinetic_rhs(rf: &ReducedField, gen: &KineticGenerators) -> Result<(CMatrix, CVector)> {
    if rf.n_modes() != gen.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "RSF has {} modes, generators {}",
            rf.n_modes(),
            gen.n_modes()
        )));
    }
    Ok(rhs_raw(rf.r(), rf.alpha(), gen))
}

fn rhs_raw(r: &CMatrix, alpha: &CVector, gen: &KineticGenerators) -> (CMatrix, CVector) {
    let n = alpha.dim();
    let minus_i = C64::new(0.0, -1.0);
    let net = &gen.gamma_up - &gen.gamma_down;

    let mut dr = (&(&gen.h * r) - &(r * &gen.h)).scale(minus_i);
    dr += &gen.zeta.outer(alpha);
    dr += &alpha.outer(&gen.zeta);
    dr += &(&(&net * r) + &(r * &net)).scale_real(0.5);
    dr += &gen.gamma_up;

    let h_alpha = gen.h.matvec(alpha).expect("dimensions checked");
    let net_alpha = net.matvec(alpha).expect("dimensions checked");
    let mut da: Vec<C64> = (0..n)
        .map(|k| minus_i * h_alpha[k] + 0.5 * net_alpha[k] + gen.zeta[k])
        .collect();

    for s in &gen.scatterers {
        let scattered = &(&(&s.u * r) * &s.u.adjoint()) - r;
        dr += &scattered.scale_real(s.eta);
        let ua = s.u.matvec(alpha).expect("dimensions checked");
        for k in 0..n {
            da[k] += s.eta * (ua[k] - alpha[k]);
        }
    }
    (dr, CVector::new(da))
}

/// Integrates the kinetic equations from `rf0` at `t0`, with generators evaluated inside the
/// integrator. Returns one snapshot per entry of `samples`.
pub fn integrate_kinetics<G>(
    rf0: &ReducedField,
    mut gen: G,
    t0: f64,
    t1: f64,
    samples: &[f64],
    options: IntegratorOptions,
) -> Result<Vec<ReducedField>>
where
    G: FnMut(f64) -> Result<KineticGenerators>,
{
    let n = rf0.n_modes();
    let nr = n * n;
    let dim = 2 * (nr + n);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (r, alpha) = unpack_state(y, n);
        let g = gen(t)?;
        if g.n_modes() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator callback returned {} modes, state has {n}",
                g.n_modes()
            )));
        }
        let (dr, da) = rhs_raw(&r, &alpha, &g);
        pack_complex(dr.as_slice(), &mut dy[..2 * nr]);
        pack_complex(da.as_slice(), &mut dy[2 * nr..]);
        Ok(())
    };
    let mut problem = options.apply(OdeProblem::new(dim, rhs, t0, t1));
    let mut y0 = vec![0.0; dim];
    pack_complex(rf0.r().as_slice(), &mut y0[..2 * nr]);
    pack_complex(rf0.alpha().as_slice(), &mut y0[2 * nr..]);
    let states = solve_ode(&mut problem, &y0, samples)?;

    samples
        .iter()
        .zip(states)
        .map(|(&t, y)| {
            let (r, alpha) = unpack_state(&y, n);
            let r = r.hermitian_part();
            let min = hermitian_eigenvalues(&r)?[0];
            if min < -DRIFT_TOL * (1.0 + r.max_abs()) {
                return Err(Error::PhysicalityLost { t, min_eigenvalue: min });
            }
            ReducedField::with_tolerance(r, alpha, DRIFT_TOL)
        })
        .collect()
}

fn unpack_state(y: &[f64], n: usize) -> (CMatrix, CVector) {
    let nr = n * n;
    let z = crate::numerics::unpack_complex(y);
    let r = CMatrix::from_vec(n, n, z[..nr].to_vec()).expect("state layout");
    (r, CVector::new(z[nr..].to_vec()))
}

/// A matrix-valued function of time with a derivative.
pub trait SmoothFamily {
    fn value(&self, t: f64) -> Result<CMatrix>;
    fn derivative(&self, t: f64) -> Result<CMatrix>;
}

/// Family given by a closure; derivatives by central differences with step `step`.
pub struct FnFamily<F> {
    f: F,
    step: f64,
}

impl<F> FnFamily<F>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    pub fn new(f: F, step: f64) -> Self {
        Self { f, step }
    }
}

impl<F> SmoothFamily for FnFamily<F>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    fn value(&self, t: f64) -> Result<CMatrix> {
        (self.f)(t)
    }

    fn derivative(&self, t: f64) -> Result<CMatrix> {
        central_difference(&self.f, t, self.step)
    }
}

/// Family with a closed-form derivative.
pub struct AnalyticFamily<F, D> {
    f: F,
    df: D,
}

impl<F, D> AnalyticFamily<F, D>
where
    F: Fn(f64) -> Result<CMatrix>,
    D: Fn(f64) -> Result<CMatrix>,
{
    pub fn new(f: F, df: D) -> Self {
        Self { f, df }
    }
}

impl<F, D> SmoothFamily for AnalyticFamily<F, D>
where
    F: Fn(f64) -> Result<CMatrix>,
    D: Fn(f64) -> Result<CMatrix>,
{
    fn value(&self, t: f64) -> Result<CMatrix> {
        (self.f)(t)
    }

    fn derivative(&self, t: f64) -> Result<CMatrix> {
        (self.df)(t)
    }
}

/// `h = (i/2)(dX X⁻¹ - X⁻† dX†)` for a unitary family `X_up(t)`.
pub fn extract_closed_generator(x_up: &impl SmoothFamily, t: f64) -> Result<CMatrix> {
    let x = x_up.value(t)?;
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!("X_up is {:?}", x.shape())));
    }
    let residual = (&x * &x.adjoint()).max_abs_diff(&CMatrix::identity(x.rows()));
    if residual > CLOSED_FAMILY_TOL {
        return Err(Error::NotClassicalClosed { residual });
    }
    let dx = x_up.derivative(t)?;
    let x_inv = x.inverse_checked(MAX_CONDITION)?;
    let a = dx.matmul(&x_inv)?;
    let b = x_inv.adjoint().matmul(&dx.adjoint())?;
    Ok((&a - &b).scale(C64::new(0.0, 0.5)).hermitian_part())
}

/// Generators together with the intermediate matrices of the open extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenExtraction {
    pub generators: KineticGenerators,
    pub y: CMatrix,
    pub y_r: CMatrix,
    pub y_i: CMatrix,
    pub d: CMatrix,
    pub w: CMatrix,
}

/// `Y = dX_up_S X_up_S⁻¹`, `D = X_down_C X_down_C†`, `W = dD - Y D - D Y†`,
/// `h = -Y_i / 2`, `γ↑ = W`, `γ↓ = W - Y_r`.
pub fn extract_open_generators(
    x_up_s: &impl SmoothFamily,
    x_down_c: &impl SmoothFamily,
    t: f64,
) -> Result<OpenExtraction> {
    let xs = x_up_s.value(t)?;
    let xc = x_down_c.value(t)?;
    let n = xs.rows();
    if !xs.is_square() || xc.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "X_up_S is {:?}, X_down_C is {:?}",
            xs.shape(),
            xc.shape()
        )));
    }
    let dxs = x_up_s.derivative(t)?;
    let dxc = x_down_c.derivative(t)?;
    if dxs.shape() != xs.shape() || dxc.shape() != xc.shape() {
        return Err(Error::DerivativeUnavailable {
            t,
            reason: "derivative shape differs from the family".into(),
        });
    }
    if !dxs.is_finite() || !dxc.is_finite() {
        return Err(Error::DerivativeUnavailable {
            t,
            reason: "non-finite derivative".into(),
        });
    }

    let y = dxs.matmul(&xs.inverse_checked(MAX_CONDITION)?)?;
    let y_adj = y.adjoint();
    let y_r = &y + &y_adj;
    let y_i = (&y - &y_adj).scale(C64::new(0.0, -1.0));
    let xc_adj = xc.adjoint();
    let d = xc.matmul(&xc_adj)?;
    let dd = &dxc.matmul(&xc_adj)? + &xc.matmul(&dxc.adjoint())?;
    let w = (&(&dd - &(&y * &d)) - &(&d * &y_adj)).hermitian_part();
    let y_r = y_r.hermitian_part();
    let y_i = y_i.hermitian_part();

    let h = y_i.scale_real(-0.5);
    let gamma_down = &w - &y_r;
    let generators = KineticGenerators::from_rates(h, w.clone(), gamma_down)?;
    Ok(OpenExtraction {
        generators,
        y,
        y_r,
        y_i,
        d: d.hermitian_part(),
        w,
    })
}

/// Generators sampled on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorTrajectory {
    times: Vec<f64>,
    generators: Vec<KineticGenerators>,
}

impl GeneratorTrajectory {
    pub fn new(times: Vec<f64>, generators: Vec<KineticGenerators>) -> Result<Self> {
        if times.len() != generators.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times but {} generator snapshots",
                times.len(),
                generators.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGenerators("trajectory times must be strictly ascending".into()));
        }
        Ok(Self { times, generators })
    }

    pub fn sample(times: &[f64], mut f: impl FnMut(f64) -> Result<KineticGenerators>) -> Result<Self> {
        let generators = times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times.to_vec(), generators)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn generators(&self) -> &[KineticGenerators] {
        &self.generators
    }
}

/// Per-snapshot validity data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityEntry {
    pub t: f64,
    pub min_gamma_up: f64,
    pub min_gamma_down: f64,
    pub hermiticity_residual: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub entries: Vec<ValidityEntry>,
    pub valid: bool,
    /// Time and value of the smallest rate eigenvalue over the run.
    pub worst: Option<(f64, f64)>,
}

/// Relative tolerance of the positivity verdict.
pub const VALIDITY_TOL: f64 = 1e-10;

pub fn validity_report(traj: &GeneratorTrajectory) -> ValidityReport {
    let mut entries = Vec::with_capacity(traj.times.len());
    let mut worst: Option<(f64, f64)> = None;
    for (&t, g) in traj.times.iter().zip(&traj.generators) {
        let (min_up, min_down) = g.psd_witnesses().unwrap_or((f64::NAN, f64::NAN));
        let hermiticity_residual = g
            .h
            .hermitian_residual()
            .max(g.gamma_up.hermitian_residual())
            .max(g.gamma_down.hermitian_residual());
        let ok_up = min_up >= -VALIDITY_TOL * (1.0 + g.gamma_up.max_abs());
        let ok_down = min_down >= -VALIDITY_TOL * (1.0 + g.gamma_down.max_abs());
        let m = min_up.min(min_down);
        if worst.map_or(true, |(_, w)| m < w) {
            worst = Some((t, m));
        }
        entries.push(ValidityEntry {
            t,
            min_gamma_up: min_up,
            min_gamma_down: min_down,
            hermiticity_residual,
            valid: ok_up && ok_down,
        });
    }
    ValidityReport {
        valid: entries.iter().all(|e| e.valid),
        entries,
        worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> CMatrix {
        CMatrix::diag_real(&[x])
    }

    fn rotation(theta: f64) -> CMatrix {
        CMatrix::from_real_rows(&[vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]).unwrap()
    }

    #[test]
    fn zero_generators_give_zero_rhs() {
        let rf = ReducedField::new(CMatrix::diag_real(&[0.3, 0.1]), CVector::from_real(&[0.2, 0.0])).unwrap();
        let (dr, da) = kinetic_rhs(&rf, &KineticGenerators::zeros(2)).unwrap();
        assert_eq!(dr.max_abs(), 0.0);
        assert_eq!(da.max_abs(), 0.0);
    }

    #[test]
    fn commuting_hamiltonian_leaves_r_fixed() {
        let rf = ReducedField::new(CMatrix::diag_real(&[0.3, 0.1]), CVector::zeros(2)).unwrap();
        let gen = KineticGenerators::from_rates(CMatrix::diag_real(&[1.0, 2.0]), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2))
            .unwrap();
        assert_eq!(kinetic_rhs(&rf, &gen).unwrap().0.max_abs(), 0.0);
    }

    #[test]
    fn scalar_amplifier_rhs() {
        let (kappa, m, r0) = (0.7, 0.4, 1.3);
        let gen = KineticGenerators::from_rates(s(0.0), s(2.0 * kappa * (1.0 + m)), s(2.0 * kappa * m)).unwrap();
        let rf = ReducedField::new(s(r0), CVector::zeros(1)).unwrap();
        let dr = kinetic_rhs(&rf, &gen).unwrap().0;
        assert!((dr[(0, 0)].re - (2.0 * kappa * r0 + 2.0 * kappa * (1.0 + m))).abs() < 1e-14);
    }

    #[test]
    fn generator_validation() {
        let nonh = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            KineticGenerators::from_rates(nonh, CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)),
            Err(Error::InvalidGenerators(_))
        ));
        let sc = |eta: f64, u: CMatrix| Scatterer { eta, u };
        let mk = |list| KineticGenerators::new(CMatrix::zeros(2, 2), CVector::zeros(2), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2), list);
        assert!(mk(vec![sc(0.5, rotation(0.1)), sc(0.5, CMatrix::identity(2))]).is_ok());
        assert!(matches!(mk(vec![sc(0.7, rotation(0.1))]), Err(Error::InvalidGenerators(_))));
        assert!(matches!(
            mk(vec![sc(1.0, CMatrix::identity(2).scale_real(1.1))]),
            Err(Error::InvalidGenerators(_))
        ));
        assert!(matches!(
            mk(vec![sc(-0.5, rotation(0.1)), sc(1.5, rotation(0.2))]),
            Err(Error::InvalidGenerators(_))
        ));
    }

    #[test]
    fn amplifier_integration_matches_closed_form() {
        let gen = KineticGenerators::from_rates(s(0.0), s(2.0), s(0.0)).unwrap();
        let out = integrate_kinetics(
            &ReducedField::vacuum(1),
            |_| Ok(gen.clone()),
            0.0,
            1.0,
            &[1.0],
            IntegratorOptions::default(),
        )
        .unwrap();
        let r = out[0].r()[(0, 0)].re;
        assert!((r - (1f64.exp().powi(2) - 1.0)).abs() < 1e-8 * r);
        assert!((r - 6.389_056_1).abs() < 1e-7);
    }

    #[test]
    fn zero_generators_keep_state() {
        let rf = ReducedField::new(CMatrix::diag_real(&[0.3]), CVector::from_real(&[0.1])).unwrap();
        let out = integrate_kinetics(&rf, |_| Ok(KineticGenerators::zeros(1)), 0.0, 2.0, &[0.0, 1.0, 2.0], IntegratorOptions::default())
            .unwrap();
        assert!(out.iter().all(|x| x == &rf));
    }

    #[test]
    fn lost_physicality_is_reported() {
        // A negative creation rate drains r below zero.
        let gen = KineticGenerators::from_rates(s(0.0), s(-1.0), s(-1.0)).unwrap();
        let err = integrate_kinetics(
            &ReducedField::vacuum(1),
            |_| Ok(gen.clone()),
            0.0,
            1.0,
            &[0.5, 1.0],
            IntegratorOptions::default(),
        );
        assert!(matches!(err, Err(Error::PhysicalityLost { t, .. }) if t == 0.5));
    }

    #[test]
    fn closed_extraction_phase_rotation() {
        let omega = 1.7;
        let fam = AnalyticFamily::new(
            |t: f64| Ok(CMatrix::scalar(C64::from_polar(1.0, -omega * t))),
            |t: f64| Ok(CMatrix::scalar(C64::new(0.0, -omega) * C64::from_polar(1.0, -omega * t))),
        );
        let h = extract_closed_generator(&fam, 0.4).unwrap();
        assert!((h[(0, 0)] - omega).norm() < 1e-14);

        let (w1, w2) = (0.5, 2.5);
        let diag = FnFamily::new(
            |t: f64| Ok(CMatrix::diag(&[C64::from_polar(1.0, -w1 * t), C64::from_polar(1.0, -w2 * t)])),
            1e-4,
        );
        let h = extract_closed_generator(&diag, 1.1).unwrap();
        assert!(h.max_abs_diff(&CMatrix::diag_real(&[w1, w2])) < 1e-7);
    }

    #[test]
    fn closed_extraction_planar_rotation() {
        let analytic = AnalyticFamily::new(
            |t: f64| Ok(rotation(0.1 * t * t)),
            |t: f64| {
                let th = 0.1 * t * t;
                let dth = 0.2 * t;
                Ok(CMatrix::from_real_rows(&[vec![-th.sin(), -th.cos()], vec![th.cos(), -th.sin()]])
                    .unwrap()
                    .scale_real(dth))
            },
        );
        let numeric = FnFamily::new(|t: f64| Ok(rotation(0.1 * t * t)), 1e-4);
        for &t in &[0.3, 1.0, 2.2] {
            let ha = extract_closed_generator(&analytic, t).unwrap();
            let hn = extract_closed_generator(&numeric, t).unwrap();
            assert!(ha.hermitian_residual() < 1e-15);
            assert!(ha.max_abs_diff(&hn) < 1e-6);
            // h = -θ'(t) σ_y for a real rotation.
            assert!((ha[(0, 1)] - C64::new(0.0, -0.2 * t)).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_extraction_rejects_non_unitary() {
        let fam = FnFamily::new(|t: f64| Ok(s(t.cosh())), 1e-4);
        assert!(matches!(
            extract_closed_generator(&fam, 0.5),
            Err(Error::NotClassicalClosed { .. })
        ));
    }

    #[test]
    fn open_extraction_scalar_amplifier() {
        let kappa = 0.8;
        let up = AnalyticFamily::new(
            |t: f64| Ok(s((kappa * t).cosh())),
            |t: f64| Ok(s(kappa * (kappa * t).sinh())),
        );
        let down = AnalyticFamily::new(
            |t: f64| Ok(s((kappa * t).sinh())),
            |t: f64| Ok(s(kappa * (kappa * t).cosh())),
        );
        for &t in &[0.0, 0.4, 1.3] {
            let ex = extract_open_generators(&up, &down, t).unwrap();
            let expected = 2.0 * kappa * (kappa * t).tanh();
            assert!((ex.y_r[(0, 0)].re - expected).abs() < 1e-14);
            assert!((ex.w[(0, 0)].re - expected).abs() < 1e-14);
            assert!((ex.generators.gamma_up()[(0, 0)].re - expected).abs() < 1e-14);
            assert!(ex.generators.gamma_down().max_abs() < 1e-14);
            assert!(ex.generators.h().max_abs() < 1e-15);
        }
    }

    #[test]
    fn open_extraction_passive_phase() {
        let omega = 2.0;
        let up = FnFamily::new(|t: f64| Ok(CMatrix::scalar(C64::from_polar(1.0, -omega * t))), 1e-4);
        let down = FnFamily::new(|_t: f64| Ok(s(0.0)), 1e-4);
        let ex = extract_open_generators(&up, &down, 0.7).unwrap();
        assert!((ex.generators.h()[(0, 0)].re - omega).abs() < 1e-7);
        assert!(ex.generators.gamma_up().max_abs() < 1e-15);
        assert!(ex.generators.gamma_down().max_abs() < 1e-7);
    }

    #[test]
    fn open_extraction_singular_and_bad_step() {
        let up = FnFamily::new(|_t: f64| Ok(s(0.0)), 1e-4);
        let down = FnFamily::new(|_t: f64| Ok(s(1.0)), 1e-4);
        assert!(matches!(
            extract_open_generators(&up, &down, 0.0),
            Err(Error::SingularMatrix { .. })
        ));
        let up = FnFamily::new(|_t: f64| Ok(s(1.0)), 0.0);
        assert!(matches!(
            extract_open_generators(&up, &down, 0.0),
            Err(Error::DerivativeUnavailable { .. })
        ));
    }

    #[test]
    fn closed_round_trip() {
        let x = |t: f64| rotation(0.1 * t * t);
        let fam = FnFamily::new(|t: f64| Ok(x(t)), 1e-4);
        let r0 = CMatrix::from_rows(&[
            vec![C64::new(0.8, 0.0), C64::new(0.1, 0.2)],
            vec![C64::new(0.1, -0.2), C64::new(0.3, 0.0)],
        ])
        .unwrap();
        let rf0 = ReducedField::new(r0.clone(), CVector::zeros(2)).unwrap();
        let samples = [0.25, 0.5, 1.0];
        let out = integrate_kinetics(
            &rf0,
            |t| {
                let h = extract_closed_generator(&fam, t)?;
                KineticGenerators::from_rates(h, CMatrix::zeros(2, 2), CMatrix::zeros(2, 2))
            },
            0.0,
            1.0,
            &samples,
            IntegratorOptions::default(),
        )
        .unwrap();
        for (t, rf) in samples.iter().zip(&out) {
            let expected = &(&x(*t) * &r0) * &x(*t).adjoint();
            assert!(rf.r().max_abs_diff(&expected) < 1e-7);
        }
    }

    #[test]
    fn validity_reports() {
        let zero = GeneratorTrajectory::sample(&[0.0, 1.0], |_| Ok(KineticGenerators::zeros(2))).unwrap();
        let rep = validity_report(&zero);
        assert!(rep.valid);
        assert_eq!(rep.entries.len(), 2);

        let traj = GeneratorTrajectory::sample(&[0.0, 1.0, 2.0], |t| {
            KineticGenerators::from_rates(s(0.0), s(1.0 - t), s(0.0))
        })
        .unwrap();
        let rep = validity_report(&traj);
        assert!(!rep.valid);
        assert_eq!(rep.worst, Some((2.0, -1.0)));
        assert!(rep.entries[0].valid && rep.entries[1].valid && !rep.entries[2].valid);

        assert!(GeneratorTrajectory::new(vec![1.0, 1.0], vec![KineticGenerators::zeros(1); 2]).is_err());
    }
}
