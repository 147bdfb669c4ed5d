//! Reduced state of the field `(r, α)`, its conjugate `(c, α*)` and the generalized field `(g, A)`.

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, hermitian_eigenvalues, hermitian_tol, CMatrix, CVector, C64};
use crate::symplectic::{BogoliubovMap, CLASSICALITY_TOL};

/// Physicality tolerance applied at construction and after transforms.
pub const PHYSICALITY_TOL: f64 = 1e-8;
/// Tolerance of the block-structure check on transformed generalized fields.
pub const STRUCTURE_TOL: f64 = 1e-8;

/// `r_{kk'} = <a†_{k'} a_k>`, `α_k = <a_k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedField {
    r: CMatrix,
    alpha: CVector,
}

/// `c_{kk'} = <a_{k'} a_k>` together with `α*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateField {
    c: CMatrix,
    alpha_star: CVector,
}

/// `g = [[r, c], [c*, rᵀ + 1]]`, `A = α ⊕ α*`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedField {
    g: CMatrix,
    a_vec: CVector,
}

impl ReducedField {
    /// Checks `r = r†` and `r >= 0` within [`PHYSICALITY_TOL`].
    pub fn new(r: CMatrix, alpha: CVector) -> Result<Self> {
        Self::with_tolerance(r, alpha, PHYSICALITY_TOL)
    }

    pub fn with_tolerance(r: CMatrix, alpha: CVector, psd_tol: f64) -> Result<Self> {
        if !r.is_square() || r.rows() != alpha.dim() || r.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "r is {:?} but alpha has {} entries",
                r.shape(),
                alpha.dim()
            )));
        }
        let residual = r.hermitian_residual();
        if residual > hermitian_tol(&r) {
            return Err(Error::InvalidMoments(format!("r is not Hermitian (residual {residual:.3e})")));
        }
        let r = r.hermitian_part();
        let min = hermitian_eigenvalues(&r)?[0];
        if min < -psd_tol * (1.0 + r.max_abs()) {
            return Err(Error::InvalidMoments(format!(
                "r is not positive semidefinite (smallest eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { r, alpha })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            r: CMatrix::zeros(n_modes, n_modes),
            alpha: CVector::zeros(n_modes),
        }
    }

    /// Coherent state: `r = |α><α|`.
    pub fn coherent(alpha: CVector) -> Self {
        Self {
            r: alpha.outer(&alpha),
            alpha,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.alpha.dim()
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    pub fn alpha(&self) -> &CVector {
        &self.alpha
    }

    /// Mean occupations `r_kk`.
    pub fn occupations(&self) -> Vec<f64> {
        self.r.diagonal().iter().map(|z| z.re).collect()
    }

    /// `r_α = r - |α><α|`.
    pub fn r_alpha(&self) -> CMatrix {
        &self.r - &self.alpha.outer(&self.alpha)
    }
}

impl ConjugateField {
    pub fn new(c: CMatrix, alpha_star: CVector) -> Result<Self> {
        if !c.is_square() || c.rows() != alpha_star.dim() || c.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "c is {:?} but alpha_star has {} entries",
                c.shape(),
                alpha_star.dim()
            )));
        }
        let residual = c.symmetric_residual();
        if residual > hermitian_tol(&c) {
            return Err(Error::InvalidMoments(format!("c is not symmetric (residual {residual:.3e})")));
        }
        Ok(Self {
            c: symmetric_part(&c),
            alpha_star,
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            c: CMatrix::zeros(n_modes, n_modes),
            alpha_star: CVector::zeros(n_modes),
        }
    }

    /// Coherent state: `c_{kk'} = α_k α_{k'}`.
    pub fn coherent(alpha: &CVector) -> Self {
        let n = alpha.dim();
        Self {
            c: CMatrix::from_fn(n, n, |i, j| alpha[i] * alpha[j]),
            alpha_star: alpha.conj(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.alpha_star.dim()
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn alpha_star(&self) -> &CVector {
        &self.alpha_star
    }
}

/// Vacuum RSF and conjugate RSF on `n_modes` modes.
pub fn vacuum(n_modes: usize) -> (ReducedField, ConjugateField) {
    (ReducedField::vacuum(n_modes), ConjugateField::vacuum(n_modes))
}

impl GeneralizedField {
    pub fn from_fields(rf: &ReducedField, cf: &ConjugateField) -> Result<Self> {
        let n = rf.n_modes();
        if cf.n_modes() != n {
            return Err(Error::DimensionMismatch(format!(
                "RSF has {n} modes, conjugate field {}",
                cf.n_modes()
            )));
        }
        let lower_right = &rf.r.transpose() + &CMatrix::identity(n);
        let g = CMatrix::from_blocks(&rf.r, &cf.c, &cf.c.conj(), &lower_right)?;
        Ok(Self {
            g,
            a_vec: rf.alpha.concat(&cf.alpha_star),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.a_vec.dim() / 2
    }

    pub fn g(&self) -> &CMatrix {
        &self.g
    }

    pub fn a_vec(&self) -> &CVector {
        &self.a_vec
    }

    /// Splits back into `(r, α)` and `(c, α*)`.
    pub fn split(&self) -> (ReducedField, ConjugateField) {
        let n = self.n_modes();
        (
            ReducedField {
                r: self.g.block(0, 0, n, n),
                alpha: self.a_vec.slice(0, n),
            },
            ConjugateField {
                c: self.g.block(0, n, n, n),
                alpha_star: self.a_vec.slice(n, n),
            },
        )
    }
}

/// Assembles the generalized field from state moments, validating `r` and `c`.
pub fn from_state_moments(r: CMatrix, alpha: CVector, c: CMatrix) -> Result<GeneralizedField> {
    let alpha_star = alpha.conj();
    let rf = ReducedField::new(r, alpha)?;
    let cf = ConjugateField::new(c, alpha_star)?;
    GeneralizedField::from_fields(&rf, &cf)
}

/// `g' = X g X†`, `A' = X A`.
pub fn transform_generalized(gf: &GeneralizedField, m: &BogoliubovMap) -> Result<GeneralizedField> {
    let n = gf.n_modes();
    if m.n_modes() != n {
        return Err(Error::DimensionMismatch(format!(
            "field has {n} modes, map acts on {}",
            m.n_modes()
        )));
    }
    let x = m.matrix();
    let g = x.matmul(&gf.g)?.matmul(&x.adjoint())?;
    let a_vec = x.matvec(&gf.a_vec)?;

    let scale = 1.0 + g.max_abs();
    let r = g.block(0, 0, n, n);
    let c = g.block(0, n, n, n);
    let lr = &g.block(n, n, n, n) - &(&r.transpose() + &CMatrix::identity(n));
    let residual = lr.max_abs();
    if residual > STRUCTURE_TOL * scale {
        return Err(Error::StructureViolation {
            what: "lower-right block differs from r'ᵀ + 1",
            residual,
        });
    }
    let residual = g.block(n, 0, n, n).max_abs_diff(&c.conj());
    if residual > STRUCTURE_TOL * scale {
        return Err(Error::StructureViolation {
            what: "lower-left block differs from c'*",
            residual,
        });
    }
    let residual = a_vec.slice(n, n).max_abs_diff(&a_vec.slice(0, n).conj());
    if residual > STRUCTURE_TOL * (1.0 + a_vec.max_abs()) {
        return Err(Error::StructureViolation {
            what: "amplitude vector is not α ⊕ α*",
            residual,
        });
    }
    let r = r.hermitian_part();
    check_physical(&r)?;
    let c = symmetric_part(&c);
    let alpha = a_vec.slice(0, n);
    let rf = ReducedField { r, alpha };
    let cf = ConjugateField {
        alpha_star: rf.alpha.conj(),
        c,
    };
    GeneralizedField::from_fields(&rf, &cf)
}

/// RSF after a closed Bogoliubov map; needs the conjugate field unless `X_down = 0`.
pub fn transform_closed(rf: &ReducedField, cf: &ConjugateField, m: &BogoliubovMap) -> Result<ReducedField> {
    let n = rf.n_modes();
    if cf.n_modes() != n || m.n_modes() != n {
        return Err(Error::DimensionMismatch(format!(
            "fields have {n} and {} modes, map acts on {}",
            cf.n_modes(),
            m.n_modes()
        )));
    }
    let up = m.x_up();
    let down = m.x_down();
    let up_a = up.adjoint();
    let down_a = down.adjoint();
    let rt1 = &rf.r.transpose() + &CMatrix::identity(n);
    let mut r = &(&up * &rf.r) * &up_a;
    r += &(&(&down * &cf.c.conj()) * &up_a);
    r += &(&(&up * &cf.c) * &down_a);
    r += &(&(&down * &rt1) * &down_a);
    let r = r.hermitian_part();
    check_physical(&r)?;
    let alpha = up.matvec(&rf.alpha)?.try_add(&down.matvec(&cf.alpha_star)?)?;
    Ok(ReducedField { r, alpha })
}

/// Total-state fields split along a system/environment partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemReduction {
    pub system: ReducedField,
    pub system_conjugate: ConjugateField,
    pub environment: ReducedField,
    pub environment_conjugate: ConjugateField,
    /// System-environment block of `r`.
    pub r_c: CMatrix,
    /// System-environment block of `c`.
    pub c_c: CMatrix,
}

pub fn reduce_to_system(rf: &ReducedField, cf: &ConjugateField, n_sys: usize) -> Result<SystemReduction> {
    let n = rf.n_modes();
    if cf.n_modes() != n {
        return Err(Error::DimensionMismatch(format!("fields have {n} and {} modes", cf.n_modes())));
    }
    if n_sys == 0 || n_sys > n {
        return Err(Error::DimensionMismatch(format!("cannot take {n_sys} of {n} modes as the system")));
    }
    let e = n - n_sys;
    Ok(SystemReduction {
        system: ReducedField {
            r: rf.r.block(0, 0, n_sys, n_sys),
            alpha: rf.alpha.slice(0, n_sys),
        },
        system_conjugate: ConjugateField {
            c: cf.c.block(0, 0, n_sys, n_sys),
            alpha_star: cf.alpha_star.slice(0, n_sys),
        },
        environment: ReducedField {
            r: rf.r.block(n_sys, n_sys, e, e),
            alpha: rf.alpha.slice(n_sys, e),
        },
        environment_conjugate: ConjugateField {
            c: cf.c.block(n_sys, n_sys, e, e),
            alpha_star: cf.alpha_star.slice(n_sys, e),
        },
        r_c: rf.r.block(0, n_sys, n_sys, e),
        c_c: cf.c.block(0, n_sys, n_sys, e),
    })
}

impl SystemReduction {
    pub fn reassemble(&self) -> (ReducedField, ConjugateField) {
        let r = CMatrix::from_blocks(&self.system.r, &self.r_c, &self.r_c.adjoint(), &self.environment.r)
            .expect("blocks come from one partition");
        let c = CMatrix::from_blocks(
            &self.system_conjugate.c,
            &self.c_c,
            &self.c_c.transpose(),
            &self.environment_conjugate.c,
        )
        .expect("blocks come from one partition");
        (
            ReducedField {
                r,
                alpha: self.system.alpha.concat(&self.environment.alpha),
            },
            ConjugateField {
                c,
                alpha_star: self
                    .system_conjugate
                    .alpha_star
                    .concat(&self.environment_conjugate.alpha_star),
            },
        )
    }
}

/// System RSF after an open map with the environment in vacuum:
/// `r' = X_up_S r X_up_S† + X_down_C X_down_C†`, `α' = X_up_S α`.
pub fn transform_open_vacuum_env(rf_sys: &ReducedField, m: &BogoliubovMap) -> Result<ReducedField> {
    if rf_sys.n_modes() != m.n_sys() {
        return Err(Error::DimensionMismatch(format!(
            "system field has {} modes, map's system has {}",
            rf_sys.n_modes(),
            m.n_sys()
        )));
    }
    let blocks = m.blocks();
    let residual = blocks.down_s.max_abs();
    if residual > CLASSICALITY_TOL {
        return Err(Error::NotClassicalOpen { residual });
    }
    let up_s = &blocks.up_s;
    let down_c = &blocks.down_c;
    let r = &(&(up_s * &rf_sys.r) * &up_s.adjoint()) + &(down_c * &down_c.adjoint());
    let r = r.hermitian_part();
    check_physical(&r)?;
    Ok(ReducedField {
        alpha: up_s.matvec(&rf_sys.alpha)?,
        r,
    })
}

/// `tr(r o)` for a Hermitian additive observable `o`.
pub fn expect_additive(rf: &ReducedField, o: &CMatrix) -> Result<f64> {
    if o.shape() != rf.r.shape() {
        return Err(Error::DimensionMismatch(format!(
            "observable is {:?}, RSF is {:?}",
            o.shape(),
            rf.r.shape()
        )));
    }
    let residual = o.hermitian_residual();
    if residual > hermitian_tol(o) {
        return Err(Error::NonHermitianObservable { residual });
    }
    Ok(rf.r.matmul(o)?.trace().re)
}

/// `<σ|α> + <α|σ>`.
pub fn expect_linear(rf: &ReducedField, sigma: &CVector) -> Result<f64> {
    Ok(2.0 * sigma.inner(&rf.alpha)?.re)
}

/// Reduced von Neumann entropy `tr[(r_α+1) ln(r_α+1) - r_α ln r_α]`.
pub fn entropy_v(rf: &ReducedField) -> Result<f64> {
    let spectrum = r_alpha_spectrum(rf)?;
    Ok(spectrum
        .iter()
        .map(|&x| {
            let plus = (x + 1.0) * x.ln_1p();
            if x > 0.0 {
                plus - x * x.ln()
            } else {
                plus
            }
        })
        .sum())
}

/// Reduced Wehrl entropy `tr ln(r_α + 1) + N`.
pub fn entropy_w(rf: &ReducedField) -> Result<f64> {
    let spectrum = r_alpha_spectrum(rf)?;
    Ok(spectrum.iter().map(|&x| x.ln_1p()).sum::<f64>() + spectrum.len() as f64)
}

fn r_alpha_spectrum(rf: &ReducedField) -> Result<Vec<f64>> {
    let ra = rf.r_alpha().hermitian_part();
    let eig = hermitian_eigen(&ra)?;
    let min = eig.values[0];
    if min < -PHYSICALITY_TOL * (1.0 + ra.max_abs()) {
        return Err(Error::NotPhysical { min_eigenvalue: min });
    }
    Ok(eig.values.iter().map(|&x| x.max(0.0)).collect())
}

fn check_physical(r: &CMatrix) -> Result<()> {
    let min = hermitian_eigenvalues(r)?[0];
    if min < -PHYSICALITY_TOL * (1.0 + r.max_abs()) {
        return Err(Error::NotPhysical { min_eigenvalue: min });
    }
    Ok(())
}

fn symmetric_part(c: &CMatrix) -> CMatrix {
    (c + &c.transpose()).scale(C64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn squeeze(kt: f64) -> BogoliubovMap {
        let up = CMatrix::identity(2).scale_real(kt.cosh());
        let down = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .scale_real(kt.sinh());
        BogoliubovMap::from_blocks(&up, &down, 1, 1).unwrap()
    }

    #[test]
    fn vacuum_fields() {
        let (rf, cf) = vacuum(2);
        assert_eq!(rf.r(), &CMatrix::zeros(2, 2));
        assert_eq!(cf.c(), &CMatrix::zeros(2, 2));
        let gf = GeneralizedField::from_fields(&rf, &cf).unwrap();
        assert_eq!(gf.g(), &CMatrix::diag_real(&[0.0, 0.0, 1.0, 1.0]));
    }

    #[test]
    fn thermal_like_generalized_field() {
        let gf = from_state_moments(CMatrix::diag_real(&[0.7]), CVector::zeros(1), CMatrix::zeros(1, 1)).unwrap();
        assert_eq!(gf.g(), &CMatrix::diag_real(&[0.7, 1.7]));
    }

    #[test]
    fn coherent_generalized_field() {
        let z = c(0.5, 0.0);
        let gf = from_state_moments(
            CMatrix::diag_real(&[z.norm_sqr()]),
            CVector::new(vec![z]),
            CMatrix::scalar(z * z),
        )
        .unwrap();
        let expected = CMatrix::from_rows(&[vec![c(0.25, 0.0), z * z], vec![(z * z).conj(), c(1.25, 0.0)]]).unwrap();
        assert_eq!(gf.g(), &expected);
        assert_eq!(gf.a_vec().as_slice(), &[z, z.conj()]);
    }

    #[test]
    fn split_round_trip() {
        let r = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.2, 0.1)], vec![c(0.2, -0.1), c(0.5, 0.0)]]).unwrap();
        let cm = CMatrix::from_rows(&[vec![c(0.1, 0.3), c(0.0, 0.2)], vec![c(0.0, 0.2), c(-0.4, 0.0)]]).unwrap();
        let alpha = CVector::new(vec![c(0.1, 0.0), c(0.0, -0.2)]);
        let gf = from_state_moments(r.clone(), alpha.clone(), cm.clone()).unwrap();
        let (rf, cf) = gf.split();
        assert_eq!(rf.r(), &r);
        assert_eq!(cf.c(), &cm);
        assert_eq!(rf.alpha(), &alpha);
        assert_eq!(gf.g().block(2, 2, 2, 2), &r.transpose() + &CMatrix::identity(2));
    }

    #[test]
    fn invalid_moments() {
        let bad_r = CMatrix::diag_real(&[-0.5]);
        assert!(matches!(
            from_state_moments(bad_r, CVector::zeros(1), CMatrix::zeros(1, 1)),
            Err(Error::InvalidMoments(_))
        ));
        let bad_c = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            from_state_moments(CMatrix::zeros(2, 2), CVector::zeros(2), bad_c),
            Err(Error::InvalidMoments(_))
        ));
    }

    #[test]
    fn squeezed_vacuum_occupation() {
        let (rf, cf) = vacuum(2);
        let gf = GeneralizedField::from_fields(&rf, &cf).unwrap();
        let out = transform_generalized(&gf, &squeeze(0.3)).unwrap();
        let s2 = 0.3f64.sinh().powi(2);
        let (r_out, c_out) = out.split();
        assert!(r_out.r().max_abs_diff(&CMatrix::identity(2).scale_real(s2)) < 1e-15);
        assert!((c_out.c()[(0, 1)].re - 0.3f64.sinh() * 0.3f64.cosh()).abs() < 1e-15);
        let closed = transform_closed(&rf, &cf, &squeeze(0.3)).unwrap();
        assert!(closed.r().max_abs_diff(r_out.r()) < 1e-15);
    }

    #[test]
    fn passive_maps_keep_vacuum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = BogoliubovMap::random_passive(3, 0, 1.0, &mut rng);
        let (rf, cf) = vacuum(3);
        let out = transform_closed(&rf, &cf, &m).unwrap();
        assert_eq!(out.r().max_abs(), 0.0);
        assert_eq!(out.alpha().max_abs(), 0.0);
    }

    #[test]
    fn closed_transform_without_down_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = BogoliubovMap::random_passive(2, 0, 1.0, &mut rng);
        let alpha = CVector::new(vec![c(0.3, 0.1), c(-0.2, 0.5)]);
        let rf = ReducedField::coherent(alpha.clone());
        let cf = ConjugateField::coherent(&alpha);
        let out = transform_closed(&rf, &cf, &m).unwrap();
        let u = m.x_up();
        assert!(out.r().max_abs_diff(&(&(&u * rf.r()) * &u.adjoint())) < 1e-14);
        assert!(out.alpha().max_abs_diff(&u.matvec(&alpha).unwrap()) < 1e-14);
        let same = transform_closed(&rf, &cf, &BogoliubovMap::identity(2, 0)).unwrap();
        assert_eq!(same.r(), rf.r());
    }

    #[test]
    fn non_symplectic_input_breaks_structure() {
        let (rf, cf) = vacuum(1);
        let gf = GeneralizedField::from_fields(&rf, &cf).unwrap();
        let x = CMatrix::diag_real(&[2.0, 2.0]);
        let m = BogoliubovMap::from_matrix_with_tol(x, 1, 0, 10.0).unwrap();
        assert!(matches!(
            transform_generalized(&gf, &m),
            Err(Error::StructureViolation { .. })
        ));
    }

    #[test]
    fn reduction_of_two_mode_squeezed_vacuum() {
        let (rf, cf) = vacuum(2);
        let gf = transform_generalized(&GeneralizedField::from_fields(&rf, &cf).unwrap(), &squeeze(0.3)).unwrap();
        let (rf, cf) = gf.split();
        let red = reduce_to_system(&rf, &cf, 1).unwrap();
        assert!((red.system.r()[(0, 0)].re - 0.3f64.sinh().powi(2)).abs() < 1e-15);
        assert_eq!(red.system_conjugate.c()[(0, 0)], c(0.0, 0.0));
        assert!((red.c_c[(0, 0)].norm() - 0.3f64.sinh() * 0.3f64.cosh()).abs() < 1e-15);
        assert_eq!(red.reassemble(), (rf, cf));
    }

    #[test]
    fn reduction_rejects_bad_partition() {
        let (rf, cf) = vacuum(2);
        assert!(reduce_to_system(&rf, &cf, 3).is_err());
        assert!(reduce_to_system(&rf, &cf, 0).is_err());
    }

    #[test]
    fn open_transform_amplifier() {
        let out = transform_open_vacuum_env(&ReducedField::vacuum(1), &squeeze(0.3)).unwrap();
        assert!((out.r()[(0, 0)].re - 0.092_732_7).abs() < 1e-7);
        let same = transform_open_vacuum_env(&ReducedField::vacuum(1), &BogoliubovMap::identity(1, 1)).unwrap();
        assert_eq!(same, ReducedField::vacuum(1));
    }

    #[test]
    fn open_transform_requires_classicality() {
        let m = squeeze(0.3).repartition(2).unwrap();
        assert!(matches!(
            transform_open_vacuum_env(&ReducedField::vacuum(2), &m),
            Err(Error::NotClassicalOpen { .. })
        ));
    }

    #[test]
    fn additive_and_linear_observables() {
        let rf = ReducedField::new(CMatrix::diag_real(&[0.3, 1.2]), CVector::zeros(2)).unwrap();
        assert!((expect_additive(&rf, &CMatrix::identity(2)).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(expect_additive(&rf, &CMatrix::diag_real(&[0.0, 1.0])).unwrap(), 1.2);
        let s2 = 0.3f64.sinh().powi(2);
        let sq = ReducedField::new(CMatrix::identity(2).scale_real(s2), CVector::zeros(2)).unwrap();
        assert!((expect_additive(&sq, &CMatrix::identity(2)).unwrap() - 2.0 * s2).abs() < 1e-15);
        assert!((2.0 * s2 - 2.0 * 0.092_732_7).abs() < 5e-7);
        let nonh = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            expect_additive(&rf, &nonh),
            Err(Error::NonHermitianObservable { .. })
        ));

        assert_eq!(expect_linear(&rf, &CVector::from_real(&[1.0, 1.0])).unwrap(), 0.0);
        let alpha = CVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let coh = ReducedField::coherent(alpha.clone());
        assert!((expect_linear(&coh, &alpha).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entropies() {
        let vac = ReducedField::vacuum(3);
        assert_eq!(entropy_v(&vac).unwrap(), 0.0);
        assert_eq!(entropy_w(&vac).unwrap(), 3.0);

        let one = ReducedField::new(CMatrix::diag_real(&[1.0]), CVector::zeros(1)).unwrap();
        assert!((entropy_v(&one).unwrap() - 1.386_294_4).abs() < 1e-7);
        assert!((entropy_w(&one).unwrap() - (2f64.ln() + 1.0)).abs() < 1e-15);

        let coh = ReducedField::coherent(CVector::new(vec![c(0.4, -0.3), c(1.0, 0.2)]));
        assert!(entropy_v(&coh).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_unphysical_r_alpha() {
        let rf = ReducedField::new(CMatrix::diag_real(&[0.1]), CVector::from_real(&[1.0])).unwrap();
        match entropy_v(&rf) {
            Err(Error::NotPhysical { min_eigenvalue }) => assert!((min_eigenvalue + 0.9).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}
