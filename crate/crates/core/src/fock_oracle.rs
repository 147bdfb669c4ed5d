//! Truncated two-mode Fock space used as ground truth for the RSF transformation laws.

use crate::error::{Error, Result};
use crate::numerics::{pack_complex, solve_ode_dense, unpack_complex, CMatrix, CVector, IntegratorOptions, OdeProblem, C64};
use crate::rsf::{ConjugateField, GeneralizedField, ReducedField};
use crate::symplectic::BogoliubovMap;

/// Largest boundary population accepted at the start of an evolution.
pub const INITIAL_BOUNDARY_TOL: f64 = 1e-8;
/// Largest boundary population tolerated during evolution and measurement.
pub const OVERFLOW_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_N_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Pure state on `|n1, n2>` with `0 <= n_i <= n_max`, index `n1 (n_max + 1) + n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_max: usize,
    amps: Vec<C64>,
    /// Squared norm pushed past the cutoff by raising operators.
    lost: f64,
}

impl FockState {
    pub fn vacuum(n_max: usize) -> Self {
        Self::number(n_max, 0, 0).expect("vacuum is inside any cutoff")
    }

    pub fn number(n_max: usize, n1: usize, n2: usize) -> Result<Self> {
        let d = n_max + 1;
        if n1 > n_max || n2 > n_max {
            return Err(Error::IndexOutOfRange {
                index: n1.max(n2),
                len: d,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        amps[n1 * d + n2] = C64::new(1.0, 0.0);
        Ok(Self { n_max, amps, lost: 0.0 })
    }

    /// Product of coherent states, truncated without renormalisation.
    pub fn coherent(n_max: usize, z1: C64, z2: C64) -> Self {
        let single = |z: C64| -> Vec<C64> {
            let mut v = Vec::with_capacity(n_max + 1);
            let mut term = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
            for n in 0..=n_max {
                v.push(term);
                term = term * z / ((n + 1) as f64).sqrt();
            }
            v
        };
        let (a, b) = (single(z1), single(z2));
        let amps = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self { n_max, amps, lost: 0.0 }
    }

    pub fn from_amplitudes(n_max: usize, amps: Vec<C64>) -> Result<Self> {
        let d = n_max + 1;
        if amps.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for cutoff {n_max}",
                amps.len()
            )));
        }
        Ok(Self { n_max, amps, lost: 0.0 })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * (self.n_max + 1) + n2
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> C64 {
        self.amps[self.index(n1, n2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `1 - ||ψ||²`.
    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    /// Population with `n1 = n_max` or `n2 = n_max`.
    pub fn boundary_population(&self) -> f64 {
        let m = self.n_max;
        let mut s = 0.0;
        for n1 in 0..=m {
            for n2 in 0..=m {
                if n1 == m || n2 == m {
                    s += self.amplitude(n1, n2).norm_sqr();
                }
            }
        }
        s
    }

    /// Norm lost through the cutoff by raising operators applied so far.
    pub fn truncation_witness(&self) -> f64 {
        self.lost
    }

    pub fn inner(&self, other: &FockState) -> Result<C64> {
        if self.n_max != other.n_max {
            return Err(Error::DimensionMismatch(format!(
                "cutoffs {} and {}",
                self.n_max, other.n_max
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn zeros_like(&self) -> Self {
        Self {
            n_max: self.n_max,
            amps: vec![C64::new(0.0, 0.0); self.amps.len()],
            lost: self.lost,
        }
    }

    fn add_scaled(&mut self, s: C64, other: &FockState) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += s * b;
        }
    }
}

/// `a` or `a†` on mode 0, or `b` or `b†` on mode 1.
pub fn apply_ladder(state: &FockState, mode: usize, which: Ladder) -> Result<FockState> {
    if mode > 1 {
        return Err(Error::IndexOutOfRange { index: mode, len: 2 });
    }
    let m = state.n_max;
    let mut out = state.zeros_like();
    for n1 in 0..=m {
        for n2 in 0..=m {
            let z = state.amplitude(n1, n2);
            if z == C64::new(0.0, 0.0) {
                continue;
            }
            let n = if mode == 0 { n1 } else { n2 };
            match which {
                Ladder::Lower => {
                    if n > 0 {
                        let (k1, k2) = if mode == 0 { (n1 - 1, n2) } else { (n1, n2 - 1) };
                        let idx = out.index(k1, k2);
                        out.amps[idx] += z * (n as f64).sqrt();
                    }
                }
                Ladder::Raise => {
                    let w = z * ((n + 1) as f64).sqrt();
                    if n == m {
                        out.lost += w.norm_sqr();
                    } else {
                        let (k1, k2) = if mode == 0 { (n1 + 1, n2) } else { (n1, n2 + 1) };
                        let idx = out.index(k1, k2);
                        out.amps[idx] += w;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `p0 a†a + p1 b†b + p2 (a†b + ab†) + p3 i(a†b - ab†) + q0 (a†b† + ab) + q1 i(a†b† - ab)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticHamiltonian {
    pub passive: [f64; 4],
    pub active: [f64; 2],
}

impl QuadraticHamiltonian {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `θ (a†b + ab†)`.
    pub fn beam_splitter(theta: f64) -> Self {
        Self {
            passive: [0.0, 0.0, theta, 0.0],
            active: [0.0, 0.0],
        }
    }

    /// `i r (a†b† - ab)`.
    pub fn two_mode_squeeze(r: f64) -> Self {
        Self {
            passive: [0.0; 4],
            active: [0.0, r],
        }
    }

    /// `P` and `Q` with `H = Σ P_ij a_i† a_j + ½ Σ (Q_ij a_i† a_j† + h.c.)`.
    pub fn single_particle_blocks(&self) -> (CMatrix, CMatrix) {
        let [p0, p1, p2, p3] = self.passive;
        let [q0, q1] = self.active;
        let pab = C64::new(p2, p3);
        let p = CMatrix::from_rows(&[vec![C64::new(p0, 0.0), pab], vec![pab.conj(), C64::new(p1, 0.0)]])
            .expect("2x2");
        let qab = C64::new(q0, q1);
        let zero = C64::new(0.0, 0.0);
        let q = CMatrix::from_rows(&[vec![zero, qab], vec![qab, zero]]).expect("2x2");
        (p, q)
    }

    /// `H ψ` restricted to the truncated space.
    pub fn apply(&self, state: &FockState) -> FockState {
        let [p0, p1, p2, p3] = self.passive;
        let [q0, q1] = self.active;
        let hop_up = C64::new(p2, p3); // a†b
        let hop_down = C64::new(p2, -p3); // ab†
        let pair_up = C64::new(q0, q1); // a†b†
        let pair_down = C64::new(q0, -q1); // ab
        let m = state.n_max;
        let mut out = state.zeros_like();
        let sq = |n: usize| (n as f64).sqrt();
        for n1 in 0..=m {
            for n2 in 0..=m {
                let z = state.amplitude(n1, n2);
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                let i0 = out.index(n1, n2);
                out.amps[i0] += z * (p0 * n1 as f64 + p1 * n2 as f64);
                if n1 < m && n2 > 0 {
                    let i = out.index(n1 + 1, n2 - 1);
                    out.amps[i] += hop_up * z * sq(n1 + 1) * sq(n2);
                }
                if n1 > 0 && n2 < m {
                    let i = out.index(n1 - 1, n2 + 1);
                    out.amps[i] += hop_down * z * sq(n1) * sq(n2 + 1);
                }
                if n1 < m && n2 < m {
                    let i = out.index(n1 + 1, n2 + 1);
                    out.amps[i] += pair_up * z * sq(n1 + 1) * sq(n2 + 1);
                }
                if n1 > 0 && n2 > 0 {
                    let i = out.index(n1 - 1, n2 - 1);
                    out.amps[i] += pair_down * z * sq(n1) * sq(n2);
                }
            }
        }
        out
    }
}

/// Schrödinger evolution for time `t` under a constant `H`.
pub fn evolve(state: &FockState, h: &QuadraticHamiltonian, t: f64) -> Result<FockState> {
    evolve_with(state, |_| *h, t, IntegratorOptions::default())
}

/// Schrödinger evolution under `H(s)` for `s` in `[0, t]`.
pub fn evolve_with<H>(state: &FockState, h: H, t: f64, options: IntegratorOptions) -> Result<FockState>
where
    H: Fn(f64) -> QuadraticHamiltonian,
{
    let initial = state.boundary_population();
    if initial > INITIAL_BOUNDARY_TOL {
        return Err(Error::TruncationOverflow {
            population: initial,
            threshold: INITIAL_BOUNDARY_TOL,
        });
    }
    let n_max = state.n_max;
    let d = state.amps.len();
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let psi = FockState {
            n_max,
            amps: unpack_complex(y),
            lost: 0.0,
        };
        let hpsi = h(s).apply(&psi);
        let dpsi: Vec<C64> = hpsi.amps.iter().map(|z| C64::new(z.im, -z.re)).collect();
        pack_complex(&dpsi, dy);
        Ok(())
    };
    let mut problem = options.apply(OdeProblem::new(2 * d, rhs, 0.0, t));
    let mut y0 = vec![0.0; 2 * d];
    pack_complex(&state.amps, &mut y0);
    let flow = solve_ode_dense(&mut problem, &y0)?;

    let mut worst = 0.0f64;
    for s in flow.step_times() {
        let psi = FockState {
            n_max,
            amps: unpack_complex(&flow.eval(s)?),
            lost: 0.0,
        };
        worst = worst.max(psi.boundary_population());
    }
    if worst > OVERFLOW_THRESHOLD {
        return Err(Error::TruncationOverflow {
            population: worst,
            threshold: OVERFLOW_THRESHOLD,
        });
    }
    Ok(FockState {
        n_max,
        amps: unpack_complex(&flow.eval(t)?),
        lost: state.lost,
    })
}

/// `r_{kk'} = <a†_{k'} a_k>`, `α_k = <a_k>`, `c_{kk'} = <a_{k'} a_k>` of the normalised state.
pub fn measure_rsf(state: &FockState) -> Result<(ReducedField, ConjugateField)> {
    let population = state.boundary_population();
    if population > OVERFLOW_THRESHOLD {
        return Err(Error::TruncationOverflow {
            population,
            threshold: OVERFLOW_THRESHOLD,
        });
    }
    let norm = state.norm_sqr();
    let lowered = [apply_ladder(state, 0, Ladder::Lower)?, apply_ladder(state, 1, Ladder::Lower)?];
    let r = CMatrix::from_fn(2, 2, |k, kp| lowered[kp].inner(&lowered[k]).expect("same cutoff") / norm);
    let alpha = CVector::from_fn(2, |k| state.inner(&lowered[k]).expect("same cutoff") / norm);
    let mut c = CMatrix::zeros(2, 2);
    for k in 0..2 {
        for kp in 0..2 {
            let both = apply_ladder(&lowered[k], kp, Ladder::Lower)?;
            c[(k, kp)] = state.inner(&both)? / norm;
        }
    }
    let alpha_star = alpha.conj();
    Ok((ReducedField::new(r, alpha)?, ConjugateField::new(c, alpha_star)?))
}

pub fn measure_generalized(state: &FockState) -> Result<GeneralizedField> {
    let (rf, cf) = measure_rsf(state)?;
    GeneralizedField::from_fields(&rf, &cf)
}

/// `<ψ| Σ o_ij a_i† a_j |ψ> / <ψ|ψ>` through ladder operators.
pub fn expect_quadratic(state: &FockState, o: &CMatrix) -> Result<C64> {
    if o.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!("observable is {:?}", o.shape())));
    }
    let mut acc = state.zeros_like();
    for i in 0..2 {
        for j in 0..2 {
            let lowered = apply_ladder(state, j, Ladder::Lower)?;
            let term = apply_ladder(&lowered, i, Ladder::Raise)?;
            acc.add_scaled(o[(i, j)], &term);
        }
    }
    Ok(state.inner(&acc)? / state.norm_sqr())
}

/// Heisenberg map `a(t) = X_up a + X_down a†` of `H` after time `t`, from `exp(K t)` with
/// `K = -i [[P, Q], [-Q*, -P*]]`.
pub fn heisenberg_map(h: &QuadraticHamiltonian, t: f64) -> Result<BogoliubovMap> {
    let (p, q) = h.single_particle_blocks();
    let k = CMatrix::from_blocks(&p, &q, &-&q.conj(), &-&p.conj())?.scale(C64::new(0.0, -t));
    BogoliubovMap::from_matrix(k.expm()?, 1, 1)
}

/// A Hamiltonian family with its known Bogoliubov matrix and the state it is tested on.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogCase {
    pub name: &'static str,
    pub hamiltonian: QuadraticHamiltonian,
    pub t: f64,
    pub map: BogoliubovMap,
    /// Occupations of the initial number state.
    pub initial: (usize, usize),
}

impl CatalogCase {
    pub fn initial_state(&self, n_max: usize) -> Result<FockState> {
        FockState::number(n_max, self.initial.0, self.initial.1)
    }
}

pub fn identity_case() -> CatalogCase {
    CatalogCase {
        name: "identity",
        hamiltonian: QuadraticHamiltonian::zero(),
        t: 1.0,
        map: BogoliubovMap::identity(1, 1),
        initial: (1, 0),
    }
}

/// `θ (a†b + ab†)` for unit time: `X_up = [[cos θ, -i sin θ], [-i sin θ, cos θ]]`.
pub fn beam_splitter_case(theta: f64) -> CatalogCase {
    let (s, c) = theta.sin_cos();
    let up = CMatrix::from_rows(&[
        vec![C64::new(c, 0.0), C64::new(0.0, -s)],
        vec![C64::new(0.0, -s), C64::new(c, 0.0)],
    ])
    .expect("2x2");
    CatalogCase {
        name: "beam-splitter",
        hamiltonian: QuadraticHamiltonian::beam_splitter(theta),
        t: 1.0,
        map: BogoliubovMap::from_blocks(&up, &CMatrix::zeros(2, 2), 1, 1).expect("unitary"),
        initial: (1, 0),
    }
}

/// `i r (a†b† - ab)` for unit time: `a -> cosh r a + sinh r b†`.
pub fn squeeze_case(r: f64) -> CatalogCase {
    let up = CMatrix::identity(2).scale_real(r.cosh());
    let down = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
        .expect("2x2")
        .scale_real(r.sinh());
    CatalogCase {
        name: "squeeze",
        hamiltonian: QuadraticHamiltonian::two_mode_squeeze(r),
        t: 1.0,
        map: BogoliubovMap::from_blocks(&up, &down, 1, 1).expect("hyperbolic"),
        initial: (0, 0),
    }
}

/// Identity, beam splitter `θ = 0.7` and squeeze `r = 0.3`.
pub fn catalog() -> Vec<CatalogCase> {
    vec![identity_case(), beam_splitter_case(0.7), squeeze_case(0.3)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    /// `max |g'_measured - X g X†|`.
    pub deviation: f64,
    /// Boundary population of the evolved state.
    pub truncation_witness: f64,
    /// `max(1e-6, 10 · witness)`.
    pub threshold: f64,
    pub norm_drift: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.deviation <= self.threshold
    }
}

/// Evolves `state` under the case's Hamiltonian and compares the measured generalized field
/// with `X g X†`.
pub fn oracle_check_transform(case: &CatalogCase, state: &FockState) -> Result<OracleReport> {
    let g0 = measure_generalized(state)?;
    let evolved = evolve(state, &case.hamiltonian, case.t)?;
    let g1 = measure_generalized(&evolved)?;
    let x = case.map.matrix();
    let predicted = x.matmul(g0.g())?.matmul(&x.adjoint())?;
    let witness = evolved.boundary_population();
    Ok(OracleReport {
        deviation: g1.g().max_abs_diff(&predicted),
        truncation_witness: witness,
        threshold: OVERFLOW_THRESHOLD.max(10.0 * witness),
        norm_drift: (evolved.norm_sqr() - state.norm_sqr()).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_basics() {
        let vac = FockState::vacuum(4);
        assert_eq!(apply_ladder(&vac, 0, Ladder::Lower).unwrap().norm_sqr(), 0.0);
        let one = apply_ladder(&vac, 0, Ladder::Raise).unwrap();
        assert_eq!(one, FockState::number(4, 1, 0).unwrap());
        assert!(apply_ladder(&vac, 2, Ladder::Raise).is_err());
    }

    #[test]
    fn commutator_expectation() {
        let psi = FockState::coherent(15, C64::new(0.4, 0.2), C64::new(-0.1, 0.3));
        assert!(psi.boundary_population() < 1e-12);
        let up = apply_ladder(&psi, 0, Ladder::Raise).unwrap();
        let down = apply_ladder(&psi, 0, Ladder::Lower).unwrap();
        let comm = (up.norm_sqr() - down.norm_sqr()) / psi.norm_sqr();
        assert!((comm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn raising_at_cutoff_is_witnessed() {
        let top = FockState::number(3, 3, 0).unwrap();
        let out = apply_ladder(&top, 0, Ladder::Raise).unwrap();
        assert_eq!(out.norm_sqr(), 0.0);
        assert!((out.truncation_witness() - 4.0).abs() < 1e-15);
        assert_eq!(top.boundary_population(), 1.0);
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let psi = FockState::coherent(10, C64::new(0.3, 0.0), C64::new(0.0, 0.2));
        let out = evolve(&psi, &QuadraticHamiltonian::zero(), 2.0).unwrap();
        assert_eq!(out.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn beam_splitter_conserves_number() {
        let psi = FockState::number(6, 1, 0).unwrap();
        let h = QuadraticHamiltonian::beam_splitter(1.0);
        let total = |s: &FockState| {
            let (rf, _) = measure_rsf(s).unwrap();
            rf.occupations().iter().sum::<f64>()
        };
        for &t in &[0.3, 0.7, 1.4] {
            let out = evolve(&psi, &h, t).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
            assert!((total(&out) - 1.0).abs() < 1e-9);
            let (rf, _) = measure_rsf(&out).unwrap();
            assert!((rf.occupations()[0] - t.cos().powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn squeeze_occupation() {
        let out = evolve(&FockState::vacuum(12), &QuadraticHamiltonian::two_mode_squeeze(0.3), 1.0).unwrap();
        let (rf, cf) = measure_rsf(&out).unwrap();
        let s2 = 0.3f64.sinh().powi(2);
        assert!((rf.r()[(0, 0)].re - s2).abs() < 1e-6);
        assert!((rf.r()[(1, 1)].re - s2).abs() < 1e-6);
        assert!((cf.c()[(0, 1)].norm() - 0.3f64.sinh() * 0.3f64.cosh()).abs() < 1e-6);
        assert!(rf.alpha().max_abs() < 1e-12);
    }

    #[test]
    fn moments_of_simple_states() {
        let (rf, cf) = measure_rsf(&FockState::vacuum(5)).unwrap();
        assert_eq!(rf.r().max_abs(), 0.0);
        assert_eq!(cf.c().max_abs(), 0.0);
        let (rf, cf) = measure_rsf(&FockState::number(5, 1, 0).unwrap()).unwrap();
        assert_eq!(rf.r(), &CMatrix::diag_real(&[1.0, 0.0]));
        assert_eq!(cf.c().max_abs(), 0.0);
        assert_eq!(rf.alpha().max_abs(), 0.0);

        let z = C64::new(0.5, 0.0);
        let (rf, cf) = measure_rsf(&FockState::coherent(16, z, C64::new(0.0, 0.0))).unwrap();
        assert!((rf.r()[(0, 0)].re - 0.25).abs() < 1e-10);
        assert!((cf.c()[(0, 0)] - z * z).norm() < 1e-10);
        assert!((rf.alpha()[0] - z).norm() < 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        let near_top = FockState::number(4, 4, 0).unwrap();
        assert!(matches!(measure_rsf(&near_top), Err(Error::TruncationOverflow { .. })));
        assert!(matches!(
            evolve(&near_top, &QuadraticHamiltonian::zero(), 1.0),
            Err(Error::TruncationOverflow { .. })
        ));
        let strong = QuadraticHamiltonian::two_mode_squeeze(1.5);
        assert!(matches!(
            evolve(&FockState::vacuum(6), &strong, 1.0),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn heisenberg_maps_match_catalog() {
        for case in catalog() {
            let m = heisenberg_map(&case.hamiltonian, case.t).unwrap();
            assert!(m.matrix().max_abs_diff(case.map.matrix()) < 1e-13, "{}", case.name);
        }
    }

    #[test]
    fn catalog_checks_pass() {
        for case in catalog() {
            let psi = case.initial_state(DEFAULT_N_MAX).unwrap();
            let rep = oracle_check_transform(&case, &psi).unwrap();
            assert!(rep.passed(), "{}: {rep:?}", case.name);
            assert!(rep.norm_drift < 1e-9);
        }
        let rep = oracle_check_transform(&identity_case(), &FockState::number(12, 1, 0).unwrap()).unwrap();
        assert_eq!(rep.deviation, 0.0);
        let rep = oracle_check_transform(&beam_splitter_case(0.7), &FockState::number(12, 1, 0).unwrap()).unwrap();
        assert!(rep.deviation <= 1e-8);
    }

    #[test]
    fn expect_quadratic_matches_trace() {
        let psi = evolve(&FockState::number(12, 1, 0).unwrap(), &QuadraticHamiltonian::two_mode_squeeze(0.2), 1.0).unwrap();
        let (rf, _) = measure_rsf(&psi).unwrap();
        let o = CMatrix::from_rows(&[
            vec![C64::new(0.3, 0.0), C64::new(0.1, -0.4)],
            vec![C64::new(0.1, 0.4), C64::new(-1.2, 0.0)],
        ])
        .unwrap();
        let direct = expect_quadratic(&psi, &o).unwrap();
        let via_rsf = crate::rsf::expect_additive(&rf, &o).unwrap();
        assert!(direct.im.abs() < 1e-12);
        assert!((direct.re - via_rsf).abs() < 1e-10);
    }

    #[test]
    fn squeeze_deviation_converges_with_cutoff() {
        let case = squeeze_case(0.3);
        let dev = |n: usize| {
            oracle_check_transform(&case, &case.initial_state(n).unwrap())
                .unwrap()
                .deviation
        };
        let (coarse, fine) = (dev(6), dev(12));
        assert!(fine * 10.0 <= coarse, "{coarse:e} -> {fine:e}");
        assert!(fine <= 1e-6);
    }

    #[test]
    fn random_observables_translate() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for case in catalog() {
            let psi = evolve(&case.initial_state(DEFAULT_N_MAX).unwrap(), &case.hamiltonian, case.t).unwrap();
            let (rf, _) = measure_rsf(&psi).unwrap();
            assert!(crate::numerics::hermitian_eigenvalues(rf.r()).unwrap()[0] >= -1e-8);
            for _ in 0..20 {
                let d0: f64 = rng.gen_range(-1.0..1.0);
                let d1: f64 = rng.gen_range(-1.0..1.0);
                let off = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let o = CMatrix::from_rows(&[vec![C64::new(d0, 0.0), off], vec![off.conj(), C64::new(d1, 0.0)]]).unwrap();
                let direct = expect_quadratic(&psi, &o).unwrap();
                let via_rsf = crate::rsf::expect_additive(&rf, &o).unwrap();
                assert!((direct.re - via_rsf).abs() <= 1e-6, "{}", case.name);
            }
        }
    }
}
