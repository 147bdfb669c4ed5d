use num_complex::Complex64 as C64;

use super::{hermitian_tol, CMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix: `m = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†` for a real spectral function `f`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(|x| x)
    }
}

/// Result of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    /// Smallest eigenvalue, reported whatever the verdict.
    pub min_eigenvalue: f64,
}

/// Cyclic complex Jacobi rotations.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let residual = m.hermitian_residual();
    if residual > hermitian_tol(m) {
        return Err(Error::NonHermitian { residual });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let threshold = 1e-14 * scale;
    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&a),
            });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// `true` iff `λ_min ≥ -tol (1 + |m|_max)`; the witness is returned either way.
pub fn is_psd(m: &CMatrix, tol: f64) -> Result<PsdCheck> {
    let values = hermitian_eigenvalues(m)?;
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -tol * (1.0 + m.max_abs()),
        min_eigenvalue,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`: `a <- U† a U`, `v <- v U`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations below rounding level relative to the diagonal.
    if mag <= 0.5 * f64::EPSILON * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let t = if tau == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
    let ph_conj = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -ph_conj * s;
    let u_qq = ph_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        m.hermitian_part()
    }

    /// det(M - λI) via LU; real for Hermitian M and real λ.
    fn char_poly(m: &CMatrix, lambda: f64) -> f64 {
        let shifted = m - &CMatrix::identity(m.rows()).scale_real(lambda);
        shifted.determinant().unwrap().re
    }

    #[test]
    fn identity_eigenvalues() {
        assert_eq!(hermitian_eigenvalues(&CMatrix::identity(3)).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let vals = hermitian_eigenvalues(&CMatrix::diag_real(&[2.0, -1.0])).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0]);
    }

    #[test]
    fn random_hermitian_matches_characteristic_polynomial_sign_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_hermitian(6, &mut rng);
        let eig = hermitian_eigen(&m).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-10 * (1.0 + m.max_abs()));
        let vals = &eig.values;
        let gap = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        assert!(gap > 1e-6, "test matrix should have a simple spectrum");
        let eps = (gap / 4.0).min(1e-4);
        for &lambda in vals {
            let lo = char_poly(&m, lambda - eps);
            let hi = char_poly(&m, lambda + eps);
            assert!(lo * hi < 0.0, "no sign change at {lambda}: {lo} {hi}");
        }
    }

    #[test]
    fn nonhermitian_is_rejected() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn psd_examples() {
        let zero = is_psd(&CMatrix::zeros(3, 3), 1e-10).unwrap();
        assert!(zero.is_psd);
        assert_eq!(zero.min_eigenvalue, 0.0);
        let neg = is_psd(&CMatrix::diag_real(&[1.0, -1e-6]), 1e-10).unwrap();
        assert!(!neg.is_psd);
        assert!((neg.min_eigenvalue + 1e-6).abs() < 1e-18);
    }

    #[test]
    fn repeated_calls_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(8, &mut rng);
        let a = hermitian_eigenvalues(&m).unwrap();
        let b = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eigenvectors_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(10, &mut rng);
        let v = hermitian_eigen(&m).unwrap().vectors;
        assert!((&v.adjoint() * &v).max_abs_diff(&CMatrix::identity(10)) < 1e-12);
    }
}
