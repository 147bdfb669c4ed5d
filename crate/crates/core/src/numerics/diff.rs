use num_complex::Complex64 as C64;

use super::CMatrix;
use crate::error::{Error, Result};

/// `(f(t+h) - f(t-h)) / 2h`, second-order accurate for smooth `f`.
pub fn central_difference<F>(f: F, t: f64, h: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    if !(h > 0.0) {
        return Err(Error::DerivativeUnavailable {
            t,
            reason: format!("step {h} must be positive"),
        });
    }
    let plus = f(t + h)?;
    let minus = f(t - h)?;
    Ok(plus.try_sub(&minus)?.scale_real(0.5 / h))
}

pub fn central_difference_scalar<F>(f: F, t: f64, h: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    if !(h > 0.0) {
        return Err(Error::DerivativeUnavailable {
            t,
            reason: format!("step {h} must be positive"),
        });
    }
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let d = central_difference(|t| Ok(CMatrix::identity(2).scale_real(t * t)), 1.0, 1e-4).unwrap();
        assert!(d.max_abs_diff(&CMatrix::identity(2).scale_real(2.0)) < 1e-7);
    }

    #[test]
    fn phase() {
        let d = central_difference(|t| Ok(CMatrix::identity(2).scale(C64::from_polar(1.0, t))), 0.0, 1e-4).unwrap();
        assert!(d.max_abs_diff(&CMatrix::identity(2).scale(C64::i())) < 1e-8);
    }

    #[test]
    fn halving_step_quarters_error() {
        let f = |t: f64| Ok(CMatrix::scalar(C64::new(t.sin(), (2.0 * t).cos())));
        let exact = C64::new(0.7f64.cos(), -2.0 * (1.4f64).sin());
        let e1 = (central_difference(f, 0.7, 1e-2).unwrap()[(0, 0)] - exact).norm();
        let e2 = (central_difference(f, 0.7, 5e-3).unwrap()[(0, 0)] - exact).norm();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn non_positive_step_is_an_error() {
        assert!(central_difference(|_| Ok(CMatrix::identity(1)), 0.0, 0.0).is_err());
    }
}
