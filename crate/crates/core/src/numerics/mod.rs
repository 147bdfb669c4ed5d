//! Dense complex linear algebra and ODE integration shared by the other modules.

mod diff;
mod eigen;
mod matrix;
mod ode;

pub use diff::{central_difference, central_difference_scalar};
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, is_psd, HermitianEigen, PsdCheck};
pub use matrix::{CMatrix, CVector};
pub use ode::{solve_ode, solve_ode_dense, DenseSolution, IntegratorOptions, OdeProblem};

pub type C64 = num_complex::Complex64;

/// Scale-free Hermiticity tolerance: `1e-12 * (1 + |m|_max)`.
pub(crate) fn hermitian_tol(m: &CMatrix) -> f64 {
    1e-12 * (1.0 + m.max_abs())
}

/// Pack complex numbers into interleaved `[re, im, re, im, ...]` reals.
pub fn pack_complex(src: &[C64], dst: &mut [f64]) {
    debug_assert_eq!(dst.len(), 2 * src.len());
    for (z, pair) in src.iter().zip(dst.chunks_exact_mut(2)) {
        pair[0] = z.re;
        pair[1] = z.im;
    }
}

pub fn unpack_complex(src: &[f64]) -> Vec<C64> {
    src.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect()
}
