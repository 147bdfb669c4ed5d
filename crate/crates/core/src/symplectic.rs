//! Bogoliubov maps as symplectic matrices with a system/environment partition.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};

/// Tolerance used when a map is validated at construction.
pub const VALIDATION_TOL: f64 = 1e-8;
/// Default tolerance of the classicality predicates.
pub const CLASSICALITY_TOL: f64 = 1e-9;

/// `X = [[X_up, X_down], [X_down*, X_up*]]` acting on `(a, a†)`.
///
/// The first `n_sys` modes are the system, the remaining `n_env` the environment.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMap {
    n_sys: usize,
    n_env: usize,
    x: CMatrix,
}

/// Sub-blocks of `X_up` and `X_down` split along the partition:
/// `X = [[S, C], [C', E]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockView {
    pub up_s: CMatrix,
    pub up_c: CMatrix,
    pub up_cp: CMatrix,
    pub up_e: CMatrix,
    pub down_s: CMatrix,
    pub down_c: CMatrix,
    pub down_cp: CMatrix,
    pub down_e: CMatrix,
}

impl BogoliubovMap {
    pub fn from_blocks(x_up: &CMatrix, x_down: &CMatrix, n_sys: usize, n_env: usize) -> Result<Self> {
        Self::from_blocks_with_tol(x_up, x_down, n_sys, n_env, VALIDATION_TOL)
    }

    pub fn from_blocks_with_tol(
        x_up: &CMatrix,
        x_down: &CMatrix,
        n_sys: usize,
        n_env: usize,
        tol: f64,
    ) -> Result<Self> {
        let n = n_sys + n_env;
        if n == 0 {
            return Err(Error::DimensionMismatch("a Bogoliubov map needs at least one mode".into()));
        }
        if x_up.shape() != (n, n) || x_down.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "blocks must be {n}x{n}, got {:?} and {:?}",
                x_up.shape(),
                x_down.shape()
            )));
        }
        let x = CMatrix::from_blocks(x_up, x_down, &x_down.conj(), &x_up.conj())?;
        Self::validated(x, n_sys, n_env, tol)
    }

    /// Wraps a full `2N x 2N` matrix, checking the conjugation structure and the symplectic property.
    pub fn from_matrix(x: CMatrix, n_sys: usize, n_env: usize) -> Result<Self> {
        Self::from_matrix_with_tol(x, n_sys, n_env, VALIDATION_TOL)
    }

    pub fn from_matrix_with_tol(x: CMatrix, n_sys: usize, n_env: usize, tol: f64) -> Result<Self> {
        let n = n_sys + n_env;
        if n == 0 || x.shape() != (2 * n, 2 * n) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {0}x{0} matrix, got {1:?}",
                2 * n,
                x.shape()
            )));
        }
        let up = x.block(0, 0, n, n);
        let down = x.block(0, n, n, n);
        let r21 = x.block(n, 0, n, n).max_abs_diff(&down.conj());
        if r21 > tol {
            return Err(Error::StructureViolation {
                what: "lower-left block is not the conjugate of X_down",
                residual: r21,
            });
        }
        let r22 = x.block(n, n, n, n).max_abs_diff(&up.conj());
        if r22 > tol {
            return Err(Error::StructureViolation {
                what: "lower-right block is not the conjugate of X_up",
                residual: r22,
            });
        }
        Self::validated(x, n_sys, n_env, tol)
    }

    fn validated(x: CMatrix, n_sys: usize, n_env: usize, tol: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NotSymplectic { residual: f64::INFINITY });
        }
        let map = Self { n_sys, n_env, x };
        let residual = map.verify_symplectic();
        if residual > tol {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(map)
    }

    pub fn identity(n_sys: usize, n_env: usize) -> Self {
        let n = n_sys + n_env;
        Self {
            n_sys,
            n_env,
            x: CMatrix::identity(2 * n),
        }
    }

    /// Passive map `X_up = u`, `X_down = 0`; `u` must be unitary.
    pub fn passive(u: &CMatrix, n_sys: usize, n_env: usize) -> Result<Self> {
        let n = u.rows();
        Self::from_blocks(u, &CMatrix::zeros(n, n), n_sys, n_env)
    }

    /// `u = exp(iH)` with `H` a random Hermitian matrix of entries in `[-scale, scale]`.
    pub fn random_passive(n_sys: usize, n_env: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let n = n_sys + n_env;
        let h = random_matrix(n, scale, rng).hermitian_part();
        let u = h.scale(C64::i()).expm().expect("square generator");
        Self::passive(&u, n_sys, n_env).expect("exponential of an anti-Hermitian matrix is unitary")
    }

    /// `exp(K)` with `K = [[A, B], [B*, A*]]`, `A` anti-Hermitian and `B` symmetric.
    pub fn random_symplectic(n_sys: usize, n_env: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let n = n_sys + n_env;
        let a = random_matrix(n, scale, rng).hermitian_part().scale(C64::i());
        let b = random_matrix(n, scale, rng);
        let b = (&b + &b.transpose()).scale_real(0.5);
        let k = CMatrix::from_blocks(&a, &b, &b.conj(), &a.conj()).expect("blocks are n x n");
        let x = k.expm().expect("square generator");
        Self::from_matrix(x, n_sys, n_env).expect("exponential of a symplectic generator")
    }

    pub fn n_sys(&self) -> usize {
        self.n_sys
    }

    pub fn n_env(&self) -> usize {
        self.n_env
    }

    pub fn n_modes(&self) -> usize {
        self.n_sys + self.n_env
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.x
    }

    pub fn x_up(&self) -> CMatrix {
        let n = self.n_modes();
        self.x.block(0, 0, n, n)
    }

    pub fn x_down(&self) -> CMatrix {
        let n = self.n_modes();
        self.x.block(0, n, n, n)
    }

    /// `max |X S X† - S|` with `S = diag(1_N, -1_N)`.
    pub fn verify_symplectic(&self) -> f64 {
        let n2 = self.x.rows();
        let n = n2 / 2;
        let xs = CMatrix::from_fn(n2, n2, |i, j| if j < n { self.x[(i, j)] } else { -self.x[(i, j)] });
        let mut prod = &xs * &self.x.adjoint();
        for i in 0..n2 {
            prod[(i, i)] -= if i < n { 1.0 } else { -1.0 };
        }
        prod.max_abs()
    }

    pub fn blocks(&self) -> BlockView {
        let (s, e) = (self.n_sys, self.n_env);
        let up = self.x_up();
        let down = self.x_down();
        BlockView {
            up_s: up.block(0, 0, s, s),
            up_c: up.block(0, s, s, e),
            up_cp: up.block(s, 0, e, s),
            up_e: up.block(s, s, e, e),
            down_s: down.block(0, 0, s, s),
            down_c: down.block(0, s, s, e),
            down_cp: down.block(s, 0, e, s),
            down_e: down.block(s, s, e, e),
        }
    }

    /// `self · other`: apply `other` first.
    pub fn compose(&self, other: &BogoliubovMap) -> Result<Self> {
        if self.n_sys != other.n_sys || self.n_env != other.n_env {
            return Err(Error::DimensionMismatch(format!(
                "partitions differ: ({}, {}) vs ({}, {})",
                self.n_sys, self.n_env, other.n_sys, other.n_env
            )));
        }
        let x = self.x.matmul(&other.x)?;
        Self::validated(x, self.n_sys, self.n_env, VALIDATION_TOL)
    }

    /// `X⁻¹ = S X† S`.
    pub fn inverse(&self) -> Self {
        let n2 = self.x.rows();
        let n = n2 / 2;
        let xa = self.x.adjoint();
        let x = CMatrix::from_fn(n2, n2, |i, j| if (i < n) == (j < n) { xa[(i, j)] } else { -xa[(i, j)] });
        Self {
            n_sys: self.n_sys,
            n_env: self.n_env,
            x,
        }
    }

    /// Same matrix, first `n_sys` modes taken as the system.
    pub fn repartition(&self, n_sys: usize) -> Result<Self> {
        let n = self.n_modes();
        if n_sys > n {
            return Err(Error::IndexOutOfRange { index: n_sys, len: n });
        }
        Ok(Self {
            n_sys,
            n_env: n - n_sys,
            x: self.x.clone(),
        })
    }

    /// `max |X_down| <= tol`.
    pub fn is_classical_closed(&self, tol: f64) -> bool {
        self.x_down().max_abs() <= tol
    }

    /// `max |X_down_S| <= tol`.
    pub fn is_classical_open(&self, tol: f64) -> bool {
        self.blocks().down_s.max_abs() <= tol
    }
}

fn random_matrix(n: usize, scale: f64, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
    })
}
