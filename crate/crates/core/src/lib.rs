//! Reduced-state-of-the-field (RSF) toolkit.
//!
//! The crate covers four layers:
//!
//! * [`numerics`]: small dense complex linear algebra, a Hermitian Jacobi
//!   eigensolver, an adaptive Dormand–Prince integrator with dense output and
//!   finite differences.
//! * [`symplectic`] and [`rsf`]: Bogoliubov maps as symplectic matrices, the
//!   reduced / conjugate / generalized fields and their transformation laws.
//! * [`kinetics`]: the reduced kinetic equations and generator extraction from
//!   smooth Bogoliubov families.
//! * [`casimir`], [`amplifier`] and [`fock_oracle`]: the moving-medium Casimir
//!   simulator, the Gaussian amplifier closed forms and a truncated two-mode
//!   Fock-space brute-force oracle.
//!
//! Natural units (ħ = c = 1) are used throughout.

pub mod amplifier;
pub mod casimir;
pub mod error;
pub mod fock_oracle;
pub mod kinetics;
pub mod numerics;
pub mod rsf;
pub mod symplectic;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, C64};
