//! Inverse-scattering toolkit for the "bad" Boussinesq equation
//! `u_tt = u_xx + (u^2)_xx + u_xxxx`.
//!
//! The crate computes scattering data (reflection coefficients `r1`, `r2`)
//! from Schwartz initial data, builds the jump matrices and diagonal
//! parametrices of the associated 3x3 Riemann-Hilbert problem, evaluates the
//! parabolic-cylinder model problems, and assembles the leading long-time
//! asymptotic term of the solution in the sector `0 < x/t < 1/sqrt(3)`.
//!
//! Modules follow the pipeline:
//!
//! * [`phase`] - exact kinematics: `l_j`, `z_j`, phase functions, saddle points
//! * [`branch`] - branch-aware logarithms with explicit cut descriptions
//! * [`spectral`] - reflection coefficients (Volterra solver and synthetic families)
//! * [`jumps`] - jump matrix templates, symmetries, lens factorizations
//! * [`parametrix`] - Cauchy integrals `delta_j`, `chi_j`, the global parametrix
//! * [`model_rhp`] - parabolic-cylinder model Riemann-Hilbert problems
//! * [`asymptotics`] - the leading-order modulated-cosine formula
//! * [`suites`] - numerical verification suites over all of the above

pub mod asymptotics;
pub mod branch;
pub mod error;
pub mod files;
pub mod jumps;
pub mod mat3;
pub mod model_rhp;
pub mod parametrix;
pub mod par;
pub mod phase;
pub mod quad;
pub mod report;
pub mod special;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Machine-level tolerance used when deciding that a point sits on the unit circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;
