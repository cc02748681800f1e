//! Exact and numerical one-excitation dynamics of `N` identical two-level
//! atoms sharing a lossy single-mode cavity and a common radiation bath.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: physical parameters, atom geometry and the distance-dependent
//!   collective decay / dipole shift kernels.
//! - [`space`]: the `N + 2` dimensional zero/one-excitation basis and every
//!   operator restricted to it.
//! - [`lindblad`]: the full master-equation generator and a fixed-step RK4
//!   propagator, used as the numerical oracle.
//! - [`transform`]: the collective rotation `U` that decouples `N - 1` atoms.
//! - [`analytic`]: the closed-form solution in the rotated frame and its
//!   asymptotic limit.
//! - [`concurrence`]: pair reduced states, Wootters concurrence and the
//!   conditional closed form.
//! - [`dicke`]: subradiant Dicke structure of the trapped state.
//! - [`scenario`]: configuration files, bundled scenarios and CSV emission.
//!
//! Internally `hbar = 1`: every Hamiltonian is an angular-frequency matrix
//! (rad/s) and every rate is in 1/s.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod concurrence;
pub mod dicke;
pub mod error;
pub mod lindblad;
pub mod model;
pub mod scenario;
pub mod space;
pub mod transform;

pub use error::{ConfigIssue, Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix used for every operator and density matrix.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector (state vectors).
pub type CVector = nalgebra::DVector<Complex64>;
