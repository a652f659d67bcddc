//! Numerical toolkit for a quasilinear (Westervelt-type) wave inverse problem.
//!
//! The crate is split by role:
//!
//! - [`lightcone`]: Minkowski covector algebra, the four-covector construction,
//!   pair/triple ratios, Laurent fitting and the recovery determinant.
//! - [`symbols`]: interaction coefficients, the synthetic measurement oracle,
//!   recovery of the nonlinearity coefficients and symbol-profile convolution.
//! - [`forward`]: finite-difference forward solver, Picard iteration and the
//!   discrete Dirichlet-to-Neumann map.
//! - [`multilinear`]: the asymptotic-expansion cascade and finite-difference
//!   ε-derivatives of the nonlinear solver.
//! - [`geodesics`]: null bicharacteristics, reflections, causal relations and
//!   related geometry for `g = -dt² + c⁻²(x)|dx|²`.

// `!(a > b)` comparisons are deliberate: they reject NaN along with the bound
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod forward;
pub mod geodesics;
pub mod lightcone;
pub mod multilinear;
pub mod profile;
pub mod real;
pub mod symbols;

pub use profile::NonlinearityProfile;
pub use real::{Dd, Real};
