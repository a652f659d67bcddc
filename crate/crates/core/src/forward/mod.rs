//! Finite-difference forward solver for `∂_t²p − c²Δp = F(p)` on an interval
//! or a rectangle with Dirichlet data, plus the discrete Dirichlet-to-Neumann
//! map and the Picard iteration for the nonlinear problem.

mod field;
mod grid;
pub mod io;
mod linear;
mod nonlinear;
mod trace;

pub use field::{time_d, time_dd, BoundaryTrace, TraceKind, WaveField};
pub use grid::Grid;
pub use linear::{solve_linear, solve_source};
pub use nonlinear::{discrete_residual, eval_nonlinearity, lift_boundary, solve_nonlinear, IterationReport, NonlinearForm, PicardOptions};
pub use trace::{dn_trace, zm_norm, zm_norm_values};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("CFL condition violated: Courant number {courant:.4} > 1")]
    CflViolation { courant: f64 },
    #[error("non-finite value at time level {level}")]
    NonFiniteField { level: usize },
    #[error("Picard iteration did not converge after {iterations} iterations (residual {residual:.3e}): {reason}")]
    NoConvergence { iterations: usize, residual: f64, reason: String },
    #[error("time-difference order {0} not supported (at most 2)")]
    BadOrder(usize),
    #[error("boundary data must be a Dirichlet trace")]
    NotDirichlet,
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Format(String),
}
