//! Multilinearization of the nonlinear boundary-value problem: the cascade
//! of interaction terms `A₂, A₃, A₄` built from linear solutions, mixed
//! ε-derivatives of the full solver by tensor divided differences, and the
//! leading `β_N` block of the N-th linearization.

mod cascade;
mod divided;
mod stencil;

pub use cascade::{cascade, cascade_derivative, CascadeTerms, ProbeFamily};
pub use divided::{assemble_u, cross_check, divided_difference, CrossCheckReport, DividedDifference, NonlinearSolver};
pub use stencil::{central_nodes, central_stencil, fornberg_weights};

use crate::forward::ForwardError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultilinearError {
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error("stencil corner {corner:?} failed: {source}")]
    StencilDiverged { corner: Vec<f64>, source: ForwardError },
    #[error("bad pattern: {0}")]
    BadPattern(String),
    #[error("cascade order {0} not available (2, 3 or 4)")]
    BadOrder(usize),
    #[error("{0}")]
    Family(String),
}
