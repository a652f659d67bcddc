//! Null geometry of `g = −dt² + c⁻²(t, x′)|dx′|²` on `ℝ × Ω`.
//!
//! Bicharacteristics are integrated as the Hamiltonian flow of
//! `b(x, ζ) = −ζ₀² + c²|ζ′|²` with classical RK4. Boundary hits either end a
//! path or reflect it by the mirror law. On top of that sit causal
//! relations via graph distances, regular intersections of several paths,
//! the observable-point construction, conjugate points of spatial geodesics
//! and flowouts of small fans of directions.

mod causal;
mod conjugate;
mod flow;
mod flowout;
mod intersect;
mod metric;
mod observable;

pub use causal::{causal_relation, spatial_distance, CausalRelation, GraphDistance, CAUSAL_TOL};
pub use conjugate::conjugate_time;
pub use flow::{reflect, trace_bichar, BicharPath, BoundaryEvent, EventKind, PhasePoint, EVENT_TOL, GLANCING_TOL, LIGHTLIKE_TOL};
pub use flowout::{
    fan_intersections, flowout_fan, CutReport, Fan, FanIntersection, FlowoutConfig, InteriorityReport, PathWindow, MAX_APERTURE,
};
pub use intersect::{regular_intersection, Intersection};
pub use metric::{Domain, MetricModel, SpeedJet, SpeedModel};
pub use observable::{nontrapping_check, observable_point, NontrapReport, ObservablePoint};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("covector is not lightlike (b = {b:e})")]
    NotLightlike { b: f64 },
    #[error("start point lies outside the domain")]
    OutsideDomain,
    #[error("glancing boundary hit at s = {s} (cosine {cosine:e})")]
    TangentialHit { s: f64, cosine: f64 },
    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),
    #[error("paths do not meet (residual {residual:e})")]
    NoIntersection { residual: f64 },
    #[error("velocities at the intersection are degenerate")]
    DegenerateVelocities,
    #[error("no boundary hit within the time budget")]
    Trapped,
    #[error("construction needs time {needed} but only {t_final} is available")]
    TimeBudget { needed: f64, t_final: f64 },
    #[error("spatial dimension {0} not supported here")]
    UnsupportedDim(usize),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("i/o: {0}")]
    Io(String),
}
