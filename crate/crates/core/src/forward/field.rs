use super::grid::Grid;
use super::ForwardError;
use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

/// Discrete `p(t_n, x_k)`, one row per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub speed: Array1<f64>,
    pub values: Array2<f64>,
}

impl WaveField {
    pub fn zeros(grid: &Grid, speed: &Array1<f64>) -> Self {
        WaveField { grid: grid.clone(), speed: speed.clone(), values: Array2::zeros((grid.levels(), grid.n_nodes())) }
    }

    pub fn from_values(grid: &Grid, speed: &Array1<f64>, values: Array2<f64>) -> Result<Self, ForwardError> {
        check_shape(grid, values.view(), "field")?;
        check_speed(grid, speed)?;
        Ok(WaveField { grid: grid.clone(), speed: speed.clone(), values })
    }

    /// Sample `f(t, x)` on the grid.
    pub fn sample(grid: &Grid, speed: &Array1<f64>, f: impl Fn(f64, &[f64]) -> f64) -> Self {
        let coords: Vec<Vec<f64>> = (0..grid.n_nodes()).map(|n| grid.coords(n)).collect();
        let values = Array2::from_shape_fn((grid.levels(), grid.n_nodes()), |(l, n)| f(grid.time(l), &coords[n]));
        WaveField { grid: grid.clone(), speed: speed.clone(), values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Boundary values as a Dirichlet trace.
    pub fn dirichlet_trace(&self) -> BoundaryTrace {
        let nodes = self.grid.boundary_nodes();
        let values = self.values.select(Axis(1), &nodes);
        BoundaryTrace { kind: TraceKind::Dirichlet, dt: self.grid.dt, nodes, values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Dirichlet,
    Neumann,
}

/// Time series on the boundary nodes, one row per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub kind: TraceKind,
    pub dt: f64,
    /// Grid node index of each column.
    pub nodes: Vec<usize>,
    pub values: Array2<f64>,
}

impl BoundaryTrace {
    pub fn zeros(grid: &Grid, kind: TraceKind) -> Self {
        let nodes = grid.boundary_nodes();
        BoundaryTrace { kind, dt: grid.dt, values: Array2::zeros((grid.levels(), nodes.len())), nodes }
    }

    /// Dirichlet data `g(t, x)` sampled on the boundary of `grid`.
    pub fn sample(grid: &Grid, g: impl Fn(f64, &[f64]) -> f64) -> Self {
        let nodes = grid.boundary_nodes();
        let coords: Vec<Vec<f64>> = nodes.iter().map(|&n| grid.coords(n)).collect();
        let values = Array2::from_shape_fn((grid.levels(), nodes.len()), |(l, b)| g(grid.time(l), &coords[b]));
        BoundaryTrace { kind: TraceKind::Dirichlet, dt: grid.dt, nodes, values }
    }

    pub fn levels(&self) -> usize {
        self.values.nrows()
    }

    /// `Σ_j a_j f_j` over traces of the same kind and layout.
    pub fn combine(terms: &[(f64, &BoundaryTrace)]) -> Result<Self, ForwardError> {
        let (_, first) = terms.first().ok_or_else(|| ForwardError::Shape("empty combination".into()))?;
        let mut values = Array2::zeros(first.values.raw_dim());
        for (a, t) in terms {
            if t.kind != first.kind || t.nodes != first.nodes || t.values.dim() != first.values.dim() {
                return Err(ForwardError::Shape("traces differ in kind or layout".into()));
            }
            values.scaled_add(*a, &t.values);
        }
        Ok(BoundaryTrace { kind: first.kind, dt: first.dt, nodes: first.nodes.clone(), values })
    }

    pub fn scaled(&self, a: f64) -> Self {
        BoundaryTrace { values: &self.values * a, ..self.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L² norm over `(0, T) × ∂Ω` (trapezoid in time, counting
    /// measure on the boundary nodes).
    pub fn l2_norm(&self) -> f64 {
        let l = self.levels();
        let mut acc = 0.0;
        for (n, row) in self.values.outer_iter().enumerate() {
            let w = if n == 0 || n + 1 == l { 0.5 } else { 1.0 };
            acc += w * row.iter().map(|v| v * v).sum::<f64>();
        }
        (acc * self.dt).sqrt()
    }

    pub fn l2_distance(&self, other: &BoundaryTrace) -> f64 {
        BoundaryTrace { values: &self.values - &other.values, ..self.clone() }.l2_norm()
    }
}

pub(crate) fn check_shape(grid: &Grid, a: ArrayView2<f64>, what: &str) -> Result<(), ForwardError> {
    if a.dim() != (grid.levels(), grid.n_nodes()) {
        return Err(ForwardError::Shape(format!("{what} has shape {:?}, grid needs ({}, {})", a.dim(), grid.levels(), grid.n_nodes())));
    }
    Ok(())
}

pub(crate) fn check_speed(grid: &Grid, speed: &Array1<f64>) -> Result<f64, ForwardError> {
    if speed.len() != grid.n_nodes() {
        return Err(ForwardError::Shape(format!("speed has {} entries, grid has {} nodes", speed.len(), grid.n_nodes())));
    }
    if speed.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(ForwardError::Shape("speed must be positive and finite".into()));
    }
    Ok(speed.iter().fold(0.0, |m: f64, &c| m.max(c)))
}

/// Second time difference. Level 0 reflects the history (`u⁻¹ = u¹`, zero
/// initial velocity), which matches the Taylor half step of the leapfrog
/// scheme; the last level uses a second-order backward formula.
pub fn time_dd(u: ArrayView2<f64>, dt: f64) -> Array2<f64> {
    let l = u.nrows();
    let mut out = Array2::zeros(u.raw_dim());
    let inv = dt.powi(-2);
    for n in 0..l {
        let mut row = out.row_mut(n);
        if n + 1 < l {
            let next = u.row(n + 1);
            let cur = u.row(n);
            if n == 0 {
                ndarray::Zip::from(&mut row).and(&next).and(&cur).for_each(|o, &a, &b| *o = 2.0 * (a - b) * inv);
            } else {
                let prev = u.row(n - 1);
                ndarray::Zip::from(&mut row).and(&next).and(&cur).and(&prev).for_each(|o, &a, &b, &c| {
                    *o = (a - 2.0 * b + c) * inv;
                });
            }
        } else {
            let at = |k: usize| u.row(n - k);
            ndarray::Zip::from(&mut row).and(&at(0)).and(&at(1)).and(&at(2)).and(&at(3)).for_each(|o, &a, &b, &c, &d| {
                *o = (2.0 * a - 5.0 * b + 4.0 * c - d) * inv;
            });
        }
    }
    out
}

/// First time difference: centred inside, one-sided second order at both
/// ends.
pub fn time_d(u: ArrayView2<f64>, dt: f64) -> Array2<f64> {
    let l = u.nrows();
    let mut out = Array2::zeros(u.raw_dim());
    let inv = 0.5 / dt;
    for n in 0..l {
        let mut row = out.row_mut(n);
        if n + 1 < l {
            let next = u.row(n + 1);
            if n == 0 {
                let after = u.row(2);
                ndarray::Zip::from(&mut row).and(&u.row(0)).and(&next).and(&after).for_each(|o, &a, &b, &c| {
                    *o = (-3.0 * a + 4.0 * b - c) * inv;
                });
            } else {
                let prev = u.row(n - 1);
                ndarray::Zip::from(&mut row).and(&next).and(&prev).for_each(|o, &a, &c| *o = (a - c) * inv);
            }
        } else {
            let (a, b, c) = (u.row(n), u.row(n - 1), u.row(n - 2));
            ndarray::Zip::from(&mut row).and(&a).and(&b).and(&c).for_each(|o, &a, &b, &c| {
                *o = (3.0 * a - 4.0 * b + c) * inv;
            });
        }
    }
    out
}
