//! Nonlinear forward solve with Dirichlet data and its DN trace.

use ndarray::Array1;
use nlwave::forward::{discrete_residual, dn_trace, io, solve_nonlinear, BoundaryTrace, Grid, NonlinearForm, PicardOptions};
use nlwave::NonlinearityProfile;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

use crate::report::{num, Report, Table, Verdict};

/// Dirichlet data on the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Zero,
    /// `a sin⁴(π (t − start)/width)` on `[start, start + width]`, placed on
    /// the face `x_axis = lower` (or `upper`) and zero elsewhere.
    Pulse {
        amplitude: f64,
        start: f64,
        width: f64,
        #[serde(default)]
        axis: usize,
        #[serde(default)]
        upper: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Picard {
    pub tol: f64,
    pub max_iter: usize,
    pub form: NonlinearForm,
    pub smallness: f64,
}

impl Default for Picard {
    fn default() -> Self {
        let d = PicardOptions::default();
        Picard { tol: d.tol, max_iter: d.max_iter, form: d.form, smallness: d.smallness }
    }
}

impl From<&Picard> for PicardOptions {
    fn from(p: &Picard) -> Self {
        PicardOptions { tol: p.tol, max_iter: p.max_iter, form: p.form, smallness: p.smallness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Box corners and cell counts, one entry per spatial axis (1 or 2).
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
    pub t_final: f64,
    pub courant: f64,
    /// Constant wave speed.
    pub speed: f64,
    pub beta: NonlinearityProfile,
    pub source: Source,
    pub picard: Picard,
    /// Bound on the discrete scheme residual of the converged field.
    pub residual_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            lower: vec![0.0],
            upper: vec![1.0],
            cells: vec![200],
            t_final: 1.0,
            courant: 0.9,
            speed: 1.0,
            beta: NonlinearityProfile::lower(0.5, 0.0, 0.0),
            source: Source::Pulse { amplitude: 0.05, start: 0.1, width: 0.3, axis: 0, upper: false },
            picard: Picard::default(),
            residual_tol: 1e-8,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        let d = self.lower.len();
        if !(1..=2).contains(&d) || self.upper.len() != d || self.cells.len() != d {
            return Err("lower, upper and cells need the same length, 1 or 2".into());
        }
        if self.lower.iter().zip(&self.upper).any(|(a, b)| !(a < b)) || self.cells.iter().any(|&n| n < 2) {
            return Err("need lower < upper and at least 2 cells per axis".into());
        }
        if !(self.t_final > 0.0 && self.courant > 0.0 && self.courant <= 1.0 && self.speed > 0.0) {
            return Err("t_final, speed must be positive and courant in (0, 1]".into());
        }
        if let Source::Pulse { amplitude, start, width, axis, .. } = self.source {
            if axis >= d || !(width > 0.0) || !amplitude.is_finite() || !start.is_finite() {
                return Err("pulse needs a valid axis, a positive width and finite amplitude".into());
            }
        }
        if !(self.picard.tol >= 0.0) || self.picard.max_iter == 0 || !(self.residual_tol > 0.0) {
            return Err("picard tol must be non-negative, max_iter positive, residual_tol positive".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, String> {
        let g = match self.lower.len() {
            1 => Grid::line(self.lower[0], self.upper[0], self.cells[0], self.t_final, self.courant, self.speed),
            _ => Grid::rect(
                [self.lower[0], self.lower[1]],
                [self.upper[0], self.upper[1]],
                [self.cells[0], self.cells[1]],
                self.t_final,
                self.courant,
                self.speed,
            ),
        };
        g.map_err(|e| e.to_string())
    }
}

pub fn boundary_data(grid: &Grid, source: &Source) -> BoundaryTrace {
    match *source {
        Source::Zero => BoundaryTrace::sample(grid, |_, _| 0.0),
        Source::Pulse { amplitude, start, width, axis, upper } => {
            let face = if upper { grid.upper[axis] } else { grid.lower[axis] };
            BoundaryTrace::sample(grid, move |t, x| {
                if x[axis] == face && (start..start + width).contains(&t) {
                    amplitude * (PI * (t - start) / width).sin().powi(4)
                } else {
                    0.0
                }
            })
        }
    }
}

pub fn run(p: &Params, report: &mut Report) {
    let grid = match p.grid() {
        Ok(g) => g,
        Err(e) => return report.fail_with("grid", e),
    };
    let speed = Array1::from_elem(grid.n_nodes(), p.speed);
    let data = boundary_data(&grid, &p.source);
    let opts = PicardOptions::from(&p.picard);
    let (field, iter) = match solve_nonlinear(&grid, &speed, &p.beta, &data, &opts) {
        Ok(x) => x,
        Err(e) => return report.fail_with("solve_nonlinear", e),
    };
    let residual = match discrete_residual(&field, &p.beta, opts.form) {
        Ok(r) => r,
        Err(e) => return report.fail_with("discrete_residual", e),
    };
    let trace = dn_trace(&field);

    report.verdict(Verdict::holds("Picard iteration converged", iter.converged));
    report.verdict(Verdict::at_most("discrete scheme residual", residual, p.residual_tol));
    if data.max_abs() == 0.0 {
        report.verdict(Verdict::at_most("zero data gives the zero solution (max |p|)", field.max_abs(), 0.0));
    }
    report.results = json!({
        "grid": { "dim": grid.dim(), "nodes": grid.n_nodes(), "levels": grid.levels(), "dt": grid.dt },
        "data_max": data.max_abs(),
        "field_max": field.max_abs(),
        "dn_trace_l2": trace.l2_norm(),
        "dn_trace_max": trace.max_abs(),
        "discrete_residual": residual,
        "iterations": iter,
    });

    let mut iters = Table::new("iterations.csv", &["iteration", "residual"]);
    for (k, r) in iter.residuals.iter().enumerate() {
        iters.push(vec![(k + 1).to_string(), num(*r)]);
    }
    report.tables.push(iters);
    let mut buf = Vec::new();
    match io::write_trace_csv(&mut buf, &trace) {
        Ok(()) => report.files.push(("dn_trace.csv".into(), buf)),
        Err(e) => report.fail_with("dn_trace.csv", e),
    }
    if grid.dim() == 1 {
        let mut buf = Vec::new();
        match io::write_field_csv(&mut buf, &field) {
            Ok(()) => report.files.push(("field.csv".into(), buf)),
            Err(e) => report.fail_with("field.csv", e),
        }
    }
}
