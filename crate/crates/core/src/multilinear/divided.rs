use super::cascade::{cascade_derivative, CascadeTerms, ProbeFamily};
use super::stencil::central_stencil;
use super::MultilinearError;
use crate::forward::{dn_trace, solve_nonlinear, solve_source, time_dd, BoundaryTrace, ForwardError, Grid, PicardOptions, WaveField};
use crate::NonlinearityProfile;
use itertools::Itertools;
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::Serialize;

/// Full nonlinear forward map `f ↦ p` with fixed medium and options.
#[derive(Debug, Clone)]
pub struct NonlinearSolver {
    pub grid: Grid,
    pub speed: Array1<f64>,
    pub beta: NonlinearityProfile,
    pub opts: PicardOptions,
}

impl NonlinearSolver {
    pub fn solve(&self, f: &BoundaryTrace) -> Result<WaveField, ForwardError> {
        solve_nonlinear(&self.grid, &self.speed, &self.beta, f, &self.opts).map(|(p, _)| p)
    }
}

#[derive(Debug, Clone)]
pub struct DividedDifference {
    pub pattern: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub field: Array2<f64>,
    pub trace: BoundaryTrace,
    /// Estimated error from rounding and solver tolerance, in max norm.
    pub noise_estimate: f64,
    /// Set when the estimated noise exceeds 10% of the result.
    pub roundoff_warning: bool,
    pub solves: usize,
}

/// Relative error of a converged corner solve (the Picard stopping floor).
const CORNER_NOISE: f64 = 1e-12;

/// `∂^pattern_ε p` at `ε = 0` for data `Σ ε_j f_j`, by a tensor product of
/// minimal central stencils with steps `epsilons`.
pub fn divided_difference(
    solver: &NonlinearSolver,
    family: &ProbeFamily,
    pattern: &[usize],
    epsilons: &[f64],
) -> Result<DividedDifference, MultilinearError> {
    if pattern.len() != family.len() || epsilons.len() != family.len() {
        return Err(MultilinearError::BadPattern(format!(
            "pattern {pattern:?} and steps must have one entry per probe ({})",
            family.len()
        )));
    }
    if pattern.iter().all(|&a| a == 0) {
        return Err(MultilinearError::BadPattern("empty pattern".into()));
    }
    let active: Vec<usize> = (0..pattern.len()).filter(|&j| pattern[j] > 0).collect();
    if active.iter().any(|&j| !(epsilons[j] > 0.0)) {
        return Err(MultilinearError::BadPattern("steps must be positive".into()));
    }
    let stencils: Vec<(Vec<f64>, Vec<f64>)> = active.iter().map(|&j| central_stencil(pattern[j])).collect();
    let scale: f64 = active.iter().map(|&j| epsilons[j].powi(pattern[j] as i32)).product();

    // corner = (weight, amplitude per active probe)
    let corners: Vec<(f64, Vec<f64>)> = stencils
        .iter()
        .map(|(n, w)| n.iter().copied().zip(w.iter().copied()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|pts| {
            let weight: f64 = pts.iter().map(|&(_, w)| w).product();
            let amps = pts.iter().zip(&active).map(|(&(x, _), &j)| x * epsilons[j]).collect();
            (weight, amps)
        })
        .filter(|(w, _)| *w != 0.0)
        .collect();

    let solved: Vec<(f64, Array2<f64>)> = corners
        .par_iter()
        .map(|(weight, amps)| {
            let terms: Vec<(f64, &BoundaryTrace)> = amps.iter().zip(&active).map(|(&a, &j)| (a, &family.sources[j])).collect();
            let data = BoundaryTrace::combine(&terms)?;
            let p = solver.solve(&data).map_err(|source| MultilinearError::StencilDiverged { corner: amps.clone(), source })?;
            Ok((*weight, p.values))
        })
        .collect::<Result<_, MultilinearError>>()?;

    let mut field = Array2::zeros(solved[0].1.raw_dim());
    let mut magnitude = 0.0;
    for (w, values) in &solved {
        field.scaled_add(*w, values);
        magnitude += w.abs() * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    field /= scale;
    let weight_sum: f64 = solved.iter().map(|(w, _)| w.abs()).sum();
    // each corner carries the iteration error left by the stopping rule
    let noise_estimate = (magnitude * CORNER_NOISE + weight_sum * solver.opts.tol) / scale;
    let peak = field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let trace = dn_trace(&family.field(field.clone()));
    Ok(DividedDifference {
        pattern: pattern.to_vec(),
        epsilons: epsilons.to_vec(),
        field,
        trace,
        noise_estimate,
        roundoff_warning: noise_estimate > 0.1 * peak,
        solves: solved.len(),
    })
}

/// DN trace of `N(N−1)(N−2) Q(β_N ∂_t²(v₁^{N−3} v₂ v₃ v₄))`, the leading
/// `β_N` block of the N-th linearization for the pattern `(N−3, 1, 1, 1)`.
pub fn assemble_u(family: &ProbeFamily, beta: &NonlinearityProfile, n: u32) -> Result<BoundaryTrace, MultilinearError> {
    if n < 4 || family.len() != 4 {
        return Err(MultilinearError::BadPattern(format!("need N >= 4 and four probes, got N={n} with {} probes", family.len())));
    }
    let v = &family.linear;
    let mut prod = v[0].mapv(|x| x.powi(n as i32 - 3));
    prod *= &v[1];
    prod *= &v[2];
    prod *= &v[3];
    let factor = (n * (n - 1) * (n - 2)) as f64 * beta.beta(n);
    let source = time_dd(prod.view(), family.grid.dt) * factor;
    let w = solve_source(&family.grid, &family.speed, &source)?;
    Ok(dn_trace(&w))
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub pattern: Vec<usize>,
    /// Common step per sweep point (each probe uses it times its base
    /// amplitude ratio).
    pub epsilons: Vec<f64>,
    pub cascade_norm: f64,
    pub stencil_norm: Vec<f64>,
    pub rel_err: Vec<f64>,
    /// Least-squares slope of `log rel_err` against `log ε` over the points
    /// before the rounding floor.
    pub slope_estimate: f64,
    pub best_rel_err: f64,
    pub roundoff_warning: Vec<bool>,
}

/// Compares stencil and cascade DN traces in discrete L² over a sweep that
/// starts at the family amplitudes and halves them `points − 1` times.
pub fn cross_check(
    solver: &NonlinearSolver,
    family: &ProbeFamily,
    terms: &CascadeTerms,
    pattern: &[usize],
    points: usize,
) -> Result<CrossCheckReport, MultilinearError> {
    let reference = dn_trace(&family.field(cascade_derivative(terms, pattern)?));
    let cascade_norm = reference.l2_norm();
    let base = family.epsilons.iter().copied().fold(f64::NAN, f64::max);
    let mut report = CrossCheckReport {
        pattern: pattern.to_vec(),
        epsilons: Vec::new(),
        cascade_norm,
        stencil_norm: Vec::new(),
        rel_err: Vec::new(),
        slope_estimate: f64::NAN,
        best_rel_err: f64::INFINITY,
        roundoff_warning: Vec::new(),
    };
    for k in 0..points {
        let shrink = 0.5f64.powi(k as i32);
        let eps: Vec<f64> = family.epsilons.iter().map(|e| e * shrink).collect();
        let dd = divided_difference(solver, family, pattern, &eps)?;
        let err = dd.trace.l2_distance(&reference) / cascade_norm;
        report.epsilons.push(base * shrink);
        report.stencil_norm.push(dd.trace.l2_norm());
        report.rel_err.push(err);
        report.roundoff_warning.push(dd.roundoff_warning);
        report.best_rel_err = report.best_rel_err.min(err);
    }
    report.slope_estimate = floor_limited_slope(&report.epsilons, &report.rel_err);
    Ok(report)
}

/// Slope over the leading run of strictly decreasing errors.
fn floor_limited_slope(eps: &[f64], err: &[f64]) -> f64 {
    let mut end = 1;
    while end < err.len() && err[end] < err[end - 1] {
        end += 1;
    }
    if end < 2 {
        return f64::NAN;
    }
    let xs: Vec<f64> = eps[..end].iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = err[..end].iter().map(|e| e.ln()).collect();
    let n = end as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
