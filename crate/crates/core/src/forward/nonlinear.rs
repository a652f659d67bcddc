use super::field::{check_shape, check_speed, time_d, time_dd};
use super::trace::zm_norm_values;
use super::{solve_source, BoundaryTrace, ForwardError, Grid, TraceKind, WaveField};
use crate::NonlinearityProfile;
use ndarray::{Array1, Array2, ArrayView2, Zip};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearForm {
    /// `Σ β_m D_t²(p^m)`
    #[default]
    Series,
    /// `q₁ p p_tt + q₂ p_t²` with `q₁ p = Σ m β_m p^{m−1}` and
    /// `q₂ = Σ m(m−1) β_m p^{m−2}`.
    Factored,
}

/// `F(p)` on every grid node and time level.
pub fn eval_nonlinearity(beta: &NonlinearityProfile, field: &WaveField, form: NonlinearForm) -> Array2<f64> {
    nonlinearity_values(beta, field.values.view(), field.grid.dt, form)
}

pub(crate) fn nonlinearity_values(beta: &NonlinearityProfile, p: ArrayView2<f64>, dt: f64, form: NonlinearForm) -> Array2<f64> {
    let mut out = Array2::zeros(p.raw_dim());
    if beta.is_zero() {
        return out;
    }
    match form {
        NonlinearForm::Series => {
            let top = beta.truncation();
            let mut power = p.to_owned();
            for m in 2..=top {
                power = &power * &p;
                let b = beta.beta(m);
                if b != 0.0 {
                    out.scaled_add(b, &time_dd(power.view(), dt));
                }
            }
        }
        NonlinearForm::Factored => {
            let ptt = time_dd(p, dt);
            let pt = time_d(p, dt);
            let terms: Vec<(f64, f64)> = beta.iter().map(|(m, b)| (m as f64, b)).collect();
            Zip::from(&mut out).and(p).and(&ptt).and(&pt).for_each(|o, &p, &ptt, &pt| {
                let (mut q1p, mut q2) = (0.0, 0.0);
                for &(m, b) in &terms {
                    q1p += m * b * p.powi(m as i32 - 1);
                    q2 += m * (m - 1.0) * b * p.powi(m as i32 - 2);
                }
                *o = q1p * ptt + q2 * pt * pt;
            });
        }
    }
    out
}

/// Extension of Dirichlet data into the domain: linear interpolation in 1-D,
/// transfinite (Coons) interpolation on a rectangle.
pub fn lift_boundary(grid: &Grid, f: &BoundaryTrace) -> Result<Array2<f64>, ForwardError> {
    if f.kind != TraceKind::Dirichlet {
        return Err(ForwardError::NotDirichlet);
    }
    if f.nodes != grid.boundary_nodes() || f.levels() != grid.levels() {
        return Err(ForwardError::Shape("boundary trace does not match the grid".into()));
    }
    let n = grid.n_nodes();
    let mut out = Array2::zeros((grid.levels(), n));
    let mut edge = vec![0.0; n];
    for (level, mut row) in out.outer_iter_mut().enumerate() {
        for (b, &node) in f.nodes.iter().enumerate() {
            edge[node] = f.values[[level, b]];
        }
        if grid.dim() == 1 {
            let nx = grid.cells[0];
            for i in 0..=nx {
                let u = i as f64 / nx as f64;
                row[i] = (1.0 - u) * edge[0] + u * edge[nx];
            }
        } else {
            let (nx, ny) = (grid.cells[0], grid.cells[1]);
            let g = |i: usize, j: usize| edge[grid.node(i, j)];
            for i in 0..=nx {
                let u = i as f64 / nx as f64;
                for j in 0..=ny {
                    let v = j as f64 / ny as f64;
                    let sides = (1.0 - u) * g(0, j) + u * g(nx, j) + (1.0 - v) * g(i, 0) + v * g(i, ny);
                    let corners = (1.0 - u) * (1.0 - v) * g(0, 0) + u * (1.0 - v) * g(nx, 0) + (1.0 - u) * v * g(0, ny) + u * v * g(nx, ny);
                    row[grid.node(i, j)] = sides - corners;
                }
            }
        }
    }
    Ok(out)
}

/// `D_t²u − c²Δu` at interior nodes; boundary entries are zero.
fn wave_operator(grid: &Grid, speed: &Array1<f64>, u: ArrayView2<f64>) -> Array2<f64> {
    let mut out = time_dd(u, grid.dt);
    let mut lap = vec![0.0; grid.n_nodes()];
    for (level, mut row) in out.outer_iter_mut().enumerate() {
        grid.laplacian(u.row(level).as_slice().expect("standard layout"), &mut lap);
        for k in 0..grid.n_nodes() {
            if grid.is_boundary(k) {
                row[k] = 0.0;
            } else {
                row[k] -= speed[k] * speed[k] * lap[k];
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Stop once the `Z¹` norm of successive differences drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub form: NonlinearForm,
    /// Advisory bound on `max |f|`; exceeding it is reported, not refused.
    pub smallness: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { tol: 1e-10, max_iter: 60, form: NonlinearForm::Series, smallness: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iterations: usize,
    /// `Z¹` norm of the difference between consecutive iterates.
    pub residuals: Vec<f64>,
    /// Largest ratio of consecutive residuals.
    pub contraction_estimate: f64,
    pub converged: bool,
    pub data_max: f64,
    pub exceeds_smallness: bool,
}

/// Relative size of successive differences treated as pure rounding (the
/// time difference inside the `Z¹` norm amplifies rounding by `1/dt`).
const ROUNDOFF_FLOOR: f64 = 1e-12;
/// Growth below this relative size is rounding noise, not divergence.
const STAGNATION: f64 = 1e-10;

/// Picard iteration for `∂_t²p − c²Δp = F(p)` with Dirichlet data `f`.
///
/// Writes `p = p̃ + f̃` with `f̃` the lift of `f`, and iterates
/// `p̃ ← Q(−□f̃ + F(p̃ + f̃))` where `Q` solves the linear problem with zero
/// data. `F` is evaluated explicitly on the previous iterate.
pub fn solve_nonlinear(
    grid: &Grid,
    speed: &Array1<f64>,
    beta: &NonlinearityProfile,
    f: &BoundaryTrace,
    opts: &PicardOptions,
) -> Result<(WaveField, IterationReport), ForwardError> {
    check_speed(grid, speed)?;
    let lift = lift_boundary(grid, f)?;
    let base = -wave_operator(grid, speed, lift.view());
    let data_max = f.max_abs();
    let mut report = IterationReport {
        iterations: 0,
        residuals: Vec::new(),
        contraction_estimate: 0.0,
        converged: false,
        data_max,
        exceeds_smallness: data_max > opts.smallness,
    };
    let fail = |report: &IterationReport, reason: &str| ForwardError::NoConvergence {
        iterations: report.iterations,
        residual: report.residuals.last().copied().unwrap_or(f64::NAN),
        reason: reason.to_string(),
    };

    let mut current = Array2::<f64>::zeros(lift.raw_dim());
    for _ in 0..opts.max_iter {
        let total = &current + &lift;
        let mut source = nonlinearity_values(beta, total.view(), grid.dt, opts.form);
        source += &base;
        if source.iter().any(|v| !v.is_finite()) {
            return Err(fail(&report, "non-finite nonlinearity"));
        }
        let next = match solve_source(grid, speed, &source) {
            Ok(w) => w.values,
            Err(ForwardError::NonFiniteField { .. }) => return Err(fail(&report, "linear solve blew up")),
            Err(e) => return Err(e),
        };
        let residual = zm_norm_values(grid, (&next - &current).view(), 1)?;
        let scale = zm_norm_values(grid, next.view(), 1)?;
        current = next;
        report.iterations += 1;
        report.residuals.push(residual);
        report.contraction_estimate = contraction(&report.residuals);
        if !residual.is_finite() {
            return Err(fail(&report, "non-finite residual"));
        }
        if residual <= opts.tol || residual <= ROUNDOFF_FLOOR * scale {
            report.converged = true;
            let values = current + lift;
            return Ok((WaveField { grid: grid.clone(), speed: speed.clone(), values }, report));
        }
        if report.residuals.len() >= 2 && residual >= report.residuals[report.residuals.len() - 2] {
            if residual <= STAGNATION * scale {
                // stalled at the rounding level; drop the noisy last ratio
                report.residuals.pop();
                report.iterations -= 1;
                report.contraction_estimate = contraction(&report.residuals);
                report.converged = true;
                let values = current + lift;
                return Ok((WaveField { grid: grid.clone(), speed: speed.clone(), values }, report));
            }
            return Err(fail(&report, "residual grew"));
        }
    }
    Err(fail(&report, "iteration limit reached"))
}

fn contraction(residuals: &[f64]) -> f64 {
    residuals.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

/// `max_n ‖D_t²p − c²Δp − F(p)‖_{L²}` over interior nodes and the time levels
/// where the centred difference is defined.
pub fn discrete_residual(field: &WaveField, beta: &NonlinearityProfile, form: NonlinearForm) -> Result<f64, ForwardError> {
    let grid = &field.grid;
    check_shape(grid, field.values.view(), "field")?;
    let mut r = wave_operator(grid, &field.speed, field.values.view());
    r -= &eval_nonlinearity(beta, field, form);
    let w = grid.quadrature_weights();
    let worst = (1..grid.levels() - 1)
        .map(|l| r.row(l).iter().enumerate().filter(|&(k, _)| !grid.is_boundary(k)).map(|(k, v)| w[k] * v * v).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{solve_linear, zm_norm};
    use std::f64::consts::PI;

    fn unit(grid: &Grid) -> Array1<f64> {
        Array1::ones(grid.n_nodes())
    }

    fn pulse(amplitude: f64) -> impl Fn(f64, &[f64]) -> f64 {
        move |t, x| {
            if x[0] == 0.0 && (0.1..0.4).contains(&t) {
                amplitude * (PI * (t - 0.1) / 0.3).sin().powi(4)
            } else {
                0.0
            }
        }
    }

    #[test]
    fn forms_agree_on_hand_example() {
        let g = Grid::line(0.0, 1.0, 10, 1.0, 0.5, 1.0).unwrap();
        let p = WaveField::sample(&g, &unit(&g), |t, _| t * t);
        let beta = NonlinearityProfile::single(2, 0.7).unwrap();
        let s = eval_nonlinearity(&beta, &p, NonlinearForm::Series);
        let f = eval_nonlinearity(&beta, &p, NonlinearForm::Factored);
        for l in 1..g.steps {
            let want = 12.0 * 0.7 * g.time(l).powi(2);
            assert!((s[[l, 3]] - want).abs() < 2.0 * 0.7 * g.dt * g.dt + 1e-10);
            assert!((f[[l, 3]] - want).abs() < 1e-10);
        }
        let zero = WaveField::zeros(&g, &unit(&g));
        assert_eq!(eval_nonlinearity(&beta, &zero, NonlinearForm::Series).iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
    }

    #[test]
    fn forms_agree_under_refinement() {
        let beta = NonlinearityProfile::lower(0.5, -0.3, 0.2);
        let diff = |cells: usize| {
            let g = Grid::line(0.0, 1.0, cells, 1.0, 0.5, 1.0).unwrap();
            let p = WaveField::sample(&g, &unit(&g), |t, x| (3.0 * t + x[0]).sin() * (2.0 * t).cos());
            let a = eval_nonlinearity(&beta, &p, NonlinearForm::Series);
            let b = eval_nonlinearity(&beta, &p, NonlinearForm::Factored);
            (1..g.steps).map(|l| (&a.row(l) - &b.row(l)).iter().fold(0.0f64, |m, v| m.max(v.abs()))).fold(0.0, f64::max)
        };
        let (a, b) = (diff(40), diff(80));
        assert!((a / b).log2() > 1.8, "{a} {b}");
    }

    #[test]
    fn coons_lift_matches_boundary() {
        let g = Grid::rect([0.0, 0.0], [1.0, 2.0], [5, 6], 1.0, 0.5, 1.0).unwrap();
        let f = BoundaryTrace::sample(&g, |t, x| t + x[0] * x[1] + x[1] * x[1]);
        let lift = lift_boundary(&g, &f).unwrap();
        for (b, &node) in f.nodes.iter().enumerate() {
            assert!((lift[[4, node]] - f.values[[4, b]]).abs() < 1e-12);
        }
        // bilinear data is reproduced everywhere
        let f = BoundaryTrace::sample(&g, |_, x| 1.0 + x[0] * x[1]);
        let lift = lift_boundary(&g, &f).unwrap();
        let c = g.coords(g.node(2, 3));
        assert!((lift[[0, g.node(2, 3)]] - (1.0 + c[0] * c[1])).abs() < 1e-12);
    }

    #[test]
    fn zero_data_converges_immediately() {
        let g = Grid::line(0.0, 1.0, 50, 1.0, 0.9, 1.0).unwrap();
        let f = BoundaryTrace::zeros(&g, TraceKind::Dirichlet);
        let beta = NonlinearityProfile::single(2, 0.5).unwrap();
        let (p, rep) = solve_nonlinear(&g, &unit(&g), &beta, &f, &PicardOptions::default()).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
    }

    #[test]
    fn linear_model_matches_lifted_linear_solve() {
        let g = Grid::line(0.0, 1.0, 100, 1.0, 0.9, 1.0).unwrap();
        let f = BoundaryTrace::sample(&g, pulse(0.01));
        let (p, rep) = solve_nonlinear(&g, &unit(&g), &NonlinearityProfile::zero(), &f, &PicardOptions::default()).unwrap();
        let lift = lift_boundary(&g, &f).unwrap();
        let direct = solve_source(&g, &unit(&g), &(-wave_operator(&g, &unit(&g), lift.view()))).unwrap();
        assert_eq!(p.values, direct.values + &lift);
        assert_eq!(rep.iterations, 2);
        // and with the data imposed directly
        let z = Array2::zeros((g.levels(), g.n_nodes()));
        let plain = solve_linear(&g, &unit(&g), &z, &f).unwrap();
        let gap = (&plain.values - &p.values).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gap < 1e-14, "{gap}");
    }

    #[test]
    fn small_pulse_contracts_and_satisfies_the_scheme() {
        let g = Grid::line(0.0, 1.0, 200, 1.0, 0.9, 1.0).unwrap();
        let beta = NonlinearityProfile::single(2, 0.5).unwrap();
        let f = BoundaryTrace::sample(&g, pulse(0.01));
        let opts = PicardOptions::default();
        let (p, rep) = solve_nonlinear(&g, &unit(&g), &beta, &f, &opts).unwrap();
        assert!(rep.converged && rep.contraction_estimate < 1.0);
        assert!(rep.residuals.windows(2).all(|w| w[1] < w[0]));
        let r = discrete_residual(&p, &beta, opts.form).unwrap();
        assert!(r <= 10.0 * opts.tol, "residual {r}");
        assert!(zm_norm(&p, 1).unwrap() > 0.0);
    }

    #[test]
    fn doubled_pulse_past_threshold_fails() {
        let g = Grid::line(0.0, 1.0, 200, 1.0, 0.9, 1.0).unwrap();
        let beta = NonlinearityProfile::single(2, 0.5).unwrap();
        let opts = PicardOptions::default();
        let near = BoundaryTrace::sample(&g, pulse(0.05));
        let (_, rep) = solve_nonlinear(&g, &unit(&g), &beta, &near, &opts).unwrap();
        assert!(rep.iterations <= 30 && !rep.exceeds_smallness);
        let doubled = BoundaryTrace::sample(&g, pulse(0.1));
        let err = solve_nonlinear(&g, &unit(&g), &beta, &doubled, &opts).unwrap_err();
        assert!(matches!(err, ForwardError::NoConvergence { .. }), "{err}");
    }
}
