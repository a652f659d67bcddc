use super::{causal_relation, trace_bichar, BicharPath, Domain, GeodesicError, MetricModel};
use rayon::prelude::*;
use serde::Serialize;

/// Result of the boundary-observable construction for an interior point.
#[derive(Debug, Clone, Serialize)]
pub struct ObservablePoint {
    /// `(ε + τ, x₀′)`
    pub q: Vec<f64>,
    /// `g₀`-distance from `x₀′` to the boundary.
    pub tau: f64,
    pub epsilon: f64,
    /// Nearest boundary point `p′`.
    pub boundary_point: Vec<f64>,
    /// `(ε + 2τ, p′)`, where the returning geodesic leaves.
    pub exit: Vec<f64>,
    /// Incoming null geodesic from `(ε, p′)` to `q`.
    pub gamma1: BicharPath,
    /// Outgoing null geodesic from `q` back to the boundary.
    pub gamma2: BicharPath,
    /// Both causal relations confirmed, or `None` when the metric is outside
    /// what the causal test supports.
    pub causal_certified: Option<bool>,
    pub nontrapping: NontrapReport,
}

/// Empirical nontrapping check from boundary-launched geodesics.
#[derive(Debug, Clone, Serialize)]
pub struct NontrapReport {
    pub launched: usize,
    pub exited: usize,
    pub max_exit_time: f64,
}

impl NontrapReport {
    pub fn all_exit(&self) -> bool {
        self.exited == self.launched
    }
}

const STEPS_PER_T: f64 = 2000.0;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| a / n).collect()
}

/// Any unit vector orthogonal to `n` (`d ≥ 2`).
fn orthogonal(n: &[f64]) -> Vec<f64> {
    let k = (0..n.len()).min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap_or(0);
    let mut e = vec![0.0; n.len()];
    e[k] = 1.0;
    let dot: f64 = e.iter().zip(n).map(|(a, b)| a * b).sum();
    unit(&e.iter().zip(n).map(|(a, b)| a - dot * b).collect::<Vec<_>>())
}

/// Unit directions spread over the sphere in `ℝ^d`.
fn directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci sphere
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
    }
}

/// Shortest way out of `Ω` from `x0′`: `(τ, p′, initial unit direction)`.
fn shortest_exit(metric: &MetricModel, x0: &[f64], budget: f64) -> Result<(f64, Vec<f64>, Vec<f64>), GeodesicError> {
    if let Some(c) = metric.speed.is_constant() {
        let depth = -metric.domain.signed_distance(x0);
        let tau = depth / c;
        if tau > budget {
            return Err(GeodesicError::Trapped);
        }
        let n = metric.domain.normal(x0);
        let n = if n.iter().all(|v| v.is_finite()) { n } else { directions(metric.dim, 1).remove(0) };
        return Ok((tau, metric.domain.project(x0), n));
    }
    let ds = budget / STEPS_PER_T;
    let start: Vec<f64> = std::iter::once(0.0).chain(x0.iter().copied()).collect();
    let best = directions(metric.dim, 180)
        .into_par_iter()
        .filter_map(|dir| {
            let z = metric.lightlike(&start, &dir);
            let path = trace_bichar(metric, &start, &z, ds, budget / 2.0, false).ok()?;
            let e = path.first_exit()?;
            let p = &path.samples[e.index];
            Some((p.x[0], p.x[1..].to_vec(), dir))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0));
    best.ok_or(GeodesicError::Trapped)
}

/// Builds `q = (ε + τ, x₀′)` with an incoming null geodesic from the
/// boundary at time `ε` and an outgoing one reaching the boundary at
/// `ε + 2τ < T`, where `τ` is the `g₀`-distance from `x₀′` to `∂Ω`.
pub fn observable_point(metric: &MetricModel, x0: &[f64], t_final: f64, epsilon: f64) -> Result<ObservablePoint, GeodesicError> {
    if metric.speed.is_time_dependent() {
        return Err(GeodesicError::UnsupportedMetric("speed depends on time".into()));
    }
    if x0.len() != metric.dim || !(t_final > 0.0) || !(epsilon > 0.0) {
        return Err(GeodesicError::BadConfig("need x0 in the domain dimension, T > 0 and ε > 0".into()));
    }
    if metric.domain.signed_distance(x0) > 0.0 {
        return Err(GeodesicError::OutsideDomain);
    }
    let (tau, p, dir) = shortest_exit(metric, x0, t_final / 2.0)?;
    let needed = epsilon + 2.0 * tau;
    if needed >= t_final {
        return Err(GeodesicError::TimeBudget { needed, t_final });
    }
    let ds = t_final / STEPS_PER_T;
    let q: Vec<f64> = std::iter::once(epsilon + tau).chain(x0.iter().copied()).collect();

    // incoming leg runs the outgoing one backwards: start on the boundary
    // with the reversed arrival direction
    let probe = trace_bichar(metric, &q, &metric.lightlike(&q, &dir), ds, tau / 2.0 + 2.0 * ds, false)?;
    let arrival = probe.first_exit().map(|e| e.incident[1..].to_vec()).unwrap_or_else(|| probe.end().zeta[1..].to_vec());
    let start: Vec<f64> = std::iter::once(epsilon).chain(p.iter().copied()).collect();
    let back: Vec<f64> = arrival.iter().map(|v| -v).collect();
    let gamma1 = trace_bichar(metric, &start, &metric.lightlike(&start, &back), ds, tau / 2.0, false)?;
    let gamma2 = probe;

    let exit: Vec<f64> = std::iter::once(needed).chain(p.iter().copied()).collect();
    let end = gamma2.end();
    let miss = end.x.iter().zip(&exit).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if miss > 1e-6 * (1.0 + t_final) || (tau > 0.0 && gamma2.first_exit().is_none()) {
        return Err(GeodesicError::NoIntersection { residual: miss });
    }
    let causal_certified = match (causal_relation(metric, &start, &q), causal_relation(metric, &q, &end.x)) {
        (Ok(a), Ok(b)) => Some(a.is_causal() && b.is_causal()),
        _ => None,
    };
    let nontrapping = nontrapping_check(metric, t_final, 200)?;
    Ok(ObservablePoint { q, tau, epsilon, boundary_point: p, exit, gamma1, gamma2, causal_certified, nontrapping })
}

fn boundary_sample(domain: &Domain, k: usize, count: usize) -> Vec<f64> {
    let frac = |i: usize, a: f64| ((i as f64 + 0.5) * a).fract();
    match domain {
        Domain::Box { lower, upper } => {
            let d = lower.len();
            let face = k % (2 * d);
            let (axis, high) = (face / 2, face % 2 == 1);
            let irr = [0.618_033_988_749_894_9, 0.754_877_666_246_692_7];
            (0..d)
                .map(|i| {
                    if i == axis {
                        if high {
                            upper[i]
                        } else {
                            lower[i]
                        }
                    } else {
                        let u = frac(k, irr[(i + d - axis - 1) % d % 2]);
                        lower[i] + u * (upper[i] - lower[i])
                    }
                })
                .collect()
        }
        Domain::Ball { center, radius } => {
            let dirs = directions(center.len(), count.max(2));
            dirs[k % dirs.len()].iter().zip(center).map(|(u, c)| c + radius * u).collect()
        }
    }
}

/// Launches `count` geodesics inward from the boundary and reports how many
/// leave again within time `T`. A validation, not a proof of nontrapping.
pub fn nontrapping_check(metric: &MetricModel, t_final: f64, count: usize) -> Result<NontrapReport, GeodesicError> {
    let ds = t_final / STEPS_PER_T;
    let results = (0..count)
        .into_par_iter()
        .map(|k| {
            let p = boundary_sample(&metric.domain, k, count);
            let n = metric.domain.normal(&p);
            let dir: Vec<f64> = if metric.dim == 1 {
                n.iter().map(|v| -v).collect()
            } else {
                // tilt away from the inward normal by up to 80 degrees
                let a = (2.0 * ((k as f64 * 0.381_966_011_250_105).fract()) - 1.0) * 80f64.to_radians();
                let e = orthogonal(&n);
                n.iter().zip(&e).map(|(ni, ei)| -a.cos() * ni + a.sin() * ei).collect()
            };
            let x: Vec<f64> = std::iter::once(0.0).chain(p.iter().copied()).collect();
            let path = trace_bichar(metric, &x, &metric.lightlike(&x, &dir), ds, t_final / 2.0, false)?;
            Ok(path.first_exit().map(|e| path.samples[e.index].x[0]))
        })
        .collect::<Result<Vec<_>, GeodesicError>>()?;
    let exited: Vec<f64> = results.into_iter().flatten().collect();
    Ok(NontrapReport { launched: count, exited: exited.len(), max_exit_time: exited.iter().copied().fold(0.0, f64::max) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::SpeedModel;

    #[test]
    fn flat_interval_fixture() {
        let m = MetricModel::flat_interval(0.0, 1.0);
        let o = observable_point(&m, &[0.5], 2.0, 0.1).unwrap();
        assert_eq!(o.tau, 0.5);
        assert_eq!(o.q, vec![0.6, 0.5]);
        assert_eq!(o.exit, vec![1.1, 0.0]);
        assert_eq!(o.boundary_point, vec![0.0]);
        let end = o.gamma1.end();
        assert!((end.x[0] - 0.6).abs() < 1e-12 && (end.x[1] - 0.5).abs() < 1e-12);
        assert!((o.gamma2.end().x[0] - 1.1).abs() < 1e-9);
        assert_eq!(o.causal_certified, Some(true));
        assert!(o.nontrapping.all_exit());
    }

    #[test]
    fn point_near_the_boundary() {
        let m = MetricModel::flat_interval(0.0, 1.0);
        let o = observable_point(&m, &[0.999], 2.0, 0.1).unwrap();
        assert!((o.tau - 0.001).abs() < 1e-12);
        assert!((o.q[0] - 0.101).abs() < 1e-12);
        assert_eq!(o.boundary_point, vec![1.0]);
    }

    #[test]
    fn slow_medium_is_trapped_or_over_budget() {
        let m = MetricModel::new(1, SpeedModel::Constant { c: 0.1 }, Domain::interval(0.0, 1.0)).unwrap();
        assert!(matches!(observable_point(&m, &[0.5], 2.0, 0.1), Err(GeodesicError::Trapped)));
        let m = MetricModel::new(1, SpeedModel::Constant { c: 0.55 }, Domain::interval(0.0, 1.0)).unwrap();
        assert!(matches!(observable_point(&m, &[0.5], 2.0, 0.3), Err(GeodesicError::TimeBudget { .. })));
    }

    #[test]
    fn lens_disk_uses_shooting() {
        let m = MetricModel::new(
            2,
            SpeedModel::Lens { c0: 1.0, amplitude: 0.4, center: vec![0.2, 0.0], width: 0.4 },
            Domain::Ball { center: vec![0.0, 0.0], radius: 1.0 },
        )
        .unwrap();
        let o = observable_point(&m, &[0.3, 0.1], 4.0, 0.1).unwrap();
        // the fast lens makes the way out shorter than the straight distance
        let straight = 1.0 - (0.3f64.powi(2) + 0.01).sqrt();
        assert!(o.tau <= straight + 1e-3);
        assert!(m.domain.signed_distance(&o.boundary_point).abs() < 1e-8);
        assert!(m.domain.signed_distance(&o.gamma1.start().x[1..]).abs() < 1e-8);
        let end = o.gamma1.end();
        assert!((end.x[1] - 0.3).abs() < 1e-3 && (end.x[2] - 0.1).abs() < 1e-3, "{:?}", end.x);
        assert!(o.nontrapping.all_exit());
    }
}
