use super::flow::{check_start, flow};
use super::{conjugate_time, trace_bichar, BicharPath, GeodesicError, MetricModel};
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest accepted fan aperture (radians).
pub const MAX_APERTURE: f64 = std::f64::consts::FRAC_PI_4;

fn default_aperture() -> f64 {
    0.05
}

fn default_fan() -> usize {
    9
}

/// Fan of null directions around `ξ₀` at `x₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowoutConfig {
    pub x0: Vec<f64>,
    pub xi0: Vec<f64>,
    /// Half-opening of the fan in radians.
    #[serde(default = "default_aperture")]
    pub aperture: f64,
    #[serde(default = "default_fan")]
    pub fan_count: usize,
    pub ds: f64,
    pub max_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathWindow {
    /// First time strictly inside `(0, ∞) × Ω`.
    pub entry: Option<f64>,
    /// Time of the first boundary exit.
    pub exit: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutReport {
    /// First conjugate time of the central spatial geodesic, when the
    /// dimension and metric allow the computation.
    pub first_conjugate_time: Option<f64>,
    pub windows: Vec<PathWindow>,
}

/// Traced fan: one path per rotation angle plus the central path.
#[derive(Debug, Clone, Serialize)]
pub struct Fan {
    pub config: FlowoutConfig,
    pub angles: Vec<f64>,
    pub paths: Vec<BicharPath>,
    pub center: BicharPath,
    pub cut: CutReport,
}

/// Rotates the spatial part of `z` by `angle` (2-D), or tilts it towards
/// a fixed orthogonal axis (3-D). Time component and `|ζ′|` are unchanged.
fn rotate(z: &[f64], angle: f64, roll: f64) -> Vec<f64> {
    let sp = &z[1..];
    match sp.len() {
        1 => z.to_vec(),
        2 => {
            let (c, s) = (angle.cos(), angle.sin());
            vec![z[0], c * sp[0] - s * sp[1], s * sp[0] + c * sp[1]]
        }
        _ => {
            let v = Vector3::new(sp[0], sp[1], sp[2]);
            let len = v.norm();
            let u = v / len;
            let seed = if u.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            let e1 = (seed - u * u.dot(&seed)).normalize();
            let e2 = u.cross(&e1);
            let axis = e1 * roll.cos() + e2 * roll.sin();
            let w = (u * angle.cos() + axis * angle.sin()) * len;
            vec![z[0], w.x, w.y, w.z]
        }
    }
}

impl Fan {
    /// Covector of the fan member at `angle` (roll 0 in 3-D).
    pub fn covector(&self, angle: f64) -> Vec<f64> {
        rotate(&self.config.xi0, angle, 0.0)
    }

    /// `max_k |x_k(s) − x_center(s)|`
    pub fn spread(&self, s: f64) -> f64 {
        let c = self.center.at(s);
        self.paths.iter().map(|p| p.at(s).x.iter().zip(&c.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }
}

/// Traces the fan of null bicharacteristics from `x₀` whose spatial
/// directions lie within `aperture` of `ξ₀′`. Paths stop at the boundary.
pub fn flowout_fan(config: &FlowoutConfig, metric: &MetricModel) -> Result<Fan, GeodesicError> {
    check_start(metric, &config.x0, &config.xi0)?;
    if !(config.aperture >= 0.0 && config.aperture <= MAX_APERTURE) {
        return Err(GeodesicError::BadConfig(format!("aperture must lie in [0, {MAX_APERTURE}]")));
    }
    if config.xi0[0] >= 0.0 {
        return Err(GeodesicError::BadConfig("ξ₀ must be future pointing (ξ₀₀ < 0)".into()));
    }
    let count = if metric.dim == 1 { 1 } else { config.fan_count.max(1) };
    // 3-D fans are cones: members sit on the rim at evenly spaced rolls
    let members: Vec<(f64, f64)> = (0..count)
        .map(|k| match metric.dim {
            1 => (0.0, 0.0),
            2 if count == 1 => (0.0, 0.0),
            2 => (-config.aperture + 2.0 * config.aperture * k as f64 / (count - 1) as f64, 0.0),
            _ => (config.aperture, std::f64::consts::TAU * k as f64 / count as f64),
        })
        .collect();
    let paths = members
        .par_iter()
        .map(|&(a, roll)| trace_bichar(metric, &config.x0, &rotate(&config.xi0, a, roll), config.ds, config.max_s, false))
        .collect::<Result<Vec<_>, _>>()?;
    let center = trace_bichar(metric, &config.x0, &config.xi0, config.ds, config.max_s, false)?;

    let windows = paths
        .iter()
        .map(|p| PathWindow {
            entry: p.samples.iter().find(|q| q.x[0] > 0.0 && metric.domain.signed_distance(&q.x[1..]) < 0.0).map(|q| q.x[0]),
            exit: p.first_exit().map(|e| p.samples[e.index].x[0]),
        })
        .collect();
    let first_conjugate_time = if metric.dim >= 2 && !metric.speed.is_time_dependent() {
        let length = 2.0 * config.max_s;
        conjugate_time(metric, &config.x0[1..], &config.xi0[1..], length, 1.0).ok().flatten()
    } else {
        None
    };
    Ok(Fan {
        config: config.clone(),
        angles: members.iter().map(|m| m.0).collect(),
        paths,
        center,
        cut: CutReport { first_conjugate_time, windows },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FanIntersection {
    pub q: Vec<f64>,
    /// Member angle in the first fan and solved angle in the second.
    pub angle_a: f64,
    pub angle_b: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub interior: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InteriorityReport {
    pub points: Vec<FanIntersection>,
    pub all_interior: bool,
}

/// For every member of fan `a`, finds the member of fan `b` (continuous
/// angle) meeting it, by Newton on `(s_a, s_b, angle_b)`. A crossing is
/// interior when it lies in `(0, ∞) × Ω` before either path exits. Planar
/// fans only.
pub fn fan_intersections(metric: &MetricModel, a: &Fan, b: &Fan) -> Result<InteriorityReport, GeodesicError> {
    if metric.dim != 2 {
        return Err(GeodesicError::UnsupportedDim(metric.dim));
    }
    let ds = a.config.ds.min(b.config.ds);
    let member_b = |angle: f64, s: f64| -> (Vec<f64>, Vec<f64>) {
        let z = b.covector(angle);
        let (x, z) = flow(metric, &b.config.x0, &z, s, ds);
        let v = metric.velocity(&x, &z);
        (x, v)
    };
    let found: Vec<Option<FanIntersection>> = a
        .paths
        .par_iter()
        .zip(&a.angles)
        .zip(&a.cut.windows)
        .map(|((pa, &angle_a), win_a)| {
            // start from the closest pair of samples over fan b
            let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
            for (pb, &angle_b) in b.paths.iter().zip(&b.angles) {
                for p in &pa.samples {
                    let (k, d2) = pb.closest_sample(&p.x);
                    if d2 < best.0 {
                        best = (d2, p.s, pb.samples[k].s, angle_b);
                    }
                }
            }
            let (_, mut sa, mut sb, mut ang) = best;
            let mut res_norm = f64::INFINITY;
            let mut q = Vec::new();
            for _ in 0..40 {
                let pt = pa.at(sa);
                let va = metric.velocity(&pt.x, &pt.zeta);
                let (xb, vb) = member_b(ang, sb);
                let h = 1e-6;
                let (xp, _) = member_b(ang + h, sb);
                let (xm, _) = member_b(ang - h, sb);
                let res = Vector3::from_iterator((0..3).map(|i| pt.x[i] - xb[i]));
                res_norm = res.norm();
                q = pt.x.clone();
                if res_norm < 1e-11 {
                    break;
                }
                let jac = Matrix3::from_fn(|i, j| match j {
                    0 => va[i],
                    1 => -vb[i],
                    _ => -(xp[i] - xm[i]) / (2.0 * h),
                });
                let step = jac.lu().solve(&(-res))?;
                sa += step[0];
                sb += step[1];
                ang += step[2];
                if !ang.is_finite() || ang.abs() > std::f64::consts::PI {
                    return None;
                }
            }
            if !(res_norm < 1e-9) || sa < 0.0 || sb < 0.0 || (ang - b.angles[0]) < -1e-9 || (ang - b.angles[b.angles.len() - 1]) > 1e-9 {
                return None;
            }
            let inside = q[0] > 0.0 && metric.domain.signed_distance(&q[1..]) < 0.0;
            let before_exit_a = win_a.exit.is_none_or(|t| q[0] <= t);
            // the matching member of b exits where its free flight leaves Ω
            let pb = trace_bichar(metric, &b.config.x0, &b.covector(ang), ds, sb, false).ok()?;
            let before_exit_b = pb.first_exit().is_none();
            let after_entry = win_a.entry.is_some_and(|t| q[0] >= t);
            Some(FanIntersection {
                q,
                angle_a,
                angle_b: ang,
                s_a: sa,
                s_b: sb,
                interior: inside && before_exit_a && before_exit_b && after_entry,
            })
        })
        .collect();
    let points: Vec<FanIntersection> = found.into_iter().flatten().collect();
    let all_interior = points.iter().all(|p| p.interior);
    Ok(InteriorityReport { points, all_interior })
}
