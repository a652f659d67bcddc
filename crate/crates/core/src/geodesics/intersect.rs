use super::{BicharPath, GeodesicError};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Common point of several null bicharacteristics.
#[derive(Debug, Clone, Serialize)]
pub struct Intersection {
    pub q: Vec<f64>,
    /// Flow parameter on each path at `q`.
    pub params: Vec<f64>,
    /// Largest distance from `q` to the path points.
    pub residual: f64,
    /// Singular values of the velocity matrix at `q`.
    pub singular_values: Vec<f64>,
    /// All singular values above `1e-8` times the largest.
    pub independent: bool,
}

/// Default acceptance tolerance for the common point, relative to
/// `1 + |q|`.
const MEET_TOL: f64 = 1e-8;

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum()
}

/// Least-squares search for `q` and parameters `s_j` with `γ_j(s_j) = q`.
///
/// Initialised from the mutually closest samples, then Gauss-Newton on
/// `(s_1, …, s_k, q)` with SVD solves. Fails with `NoIntersection` when the
/// converged residual exceeds the tolerance, and with
/// `DegenerateVelocities` when all velocities at `q` are parallel.
pub fn regular_intersection(paths: &[BicharPath]) -> Result<Intersection, GeodesicError> {
    let k = paths.len();
    if k < 2 {
        return Err(GeodesicError::BadConfig("need at least two paths".into()));
    }
    let n = paths[0].metric.dim + 1;
    if k > n {
        return Err(GeodesicError::BadConfig(format!("{k} paths cannot be independent in {n} dimensions")));
    }

    // initial guess: centroid of pairwise closest samples
    let mut centroid = vec![0.0; n];
    let mut pairs = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let mut best = (f64::INFINITY, 0, 0);
            for (i, p) in paths[a].samples.iter().enumerate() {
                for (j, q) in paths[b].samples.iter().enumerate() {
                    let d = dist2(&p.x, &q.x);
                    if d < best.0 {
                        best = (d, i, j);
                    }
                }
            }
            let (p, q) = (&paths[a].samples[best.1].x, &paths[b].samples[best.2].x);
            for i in 0..n {
                centroid[i] += 0.5 * (p[i] + q[i]);
            }
            pairs += 1.0;
        }
    }
    let mut q: Vec<f64> = centroid.iter().map(|v| v / pairs).collect();
    let mut s: Vec<f64> = paths.iter().map(|p| p.samples[p.closest_sample(&q).0].s).collect();

    let eval = |s: &[f64]| -> Vec<(Vec<f64>, Vec<f64>)> {
        paths
            .iter()
            .zip(s)
            .map(|(p, &sj)| {
                let pt = p.at(sj);
                let v = p.metric.velocity(&pt.x, &pt.zeta);
                (pt.x, v)
            })
            .collect()
    };

    let unknowns = k + n;
    for _ in 0..100 {
        let pts = eval(&s);
        let mut jac = DMatrix::<f64>::zeros(k * n, unknowns);
        let mut res = DVector::<f64>::zeros(k * n);
        for (j, (x, v)) in pts.iter().enumerate() {
            for i in 0..n {
                let row = j * n + i;
                res[row] = x[i] - q[i];
                jac[(row, j)] = v[i];
                jac[(row, k + i)] = -1.0;
            }
        }
        let step = jac.svd(true, true).solve(&(-res), 1e-12).map_err(|e| GeodesicError::BadConfig(e.to_string()))?;
        for j in 0..k {
            s[j] += step[j];
        }
        for i in 0..n {
            q[i] += step[k + i];
        }
        if step.amax() <= 1e-14 * (1.0 + q.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            break;
        }
    }

    let pts = eval(&s);
    let residual = pts.iter().map(|(x, _)| dist2(x, &q).sqrt()).fold(0.0, f64::max);
    let scale = 1.0 + q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(residual <= MEET_TOL * scale) {
        return Err(GeodesicError::NoIntersection { residual });
    }
    let vel = DMatrix::from_fn(k, n, |j, i| pts[j].1[i]);
    let mut singular_values: Vec<f64> = vel.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let top = singular_values[0];
    if top == 0.0 || singular_values.get(1).is_none_or(|&s1| s1 <= 1e-8 * top) {
        return Err(GeodesicError::DegenerateVelocities);
    }
    let independent = singular_values.iter().all(|&v| v > 1e-8 * top);
    Ok(Intersection { q, params: s, residual, singular_values, independent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::{trace_bichar, Domain, MetricModel, SpeedModel};

    fn flat(dim: usize) -> MetricModel {
        MetricModel::new(dim, SpeedModel::Constant { c: 1.0 }, Domain::Box { lower: vec![-5.0; dim], upper: vec![5.0; dim] }).unwrap()
    }

    /// Null line through `q` that started `back` units of time earlier.
    fn line_through(m: &MetricModel, q: &[f64], dir: &[f64], back: f64) -> BicharPath {
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x0: Vec<f64> = std::iter::once(q[0] - back).chain(q[1..].iter().zip(dir).map(|(a, d)| a - back * d / norm)).collect();
        let z0 = m.lightlike(&x0, dir);
        trace_bichar(m, &x0, &z0, 0.05, back, false).unwrap()
    }

    #[test]
    fn three_lines_through_the_origin() {
        let m = flat(2);
        let q = [0.0, 0.0, 0.0];
        let paths: Vec<_> =
            [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]].iter().zip([0.7, 1.1, 0.9]).map(|(d, b)| line_through(&m, &q, d, b)).collect();
        let hit = regular_intersection(&paths).unwrap();
        assert!(hit.q.iter().all(|v| v.abs() < 1e-12), "{:?}", hit.q);
        assert!(hit.independent);
        assert!((hit.params[0] - 0.35).abs() < 1e-12);
    }

    #[test]
    fn parallel_lines_do_not_meet() {
        let m = flat(2);
        let a = line_through(&m, &[1.0, 0.0, 0.0], &[1.0, 0.0], 1.0);
        let b = line_through(&m, &[1.0, 0.0, 0.5], &[1.0, 0.0], 1.0);
        assert!(matches!(regular_intersection(&[a, b]), Err(GeodesicError::NoIntersection { .. })));
    }

    #[test]
    fn two_transversal_paths_meet() {
        let m = flat(2);
        let q = [1.0, 0.2, -0.1];
        let a = line_through(&m, &q, &[1.0, 0.0], 0.5);
        let b = line_through(&m, &q, &[0.0, 1.0], 0.8);
        let hit = regular_intersection(&[a, b]).unwrap();
        assert!(hit.independent);
        assert!(hit.residual < 1e-12);
    }

    #[test]
    fn too_many_paths_rejected() {
        let m = flat(1);
        let q = [0.0, 0.0];
        let paths: Vec<_> = [[1.0], [-1.0], [1.0]].iter().map(|d| line_through(&m, &q, d, 0.5)).collect();
        assert!(matches!(regular_intersection(&paths), Err(GeodesicError::BadConfig(_))));
    }
}
