use super::{GeodesicError, MetricModel};
use nalgebra::DMatrix;

/// Number of RK4 steps over the requested length.
const STEPS: usize = 4000;

/// Spatial geodesic `x(τ)` of `g₀` in arclength together with `d − 1`
/// Jacobi fields `J_k` with `J_k(0) = 0`, `J_k′(0) = λ e_k`, packed as
/// `[x, ξ, (J_1, P_1), …]` for `h = ½c²|ξ|²`.
struct JacobiSystem<'a> {
    metric: &'a MetricModel,
    d: usize,
}

impl JacobiSystem<'_> {
    fn rhs(&self, y: &[f64]) -> Vec<f64> {
        let d = self.d;
        let (x, xi) = (&y[..d], &y[d..2 * d]);
        let jet = self.metric.speed.jet(0.0, x);
        let c = jet.c;
        let xi2: f64 = xi.iter().map(|v| v * v).sum();
        let mut out = vec![0.0; y.len()];
        for i in 0..d {
            out[i] = c * c * xi[i];
            out[d + i] = -c * jet.grad[i] * xi2;
        }
        for k in 0..d - 1 {
            let base = 2 * d + 2 * d * k;
            let (j, p) = (&y[base..base + d], &y[base + d..base + 2 * d]);
            let grad_j: f64 = (0..d).map(|l| jet.grad[l] * j[l]).sum();
            let xi_p: f64 = (0..d).map(|l| xi[l] * p[l]).sum();
            for i in 0..d {
                // J' = H_ξx J + H_ξξ P,  P' = −H_xx J − H_xξ P
                out[base + i] = 2.0 * c * xi[i] * grad_j + c * c * p[i];
                let hxx_j: f64 = (0..d).map(|l| (jet.grad[i] * jet.grad[l] + c * jet.hess[i][l]) * xi2 * j[l]).sum();
                out[base + d + i] = -hxx_j - 2.0 * c * jet.grad[i] * xi_p;
            }
        }
        out
    }

    fn step(&self, y: &[f64], h: f64) -> Vec<f64> {
        let add = |a: &[f64], s: f64, b: &[f64]| a.iter().zip(b).map(|(p, q)| p + s * q).collect::<Vec<_>>();
        let k1 = self.rhs(y);
        let k2 = self.rhs(&add(y, h / 2.0, &k1));
        let k3 = self.rhs(&add(y, h / 2.0, &k2));
        let k4 = self.rhs(&add(y, h, &k3));
        (0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
    }

    /// `det[J_1, …, J_{d−1}, ẋ]`, which vanishes exactly at conjugate points.
    fn wronskian(&self, y: &[f64]) -> f64 {
        let d = self.d;
        let c = self.metric.speed.speed(0.0, &y[..d]);
        DMatrix::from_fn(d, d, |i, col| if col < d - 1 { y[2 * d + 2 * d * col + i] } else { c * c * y[d + i] }).determinant()
    }

    /// Smallest and largest singular values of the Jacobi fields projected
    /// off the geodesic direction. A double zero of the Wronskian (full
    /// refocusing in 3-D) shows up here as a zero minimum.
    fn transverse_sizes(&self, y: &[f64]) -> (f64, f64) {
        let d = self.d;
        let n = y[d..2 * d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: Vec<f64> = y[d..2 * d].iter().map(|v| v / n).collect();
        let m = DMatrix::from_fn(d, d - 1, |i, col| {
            let j = &y[2 * d + 2 * d * col..2 * d + 2 * d * col + d];
            let dot: f64 = j.iter().zip(&u).map(|(a, b)| a * b).sum();
            j[i] - dot * u[i]
        });
        let sv = m.singular_values();
        (sv.min(), sv.max())
    }
}

/// First conjugate point along the `g₀`-geodesic from `x0` in direction
/// `dir`, as an arclength (travel time), or `None` within `max_len`.
///
/// `slope` scales the initial derivative of the Jacobi fields; the answer
/// does not depend on it.
pub fn conjugate_time(metric: &MetricModel, x0: &[f64], dir: &[f64], max_len: f64, slope: f64) -> Result<Option<f64>, GeodesicError> {
    let d = metric.dim;
    if d == 1 {
        return Err(GeodesicError::UnsupportedDim(d));
    }
    if metric.speed.is_time_dependent() {
        return Err(GeodesicError::UnsupportedMetric("speed depends on time".into()));
    }
    if x0.len() != d || dir.len() != d || !(max_len > 0.0) || slope == 0.0 {
        return Err(GeodesicError::BadConfig("conjugate search needs matching dimensions, length > 0 and slope ≠ 0".into()));
    }
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = dir.iter().map(|v| v / norm).collect();
    let c0 = metric.speed.speed(0.0, x0);
    // orthonormal complement of u via QR of [u | I]
    let basis = DMatrix::from_fn(d, d + 1, |i, j| {
        if j == 0 {
            u[i]
        } else if i == j - 1 {
            1.0
        } else {
            0.0
        }
    });
    let q = basis.qr().q();
    let mut y = vec![0.0; 2 * d + 2 * d * (d - 1)];
    for i in 0..d {
        y[i] = x0[i];
        y[d + i] = u[i] / c0;
    }
    for k in 0..d - 1 {
        let base = 2 * d + 2 * d * k;
        for i in 0..d {
            y[base + d + i] = slope * q[(i, k + 1)];
        }
    }
    let sys = JacobiSystem { metric, d };
    let h = max_len / STEPS as f64;
    let mut w_prev = 0.0f64;
    // previous two states with their transverse minima, for the even-zero test
    let mut hist: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut scale = 0.0f64;
    for n in 0..STEPS {
        if hist.len() == 2 {
            hist.remove(0);
        }
        hist.push((y.clone(), sys.transverse_sizes(&y).0));
        let next = sys.step(&y, h);
        let w = sys.wronskian(&next);
        if n > 0 && w_prev != 0.0 && (w == 0.0 || w.signum() != w_prev.signum()) {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let wm = sys.wronskian(&sys.step(&y, mid));
                if wm.signum() == w_prev.signum() && wm != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(n as f64 * h + 0.5 * (lo + hi)));
        }
        let (smin, smax) = sys.transverse_sizes(&next);
        scale = scale.max(smax);
        if n > 1 && hist[1].1 < hist[0].1 && hist[1].1 <= smin {
            // local minimum near the previous step: golden section over the
            // two surrounding steps
            let base = &hist[0].0;
            let f = |t: f64| sys.transverse_sizes(&sys.step(&sys.step(base, t.min(h)), (t - h).max(0.0))).0;
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let (mut lo, mut hi) = (0.0, 2.0 * h);
            let (mut c, mut dd) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            let (mut fc, mut fd) = (f(c), f(dd));
            while hi - lo > 1e-10 {
                if fc < fd {
                    (hi, dd, fd) = (dd, c, fc);
                    c = hi - phi * (hi - lo);
                    fc = f(c);
                } else {
                    (lo, c, fc) = (c, dd, fd);
                    dd = lo + phi * (hi - lo);
                    fd = f(dd);
                }
            }
            let t = 0.5 * (lo + hi);
            if f(t) <= 1e-6 * scale {
                return Ok(Some((n - 1) as f64 * h + t));
            }
        }
        w_prev = w;
        y = next;
    }
    Ok(None)
}
