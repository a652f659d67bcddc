use super::flow::rk4;
use super::{GeodesicError, MetricModel};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Width of the null band: `|d − Δt| ≤ CAUSAL_TOL·(1 + |Δt|)` counts as
/// lightlike separation.
pub const CAUSAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalRelation {
    /// `y` in the chronological future of `x`.
    Timelike,
    /// `y` on the boundary of the causal future of `x`.
    Causal,
    None,
}

impl CausalRelation {
    /// `x ≤ y` in the causal order (timelike or null separation).
    pub fn is_causal(self) -> bool {
        self != CausalRelation::None
    }
}

/// Classifies the separation of `y` from `x` by comparing `Δt` with the
/// `g₀`-distance of the spatial parts.
pub fn causal_relation(metric: &MetricModel, x: &[f64], y: &[f64]) -> Result<CausalRelation, GeodesicError> {
    let n = metric.dim + 1;
    if x.len() != n || y.len() != n {
        return Err(GeodesicError::BadConfig(format!("points need {n} components")));
    }
    let dt = y[0] - x[0];
    let d = spatial_distance(metric, &x[1..], &y[1..])?;
    let tol = CAUSAL_TOL * (1.0 + dt.abs());
    Ok(if (d - dt).abs() <= tol {
        CausalRelation::Causal
    } else if d < dt {
        CausalRelation::Timelike
    } else {
        CausalRelation::None
    })
}

/// `d_{g₀}(a, b)` for time-independent `c`.
///
/// Constant speed is exact in every dimension. In 1-D the travel time is a
/// quadrature of `1/c`. In 2-D a grid Dijkstra estimate is refined by
/// shooting. Variable speed in 3-D is not supported.
pub fn spatial_distance(metric: &MetricModel, a: &[f64], b: &[f64]) -> Result<f64, GeodesicError> {
    if metric.speed.is_time_dependent() {
        return Err(GeodesicError::UnsupportedMetric("speed depends on time".into()));
    }
    let euclid = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    if let Some(c) = metric.speed.is_constant() {
        return Ok(euclid / c);
    }
    match metric.dim {
        1 => Ok(travel_time_1d(metric, a[0], b[0])),
        2 => {
            let graph = GraphDistance::new(metric, 128)?;
            Ok(graph.shoot(a, b).unwrap_or_else(|| graph.estimate(a, b)))
        }
        d => Err(GeodesicError::UnsupportedMetric(format!("variable speed in {d} dimensions"))),
    }
}

fn travel_time_1d(metric: &MetricModel, a: f64, b: f64) -> f64 {
    // composite Simpson
    let n = 2000;
    let h = (b - a) / n as f64;
    let f = |x: f64| 1.0 / metric.speed.speed(0.0, &[x]);
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (sum * h / 3.0).abs()
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// 8-neighbour graph on a uniform grid over the bounding box of a planar
/// domain, with edge weights `|Δx| · mean(1/c)`. Built once per metric and
/// read-only afterwards.
#[derive(Debug, Clone)]
pub struct GraphDistance {
    metric: MetricModel,
    lower: [f64; 2],
    h: [f64; 2],
    n: usize,
    slowness: Vec<f64>,
    active: Vec<bool>,
}

impl GraphDistance {
    pub fn new(metric: &MetricModel, cells: usize) -> Result<Self, GeodesicError> {
        if metric.dim != 2 {
            return Err(GeodesicError::UnsupportedDim(metric.dim));
        }
        if metric.speed.is_time_dependent() {
            return Err(GeodesicError::UnsupportedMetric("speed depends on time".into()));
        }
        let (lo, hi) = match &metric.domain {
            super::Domain::Box { lower, upper } => ([lower[0], lower[1]], [upper[0], upper[1]]),
            super::Domain::Ball { center, radius } => ([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius]),
        };
        let n = cells + 1;
        let h = [(hi[0] - lo[0]) / cells as f64, (hi[1] - lo[1]) / cells as f64];
        let mut slowness = Vec::with_capacity(n * n);
        let mut active = Vec::with_capacity(n * n);
        let tol = h[0].max(h[1]);
        for i in 0..n {
            for j in 0..n {
                let p = [lo[0] + i as f64 * h[0], lo[1] + j as f64 * h[1]];
                slowness.push(1.0 / metric.speed.speed(0.0, &p));
                active.push(metric.domain.signed_distance(&p) <= tol);
            }
        }
        Ok(GraphDistance { metric: metric.clone(), lower: lo, h, n, slowness, active })
    }

    fn point(&self, k: usize) -> [f64; 2] {
        [self.lower[0] + (k / self.n) as f64 * self.h[0], self.lower[1] + (k % self.n) as f64 * self.h[1]]
    }

    fn nearest(&self, p: &[f64]) -> usize {
        let idx = |a: usize| ((p[a] - self.lower[a]) / self.h[a]).round().clamp(0.0, (self.n - 1) as f64) as usize;
        idx(0) * self.n + idx(1)
    }

    /// Graph distances from the node nearest to `a`.
    pub fn field_from(&self, a: &[f64]) -> Vec<f64> {
        let n = self.n as isize;
        let mut dist = vec![f64::INFINITY; self.slowness.len()];
        let start = self.nearest(a);
        dist[start] = 0.0;
        let mut heap = BinaryHeap::from([Entry(0.0, start)]);
        while let Some(Entry(d, k)) = heap.pop() {
            if d > dist[k] {
                continue;
            }
            let (i, j) = ((k / self.n) as isize, (k % self.n) as isize);
            for di in -1..=1isize {
                for dj in -1..=1isize {
                    let (ni, nj) = (i + di, j + dj);
                    if (di == 0 && dj == 0) || ni < 0 || nj < 0 || ni >= n || nj >= n {
                        continue;
                    }
                    let m = (ni * n + nj) as usize;
                    if !self.active[m] {
                        continue;
                    }
                    let len = ((di as f64 * self.h[0]).powi(2) + (dj as f64 * self.h[1]).powi(2)).sqrt();
                    let nd = d + len * 0.5 * (self.slowness[k] + self.slowness[m]);
                    if nd < dist[m] {
                        dist[m] = nd;
                        heap.push(Entry(nd, m));
                    }
                }
            }
        }
        dist
    }

    /// Graph estimate of `d_{g₀}(a, b)` with straight connectors to the
    /// nearest nodes.
    pub fn estimate(&self, a: &[f64], b: &[f64]) -> f64 {
        let field = self.field_from(a);
        let (ka, kb) = (self.nearest(a), self.nearest(b));
        let link = |p: &[f64], k: usize| {
            let q = self.point(k);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() * self.slowness[k]
        };
        field[kb] + link(a, ka) + link(b, kb)
    }

    /// Closest approach of the ray from `a` at angle `theta` to `b`, as
    /// `(miss distance, travel time at closest approach)`.
    fn ray_miss(&self, a: &[f64], b: &[f64], theta: f64, t_max: f64, steps: usize) -> (f64, f64) {
        let x0 = [0.0, a[0], a[1]];
        let z0 = self.metric.lightlike(&x0, &[theta.cos(), theta.sin()]);
        // dt/ds = 2 for ζ₀ = −1
        let h = t_max / (2.0 * steps as f64);
        let (mut x, mut z) = (x0.to_vec(), z0);
        let mut best = (f64::INFINITY, 0.0);
        for _ in 0..steps {
            let (nx, nz) = rk4(&self.metric, &x, &z, h);
            let (p, q) = ([x[1], x[2]], [nx[1], nx[2]]);
            let seg = [q[0] - p[0], q[1] - p[1]];
            let len2 = seg[0] * seg[0] + seg[1] * seg[1];
            let u = if len2 > 0.0 { (((b[0] - p[0]) * seg[0] + (b[1] - p[1]) * seg[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let m = ((p[0] + u * seg[0] - b[0]).powi(2) + (p[1] + u * seg[1] - b[1]).powi(2)).sqrt();
            if m < best.0 {
                best = (m, x[0] + u * (nx[0] - x[0]));
            }
            (x, z) = (nx, nz);
        }
        best
    }

    /// Shortest travel time among rays from `a` that pass through `b`,
    /// found by an angular scan and golden-section refinement.
    pub fn shoot(&self, a: &[f64], b: &[f64]) -> Option<f64> {
        let euclid = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        if euclid == 0.0 {
            return Some(0.0);
        }
        let t_max = 1.5 * self.estimate(a, b);
        let steps = 400;
        let scan = 96;
        let dtheta = std::f64::consts::TAU / scan as f64;
        let misses: Vec<f64> = (0..scan).map(|k| self.ray_miss(a, b, k as f64 * dtheta, t_max, steps).0).collect();
        let accept = 1e-4 * (1.0 + euclid);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut best: Option<f64> = None;
        for k in 0..scan {
            let (prev, next) = (misses[(k + scan - 1) % scan], misses[(k + 1) % scan]);
            if misses[k] > prev || misses[k] > next {
                continue;
            }
            let (mut lo, mut hi) = ((k as f64 - 1.0) * dtheta, (k as f64 + 1.0) * dtheta);
            let f = |t: f64| self.ray_miss(a, b, t, t_max, steps).0;
            let (mut c, mut d) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            let (mut fc, mut fd) = (f(c), f(d));
            while hi - lo > 1e-10 {
                if fc < fd {
                    (hi, d, fd) = (d, c, fc);
                    c = hi - phi * (hi - lo);
                    fc = f(c);
                } else {
                    (lo, c, fc) = (c, d, fd);
                    d = lo + phi * (hi - lo);
                    fd = f(d);
                }
            }
            let (miss, t) = self.ray_miss(a, b, 0.5 * (lo + hi), t_max, steps);
            if miss < accept {
                best = Some(best.map_or(t, |v: f64| v.min(t)));
            }
        }
        best
    }
}
