use super::GeodesicError;
use serde::{Deserialize, Serialize};

/// Wave speed `c(t, x′)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpeedModel {
    Constant {
        c: f64,
    },
    /// `c₀ (1 + a exp(−|x′ − m|² / w²))`
    Lens {
        c0: f64,
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// `1 + a (1 − |x′ − m|²/R²)³` inside the ball, 1 outside (C²).
    Bump {
        amplitude: f64,
        center: Vec<f64>,
        radius: f64,
    },
    /// `(1 + |x′|²/L²) / 2`; every geodesic from a point refocuses after
    /// length `π L`.
    Fisheye {
        scale: f64,
    },
    /// `c₀ (1 + r t)`, depends on time only.
    TimeRamp {
        c0: f64,
        rate: f64,
    },
}

/// Value, time derivative, spatial gradient and spatial Hessian of `c`.
#[derive(Debug, Clone, Copy)]
pub struct SpeedJet {
    pub c: f64,
    pub dt: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

fn dist2(x: &[f64], m: &[f64]) -> f64 {
    x.iter().zip(m).map(|(a, b)| (a - b).powi(2)).sum()
}

impl SpeedModel {
    pub fn is_time_dependent(&self) -> bool {
        matches!(self, SpeedModel::TimeRamp { .. })
    }

    pub fn is_constant(&self) -> Option<f64> {
        match *self {
            SpeedModel::Constant { c } => Some(c),
            _ => None,
        }
    }

    pub fn speed(&self, t: f64, x: &[f64]) -> f64 {
        self.jet(t, x).c
    }

    pub fn jet(&self, t: f64, x: &[f64]) -> SpeedJet {
        let d = x.len();
        let mut out = SpeedJet { c: 0.0, dt: 0.0, grad: [0.0; 3], hess: [[0.0; 3]; 3] };
        match self {
            SpeedModel::Constant { c } => out.c = *c,
            SpeedModel::Lens { c0, amplitude, center, width } => {
                let w2 = width * width;
                let e = (-dist2(x, center) / w2).exp();
                out.c = c0 * (1.0 + amplitude * e);
                let k = c0 * amplitude * e;
                for i in 0..d {
                    let ui = x[i] - center[i];
                    out.grad[i] = -2.0 * ui / w2 * k;
                    for j in 0..d {
                        let uj = x[j] - center[j];
                        let delta = if i == j { 1.0 } else { 0.0 };
                        out.hess[i][j] = k * (4.0 * ui * uj / (w2 * w2) - 2.0 * delta / w2);
                    }
                }
            }
            SpeedModel::Bump { amplitude, center, radius } => {
                let r2 = radius * radius;
                let q = dist2(x, center) / r2;
                out.c = 1.0;
                if q < 1.0 {
                    let one = 1.0 - q;
                    out.c += amplitude * one.powi(3);
                    for i in 0..d {
                        let gi = 2.0 * (x[i] - center[i]) / r2;
                        out.grad[i] = -3.0 * amplitude * one * one * gi;
                        for j in 0..d {
                            let gj = 2.0 * (x[j] - center[j]) / r2;
                            let delta = if i == j { 1.0 } else { 0.0 };
                            out.hess[i][j] = amplitude * (6.0 * one * gi * gj - 6.0 * one * one * delta / r2);
                        }
                    }
                }
            }
            SpeedModel::Fisheye { scale } => {
                let l2 = scale * scale;
                out.c = 0.5 * (1.0 + x.iter().map(|v| v * v).sum::<f64>() / l2);
                for i in 0..d {
                    out.grad[i] = x[i] / l2;
                    out.hess[i][i] = 1.0 / l2;
                }
            }
            SpeedModel::TimeRamp { c0, rate } => {
                out.c = c0 * (1.0 + rate * t);
                out.dt = c0 * rate;
            }
        }
        out
    }

    fn validate(&self, dim: usize) -> Result<(), GeodesicError> {
        let bad = |m: &str| Err(GeodesicError::BadConfig(m.to_string()));
        match self {
            SpeedModel::Constant { c } if !(*c > 0.0) => bad("speed must be positive"),
            SpeedModel::Lens { c0, amplitude, center, width } => {
                if center.len() != dim {
                    bad("lens center dimension")
                } else if !(*c0 > 0.0 && *width > 0.0 && *amplitude > -1.0) {
                    bad("lens needs c0 > 0, width > 0, amplitude > -1")
                } else {
                    Ok(())
                }
            }
            SpeedModel::Bump { amplitude, center, radius } => {
                if center.len() != dim {
                    bad("bump center dimension")
                } else if !(*radius > 0.0 && *amplitude > -1.0) {
                    bad("bump needs radius > 0 and amplitude > -1")
                } else {
                    Ok(())
                }
            }
            SpeedModel::Fisheye { scale } if !(*scale > 0.0) => bad("fisheye scale must be positive"),
            SpeedModel::TimeRamp { c0, .. } if !(*c0 > 0.0) => bad("speed must be positive"),
            _ => Ok(()),
        }
    }
}

/// Spatial domain `Ω` with signed distance (negative inside).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Self {
        Domain::Box { lower: vec![a], upper: vec![b] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lower, .. } => lower.len(),
            Domain::Ball { center, .. } => center.len(),
        }
    }

    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Box { lower, upper } => {
                let mut outside = 0.0f64;
                let mut inside = f64::NEG_INFINITY;
                for i in 0..lower.len() {
                    let g = (lower[i] - x[i]).max(x[i] - upper[i]);
                    if g > 0.0 {
                        outside += g * g;
                    }
                    inside = inside.max(g);
                }
                if outside > 0.0 {
                    outside.sqrt()
                } else {
                    inside
                }
            }
            Domain::Ball { center, radius } => dist2(x, center).sqrt() - radius,
        }
    }

    /// Outward unit normal of the nearest boundary face.
    pub fn normal(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Domain::Box { lower, upper } => {
                let (mut best, mut axis, mut sign) = (f64::NEG_INFINITY, 0, 1.0);
                for i in 0..lower.len() {
                    for (g, s) in [(lower[i] - x[i], -1.0), (x[i] - upper[i], 1.0)] {
                        if g > best {
                            best = g;
                            axis = i;
                            sign = s;
                        }
                    }
                }
                let mut n = vec![0.0; lower.len()];
                n[axis] = sign;
                n
            }
            Domain::Ball { center, .. } => {
                let r = dist2(x, center).sqrt();
                x.iter().zip(center).map(|(a, b)| (a - b) / r).collect()
            }
        }
    }

    /// Nearest boundary point.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Domain::Box { lower, upper } => {
                let n = self.normal(x);
                let mut p: Vec<f64> = x.iter().enumerate().map(|(i, &v)| v.clamp(lower[i], upper[i])).collect();
                for (i, &ni) in n.iter().enumerate() {
                    if ni > 0.0 {
                        p[i] = upper[i];
                    } else if ni < 0.0 {
                        p[i] = lower[i];
                    }
                }
                p
            }
            Domain::Ball { center, radius } => {
                let n = self.normal(x);
                center.iter().zip(&n).map(|(c, n)| c + radius * n).collect()
            }
        }
    }

    fn validate(&self) -> Result<(), GeodesicError> {
        match self {
            Domain::Box { lower, upper } => {
                if lower.len() != upper.len() || lower.iter().zip(upper).any(|(a, b)| !(b > a)) {
                    return Err(GeodesicError::BadConfig("box needs lower < upper on every axis".into()));
                }
            }
            Domain::Ball { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(GeodesicError::BadConfig("ball radius must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// `g = −dt² + c⁻²(t, x′) |dx′|²` on `ℝ × Ω`, `Ω ⊂ ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricModel {
    pub dim: usize,
    pub speed: SpeedModel,
    pub domain: Domain,
}

impl MetricModel {
    pub fn new(dim: usize, speed: SpeedModel, domain: Domain) -> Result<Self, GeodesicError> {
        let m = MetricModel { dim, speed, domain };
        m.validate()?;
        Ok(m)
    }

    pub fn flat_interval(a: f64, b: f64) -> Self {
        MetricModel { dim: 1, speed: SpeedModel::Constant { c: 1.0 }, domain: Domain::interval(a, b) }
    }

    pub fn validate(&self) -> Result<(), GeodesicError> {
        if !(1..=3).contains(&self.dim) {
            return Err(GeodesicError::UnsupportedDim(self.dim));
        }
        if self.domain.dim() != self.dim {
            return Err(GeodesicError::BadConfig("domain dimension differs from metric dimension".into()));
        }
        self.domain.validate()?;
        self.speed.validate(self.dim)
    }

    /// `b(x, ζ) = −ζ₀² + c² |ζ′|²`
    pub fn hamiltonian(&self, x: &[f64], z: &[f64]) -> f64 {
        let c = self.speed.speed(x[0], &x[1..]);
        -z[0] * z[0] + c * c * z[1..].iter().map(|v| v * v).sum::<f64>()
    }

    /// Scale for relative Hamiltonian checks: `ζ₀² + c²|ζ′|²`.
    pub fn covector_scale(&self, x: &[f64], z: &[f64]) -> f64 {
        let c = self.speed.speed(x[0], &x[1..]);
        z[0] * z[0] + c * c * z[1..].iter().map(|v| v * v).sum::<f64>()
    }

    /// Velocity `∂b/∂ζ` of the bicharacteristic.
    pub fn velocity(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        let c = self.speed.speed(x[0], &x[1..]);
        std::iter::once(-2.0 * z[0]).chain(z[1..].iter().map(|v| 2.0 * c * c * v)).collect()
    }

    /// Future-pointing lightlike covector with spatial direction `dir`.
    pub fn lightlike(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        let c = self.speed.speed(x[0], &x[1..]);
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        std::iter::once(-1.0).chain(dir.iter().map(|v| v / (n * c))).collect()
    }

    pub fn inside(&self, x_spatial: &[f64], tol: f64) -> bool {
        self.domain.signed_distance(x_spatial) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(model: &SpeedModel, x: &[f64]) {
        let j = model.jet(0.3, x);
        let h = 1e-6;
        for i in 0..x.len() {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            let (jp, jm) = (model.jet(0.3, &p), model.jet(0.3, &m));
            assert!(((jp.c - jm.c) / (2.0 * h) - j.grad[i]).abs() < 1e-7, "{model:?} grad {i}");
            for k in 0..x.len() {
                assert!(((jp.grad[k] - jm.grad[k]) / (2.0 * h) - j.hess[i][k]).abs() < 1e-6, "{model:?} hess {i}{k}");
            }
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        fd_check(&SpeedModel::Lens { c0: 1.2, amplitude: 0.4, center: vec![0.1, -0.2], width: 0.7 }, &[0.3, 0.4]);
        fd_check(&SpeedModel::Bump { amplitude: 0.3, center: vec![0.5, 0.5, 0.5], radius: 0.4 }, &[0.6, 0.4, 0.55]);
        fd_check(&SpeedModel::Fisheye { scale: 1.5 }, &[0.3, -0.8]);
        let r = SpeedModel::TimeRamp { c0: 1.0, rate: 0.5 };
        assert_eq!(r.jet(2.0, &[0.0]).c, 2.0);
        assert_eq!(r.jet(2.0, &[0.0]).dt, 0.5);
    }

    #[test]
    fn box_and_ball_geometry() {
        let b = Domain::Box { lower: vec![0.0, 0.0], upper: vec![1.0, 2.0] };
        assert!((b.signed_distance(&[0.5, 1.9]) + 0.1).abs() < 1e-12);
        assert!(b.signed_distance(&[1.5, 1.0]) > 0.0);
        assert_eq!(b.normal(&[0.99, 1.0]), vec![1.0, 0.0]);
        assert_eq!(b.project(&[0.99, 1.0]), vec![1.0, 1.0]);
        let d = Domain::Ball { center: vec![0.0, 0.0], radius: 2.0 };
        assert!((d.signed_distance(&[0.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(d.project(&[0.0, 1.0]), vec![0.0, 2.0]);
    }

    #[test]
    fn lightlike_constructor() {
        let m = MetricModel::new(
            2,
            SpeedModel::Lens { c0: 1.0, amplitude: 0.5, center: vec![0.0, 0.0], width: 1.0 },
            Domain::Ball { center: vec![0.0, 0.0], radius: 3.0 },
        )
        .unwrap();
        let x = [0.0, 0.2, 0.1];
        let z = m.lightlike(&x, &[1.0, 2.0]);
        assert!(m.hamiltonian(&x, &z).abs() < 1e-15);
        assert!(m.velocity(&x, &z)[0] > 0.0);
        assert!(MetricModel::new(2, SpeedModel::Constant { c: 1.0 }, Domain::interval(0.0, 1.0)).is_err());
    }
}
