use super::{GeodesicError, MetricModel};
use serde::Serialize;
use std::io::Write;

/// Location accuracy of boundary events in the flow parameter.
pub const EVENT_TOL: f64 = 1e-10;
/// Rays meeting the boundary with `|cos(angle to normal)|` below this are
/// treated as glancing.
pub const GLANCING_TOL: f64 = 1e-6;
/// Relative Hamiltonian tolerance for initial data.
pub const LIGHTLIKE_TOL: f64 = 1e-10;

/// Phase-space point `(x, ζ)` on `ℝ^{1+d} × ℝ^{1+d}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub s: f64,
    pub x: Vec<f64>,
    pub zeta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Reflection,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryEvent {
    pub kind: EventKind,
    /// Index into `samples` of the point on the boundary (for reflections,
    /// the incident state; the reflected state follows it).
    pub index: usize,
    pub s: f64,
    pub incident: Vec<f64>,
    pub reflected: Option<Vec<f64>>,
}

/// Sampled (broken) null bicharacteristic.
#[derive(Debug, Clone, Serialize)]
pub struct BicharPath {
    pub metric: MetricModel,
    pub samples: Vec<PhasePoint>,
    pub events: Vec<BoundaryEvent>,
    /// `max |b(x, ζ)| / (ζ₀² + c²|ζ′|²)` over the samples.
    pub hamiltonian_drift: f64,
}

impl BicharPath {
    pub fn start(&self) -> &PhasePoint {
        &self.samples[0]
    }

    pub fn end(&self) -> &PhasePoint {
        self.samples.last().expect("paths have at least one sample")
    }

    pub fn first_exit(&self) -> Option<&BoundaryEvent> {
        self.events.iter().find(|e| e.kind == EventKind::Exit)
    }

    /// Phase point at parameter `s` by integrating from the nearest sample
    /// at or before `s`. Outside the sampled range the flow is continued
    /// freely (ignoring the boundary).
    pub fn at(&self, s: f64) -> PhasePoint {
        let k = self.samples.partition_point(|p| p.s <= s).saturating_sub(1);
        let base = &self.samples[k];
        let (x, z) = rk4(&self.metric, &base.x, &base.zeta, s - base.s);
        PhasePoint { s, x, zeta: z }
    }

    /// `(s, x)` of the first sample after `s_min` where `x` is closest to
    /// `target`.
    pub fn closest_sample(&self, target: &[f64]) -> (usize, f64) {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.x.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>()))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    }

    /// CSV with columns `s, t, x1.., z0.., event`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), GeodesicError> {
        let mut w = csv::Writer::from_writer(out);
        let d = self.metric.dim;
        let mut header = vec!["s".to_string(), "t".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.extend((0..=d).map(|i| format!("zeta{i}")));
        header.push("event".into());
        w.write_record(&header).map_err(|e| GeodesicError::Io(e.to_string()))?;
        for (i, p) in self.samples.iter().enumerate() {
            let event = self
                .events
                .iter()
                .find(|e| e.index == i)
                .map(|e| match e.kind {
                    EventKind::Reflection => "reflection",
                    EventKind::Exit => "exit",
                })
                .unwrap_or("");
            let mut rec: Vec<String> =
                std::iter::once(p.s).chain(p.x.iter().copied()).chain(p.zeta.iter().copied()).map(|v| format!("{v:e}")).collect();
            rec.push(event.into());
            w.write_record(&rec).map_err(|e| GeodesicError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| GeodesicError::Io(e.to_string()))
    }
}

/// Hamiltonian vector field of `b`.
pub(crate) fn field(metric: &MetricModel, x: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let jet = metric.speed.jet(x[0], &x[1..]);
    let c = jet.c;
    let zs2: f64 = z[1..].iter().map(|v| v * v).sum();
    let mut dx = Vec::with_capacity(x.len());
    let mut dz = Vec::with_capacity(x.len());
    dx.push(-2.0 * z[0]);
    dz.push(-2.0 * c * jet.dt * zs2);
    for i in 1..x.len() {
        dx.push(2.0 * c * c * z[i]);
        dz.push(-2.0 * c * jet.grad[i - 1] * zs2);
    }
    (dx, dz)
}

fn axpy(a: &[f64], h: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + h * b).collect()
}

/// One classical Runge-Kutta step of size `h` (no boundary handling).
pub(crate) fn rk4(metric: &MetricModel, x: &[f64], z: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    if h == 0.0 {
        return (x.to_vec(), z.to_vec());
    }
    let (k1x, k1z) = field(metric, x, z);
    let (k2x, k2z) = field(metric, &axpy(x, h / 2.0, &k1x), &axpy(z, h / 2.0, &k1z));
    let (k3x, k3z) = field(metric, &axpy(x, h / 2.0, &k2x), &axpy(z, h / 2.0, &k2z));
    let (k4x, k4z) = field(metric, &axpy(x, h, &k3x), &axpy(z, h, &k3z));
    let comb = |y: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..y.len()).map(|i| y[i] + h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
    };
    (comb(x, &k1x, &k2x, &k3x, &k4x), comb(z, &k1z, &k2z, &k3z, &k4z))
}

/// Free flight over `[0, length]` with step `ds`, ignoring the boundary.
pub(crate) fn flow(metric: &MetricModel, x: &[f64], z: &[f64], length: f64, ds: f64) -> (Vec<f64>, Vec<f64>) {
    let steps = (length.abs() / ds).ceil().max(1.0) as usize;
    let h = length / steps as f64;
    let (mut x, mut z) = (x.to_vec(), z.to_vec());
    for _ in 0..steps {
        (x, z) = rk4(metric, &x, &z, h);
    }
    (x, z)
}

/// Reflects the spatial covector across the tangent plane with normal `n`
/// (Euclidean unit vector). For `g₀ = c⁻²|dx′|²` this is the mirror law
/// `v ↦ v − 2 g(v, ν) ν` with `ν` the `g₀`-unit normal.
pub fn reflect(zeta: &[f64], n: &[f64]) -> Vec<f64> {
    let dot: f64 = zeta[1..].iter().zip(n).map(|(a, b)| a * b).sum();
    std::iter::once(zeta[0]).chain(zeta[1..].iter().zip(n).map(|(z, n)| z - 2.0 * dot * n)).collect()
}

pub(crate) fn check_start(metric: &MetricModel, x0: &[f64], zeta0: &[f64]) -> Result<(), GeodesicError> {
    let n = metric.dim + 1;
    if x0.len() != n || zeta0.len() != n {
        return Err(GeodesicError::BadConfig(format!("points and covectors need {n} components")));
    }
    let b = metric.hamiltonian(x0, zeta0);
    let scale = metric.covector_scale(x0, zeta0);
    if !(b.abs() <= LIGHTLIKE_TOL * scale) || scale == 0.0 {
        return Err(GeodesicError::NotLightlike { b });
    }
    Ok(())
}

/// Integrates the Hamiltonian flow of `b` from `(x0, ζ0)` up to parameter
/// `max_s` with RK4 steps of size `ds`.
///
/// Boundary hits are located by bisection to [`EVENT_TOL`]. With `reflect`
/// the spatial covector is mirrored and the path continues; otherwise the
/// path ends at the exit point.
pub fn trace_bichar(
    metric: &MetricModel,
    x0: &[f64],
    zeta0: &[f64],
    ds: f64,
    max_s: f64,
    reflect_at_boundary: bool,
) -> Result<BicharPath, GeodesicError> {
    check_start(metric, x0, zeta0)?;
    if !(ds > 0.0 && max_s >= 0.0) {
        return Err(GeodesicError::BadConfig("need ds > 0 and max_s >= 0".into()));
    }
    if metric.domain.signed_distance(&x0[1..]) > 1e-9 {
        return Err(GeodesicError::OutsideDomain);
    }
    let phi = |x: &[f64]| metric.domain.signed_distance(&x[1..]);
    let mut samples = vec![PhasePoint { s: 0.0, x: x0.to_vec(), zeta: zeta0.to_vec() }];
    let mut events = Vec::new();
    let (mut x, mut z, mut s) = (x0.to_vec(), zeta0.to_vec(), 0.0);
    while s < max_s {
        let h = ds.min(max_s - s);
        let (nx, nz) = rk4(metric, &x, &z, h);
        if phi(&nx) <= 0.0 {
            (x, z) = (nx, nz);
            s = if h == max_s - s { max_s } else { s + h };
            samples.push(PhasePoint { s, x: x.clone(), zeta: z.clone() });
            continue;
        }
        // bracket the crossing, then finish with a secant step
        let (mut lo, mut hi) = (0.0, h);
        let (mut f_lo, mut f_hi) = (phi(&x), phi(&nx));
        while hi - lo > EVENT_TOL {
            let mid = 0.5 * (lo + hi);
            let f = phi(&rk4(metric, &x, &z, mid).0);
            if f > 0.0 {
                (hi, f_hi) = (mid, f);
            } else {
                (lo, f_lo) = (mid, f);
            }
        }
        let hit = if f_hi > f_lo { (lo + (hi - lo) * (f_lo / (f_lo - f_hi))).clamp(lo, hi) } else { lo };
        let (mut hx, hz) = rk4(metric, &x, &z, hit);
        if phi(&hx).abs() < 1e-9 {
            let p = metric.domain.project(&hx[1..]);
            hx[1..].copy_from_slice(&p);
        }
        s += hit;
        samples.push(PhasePoint { s, x: hx.clone(), zeta: hz.clone() });
        let index = samples.len() - 1;
        if !reflect_at_boundary {
            events.push(BoundaryEvent { kind: EventKind::Exit, index, s, incident: hz, reflected: None });
            break;
        }
        let n = metric.domain.normal(&hx[1..]);
        let zn: f64 = hz[1..].iter().zip(&n).map(|(a, b)| a * b).sum();
        let zlen: f64 = hz[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if zn.abs() < GLANCING_TOL * zlen {
            return Err(GeodesicError::TangentialHit { s, cosine: zn / zlen });
        }
        let rz = reflect(&hz, &n);
        events.push(BoundaryEvent { kind: EventKind::Reflection, index, s, incident: hz, reflected: Some(rz.clone()) });
        samples.push(PhasePoint { s, x: hx.clone(), zeta: rz.clone() });
        (x, z) = (hx, rz);
    }
    let hamiltonian_drift =
        samples.iter().map(|p| metric.hamiltonian(&p.x, &p.zeta).abs() / metric.covector_scale(&p.x, &p.zeta)).fold(0.0, f64::max);
    Ok(BicharPath { metric: metric.clone(), samples, events, hamiltonian_drift })
}
