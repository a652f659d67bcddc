//! Null bicharacteristics with reflections, plus the observable point.

use nlwave::geodesics::{observable_point, trace_bichar, BicharPath, BoundaryEvent, Domain, EventKind, MetricModel, SpeedModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{num, Report, Table, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    /// Space-time start `(t, x′)`.
    pub x0: Vec<f64>,
    /// Spatial direction; the covector is made lightlike with `ζ₀ = −1`.
    pub direction: Vec<f64>,
    pub ds: f64,
    pub max_s: f64,
    #[serde(default = "yes")]
    pub reflect: bool,
}

fn yes() -> bool {
    true
}

/// Seeded paths with uniform starts in `Ω` at `t = 0` and uniform directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPaths {
    pub count: usize,
    pub ds: f64,
    pub max_s: f64,
    #[serde(default = "yes")]
    pub reflect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observable {
    pub x0: Vec<f64>,
    pub t_final: f64,
    pub epsilon: f64,
    /// When given, `q` must match it to `q_tol` in max norm.
    #[serde(default)]
    pub expect_q: Option<Vec<f64>>,
    #[serde(default)]
    pub q_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub metric: MetricModel,
    pub paths: Vec<PathSpec>,
    pub random: Option<RandomPaths>,
    pub observable: Option<Observable>,
    pub drift_tol: f64,
    pub reflection_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        let metric = MetricModel {
            dim: 2,
            speed: SpeedModel::Lens { c0: 1.0, amplitude: 0.4, center: vec![0.2, -0.1], width: 0.4 },
            domain: Domain::Ball { center: vec![0.0, 0.0], radius: 1.0 },
        };
        let paths = [[1.0, 0.2], [-0.4, 1.0], [0.3, -1.0], [1.0, 1.0]]
            .iter()
            .map(|d| PathSpec { x0: vec![0.0, -0.3, 0.2], direction: d.to_vec(), ds: 0.001, max_s: 1.5, reflect: true })
            .collect();
        Params { metric, paths, random: None, observable: None, drift_tol: 1e-8, reflection_tol: 1e-10 }
    }
}

pub(crate) fn check_metric(m: &MetricModel) -> Result<(), String> {
    m.validate().map_err(|e| e.to_string())
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        check_metric(&self.metric)?;
        let d = self.metric.dim;
        if self.paths.is_empty() && self.random.as_ref().is_none_or(|r| r.count == 0) {
            return Err("no paths to trace".into());
        }
        for p in &self.paths {
            if p.x0.len() != d + 1 || p.direction.len() != d {
                return Err(format!("paths need x0 of length {} and direction of length {d}", d + 1));
            }
            if !(p.ds > 0.0 && p.max_s > 0.0) || p.direction.iter().all(|&v| v == 0.0) {
                return Err("paths need positive ds, max_s and a nonzero direction".into());
            }
        }
        if let Some(r) = &self.random {
            if !(r.ds > 0.0 && r.max_s > 0.0) {
                return Err("random paths need positive ds and max_s".into());
            }
        }
        if let Some(o) = &self.observable {
            if o.x0.len() != d || !(o.t_final > 0.0) || !(o.epsilon > 0.0) || !(o.q_tol >= 0.0) {
                return Err(format!("observable needs a spatial x0 of length {d}, positive t_final and epsilon"));
            }
            if o.expect_q.as_ref().is_some_and(|q| q.len() != d + 1) {
                return Err("expect_q must be a space-time point".into());
            }
        }
        if !(self.drift_tol > 0.0 && self.reflection_tol > 0.0) {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }
}

fn bounding_box(domain: &Domain) -> (Vec<f64>, Vec<f64>) {
    match domain {
        Domain::Box { lower, upper } => (lower.clone(), upper.clone()),
        Domain::Ball { center, radius } => (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect()),
    }
}

fn random_specs(metric: &MetricModel, r: &RandomPaths, seed: u64) -> Vec<PathSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = bounding_box(&metric.domain);
    (0..r.count)
        .map(|_| {
            let x = loop {
                let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
                if metric.domain.signed_distance(&x) < -1e-3 {
                    break x;
                }
            };
            let dir = loop {
                let v: Vec<f64> = (0..metric.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n2: f64 = v.iter().map(|a| a * a).sum();
                if n2 > 1e-4 && n2 <= 1.0 {
                    break v;
                }
            };
            PathSpec { x0: std::iter::once(0.0).chain(x).collect(), direction: dir, ds: r.ds, max_s: r.max_s, reflect: r.reflect }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest violation of the reflection law at one event: change of the
/// Hamiltonian across the hit, preserved tangential part, flipped normal
/// part and unchanged time component, each relative to the incident size.
pub(crate) fn reflection_defect(metric: &MetricModel, path: &BicharPath, e: &BoundaryEvent) -> f64 {
    let Some(r) = &e.reflected else { return f64::INFINITY };
    let at = &path.samples[e.index].x;
    let n = metric.domain.normal(&at[1..]);
    let (zi, zr) = (&e.incident[1..], &r[1..]);
    let scale = dot(zi, zi).sqrt();
    let (ni, nr) = (dot(zi, &n), dot(zr, &n));
    let tangential = zi.iter().zip(zr).zip(&n).map(|((a, b), c)| ((b - nr * c) - (a - ni * c)).powi(2)).sum::<f64>().sqrt();
    let time = if r[0] == e.incident[0] { 0.0 } else { f64::INFINITY };
    ((metric.hamiltonian(at, r) - metric.hamiltonian(at, &e.incident)).abs() / metric.covector_scale(at, r))
        .max(tangential / scale)
        .max((ni + nr).abs() / scale)
        .max(time)
}

pub fn run(p: &Params, seed: u64, report: &mut Report) {
    let m = &p.metric;
    let mut specs = p.paths.clone();
    if let Some(r) = &p.random {
        specs.extend(random_specs(m, r, seed));
    }
    let traced: Vec<_> =
        specs.par_iter().map(|s| trace_bichar(m, &s.x0, &m.lightlike(&s.x0, &s.direction), s.ds, s.max_s, s.reflect)).collect();

    let mut summary =
        Table::new("paths.csv", &["path", "samples", "reflections", "exited", "s_end", "t_end", "hamiltonian_drift", "reflection_defect"]);
    let mut drift: f64 = 0.0;
    let mut defect: f64 = 0.0;
    let mut reflections = 0;
    let mut out = Vec::new();
    for (k, (spec, res)) in specs.iter().zip(traced).enumerate() {
        let path = match res {
            Ok(p) => p,
            Err(e) => {
                report.fail_with(&format!("path {k}"), &e);
                out.push(json!({ "path": k, "spec": spec, "error": e.to_string() }));
                continue;
            }
        };
        let refl: Vec<_> = path.events.iter().filter(|e| e.kind == EventKind::Reflection).collect();
        let worst = refl.iter().map(|e| reflection_defect(m, &path, e)).fold(0.0, f64::max);
        drift = drift.max(path.hamiltonian_drift);
        defect = defect.max(worst);
        reflections += refl.len();
        let end = path.end();
        summary.push(vec![
            k.to_string(),
            path.samples.len().to_string(),
            refl.len().to_string(),
            path.first_exit().is_some().to_string(),
            num(end.s),
            num(end.x[0]),
            num(path.hamiltonian_drift),
            num(worst),
        ]);
        out.push(json!({
            "path": k,
            "spec": spec,
            "end": end,
            "events": path.events,
            "hamiltonian_drift": path.hamiltonian_drift,
            "reflection_defect": worst,
        }));
        let mut buf = Vec::new();
        match path.write_csv(&mut buf) {
            Ok(()) => report.files.push((format!("path_{k}.csv"), buf)),
            Err(e) => report.fail_with(&format!("path_{k}.csv"), e),
        }
    }
    report.verdict(Verdict::below("max Hamiltonian drift", drift, p.drift_tol));
    if reflections > 0 {
        report.verdict(Verdict::at_most("max reflection defect", defect, p.reflection_tol));
    }
    let mut results = json!({ "paths": out, "max_drift": drift, "reflections": reflections, "max_reflection_defect": defect });

    if let Some(o) = &p.observable {
        match observable_point(m, &o.x0, o.t_final, o.epsilon) {
            Ok(pt) => {
                if let Some(want) = &o.expect_q {
                    let err = pt.q.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    report.verdict(Verdict::at_most("observable point q error", err, o.q_tol));
                }
                results["observable"] = json!({
                    "q": pt.q,
                    "tau": pt.tau,
                    "epsilon": pt.epsilon,
                    "boundary_point": pt.boundary_point,
                    "exit": pt.exit,
                    "causal_certified": pt.causal_certified,
                    "nontrapping": pt.nontrapping,
                });
            }
            Err(e) => report.fail_with("observable_point", e),
        }
    }
    report.results = results;
    report.tables.push(summary);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lens_paths_reflect_cleanly() {
        let mut r = Report::new(serde_json::Value::Null);
        run(&Params::default(), 0, &mut r);
        r.finish();
        assert!(r.passed, "{:?} {:?}", r.verdicts, r.error);
        assert!(r.results["reflections"].as_u64().unwrap() > 0);
        assert_eq!(r.files.len(), 4);
    }

    #[test]
    fn flat_interval_observable_point() {
        let p = Params {
            metric: MetricModel::flat_interval(0.0, 1.0),
            paths: vec![PathSpec { x0: vec![0.0, 0.3], direction: vec![1.0], ds: 0.01, max_s: 2.0, reflect: true }],
            random: None,
            observable: Some(Observable { x0: vec![0.5], t_final: 2.0, epsilon: 0.1, expect_q: Some(vec![0.6, 0.5]), q_tol: 0.0 }),
            ..Params::default()
        };
        let mut r = Report::new(serde_json::Value::Null);
        run(&p, 0, &mut r);
        r.finish();
        assert!(r.passed, "{:?} {:?}", r.verdicts, r.error);
    }

    #[test]
    fn random_paths_depend_only_on_the_seed() {
        let m = Params::default().metric;
        let r = RandomPaths { count: 5, ds: 0.01, max_s: 1.0, reflect: true };
        assert_eq!(random_specs(&m, &r, 7), random_specs(&m, &r, 7));
        assert_ne!(random_specs(&m, &r, 7), random_specs(&m, &r, 8));
        assert!(random_specs(&m, &r, 7).iter().all(|s| m.domain.signed_distance(&s.x0[1..]) < 0.0));
    }

    #[test]
    fn schema_checks() {
        let mut p = Params::default();
        p.paths[0].direction = vec![1.0];
        assert!(p.validate().is_err());
        let p = Params { paths: vec![], random: None, ..Params::default() };
        assert!(p.validate().is_err());
    }
}
