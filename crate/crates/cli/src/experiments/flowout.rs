//! Fans of null directions, their cut data and pairwise crossings.

use nlwave::geodesics::{fan_intersections, flowout_fan, Domain, Fan, FlowoutConfig, MetricModel, SpeedModel, MAX_APERTURE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::trace::check_metric;
use crate::report::{num, Report, Table, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub x0: Vec<f64>,
    /// Spatial direction of the central member.
    pub direction: Vec<f64>,
    pub aperture: f64,
    pub fan_count: usize,
    pub ds: f64,
    pub max_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub metric: MetricModel,
    /// One or two fans; two planar fans are intersected pairwise.
    pub fans: Vec<FanSpec>,
    /// Expected outcome of the interiority check, when it should be judged.
    pub expect_interior: Option<bool>,
    pub drift_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        let metric = MetricModel {
            dim: 2,
            speed: SpeedModel::Bump { amplitude: 0.3, center: vec![0.0, 0.0], radius: 0.6 },
            domain: Domain::Box { lower: vec![-1.0, -1.0], upper: vec![1.0, 1.0] },
        };
        let fan = FanSpec { x0: vec![0.0, -0.8, -0.1], direction: vec![1.0, 0.1], aperture: 0.05, fan_count: 9, ds: 0.001, max_s: 1.0 };
        Params { metric, fans: vec![fan], expect_interior: None, drift_tol: 1e-8 }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        check_metric(&self.metric)?;
        let d = self.metric.dim;
        if !(1..=2).contains(&self.fans.len()) {
            return Err("give one or two fans".into());
        }
        for f in &self.fans {
            if f.x0.len() != d + 1 || f.direction.len() != d || f.direction.iter().all(|&v| v == 0.0) {
                return Err(format!("fans need x0 of length {} and a nonzero direction of length {d}", d + 1));
            }
            if !(f.aperture > 0.0 && f.aperture <= MAX_APERTURE) || f.fan_count < 2 || !(f.ds > 0.0 && f.max_s > 0.0) {
                return Err(format!("fans need aperture in (0, {MAX_APERTURE}], at least 2 members, positive ds and max_s"));
            }
        }
        if self.expect_interior.is_some() && (self.fans.len() != 2 || d != 2) {
            return Err("expect_interior needs two planar fans".into());
        }
        if !(self.drift_tol > 0.0) {
            return Err("drift_tol must be positive".into());
        }
        Ok(())
    }
}

fn fan_config(m: &MetricModel, f: &FanSpec) -> FlowoutConfig {
    FlowoutConfig {
        x0: f.x0.clone(),
        xi0: m.lightlike(&f.x0, &f.direction),
        aperture: f.aperture,
        fan_count: f.fan_count,
        ds: f.ds,
        max_s: f.max_s,
    }
}

fn summarize(k: usize, fan: &Fan, table: &mut Table) -> serde_json::Value {
    let mut drift: f64 = 0.0;
    for (angle, path) in fan.angles.iter().zip(&fan.paths) {
        let end = path.end();
        drift = drift.max(path.hamiltonian_drift);
        let mut row = vec![k.to_string(), num(*angle), num(end.s), path.first_exit().is_some().to_string()];
        row.extend(end.x.iter().map(|v| num(*v)));
        row.push(num(path.hamiltonian_drift));
        table.push(row);
    }
    let s_end = fan.center.end().s;
    json!({
        "config": fan.config,
        "angles": fan.angles,
        "cut": fan.cut,
        "center_end": fan.center.end(),
        "spread_at_center_end": fan.spread(s_end),
        "max_drift": drift.max(fan.center.hamiltonian_drift),
    })
}

pub fn run(p: &Params, report: &mut Report) {
    let m = &p.metric;
    let built: Vec<_> = p.fans.par_iter().map(|f| flowout_fan(&fan_config(m, f), m)).collect();
    let mut fans = Vec::new();
    for (k, b) in built.into_iter().enumerate() {
        match b {
            Ok(f) => fans.push(f),
            Err(e) => return report.fail_with(&format!("fan {k}"), e),
        }
    }
    let mut header = vec!["fan".to_string(), "angle".into(), "s_end".into(), "exited".into(), "t_end".into()];
    header.extend((1..=m.dim).map(|i| format!("x{i}_end")));
    header.push("hamiltonian_drift".into());
    let mut table = Table { file: "fans.csv".into(), header, rows: Vec::new() };
    let summaries: Vec<_> = fans.iter().enumerate().map(|(k, f)| summarize(k, f, &mut table)).collect();
    let drift = fans.iter().flat_map(|f| f.paths.iter().chain([&f.center])).map(|p| p.hamiltonian_drift).fold(0.0, f64::max);
    report.verdict(Verdict::below("max Hamiltonian drift over all fan members", drift, p.drift_tol));
    let mut results = json!({ "fans": summaries, "max_drift": drift });
    report.tables.push(table);

    if fans.len() == 2 && m.dim == 2 {
        match fan_intersections(m, &fans[0], &fans[1]) {
            Ok(rep) => {
                let mut t = Table::new("intersections.csv", &["angle_a", "angle_b", "s_a", "s_b", "t", "x1", "x2", "interior"]);
                for pt in &rep.points {
                    let mut row = vec![num(pt.angle_a), num(pt.angle_b), num(pt.s_a), num(pt.s_b)];
                    row.extend(pt.q.iter().map(|v| num(*v)));
                    row.push(pt.interior.to_string());
                    t.push(row);
                }
                if let Some(want) = p.expect_interior {
                    report.verdict(Verdict::holds(format!("all crossings interior == {want}"), rep.all_interior == want));
                }
                results["intersections"] = json!(rep);
                report.tables.push(t);
            }
            Err(e) => report.fail_with("fan_intersections", e),
        }
    }
    report.results = results;
}
