//! Finite-difference ε-derivatives of the DN map against the cascade.

use ndarray::Array1;
use nlwave::forward::{BoundaryTrace, Grid, PicardOptions};
use nlwave::multilinear::{cascade, cross_check, NonlinearSolver, ProbeFamily};
use nlwave::NonlinearityProfile;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

use crate::report::{num, Report, Table, Verdict};

/// Boundary probe `sin⁴(π (t − start)/width)` at one end of the interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    #[serde(default)]
    pub upper: bool,
    pub start: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub cells: usize,
    pub t_final: f64,
    pub courant: f64,
    pub probes: Vec<Probe>,
    /// Largest amplitude in the sweep; each further point halves it.
    pub epsilon: f64,
    pub points: usize,
    pub beta: NonlinearityProfile,
    /// Multiplicity of each probe in the mixed derivative.
    pub patterns: Vec<Vec<usize>>,
    pub slope_target: f64,
    pub slope_tol: f64,
    pub rel_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        let probe = |upper, start| Probe { upper, start, width: 0.3 };
        Params {
            cells: 400,
            t_final: 1.6,
            courant: 0.9,
            probes: vec![probe(false, 0.0), probe(true, 0.0), probe(false, 0.06), probe(true, 0.06)],
            epsilon: 0.005,
            points: 4,
            beta: NonlinearityProfile::lower(0.5, 0.3, 0.2),
            patterns: vec![vec![1, 1, 0, 0], vec![1, 1, 1, 0], vec![1, 1, 1, 1]],
            slope_target: 2.0,
            slope_tol: 0.3,
            rel_tol: 1e-3,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        if self.cells < 4 || !(self.t_final > 0.0) || !(self.courant > 0.0 && self.courant <= 1.0) {
            return Err("need at least 4 cells, positive t_final and courant in (0, 1]".into());
        }
        if self.probes.is_empty() || self.probes.iter().any(|p| !(p.width > 0.0) || !p.start.is_finite()) {
            return Err("probes need finite starts and positive widths".into());
        }
        if !(self.epsilon > 0.0) || self.points < 2 {
            return Err("epsilon must be positive and points at least 2".into());
        }
        if self.patterns.is_empty() {
            return Err("no patterns".into());
        }
        for pat in &self.patterns {
            if pat.len() != self.probes.len() || pat.iter().sum::<usize>() < 2 {
                return Err(format!("pattern {pat:?} needs one entry per probe and total order >= 2"));
            }
        }
        if !(self.slope_tol > 0.0 && self.rel_tol > 0.0) {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }
}

pub fn run(p: &Params, report: &mut Report) {
    let grid = match Grid::line(0.0, 1.0, p.cells, p.t_final, p.courant, 1.0) {
        Ok(g) => g,
        Err(e) => return report.fail_with("grid", e),
    };
    let speed = Array1::ones(grid.n_nodes());
    let sources = p
        .probes
        .iter()
        .map(|pr| {
            let (start, width) = (pr.start, pr.width);
            let side = if pr.upper { 1.0 } else { 0.0 };
            BoundaryTrace::sample(&grid, move |t, x| {
                if x[0] == side && (start..start + width).contains(&t) {
                    (PI * (t - start) / width).sin().powi(4)
                } else {
                    0.0
                }
            })
        })
        .collect();
    let family = match ProbeFamily::new(&grid, &speed, sources, vec![p.epsilon; p.probes.len()]) {
        Ok(f) => f,
        Err(e) => return report.fail_with("probe family", e),
    };
    let order = p.patterns.iter().map(|q| q.iter().sum::<usize>()).max().unwrap_or(2);
    let terms = match cascade(&family, &p.beta, order) {
        Ok(t) => t,
        Err(e) => return report.fail_with("cascade", e),
    };
    let solver = NonlinearSolver { grid, speed, beta: p.beta.clone(), opts: PicardOptions { tol: 0.0, ..PicardOptions::default() } };
    let checks: Vec<_> = p.patterns.par_iter().map(|pat| cross_check(&solver, &family, &terms, pat, p.points)).collect();

    let mut table = Table::new("linearize.csv", &["pattern", "epsilon", "cascade_norm", "stencil_norm", "rel_err", "roundoff_warning"]);
    let mut out = Vec::new();
    for (pat, check) in p.patterns.iter().zip(checks) {
        let rep = match check {
            Ok(r) => r,
            Err(e) => {
                report.fail_with(&format!("cross check {pat:?}"), e);
                continue;
            }
        };
        let label = pat.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("");
        for k in 0..rep.epsilons.len() {
            table.push(vec![
                label.clone(),
                num(rep.epsilons[k]),
                num(rep.cascade_norm),
                num(rep.stencil_norm[k]),
                num(rep.rel_err[k]),
                rep.roundoff_warning[k].to_string(),
            ]);
        }
        report.verdict(Verdict::within(format!("{pat:?} convergence slope in epsilon"), rep.slope_estimate, p.slope_target, p.slope_tol));
        report.verdict(Verdict::at_most(format!("{pat:?} best relative error"), rep.best_rel_err, p.rel_tol));
        out.push(json!({ "report": rep, "best_abs_err": rep.best_rel_err * rep.cascade_norm }));
    }
    report.results = json!({ "cascade_order": order, "checks": out });
    report.tables.push(table);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_pair_check_converges() {
        let p = Params { cells: 100, patterns: vec![vec![1, 1, 0, 0]], ..Params::default() };
        let mut r = Report::new(serde_json::Value::Null);
        run(&p, &mut r);
        r.finish();
        assert!(r.passed, "{:?} {:?}", r.verdicts, r.error);
        assert_eq!(r.tables[0].rows.len(), 4);
    }

    #[test]
    fn schema_checks() {
        assert!(Params { patterns: vec![vec![1, 1]], ..Params::default() }.validate().is_err());
        assert!(Params { patterns: vec![vec![1, 0, 0, 0]], ..Params::default() }.validate().is_err());
        assert!(Params { points: 1, ..Params::default() }.validate().is_err());
    }
}
