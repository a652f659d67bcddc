//! Laurent expansion of the interaction coefficients near the collinear limit.

use nlwave::lightcone::{laurent_coeffs, log_grid, LaurentFit, QuadrupleConfig};
use nlwave::symbols::{coeff_c, coeff_d};
use nlwave::{Dd, Real};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{num, Report, Table, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Rotation angle of the quadruple.
    pub phi: f64,
    /// Half-angle sine range and sample count of the log grid.
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    /// Laurent orders in the fit; must cover −3..−1.
    pub orders: Vec<i32>,
    pub tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { phi: 0.0, s_min: 1e-4, s_max: 1e-2, points: 25, orders: vec![-3, -2, -1, 0, 1], tolerance: 1e-3 }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.s_min > 0.0 && self.s_min < self.s_max && self.s_max < 0.5) {
            return Err(format!("need 0 < s_min < s_max < 0.5, got [{}, {}]", self.s_min, self.s_max));
        }
        for k in [-3, -2, -1] {
            if !self.orders.contains(&k) {
                return Err(format!("orders must include {k}"));
            }
        }
        if self.points <= self.orders.len() {
            return Err(format!("{} points cannot fit {} orders", self.points, self.orders.len()));
        }
        if !(self.tolerance > 0.0) || !self.phi.is_finite() {
            return Err("tolerance must be positive and phi finite".into());
        }
        Ok(())
    }
}

const C_EXPECTED: [(i32, f64); 3] = [(-3, -2.0), (-2, 14.0), (-1, 10.0)];
const D_EXPECTED: [(i32, f64); 3] = [(-3, 1.5), (-2, -10.5), (-1, -2.25)];
const COMBO_EXPECTED: [(i32, f64); 1] = [(-1, 7.0)];

pub fn run(p: &Params, report: &mut Report) {
    let mut samples = (Vec::new(), Vec::new(), Vec::new());
    for s in log_grid(p.s_min, p.s_max, p.points) {
        let q = match QuadrupleConfig::<Dd>::from_half_sine(p.phi, Dd::lit(s)) {
            Ok(q) => q,
            Err(e) => return report.fail_with("quadruple", e),
        };
        let (c, d) = match (coeff_c(&q), coeff_d(&q)) {
            (Ok(c), Ok(d)) => (c, d),
            (Err(e), _) | (_, Err(e)) => return report.fail_with("coefficients", e),
        };
        let combo = c + d * Dd::lit(4.0) / Dd::lit(3.0);
        samples.0.push((s, c.as_f64()));
        samples.1.push((s, d.as_f64()));
        samples.2.push((s, combo.as_f64()));
    }
    let mut table = Table::new("series.csv", &["quantity", "order", "fitted", "expected", "rel_err"]);
    let mut results = serde_json::Map::new();
    let quantities = [("c", &samples.0, &C_EXPECTED[..]), ("d", &samples.1, &D_EXPECTED[..]), ("c+4d/3", &samples.2, &COMBO_EXPECTED[..])];
    for (name, data, expected) in quantities {
        let fit = match laurent_coeffs(data, &p.orders) {
            Ok(f) => f,
            Err(e) => return report.fail_with(&format!("fit of {name}"), e),
        };
        record(name, &fit, expected, p.tolerance, &mut table, report);
        results.insert(
            name.into(),
            json!({
                "orders": fit.orders,
                "coefficients": fit.coefficients,
                "residual": fit.residual,
                "condition": fit.condition,
            }),
        );
    }
    results.insert("s_grid".into(), json!(log_grid(p.s_min, p.s_max, p.points)));
    report.results = results.into();
    report.tables.push(table);
}

fn record(name: &str, fit: &LaurentFit, expected: &[(i32, f64)], tol: f64, table: &mut Table, report: &mut Report) {
    for (&order, &got) in fit.orders.iter().zip(&fit.coefficients) {
        match expected.iter().find(|e| e.0 == order) {
            Some(&(_, want)) => {
                let rel = (got - want).abs() / want.abs();
                table.push(vec![name.into(), order.to_string(), num(got), num(want), num(rel)]);
                report.verdict(Verdict::at_most(format!("{name} coefficient of s^{order} (rel err vs {want})"), rel, tol));
            }
            None => table.push(vec![name.into(), order.to_string(), num(got), String::new(), String::new()]),
        }
    }
}
