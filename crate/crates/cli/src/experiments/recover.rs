//! Oracle round trips for the nonlinearity coefficients.

use nlwave::lightcone::{scheme_configs, QuadrupleConfig};
use nlwave::symbols::{higher_measurement, higher_order_factor, measurement_oracle, recover_higher, recover_lower, three_wave_oracle};
use nlwave::{Dd, NonlinearityProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{num, Report, Table, Verdict};

/// Below this `|β₂|` the three-wave measurement supplies `β₃`.
const THREE_WAVE_BELOW: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerParams {
    pub phi: f64,
    /// Opening of the first configuration and the sine ratio between them.
    pub theta1: f64,
    pub r: f64,
    /// Fixture `(β₂, β₃, β₄)`.
    pub beta: [f64; 3],
    /// Extra seeded profiles with `|β₂| ∈ [0.05, 2]`, `β₃, β₄ ∈ [−3, 3]`.
    pub random_profiles: usize,
    pub tolerance: f64,
}

impl Default for LowerParams {
    fn default() -> Self {
        LowerParams { phi: 0.0, theta1: 0.3, r: 0.5, beta: [0.3, -1.2, 2.5], random_profiles: 0, tolerance: 1e-8 }
    }
}

impl LowerParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.theta1 > 0.0 && self.theta1 < std::f64::consts::FRAC_PI_2) {
            return Err(format!("theta1 must lie in (0, π/2), got {}", self.theta1));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(format!("r must lie in (0, 1), got {}", self.r));
        }
        if !self.beta.iter().chain([&self.phi]).all(|v| v.is_finite()) {
            return Err("beta and phi must be finite".into());
        }
        if !(self.tolerance > 0.0) {
            return Err("tolerance must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HigherCase {
    pub n: u32,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HigherParams {
    pub cases: Vec<HigherCase>,
    /// Extra seeded values with `n ∈ {5, 6}` and `β_n ∈ [−3, 3]`.
    pub random_values: usize,
}

impl Default for HigherParams {
    fn default() -> Self {
        HigherParams { cases: vec![HigherCase { n: 5, beta: 0.7 }, HigherCase { n: 6, beta: -1.25 }], random_values: 0 }
    }
}

impl HigherParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.cases.is_empty() && self.random_values == 0 {
            return Err("nothing to recover".into());
        }
        for c in &self.cases {
            if c.n < 5 || !c.beta.is_finite() {
                return Err(format!("higher-order cases need n >= 5 and finite beta, got n = {}", c.n));
            }
        }
        Ok(())
    }
}

struct LowerRow {
    label: String,
    truth: [f64; 3],
    got: Result<([f64; 3], f64, String), String>,
}

fn recover_one(beta: [f64; 3], qs: &[QuadrupleConfig<Dd>; 3]) -> Result<([f64; 3], f64, String), String> {
    let profile = NonlinearityProfile::lower(beta[0], beta[1], beta[2]);
    let [m0, m1, m2] = [0, 1, 2].map(|j| measurement_oracle(&profile, &qs[j]).map_err(|e| e.to_string()));
    let ms = [m0?, m1?, m2?];
    let tw = if beta[0].abs() < THREE_WAVE_BELOW {
        let tri = [qs[0].parts[0], qs[0].parts[1], qs[0].parts[2]];
        Some(three_wave_oracle(&profile, &tri).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let rec = recover_lower(&ms, qs, tw.as_ref()).map_err(|e| e.to_string())?;
    let source = serde_json::to_value(rec.beta3_source).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    Ok(([rec.beta2, rec.beta3, rec.beta4], rec.condition, source))
}

pub fn run_lower(p: &LowerParams, seed: u64, report: &mut Report) {
    let qs = match scheme_configs::<Dd>(p.phi, p.theta1, p.r) {
        Ok(q) => q,
        Err(e) => return report.fail_with("configurations", e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = vec![("fixture".to_string(), p.beta)];
    for k in 0..p.random_profiles {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b = [sign * rng.gen_range(0.05..2.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        cases.push((format!("random-{k}"), b));
    }
    let rows: Vec<LowerRow> = cases.into_par_iter().map(|(label, truth)| LowerRow { label, truth, got: recover_one(truth, &qs) }).collect();

    let mut table = Table::new(
        "recover_lower.csv",
        &["case", "beta2", "beta3", "beta4", "recovered_beta2", "recovered_beta3", "recovered_beta4", "max_abs_err", "condition"],
    );
    let mut worst: f64 = 0.0;
    let mut out = Vec::new();
    for row in &rows {
        match &row.got {
            Ok((got, cond, source)) => {
                let err = got.iter().zip(&row.truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst = worst.max(err);
                let mut line = vec![row.label.clone()];
                line.extend(row.truth.iter().chain(got).map(|&v| num(v)));
                line.extend([num(err), num(*cond)]);
                table.push(line);
                out.push(json!({
                    "case": row.label, "truth": row.truth, "recovered": got,
                    "max_abs_err": err, "condition": cond, "beta3_source": source,
                }));
            }
            Err(e) => {
                report.fail_with(&format!("recovery of {}", row.label), e);
                out.push(json!({ "case": row.label, "truth": row.truth, "error": e }));
            }
        }
    }
    report.verdict(Verdict::at_most("max abs error over all profiles", worst, p.tolerance));
    report.results = json!({
        "thetas": qs.iter().map(|q| q.theta()).collect::<Vec<_>>(),
        "max_abs_err": worst,
        "cases": out,
    });
    report.tables.push(table);
}

pub fn run_higher(p: &HigherParams, seed: u64, report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<(String, HigherCase)> = p.cases.iter().enumerate().map(|(k, c)| (format!("case-{k}"), c.clone())).collect();
    for k in 0..p.random_values {
        cases.push((format!("random-{k}"), HigherCase { n: rng.gen_range(5..=6), beta: rng.gen_range(-3.0..3.0) }));
    }
    let mut table = Table::new("recover_higher.csv", &["case", "n", "beta", "factor", "measurement", "recovered", "abs_err"]);
    // configured fixtures must come back bit for bit, random draws within 1 ulp
    let (mut fixture_err, mut random_rel): (f64, f64) = (0.0, 0.0);
    let mut out = Vec::new();
    for (k, (label, c)) in cases.iter().enumerate() {
        let got = higher_measurement(c.n, c.beta, label).and_then(|m| recover_higher(c.n, &m).map(|r| (m.value, r)));
        match got {
            Ok((value, rec)) => {
                let err = (rec - c.beta).abs();
                if k < p.cases.len() {
                    fixture_err = fixture_err.max(err);
                } else {
                    random_rel = random_rel.max(err / c.beta.abs());
                }
                let factor = higher_order_factor(c.n);
                table.push(vec![label.clone(), c.n.to_string(), num(c.beta), num(factor), num(value), num(rec), num(err)]);
                out.push(json!({ "case": label, "n": c.n, "beta": c.beta, "factor": factor, "measurement": value, "recovered": rec }));
            }
            Err(e) => report.fail_with(&format!("recovery of {label}"), e),
        }
    }
    if !p.cases.is_empty() {
        report.verdict(Verdict::at_most("configured cases: max abs error (exact)", fixture_err, 0.0));
    }
    if p.random_values > 0 {
        report.verdict(Verdict::at_most("random cases: max rel error (1 ulp)", random_rel, f64::EPSILON));
    }
    report.results = json!({ "max_abs_err_configured": fixture_err, "max_rel_err_random": random_rel, "cases": out });
    report.tables.push(table);
}
