//! Weighted least-squares extraction of Laurent coefficients from samples.

use super::LightconeError;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct LaurentFit {
    pub orders: Vec<i32>,
    pub coefficients: Vec<f64>,
    /// Max relative misfit of the fitted model over the samples.
    pub residual: f64,
    pub s_grid: Vec<f64>,
    /// 2-norm condition number of the scaled design matrix.
    pub condition: f64,
}

impl LaurentFit {
    pub fn coefficient(&self, order: i32) -> Option<f64> {
        self.orders.iter().position(|&k| k == order).map(|i| self.coefficients[i])
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.orders.iter().zip(&self.coefficients).map(|(&k, &c)| c * s.powi(k)).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LaurentOptions {
    pub max_condition: f64,
}

impl Default for LaurentOptions {
    fn default() -> Self {
        LaurentOptions { max_condition: 1e12 }
    }
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn laurent_coeffs(samples: &[(f64, f64)], orders: &[i32]) -> Result<LaurentFit, LightconeError> {
    laurent_coeffs_with(samples, orders, LaurentOptions::default())
}

/// Fit `value ≈ Σ_k c_k s^k` over `orders`.
///
/// Rows are weighted by `s^(-min order)` so the misfit is measured relative
/// to the dominant term, and columns are scaled to unit norm before the SVD.
pub fn laurent_coeffs_with(samples: &[(f64, f64)], orders: &[i32], opts: LaurentOptions) -> Result<LaurentFit, LightconeError> {
    if orders.is_empty() {
        return Err(LightconeError::BadSamples("no orders requested".into()));
    }
    let mut sorted = orders.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != orders.len() {
        return Err(LightconeError::BadSamples("repeated order".into()));
    }
    if samples.len() < orders.len() + 2 {
        return Err(LightconeError::BadSamples(format!(
            "{} samples for {} orders; need at least {}",
            samples.len(),
            orders.len(),
            orders.len() + 2
        )));
    }
    if samples.iter().any(|&(s, v)| !(s > 0.0) || !s.is_finite() || !v.is_finite()) {
        return Err(LightconeError::BadSamples("sample points must be positive and finite".into()));
    }
    let lo = samples.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(LightconeError::BadSamples(format!("s spans [{lo:e}, {hi:e}], less than a decade")));
    }

    let kmin = sorted[0];
    let (n, m) = (samples.len(), orders.len());
    let mut a = DMatrix::<f64>::zeros(n, m);
    let mut b = DVector::<f64>::zeros(n);
    for (i, &(s, v)) in samples.iter().enumerate() {
        let w = s.powi(-kmin);
        for (j, &k) in orders.iter().enumerate() {
            a[(i, j)] = s.powi(k) * w;
        }
        b[i] = v * w;
    }
    let scales: Vec<f64> = (0..m).map(|j| a.column(j).norm()).collect();
    for (j, &sc) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / sc);
    }

    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= opts.max_condition) {
        return Err(LightconeError::IllConditioned { condition, bound: opts.max_condition });
    }
    let y = svd.solve(&b, 0.0).map_err(|e| LightconeError::BadSamples(e.to_string()))?;
    let coefficients: Vec<f64> = (0..m).map(|j| y[j] / scales[j]).collect();

    let mut fit =
        LaurentFit { orders: orders.to_vec(), coefficients, residual: 0.0, s_grid: samples.iter().map(|p| p.0).collect(), condition };
    fit.residual = samples
        .iter()
        .map(|&(s, v)| {
            let e = (fit.eval(s) - v).abs();
            if v != 0.0 {
                e / v.abs()
            } else {
                e
            }
        })
        .fold(0.0, f64::max);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reciprocal_is_recovered() {
        let samples: Vec<_> = log_grid(1e-3, 1e-1, 12).into_iter().map(|s| (s, 1.0 / s)).collect();
        let fit = laurent_coeffs(&samples, &[-1, 0]).unwrap();
        assert!((fit.coefficient(-1).unwrap() - 1.0).abs() < 1e-10);
        assert!(fit.coefficient(0).unwrap().abs() < 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_sample_sets() {
        let few: Vec<_> = log_grid(1e-3, 1e-1, 3).into_iter().map(|s| (s, s)).collect();
        assert!(matches!(laurent_coeffs(&few, &[-1, 0]), Err(LightconeError::BadSamples(_))));
        let narrow: Vec<_> = log_grid(1e-2, 5e-2, 10).into_iter().map(|s| (s, s)).collect();
        assert!(matches!(laurent_coeffs(&narrow, &[-1, 0]), Err(LightconeError::BadSamples(_))));
        let neg = vec![(-1.0, 1.0), (0.1, 1.0), (0.01, 1.0), (0.001, 1.0)];
        assert!(matches!(laurent_coeffs(&neg, &[0]), Err(LightconeError::BadSamples(_))));
    }

    #[test]
    fn ill_conditioned_request_is_refused() {
        let samples: Vec<_> = log_grid(1e-4, 1e-2, 20).into_iter().map(|s| (s, 1.0 / s)).collect();
        let opts = LaurentOptions { max_condition: 10.0 };
        let err = laurent_coeffs_with(&samples, &[-3, -2, -1, 0, 1], opts).unwrap_err();
        assert!(matches!(err, LightconeError::IllConditioned { .. }));
    }

    proptest! {
        #[test]
        fn exact_on_laurent_polynomials(c in prop::array::uniform4(-10.0f64..10.0)) {
            let orders = [-2, -1, 0, 1];
            let f = |s: f64| c[0] / (s * s) + c[1] / s + c[2] + c[3] * s;
            let samples: Vec<_> = log_grid(1e-2, 1.0, 16).into_iter().map(|s| (s, f(s))).collect();
            let fit = laurent_coeffs(&samples, &orders).unwrap();
            let scale = c.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for (got, want) in fit.coefficients.iter().zip(c) {
                prop_assert!((got - want).abs() < 1e-8 * scale, "{got} vs {want}");
            }
        }
    }
}
