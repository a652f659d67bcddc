//! Fiberwise convolution powers of sampled symbol profiles.

use serde::Serialize;
use std::f64::consts::TAU;
use thiserror::Error;

/// Spacetime dimension entering the order shift `m = μ + n/4 − 1/2`.
const SPACETIME_DIM: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvolutionError {
    #[error("convolution power must be at least 2, got {0}")]
    BadPower(u32),
    #[error("result needs {needed} samples, cap is {cap}")]
    GridOverflow { needed: usize, cap: usize },
    #[error("invalid profile: {0}")]
    Invalid(String),
}

/// Samples of a symbol on the uniform fiber grid `origin + i·step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolProfile {
    pub samples: Vec<f64>,
    pub step: f64,
    pub origin: f64,
    /// Conormal order `μ`.
    pub order: f64,
    /// Vanishing order `k + 1` at the carrier, when the order admits one.
    pub vanish_order: Option<u32>,
}

impl SymbolProfile {
    pub fn new(samples: Vec<f64>, step: f64, origin: f64, order: f64) -> Result<Self, ConvolutionError> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(ConvolutionError::Invalid(format!("step {step}")));
        }
        if samples.is_empty() || samples.iter().any(|x| !x.is_finite()) {
            return Err(ConvolutionError::Invalid("samples must be finite and nonempty".into()));
        }
        if !origin.is_finite() || !order.is_finite() {
            return Err(ConvolutionError::Invalid("origin and order must be finite".into()));
        }
        Ok(SymbolProfile { samples, step, origin, order, vanish_order: vanishing_order(order) })
    }

    /// Sample a function on `n` points starting at `origin`.
    pub fn sample(f: impl Fn(f64) -> f64, origin: f64, step: f64, n: usize, order: f64) -> Result<Self, ConvolutionError> {
        Self::new((0..n).map(|i| f(origin + i as f64 * step)).collect(), step, origin, order)
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    /// Riemann sum `Σ samples · step`.
    pub fn mass(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.step
    }

    pub fn mean(&self) -> f64 {
        let m: f64 = self.samples.iter().sum();
        self.samples.iter().enumerate().map(|(i, &v)| v * self.coord(i)).sum::<f64>() / m
    }

    pub fn variance(&self) -> f64 {
        let m: f64 = self.samples.iter().sum();
        let mu = self.mean();
        self.samples.iter().enumerate().map(|(i, &v)| v * (self.coord(i) - mu).powi(2)).sum::<f64>() / m
    }
}

/// `k(m) + 1` with `−m−2 ≤ k(m) < −m−1`, symbol order `m = μ + n/4 − 1/2`;
/// only defined for `m < −1`.
pub fn vanishing_order(order: f64) -> Option<u32> {
    let m = order + SPACETIME_DIM / 4.0 - 0.5;
    if m < -1.0 {
        let k = (-m - 2.0).ceil().max(0.0);
        Some(k as u32 + 1)
    } else {
        None
    }
}

/// Order of the `m`-th power: `μ + (m−1)(μ + 3/2)`.
pub fn power_order(order: f64, m: u32) -> f64 {
    order + (m as f64 - 1.0) * (order + 1.5)
}

#[derive(Debug, Clone, Copy)]
pub struct ConvolutionOptions {
    pub max_len: usize,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        ConvolutionOptions { max_len: 1 << 22 }
    }
}

pub fn convolve_profiles(p: &SymbolProfile, m: u32) -> Result<SymbolProfile, ConvolutionError> {
    convolve_profiles_with(p, m, ConvolutionOptions::default())
}

/// `(2π)^{−(m−1)} p ∗ … ∗ p` (`m` factors), each convolution a Riemann sum.
///
/// The grid grows to `m(n−1)+1` samples starting at `m·origin`.
pub fn convolve_profiles_with(p: &SymbolProfile, m: u32, opts: ConvolutionOptions) -> Result<SymbolProfile, ConvolutionError> {
    if m < 2 {
        return Err(ConvolutionError::BadPower(m));
    }
    let n = p.samples.len();
    let needed = m as usize * (n - 1) + 1;
    if needed > opts.max_len {
        return Err(ConvolutionError::GridOverflow { needed, cap: opts.max_len });
    }
    let mut acc = p.samples.clone();
    for _ in 1..m {
        acc = full_convolution(&acc, &p.samples, p.step);
    }
    let scale = TAU.powi(-(m as i32 - 1));
    acc.iter_mut().for_each(|v| *v *= scale);
    let order = power_order(p.order, m);
    Ok(SymbolProfile { samples: acc, step: p.step, origin: m as f64 * p.origin, order, vanish_order: vanishing_order(order) })
}

/// Convolution of two profiles on a common step (the general building block).
pub fn convolve_pair(a: &SymbolProfile, b: &SymbolProfile) -> Result<SymbolProfile, ConvolutionError> {
    if (a.step - b.step).abs() > 1e-14 * a.step {
        return Err(ConvolutionError::Invalid(format!("steps differ: {} vs {}", a.step, b.step)));
    }
    let samples = full_convolution(&a.samples, &b.samples, a.step);
    let order = a.order + b.order + 1.5;
    Ok(SymbolProfile {
        samples: samples.into_iter().map(|v| v / TAU).collect(),
        step: a.step,
        origin: a.origin + b.origin,
        order,
        vanish_order: vanishing_order(order),
    })
}

fn full_convolution(a: &[f64], b: &[f64], step: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out.iter_mut().for_each(|v| *v *= step);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_squared_is_triangle() {
        let n = 11;
        let h = 0.1;
        let p = SymbolProfile::new(vec![1.0; n], h, -0.5, -2.0).unwrap();
        let c = convolve_profiles(&p, 2).unwrap();
        assert_eq!(c.samples.len(), 2 * n - 1);
        for (i, &v) in c.samples.iter().enumerate() {
            let k = (i.min(2 * n - 2 - i) + 1) as f64;
            assert!((v * TAU - k * h).abs() < 1e-10);
        }
        assert_eq!(c.origin, -1.0);
    }

    #[test]
    fn order_bookkeeping() {
        let p = SymbolProfile::new(vec![1.0, 2.0, 1.0], 1.0, 0.0, -3.0).unwrap();
        for m in 2..6 {
            let c = convolve_profiles(&p, m).unwrap();
            assert_eq!(c.order, -3.0 + (m as f64 - 1.0) * (-3.0 + 1.5));
        }
        assert_eq!(power_order(-2.5, 3), -2.5 - 2.0);
    }

    #[test]
    fn vanishing_order_values() {
        // μ = −3 ⇒ m = −2.5 ⇒ k ∈ [0.5, 1.5) ⇒ k = 1
        assert_eq!(vanishing_order(-3.0), Some(2));
        // μ = −2 ⇒ m = −1.5 ⇒ k = 0
        assert_eq!(vanishing_order(-2.0), Some(1));
        assert_eq!(vanishing_order(-1.0), None);
        assert_eq!(vanishing_order(-5.5), Some(4));
    }

    #[test]
    fn gaussian_variance_adds() {
        let v = 0.04;
        let h = 0.005;
        let n = 641;
        let origin = 0.3 - 1.6;
        let g = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * v)).exp();
        let p = SymbolProfile::sample(g, origin, h, n, -2.0).unwrap();
        let c = convolve_profiles(&p, 2).unwrap();
        assert!((c.variance() - 2.0 * p.variance()).abs() < 1e-8);
        assert!((c.mean() - 0.6).abs() < 1e-10);
        assert!((p.variance() - v).abs() < 1e-8);
    }

    #[test]
    fn associativity_of_powers() {
        let p = SymbolProfile::sample(|x| (1.0 - x * x).max(0.0).powi(2), -1.0, 0.05, 41, -2.5).unwrap();
        let four = convolve_profiles(&p, 4).unwrap();
        let two = convolve_profiles(&p, 2).unwrap();
        let nested = convolve_pair(&two, &two).unwrap();
        assert_eq!(four.samples.len(), nested.samples.len());
        assert_eq!(four.origin, nested.origin);
        let peak = four.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in four.samples.iter().zip(&nested.samples) {
            assert!((a - b).abs() <= 1e-10 * peak);
        }
    }

    #[test]
    fn errors() {
        let p = SymbolProfile::new(vec![1.0; 100], 0.1, 0.0, -2.0).unwrap();
        assert_eq!(convolve_profiles(&p, 1).unwrap_err(), ConvolutionError::BadPower(1));
        let opts = ConvolutionOptions { max_len: 250 };
        assert!(matches!(convolve_profiles_with(&p, 3, opts), Err(ConvolutionError::GridOverflow { .. })));
        assert!(SymbolProfile::new(vec![1.0], 0.0, 0.0, 0.0).is_err());
        assert!(SymbolProfile::new(vec![f64::NAN], 1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn mass_scales_as_power(vals in prop::collection::vec(0.0f64..1.0, 3..30), m in 2u32..5, h in 0.01f64..0.5) {
            let p = SymbolProfile::new(vals, h, 0.0, -2.0).unwrap();
            let c = convolve_profiles(&p, m).unwrap();
            let want = TAU.powi(-(m as i32 - 1)) * p.mass().powi(m as i32);
            prop_assert!((c.mass() - want).abs() <= 1e-12 * want.abs().max(1e-300));
        }
    }
}
