//! Minkowski covector algebra in 1+3 dimensions, signature (-,+,+,+).
//!
//! Everything here is generic over [`Real`] so the same code runs in `f64`
//! and in double-double ([`crate::Dd`]). Small angles need the latter: the
//! four parts of a quadruple grow like `1/θ²` while their sum stays O(1).

mod laurent;

pub use laurent::{laurent_coeffs, laurent_coeffs_with, log_grid, LaurentFit, LaurentOptions};

use crate::real::{Dd, Real};
use crate::symbols::coeffs::{coeff_c, coeff_d};
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Relative tolerance used by [`Covector4::is_lightlike`] by default.
pub const LIGHTLIKE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LightconeError {
    #[error("degenerate angle theta = {theta}: need 0 < |theta| < pi/2")]
    DegenerateAngle { theta: f64 },
    #[error("sum of covectors is (numerically) lightlike: |w|^2 = {denominator:e}, scale {scale:e}")]
    NullSum { denominator: f64, scale: f64 },
    #[error("least-squares system ill-conditioned: condition {condition:e} > bound {bound:e}")]
    IllConditioned { condition: f64, bound: f64 },
    #[error("invalid samples: {0}")]
    BadSamples(String),
    #[error("ratio r = {0} outside (0, 1)")]
    BadRatio(f64),
}

/// A covector `(ζ₀, ζ₁, ζ₂, ζ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covector4<T = f64>(pub [T; 4]);

impl<T: Real> Covector4<T> {
    pub fn new(c: [T; 4]) -> Self {
        Covector4(c)
    }

    pub fn from_f64(c: [f64; 4]) -> Self {
        Covector4(c.map(T::lit))
    }

    pub fn zero() -> Self {
        Covector4([T::zero(); 4])
    }

    pub fn time(&self) -> T {
        self.0[0]
    }

    pub fn to_f64(&self) -> Covector4<f64> {
        Covector4(self.0.map(|x| x.as_f64()))
    }

    /// Squared Euclidean norm of the components.
    pub fn euclid_sq(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// `⟨ζ, ζ⟩` with the Minkowski pairing.
    pub fn norm_sq(&self) -> T {
        minkowski_pair(self, self)
    }

    pub fn is_lightlike(&self, tol: f64) -> bool {
        self.norm_sq().abs().as_f64() <= tol * self.euclid_sq().as_f64()
    }

    /// Lightlike with negative time component.
    pub fn is_future_lightlike(&self, tol: f64) -> bool {
        self.is_lightlike(tol) && self.time() < T::zero()
    }
}

impl<T: Real> Add for Covector4<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Covector4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl<T: Real> Sub for Covector4<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Covector4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl<T: Real> Mul<T> for Covector4<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Covector4(self.0.map(|x| x * k))
    }
}

impl<T: Real> Neg for Covector4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Covector4(self.0.map(|x| -x))
    }
}

/// `⟨a, b⟩ = −a₀b₀ + a₁b₁ + a₂b₂ + a₃b₃`.
pub fn minkowski_pair<T: Real>(a: &Covector4<T>, b: &Covector4<T>) -> T {
    -a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] + a.0[3] * b.0[3]
}

/// `(Σ w₀)² / ⟨Σ w, Σ w⟩` for any number of covectors.
pub fn sum_ratio<T: Real>(ws: &[Covector4<T>]) -> Result<T, LightconeError> {
    let sum = ws.iter().fold(Covector4::zero(), |acc, &w| acc + w);
    let den = sum.norm_sq();
    let scale = sum.euclid_sq();
    let floor = T::lit(1e3 * T::UNIT_ROUNDOFF) * scale;
    if !(den.abs() > floor) {
        return Err(LightconeError::NullSum { denominator: den.as_f64(), scale: scale.as_f64() });
    }
    Ok(sum.time() * sum.time() / den)
}

/// Pair ratio `(a₀+b₀)² / ⟨a+b, a+b⟩`.
pub fn pair_ratio<T: Real>(a: &Covector4<T>, b: &Covector4<T>) -> Result<T, LightconeError> {
    sum_ratio(&[*a, *b])
}

/// Triple ratio `(a₀+b₀+c₀)² / ⟨a+b+c, a+b+c⟩`.
pub fn triple_ratio<T: Real>(a: &Covector4<T>, b: &Covector4<T>, c: &Covector4<T>) -> Result<T, LightconeError> {
    sum_ratio(&[*a, *b, *c])
}

/// Trigonometric data of the opening angle, kept consistent in the working
/// precision: `cos_m1 = cos θ − 1` is never formed by subtraction.
#[derive(Debug, Clone, Copy)]
pub struct Opening<T> {
    pub sin: T,
    pub cos: T,
    pub cos_m1: T,
    /// `sin(θ/2)`
    pub half_sin: T,
}

impl<T: Real> Opening<T> {
    /// From `s = sin(θ/2)`.
    pub fn from_half_sine(s: T) -> Result<Self, LightconeError> {
        let one = T::one();
        let two = T::lit(2.0);
        let half_max = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        if s == T::zero() || !(s.abs() < half_max) || !s.is_finite() {
            return Err(LightconeError::DegenerateAngle { theta: 2.0 * s.as_f64().clamp(-1.0, 1.0).asin() });
        }
        let s2 = s * s;
        Ok(Opening { sin: two * s * (one - s2).sqrt(), cos: one - two * s2, cos_m1: -two * s2, half_sin: s })
    }

    /// From `sin θ`, with `θ ∈ (−π/2, π/2)`.
    pub fn from_sine(sin: T) -> Result<Self, LightconeError> {
        let one = T::one();
        if sin == T::zero() || !(sin.abs() < one) || !sin.is_finite() {
            return Err(LightconeError::DegenerateAngle { theta: sin.as_f64().clamp(-1.0, 1.0).asin() });
        }
        let cos = (one - sin * sin).sqrt();
        let cos_m1 = -(sin * sin) / (one + cos);
        let half = (-cos_m1 / T::lit(2.0)).sqrt();
        Ok(Opening { sin, cos, cos_m1, half_sin: if sin < T::zero() { -half } else { half } })
    }

    pub fn from_angle(theta: T) -> Result<Self, LightconeError> {
        let t = theta.as_f64();
        if t == 0.0 || !(t.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(LightconeError::DegenerateAngle { theta: t });
        }
        Self::from_half_sine((theta / T::lit(2.0)).sin())
    }

    /// θ in `f64` (for labelling only).
    pub fn theta(&self) -> f64 {
        2.0 * self.half_sin.as_f64().asin()
    }
}

/// The four-covector construction: lightlike parts `α_j ẑ_j` summing to
/// `ζ = (−1, 0, cos φ, sin φ)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadrupleConfig<T = f64> {
    pub phi: f64,
    pub opening: Opening<T>,
    pub base: [Covector4<T>; 4],
    pub alphas: [T; 4],
    pub zeta: Covector4<T>,
    pub parts: [Covector4<T>; 4],
}

impl<T: Real> QuadrupleConfig<T> {
    pub fn build(phi: f64, theta: T) -> Result<Self, LightconeError> {
        Ok(Self::from_opening(phi, Opening::from_angle(theta)?))
    }

    pub fn from_half_sine(phi: f64, s: T) -> Result<Self, LightconeError> {
        Ok(Self::from_opening(phi, Opening::from_half_sine(s)?))
    }

    pub fn from_sine(phi: f64, sin: T) -> Result<Self, LightconeError> {
        Ok(Self::from_opening(phi, Opening::from_sine(sin)?))
    }

    pub fn from_opening(phi: f64, o: Opening<T>) -> Self {
        let one = T::one();
        let two = T::lit(2.0);
        // unit direction normalized in the working precision
        let (cp, sp) = (T::lit(phi.cos()), T::lit(phi.sin()));
        let len = (cp * cp + sp * sp).sqrt();
        let (cp, sp) = (cp / len, sp / len);
        let (c, s) = (o.cos, o.sin);

        let base = [
            Covector4([-one, one, T::zero(), T::zero()]),
            Covector4([-one, c, s * sp, -s * cp]),
            Covector4([-one, c, -s * sp, s * cp]),
            Covector4([-one, c, s * cp, s * sp]),
        ];
        let a1 = c / o.cos_m1;
        let a2 = -(o.cos_m1 + s) / (two * o.cos_m1 * s);
        let a4 = one / s;
        let alphas = [a1, a2, a2, a4];
        let parts = std::array::from_fn(|j| base[j] * alphas[j]);
        QuadrupleConfig { phi, opening: o, base, alphas, zeta: Covector4([-one, T::zero(), cp, sp]), parts }
    }

    pub fn theta(&self) -> f64 {
        self.opening.theta()
    }

    /// `Σ_j ζ^(j) − ζ`.
    pub fn sum_defect(&self) -> Covector4<T> {
        self.parts.iter().fold(Covector4::zero(), |acc, &w| acc + w) - self.zeta
    }

    /// Short label identifying the configuration.
    pub fn id(&self) -> String {
        format!("quad(phi={:.6},theta={:.12e})", self.phi, self.theta())
    }

    pub fn to_f64(&self) -> QuadrupleConfig<f64> {
        let o = &self.opening;
        QuadrupleConfig {
            phi: self.phi,
            opening: Opening { sin: o.sin.as_f64(), cos: o.cos.as_f64(), cos_m1: o.cos_m1.as_f64(), half_sin: o.half_sin.as_f64() },
            base: self.base.map(|b| b.to_f64()),
            alphas: self.alphas.map(|a| a.as_f64()),
            zeta: self.zeta.to_f64(),
            parts: self.parts.map(|b| b.to_f64()),
        }
    }
}

/// Build a quadruple in `f64`.
pub fn build_quadruple(phi: f64, theta: f64) -> Result<QuadrupleConfig<f64>, LightconeError> {
    QuadrupleConfig::build(phi, theta)
}

/// All pair and triple ratios of four covectors, indexed from 0.
#[derive(Debug, Clone)]
pub struct RatioTable<T> {
    pair: [[T; 4]; 4],
    triple: [[[T; 4]; 4]; 4],
}

impl<T: Real> RatioTable<T> {
    pub fn new(w: &[Covector4<T>; 4]) -> Result<Self, LightconeError> {
        let mut pair = [[T::nan(); 4]; 4];
        let mut triple = [[[T::nan(); 4]; 4]; 4];
        for i in 0..4 {
            for j in (i + 1)..4 {
                let v = pair_ratio(&w[i], &w[j])?;
                pair[i][j] = v;
                pair[j][i] = v;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    if i < j && j < k {
                        let v = triple_ratio(&w[i], &w[j], &w[k])?;
                        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                            triple[a][b][c] = v;
                        }
                    }
                }
            }
        }
        Ok(RatioTable { pair, triple })
    }

    /// `S_ij` (0-based).
    pub fn s(&self, i: usize, j: usize) -> T {
        self.pair[i][j]
    }

    /// `R_ijk` (0-based).
    pub fn r(&self, i: usize, j: usize, k: usize) -> T {
        self.triple[i][j][k]
    }
}

/// Sine relations `sin θ₂ = r sin θ₁`, `sin θ₃ = r² sin θ₁`.
pub fn scheme_configs<T: Real>(phi: f64, theta1: f64, r: f64) -> Result<[QuadrupleConfig<T>; 3], LightconeError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(LightconeError::BadRatio(r));
    }
    let o1 = Opening::from_angle(T::lit(theta1))?;
    let rr = T::lit(r);
    let o2 = Opening::from_sine(o1.sin * rr)?;
    let o3 = Opening::from_sine(o1.sin * rr * rr)?;
    Ok([o1, o2, o3].map(|o| QuadrupleConfig::from_opening(phi, o)))
}

/// Determinant of a 3×3 matrix given by rows.
pub fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryDeterminant {
    pub det: f64,
    /// `21 / (2 s⁴ r⁷)` with `s = sin(θ₁/2)`.
    pub leading: f64,
    pub thetas: [f64; 3],
    /// Rows `(c(θ_j), d(θ_j), 1)`.
    pub rows: [[f64; 3]; 3],
}

/// Determinant of the rows `(c(θ_j), d(θ_j), 1)` over the sine scheme.
///
/// Evaluated directly in double-double; no factored form is used.
pub fn recovery_determinant(theta1: f64, r: f64) -> Result<RecoveryDeterminant, LightconeError> {
    let qs = scheme_configs::<Dd>(0.0, theta1, r)?;
    let mut rows = [[Dd::lit(0.0); 3]; 3];
    for (row, q) in rows.iter_mut().zip(qs.iter()) {
        *row = [coeff_c(q)?, coeff_d(q)?, Dd::lit(1.0)];
    }
    let det = det3(&rows).as_f64();
    let s = qs[0].opening.half_sin.as_f64();
    Ok(RecoveryDeterminant {
        det,
        leading: 21.0 / (2.0 * s.powi(4) * r.powi(7)),
        thetas: qs.map(|q| q.theta()),
        rows: rows.map(|row| row.map(|x| x.as_f64())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn pairing_examples() {
        let a = Covector4::<f64>::from_f64([-1.0, 1.0, 0.0, 0.0]);
        assert_eq!(minkowski_pair(&a, &a), 0.0);
        let b = Covector4::<f64>::from_f64([-1.0, 0.0, 1.0, 0.0]);
        let c = Covector4::<f64>::from_f64([-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(minkowski_pair(&b, &c), -1.0);
    }

    #[test]
    fn pair_sum_norm_matches_alpha_form() {
        let q = build_quadruple(0.0, 0.2).unwrap();
        let w = q.parts[0] + q.parts[1];
        let expected = 2.0 * q.alphas[0] * q.alphas[1] * (0.2f64.cos() - 1.0);
        assert_relative_eq!(minkowski_pair(&w, &w), expected, max_relative = 1e-12);
    }

    #[test]
    fn alpha4_is_cosecant() {
        let q = build_quadruple(0.0, 0.2).unwrap();
        assert_relative_eq!(q.alphas[3], 1.0 / 0.2f64.sin(), max_relative = 1e-15);
    }

    #[test]
    fn construction_identity_at_pi_over_3() {
        let (phi, th) = (std::f64::consts::FRAC_PI_3, 0.1f64);
        let q = build_quadruple(phi, th).unwrap();
        // closed forms written out independently
        let (c, s) = (th.cos(), th.sin());
        let a1 = c / (c - 1.0);
        let a2 = -((c - 1.0) + s) / (2.0 * (c - 1.0) * s);
        let a4 = 1.0 / s;
        for (got, want) in q.alphas.iter().zip([a1, a2, a2, a4]) {
            assert!(got.is_finite());
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        assert_eq!(q.alphas[1], q.alphas[2]);
        let mut sum = [0.0; 4];
        let bases = [
            [-1.0, 1.0, 0.0, 0.0],
            [-1.0, c, s * phi.sin(), -s * phi.cos()],
            [-1.0, c, -s * phi.sin(), s * phi.cos()],
            [-1.0, c, s * phi.cos(), s * phi.sin()],
        ];
        for (b, a) in bases.iter().zip([a1, a2, a2, a4]) {
            for k in 0..4 {
                sum[k] += a * b[k];
            }
        }
        let zeta = [-1.0, 0.0, phi.cos(), phi.sin()];
        for k in 0..4 {
            assert!((sum[k] - zeta[k]).abs() < 1e-12);
            assert!((q.zeta.0[k] - zeta[k]).abs() < 1e-15);
        }
        for p in &q.parts {
            assert!(p.is_lightlike(LIGHTLIKE_TOL));
            assert!(p.is_future_lightlike(LIGHTLIKE_TOL) == (p.time() < 0.0));
        }
    }

    #[test]
    fn degenerate_angles_rejected() {
        assert!(matches!(build_quadruple(0.0, 0.0), Err(LightconeError::DegenerateAngle { .. })));
        assert!(matches!(build_quadruple(0.0, 1.6), Err(LightconeError::DegenerateAngle { .. })));
        assert!(matches!(build_quadruple(0.0, -1.6), Err(LightconeError::DegenerateAngle { .. })));
        assert!(QuadrupleConfig::<f64>::from_sine(0.0, 1.0).is_err());
    }

    #[test]
    fn s23_and_s14_closed_forms() {
        let q = build_quadruple(0.4, 0.15).unwrap();
        let s23 = pair_ratio(&q.parts[1], &q.parts[2]).unwrap();
        assert_relative_eq!(s23, -1.0 / 0.15f64.sin().powi(2), max_relative = 1e-12);
        let (a1, a4) = (q.alphas[0], q.alphas[3]);
        let s14 = pair_ratio(&q.parts[0], &q.parts[3]).unwrap();
        let want = (a1 + a4).powi(2) / (2.0 * a1 * a4 * (0.15f64.cos() - 1.0));
        assert_relative_eq!(s14, want, max_relative = 1e-11);
    }

    #[test]
    fn equal_lightlike_pair_is_null_sum() {
        let q = build_quadruple(0.0, 0.2).unwrap();
        assert!(matches!(pair_ratio(&q.parts[0], &q.parts[0]), Err(LightconeError::NullSum { .. })));
        let a = Covector4::<f64>::from_f64([-1.0, 0.6, 0.8, 0.0]);
        assert!(matches!(pair_ratio(&a, &(a * 3.0)), Err(LightconeError::NullSum { .. })));
    }

    #[test]
    fn triple_closed_forms() {
        let th = 0.25f64;
        let q = build_quadruple(1.0, th).unwrap();
        let [z1, z2, z3, z4] = q.parts;
        let r234 = triple_ratio(&z2, &z3, &z4).unwrap();
        assert_relative_eq!(r234, 1.0 / (2.0 * th.cos() * (th.cos() - 1.0)), max_relative = 1e-11);
        let r123 = triple_ratio(&z1, &z2, &z3).unwrap();
        assert_relative_eq!(r123, (1.0 - th.sin()) / (2.0 * th.sin()), max_relative = 1e-11);
        let r124 = triple_ratio(&z1, &z2, &z4).unwrap();
        let r134 = triple_ratio(&z1, &z3, &z4).unwrap();
        assert_relative_eq!(r124, r134, max_relative = 1e-12);
    }

    #[test]
    fn ratio_table_symmetries() {
        let q = QuadrupleConfig::<Dd>::build(0.7, Dd::lit(0.01)).unwrap();
        let t = RatioTable::new(&q.parts).unwrap();
        assert!(rel(t.s(0, 1).as_f64(), t.s(0, 2).as_f64()) < 1e-25);
        assert!(rel(t.s(1, 3).as_f64(), t.s(2, 3).as_f64()) < 1e-25);
        assert_eq!(t.r(2, 0, 1), t.r(0, 1, 2));
        assert_eq!(t.s(3, 1), t.s(1, 3));
    }

    #[test]
    fn half_sine_and_sine_constructions_agree() {
        let th = 0.05f64;
        let a = QuadrupleConfig::<Dd>::build(0.3, Dd::lit(th)).unwrap();
        let b = QuadrupleConfig::<Dd>::from_sine(0.3, a.opening.sin).unwrap();
        for j in 0..4 {
            assert!(rel(a.alphas[j].as_f64(), b.alphas[j].as_f64()) < 1e-28);
        }
        assert!((a.theta() - th).abs() < 1e-15);
    }

    #[test]
    fn determinant_is_nonzero_and_near_leading_term() {
        let d = recovery_determinant(1e-2, 0.05).unwrap();
        assert!(d.det != 0.0);
        let ratio = d.det / d.leading;
        assert!((0.85..=1.15).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn row_swap_flips_determinant() {
        let d = recovery_determinant(0.1, 0.3).unwrap();
        let m = d.rows;
        let base = det3(&m);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let mut s = m;
            s.swap(a, b);
            assert_relative_eq!(det3(&s), -base, max_relative = 1e-9);
        }
    }

    #[test]
    fn bad_ratio_rejected() {
        assert!(matches!(recovery_determinant(0.01, 1.0), Err(LightconeError::BadRatio(_))));
        assert!(matches!(recovery_determinant(0.0, 0.5), Err(LightconeError::DegenerateAngle { .. })));
    }

    proptest! {
        #[test]
        fn sum_identity_and_lightlike_parts(phi in 0.0f64..std::f64::consts::TAU, th in 1e-3f64..0.5) {
            let q = QuadrupleConfig::<Dd>::build(phi, Dd::lit(th)).unwrap();
            let defect = q.sum_defect().euclid_sq().sqrt().as_f64();
            prop_assert!(defect <= 1e-12 * 2f64.sqrt());
            for p in &q.parts {
                prop_assert!(p.is_lightlike(LIGHTLIKE_TOL));
            }
            prop_assert_eq!(q.alphas[1], q.alphas[2]);
        }

        #[test]
        fn sum_identity_in_f64_moderate_angles(phi in 0.0f64..std::f64::consts::TAU, th in 0.05f64..1.5) {
            let q = build_quadruple(phi, th).unwrap();
            let defect = q.sum_defect().euclid_sq().sqrt();
            prop_assert!(defect <= 1e-12 * 2f64.sqrt());
        }

        #[test]
        fn closed_forms_over_small_angles(phi in 0.0f64..std::f64::consts::TAU, th in 1e-3f64..0.5) {
            let q = QuadrupleConfig::<Dd>::build(phi, Dd::lit(th)).unwrap();
            let o = q.opening;
            let one = Dd::lit(1.0);
            let two = Dd::lit(2.0);
            let [z1, z2, z3, z4] = q.parts;
            let [a1, _, _, a4] = q.alphas;
            let checks = [
                (pair_ratio(&z2, &z3).unwrap(), -one / (o.sin * o.sin)),
                (triple_ratio(&z2, &z3, &z4).unwrap(), one / (two * o.cos * o.cos_m1)),
                (triple_ratio(&z1, &z2, &z3).unwrap(), (one - o.sin) / (two * o.sin)),
                (pair_ratio(&z1, &z4).unwrap(), (a1 + a4) * (a1 + a4) / (two * a1 * a4 * o.cos_m1)),
                (pair_ratio(&z1, &z2).unwrap(), pair_ratio(&z1, &z3).unwrap()),
                (pair_ratio(&z2, &z4).unwrap(), pair_ratio(&z3, &z4).unwrap()),
                (triple_ratio(&z1, &z2, &z4).unwrap(), triple_ratio(&z1, &z3, &z4).unwrap()),
            ];
            for (got, want) in checks {
                prop_assert!(rel(got.as_f64(), want.as_f64()) < 1e-11);
            }
        }

        #[test]
        fn pairing_symmetric_bilinear(a in prop::array::uniform4(-5.0f64..5.0), b in prop::array::uniform4(-5.0f64..5.0),
                                      c in prop::array::uniform4(-5.0f64..5.0), k in -3.0f64..3.0) {
            let (a, b, c) = (Covector4::<f64>(a), Covector4(b), Covector4(c));
            prop_assert_eq!(minkowski_pair(&a, &b), minkowski_pair(&b, &a));
            let lhs = minkowski_pair(&(a * k + c), &b);
            let rhs = k * minkowski_pair(&a, &b) + minkowski_pair(&c, &b);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
        }
    }
}
