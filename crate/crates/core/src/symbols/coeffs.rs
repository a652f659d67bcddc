//! Interaction coefficients built from pair and triple ratios.
//!
//! All sums run over every ordered permutation of the index set (24 for the
//! four-wave coefficients, 6 for the three-wave one).

use crate::lightcone::{pair_ratio, Covector4, LightconeError, QuadrupleConfig, RatioTable};
use crate::profile::NonlinearityProfile;
use crate::real::Real;
use itertools::Itertools;
use serde::Serialize;

fn perms(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).permutations(n)
}

/// The two halves of `C`: `(Σ 4 R_ijk S_jk, Σ S_il S_jk)`.
pub fn coeff_c_split<T: Real>(w: &[Covector4<T>; 4]) -> Result<(T, T), LightconeError> {
    let t = RatioTable::new(w)?;
    let four = T::lit(4.0);
    let (mut triple, mut pair) = (T::zero(), T::zero());
    for p in perms(4) {
        let (i, j, k, l) = (p[0], p[1], p[2], p[3]);
        triple = triple + four * t.r(i, j, k) * t.s(j, k);
        pair = pair + t.s(i, l) * t.s(j, k);
    }
    Ok((triple, pair))
}

/// The two halves of `D`: `(Σ 3 S_kl, Σ 2 R_ijk)`.
pub fn coeff_d_split<T: Real>(w: &[Covector4<T>; 4]) -> Result<(T, T), LightconeError> {
    let t = RatioTable::new(w)?;
    let (three, two) = (T::lit(3.0), T::lit(2.0));
    let (mut pair, mut triple) = (T::zero(), T::zero());
    for p in perms(4) {
        let (i, j, k, l) = (p[0], p[1], p[2], p[3]);
        pair = pair + three * t.s(k, l);
        triple = triple + two * t.r(i, j, k);
    }
    Ok((pair, triple))
}

/// `C = Σ (4 R_ijk + S_il) S_jk` for arbitrary covectors.
pub fn coeff_c_of<T: Real>(w: &[Covector4<T>; 4]) -> Result<T, LightconeError> {
    coeff_c_split(w).map(|(a, b)| a + b)
}

/// `D = Σ (3 S_kl + 2 R_ijk)` for arbitrary covectors.
pub fn coeff_d_of<T: Real>(w: &[Covector4<T>; 4]) -> Result<T, LightconeError> {
    coeff_d_split(w).map(|(a, b)| a + b)
}

pub fn coeff_c<T: Real>(q: &QuadrupleConfig<T>) -> Result<T, LightconeError> {
    coeff_c_of(&q.parts)
}

pub fn coeff_d<T: Real>(q: &QuadrupleConfig<T>) -> Result<T, LightconeError> {
    coeff_d_of(&q.parts)
}

/// Three-wave coefficient `Σ_(ijk) (2 S_jk β₂² − β₃)`.
pub fn coeff_q3<T: Real>(triple: &[Covector4<T>; 3], beta2: T, beta3: T) -> Result<T, LightconeError> {
    let mut s = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let v = pair_ratio(&triple[i], &triple[j])?;
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    let two = T::lit(2.0);
    Ok(perms(3).fold(T::zero(), |acc, p| acc + two * s[p[1]][p[2]] * beta2 * beta2 - beta3))
}

/// Four-wave part sums `Σ ζ₀⁻² 𝒞₁ … Σ ζ₀⁻² 𝒞₄`, each evaluated from its
/// own summand formula.
pub fn coeff_part_sums<T: Real>(w: &[Covector4<T>; 4], beta: &NonlinearityProfile) -> Result<[T; 4], LightconeError> {
    let t = RatioTable::new(w)?;
    let (b2, b3, b4) = (T::lit(beta.beta(2)), T::lit(beta.beta(3)), T::lit(beta.beta(4)));
    let (two, three) = (T::lit(2.0), T::lit(3.0));
    let mut acc = [T::zero(); 4];
    for p in perms(4) {
        let (i, j, k, l) = (p[0], p[1], p[2], p[3]);
        acc[0] = acc[0] - two * b2 * t.r(i, j, k) * (two * t.s(j, k) * b2 * b2 - b3);
        acc[1] = acc[1] - b2 * b2 * b2 * t.s(i, j) * t.s(k, l);
        acc[2] = acc[2] + three * b3 * b2 * t.s(k, l);
        acc[3] = acc[3] - b4;
    }
    Ok(acc)
}

/// Total four-wave coefficient `Σ ζ₀⁻² (𝒞₁ + 𝒞₂ + 𝒞₃ + 𝒞₄)`.
///
/// The `β₄` term enters once per permutation, i.e. as `−24 β₄`.
pub fn coeff_parts<T: Real>(q: &QuadrupleConfig<T>, beta: &NonlinearityProfile) -> Result<T, LightconeError> {
    let p = coeff_part_sums(&q.parts, beta)?;
    Ok(p[0] + p[1] + p[2] + p[3])
}

#[derive(Debug, Clone, Serialize)]
pub struct InteractionCoeffs {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub parts: [f64; 4],
    pub config_id: String,
}

pub fn interaction_coeffs<T: Real>(q: &QuadrupleConfig<T>, beta: &NonlinearityProfile) -> Result<InteractionCoeffs, LightconeError> {
    Ok(InteractionCoeffs {
        c: coeff_c(q)?.as_f64(),
        d: coeff_d(q)?.as_f64(),
        parts: coeff_part_sums(&q.parts, beta)?.map(|x| x.as_f64()),
        config_id: q.id(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightcone::build_quadruple;
    use crate::real::Dd;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn table(q: &QuadrupleConfig<Dd>) -> RatioTable<Dd> {
        RatioTable::new(&q.parts).unwrap()
    }

    #[test]
    fn c_matches_grouped_form_at_0_3() {
        let q = QuadrupleConfig::<Dd>::build(0.0, Dd::lit(0.3)).unwrap();
        let t = table(&q);
        let s = |i: usize, j: usize| t.s(i - 1, j - 1);
        let r = |i: usize, j: usize, k: usize| t.r(i - 1, j - 1, k - 1);
        let e = Dd::lit;
        let c2 = e(8.0) * (e(2.0) * s(1, 2) * s(3, 4) + s(1, 4) * s(2, 3));
        let c11 = e(8.0) * r(1, 2, 3) * (e(2.0) * s(1, 2) + s(2, 3));
        let c12 = e(8.0) * r(2, 3, 4) * (e(2.0) * s(2, 4) + s(2, 3));
        let c13 = e(16.0) * r(1, 2, 4) * (s(1, 2) + s(2, 4) + s(1, 4));
        let grouped = c2 + c11 + c12 + c13;
        let direct = coeff_c(&q).unwrap();
        assert!(rel(direct.as_f64(), grouped.as_f64()) < 1e-25);
        let (tri, pair) = coeff_c_split(&q.parts).unwrap();
        assert!(rel(pair.as_f64(), c2.as_f64()) < 1e-25);
        assert!(rel(tri.as_f64(), (c11 + c12 + c13).as_f64()) < 1e-25);
    }

    #[test]
    fn d_split_matches_grouped_form() {
        let q = QuadrupleConfig::<Dd>::build(1.2, Dd::lit(0.05)).unwrap();
        let t = table(&q);
        let s = |i: usize, j: usize| t.s(i - 1, j - 1).as_f64();
        let (d1, _) = coeff_d_split(&q.parts).unwrap();
        let grouped = 12.0 * (2.0 * s(1, 2) + s(1, 4) + s(2, 3) + 2.0 * s(2, 4));
        assert!(rel(d1.as_f64(), grouped) < 1e-14);
    }

    #[test]
    fn d_triple_half_tends_to_minus_36() {
        let mut last = f64::INFINITY;
        for th in [1e-2, 1e-3, 1e-4, 1e-5] {
            let q = QuadrupleConfig::<Dd>::build(0.0, Dd::lit(th)).unwrap();
            let (_, d2) = coeff_d_split(&q.parts).unwrap();
            let err = (d2.as_f64() + 36.0).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn leading_behaviour_at_small_angle() {
        let q = QuadrupleConfig::<Dd>::from_half_sine(0.0, Dd::lit(1e-5)).unwrap();
        let s3 = 1e-15;
        let c = coeff_c(&q).unwrap().as_f64() * s3;
        let d = coeff_d(&q).unwrap().as_f64() * s3;
        assert!((c + 2.0).abs() < 1e-3);
        assert!((d - 1.5).abs() < 1e-3);
    }

    #[test]
    fn q3_three_wave_branches() {
        let q = build_quadruple(0.2, 0.3).unwrap();
        let tri = [q.parts[0], q.parts[1], q.parts[3]];
        assert!((coeff_q3(&tri, 0.0, 0.7).unwrap() + 6.0 * 0.7).abs() < 1e-14);
        // brute force with β₂ = 1, β₃ = 0
        let mut sum = 0.0;
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            let _ = i;
            sum += 2.0 * pair_ratio(&tri[j], &tri[k]).unwrap();
        }
        assert!(rel(coeff_q3(&tri, 1.0, 0.0).unwrap(), sum) < 1e-14);
    }

    #[test]
    fn part_sums_special_profiles() {
        let q = build_quadruple(0.0, 0.2).unwrap();
        let c = coeff_c(&q).unwrap();
        let v = coeff_parts(&q, &NonlinearityProfile::lower(1.0, 0.0, 0.0)).unwrap();
        assert!(rel(v, -c) < 1e-12);
        let v = coeff_parts(&q, &NonlinearityProfile::lower(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(v, -24.0);
        let v = coeff_parts(&q, &NonlinearityProfile::lower(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn interaction_coeffs_report() {
        let q = build_quadruple(0.0, 0.2).unwrap();
        let ic = interaction_coeffs(&q, &NonlinearityProfile::lower(0.3, -1.2, 2.5)).unwrap();
        assert!(ic.c.is_finite() && ic.d.is_finite());
        let json = serde_json::to_value(&ic).unwrap();
        assert!(json.get("C").is_some() && json.get("D").is_some());
    }

    proptest! {
        #[test]
        fn c_d_invariant_under_permutation_and_scaling(th in 1e-3f64..0.5, phi in 0.0f64..std::f64::consts::TAU,
                                                       pick in 0usize..24, lam in 0.1f64..10.0) {
            let q = QuadrupleConfig::<Dd>::build(phi, Dd::lit(th)).unwrap();
            let perm: Vec<Vec<usize>> = (0..4usize).permutations(4).collect();
            let p = &perm[pick];
            let shuffled = [q.parts[p[0]], q.parts[p[1]], q.parts[p[2]], q.parts[p[3]]];
            let scaled = q.parts.map(|w| w * Dd::lit(lam));
            let c = coeff_c_of(&q.parts).unwrap().as_f64();
            let d = coeff_d_of(&q.parts).unwrap().as_f64();
            prop_assert!(rel(coeff_c_of(&shuffled).unwrap().as_f64(), c) < 1e-10);
            prop_assert!(rel(coeff_d_of(&shuffled).unwrap().as_f64(), d) < 1e-10);
            prop_assert!(rel(coeff_c_of(&scaled).unwrap().as_f64(), c) < 1e-10);
            prop_assert!(rel(coeff_d_of(&scaled).unwrap().as_f64(), d) < 1e-10);
        }

        #[test]
        fn parts_equal_regrouped_coefficients(th in 1e-3f64..0.5, phi in 0.0f64..std::f64::consts::TAU,
                                              b2 in -2.0f64..2.0, b3 in -2.0f64..2.0, b4 in -2.0f64..2.0) {
            let q = QuadrupleConfig::<Dd>::build(phi, Dd::lit(th)).unwrap();
            let beta = NonlinearityProfile::lower(b2, b3, b4);
            let direct = coeff_parts(&q, &beta).unwrap();
            let (c, d) = (coeff_c(&q).unwrap(), coeff_d(&q).unwrap());
            let e = Dd::lit;
            let regrouped = -c * e(b2 * b2 * b2) + d * e(b2) * e(b3) - e(24.0 * b4);
            let scale = (c * e(b2 * b2 * b2)).abs() + (d * e(b2 * b3)).abs() + e(24.0 * b4.abs());
            prop_assert!(((direct - regrouped).abs() / scale).as_f64() < 1e-10);
        }

        #[test]
        fn q3_scale_invariant(th in 1e-3f64..0.5, lam in 0.1f64..10.0, b2 in -2.0f64..2.0, b3 in -2.0f64..2.0) {
            let q = QuadrupleConfig::<Dd>::build(0.0, Dd::lit(th)).unwrap();
            let tri = [q.parts[0], q.parts[1], q.parts[2]];
            let (b2, b3) = (Dd::lit(b2), Dd::lit(b3));
            let a = coeff_q3(&tri, b2, b3).unwrap().as_f64();
            let b = coeff_q3(&tri.map(|w| w * Dd::lit(lam)), b2, b3).unwrap().as_f64();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
