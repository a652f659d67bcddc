//! Synthetic symbol measurements and recovery of `β₂ … β_N`.

use super::coeffs::{coeff_c, coeff_d, coeff_q3};
use crate::lightcone::{Covector4, LightconeError, QuadrupleConfig};
use crate::profile::NonlinearityProfile;
use crate::real::Real;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecoveryError {
    #[error(transparent)]
    Lightcone(#[from] LightconeError),
    #[error("recovery system singular: |det| = {det:e} below floor {floor:e}")]
    SingularSystem { det: f64, floor: f64 },
    #[error("beta2 vanishes; a three-wave measurement is needed for beta3")]
    NeedThreeWave,
    #[error("order {0} must be at least 5 (lower orders come from the 3x3 system)")]
    BadOrder(u32),
    #[error("measurement pattern {got:?} does not match expected {want:?}")]
    PatternMismatch { got: Vec<u32>, want: Vec<u32> },
    #[error("measurement for {measured} paired with configuration {config}")]
    ConfigMismatch { measured: String, config: String },
}

/// A normalized principal-symbol amplitude.
///
/// All non-β prefactors (parametrix and source symbols, `2π` powers, `ζ₀²`,
/// the boundary trace factor) are set to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement<T = f64> {
    pub value: T,
    pub order_pattern: Vec<u32>,
    pub config_id: String,
}

impl<T: Real> Measurement<T> {
    pub fn to_f64(&self) -> Measurement<f64> {
        Measurement { value: self.value.as_f64(), order_pattern: self.order_pattern.clone(), config_id: self.config_id.clone() }
    }
}

impl Serialize for Measurement<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Measurement", 3)?;
        st.serialize_field("config_id", &self.config_id)?;
        st.serialize_field("order_pattern", &self.order_pattern)?;
        st.serialize_field("value", &self.value)?;
        st.end()
    }
}

/// Four-wave measurement `−C β₂³ + D β₂β₃ − β₄`.
pub fn measurement_oracle<T: Real>(beta: &NonlinearityProfile, q: &QuadrupleConfig<T>) -> Result<Measurement<T>, LightconeError> {
    let (b2, b3, b4) = (T::lit(beta.beta(2)), T::lit(beta.beta(3)), T::lit(beta.beta(4)));
    let value = -coeff_c(q)? * b2 * b2 * b2 + coeff_d(q)? * b2 * b3 - b4;
    Ok(Measurement { value, order_pattern: vec![1, 1, 1, 1], config_id: q.id() })
}

/// Three-wave measurement together with the covectors it was taken at.
#[derive(Debug, Clone)]
pub struct ThreeWave<T = f64> {
    pub measurement: Measurement<T>,
    pub triple: [Covector4<T>; 3],
}

/// Three-wave measurement `Σ (2 S_jk β₂² − β₃)`.
pub fn three_wave_oracle<T: Real>(beta: &NonlinearityProfile, triple: &[Covector4<T>; 3]) -> Result<ThreeWave<T>, LightconeError> {
    let value = coeff_q3(triple, T::lit(beta.beta(2)), T::lit(beta.beta(3)))?;
    Ok(ThreeWave { measurement: Measurement { value, order_pattern: vec![1, 1, 1], config_id: "three-wave".into() }, triple: *triple })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Beta3Source {
    FourWaveSystem,
    ThreeWave,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerRecovery {
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub beta3_source: Beta3Source,
    /// Frobenius condition number `‖A‖ ‖A⁻¹‖` of the 3×3 system.
    pub condition: f64,
    pub det: f64,
    /// `|det| / Π ‖row‖`
    pub normalized_det: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RecoveryOptions {
    /// Reject when `|det| < floor · Π ‖row‖`.
    pub det_floor: f64,
    /// Below this `|β₂|` the three-wave path supplies `β₃`.
    pub beta2_threshold: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions { det_floor: 1e-12, beta2_threshold: 1e-6 }
    }
}

pub fn recover_lower<T: Real>(
    measurements: &[Measurement<T>; 3],
    configs: &[QuadrupleConfig<T>; 3],
    three_wave: Option<&ThreeWave<T>>,
) -> Result<LowerRecovery, RecoveryError> {
    recover_lower_with(measurements, configs, three_wave, RecoveryOptions::default())
}

/// Solve `(−C_j, D_j, −1) · (β₂³, β₂β₃, β₄) = m_j` and unpack.
pub fn recover_lower_with<T: Real>(
    measurements: &[Measurement<T>; 3],
    configs: &[QuadrupleConfig<T>; 3],
    three_wave: Option<&ThreeWave<T>>,
    opts: RecoveryOptions,
) -> Result<LowerRecovery, RecoveryError> {
    for (m, q) in measurements.iter().zip(configs) {
        if m.order_pattern != [1, 1, 1, 1] {
            return Err(RecoveryError::PatternMismatch { got: m.order_pattern.clone(), want: vec![1, 1, 1, 1] });
        }
        if m.config_id != q.id() {
            return Err(RecoveryError::ConfigMismatch { measured: m.config_id.clone(), config: q.id() });
        }
    }
    let mut a = [[T::zero(); 3]; 3];
    for (row, q) in a.iter_mut().zip(configs) {
        *row = [-coeff_c(q)?, coeff_d(q)?, -T::one()];
    }
    let rhs = [measurements[0].value, measurements[1].value, measurements[2].value];

    let det = crate::lightcone::det3(&a);
    let row_prod = a.iter().map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()).fold(T::one(), |acc, n| acc * n);
    let normalized = (det.abs() / row_prod).as_f64();
    if !(normalized >= opts.det_floor) {
        return Err(RecoveryError::SingularSystem { det: det.as_f64(), floor: (T::lit(opts.det_floor) * row_prod).as_f64() });
    }
    let x = solve3(a, rhs);
    let condition = frobenius_condition(&a, det);

    let beta2 = real_cbrt(x[0]);
    let (beta3, source) = if beta2.abs().as_f64() > opts.beta2_threshold {
        (x[1] / beta2, Beta3Source::FourWaveSystem)
    } else {
        let tw = three_wave.ok_or(RecoveryError::NeedThreeWave)?;
        // value = Σ 2 S_jk β₂² − 6 β₃
        let with_b3_zero = coeff_q3(&tw.triple, beta2, T::zero())?;
        ((with_b3_zero - tw.measurement.value) / T::lit(6.0), Beta3Source::ThreeWave)
    };
    Ok(LowerRecovery {
        beta2: beta2.as_f64(),
        beta3: beta3.as_f64(),
        beta4: x[2].as_f64(),
        beta3_source: source,
        condition,
        det: det.as_f64(),
        normalized_det: normalized,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> [T; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal)).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

fn frobenius_condition<T: Real>(a: &[[T; 3]; 3], det: T) -> f64 {
    // inverse through the adjugate
    let mut inv_sq = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            let cof = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
            let v = cof / det;
            inv_sq = inv_sq + v * v;
        }
    }
    let a_sq = a.iter().flatten().fold(T::zero(), |acc, &x| acc + x * x);
    (a_sq.sqrt() * inv_sq.sqrt()).as_f64()
}

/// Real cube root, refined by one Newton step in the working precision.
fn real_cbrt<T: Real>(x: T) -> T {
    if x == T::zero() {
        return x;
    }
    let y = T::lit(x.as_f64().cbrt());
    y - (y * y * y - x) / (T::lit(3.0) * y * y)
}

/// `N(N−1)(N−2)`, the combinatorial weight of the leading `β_N` block.
pub fn higher_order_factor(n: u32) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0)
}

fn higher_pattern(n: u32) -> Vec<u32> {
    vec![n - 3, 1, 1, 1]
}

/// Forward measurement of the leading `β_N` block, `N(N−1)(N−2) β_N`.
pub fn higher_measurement(n: u32, beta_n: f64, config_id: &str) -> Result<Measurement, RecoveryError> {
    if n < 5 {
        return Err(RecoveryError::BadOrder(n));
    }
    Ok(Measurement { value: higher_order_factor(n) * beta_n, order_pattern: higher_pattern(n), config_id: config_id.to_string() })
}

/// `β_N` from a measurement whose lower-order contributions were removed.
pub fn recover_higher(n: u32, measurement: &Measurement) -> Result<f64, RecoveryError> {
    if n < 5 {
        return Err(RecoveryError::BadOrder(n));
    }
    let want = higher_pattern(n);
    if measurement.order_pattern != want {
        return Err(RecoveryError::PatternMismatch { got: measurement.order_pattern.clone(), want });
    }
    Ok(measurement.value / higher_order_factor(n))
}
