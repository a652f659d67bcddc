//! Coefficients of the power-series nonlinearity `F(p) = Σ_m β_m ∂_t²(p^m)`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("nonlinearity orders start at 2, got {0}")]
    BadOrder(u32),
    #[error("coefficient of order {0} is not finite")]
    NonFinite(u32),
}

/// `β_m` for `m ≥ 2`; missing orders are zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<u32, f64>", into = "BTreeMap<u32, f64>")]
pub struct NonlinearityProfile {
    betas: BTreeMap<u32, f64>,
}

impl NonlinearityProfile {
    pub fn new(betas: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, ProfileError> {
        let mut map = BTreeMap::new();
        for (m, b) in betas {
            if m < 2 {
                return Err(ProfileError::BadOrder(m));
            }
            if !b.is_finite() {
                return Err(ProfileError::NonFinite(m));
            }
            map.insert(m, b);
        }
        Ok(NonlinearityProfile { betas: map })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `(β₂, β₃, β₄)`.
    pub fn lower(b2: f64, b3: f64, b4: f64) -> Self {
        Self::new([(2, b2), (3, b3), (4, b4)]).expect("finite lower-order coefficients")
    }

    /// A single term `β_m`.
    pub fn single(m: u32, b: f64) -> Result<Self, ProfileError> {
        Self::new([(m, b)])
    }

    pub fn beta(&self, m: u32) -> f64 {
        self.betas.get(&m).copied().unwrap_or(0.0)
    }

    /// Largest declared order (the truncation `M`), or 1 for an empty profile.
    pub fn truncation(&self) -> u32 {
        self.betas.keys().next_back().copied().unwrap_or(1)
    }

    pub fn is_zero(&self) -> bool {
        self.betas.values().all(|&b| b == 0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.betas.iter().map(|(&m, &b)| (m, b))
    }

    /// Copy with only the order-`m` coefficient kept.
    pub fn only(&self, m: u32) -> Self {
        NonlinearityProfile { betas: self.betas.iter().filter(|(&k, _)| k == m).map(|(&k, &b)| (k, b)).collect() }
    }
}

impl TryFrom<BTreeMap<u32, f64>> for NonlinearityProfile {
    type Error = ProfileError;
    fn try_from(m: BTreeMap<u32, f64>) -> Result<Self, Self::Error> {
        Self::new(m)
    }
}

impl From<NonlinearityProfile> for BTreeMap<u32, f64> {
    fn from(p: NonlinearityProfile) -> Self {
        p.betas
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_truncation() {
        let p = NonlinearityProfile::lower(0.3, 0.0, -1.0);
        assert_eq!(p.beta(2), 0.3);
        assert_eq!(p.beta(7), 0.0);
        assert_eq!(p.truncation(), 4);
        assert!(!p.is_zero());
        assert!(NonlinearityProfile::zero().is_zero());
        assert_eq!(p.only(4).beta(2), 0.0);
        assert_eq!(p.only(4).beta(4), -1.0);
    }

    #[test]
    fn order_one_rejected() {
        assert_eq!(NonlinearityProfile::new([(1, 1.0)]), Err(ProfileError::BadOrder(1)));
        assert!(serde_json::from_str::<NonlinearityProfile>(r#"{"1": 2.0}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = NonlinearityProfile::new([(2, 0.5), (5, 0.7)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"2":0.5,"5":0.7}"#);
        assert_eq!(serde_json::from_str::<NonlinearityProfile>(&s).unwrap(), p);
    }
}
