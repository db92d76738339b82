//! Finite-alphabet probability kernel.
//!
//! Everything here is measured in bits. Probabilities below [`ZERO_CUTOFF`]
//! are treated as exact zeros inside entropy sums, so `0 log 0 = 0` holds
//! without producing `-inf`.

mod channel;
mod identity;
mod joint;

pub(crate) use channel::mi_raw;
pub use channel::{
    cascade, make_bec, make_bsc, make_deterministic, mutual_information, product_wbc, product_wbc_with_cap, Dmc,
    Receiver, WiretapBc, BEC_ERASURE, PRODUCT_ALPHABET_CAP,
};
pub use identity::{ck_identity_check, IDENTITY_MAX_N};
pub(crate) use joint::advance;
pub use joint::{Axis, JointPmf, TABLE_CAP};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance on the total mass of a probability vector.
pub const SUM_TOL: f64 = 1e-9;

/// Entries below this are treated as zero inside entropy sums.
pub const ZERO_CUTOFF: f64 = 1e-15;

const DOMAIN_SLACK: f64 = 1e-12;

/// `-p log2 p`, with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p < ZERO_CUTOFF {
        0.0
    } else {
        -p * p.log2()
    }
}

fn check_unit(what: &'static str, x: f64) -> Result<f64> {
    if !x.is_finite() || x < -DOMAIN_SLACK || x > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain { what, value: x });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Binary entropy `h2(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = check_unit("binary_entropy", x)?;
    Ok(h2(x))
}

/// Unchecked binary entropy for callers that already hold a probability.
#[inline]
pub fn h2(x: f64) -> f64 {
    plogp(x) + plogp(1.0 - x)
}

/// Binary convolution `x * y = x(1-y) + (1-x)y`, the crossover of two cascaded BSCs.
pub fn bconv(x: f64, y: f64) -> Result<f64> {
    let x = check_unit("bconv", x)?;
    let y = check_unit("bconv", y)?;
    Ok(star(x, y))
}

#[inline]
pub fn star(x: f64, y: f64) -> f64 {
    x * (1.0 - y) + (1.0 - x) * y
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates strictly: negative entries or a total mass off by more than
    /// [`SUM_TOL`] are rejected, never renormalized.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs)?;
        Ok(Self { probs })
    }

    /// Rescales nonnegative weights to unit mass. Intended for ingestion.
    pub fn normalize(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPmf("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidPmf(format!("weight {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidPmf("weights sum to zero".into()));
        }
        Ok(Self { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        Ok(Self { probs: vec![1.0 / size as f64; size] })
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::InvalidPmf(format!("symbol {at} outside alphabet of size {size}")));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        let p = check_unit("bernoulli", p)?;
        Ok(Self { probs: vec![1.0 - p, p] })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&p| plogp(p)).sum()
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Pmf::new(probs)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

pub(crate) fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidPmf("empty probability vector".into()));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidPmf(format!("entry {i} = {p} is negative or not finite")));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidPmf(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Shannon entropy of a validated pmf, in bits.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.25 log2 0.25 - 0.75 log2 0.75
        let oracle = 0.25 * 2.0 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((binary_entropy(0.25).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_domain() {
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
        // within slack gets clamped
        assert_eq!(binary_entropy(-1e-13).unwrap(), 0.0);
    }

    #[test]
    fn bconv_values() {
        for y in [0.0, 0.1, 0.37, 1.0] {
            assert!((bconv(0.5, y).unwrap() - 0.5).abs() < 1e-15);
            assert!((bconv(0.0, y).unwrap() - y).abs() < 1e-15);
        }
        assert!((bconv(0.1, 0.2).unwrap() - 0.26).abs() < 1e-15);
        assert!(bconv(1.2, 0.1).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&Pmf::uniform(4).unwrap()), 2.0);
        assert_eq!(entropy(&Pmf::point_mass(3, 1).unwrap()), 0.0);
        let p = Pmf::new(vec![0.25, 0.75]).unwrap();
        assert!((entropy(&p) - binary_entropy(0.25).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn pmf_validation_is_strict() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![0.5, 0.5 + 5e-10]).is_ok());
        let p = Pmf::normalize(&[1.0, 3.0]).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        assert!(Pmf::normalize(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn pmf_try_from_validates() {
        assert!(Pmf::try_from(vec![0.5, 0.5]).is_ok());
        assert!(Pmf::try_from(vec![0.5, 0.4]).is_err());
    }
}
