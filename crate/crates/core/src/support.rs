//! Domain types shared across the crate: weight functions on a finite
//! support and probability vectors paired with them.

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// A weight function `f` on the categories `{0, ..., m}` with pinned
/// endpoints `f(0) = 0` and `f(m) = b` for some `b > 0`. All values lie
/// in `[0, b]`; interior values need not be sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSupport {
    values: Vec<f64>,
    b: f64,
}

impl WeightedSupport {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(
                "support needs at least two points (m >= 1)".into(),
            ));
        }
        let b = *values.last().unwrap();
        if values[0] != 0.0 {
            return Err(Error::InvalidInput(format!(
                "f(0) must be 0, got {}",
                values[0]
            )));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "f(m) must be a positive finite upper bound, got {b}"
            )));
        }
        for (j, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 || v > b {
                return Err(Error::InvalidInput(format!(
                    "f({j}) = {v} outside [0, {b}]"
                )));
            }
        }
        Ok(Self { values, b })
    }

    /// The uniform reward grid `{0, 1/m, ..., 1}`.
    pub fn unit_grid(m: usize) -> Self {
        assert!(m >= 1);
        let values = (0..=m).map(|i| i as f64 / m as f64).collect();
        Self { values, b: 1.0 }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Upper endpoint `b = f(m)`.
    pub fn upper_bound(&self) -> f64 {
        self.b
    }

    /// Number of categories, `m + 1`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the top category, `m`.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    /// The complemented support `g(i) = b - f(m - i)`, which again has
    /// `g(0) = 0` and `g(m) = b`.
    pub fn complement(&self) -> Self {
        let b = self.b;
        let values = self.values.iter().rev().map(|&v| b - v).collect();
        Self { values, b }
    }
}

/// A probability vector on `{0, ..., m}`, paired with a [`WeightedSupport`]
/// of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    probs: Vec<f64>,
}

impl FiniteDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        let mut sum = 0.0;
        for (j, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "probability p({j}) = {p} is not a nonnegative finite number"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, expected 1 within {SUM_TOL}"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes an arbitrary nonnegative vector.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidInput(
                "weights must have positive total mass".into(),
            ));
        }
        for (j, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight {j} = {w} is not a nonnegative finite number"
                )));
            }
        }
        Ok(Self {
            probs: weights.iter().map(|&w| w / sum).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The mean `p·f`.
    pub fn mean(&self, f: &WeightedSupport) -> f64 {
        self.probs.iter().zip(f.values()).map(|(p, v)| p * v).sum()
    }

    /// Probabilities listed in reverse category order.
    pub fn reversed(&self) -> Self {
        Self {
            probs: self.probs.iter().rev().copied().collect(),
        }
    }

    /// True when positive mass sits on at least two distinct `f` values.
    pub fn spans_two_values(&self, f: &WeightedSupport) -> bool {
        let mut first: Option<f64> = None;
        for (p, &v) in self.probs.iter().zip(f.values()) {
            if *p > 0.0 {
                match first {
                    None => first = Some(v),
                    Some(v0) if v0 != v => return true,
                    _ => {}
                }
            }
        }
        false
    }
}

/// Checks that a distribution and a support describe the same categories.
pub(crate) fn check_paired(p: &FiniteDist, f: &WeightedSupport) -> Result<()> {
    if p.len() != f.len() {
        return Err(Error::InvalidInput(format!(
            "distribution has {} categories but support has {}",
            p.len(),
            f.len()
        )));
    }
    Ok(())
}
