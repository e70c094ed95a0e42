//! Class support vectors and the argmax decision rule.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SupportError {
    #[error("support vector needs at least 2 components, got {0}")]
    TooFewClasses(usize),
    #[error("component {index} = {value} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("components sum to {0}, expected 1 within 1e-9")]
    BadSum(f64),
}

/// Discrete distribution over class indices: components in [0, 1], summing
/// to 1 within 1e-9 at construction and exactly 1 after renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector(Vec<f64>);

impl SupportVector {
    pub fn new(values: Vec<f64>) -> Result<Self, SupportError> {
        if values.len() < 2 {
            return Err(SupportError::TooFewClasses(values.len()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(SupportError::OutOfRange { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SupportError::BadSum(sum));
        }
        Ok(Self(values))
    }

    /// Normalizes a vector of non-negative masses to an exact unit sum.
    ///
    /// The largest component absorbs the rounding residual so that
    /// `values().iter().sum::<f64>() == 1.0` holds bit-exactly.
    pub fn from_masses(mut masses: Vec<f64>) -> Result<Self, SupportError> {
        if masses.len() < 2 {
            return Err(SupportError::TooFewClasses(masses.len()));
        }
        let sum: f64 = masses.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(SupportError::BadSum(sum));
        }
        for m in masses.iter_mut() {
            if !m.is_finite() || *m < 0.0 {
                return Err(SupportError::OutOfRange {
                    index: 0,
                    value: *m,
                });
            }
            *m /= sum;
        }
        let argmax = decide_slice(&masses);
        let resid: f64 = 1.0 - masses.iter().sum::<f64>();
        masses[argmax] += resid;
        Ok(Self(masses))
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Argmax with ties resolved to the lowest class index.
#[inline]
pub fn decide(support: &SupportVector) -> usize {
    decide_slice(support.values())
}

/// Argmax over a raw slice, lowest index wins ties.
#[inline]
pub fn decide_slice(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
