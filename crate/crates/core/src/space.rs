use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};

/// Box-shaped search domain `lower[n] <= x[n] <= upper[n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(SfpError::InvalidSpace(
                "at least one dimension required".into(),
            ));
        }
        if lower.len() != upper.len() {
            return Err(SfpError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (n, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(SfpError::InvalidSpace(format!(
                    "dimension {n}: non-finite bound"
                )));
            }
            if lo >= hi {
                return Err(SfpError::InvalidSpace(format!(
                    "dimension {n}: lower bound {lo} not below upper bound {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval repeated over `dims` coordinates.
    pub fn uniform(dims: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dims], vec![upper; dims])
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn bounds(&self, n: usize) -> (f64, f64) {
        (self.lower[n], self.upper[n])
    }

    pub fn width(&self, n: usize) -> f64 {
        self.upper[n] - self.lower[n]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(lo, hi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_and_infinite_bounds() {
        assert!(SearchSpace::new(vec![1.0], vec![1.0]).is_err());
        assert!(SearchSpace::new(vec![0.0, 2.0], vec![1.0, 1.0]).is_err());
        assert!(SearchSpace::new(vec![f64::NEG_INFINITY], vec![1.0]).is_err());
        assert!(SearchSpace::new(vec![], vec![]).is_err());
        assert!(matches!(
            SearchSpace::new(vec![0.0], vec![1.0, 2.0]),
            Err(SfpError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn contains_and_clamp() {
        let s = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        assert!(s.contains(&[0.0, 1.0]));
        assert!(!s.contains(&[0.0, 1.5]));
        let mut x = [3.0, -7.0];
        s.clamp(&mut x);
        assert_eq!(x, [1.0, -1.0]);
    }
}
