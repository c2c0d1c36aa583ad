use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};
use crate::expansion::CdfExpansion;
use crate::space::SearchSpace;

/// Running mean of the expansion coefficients solved for each coordinate.
///
/// The averaged expansion estimates the marginal CDF of that coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalAccumulator {
    lower: Vec<f64>,
    upper: Vec<f64>,
    mean_coeffs: Vec<Vec<f64>>,
    update_count: Vec<usize>,
}

impl MarginalAccumulator {
    pub fn new(space: &SearchSpace, basis_size: usize) -> Self {
        let dims = space.dims();
        Self {
            lower: space.lower().to_vec(),
            upper: space.upper().to_vec(),
            mean_coeffs: vec![vec![0.0; basis_size]; dims],
            update_count: vec![0; dims],
        }
    }

    pub fn dims(&self) -> usize {
        self.mean_coeffs.len()
    }

    pub fn basis_size(&self) -> usize {
        self.mean_coeffs.first().map_or(0, Vec::len)
    }

    pub fn update_count(&self, n: usize) -> usize {
        self.update_count[n]
    }

    pub fn update_counts(&self) -> &[usize] {
        &self.update_count
    }

    pub fn mean_coeffs(&self, n: usize) -> &[f64] {
        &self.mean_coeffs[n]
    }

    pub fn bounds(&self, n: usize) -> (f64, f64) {
        (self.lower[n], self.upper[n])
    }

    /// Folds one solved expansion into the mean for coordinate `n`.
    pub fn add(&mut self, n: usize, coeffs: &[f64]) {
        assert_eq!(coeffs.len(), self.basis_size(), "basis size mismatch");
        self.update_count[n] += 1;
        let k = self.update_count[n] as f64;
        for (m, &a) in self.mean_coeffs[n].iter_mut().zip(coeffs) {
            *m += (a - *m) / k;
        }
    }

    pub fn is_complete(&self) -> bool {
        self.update_count.iter().all(|&c| c > 0)
    }

    /// The averaged expansion for coordinate `n`.
    pub fn marginal(&self, n: usize) -> Result<CdfExpansion> {
        if self.update_count[n] == 0 {
            return Err(SfpError::EmptyAccumulator(n));
        }
        Ok(CdfExpansion::new(
            self.mean_coeffs[n].clone(),
            self.lower[n],
            self.upper[n],
        ))
    }

    /// Marginal argmax along every coordinate.
    pub fn argmax(&self) -> Result<Vec<f64>> {
        (0..self.dims())
            .map(|n| Ok(self.marginal(n)?.argmax_pdf()))
            .collect()
    }

    /// Same accumulator with coordinates permuted: output `i` is input `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            lower: order.iter().map(|&i| self.lower[i]).collect(),
            upper: order.iter().map(|&i| self.upper[i]).collect(),
            mean_coeffs: order.iter().map(|&i| self.mean_coeffs[i].clone()).collect(),
            update_count: order.iter().map(|&i| self.update_count[i]).collect(),
        }
    }
}

/// Closed-form mean and standard deviation of the learned marginal of `n`.
pub fn marginal_moments(acc: &MarginalAccumulator, n: usize) -> Result<(f64, f64)> {
    Ok(acc.marginal(n)?.moments())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_dimension_is_an_error() {
        let acc = MarginalAccumulator::new(&SearchSpace::uniform(2, 0.0, 1.0).unwrap(), 3);
        assert!(matches!(
            marginal_moments(&acc, 1),
            Err(SfpError::EmptyAccumulator(1))
        ));
        assert!(!acc.is_complete());
    }

    proptest! {
        #[test]
        fn mean_is_arithmetic_average(vectors in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 1..20)) {
            let mut acc = MarginalAccumulator::new(&SearchSpace::uniform(1, 0.0, 1.0).unwrap(), 4);
            for v in &vectors {
                acc.add(0, v);
            }
            prop_assert_eq!(acc.update_count(0), vectors.len());
            for l in 0..4 {
                let direct = vectors.iter().map(|v| v[l]).sum::<f64>() / vectors.len() as f64;
                prop_assert!((acc.mean_coeffs(0)[l] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn repeated_vector_mean_is_exact() {
        let mut acc = MarginalAccumulator::new(&SearchSpace::uniform(1, 0.0, 1.0).unwrap(), 3);
        let v = [0.1, -0.7, 1.0 / 3.0];
        for _ in 0..17 {
            acc.add(0, &v);
        }
        assert_eq!(acc.mean_coeffs(0), &v);
    }
}
