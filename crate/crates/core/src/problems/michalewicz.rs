use std::f64::consts::PI;

use crate::cost::CostModel;
use crate::space::SearchSpace;

/// Two-dimensional Michalewicz function
///
/// ```text
/// V = -sin(x1) sin(x1^2 / pi)^(2m) - sin(x2) sin(2 x2^2 / pi)^(2m)
/// ```
///
/// on `[0, pi]^2`. Separable, so one sweep already yields its marginals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Michalewicz {
    pub m: u32,
}

impl Michalewicz {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1, "steepness m must be positive");
        Self { m }
    }

    pub fn space() -> SearchSpace {
        SearchSpace::uniform(2, 0.0, PI).expect("valid bounds")
    }

    /// `-sin(x) sin(c x^2 / pi)^(2m)` with `c = n + 1`.
    pub fn term(&self, n: usize, x: f64) -> f64 {
        let c = (n + 1) as f64;
        -x.sin() * (c * x * x / PI).sin().powi(2 * self.m as i32)
    }

    pub fn term_derivative(&self, n: usize, x: f64) -> f64 {
        let c = (n + 1) as f64;
        let arg = c * x * x / PI;
        let s = arg.sin();
        let p = 2 * self.m as i32;
        let inner = p as f64 * s.powi(p - 1) * arg.cos() * 2.0 * c * x / PI;
        -(x.cos() * s.powi(p) + x.sin() * inner)
    }
}

impl CostModel for Michalewicz {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.term(0, x[0]) + self.term(1, x[1])
    }
    fn partial(&self, x: &[f64], n: usize) -> f64 {
        self.term_derivative(n, x[n])
    }
}

pub fn michalewicz_value(x1: f64, x2: f64, m: u32) -> f64 {
    Michalewicz::new(m).value(&[x1, x2])
}

pub fn michalewicz_partial(x: &[f64], n: usize, m: u32) -> f64 {
    Michalewicz::new(m).partial(x, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::central_difference;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn origin_is_zero() {
        for m in [1, 3, 10] {
            assert_eq!(michalewicz_value(0.0, 0.0, m), 0.0);
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = Michalewicz::new(10);
        let step = 1e-6 * PI;
        for _ in 0..20 {
            let x = [
                rng.random_range(0.05..PI - 0.05),
                rng.random_range(0.05..PI - 0.05),
            ];
            for n in 0..2 {
                let fd = central_difference(&f, &x, n, step);
                let an = f.partial(&x, n);
                assert!(
                    (fd - an).abs() <= 1e-5 * an.abs().max(1e-2),
                    "n={n} x={x:?}: {an} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn grid_minimum_sits_near_2_2_and_1_57() {
        // brute force over a 2000 x 2000 grid; the function is separable so
        // the 2-D minimum is the sum of the 1-D minima
        let f = Michalewicz::new(10);
        let grid: Vec<f64> = (0..2000).map(|i| PI * i as f64 / 1999.0).collect();
        let best = |n: usize| {
            grid.iter()
                .map(|&x| (f.term(n, x), x))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap()
        };
        let (v1, x1) = best(0);
        let (v2, x2) = best(1);
        assert!((v1 + v2 + 1.8013).abs() < 1e-3, "min {}", v1 + v2);
        assert!((x1 - 2.2).abs() < 0.01, "x1 {x1}");
        assert!((x2 - 1.57).abs() < 0.01, "x2 {x2}");
    }
}
