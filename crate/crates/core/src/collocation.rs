//! Collocation of the conditional stationary CDF equation
//!
//! ```text
//! y'' + (1/D) dV/dx_n y' = 0,   y(lower) = 0,   y(upper) = 1
//! ```
//!
//! at the `L - 1` interior points `lower + k h`, `h = (upper - lower) / L`,
//! closed by the upper boundary row.

use std::f64::consts::PI;

use crate::config::SfpConfig;
use crate::cost::CostModel;
use crate::error::{Result, SfpError};
use crate::expansion::{frequency, CdfExpansion};
use crate::linalg::{solve_dense, DenseMatrix};
use crate::space::SearchSpace;

/// Basis values at the collocation nodes.
///
/// `sin((2l - 1) k pi / (2L))` does not depend on the interval, so one table
/// serves every coordinate sharing the same `L`.
#[derive(Debug, Clone)]
pub struct CollocationBasis {
    size: usize,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl CollocationBasis {
    pub fn new(size: usize) -> Self {
        assert!(size >= 2, "basis size must be at least 2");
        let mut sin = Vec::with_capacity((size - 1) * size);
        let mut cos = Vec::with_capacity((size - 1) * size);
        for k in 1..size {
            for l in 1..=size {
                let arg = ((2 * l - 1) * k) as f64 * PI / (2 * size) as f64;
                let (s, c) = arg.sin_cos();
                sin.push(s);
                cos.push(c);
            }
        }
        Self { size, sin, cos }
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Assembled collocation system for one coordinate.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Interior collocation nodes.
    pub nodes: Vec<f64>,
    /// `dV/dx_n` at each node.
    pub gradients: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl CollocationSystem {
    /// Largest absolute row sum over the matrix.
    pub fn max_row_magnitude(&self) -> f64 {
        (0..self.matrix.size())
            .map(|i| self.matrix.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Assembles the system for coordinate `n` with all other coordinates held at `x`.
pub fn build_collocation_system<C: CostModel + ?Sized>(
    cost: &C,
    x: &[f64],
    n: usize,
    config: &SfpConfig,
    space: &SearchSpace,
) -> Result<CollocationSystem> {
    build_with_basis(
        cost,
        x,
        n,
        config.diffusion,
        space,
        &CollocationBasis::new(config.basis_size),
    )
}

pub(crate) fn build_with_basis<C: CostModel + ?Sized>(
    cost: &C,
    x: &[f64],
    n: usize,
    diffusion: f64,
    space: &SearchSpace,
    basis: &CollocationBasis,
) -> Result<CollocationSystem> {
    if x.len() != space.dims() {
        return Err(SfpError::DimensionMismatch {
            expected: space.dims(),
            got: x.len(),
        });
    }
    let size = basis.size;
    let (lower, upper) = space.bounds(n);
    let width = upper - lower;
    let h = width / size as f64;
    let freqs: Vec<f64> = (1..=size).map(|l| frequency(l, width)).collect();

    let mut probe = x.to_vec();
    let mut matrix = DenseMatrix::zeros(size);
    let mut nodes = Vec::with_capacity(size - 1);
    let mut gradients = Vec::with_capacity(size - 1);
    for k in 1..size {
        let node = lower + k as f64 * h;
        probe[n] = node;
        let g = cost.partial(&probe, n);
        if !g.is_finite() {
            return Err(SfpError::SingularCost {
                coordinate: n,
                x: node,
            });
        }
        let drift = g / diffusion;
        let offset = (k - 1) * size;
        let row = matrix.row_mut(k - 1);
        for (l, w) in freqs.iter().enumerate() {
            row[l] = -w * w * basis.sin[offset + l] + drift * w * basis.cos[offset + l];
        }
        nodes.push(node);
        gradients.push(g);
    }
    for (l, v) in matrix.row_mut(size - 1).iter_mut().enumerate() {
        *v = if l % 2 == 0 { 1.0 } else { -1.0 };
    }
    let mut rhs = vec![0.0; size];
    rhs[size - 1] = 1.0;

    Ok(CollocationSystem {
        matrix,
        rhs,
        nodes,
        gradients,
        lower,
        upper,
    })
}

impl CollocationSystem {
    pub fn solve(&self) -> Result<CdfExpansion> {
        let coeffs = solve_dense(&self.matrix, &self.rhs)?;
        Ok(CdfExpansion::new(coeffs, self.lower, self.upper))
    }

    /// `y'' + (1/D) V' y'` of `expansion` at each interior node.
    pub fn ode_residuals(&self, expansion: &CdfExpansion, diffusion: f64) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.gradients)
            .map(|(&x, &g)| {
                let j = expansion.jet(x);
                j.curvature + g / diffusion * j.slope
            })
            .collect()
    }
}

/// Solves for the conditional CDF of coordinate `n` given the rest of `x`.
pub fn solve_conditional_cdf<C: CostModel + ?Sized>(
    cost: &C,
    x: &[f64],
    n: usize,
    config: &SfpConfig,
    space: &SearchSpace,
) -> Result<CdfExpansion> {
    build_collocation_system(cost, x, n, config, space)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::FnCost;

    fn flat(dim: usize) -> impl CostModel {
        FnCost::new(dim, |_| 0.0, |_, _| 0.0)
    }

    #[test]
    fn flat_cost_rows_are_pure_curvature() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let config = SfpConfig::new(1.0, 4, 1, 0);
        let sys = build_collocation_system(&flat(1), &[0.5], 0, &config, &space).unwrap();
        for k in 1..4 {
            let x = k as f64 / 4.0;
            for l in 1..=4 {
                let w = frequency(l, 1.0);
                let expected = -w * w * (w * x).sin();
                assert!((sys.matrix[(k - 1, l - 1)] - expected).abs() < 1e-12);
            }
        }
        assert_eq!(sys.rhs, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_term_system_on_unit_interval() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let config = SfpConfig::new(1.0, 2, 1, 0);
        let sys = build_collocation_system(&flat(1), &[0.2], 0, &config, &space).unwrap();
        let w1 = PI / 2.0;
        let w2 = 3.0 * PI / 2.0;
        assert!((sys.matrix[(0, 0)] + w1 * w1 * (w1 / 2.0).sin()).abs() < 1e-12);
        assert!((sys.matrix[(0, 1)] + w2 * w2 * (w2 / 2.0).sin()).abs() < 1e-12);
        assert_eq!(sys.matrix.row(1), &[1.0, -1.0]);
        assert_eq!(sys.rhs, vec![0.0, 1.0]);
        assert_eq!(sys.nodes, vec![0.5]);
    }

    #[test]
    fn singular_gradient_names_the_node() {
        let cost = FnCost::new(
            1,
            |_| 0.0,
            |x: &[f64], _| if x[0] > 0.7 { f64::INFINITY } else { 0.0 },
        );
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let config = SfpConfig::new(1.0, 5, 1, 0);
        match build_collocation_system(&cost, &[0.1], 0, &config, &space) {
            Err(SfpError::SingularCost { coordinate: 0, x }) => assert!((x - 0.8).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flat_cost_gives_linear_cdf() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let config = SfpConfig::new(1.0, 10, 1, 0);
        let exp = solve_conditional_cdf(&flat(1), &[0.3], 0, &config, &space).unwrap();
        // the basis forces zero slope at the upper bound, so the error is
        // concentrated in a boundary layer of width ~h there
        let dev = |x: f64| (exp.cdf(x).unwrap() - x).abs();
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let interior = grid
            .iter()
            .filter(|&&x| x <= 0.85)
            .map(|&x| dev(x))
            .fold(0.0, f64::max);
        let worst = grid.iter().map(|&x| dev(x)).fold(0.0, f64::max);
        assert!(interior <= 0.02, "interior deviation {interior}");
        assert!(worst <= 0.03, "max deviation {worst}");
        assert!((exp.cdf(0.5).unwrap() - 0.5).abs() <= 0.02);
        assert_eq!(exp.cdf(0.0).unwrap(), 0.0);
        assert!((exp.cdf(1.0).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn residuals_vanish_at_nodes() {
        let cost = FnCost::new(1, |x: &[f64]| x[0] * x[0] / 2.0, |x: &[f64], _| x[0]);
        let space = SearchSpace::uniform(1, -1.0, 1.0).unwrap();
        let config = SfpConfig::new(1.0, 30, 1, 0);
        let sys = build_collocation_system(&cost, &[0.0], 0, &config, &space).unwrap();
        let exp = sys.solve().unwrap();
        let bound = 1e-6 * (1.0 + sys.max_row_magnitude());
        for r in sys.ode_residuals(&exp, 1.0) {
            assert!(r.abs() <= bound, "residual {r}");
        }
    }
}
