//! Convergence measures, two-trajectory comparisons and a quadrature reference
//! for one-dimensional stationary densities.

use serde::{Deserialize, Serialize};

use crate::accumulator::{marginal_moments, MarginalAccumulator};
use crate::config::SfpConfig;
use crate::error::{Result, SfpError};
use crate::sampler::SweepRecord;

/// `(av, s)`: coordinate-averaged marginal mean and standard deviation.
pub fn convergence_measures(acc: &MarginalAccumulator) -> Result<(f64, f64)> {
    let dims = acc.dims();
    let mut av = 0.0;
    let mut s = 0.0;
    for n in 0..dims {
        let (mean, std) = marginal_moments(acc, n)?;
        av += mean;
        s += std;
    }
    Ok((av / dims as f64, s / dims as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub trajectory: usize,
    pub config: SfpConfig,
    pub av: Vec<f64>,
    pub s: Vec<f64>,
}

impl ConvergenceSeries {
    pub fn from_records(trajectory: usize, config: SfpConfig, records: &[SweepRecord]) -> Self {
        Self {
            trajectory,
            config,
            av: records.iter().map(|r| r.av).collect(),
            s: records.iter().map(|r| r.s).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Elementwise `|a - b|`.
pub fn trajectory_distance(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(SfpError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect())
}

/// Least-squares line through `log(distance)` against a transformed abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub dropped_zeros: usize,
}

/// Minimum number of positive points for a log fit.
pub const MIN_FIT_POINTS: usize = 10;

fn log_fit(points: impl Iterator<Item = (f64, f64)>) -> Result<LogFit> {
    let mut dropped_zeros = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (x, d) in points {
        if d > 0.0 {
            xs.push(x);
            ys.push(d.ln());
        } else {
            dropped_zeros += 1;
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(SfpError::InsufficientData(format!(
            "{} positive points, at least {MIN_FIT_POINTS} required",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(LogFit {
        slope,
        intercept: my - slope * mx,
        points: xs.len(),
        dropped_zeros,
    })
}

/// Power-law exponent of `series[i] ~ M^p`, with `M = i + 1` the sweep number,
/// fitted over `i >= tail_start`. Zeros are dropped and counted.
pub fn fit_power_law(series: &[f64], tail_start: usize) -> Result<LogFit> {
    log_fit(
        series
            .iter()
            .enumerate()
            .skip(tail_start)
            .map(|(i, &d)| (((i + 1) as f64).ln(), d)),
    )
}

/// Per-sweep geometric rate `r` of `series ~ r^M` over the first `window` sweeps.
pub fn fit_geometric_rate(series: &[f64], window: usize) -> Result<(f64, LogFit)> {
    let fit = log_fit(
        series
            .iter()
            .take(window)
            .enumerate()
            .map(|(i, &d)| ((i + 1) as f64, d)),
    )?;
    Ok((fit.slope.exp(), fit))
}

/// Running median over a centered window of `2 * half + 1` points.
pub fn windowed_median(series: &[f64], half: usize) -> Vec<f64> {
    (0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(series.len());
            let mut w = series[lo..hi].to_vec();
            w.sort_by(f64::total_cmp);
            let m = w.len() / 2;
            if w.len() % 2 == 1 {
                w[m]
            } else {
                0.5 * (w[m - 1] + w[m])
            }
        })
        .collect()
}

/// Normalized stationary density `exp(-V/D) / Z` tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoltzmannTable {
    pub grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub cdf: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl BoltzmannTable {
    /// Linear interpolation of the CDF table.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let lo = self.grid[0];
        let hi = *self.grid.last().unwrap();
        let last = self.grid.len() - 1;
        let t = ((x - lo) / (hi - lo) * last as f64).clamp(0.0, last as f64);
        let i = (t.floor() as usize).min(last - 1);
        let f = t - i as f64;
        self.cdf[i] * (1.0 - f) + self.cdf[i + 1] * f
    }
}

/// Minimum grid size for [`boltzmann_oracle_1d`].
pub const MIN_ORACLE_POINTS: usize = 1000;

/// Trapezoid quadrature of `exp(-V/D)` on `[lower, upper]` with `points` nodes.
///
/// This is the exact stationary density of a one-dimensional reflecting
/// gradient diffusion and serves as the reference for collocation solutions.
pub fn boltzmann_oracle_1d(
    cost: impl Fn(f64) -> f64,
    diffusion: f64,
    lower: f64,
    upper: f64,
    points: usize,
) -> Result<BoltzmannTable> {
    if points < MIN_ORACLE_POINTS {
        return Err(SfpError::InvalidConfig(format!(
            "oracle needs at least {MIN_ORACLE_POINTS} points, got {points}"
        )));
    }
    if !(diffusion > 0.0) || !(lower < upper) {
        return Err(SfpError::InvalidConfig(
            "oracle needs D > 0 and lower < upper".into(),
        ));
    }
    let h = (upper - lower) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| {
            if i == points - 1 {
                upper
            } else {
                lower + i as f64 * h
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| cost(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(SfpError::SingularCost {
            coordinate: 0,
            x: grid[i],
        });
    }
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = values
        .iter()
        .map(|v| (-(v - vmin) / diffusion).exp())
        .collect();

    let mut cdf = Vec::with_capacity(points);
    cdf.push(0.0);
    for i in 1..points {
        let area = 0.5 * (weights[i - 1] + weights[i]) * (grid[i] - grid[i - 1]);
        cdf.push(cdf[i - 1] + area);
    }
    let z = cdf[points - 1];
    for c in &mut cdf {
        *c /= z;
    }
    let pdf: Vec<f64> = weights.iter().map(|w| w / z).collect();

    let trapezoid = |f: &dyn Fn(usize) -> f64| {
        (1..points)
            .map(|i| 0.5 * (f(i - 1) + f(i)) * (grid[i] - grid[i - 1]))
            .sum::<f64>()
    };
    let mean = trapezoid(&|i| grid[i] * pdf[i]);
    let second = trapezoid(&|i| grid[i] * grid[i] * pdf[i]);
    let std = (second - mean * mean).max(0.0).sqrt();
    Ok(BoltzmannTable {
        grid,
        pdf,
        cdf,
        mean,
        std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SearchSpace;

    #[test]
    fn distance_arithmetic() {
        assert_eq!(
            trajectory_distance(&[1.0, 1.0], &[0.5, 2.0]).unwrap(),
            vec![0.5, 1.0]
        );
        assert_eq!(
            trajectory_distance(&[0.3; 4], &[0.3; 4]).unwrap(),
            vec![0.0; 4]
        );
        assert!(trajectory_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn exact_power_laws_are_recovered() {
        let d: Vec<f64> = (1..=300).map(|m| (m as f64).powf(-0.67)).collect();
        assert!((fit_power_law(&d, 100).unwrap().slope + 0.67).abs() < 1e-9);
        let d: Vec<f64> = (1..=300).map(|m| 3.5 / m as f64).collect();
        assert!((fit_power_law(&d, 100).unwrap().slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn zeros_are_dropped_and_counted() {
        let mut d: Vec<f64> = (1..=40).map(|m| (m as f64).powf(-0.5)).collect();
        d[20] = 0.0;
        d[30] = 0.0;
        let fit = fit_power_law(&d, 10).unwrap();
        assert_eq!(fit.dropped_zeros, 2);
        assert_eq!(fit.points, 28);
        assert!((fit.slope + 0.5).abs() < 1e-9);
    }

    #[test]
    fn short_tail_is_insufficient() {
        let d = vec![1.0; 15];
        assert!(matches!(
            fit_power_law(&d, 6),
            Err(SfpError::InsufficientData(_))
        ));
        assert!(fit_power_law(&d, 5).is_ok());
    }

    #[test]
    fn geometric_rate_of_exact_series() {
        let d: Vec<f64> = (1..=100).map(|m| 0.9f64.powi(m)).collect();
        let (rate, _) = fit_geometric_rate(&d, 100).unwrap();
        assert!((rate - 0.9).abs() < 1e-12);
    }

    #[test]
    fn median_filter() {
        assert_eq!(
            windowed_median(&[5.0, 1.0, 3.0, 9.0, 2.0], 1),
            vec![3.0, 3.0, 3.0, 3.0, 5.5]
        );
    }

    #[test]
    fn flat_oracle_is_uniform() {
        let t = boltzmann_oracle_1d(|_| 4.2, 0.7, -1.0, 3.0, 2001).unwrap();
        assert!((t.mean - 1.0).abs() < 1e-12);
        assert!((t.std - 4.0 / 12f64.sqrt()).abs() < 1e-6);
        assert_eq!(t.cdf[0], 0.0);
        assert!((t.cdf.last().unwrap() - 1.0).abs() < 1e-12);
        assert!((t.cdf_at(0.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn quadratic_oracle_is_symmetric_and_monotone() {
        let t = boltzmann_oracle_1d(|x| x * x / 2.0, 1.0, -1.0, 1.0, 4001).unwrap();
        assert!(t.mean.abs() < 1e-12);
        assert!(t.cdf.windows(2).all(|w| w[0] <= w[1]));
        assert!((t.cdf[2000] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_bad_input() {
        assert!(boltzmann_oracle_1d(|x| x, 1.0, 0.0, 1.0, 999).is_err());
        assert!(matches!(
            boltzmann_oracle_1d(|x| 1.0 / (x - 0.5), 1.0, 0.0, 1.0, 1001),
            Err(SfpError::SingularCost { .. })
        ));
    }

    #[test]
    fn measures_of_single_dimension_are_its_moments() {
        let space = SearchSpace::uniform(1, 0.0, 2.0).unwrap();
        let mut acc = MarginalAccumulator::new(&space, 3);
        acc.add(0, &[0.8, 0.1, -0.1]);
        let (av, s) = convergence_measures(&acc).unwrap();
        assert_eq!((av, s), marginal_moments(&acc, 0).unwrap());
    }

    #[test]
    fn measures_ignore_dimension_order() {
        let space = SearchSpace::new(vec![0.0, -1.0, 2.0], vec![1.0, 1.0, 5.0]).unwrap();
        let mut acc = MarginalAccumulator::new(&space, 3);
        acc.add(0, &[0.8, 0.1, -0.1]);
        acc.add(1, &[1.2, 0.3, 0.1]);
        acc.add(2, &[0.9, -0.2, 0.05]);
        let (av, s) = convergence_measures(&acc).unwrap();
        let (av2, s2) = convergence_measures(&acc.permuted(&[2, 0, 1])).unwrap();
        assert!((av - av2).abs() < 1e-14 && (s - s2).abs() < 1e-14);
    }
}
