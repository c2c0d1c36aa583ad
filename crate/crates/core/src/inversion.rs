//! Inversion sampling through a monotonized lookup table.

use crate::expansion::CdfExpansion;

/// Tabulated CDF on a uniform grid, clamped to `[0, 1]` and made
/// nondecreasing by a running maximum.
#[derive(Debug, Clone)]
pub struct InverseTable {
    lower: f64,
    step: f64,
    values: Vec<f64>,
    /// Largest change introduced by clamping and monotonizing.
    pub adjustment: f64,
}

impl InverseTable {
    pub fn new(expansion: &CdfExpansion, resolution: usize) -> Self {
        let step = expansion.width() / resolution as f64;
        let mut values = Vec::with_capacity(resolution + 1);
        let mut adjustment = 0.0_f64;
        let mut running = 0.0_f64;
        for i in 0..=resolution {
            let x = if i == resolution {
                expansion.upper
            } else {
                expansion.lower + i as f64 * step
            };
            let raw = expansion.jet(x).value;
            running = running.max(raw.clamp(0.0, 1.0));
            adjustment = adjustment.max((running - raw).abs());
            values.push(running);
        }
        Self {
            lower: expansion.lower,
            step,
            values,
            adjustment,
        }
    }

    pub fn resolution(&self) -> usize {
        self.values.len() - 1
    }

    fn node(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.step
    }

    /// Piecewise-linear inverse of the table. `u <= 0` maps to the lower
    /// bound and `u >= 1` to the upper bound.
    pub fn invert(&self, u: f64) -> f64 {
        let last = self.resolution();
        if u <= 0.0 {
            return self.lower;
        }
        if u >= 1.0 {
            return self.node(last);
        }
        // first node whose table value reaches u
        let i = self.values.partition_point(|&v| v < u);
        if i == 0 {
            return self.lower;
        }
        if i > last {
            return self.node(last);
        }
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        let frac = if v1 > v0 { (u - v0) / (v1 - v0) } else { 1.0 };
        self.node(i - 1) + frac * self.step
    }

    /// Bound on `|y(invert(u)) - u|` for the expansion this table was built from,
    /// given the largest density magnitude over the interval.
    pub fn tolerance(&self, max_abs_density: f64) -> f64 {
        self.adjustment.max(self.step * max_abs_density)
    }
}

/// Draws the coordinate value whose tabulated CDF equals `u`.
pub fn invert_cdf(expansion: &CdfExpansion, u: f64, resolution: usize) -> f64 {
    InverseTable::new(expansion, resolution).invert(u)
}
