//! Quarter-wave sine expansions of a cumulative distribution.
//!
//! A CDF on `[lower, upper]` is represented as
//!
//! ```text
//! y(x) = sum_{l=1..L} a_l sin(w_l (x - lower)),   w_l = (2l - 1) pi / (2 (upper - lower))
//! ```
//!
//! Every basis function vanishes at `lower` and equals `(-1)^(l+1)` at
//! `upper`, so `y(lower) = 0` holds identically and `y(upper) = 1` is a single
//! linear constraint on the coefficients. The density is the term-wise
//! derivative. Moments follow in closed form from
//! `int sin(w t) dt = 1 / w` and `int t sin(w t) dt = (-1)^(l+1) / w^2` over
//! the quarter period.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Result, SfpError};

/// Grid points scanned before golden-section refinement of the density maximum.
pub const ARGMAX_GRID: usize = 1024;
/// Final bracket width of the golden-section refinement.
pub const ARGMAX_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfExpansion {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Values of `y`, `y'` and `y''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

/// Angular frequency of basis function `l` (1-based) on an interval of `width`.
#[inline]
pub fn frequency(l: usize, width: f64) -> f64 {
    (2 * l - 1) as f64 * PI / (2.0 * width)
}

impl CdfExpansion {
    pub fn new(coeffs: Vec<f64>, lower: f64, upper: f64) -> Self {
        Self {
            coeffs,
            lower,
            upper,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x >= self.lower && x <= self.upper {
            Ok(())
        } else {
            Err(SfpError::OutOfDomain {
                x,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.jet(x).value)
    }

    /// Density `y'(x)`. May dip slightly below zero from truncation.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.jet(x).slope)
    }

    /// Value and first two derivatives, without a domain check.
    ///
    /// The odd harmonics are generated by the three-term recurrence
    /// `s_{l+1} = 2 cos(2 theta) s_l - s_{l-1}`, one trig call per point.
    pub fn jet(&self, x: f64) -> Jet {
        let width = self.width();
        let theta = FRAC_PI_2 * ((x - self.lower) / width);
        let (sin_t, cos_t) = theta.sin_cos();
        let k = 2.0 * (2.0 * theta).cos();
        let base = PI / (2.0 * width);

        let (mut s_prev, mut s) = (-sin_t, sin_t);
        let (mut c_prev, mut c) = (cos_t, cos_t);
        let mut jet = Jet {
            value: 0.0,
            slope: 0.0,
            curvature: 0.0,
        };
        for (i, &a) in self.coeffs.iter().enumerate() {
            let w = (2 * i + 1) as f64 * base;
            jet.value += a * s;
            jet.slope += a * w * c;
            jet.curvature -= a * w * w * s;
            let s_next = k * s - s_prev;
            let c_next = k * c - c_prev;
            s_prev = s;
            s = s_next;
            c_prev = c;
            c = c_next;
        }
        jet
    }

    /// `y(upper) = sum_l a_l (-1)^(l+1)`, exact in the coefficients.
    pub fn upper_value(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| if i % 2 == 0 { a } else { -a })
            .sum()
    }

    /// `int_lower^upper y(x) dx`.
    pub fn integral(&self) -> f64 {
        let width = self.width();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a / frequency(i + 1, width))
            .sum()
    }

    /// `int_lower^upper x y(x) dx`.
    pub fn first_moment_integral(&self) -> f64 {
        let width = self.width();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let w = frequency(i + 1, width);
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                a * (self.lower / w + sign / (w * w))
            })
            .sum()
    }

    /// Mean and standard deviation of the density, by integration by parts:
    /// `E[x] = upper - int y` and `E[x^2] = upper^2 - 2 int x y`.
    pub fn moments(&self) -> (f64, f64) {
        let mean = self.upper - self.integral();
        let second = self.upper * self.upper - 2.0 * self.first_moment_integral();
        (mean, (second - mean * mean).max(0.0).sqrt())
    }

    /// Location of the density maximum: a scan of `ARGMAX_GRID` points
    /// followed by golden-section refinement to `ARGMAX_TOL`.
    pub fn argmax_pdf(&self) -> f64 {
        let h = self.width() / (ARGMAX_GRID - 1) as f64;
        let at = |i: usize| {
            if i == ARGMAX_GRID - 1 {
                self.upper
            } else {
                self.lower + i as f64 * h
            }
        };
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for i in 0..ARGMAX_GRID {
            let v = self.jet(at(i)).slope;
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        let lo = at(best.saturating_sub(1));
        let hi = at((best + 1).min(ARGMAX_GRID - 1));
        let refined = golden_section_max(|x| self.jet(x).slope, lo, hi, ARGMAX_TOL);
        if self.jet(refined).slope >= best_val {
            refined
        } else {
            at(best)
        }
    }
}

/// Maximizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Free-function form of [`CdfExpansion::cdf`].
pub fn eval_cdf(expansion: &CdfExpansion, x: f64) -> Result<f64> {
    expansion.cdf(x)
}

/// Free-function form of [`CdfExpansion::pdf`].
pub fn eval_pdf(expansion: &CdfExpansion, x: f64) -> Result<f64> {
    expansion.pdf(x)
}
