//! Plot-ready CSV tables and JSON reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs always produce byte-identical files.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::accumulator::{marginal_moments, MarginalAccumulator};
use crate::config::SfpConfig;
use crate::expansion::CdfExpansion;
use crate::inference::PredictionSummary;
use crate::sampler::SweepRecord;

/// Serialized learned marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionExport {
    pub dims: usize,
    pub bounds: Vec<[f64; 2]>,
    #[serde(rename = "L")]
    pub basis_size: usize,
    #[serde(rename = "D")]
    pub diffusion: f64,
    pub mean_coeffs: Vec<Vec<f64>>,
    pub update_count: Vec<usize>,
}

impl ExpansionExport {
    pub fn new(acc: &MarginalAccumulator, config: &SfpConfig) -> Self {
        Self {
            dims: acc.dims(),
            bounds: (0..acc.dims()).map(|n| acc.bounds(n).into()).collect(),
            basis_size: acc.basis_size(),
            diffusion: config.diffusion,
            mean_coeffs: (0..acc.dims())
                .map(|n| acc.mean_coeffs(n).to_vec())
                .collect(),
            update_count: acc.update_counts().to_vec(),
        }
    }

    /// Rebuilds the accumulated expansion of coordinate `n`.
    pub fn marginal(&self, n: usize) -> CdfExpansion {
        CdfExpansion::new(
            self.mean_coeffs[n].clone(),
            self.bounds[n][0],
            self.bounds[n][1],
        )
    }
}

/// `sweep,av,s,cost_at_argmax,argmax_1..argmax_N`
pub fn write_diagnostics_csv<W: Write>(
    mut w: W,
    dims: usize,
    records: &[SweepRecord],
) -> io::Result<()> {
    write!(w, "sweep,av,s,cost_at_argmax")?;
    for n in 1..=dims {
        write!(w, ",argmax_{n}")?;
    }
    writeln!(w)?;
    for r in records {
        write!(w, "{},{},{},{}", r.sweep, r.av, r.s, r.cost_at_argmax)?;
        for v in &r.argmax {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// CDF and density of one marginal on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub x: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Density clamped at zero.
    pub pdf: Vec<f64>,
    /// Whether any raw density value was negative before clamping.
    pub clamped: bool,
}

/// Grid size of exported density tables.
pub const DENSITY_POINTS: usize = 512;

impl DensityTable {
    pub fn new(expansion: &CdfExpansion, points: usize) -> Self {
        let h = expansion.width() / (points - 1) as f64;
        let mut table = Self {
            x: vec![],
            cdf: vec![],
            pdf: vec![],
            clamped: false,
        };
        for i in 0..points {
            let x = if i == points - 1 {
                expansion.upper
            } else {
                expansion.lower + i as f64 * h
            };
            let j = expansion.jet(x);
            table.clamped |= j.slope < 0.0;
            table.x.push(x);
            table.cdf.push(j.value);
            table.pdf.push(j.slope.max(0.0));
        }
        table
    }

    /// `x,cdf,pdf`
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,cdf,pdf")?;
        for i in 0..self.x.len() {
            writeln!(w, "{},{},{}", self.x[i], self.cdf[i], self.pdf[i])?;
        }
        Ok(())
    }
}

/// Summary of a two-trajectory convergence comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoTrajectoryReport {
    pub geometric_rate: Option<f64>,
    pub power_exponent: Option<f64>,
    pub tail_start: usize,
    pub dropped_zeros: usize,
}

/// `sweep,s1,s2,abs_diff`
pub fn write_two_trajectory_csv<W: Write>(mut w: W, s1: &[f64], s2: &[f64]) -> io::Result<()> {
    writeln!(w, "sweep,s1,s2,abs_diff")?;
    for (i, (a, b)) in s1.iter().zip(s2).enumerate() {
        writeln!(w, "{},{a},{b},{}", i + 1, (a - b).abs())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalMoments {
    pub mean: f64,
    pub std: f64,
}

/// Training outcome: configuration, final weights, per-sweep cost and marginal moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub config: SfpConfig,
    pub final_weights: Vec<f64>,
    pub per_sweep_cost: Vec<f64>,
    pub moments: Vec<MarginalMoments>,
    pub gradient_evals: u64,
}

impl TrainingReport {
    pub fn new(
        config: &SfpConfig,
        weights: &[f64],
        records: &[SweepRecord],
        acc: &MarginalAccumulator,
    ) -> Self {
        Self {
            config: config.clone(),
            final_weights: weights.to_vec(),
            per_sweep_cost: records.iter().map(|r| r.cost_at_argmax).collect(),
            moments: (0..acc.dims())
                .filter_map(|n| marginal_moments(acc, n).ok())
                .map(|(mean, std)| MarginalMoments { mean, std })
                .collect(),
            gradient_evals: records.last().map_or(0, |r| r.gradient_evals),
        }
    }

    /// `sweep,cost` mirror of the per-sweep cost.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sweep,cost")?;
        for (i, c) in self.per_sweep_cost.iter().enumerate() {
            writeln!(w, "{},{c}", i + 1)?;
        }
        Ok(())
    }
}

/// `draw,y1..yK` rows of the per-sweep ensemble outputs.
pub fn write_prediction_csv<W: Write>(mut w: W, summary: &PredictionSummary) -> io::Result<()> {
    write!(w, "draw")?;
    for k in 1..=summary.outputs.len() {
        write!(w, ",y{k}")?;
    }
    writeln!(w)?;
    let draws = summary.outputs.first().map_or(0, |o| o.samples.len());
    for i in 0..draws {
        write!(w, "{}", i + 1)?;
        for o in &summary.outputs {
            write!(w, ",{}", o.samples[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `output,bin_lo,bin_hi,count` rows of every output histogram.
pub fn write_histogram_csv<W: Write>(mut w: W, summary: &PredictionSummary) -> io::Result<()> {
    writeln!(w, "output,bin_lo,bin_hi,count")?;
    for (k, o) in summary.outputs.iter().enumerate() {
        for (i, c) in o.histogram.counts.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{c}",
                k + 1,
                o.histogram.edges[i],
                o.histogram.edges[i + 1]
            )?;
        }
    }
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}
