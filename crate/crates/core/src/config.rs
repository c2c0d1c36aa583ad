use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};

/// Order in which coordinates are visited within one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepOrder {
    #[default]
    Cyclic,
    ShuffledPerSweep,
}

/// Sampler parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfpConfig {
    /// Diffusion (randomness) parameter `D`.
    pub diffusion: f64,
    /// Number of sine basis functions `L`.
    pub basis_size: usize,
    /// Number of full sweeps `M`.
    pub sweeps: usize,
    /// Points of the inversion lookup table, excluding the endpoint.
    pub table_resolution: usize,
    pub seed: u64,
    pub sweep_order: SweepOrder,
    /// Leading sweeps whose expansions are not accumulated.
    pub burn_in: usize,
}

impl Default for SfpConfig {
    fn default() -> Self {
        Self {
            diffusion: 1.0,
            basis_size: 10,
            sweeps: 1,
            table_resolution: 1024,
            seed: 0,
            sweep_order: SweepOrder::Cyclic,
            burn_in: 0,
        }
    }
}

impl SfpConfig {
    pub fn new(diffusion: f64, basis_size: usize, sweeps: usize, seed: u64) -> Self {
        Self {
            diffusion,
            basis_size,
            sweeps,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diffusion.is_finite() && self.diffusion > 0.0) {
            return Err(SfpError::InvalidConfig(format!(
                "D must be positive and finite, got {}",
                self.diffusion
            )));
        }
        if self.basis_size < 2 {
            return Err(SfpError::InvalidConfig(format!(
                "L must be at least 2, got {}",
                self.basis_size
            )));
        }
        if self.sweeps < 1 {
            return Err(SfpError::InvalidConfig(
                "at least one sweep required".into(),
            ));
        }
        if self.table_resolution < 64 {
            return Err(SfpError::InvalidConfig(format!(
                "table resolution must be at least 64, got {}",
                self.table_resolution
            )));
        }
        if self.burn_in >= self.sweeps {
            return Err(SfpError::InvalidConfig(format!(
                "burn-in ({}) must leave at least one of {} sweeps",
                self.burn_in, self.sweeps
            )));
        }
        Ok(())
    }
}
