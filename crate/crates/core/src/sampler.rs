//! Gibbs-style coordinate sweeps over conditional stationary densities.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::accumulator::MarginalAccumulator;
use crate::collocation::{build_with_basis, CollocationBasis};
use crate::config::{SfpConfig, SweepOrder};
use crate::cost::CostModel;
use crate::diagnostics::convergence_measures;
use crate::error::{Result, SfpError};
use crate::inversion::InverseTable;
use crate::space::SearchSpace;

/// Current point of a trajectory together with its random stream.
#[derive(Debug, Clone)]
pub struct SamplerState {
    pub x: Vec<f64>,
    /// Completed sweeps.
    pub sweep_index: usize,
    rng: ChaCha8Rng,
}

impl SamplerState {
    /// Uniformly random start inside `space`.
    pub fn random(space: &SearchSpace, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = (0..space.dims())
            .map(|n| {
                let (lo, hi) = space.bounds(n);
                lo + (hi - lo) * rng.random::<f64>()
            })
            .collect();
        Self {
            x,
            sweep_index: 0,
            rng,
        }
    }

    pub fn at(x: Vec<f64>, seed: u64) -> Self {
        Self {
            x,
            sweep_index: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Diagnostics recorded after each sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// 1-based sweep number.
    pub sweep: usize,
    /// Mean over coordinates of the marginal means.
    pub av: f64,
    /// Mean over coordinates of the marginal standard deviations.
    pub s: f64,
    pub argmax: Vec<f64>,
    pub cost_at_argmax: f64,
    /// Cumulative partial-derivative evaluations.
    pub gradient_evals: u64,
}

#[derive(Debug, Clone)]
pub struct SfpResult {
    pub accumulator: MarginalAccumulator,
    pub records: Vec<SweepRecord>,
    pub final_state: SamplerState,
    pub gradient_evals: u64,
}

impl SfpResult {
    pub fn last_record(&self) -> Option<&SweepRecord> {
        self.records.last()
    }
}

/// A failed run with everything computed before the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    #[source]
    pub error: SfpError,
    pub partial: Box<SfpResult>,
}

/// Reusable per-run workspace: the collocation tables for the configured basis size.
struct Sweeper<'a, C: ?Sized> {
    cost: &'a C,
    space: &'a SearchSpace,
    config: &'a SfpConfig,
    basis: CollocationBasis,
    order: Vec<usize>,
}

impl<'a, C: CostModel + ?Sized> Sweeper<'a, C> {
    fn new(cost: &'a C, space: &'a SearchSpace, config: &'a SfpConfig) -> Result<Self> {
        config.validate()?;
        if cost.dim() != space.dims() {
            return Err(SfpError::DimensionMismatch {
                expected: space.dims(),
                got: cost.dim(),
            });
        }
        Ok(Self {
            cost,
            space,
            config,
            basis: CollocationBasis::new(config.basis_size),
            order: (0..space.dims()).collect(),
        })
    }

    /// One pass over all coordinates. Returns the number of derivative evaluations.
    fn sweep(&mut self, state: &mut SamplerState, acc: &mut MarginalAccumulator) -> Result<u64> {
        if !self.space.contains(&state.x) {
            return Err(SfpError::InvalidConfig(
                "sampler state outside the search space".into(),
            ));
        }
        if self.config.sweep_order == SweepOrder::ShuffledPerSweep {
            self.order.sort_unstable();
            self.order.shuffle(&mut state.rng);
        }
        let accumulate = state.sweep_index >= self.config.burn_in;
        let mut evals = 0;
        for idx in 0..self.order.len() {
            let n = self.order[idx];
            let annotate = |e: SfpError| SfpError::Sweep {
                sweep: state.sweep_index + 1,
                coordinate: n,
                source: Box::new(e),
            };
            let system = build_with_basis(
                self.cost,
                &state.x,
                n,
                self.config.diffusion,
                self.space,
                &self.basis,
            )
            .map_err(annotate)?;
            evals += system.nodes.len() as u64;
            let expansion = system.solve().map_err(annotate)?;
            if accumulate {
                acc.add(n, &expansion.coeffs);
            }
            let u: f64 = state.rng.random();
            state.x[n] = InverseTable::new(&expansion, self.config.table_resolution).invert(u);
        }
        state.sweep_index += 1;
        Ok(evals)
    }
}

/// One sweep: for each coordinate solve its conditional CDF, fold the
/// coefficients into `acc`, and redraw the coordinate by inversion.
///
/// Returns the number of partial-derivative evaluations performed.
pub fn sfp_sweep<C: CostModel + ?Sized>(
    state: &mut SamplerState,
    cost: &C,
    config: &SfpConfig,
    space: &SearchSpace,
    acc: &mut MarginalAccumulator,
) -> Result<u64> {
    Sweeper::new(cost, space, config)?.sweep(state, acc)
}

/// Runs `config.sweeps` sweeps from a uniformly random start.
pub fn run_sfp<C: CostModel + ?Sized>(
    cost: &C,
    space: &SearchSpace,
    config: &SfpConfig,
) -> std::result::Result<SfpResult, RunFailure> {
    run_sfp_with(cost, space, config, |_, _| {})
}

/// [`run_sfp`] with a callback invoked after every sweep with the
/// sweep's record (if the accumulator is populated yet) and the fresh state.
pub fn run_sfp_with<C, F>(
    cost: &C,
    space: &SearchSpace,
    config: &SfpConfig,
    mut observer: F,
) -> std::result::Result<SfpResult, RunFailure>
where
    C: CostModel + ?Sized,
    F: FnMut(Option<&SweepRecord>, &SamplerState),
{
    let state = SamplerState::random(space, config.seed);
    let mut result = SfpResult {
        accumulator: MarginalAccumulator::new(space, config.basis_size),
        records: Vec::with_capacity(config.sweeps),
        final_state: state,
        gradient_evals: 0,
    };
    let mut sweeper = match Sweeper::new(cost, space, config) {
        Ok(s) => s,
        Err(error) => {
            return Err(RunFailure {
                error,
                partial: Box::new(result),
            })
        }
    };

    for _ in 0..config.sweeps {
        let outcome = sweeper
            .sweep(&mut result.final_state, &mut result.accumulator)
            .and_then(|evals| {
                result.gradient_evals += evals;
                if result.accumulator.is_complete() {
                    record(cost, &result).map(Some)
                } else {
                    Ok(None)
                }
            });
        match outcome {
            Ok(rec) => {
                observer(rec.as_ref(), &result.final_state);
                result.records.extend(rec);
            }
            Err(error) => {
                return Err(RunFailure {
                    error,
                    partial: Box::new(result),
                })
            }
        }
    }
    Ok(result)
}

fn record<C: CostModel + ?Sized>(cost: &C, result: &SfpResult) -> Result<SweepRecord> {
    let (av, s) = convergence_measures(&result.accumulator)?;
    let argmax = result.accumulator.argmax()?;
    let cost_at_argmax = cost.value(&argmax);
    Ok(SweepRecord {
        sweep: result.final_state.sweep_index,
        av,
        s,
        argmax,
        cost_at_argmax,
        gradient_evals: result.gradient_evals,
    })
}
