//! Maximum-likelihood and Bayesian training of small networks by sampling the
//! weight posterior `p(w | S) ~ exp(-V(w) / D)` under a uniform prior box.

use serde::{Deserialize, Serialize};

use crate::accumulator::MarginalAccumulator;
use crate::config::SfpConfig;
use crate::cost::CostModel;
use crate::error::{Result, SfpError};
use crate::expansion::CdfExpansion;
use crate::inversion::InverseTable;
use crate::problems::{mlp_forward, Dataset, LossScale, MlpModel, SseCost};
use crate::sampler::{run_sfp, run_sfp_with, RunFailure, SamplerState, SfpResult};
use crate::space::SearchSpace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Where the diffusion parameter of a posterior came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionSource {
    /// `D = 2 sigma^2` from the dataset's noise level.
    NoiseDerived,
    UserSet,
}

#[derive(Debug, Clone)]
pub struct PosteriorSpec {
    pub model: MlpModel,
    pub dataset: Dataset,
    pub prior: SearchSpace,
    pub diffusion: f64,
    pub diffusion_source: DiffusionSource,
    pub loss_scale: LossScale,
}

impl PosteriorSpec {
    /// Posterior with `D = 2 sigma^2` taken from the dataset noise.
    pub fn from_noise(model: MlpModel, dataset: Dataset, prior: SearchSpace) -> Result<Self> {
        let sigma = dataset.noise_sigma;
        if !(sigma > 0.0) {
            return Err(SfpError::InvalidConfig(
                "noise-derived D needs a positive noise sigma".into(),
            ));
        }
        Self::build(
            model,
            dataset,
            prior,
            2.0 * sigma * sigma,
            DiffusionSource::NoiseDerived,
        )
    }

    pub fn with_diffusion(
        model: MlpModel,
        dataset: Dataset,
        prior: SearchSpace,
        diffusion: f64,
    ) -> Result<Self> {
        Self::build(model, dataset, prior, diffusion, DiffusionSource::UserSet)
    }

    fn build(
        model: MlpModel,
        dataset: Dataset,
        prior: SearchSpace,
        diffusion: f64,
        diffusion_source: DiffusionSource,
    ) -> Result<Self> {
        if prior.dims() != model.param_count() {
            return Err(SfpError::DimensionMismatch {
                expected: model.param_count(),
                got: prior.dims(),
            });
        }
        if !(diffusion > 0.0 && diffusion.is_finite()) {
            return Err(SfpError::InvalidConfig(format!(
                "D must be positive, got {diffusion}"
            )));
        }
        SseCost::new(model, dataset.clone())?;
        Ok(Self {
            model,
            dataset,
            prior,
            diffusion,
            diffusion_source,
            loss_scale: LossScale::Sum,
        })
    }

    /// Switches the loss normalization. A noise-derived `D` is rescaled so the
    /// stationary density `exp(-V / D)` stays the same posterior.
    pub fn with_loss_scale(mut self, scale: LossScale) -> Self {
        let n = self.dataset.len().max(1) as f64;
        if self.diffusion_source == DiffusionSource::NoiseDerived {
            match (self.loss_scale, scale) {
                (LossScale::Sum, LossScale::PerSample) => self.diffusion /= n,
                (LossScale::PerSample, LossScale::Sum) => self.diffusion *= n,
                _ => {}
            }
        }
        self.loss_scale = scale;
        self
    }

    pub fn cost(&self) -> SseCost {
        SseCost::new(self.model, self.dataset.clone())
            .expect("validated on construction")
            .with_scale(self.loss_scale)
    }

    /// `config` with its diffusion replaced by the posterior's.
    pub fn sampler_config(&self, config: &SfpConfig) -> SfpConfig {
        SfpConfig {
            diffusion: self.diffusion,
            ..config.clone()
        }
    }
}

/// Outcome of maximum-likelihood training.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Marginal argmax of the learned posterior.
    pub weights: Vec<f64>,
    pub loss: f64,
    pub run: SfpResult,
}

/// Learns the posterior marginals and returns their per-coordinate maxima.
pub fn mle_train(
    spec: &PosteriorSpec,
    config: &SfpConfig,
) -> std::result::Result<TrainReport, RunFailure> {
    maximize_marginals(&spec.cost(), &spec.prior, &spec.sampler_config(config))
}

/// Runs the sampler on any cost and returns the marginal argmax after the last sweep.
pub fn maximize_marginals<C: CostModel + ?Sized>(
    cost: &C,
    space: &SearchSpace,
    config: &SfpConfig,
) -> std::result::Result<TrainReport, RunFailure> {
    let run = run_sfp(cost, space, config)?;
    let record = run
        .last_record()
        .expect("a successful run records every post-burn-in sweep");
    Ok(TrainReport {
        weights: record.argmax.clone(),
        loss: record.cost_at_argmax,
        run,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Minimum number of histogram bins.
pub const MIN_BINS: usize = 10;
const MAX_BINS: usize = 1000;

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let f = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

impl Histogram {
    /// Freedman-Diaconis binning with at least [`MIN_BINS`] bins.
    pub fn freedman_diaconis(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self {
                edges: vec![],
                counts: vec![],
            };
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        };
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
        let bins = if width > 0.0 {
            (((hi - lo) / width).ceil() as usize).clamp(MIN_BINS, MAX_BINS)
        } else {
            MIN_BINS
        };
        let step = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + i as f64 * step })
            .collect();
        let mut counts = vec![0; bins];
        for &v in samples {
            let i = (((v - lo) / step) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSummary {
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator; zero for one sample).
    pub std: f64,
    pub histogram: Histogram,
}

impl OutputSummary {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = if samples.len() > 1 {
            (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let histogram = Histogram::freedman_diaconis(&samples);
        Self {
            samples,
            mean,
            std,
            histogram,
        }
    }
}

/// Ensemble prediction: one entry per model output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSummary {
    pub test_input: Vec<f64>,
    pub outputs: Vec<OutputSummary>,
}

impl PredictionSummary {
    pub fn means(&self) -> Vec<f64> {
        self.outputs.iter().map(|o| o.mean).collect()
    }

    pub fn stds(&self) -> Vec<f64> {
        self.outputs.iter().map(|o| o.std).collect()
    }
}

/// Averages `predict(w)` over the weight vector drawn at the end of every sweep.
///
/// Returns the per-output sample sets and the sampler run.
pub fn ensemble_average<C, P>(
    cost: &C,
    space: &SearchSpace,
    config: &SfpConfig,
    mut predict: P,
) -> std::result::Result<(Vec<Vec<f64>>, SfpResult), RunFailure>
where
    C: CostModel + ?Sized,
    P: FnMut(&[f64]) -> Vec<f64>,
{
    let mut draws: Vec<Vec<f64>> = Vec::new();
    let run = run_sfp_with(cost, space, config, |_, state: &SamplerState| {
        if state.sweep_index > config.burn_in {
            draws.push(predict(&state.x));
        }
    })?;
    let outputs = draws.first().map_or(0, Vec::len);
    let per_output = (0..outputs)
        .map(|k| draws.iter().map(|d| d[k]).collect())
        .collect();
    Ok((per_output, run))
}

/// Bayesian prediction at `test_input`, averaging the network over the
/// sampler's post-sweep weight vectors.
pub fn bayes_predict(
    spec: &PosteriorSpec,
    config: &SfpConfig,
    test_input: &[f64],
) -> std::result::Result<(PredictionSummary, SfpResult), RunFailure> {
    let cost = spec.cost();
    let model = spec.model;
    if test_input.len() != model.input_dim {
        let config = spec.sampler_config(config);
        return Err(RunFailure {
            error: SfpError::DimensionMismatch {
                expected: model.input_dim,
                got: test_input.len(),
            },
            partial: Box::new(SfpResult {
                accumulator: MarginalAccumulator::new(&spec.prior, config.basis_size),
                records: vec![],
                final_state: SamplerState::random(&spec.prior, config.seed),
                gradient_evals: 0,
            }),
        });
    }
    let (samples, run) = ensemble_average(&cost, &spec.prior, &spec.sampler_config(config), |w| {
        mlp_forward(&model, w, test_input).expect("dimensions checked")
    })?;
    let summary = PredictionSummary {
        test_input: test_input.to_vec(),
        outputs: samples
            .into_iter()
            .map(OutputSummary::from_samples)
            .collect(),
    };
    Ok((summary, run))
}

/// Independent draws from the product of the learned marginals.
pub fn sample_marginals(
    acc: &MarginalAccumulator,
    count: usize,
    resolution: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let tables: Vec<InverseTable> = (0..acc.dims())
        .map(|n| Ok(InverseTable::new(&acc.marginal(n)?, resolution)))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| tables.iter().map(|t| t.invert(rng.random())).collect())
        .collect())
}

/// Backtracking steepest descent inside the box.
///
/// A step `x - step * grad` (clipped to the box) is accepted only if it lowers
/// the cost; otherwise `step` is multiplied by `shrink`. After an accepted step
/// the step length grows back by `1 / shrink`, never beyond `step0`. Stops when
/// the step falls below `tol` or after `max_iters` iterations.
pub fn steepest_descent_refine<C: CostModel + ?Sized>(
    cost: &C,
    space: &SearchSpace,
    start: &[f64],
    step0: f64,
    shrink: f64,
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, f64)> {
    if !space.contains(start) {
        return Err(SfpError::InvalidConfig(
            "refinement must start inside the search space".into(),
        ));
    }
    if !(shrink > 0.0 && shrink < 1.0) || !(step0 > 0.0) || !(tol > 0.0) {
        return Err(SfpError::InvalidConfig(
            "need step0 > 0, tol > 0 and 0 < shrink < 1".into(),
        ));
    }
    let mut x = start.to_vec();
    let mut value = cost.value(&x);
    if !value.is_finite() {
        return Err(SfpError::NonFiniteCost(x));
    }
    let mut step = step0;
    let mut trial = vec![0.0; x.len()];
    for _ in 0..max_iters {
        let grad = cost.gradient(&x);
        if let Some(n) = grad.iter().position(|g| !g.is_finite()) {
            return Err(SfpError::SingularCost {
                coordinate: n,
                x: x[n],
            });
        }
        loop {
            if step < tol {
                return Ok((x, value));
            }
            for ((t, xi), g) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi - step * g;
            }
            space.clamp(&mut trial);
            let v = cost.value(&trial);
            if v < value {
                x.copy_from_slice(&trial);
                value = v;
                step = (step / shrink).min(step0);
                break;
            }
            step *= shrink;
        }
    }
    Ok((x, value))
}

/// Posterior marginal of one weight for one training set.
#[derive(Debug, Clone)]
pub struct EvidencePeak {
    pub samples: usize,
    pub marginal: CdfExpansion,
    pub argmax: f64,
    pub peak: f64,
    pub run: SfpResult,
}

/// Learns the posterior for each dataset and reports the maximum of the
/// averaged marginal density of weight `weight`.
pub fn evidence_sharpening_experiment(
    model: &MlpModel,
    datasets: &[Dataset],
    prior: &SearchSpace,
    config: &SfpConfig,
    weight: usize,
) -> std::result::Result<Vec<EvidencePeak>, RunFailure> {
    let mut peaks = Vec::with_capacity(datasets.len());
    for data in datasets {
        let cost = SseCost::new(*model, data.clone()).map_err(|error| RunFailure {
            error,
            partial: Box::new(SfpResult {
                accumulator: MarginalAccumulator::new(prior, config.basis_size),
                records: vec![],
                final_state: SamplerState::random(prior, config.seed),
                gradient_evals: 0,
            }),
        })?;
        let run = run_sfp(&cost, prior, config)?;
        let marginal = run
            .accumulator
            .marginal(weight)
            .expect("complete after a successful run");
        let argmax = marginal.argmax_pdf();
        let peak = marginal.jet(argmax).slope;
        peaks.push(EvidencePeak {
            samples: data.len(),
            marginal,
            argmax,
            peak,
            run,
        });
    }
    Ok(peaks)
}
