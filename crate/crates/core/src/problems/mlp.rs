use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::cost::CostModel;
use crate::error::{Result, SfpError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Logistic,
    Tanh,
    Linear,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Logistic => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation's output.
    fn slope(self, out: f64) -> f64 {
        match self {
            Activation::Logistic => out * (1.0 - out),
            Activation::Tanh => 1.0 - out * out,
            Activation::Linear => 1.0,
        }
    }
}

/// Single-hidden-layer feedforward network.
///
/// Flat parameter layout: input-to-hidden weights (one row of `input_dim`
/// per hidden unit), hidden biases, hidden-to-output weights (one row of
/// `hidden` per output), output biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden: usize,
    pub output_dim: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

impl MlpModel {
    /// 2-2-1 logistic network whose squared error on the XOR patterns is
    /// [`xor_cost_value`](super::xor_cost_value).
    pub fn xor() -> Self {
        Self {
            input_dim: 2,
            hidden: 2,
            output_dim: 1,
            hidden_activation: Activation::Logistic,
            output_activation: Activation::Logistic,
        }
    }

    /// 2-`hidden`-2 tanh network with linear outputs.
    pub fn robot_arm(hidden: usize) -> Self {
        Self {
            input_dim: 2,
            hidden,
            output_dim: 2,
            hidden_activation: Activation::Tanh,
            output_activation: Activation::Linear,
        }
    }

    pub fn param_count(&self) -> usize {
        self.input_dim * self.hidden + self.hidden + self.hidden * self.output_dim + self.output_dim
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let b1 = self.input_dim * self.hidden;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.hidden * self.output_dim;
        (b1, w2, b2)
    }

    fn check(&self, w: &[f64], input: &[f64]) -> Result<()> {
        if w.len() != self.param_count() {
            return Err(SfpError::DimensionMismatch {
                expected: self.param_count(),
                got: w.len(),
            });
        }
        if input.len() != self.input_dim {
            return Err(SfpError::DimensionMismatch {
                expected: self.input_dim,
                got: input.len(),
            });
        }
        Ok(())
    }

    fn check_dataset(&self, w: &[f64], data: &Dataset) -> Result<()> {
        if w.len() != self.param_count() {
            return Err(SfpError::DimensionMismatch {
                expected: self.param_count(),
                got: w.len(),
            });
        }
        if data.input_dim() != self.input_dim && !data.is_empty() {
            return Err(SfpError::DimensionMismatch {
                expected: self.input_dim,
                got: data.input_dim(),
            });
        }
        if data.output_dim() != self.output_dim && !data.is_empty() {
            return Err(SfpError::DimensionMismatch {
                expected: self.output_dim,
                got: data.output_dim(),
            });
        }
        Ok(())
    }

    /// Hidden activations and outputs, no checks.
    fn forward_into(&self, w: &[f64], input: &[f64], hidden: &mut [f64], out: &mut [f64]) {
        let (b1, w2, b2) = self.offsets();
        for (j, h) in hidden.iter_mut().enumerate() {
            let row = &w[j * self.input_dim..(j + 1) * self.input_dim];
            let z = w[b1 + j] + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
            *h = self.hidden_activation.apply(z);
        }
        for (k, o) in out.iter_mut().enumerate() {
            let row = &w[w2 + k * self.hidden..w2 + (k + 1) * self.hidden];
            let z = w[b2 + k]
                + row
                    .iter()
                    .zip(hidden.iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            *o = self.output_activation.apply(z);
        }
    }
}

pub fn mlp_forward(model: &MlpModel, w: &[f64], input: &[f64]) -> Result<Vec<f64>> {
    model.check(w, input)?;
    let mut hidden = vec![0.0; model.hidden];
    let mut out = vec![0.0; model.output_dim];
    model.forward_into(w, input, &mut hidden, &mut out);
    Ok(out)
}

/// `sum over samples of |f(X, w) - Y|^2`.
pub fn sse_loss(model: &MlpModel, w: &[f64], data: &Dataset) -> Result<f64> {
    model.check_dataset(w, data)?;
    Ok(loss_unchecked(model, w, data))
}

fn loss_unchecked(model: &MlpModel, w: &[f64], data: &Dataset) -> f64 {
    let mut hidden = vec![0.0; model.hidden];
    let mut out = vec![0.0; model.output_dim];
    let mut total = 0.0;
    for (x, y) in data.inputs.iter().zip(&data.targets) {
        model.forward_into(w, x, &mut hidden, &mut out);
        total += out
            .iter()
            .zip(y)
            .map(|(o, t)| (o - t) * (o - t))
            .sum::<f64>();
    }
    total
}

/// Gradient of [`sse_loss`] by backpropagation.
pub fn sse_grad(model: &MlpModel, w: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    model.check_dataset(w, data)?;
    Ok(grad_unchecked(model, w, data))
}

fn grad_unchecked(model: &MlpModel, w: &[f64], data: &Dataset) -> Vec<f64> {
    let (b1, w2, b2) = model.offsets();
    let mut grad = vec![0.0; w.len()];
    let mut hidden = vec![0.0; model.hidden];
    let mut out = vec![0.0; model.output_dim];
    let mut delta_out = vec![0.0; model.output_dim];
    for (x, y) in data.inputs.iter().zip(&data.targets) {
        model.forward_into(w, x, &mut hidden, &mut out);
        for k in 0..model.output_dim {
            delta_out[k] = 2.0 * (out[k] - y[k]) * model.output_activation.slope(out[k]);
            grad[b2 + k] += delta_out[k];
            for j in 0..model.hidden {
                grad[w2 + k * model.hidden + j] += delta_out[k] * hidden[j];
            }
        }
        for j in 0..model.hidden {
            let back: f64 = (0..model.output_dim)
                .map(|k| delta_out[k] * w[w2 + k * model.hidden + j])
                .sum();
            let delta = back * model.hidden_activation.slope(hidden[j]);
            grad[b1 + j] += delta;
            for i in 0..model.input_dim {
                grad[j * model.input_dim + i] += delta * x[i];
            }
        }
    }
    grad
}

/// Normalization of the squared-error loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossScale {
    /// Sum over samples; `exp(-V / 2 sigma^2)` is then the Gaussian likelihood.
    #[default]
    Sum,
    /// Mean over samples, which keeps conditional widths independent of the
    /// dataset size.
    PerSample,
}

/// Squared-error training loss of a model on a fixed dataset, as a cost over the weights.
#[derive(Debug, Clone)]
pub struct SseCost {
    model: MlpModel,
    data: Dataset,
    factor: f64,
    scale: LossScale,
}

impl SseCost {
    pub fn new(model: MlpModel, data: Dataset) -> Result<Self> {
        model.check_dataset(&vec![0.0; model.param_count()], &data)?;
        Ok(Self {
            model,
            data,
            factor: 1.0,
            scale: LossScale::Sum,
        })
    }

    pub fn with_scale(mut self, scale: LossScale) -> Self {
        self.scale = scale;
        self.factor = match scale {
            LossScale::PerSample if !self.data.is_empty() => 1.0 / self.data.len() as f64,
            _ => 1.0,
        };
        self
    }

    pub fn scale(&self) -> LossScale {
        self.scale
    }

    pub fn model(&self) -> &MlpModel {
        &self.model
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }
}

impl CostModel for SseCost {
    fn dim(&self) -> usize {
        self.model.param_count()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.factor * loss_unchecked(&self.model, x, &self.data)
    }
    fn partial(&self, x: &[f64], n: usize) -> f64 {
        self.factor * grad_unchecked(&self.model, x, &self.data)[n]
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = grad_unchecked(&self.model, x, &self.data);
        g.iter_mut().for_each(|v| *v *= self.factor);
        g
    }
}
