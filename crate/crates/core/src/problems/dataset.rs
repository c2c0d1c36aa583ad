use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SfpError};

/// Observations `(X, Y)` with the noise level they were generated with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
    pub noise_sigma: f64,
    input_dim: usize,
    output_dim: usize,
}

/// Generator metadata stored next to an exported dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub sigma: f64,
    pub n: usize,
}

/// XOR patterns in the order used for nested training sets.
const XOR_PATTERNS: [([f64; 2], f64); 4] = [
    ([0.0, 0.0], 0.0),
    ([1.0, 1.0], 0.0),
    ([0.0, 1.0], 1.0),
    ([1.0, 0.0], 1.0),
];

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<Vec<f64>>, noise_sigma: f64) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(SfpError::DimensionMismatch {
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let input_dim = inputs.first().map_or(0, Vec::len);
        let output_dim = targets.first().map_or(0, Vec::len);
        Self::with_dims(inputs, targets, noise_sigma, input_dim, output_dim)
    }

    /// A dataset with explicit dimensions, which may be empty.
    pub fn with_dims(
        inputs: Vec<Vec<f64>>,
        targets: Vec<Vec<f64>>,
        noise_sigma: f64,
        input_dim: usize,
        output_dim: usize,
    ) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(SfpError::DimensionMismatch {
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        if let Some(bad) = inputs.iter().find(|x| x.len() != input_dim) {
            return Err(SfpError::DimensionMismatch {
                expected: input_dim,
                got: bad.len(),
            });
        }
        if let Some(bad) = targets.iter().find(|y| y.len() != output_dim) {
            return Err(SfpError::DimensionMismatch {
                expected: output_dim,
                got: bad.len(),
            });
        }
        if !(noise_sigma >= 0.0) {
            return Err(SfpError::InvalidConfig(format!(
                "noise sigma must be nonnegative, got {noise_sigma}"
            )));
        }
        Ok(Self {
            inputs,
            targets,
            noise_sigma,
            input_dim,
            output_dim,
        })
    }

    /// The four noiseless XOR patterns.
    pub fn xor() -> Self {
        Self::xor_prefix(4)
    }

    /// First `k` XOR patterns: (0,0), (1,1), (0,1), (1,0).
    pub fn xor_prefix(k: usize) -> Self {
        let (inputs, targets) = XOR_PATTERNS[..k.min(4)]
            .iter()
            .map(|(x, y)| (x.to_vec(), vec![*y]))
            .unzip();
        Self::with_dims(inputs, targets, 0.0, 2, 1).expect("static patterns")
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// Writes `x1,...,y1,...` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<String> = (1..=self.input_dim)
            .map(|i| format!("x{i}"))
            .chain((1..=self.output_dim).map(|i| format!("y{i}")))
            .collect();
        w.write_record(&header)?;
        for (x, y) in self.inputs.iter().zip(&self.targets) {
            w.write_record(x.iter().chain(y).map(|v| v.to_string()))?;
        }
        w.flush()
    }

    /// Reads a dataset written by [`Dataset::write_csv`]; columns are assigned
    /// to inputs or targets by their `x`/`y` header prefix.
    pub fn read_csv<R: Read>(reader: R, noise_sigma: f64) -> Result<Self> {
        let bad = |e: &dyn std::fmt::Display| SfpError::InvalidConfig(format!("dataset csv: {e}"));
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers().map_err(|e| bad(&e))?.clone();
        let is_input: Vec<bool> = header
            .iter()
            .map(|h| match h.chars().next() {
                Some('x') => Ok(true),
                Some('y') => Ok(false),
                _ => Err(bad(&format!("unexpected column {h:?}"))),
            })
            .collect::<Result<_>>()?;
        let input_dim = is_input.iter().filter(|&&b| b).count();
        let output_dim = is_input.len() - input_dim;
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for row in r.records() {
            let row = row.map_err(|e| bad(&e))?;
            let mut x = Vec::with_capacity(input_dim);
            let mut y = Vec::with_capacity(output_dim);
            for (field, &inp) in row.iter().zip(&is_input) {
                let v: f64 = field.trim().parse().map_err(|e| bad(&e))?;
                if inp {
                    x.push(v)
                } else {
                    y.push(v)
                }
            }
            inputs.push(x);
            targets.push(y);
        }
        Self::with_dims(inputs, targets, noise_sigma, input_dim, output_dim)
    }
}
