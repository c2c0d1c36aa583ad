//! Experiment configuration: a flat JSON document whose keys can each be
//! overridden by a command-line flag, resolved against per-experiment defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sfpl::problems::MlpModel;
use sfpl::{SfpConfig, SweepOrder};

use crate::expr::{self, ExprCost};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Michalewicz,
    XorOptimize,
    XorConvergence,
    XorEvidence,
    RobotArmTrain,
    RobotArmPredict,
    CustomCost,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Michalewicz,
        Experiment::XorOptimize,
        Experiment::XorConvergence,
        Experiment::XorEvidence,
        Experiment::RobotArmTrain,
        Experiment::RobotArmPredict,
        Experiment::CustomCost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Michalewicz => "michalewicz",
            Experiment::XorOptimize => "xor-optimize",
            Experiment::XorConvergence => "xor-convergence",
            Experiment::XorEvidence => "xor-evidence",
            Experiment::RobotArmTrain => "robot-arm-train",
            Experiment::RobotArmPredict => "robot-arm-predict",
            Experiment::CustomCost => "custom-cost",
        }
    }

    /// Number of independent sampler trajectories the experiment compares.
    pub fn trajectories(self) -> usize {
        match self {
            Experiment::XorOptimize | Experiment::XorConvergence | Experiment::RobotArmTrain => 2,
            _ => 1,
        }
    }

    fn is_xor(self) -> bool {
        matches!(
            self,
            Experiment::XorOptimize | Experiment::XorConvergence | Experiment::XorEvidence
        )
    }

    fn is_robot(self) -> bool {
        matches!(
            self,
            Experiment::RobotArmTrain | Experiment::RobotArmPredict
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
                format!(
                    "unknown experiment '{s}' (expected one of: {})",
                    names.join(", ")
                )
            })
    }
}

/// Every configurable key; unset keys fall back to the experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<String>,
    #[serde(rename = "D")]
    pub diffusion: Option<f64>,
    #[serde(rename = "L")]
    pub basis_size: Option<usize>,
    pub sweeps: Option<usize>,
    pub table_resolution: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub sweep_order: Option<SweepOrder>,
    pub burn_in: Option<usize>,
    pub out: Option<PathBuf>,
    pub tail_start: Option<usize>,
    pub m: Option<u32>,
    pub hidden: Option<usize>,
    pub samples: Option<usize>,
    pub data_seed: Option<u64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub cost: Option<String>,
    pub dims: Option<usize>,
    pub test_input: Option<Vec<f64>>,
    pub weight: Option<usize>,
    pub refine_draws: Option<usize>,
}

impl RawConfig {
    /// `self` with every key set in `over` replaced.
    pub fn overridden_by(self, over: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: over.$f.or(self.$f)),* } };
        }
        let (seed_only, seeds_only) = (
            over.seed.is_some() && over.seeds.is_none(),
            over.seeds.is_some() && over.seed.is_none(),
        );
        let mut merged = pick!(
            experiment,
            diffusion,
            basis_size,
            sweeps,
            table_resolution,
            seed,
            seeds,
            sweep_order,
            burn_in,
            out,
            tail_start,
            m,
            hidden,
            samples,
            data_seed,
            lower,
            upper,
            cost,
            dims,
            test_input,
            weight,
            refine_draws
        );
        // a seed given at a higher layer replaces seeds from a lower one, and vice versa
        if seed_only {
            merged.seeds = None;
        } else if seeds_only {
            merged.seed = None;
        }
        merged
    }
}

/// Fully resolved configuration; problem keys that do not apply to the
/// experiment are absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "D")]
    pub diffusion: f64,
    #[serde(rename = "L")]
    pub basis_size: usize,
    pub sweeps: usize,
    pub table_resolution: usize,
    pub seeds: Vec<u64>,
    pub sweep_order: SweepOrder,
    pub burn_in: usize,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_start: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_input: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_draws: Option<usize>,
}

/// Robot-arm test input of the prediction experiment.
pub const ROBOT_TEST_INPUT: [f64; 2] = [-1.471, 0.752];

struct Defaults {
    diffusion: f64,
    basis_size: usize,
    sweeps: usize,
    seeds: &'static [u64],
}

fn defaults(e: Experiment) -> Defaults {
    match e {
        Experiment::Michalewicz => Defaults {
            diffusion: 1.0,
            basis_size: 5,
            sweeps: 1,
            seeds: &[1],
        },
        Experiment::XorOptimize | Experiment::XorConvergence => Defaults {
            diffusion: 0.01,
            basis_size: 200,
            sweeps: 300,
            seeds: &[7, 11],
        },
        Experiment::XorEvidence => Defaults {
            diffusion: 0.01,
            basis_size: 200,
            sweeps: 300,
            seeds: &[7],
        },
        Experiment::RobotArmTrain => Defaults {
            diffusion: 0.00125,
            basis_size: 300,
            sweeps: 300,
            seeds: &[7, 11],
        },
        Experiment::RobotArmPredict => Defaults {
            diffusion: 0.00125,
            basis_size: 300,
            sweeps: 300,
            seeds: &[7],
        },
        Experiment::CustomCost => Defaults {
            diffusion: 1.0,
            basis_size: 20,
            sweeps: 10,
            seeds: &[1],
        },
    }
}

fn only_for<T>(value: Option<T>, applies: bool, default: T) -> Option<T> {
    applies.then(|| value.unwrap_or(default))
}

impl ExperimentConfig {
    /// Expands defaults and validates; every error here is a usage error.
    pub fn resolve(raw: RawConfig) -> Result<Self, String> {
        let name = raw.experiment.as_deref().ok_or("no experiment given")?;
        let e: Experiment = name.parse()?;
        let d = defaults(e);
        let seeds = match (raw.seeds, raw.seed) {
            (Some(s), _) => s,
            (None, Some(s)) => (0..e.trajectories() as u64)
                .map(|k| s.wrapping_add(k))
                .collect(),
            (None, None) => d.seeds.to_vec(),
        };
        if seeds.len() != e.trajectories() {
            return Err(format!(
                "{e} needs {} seed(s), got {}",
                e.trajectories(),
                seeds.len()
            ));
        }
        let (lo, hi) = if e.is_xor() {
            (-10.0, 10.0)
        } else {
            (-1.0, 1.0)
        };
        let boxed = e.is_xor() || e.is_robot() || e == Experiment::CustomCost;
        let mut config = ExperimentConfig {
            experiment: e,
            diffusion: raw.diffusion.unwrap_or(d.diffusion),
            basis_size: raw.basis_size.unwrap_or(d.basis_size),
            sweeps: raw.sweeps.unwrap_or(d.sweeps),
            table_resolution: raw.table_resolution.unwrap_or(1024),
            seeds,
            sweep_order: raw.sweep_order.unwrap_or_default(),
            burn_in: raw.burn_in.unwrap_or(0),
            out: raw
                .out
                .unwrap_or_else(|| PathBuf::from("results").join(e.name())),
            tail_start: only_for(raw.tail_start, e == Experiment::XorConvergence, 100),
            m: only_for(raw.m, e == Experiment::Michalewicz, 10),
            hidden: only_for(raw.hidden, e.is_robot(), 16),
            samples: only_for(raw.samples, e.is_robot(), 200),
            data_seed: only_for(raw.data_seed, e.is_robot(), 1),
            lower: only_for(raw.lower, boxed, lo),
            upper: only_for(raw.upper, boxed, hi),
            cost: if e == Experiment::CustomCost {
                Some(
                    raw.cost
                        .ok_or("custom-cost needs a cost expression (--cost)")?,
                )
            } else {
                None
            },
            dims: None,
            test_input: only_for(
                raw.test_input,
                e == Experiment::RobotArmPredict,
                ROBOT_TEST_INPUT.to_vec(),
            ),
            weight: only_for(raw.weight, e == Experiment::XorEvidence, 5),
            refine_draws: only_for(raw.refine_draws, e == Experiment::XorOptimize, 50),
        };
        if let Some(src) = &config.cost {
            let parsed = expr::parse(src).map_err(|err| format!("cost expression: {err}"))?;
            let dims = raw.dims.unwrap_or(parsed.arity().max(1));
            ExprCost::new(parsed, dims)?;
            config.dims = Some(dims);
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        self.sfp_config(0).validate().map_err(|e| e.to_string())?;
        if let (Some(lo), Some(hi)) = (self.lower, self.upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(format!("need finite lower < upper, got [{lo}, {hi}]"));
            }
        }
        if self.m == Some(0) {
            return Err("m must be positive".into());
        }
        if self.hidden == Some(0) || self.samples == Some(0) {
            return Err("hidden units and samples must be positive".into());
        }
        if let Some(t) = &self.test_input {
            if t.len() != 2 {
                return Err(format!("test input needs 2 values, got {}", t.len()));
            }
        }
        if let Some(w) = self.weight {
            if !(1..=MlpModel::xor().param_count()).contains(&w) {
                return Err(format!("weight must be in 1..=9, got {w}"));
            }
        }
        if self.refine_draws == Some(0) {
            return Err("refine draws must be positive".into());
        }
        if self.seeds.len() == 2 && self.seeds[0] == self.seeds[1] {
            return Err("the two trajectories need distinct seeds".into());
        }
        Ok(())
    }

    /// Sampler settings for one seed.
    pub fn sfp_config(&self, seed: u64) -> SfpConfig {
        SfpConfig {
            diffusion: self.diffusion,
            basis_size: self.basis_size,
            sweeps: self.sweeps,
            table_resolution: self.table_resolution,
            seed,
            sweep_order: self.sweep_order,
            burn_in: self.burn_in,
        }
    }

    /// Search-space dimension N.
    pub fn dimension(&self) -> usize {
        match self.experiment {
            Experiment::Michalewicz => 2,
            Experiment::XorOptimize | Experiment::XorConvergence | Experiment::XorEvidence => {
                MlpModel::xor().param_count()
            }
            Experiment::RobotArmTrain | Experiment::RobotArmPredict => {
                MlpModel::robot_arm(self.hidden.unwrap_or(16)).param_count()
            }
            Experiment::CustomCost => self.dims.unwrap_or(1),
        }
    }

    /// Separate sampler runs: one per trajectory, or one per nested dataset.
    pub fn runs(&self) -> usize {
        match self.experiment {
            Experiment::XorEvidence => 4,
            e => e.trajectories(),
        }
    }

    /// `(L - 1) N M` partial-derivative evaluations per run.
    pub fn gradient_evals_per_run(&self) -> u64 {
        ((self.basis_size - 1) * self.dimension() * self.sweeps) as u64
    }

    /// Files a successful run writes, relative to the output directory.
    pub fn manifest(&self) -> Vec<String> {
        let mut files = vec!["diagnostics.csv".to_string()];
        files.extend((1..=self.dimension()).map(|k| format!("density_dim{k}.csv")));
        files.push("expansion.json".into());
        match self.experiment {
            Experiment::XorOptimize => files.push("refinement.csv".into()),
            Experiment::XorConvergence => {
                files.extend(["convergence.csv".into(), "convergence.json".into()])
            }
            Experiment::XorEvidence => {
                files.push("evidence.csv".into());
                files.extend((1..=4).map(|n| format!("evidence_density_n{n}.csv")));
            }
            Experiment::RobotArmTrain => files.extend([
                "dataset.csv".into(),
                "dataset.json".into(),
                "training.csv".into(),
            ]),
            Experiment::RobotArmPredict => files.extend([
                "dataset.csv".into(),
                "dataset.json".into(),
                "prediction.csv".into(),
                "histogram.csv".into(),
            ]),
            Experiment::Michalewicz | Experiment::CustomCost => {}
        }
        files.push("report.json".into());
        files
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(experiment: &str) -> RawConfig {
        RawConfig {
            experiment: Some(experiment.into()),
            ..RawConfig::default()
        }
    }

    #[test]
    fn xor_defaults() {
        let c = ExperimentConfig::resolve(raw("xor-optimize")).unwrap();
        assert_eq!((c.diffusion, c.basis_size, c.sweeps), (0.01, 200, 300));
        assert_eq!(c.seeds, vec![7, 11]);
        assert_eq!(c.dimension(), 9);
        assert_eq!(c.gradient_evals_per_run(), 199 * 9 * 300);
        assert_eq!((c.lower, c.upper), (Some(-10.0), Some(10.0)));
        assert_eq!(c.m, None);
    }

    #[test]
    fn robot_defaults() {
        let c = ExperimentConfig::resolve(raw("robot-arm-train")).unwrap();
        assert_eq!(c.dimension(), 82);
        assert_eq!((c.diffusion, c.basis_size, c.sweeps), (0.00125, 300, 300));
        assert_eq!((c.samples, c.hidden), (Some(200), Some(16)));
        let p = ExperimentConfig::resolve(raw("robot-arm-predict")).unwrap();
        assert_eq!(p.test_input, Some(ROBOT_TEST_INPUT.to_vec()));
    }

    #[test]
    fn usage_errors() {
        assert!(ExperimentConfig::resolve(raw("nope"))
            .unwrap_err()
            .contains("unknown experiment"));
        assert!(ExperimentConfig::resolve(raw("custom-cost"))
            .unwrap_err()
            .contains("cost"));
        assert!(ExperimentConfig::resolve(RawConfig {
            seeds: Some(vec![1]),
            ..raw("xor-convergence")
        })
        .is_err());
        assert!(ExperimentConfig::resolve(RawConfig {
            basis_size: Some(1),
            ..raw("michalewicz")
        })
        .is_err());
        assert!(ExperimentConfig::resolve(RawConfig {
            cost: Some("x1 +".into()),
            ..raw("custom-cost")
        })
        .is_err());
        assert!(ExperimentConfig::resolve(RawConfig {
            lower: Some(2.0),
            ..raw("custom-cost")
        })
        .is_err());
        assert!(
            serde_json::from_str::<RawConfig>(r#"{"experiment": "michalewicz", "bogus": 1}"#)
                .is_err()
        );
    }

    #[test]
    fn flags_override_file_keys() {
        let file: RawConfig =
            serde_json::from_str(r#"{"experiment": "xor-optimize", "D": 0.5, "seeds": [1, 2]}"#)
                .unwrap();
        let flags = RawConfig {
            diffusion: Some(0.02),
            seed: Some(40),
            ..RawConfig::default()
        };
        let c = ExperimentConfig::resolve(file.overridden_by(flags)).unwrap();
        assert_eq!(c.diffusion, 0.02);
        assert_eq!(c.seeds, vec![40, 41]);
    }

    #[test]
    fn custom_cost_dimension() {
        let c = ExperimentConfig::resolve(RawConfig {
            cost: Some("x1^2 + x3".into()),
            ..raw("custom-cost")
        })
        .unwrap();
        assert_eq!(c.dimension(), 3);
        let bad = RawConfig {
            cost: Some("x1^2 + x3".into()),
            dims: Some(2),
            ..raw("custom-cost")
        };
        assert!(ExperimentConfig::resolve(bad).is_err());
    }
}
