use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use sfpl::SweepOrder;
use sfpl_cli::{describe, run_experiment, CliError, ExperimentConfig, RawConfig};

/// Stationary Fokker-Planck learning experiments.
///
/// Every flag overrides the matching key of the `--config` JSON document.
#[derive(Debug, Parser)]
#[command(name = "sfpl", version)]
struct Cli {
    /// michalewicz, xor-optimize, xor-convergence, xor-evidence,
    /// robot-arm-train, robot-arm-predict or custom-cost
    experiment: Option<String>,
    #[arg(
        long = "experiment",
        value_name = "NAME",
        conflicts_with = "experiment"
    )]
    experiment_flag: Option<String>,
    /// Flat JSON configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Diffusion parameter
    #[arg(long = "D", value_name = "D")]
    diffusion: Option<f64>,
    /// Number of sine basis functions
    #[arg(long = "L", value_name = "L")]
    basis_size: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long, value_name = "T")]
    table_resolution: Option<usize>,
    /// Seed of the first trajectory; a second one uses seed + 1
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Comma-separated seeds, one per trajectory
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// cyclic or shuffled-per-sweep
    #[arg(long, value_parser = parse_order)]
    sweep_order: Option<SweepOrder>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// First sweep index of the power-law fit
    #[arg(long)]
    tail_start: Option<usize>,
    /// Michalewicz steepness
    #[arg(long)]
    m: Option<u32>,
    /// Hidden units of the robot-arm network
    #[arg(long)]
    hidden: Option<usize>,
    /// Robot-arm training samples
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    data_seed: Option<u64>,
    /// Lower bound of every coordinate
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<f64>,
    /// Upper bound of every coordinate
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<f64>,
    /// Cost expression over x1..xN, e.g. "x1^2/2 + sin(3*x2)"
    #[arg(long, allow_hyphen_values = true)]
    cost: Option<String>,
    /// Dimension of the custom cost (default: largest variable index)
    #[arg(long)]
    dims: Option<usize>,
    /// Comma-separated robot-arm test input
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    test_input: Option<Vec<f64>>,
    /// 1-based weight whose evidence sharpening is reported
    #[arg(long)]
    weight: Option<usize>,
    /// Density draws refined by steepest descent
    #[arg(long)]
    refine_draws: Option<usize>,
    /// Print the resolved plan without running
    #[arg(long)]
    describe: bool,
}

fn parse_order(s: &str) -> Result<SweepOrder, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("expected cyclic or shuffled-per-sweep, got '{s}'"))
}

impl Cli {
    fn into_raw(self) -> (Option<PathBuf>, bool, RawConfig) {
        let raw = RawConfig {
            experiment: self.experiment.or(self.experiment_flag),
            diffusion: self.diffusion,
            basis_size: self.basis_size,
            sweeps: self.sweeps,
            table_resolution: self.table_resolution,
            seed: self.seed,
            seeds: self.seeds,
            sweep_order: self.sweep_order,
            burn_in: self.burn_in,
            out: self.out,
            tail_start: self.tail_start,
            m: self.m,
            hidden: self.hidden,
            samples: self.samples,
            data_seed: self.data_seed,
            lower: self.lower,
            upper: self.upper,
            cost: self.cost,
            dims: self.dims,
            test_input: self.test_input,
            weight: self.weight,
            refine_draws: self.refine_draws,
        };
        (self.config, self.describe, raw)
    }
}

fn resolve(cli: Cli) -> Result<(bool, ExperimentConfig), CliError> {
    let (path, describe, flags) = cli.into_raw();
    let file = match path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str::<RawConfig>(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => RawConfig::default(),
    };
    let config = ExperimentConfig::resolve(file.overridden_by(flags)).map_err(CliError::Usage)?;
    Ok((describe, config))
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.status() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            return fail(&CliError::Usage(
                e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""),
            ))
        }
    };
    let (describe_only, config) = match resolve(cli) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    if describe_only {
        println!(
            "{}",
            serde_json::to_string_pretty(&describe(&config)).expect("serializable plan")
        );
        return ExitCode::SUCCESS;
    }
    match run_experiment(&config) {
        Ok(outcome) => {
            println!(
                "{} [{} files in {}]",
                outcome.summary,
                outcome.files.len(),
                config.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
