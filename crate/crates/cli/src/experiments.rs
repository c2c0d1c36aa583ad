//! End-to-end experiments and the files they write.
//!
//! Each experiment writes into its output directory only; reports carry no
//! timestamps, so reruns with the same configuration are byte-identical.

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use sfpl::diagnostics::{
    boltzmann_oracle_1d, fit_geometric_rate, fit_power_law, trajectory_distance,
};
use sfpl::export::{
    write_diagnostics_csv, write_histogram_csv, write_json, write_prediction_csv,
    write_two_trajectory_csv, DensityTable, ExpansionExport, MarginalMoments, TrainingReport,
    TwoTrajectoryReport, DENSITY_POINTS,
};
use sfpl::inference::{
    bayes_predict, evidence_sharpening_experiment, sample_marginals, steepest_descent_refine,
    PosteriorSpec,
};
use sfpl::problems::{
    robot_arm_generate, robot_arm_model, Dataset, DatasetMeta, LossScale, Michalewicz, MlpModel,
    ROBOT_ARM_NOISE,
};
use sfpl::{
    marginal_moments, run_sfp, run_sfp_with, CostModel, MarginalAccumulator, RunFailure,
    SearchSpace, SfpConfig, SfpResult,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::expr::{self, ExprCost};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid invocation or configuration; nothing was written.
    Usage(String),
    /// The experiment failed while running; partial outputs are kept.
    Runtime(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Runtime(m) => ("runtime", m),
        };
        json!({ "error": kind, "message": message, "status": self.status() })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// A finished experiment: the one-line summary and the files written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<String>,
}

struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    ) -> Result<(), String> {
        let path = self.dir.join(name);
        let result = File::create(&path).and_then(|f| {
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()
        });
        result.map_err(|e| format!("writing {}: {e}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), String> {
        self.write(name, |w| write_json(w, value))
    }
}

/// Resolved plan: configuration, dimension, gradient-evaluation estimate and file manifest.
pub fn describe(config: &ExperimentConfig) -> Value {
    let per_run = config.gradient_evals_per_run();
    json!({
        "config": config,
        "N": config.dimension(),
        "runs": config.runs(),
        "gradient_evals_per_run": per_run,
        "gradient_evals_formula": format!("{}*{}*{}", config.basis_size - 1, config.dimension(), config.sweeps),
        "gradient_evals_total": per_run * config.runs() as u64,
        "files": config.manifest(),
    })
}

/// Runs the experiment, writing into `config.out`. On a runtime failure the
/// outputs produced so far are kept and `error.json` is added.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&config.out)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", config.out.display())))?;
    let mut out = Output {
        dir: config.out.clone(),
        written: vec![],
    };
    let result = match config.experiment {
        Experiment::Michalewicz => michalewicz(config, &mut out),
        Experiment::XorOptimize | Experiment::XorConvergence => xor_pair(config, &mut out),
        Experiment::XorEvidence => xor_evidence(config, &mut out),
        Experiment::RobotArmTrain => robot_arm_train(config, &mut out),
        Experiment::RobotArmPredict => robot_arm_predict(config, &mut out),
        Experiment::CustomCost => custom_cost(config, &mut out),
    };
    match result {
        Ok(summary) => Ok(Outcome {
            summary,
            files: out.written,
        }),
        Err(message) => {
            let err = CliError::Runtime(message);
            // best effort: the original failure is what gets reported
            let _ = out.json("error.json", &err.to_json());
            Err(err)
        }
    }
}

/// One sampler trajectory with the cost at its post-sweep states.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: u64,
    pub run: SfpResult,
    pub state_costs: Vec<f64>,
}

pub fn run_trajectory<C: CostModel + ?Sized>(
    cost: &C,
    space: &SearchSpace,
    config: &SfpConfig,
) -> Result<Trajectory, RunFailure> {
    let mut state_costs = Vec::with_capacity(config.sweeps);
    let run = run_sfp_with(cost, space, config, |_, state| {
        state_costs.push(cost.value(&state.x))
    })?;
    Ok(Trajectory {
        seed: config.seed,
        run,
        state_costs,
    })
}

/// Independent trajectories, one thread each.
pub fn run_trajectories<C: CostModel + ?Sized>(
    cost: &C,
    space: &SearchSpace,
    configs: &[SfpConfig],
) -> Vec<Result<Trajectory, RunFailure>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| s.spawn(move || run_trajectory(cost, space, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trajectory thread panicked"))
            .collect()
    })
}

/// Sweeps over which the early geometric decay rate is fitted.
pub const GEOMETRIC_WINDOW: usize = 100;

/// `|s1 - s2|` per sweep with its geometric-rate and tail power-law fits.
pub fn convergence_report(
    s1: &[f64],
    s2: &[f64],
    tail_start: usize,
) -> (Vec<f64>, TwoTrajectoryReport) {
    let distance = trajectory_distance(s1, s2).unwrap_or_default();
    let geometric_rate = fit_geometric_rate(&distance, GEOMETRIC_WINDOW)
        .ok()
        .map(|(r, _)| r);
    let power = fit_power_law(&distance, tail_start).ok();
    let dropped_zeros = distance
        .iter()
        .skip(tail_start)
        .filter(|&&d| d <= 0.0)
        .count();
    let report = TwoTrajectoryReport {
        geometric_rate,
        power_exponent: power.map(|f| f.slope),
        tail_start,
        dropped_zeros,
    };
    (distance, report)
}

/// Local refinement of the best of `draws` points drawn from the learned marginals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub draws: usize,
    #[serde(skip)]
    pub draw_points: Vec<Vec<f64>>,
    pub draw_costs: Vec<f64>,
    pub best_draw: Vec<f64>,
    pub best_draw_cost: f64,
    pub point: Vec<f64>,
    pub cost: f64,
}

pub fn refine_best_draw<C: CostModel + ?Sized>(
    cost: &C,
    space: &SearchSpace,
    acc: &MarginalAccumulator,
    draws: usize,
    seed: u64,
    resolution: usize,
) -> Result<Refinement, String> {
    let points = sample_marginals(acc, draws, resolution, seed).map_err(|e| e.to_string())?;
    let draw_costs: Vec<f64> = points.iter().map(|p| cost.value(p)).collect();
    let best = (0..points.len())
        .min_by(|&a, &b| draw_costs[a].total_cmp(&draw_costs[b]))
        .ok_or("no draws to refine")?;
    let (point, value) =
        steepest_descent_refine(cost, space, &points[best], 10.0, 0.5, 1e-12, 200_000)
            .map_err(|e| format!("refinement: {e}"))?;
    Ok(Refinement {
        draws,
        best_draw: points[best].clone(),
        best_draw_cost: draw_costs[best],
        draw_points: points,
        draw_costs,
        point,
        cost: value,
    })
}

fn diagnostics_lines(result: &SfpResult) -> Result<Vec<String>, String> {
    let mut buf = Vec::new();
    write_diagnostics_csv(&mut buf, result.accumulator.dims(), &result.records)
        .map_err(|e| e.to_string())?;
    Ok(String::from_utf8(buf)
        .expect("ascii csv")
        .lines()
        .map(str::to_string)
        .collect())
}

/// Diagnostics of several runs in one table, keyed by a leading column.
fn write_merged_diagnostics(
    out: &mut Output,
    key: &str,
    runs: &[(u64, &SfpResult)],
) -> Result<(), String> {
    let mut lines = Vec::new();
    for (i, (label, result)) in runs.iter().enumerate() {
        let rows = diagnostics_lines(result)?;
        if i == 0 {
            lines.push(format!("{key},{}", rows[0]));
        }
        lines.extend(rows[1..].iter().map(|r| format!("{label},{r}")));
    }
    out.write("diagnostics.csv", |w| {
        lines.iter().try_for_each(|l| writeln!(w, "{l}"))
    })
}

/// Density tables of every accumulated coordinate plus the expansion export.
fn write_marginals(out: &mut Output, result: &SfpResult, config: &SfpConfig) -> Result<(), String> {
    let acc = &result.accumulator;
    for n in 0..acc.dims() {
        if let Ok(marginal) = acc.marginal(n) {
            let table = DensityTable::new(&marginal, DENSITY_POINTS);
            out.write(&format!("density_dim{}.csv", n + 1), |w| table.write_csv(w))?;
        }
    }
    out.json("expansion.json", &ExpansionExport::new(acc, config))
}

fn write_single_run(
    out: &mut Output,
    result: &SfpResult,
    config: &SfpConfig,
) -> Result<(), String> {
    let lines = diagnostics_lines(result)?;
    out.write("diagnostics.csv", |w| {
        lines.iter().try_for_each(|l| writeln!(w, "{l}"))
    })?;
    write_marginals(out, result, config)
}

/// Unwraps a single run, saving the partial outputs of a failed one.
fn settle(
    out: &mut Output,
    result: Result<SfpResult, RunFailure>,
    config: &SfpConfig,
) -> Result<SfpResult, String> {
    result.map_err(|failure| {
        let _ = write_single_run(out, &failure.partial, config);
        failure.error.to_string()
    })
}

/// Unwraps paired trajectories; if either failed, saves what both produced.
fn settle_pair(
    out: &mut Output,
    results: Vec<Result<Trajectory, RunFailure>>,
    config: &SfpConfig,
) -> Result<Vec<Trajectory>, String> {
    if results.iter().all(Result::is_ok) {
        return Ok(results.into_iter().map(Result::unwrap).collect());
    }
    let mut errors = Vec::new();
    let runs: Vec<(u64, &SfpResult)> = results
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            Ok(t) => (i as u64 + 1, &t.run),
            Err(f) => {
                errors.push(format!("trajectory {}: {}", i + 1, f.error));
                (i as u64 + 1, &*f.partial)
            }
        })
        .collect();
    let _ = write_merged_diagnostics(out, "trajectory", &runs);
    let _ = write_marginals(out, runs[0].1, config);
    Err(errors.join("; "))
}

fn moments(acc: &MarginalAccumulator) -> Vec<MarginalMoments> {
    (0..acc.dims())
        .filter_map(|n| marginal_moments(acc, n).ok())
        .map(|(mean, std)| MarginalMoments { mean, std })
        .collect()
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
    format!("({})", parts.join(", "))
}

/// Sup-norm distance of each learned marginal CDF of the separable
/// Michalewicz cost from the quadrature Boltzmann CDF.
pub fn michalewicz_oracle_errors(
    cost: &Michalewicz,
    acc: &MarginalAccumulator,
    diffusion: f64,
) -> Result<Vec<f64>, String> {
    (0..2)
        .map(|n| {
            let (lo, hi) = acc.bounds(n);
            let oracle = boltzmann_oracle_1d(|x| cost.term(n, x), diffusion, lo, hi, 20_001)
                .map_err(|e| e.to_string())?;
            let marginal = acc.marginal(n).map_err(|e| e.to_string())?;
            Ok(oracle
                .grid
                .iter()
                .zip(&oracle.cdf)
                .map(|(&x, &c)| (marginal.jet(x).value - c).abs())
                .fold(0.0, f64::max))
        })
        .collect()
}

fn michalewicz(config: &ExperimentConfig, out: &mut Output) -> Result<String, String> {
    let cost = Michalewicz::new(config.m.unwrap_or(10));
    let sfp = config.sfp_config(config.seeds[0]);
    let run = settle(out, run_sfp(&cost, &Michalewicz::space(), &sfp), &sfp)?;
    write_single_run(out, &run, &sfp)?;
    let record = run.last_record().expect("complete run");
    let oracle_linf = michalewicz_oracle_errors(&cost, &run.accumulator, config.diffusion)?;
    out.json(
        "report.json",
        &json!({
            "config": config,
            "argmax": record.argmax,
            "cost_at_argmax": record.cost_at_argmax,
            "gradient_evals": run.gradient_evals,
            "oracle_linf": oracle_linf,
            "moments": moments(&run.accumulator),
        }),
    )?;
    Ok(format!(
        "michalewicz: marginal argmax {} cost {:.6}, oracle CDF error {}, {} gradient evals",
        fmt_point(&record.argmax),
        record.cost_at_argmax,
        fmt_point(&oracle_linf),
        run.gradient_evals
    ))
}

fn xor_space(config: &ExperimentConfig) -> SearchSpace {
    SearchSpace::uniform(
        9,
        config.lower.unwrap_or(-10.0),
        config.upper.unwrap_or(10.0),
    )
    .expect("validated bounds")
}

fn pair_configs(config: &ExperimentConfig) -> Vec<SfpConfig> {
    config.seeds.iter().map(|&s| config.sfp_config(s)).collect()
}

fn xor_pair(config: &ExperimentConfig, out: &mut Output) -> Result<String, String> {
    let cost = sfpl::problems::XorCost;
    let space = xor_space(config);
    let configs = pair_configs(config);
    let pair = settle_pair(out, run_trajectories(&cost, &space, &configs), &configs[0])?;
    let runs: Vec<(u64, &SfpResult)> = pair
        .iter()
        .enumerate()
        .map(|(i, t)| (i as u64 + 1, &t.run))
        .collect();
    write_merged_diagnostics(out, "trajectory", &runs)?;
    write_marginals(out, &pair[0].run, &configs[0])?;

    let finals: Vec<f64> = pair
        .iter()
        .map(|t| t.run.last_record().expect("complete run").cost_at_argmax)
        .collect();
    let trajectories: Vec<Value> = pair
        .iter()
        .map(|t| {
            let r = t.run.last_record().expect("complete run");
            json!({ "seed": t.seed, "final_cost": r.cost_at_argmax, "argmax": r.argmax, "gradient_evals": t.run.gradient_evals })
        })
        .collect();
    let cost_difference = (finals[0] - finals[1]).abs();

    if config.experiment == Experiment::XorOptimize {
        let draws = config.refine_draws.unwrap_or(50);
        let refinement = refine_best_draw(
            &cost,
            &space,
            &pair[0].run.accumulator,
            draws,
            config.seeds[0],
            config.table_resolution,
        )?;
        out.write("refinement.csv", |w| {
            write!(w, "draw,cost")?;
            (1..=9).try_for_each(|k| write!(w, ",w{k}"))?;
            writeln!(w)?;
            for (i, (p, c)) in refinement
                .draw_points
                .iter()
                .zip(&refinement.draw_costs)
                .enumerate()
            {
                write!(w, "{},{c}", i + 1)?;
                p.iter().try_for_each(|v| write!(w, ",{v}"))?;
                writeln!(w)?;
            }
            Ok(())
        })?;
        out.json(
            "report.json",
            &json!({
                "config": config,
                "trajectories": trajectories,
                "cost_difference": cost_difference,
                "refinement": refinement,
            }),
        )?;
        Ok(format!(
            "xor-optimize: final costs {} (difference {:.2e}), refined best of {} draws to {:.3e}",
            fmt_point(&finals),
            cost_difference,
            draws,
            refinement.cost
        ))
    } else {
        let tail_start = config.tail_start.unwrap_or(100);
        let s: Vec<Vec<f64>> = pair
            .iter()
            .map(|t| t.run.records.iter().map(|r| r.s).collect())
            .collect();
        let (_, report) = convergence_report(&s[0], &s[1], tail_start);
        out.write("convergence.csv", |w| {
            write_two_trajectory_csv(w, &s[0], &s[1])
        })?;
        out.json("convergence.json", &report)?;
        out.json(
            "report.json",
            &json!({
                "config": config,
                "trajectories": trajectories,
                "cost_difference": cost_difference,
                "convergence": report,
            }),
        )?;
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
        Ok(format!(
            "xor-convergence: tail exponent {} from sweep {}, early geometric rate {}, final costs {}",
            show(report.power_exponent),
            tail_start,
            show(report.geometric_rate),
            fmt_point(&finals)
        ))
    }
}

/// Nested XOR training sets of sizes 1 to 4.
pub fn xor_nested_datasets() -> Vec<Dataset> {
    (1..=4).map(Dataset::xor_prefix).collect()
}

fn xor_evidence(config: &ExperimentConfig, out: &mut Output) -> Result<String, String> {
    let space = xor_space(config);
    let sfp = config.sfp_config(config.seeds[0]);
    let weight = config.weight.unwrap_or(5) - 1;
    let peaks = evidence_sharpening_experiment(
        &MlpModel::xor(),
        &xor_nested_datasets(),
        &space,
        &sfp,
        weight,
    )
    .map_err(|failure| {
        let _ = write_single_run(out, &failure.partial, &sfp);
        failure.error.to_string()
    })?;
    let runs: Vec<(u64, &SfpResult)> = peaks.iter().map(|p| (p.samples as u64, &p.run)).collect();
    write_merged_diagnostics(out, "samples", &runs)?;
    let full = peaks.last().expect("four datasets");
    write_marginals(out, &full.run, &sfp)?;
    out.write("evidence.csv", |w| {
        writeln!(w, "samples,peak,argmax")?;
        peaks
            .iter()
            .try_for_each(|p| writeln!(w, "{},{},{}", p.samples, p.peak, p.argmax))
    })?;
    for p in &peaks {
        let table = DensityTable::new(&p.marginal, DENSITY_POINTS);
        out.write(&format!("evidence_density_n{}.csv", p.samples), |w| {
            table.write_csv(w)
        })?;
    }
    let summary: Vec<Value> = peaks
        .iter()
        .map(|p| json!({ "samples": p.samples, "peak": p.peak, "argmax": p.argmax }))
        .collect();
    let heights: Vec<f64> = peaks.iter().map(|p| p.peak).collect();
    out.json(
        "report.json",
        &json!({
            "config": config,
            "weight": weight + 1,
            "uniform_height": 1.0 / space.width(weight),
            "peaks": summary,
        }),
    )?;
    Ok(format!(
        "xor-evidence: peak density of w{} for 1..4 samples {}",
        weight + 1,
        fmt_point(&heights)
    ))
}

fn robot_dataset(
    config: &ExperimentConfig,
    out: &mut Output,
) -> Result<(Dataset, PosteriorSpec), String> {
    let samples = config.samples.unwrap_or(200);
    let data_seed = config.data_seed.unwrap_or(1);
    let data = robot_arm_generate(samples, data_seed);
    out.write("dataset.csv", |w| data.write_csv(w))?;
    out.json(
        "dataset.json",
        &DatasetMeta {
            seed: data_seed,
            sigma: ROBOT_ARM_NOISE,
            n: samples,
        },
    )?;
    let model = MlpModel::robot_arm(config.hidden.unwrap_or(16));
    let prior = SearchSpace::uniform(
        model.param_count(),
        config.lower.unwrap_or(-1.0),
        config.upper.unwrap_or(1.0),
    )
    .expect("validated bounds");
    // per-sample loss: with the summed loss the conditionals at this D are far
    // narrower than the collocation grid
    let spec = PosteriorSpec::with_diffusion(model, data.clone(), prior, config.diffusion)
        .map_err(|e| e.to_string())?
        .with_loss_scale(LossScale::PerSample);
    Ok((data, spec))
}

/// Running mean over sweeps of the training error `V(w_t)`.
pub fn running_training_error(state_costs: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    state_costs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            sum += c;
            sum / (i + 1) as f64
        })
        .collect()
}

fn robot_arm_train(config: &ExperimentConfig, out: &mut Output) -> Result<String, String> {
    let (_, spec) = robot_dataset(config, out)?;
    let cost = spec.cost();
    let configs = pair_configs(config);
    let pair = settle_pair(
        out,
        run_trajectories(&cost, &spec.prior, &configs),
        &configs[0],
    )?;
    let runs: Vec<(u64, &SfpResult)> = pair
        .iter()
        .enumerate()
        .map(|(i, t)| (i as u64 + 1, &t.run))
        .collect();
    write_merged_diagnostics(out, "trajectory", &runs)?;
    write_marginals(out, &pair[0].run, &configs[0])?;

    let errs: Vec<Vec<f64>> = pair
        .iter()
        .map(|t| running_training_error(&t.state_costs))
        .collect();
    let diff: Vec<f64> = errs[0]
        .iter()
        .zip(&errs[1])
        .map(|(a, b)| (a - b).abs())
        .collect();
    out.write("training.csv", |w| {
        writeln!(w, "sweep,err1,err2,abs_diff")?;
        (0..diff.len())
            .try_for_each(|i| writeln!(w, "{},{},{},{}", i + 1, errs[0][i], errs[1][i], diff[i]))
    })?;
    let half_d = config.diffusion / 2.0;
    let first_within = diff.iter().position(|&d| d <= 3.0 * half_d).map(|i| i + 1);
    let reports: Vec<Value> = pair
        .iter()
        .zip(&configs)
        .map(|(t, c)| {
            let w = &t.run.last_record().expect("complete run").argmax;
            json!({ "seed": t.seed, "training": TrainingReport::new(c, w, &t.run.records, &t.run.accumulator) })
        })
        .collect();
    out.json(
        "report.json",
        &json!({
            "config": config,
            "N": spec.prior.dims(),
            "diffusion_source": spec.diffusion_source,
            "loss_scale": spec.loss_scale,
            "trajectories": reports,
            "equilibrium": {
                "half_D": half_d,
                "abs_diff_at_sweep_10": diff.get(9),
                "first_sweep_within_3_half_D": first_within,
            },
        }),
    )?;
    Ok(format!(
        "robot-arm-train: final training errors {} per sample, |difference| {:.3e} (D/2 = {:.3e})",
        fmt_point(&[errs[0][errs[0].len() - 1], errs[1][errs[1].len() - 1]]),
        diff[diff.len() - 1],
        half_d
    ))
}

fn robot_arm_predict(config: &ExperimentConfig, out: &mut Output) -> Result<String, String> {
    let (_, spec) = robot_dataset(config, out)?;
    let sfp = config.sfp_config(config.seeds[0]);
    let input = config
        .test_input
        .clone()
        .unwrap_or_else(|| crate::config::ROBOT_TEST_INPUT.to_vec());
    let (summary, run) = bayes_predict(&spec, &sfp, &input).map_err(|failure| {
        let _ = write_single_run(out, &failure.partial, &sfp);
        failure.error.to_string()
    })?;
    write_single_run(out, &run, &sfp)?;
    out.write("prediction.csv", |w| write_prediction_csv(w, &summary))?;
    out.write("histogram.csv", |w| write_histogram_csv(w, &summary))?;
    let truth = robot_arm_model(input[0], input[1]);
    let (mean, std) = (summary.means(), summary.stds());
    out.json(
        "report.json",
        &json!({
            "config": config,
            "test_input": input,
            "loss_scale": spec.loss_scale,
            "noiseless_truth": truth,
            "mean": mean,
            "std": std,
            "samples": summary.outputs.iter().map(|o| &o.samples).collect::<Vec<_>>(),
            "histogram": summary.outputs.iter().map(|o| &o.histogram).collect::<Vec<_>>(),
        }),
    )?;
    Ok(format!(
        "robot-arm-predict: mean {} std {} at {}, noiseless truth {}",
        fmt_point(&mean),
        fmt_point(&std),
        fmt_point(&input),
        fmt_point(&truth)
    ))
}

fn custom_cost(config: &ExperimentConfig, out: &mut Output) -> Result<String, String> {
    let src = config.cost.as_deref().expect("resolved");
    let dims = config.dimension();
    let cost = ExprCost::new(expr::parse(src).map_err(|e| e.to_string())?, dims)?;
    let space = SearchSpace::uniform(
        dims,
        config.lower.unwrap_or(-1.0),
        config.upper.unwrap_or(1.0),
    )
    .expect("validated bounds");
    let sfp = config.sfp_config(config.seeds[0]);
    let run = settle(out, run_sfp(&cost, &space, &sfp), &sfp)?;
    write_single_run(out, &run, &sfp)?;
    let record = run.last_record().expect("complete run");
    out.json(
        "report.json",
        &json!({
            "config": config,
            "argmax": record.argmax,
            "cost_at_argmax": record.cost_at_argmax,
            "gradient_evals": run.gradient_evals,
            "moments": moments(&run.accumulator),
        }),
    )?;
    Ok(format!(
        "custom-cost: marginal argmax {} cost {:.6}, {} gradient evals",
        fmt_point(&record.argmax),
        record.cost_at_argmax,
        run.gradient_evals
    ))
}
