//! Fixtures shared by the benchmarks.

use sfpl::problems::{robot_arm_generate, MlpModel, SseCost};
use sfpl::{build_collocation_system, CollocationSystem, FnCost, SearchSpace, SfpConfig};

/// XOR starting point: a mid-basin state from which sweeps at `D = 0.01`
/// do not hit near-singular systems.
pub const XOR_START: [f64; 9] = [5.0, -5.0, -6.0, 6.0, -3.0, -3.0, 6.0, 6.0, -3.0];

pub fn xor_space() -> SearchSpace {
    SearchSpace::uniform(9, -10.0, 10.0).expect("valid box")
}

/// Collocation system of `x^2 / 2` on `[-1, 1]` at `D = 1`.
pub fn quadratic_system(basis_size: usize) -> CollocationSystem {
    let cost = FnCost::new(1, |x: &[f64]| x[0] * x[0] / 2.0, |x: &[f64], _| x[0]);
    let space = SearchSpace::uniform(1, -1.0, 1.0).expect("valid box");
    build_collocation_system(
        &cost,
        &[0.0],
        0,
        &SfpConfig::new(1.0, basis_size, 1, 0),
        &space,
    )
    .expect("finite gradients")
}

/// Paper-size robot-arm loss: 2-16-2 network, 200 samples.
pub fn robot_arm_cost() -> (SseCost, Vec<f64>) {
    let model = MlpModel::robot_arm(16);
    let cost = SseCost::new(model, robot_arm_generate(200, 1)).expect("matching dims");
    let w = (0..model.param_count())
        .map(|i| ((i * 7 % 13) as f64 - 6.0) / 10.0)
        .collect();
    (cost, w)
}
