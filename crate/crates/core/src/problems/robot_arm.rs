use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::Dataset;

/// Standard deviation of the additive Gaussian output noise.
pub const ROBOT_ARM_NOISE: f64 = 0.1;
/// Positive half of the `x1` support; the negative half is its mirror image.
pub const X1_SUPPORT: (f64, f64) = (0.453, 1.932);
// the published support bound, rounded; not meant as pi
#[allow(clippy::approx_constant)]
pub const X2_SUPPORT: (f64, f64) = (0.534, 3.142);

/// Noiseless arm end position for joint angles `(x1, x2)`.
pub fn robot_arm_model(x1: f64, x2: f64) -> [f64; 2] {
    [
        2.0 * x1.cos() + 1.3 * (x1 + x2).cos(),
        2.0 * x1.sin() + 1.3 * (x1 + x2).sin(),
    ]
}

/// `n` noisy samples with `x1` uniform on `[-1.932, -0.453] U [0.453, 1.932]`
/// and `x2` uniform on `[0.534, 3.142]`.
pub fn robot_arm_generate(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, ROBOT_ARM_NOISE).expect("positive sigma");
    let half = X1_SUPPORT.1 - X1_SUPPORT.0;
    let mut inputs = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        // uniform over the union: draw an offset over both halves' total length
        let u = rng.random_range(0.0..2.0 * half);
        let x1 = if u < half {
            -X1_SUPPORT.1 + u
        } else {
            X1_SUPPORT.0 + (u - half)
        };
        let x2 = rng.random_range(X2_SUPPORT.0..=X2_SUPPORT.1);
        let [y1, y2] = robot_arm_model(x1, x2);
        inputs.push(vec![x1, x2]);
        targets.push(vec![
            y1 + noise.sample(&mut rng),
            y2 + noise.sample(&mut rng),
        ]);
    }
    Dataset::with_dims(inputs, targets, ROBOT_ARM_NOISE, 2, 2).expect("consistent shapes")
}
