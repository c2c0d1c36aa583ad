use crate::cost::CostModel;
use crate::space::SearchSpace;

/// Weights with cost about 2.6e-4 over `[-10, 10]^9`, reached by steepest
/// descent from density-drawn starting points.
pub const XOR_PUTATIVE_OPTIMUM: [f64; 9] = [
    8.22885, -8.47952, -9.87758, 9.10184, -4.55215, -5.05978, 9.98956, 9.96857, -4.91623,
];

/// Squared error of a 2-2-1 logistic network on the four XOR patterns,
/// written out term by term. `w[0..4]` are input-to-hidden weights
/// (`w[0], w[1]` feed hidden unit 1), `w[4], w[5]` hidden biases,
/// `w[6], w[7]` hidden-to-output weights and `w[8]` the output bias.
pub fn xor_cost_value(w: &[f64]) -> f64 {
    let [x1, x2, x3, x4, x5, x6, x7, x8, x9] = weights(w);
    let e = f64::exp;
    let t1 =
        (1.0 + e(-x7 / (1.0 + e(-x1 - x2 - x5)) - x8 / (1.0 + e(-x3 - x4 - x6)) - x9)).powi(-2);
    let t2 = (1.0 + e(-x7 / (1.0 + e(-x5)) - x8 / (1.0 + e(-x6)) - x9)).powi(-2);
    let t3 =
        (1.0 - 1.0 / (1.0 + e(-x7 / (1.0 + e(-x1 - x5)) - x8 / (1.0 + e(-x3 - x6)) - x9))).powi(2);
    let t4 =
        (1.0 - 1.0 / (1.0 + e(-x7 / (1.0 + e(-x2 - x5)) - x8 / (1.0 + e(-x4 - x6)) - x9))).powi(2);
    t1 + t2 + t3 + t4
}

/// Analytic `d xor_cost_value / d w[n]`.
pub fn xor_cost_partial(w: &[f64], n: usize) -> f64 {
    xor_gradient(w)[n]
}

fn weights(w: &[f64]) -> [f64; 9] {
    w.try_into().expect("XOR cost takes 9 weights")
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn xor_gradient(w: &[f64]) -> [f64; 9] {
    let w = weights(w);
    let mut g = [0.0; 9];
    // (input 1, input 2, target) read off the four terms
    for (i1, i2, target) in [
        (1.0, 1.0, 0.0),
        (0.0, 0.0, 0.0),
        (1.0, 0.0, 1.0),
        (0.0, 1.0, 1.0),
    ] {
        let h1 = logistic(w[0] * i1 + w[1] * i2 + w[4]);
        let h2 = logistic(w[2] * i1 + w[3] * i2 + w[5]);
        let out = logistic(w[6] * h1 + w[7] * h2 + w[8]);
        let dz = 2.0 * (out - target) * out * (1.0 - out);
        let da1 = dz * w[6] * h1 * (1.0 - h1);
        let da2 = dz * w[7] * h2 * (1.0 - h2);
        g[0] += da1 * i1;
        g[1] += da1 * i2;
        g[2] += da2 * i1;
        g[3] += da2 * i2;
        g[4] += da1;
        g[5] += da2;
        g[6] += dz * h1;
        g[7] += dz * h2;
        g[8] += dz;
    }
    g
}

#[derive(Debug, Clone, Copy, Default)]
pub struct XorCost;

impl XorCost {
    pub fn space() -> SearchSpace {
        SearchSpace::uniform(9, -10.0, 10.0).expect("valid bounds")
    }
}

impl CostModel for XorCost {
    fn dim(&self) -> usize {
        9
    }
    fn value(&self, x: &[f64]) -> f64 {
        xor_cost_value(x)
    }
    fn partial(&self, x: &[f64], n: usize) -> f64 {
        xor_cost_partial(x, n)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        xor_gradient(x).to_vec()
    }
}
