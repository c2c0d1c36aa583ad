//! Benchmark costs and the small neural-network models used for inference.

mod dataset;
mod michalewicz;
mod mlp;
mod robot_arm;
mod xor;

pub use dataset::{Dataset, DatasetMeta};
pub use michalewicz::{michalewicz_partial, michalewicz_value, Michalewicz};
pub use mlp::{mlp_forward, sse_grad, sse_loss, Activation, LossScale, MlpModel, SseCost};
pub use robot_arm::{robot_arm_generate, robot_arm_model, ROBOT_ARM_NOISE, X1_SUPPORT, X2_SUPPORT};
pub use xor::{xor_cost_partial, xor_cost_value, XorCost, XOR_PUTATIVE_OPTIMUM};
