use thiserror::Error;

/// Errors raised by the sampler, the solvers and the problem definitions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SfpError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The cost produced a non-finite derivative; the stationary state is not defined.
    #[error("singular cost: non-finite derivative along coordinate {coordinate} at x = {x}")]
    SingularCost { coordinate: usize, x: f64 },

    #[error("singular cost: non-finite value at {0:?}")]
    NonFiniteCost(Vec<f64>),

    /// Pivot too small relative to the largest matrix entry. For collocation
    /// systems this usually means D is too small for the chosen basis size.
    #[error("singular linear system: pivot {pivot:e} in column {column} below {threshold:e}")]
    SingularSystem {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("{x} lies outside [{lower}, {upper}]")]
    OutOfDomain { x: f64, lower: f64, upper: f64 },

    #[error("no expansions accumulated for dimension {0}")]
    EmptyAccumulator(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sweep {sweep}, coordinate {coordinate}: {source}")]
    Sweep {
        sweep: usize,
        coordinate: usize,
        #[source]
        source: Box<SfpError>,
    },
}

pub type Result<T, E = SfpError> = std::result::Result<T, E>;
