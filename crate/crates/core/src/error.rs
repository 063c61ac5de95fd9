use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("derivative of order {requested} requested but only {available} available")]
    DerivativeCapability { requested: usize, available: usize },

    #[error("x = {x} is outside the domain [{x_min}, {x_max}]")]
    Domain { x: f64, x_min: f64, x_max: f64 },

    #[error("x = {x} is not a grid node of a sampled function")]
    NotGridNode { x: f64 },

    #[error("solution blew up (|U| > 1e300) at grid point {index} (x = {x})")]
    BlowUp { index: usize, x: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sequence length {actual} does not match grid count {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {what} is singular on {fraction:.1}% of the grid")]
    DegenerateInput { what: String, fraction: f64 },

    #[error("degenerate chain at step {step}: Y_{step} is singular on {fraction:.1}% of the grid")]
    DegenerateChain { step: usize, fraction: f64 },

    #[error("degenerate transformation set: the Wronskian is singular at every grid point")]
    DegenerateSet,

    #[error("invalid transformation set: {0}")]
    InvalidSet(String),

    #[error("value at x = {x} is masked (singular generator)")]
    Masked { x: f64 },
}
