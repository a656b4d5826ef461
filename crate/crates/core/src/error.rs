use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("enumeration budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },

    #[error("operation undefined on the empty set: {0}")]
    EmptySet(&'static str),

    #[error("quadrature order must be at least 1, got {0}")]
    QuadratureOrder(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("balls do not cover the cube; uncovered point {point:?}")]
    Uncovered { point: Vec<String> },

    #[error("cube is contained in the doubled ball {ball}")]
    CubeInsideDoubledBall { ball: usize },

    #[error("depth budget {budget} exhausted at sub-interval [{lo}, {hi}]")]
    DepthExhausted { budget: u32, lo: String, hi: String },

    #[error("could not place any ball after {attempts} attempts")]
    NoPlacement { attempts: usize },

    #[error("no admissible test set at radius {radius}")]
    EmptyFamily { radius: f64 },

    #[error("control function is not strictly increasing near x = {x} (h = {h})")]
    NotIncreasing { x: f64, h: f64 },

    #[error("adaptive integration did not stabilize within {budget} evaluations")]
    NoStabilization { budget: usize },

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// True for the errors that mean "out of budget" rather than "bad input".
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. } | Error::DepthExhausted { .. } | Error::NoStabilization { .. }
        )
    }
}
