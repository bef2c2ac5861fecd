//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A derivative pushed a jet coordinate past the configured truncation
    /// order. The jet order of the theory is too small for the computation.
    #[error("jet truncation overflow: requested order {requested} exceeds configured order {max}")]
    TruncationOverflow { requested: u32, max: u32 },

    #[error("undeclared variable: {0}")]
    UndeclaredVariable(String),

    #[error("non-integer exponent")]
    NonIntegerExponent,

    #[error("negative power of a non-constant expression")]
    NegativePower,

    #[error("division by a non-constant expression")]
    NonConstantDivisor,

    #[error("division by zero")]
    DivisionByZero,

    #[error("field sample is missing component `{0}`")]
    MissingComponent(String),

    #[error("grid resolution insufficient for derivative order {order} ({points} points along axis {axis})")]
    GridResolution { order: u32, points: usize, axis: usize },

    #[error("grid samples for `{0}` do not match the declared lattice")]
    GridShape(String),

    #[error("slice x{axis} = {value} lies outside the grid bounding box")]
    SliceOutsideGrid { axis: usize, value: f64 },

    #[error("{0}")]
    Validation(String),

    /// An internal consistency guard failed; indicates a bug, not bad input.
    #[error("internal verification failed: {0}")]
    InternalCheck(String),

    #[error("homotopy operator inapplicable: {0}; supply the primitive manually")]
    HomotopyInapplicable(String),

    #[error("hamiltonian pair failed verification: residual {0}")]
    UnverifiedPair(String),

    #[error("numeric evaluation impossible: {0}")]
    NumericEval(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CoreError::Validation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CoreError::InternalCheck(msg.into())
    }
}
