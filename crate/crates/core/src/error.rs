use alloc::string::String;

/// Errors produced by the tracking core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input data contained non-finite values or violated a data invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An argument was outside its permitted range or had mismatched dimensions.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A tracker configuration value violated its constraint.
    #[error("invalid config value for `{key}`: {reason}")]
    InvalidConfig { key: &'static str, reason: String },

    /// The clamped crop rectangle was smaller than 2x2 pixels.
    #[error("degenerate patch: {width}x{height} pixels")]
    DegeneratePatch { width: usize, height: usize },

    /// All weights were zero after normalisation.
    #[error("degenerate weights: likelihoods sum to zero")]
    DegenerateWeights,

    /// A likelihood column carried no finite mass.
    #[error("degenerate likelihood in column {column}")]
    DegenerateLikelihood { column: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid_arg {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! invalid_input {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid_arg;
pub(crate) use invalid_input;
