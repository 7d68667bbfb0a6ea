use std::fmt;

use thiserror::Error;

/// Which non-signalling condition a box table breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignallingViolation {
    /// Subsystem whose input choice is visible in the remaining marginal.
    pub subsystem: usize,
    /// The two input values of `subsystem` that give different marginals.
    pub inputs: (usize, usize),
    /// Joint input of all subsystems (with `subsystem` at `inputs.0`).
    pub context_inputs: Vec<usize>,
    /// Outputs of the other subsystems at which the marginals differ.
    pub context_outputs: Vec<usize>,
}

impl fmt::Display for SignallingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "marginal over subsystem {} outputs changes between its inputs {} and {} \
             (joint inputs {:?}, remaining outputs {:?})",
            self.subsystem, self.inputs.0, self.inputs.1, self.context_inputs, self.context_outputs
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("system mismatch: {0}")]
    SystemMismatch(String),

    #[error("invalid system type: {0}")]
    InvalidSystem(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("normalization failure: {0}")]
    Normalization(String),

    #[error("signalling detected: {0}")]
    Signalling(SignallingViolation),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("conditioning on a zero-probability outcome: {0}")]
    ZeroProbability(String),

    #[error("{what} needs {needed}, limit is {limit}")]
    GuardExceeded { what: String, needed: u128, limit: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("state lies outside the polytope spanned by the pure states")]
    Infeasible,

    #[error("invalid wiring: {0}")]
    InvalidWiring(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn guard(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::GuardExceeded { what: what.into(), needed, limit }
    }

    /// True for errors raised by an explicit enumeration limit.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
