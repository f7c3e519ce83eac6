use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("boson cutoff too small: {0}")]
    Cutoff(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unstable step size: {0}")]
    Stability(String),

    #[error("adaptive integration stalled at t = {t:e}: {reason}")]
    Stiffness { t: f64, reason: String },

    #[error("numerical failure at step {step}: {reason}")]
    Numerical { step: usize, reason: String },

    #[error("trajectory {index} failed: {reason}")]
    Trajectory { index: usize, reason: String },

    #[error("ensemble failed: {failed} of {total} trajectories failed (first: {first})")]
    Ensemble { failed: usize, total: usize, first: String },

    #[error("exponential fit rejected: R^2 = {r_squared:.6} < {required}")]
    FitQuality { r_squared: f64, required: f64 },

    #[error("{quantity}: {source}")]
    Quantity {
        quantity: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Stability(_)
            | Error::Stiffness { .. }
            | Error::Numerical { .. }
            | Error::Trajectory { .. }
            | Error::Ensemble { .. }
            | Error::FitQuality { .. } => true,
            Error::Quantity { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn in_quantity(self, quantity: &str) -> Error {
        Error::Quantity {
            quantity: quantity.to_string(),
            source: Box::new(self),
        }
    }
}
