use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} out of domain: {value} ({reason})")]
    Domain {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("steady state is not unique: generator kernel has dimension {kernel_dim}")]
    DegenerateSteadyState { kernel_dim: usize },

    #[error("steady-state residual {residual:e} exceeds tolerance {tolerance:e}")]
    SteadyStateResidual { residual: f64, tolerance: f64 },

    #[error("time step {dt} too large for generator norm {norm} (need dt*norm < 0.1)")]
    StepSize { dt: f64, norm: f64 },

    #[error("bracket not closed at N_max = {n_max:e}: M*R - gamma*N = {excess:e} > 0")]
    Bracket { n_max: f64, excess: f64 },

    #[error("at N = {n:e}: {source}")]
    AtOccupation {
        n: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no sign change of the threshold function in the bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn at_occupation(self, n: f64) -> Self {
        match self {
            e @ Error::AtOccupation { .. } => e,
            e => Error::AtOccupation {
                n,
                source: Box::new(e),
            },
        }
    }

    /// Strips the occupation context, if any.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtOccupation { source, .. } => source.root_cause(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
