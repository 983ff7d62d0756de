use thiserror::Error;

use crate::inference::FitDiagnostics;
use crate::quadrature::QuadratureFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid rate {0}: must be finite and lie in (0, 1e6]")]
    InvalidRate(f64),

    #[error("probability {0} must lie strictly between 0 and 1")]
    InvalidProbability(f64),

    #[error("confidence level {0} must lie strictly between 0 and 1")]
    InvalidLevel(f64),

    #[error("sample is empty")]
    EmptySample,

    #[error("observation {value} at position {index} is not a positive finite number")]
    InvalidObservation { index: usize, value: f64 },

    #[error("sample '{label}' has {len} observation(s); inference needs at least 2")]
    TooFewObservations { label: String, len: usize },

    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureFailure),

    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(FitDiagnostics),

    #[error("fit of the {which} sample failed: {source}")]
    SampleFit {
        which: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("every replication of cell (n={n}, m={m}) failed")]
    CellFailed { n: usize, m: usize },
}
