use thiserror::Error;

use crate::params::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", join_violations(.0))]
    Config(Vec<Violation>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis truncation: |a_l| = {edge_amplitude:.3e} at l = ±{l_max} (need < 1e-14)")]
    BasisTruncation { l_max: usize, edge_amplitude: f64 },

    #[error("basis too small: trace drifted by {drift:.3e} during kick")]
    BasisLeak { drift: f64 },

    #[error("positivity violation: eigenvalue {eigenvalue:.3e}")]
    PositivityViolation { eigenvalue: f64 },

    #[error("dimension mismatch: density matrix {rho} vs kick matrix {kick}")]
    DimensionMismatch { rho: usize, kick: usize },

    #[error("Husimi evaluation error: value {value:.3e} is negative beyond tolerance")]
    HusimiNegative { value: f64 },

    #[error("p-grid too small: {mass:.3e} of the mass reached the p boundary")]
    GridOverflow { mass: f64 },

    #[error("mass drift {drift:.3e} exceeds tolerance")]
    MassDrift { drift: f64 },

    #[error("infinite product did not converge within {max_terms} terms")]
    ProductNonConvergence { max_terms: u64 },

    #[error("window too small: {points} points, need at least {required}")]
    WindowTooSmall { points: usize, required: usize },

    #[error("mismatched series: {0}")]
    MismatchedSeries(String),

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("at kick {kick}: {source}")]
    AtKick {
        kick: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_kick(self, kick: usize) -> Self {
        Error::AtKick {
            kick,
            source: Box::new(self),
        }
    }

    /// Strips any kick annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtKick { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for configuration and argument errors, false for numerical failures.
    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Config(_) | Error::InvalidArgument(_) | Error::BasisTruncation { .. }
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
