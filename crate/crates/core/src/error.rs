use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error(
        "gain cavity pole: |i·delta + kappa/2| = {magnitude:e} is too small to eliminate alpha1"
    )]
    SingularDecoupling { magnitude: f64 },

    #[error("steady-state root find did not converge: {0}")]
    NoConvergence(String),

    #[error("eigensolver did not converge")]
    EigenFailure,

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("trajectory too short: {samples} samples in the analysis window")]
    TooShort { samples: usize },

    #[error("drift matrix is not Hurwitz (max Re lambda = {max_re:e})")]
    NotHurwitz { max_re: f64 },

    #[error("Lyapunov system is ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("non-physical covariance matrix: {0}")]
    NonPhysical(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid sweep specification: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_)
                | Error::EigenFailure
                | Error::StepSizeUnderflow { .. }
                | Error::IllConditioned { .. }
                | Error::NonPhysical(_)
        )
    }

    /// Short machine-readable tag used in sweep records.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::SingularDecoupling { .. } => "singular_decoupling",
            Error::NoConvergence(_) => "no_convergence",
            Error::EigenFailure => "eigen_failure",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::TooShort { .. } => "too_short",
            Error::NotHurwitz { .. } => "not_hurwitz",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::NonPhysical(_) => "non_physical",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Spec(_) => "spec",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
