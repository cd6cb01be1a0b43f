use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A family parameter is outside the range the family is defined on.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// An argument (probability level, notion name, ...) is outside the operation's domain.
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    /// Conditioning on an event of zero probability (threshold quantile equal to one).
    #[error("degenerate conditioning at threshold quantile {0}")]
    DegenerateConditioning(f64),

    #[error("integral diverges or failed to converge: {0}")]
    Diverges(String),

    /// Two independent evaluation routes disagree beyond the cross-check tolerance.
    #[error("numerical inconsistency: {what} ({first} vs {second})")]
    NumericalInconsistency {
        what: String,
        first: f64,
        second: f64,
    },

    #[error("insufficient acceptance: {accepted} accepted samples, need at least {required}")]
    InsufficientAcceptance { accepted: usize, required: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverges(_)
                | Error::NumericalInconsistency { .. }
                | Error::InsufficientAcceptance { .. }
                | Error::DegenerateConditioning(_)
        )
    }
}
