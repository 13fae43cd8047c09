use crate::amount::Amount;
use crate::problem::AgentId;

/// A violated domain invariant, identifying the offending index where there
/// is one.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("{field} has {found} entries, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("agent identifier at index {index} must be a positive integer")]
    InvalidAgent { index: usize },
    #[error("agent {agent} appears more than once")]
    DuplicateAgent { agent: AgentId },
    #[error("claim at index {index} is negative ({value})")]
    NegativeClaim { index: usize, value: Amount },
    #[error("endowment is negative ({value})")]
    NegativeEndowment { value: Amount },
    #[error("total claims {total} fall short of the endowment {endowment}")]
    InfeasibleEndowment { total: Amount, endowment: Amount },
    #[error("total claims must be positive")]
    ZeroTotalClaims,
    #[error("award at index {index} is outside [0, claim]")]
    BoundednessViolated { index: usize },
    #[error("awards sum to {total}, endowment is {endowment}")]
    BalanceViolated { total: Amount, endowment: Amount },
    #[error("period {period}: allocation at index {index} is outside [0, claim]")]
    HistoryBoundednessViolated { period: usize, index: usize },
}

impl ValidationError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            ValidationError::LengthMismatch { .. } => "LengthMismatch",
            ValidationError::InvalidAgent { .. } => "InvalidAgent",
            ValidationError::DuplicateAgent { .. } => "DuplicateAgent",
            ValidationError::NegativeClaim { .. } => "NegativeClaim",
            ValidationError::NegativeEndowment { .. } => "NegativeEndowment",
            ValidationError::InfeasibleEndowment { .. } => "InfeasibleEndowment",
            ValidationError::ZeroTotalClaims => "ZeroTotalClaims",
            ValidationError::BoundednessViolated { .. } => "BoundednessViolated",
            ValidationError::BalanceViolated { .. } => "BalanceViolated",
            ValidationError::HistoryBoundednessViolated { .. } => "HistoryBoundednessViolated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Validation(Box<ValidationError>),
    #[error("target {target} is outside the attainable range [{low}, {high}]")]
    TargetUnreachable { target: Amount, low: Amount, high: Amount },
    #[error("endowment {endowment} lies outside the balancing window [{low}, {high}]")]
    WindowViolated {
        endowment: Amount,
        low: Amount,
        high: Amount,
    },
    #[error("rule {rule} returned an invalid allocation: {source}")]
    InvalidRuleOutput { rule: String, source: Box<ValidationError> },
    #[error("operator {operator} returned an invalid allocation: {source}")]
    InvalidOperatorOutput {
        operator: String,
        source: Box<ValidationError>,
    },
    #[error("axiom {axiom} expects a {expected} instance: {detail}")]
    SignatureMismatch {
        axiom: &'static str,
        expected: &'static str,
        detail: String,
    },
    #[error("exact path tracing is not available for rule {rule}")]
    ExactModeUnsupported { rule: String },
    #[error("traced path for rule {rule} is not piecewise linear between {from} and {to}")]
    NonLinearPath { rule: String, from: Amount, to: Amount },
    #[error("unknown {kind} name {name:?}")]
    UnknownName { kind: &'static str, name: String },
}

impl From<ValidationError> for Error {
    fn from(e: ValidationError) -> Self {
        Error::Validation(Box::new(e))
    }
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(v) => v.kind(),
            Error::TargetUnreachable { .. } => "TargetUnreachable",
            Error::WindowViolated { .. } => "WindowViolated",
            Error::InvalidRuleOutput { .. } => "InvalidRuleOutput",
            Error::InvalidOperatorOutput { .. } => "InvalidOperatorOutput",
            Error::SignatureMismatch { .. } => "SignatureMismatch",
            Error::ExactModeUnsupported { .. } => "ExactModeUnsupported",
            Error::NonLinearPath { .. } => "NonLinearPath",
            Error::UnknownName { .. } => "UnknownName",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
