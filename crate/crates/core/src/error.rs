use thiserror::Error;

/// Errors raised by tree construction, codecs and the coefficient-map algebra.
///
/// Variant names are stable: the CLI prints them verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("CycleDetected: vertex {0} never reaches the root")]
    CycleDetected(usize),
    #[error("DomainMismatch: {0}")]
    DomainMismatch(String),
    #[error("SyntaxError: {message} at byte {position}")]
    SyntaxError { message: String, position: usize },
    #[error("DuplicateLabel: label {0} occurs more than once")]
    DuplicateLabel(usize),
    #[error("NonContiguousLabels: labels must be exactly 0..{0}")]
    NonContiguousLabels(usize),
    #[error("UnknownVertex: {0}")]
    UnknownVertex(usize),
    #[error("CapExceeded: n = {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("LengthMismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("EntryOutOfRange: entry {entry} is not a label below {n}")]
    EntryOutOfRange { entry: usize, n: usize },
    #[error("ZeroCount: multiset counts must be positive")]
    ZeroCount,
    #[error("NotIncreasing: some vertex has a parent with a larger label")]
    NotIncreasing,
    #[error("InvalidPermutation: {0}")]
    InvalidPermutation(String),
    #[error("NotComposable: {0}")]
    NotComposable(String),
    #[error("NotInGroup: {0}")]
    NotInGroup(String),
    #[error("NotSubstitutable: {0}")]
    NotSubstitutable(String),
    #[error("NonInvertible: {0}")]
    NonInvertible(String),
    #[error("NotASubtree: {0}")]
    NotASubtree(String),
    #[error("OrderExceeded: order {requested} requested but only {available} available")]
    OrderExceeded { requested: usize, available: usize },
    #[error("ZeroParameter: the parameter must be nonzero")]
    ZeroParameter,
    #[error("InvalidNumber: {0}")]
    InvalidNumber(String),
}

impl Error {
    pub(crate) fn syntax(message: impl Into<String>, position: usize) -> Self {
        Error::SyntaxError {
            message: message.into(),
            position,
        }
    }

    /// The bare variant name, e.g. `"CycleDetected"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::CycleDetected(_) => "CycleDetected",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::NonContiguousLabels(_) => "NonContiguousLabels",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::EntryOutOfRange { .. } => "EntryOutOfRange",
            Error::ZeroCount => "ZeroCount",
            Error::NotIncreasing => "NotIncreasing",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::NotComposable(_) => "NotComposable",
            Error::NotInGroup(_) => "NotInGroup",
            Error::NotSubstitutable(_) => "NotSubstitutable",
            Error::NonInvertible(_) => "NonInvertible",
            Error::NotASubtree(_) => "NotASubtree",
            Error::OrderExceeded { .. } => "OrderExceeded",
            Error::ZeroParameter => "ZeroParameter",
            Error::InvalidNumber(_) => "InvalidNumber",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
