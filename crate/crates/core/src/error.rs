use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("{what} size {n} exceeds the supported limit of {max}")]
    SizeLimit { what: &'static str, n: usize, max: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("amplitude modulus {modulus} exceeds 1 at {at}")]
    OutsideDisc { at: String, modulus: f64 },

    #[error("label {label} out of range 1..={bound} in {context}")]
    LabelOutOfRange {
        label: usize,
        bound: usize,
        context: String,
    },

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("block structure error: {0}")]
    Block(String),

    #[error("invalid sequence expression at {path}: {rule}")]
    Structure { path: String, rule: String },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Whether this error signals an intractable request rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
