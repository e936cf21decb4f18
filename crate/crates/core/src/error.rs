use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse number {input:?}: {reason}")]
    ParseNumber { input: String, reason: String },

    #[error("cannot parse word {input:?}: {reason}")]
    ParseWord { input: String, reason: String },

    #[error("point {0} lies outside {1}")]
    OutOfRange(String, &'static str),

    #[error("tuple entries must be strictly increasing")]
    NotIncreasing,

    #[error("tuples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("interval endpoints must satisfy lo < hi (got {0} and {1})")]
    EmptyInterval(String, String),

    #[error("element must be nontrivial")]
    TrivialElement,

    #[error("invalid PL map: {0}")]
    InvalidMap(String),

    #[error("schema violation at {location}: {message}")]
    Schema { location: String, message: String },

    #[error("graph computed to radius {computed}, but radius {required} is needed")]
    InsufficientRadius { required: u32, computed: u32 },

    #[error("vertex {0} is not part of the graph")]
    UnknownVertex(usize),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("malformed subgroup data: {0}")]
    MalformedOracle(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            location: location.into(),
            message: message.into(),
        }
    }
}
