use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a network needs at least 2 layers, got {0}")]
    TooFewLayers(usize),

    #[error("layer {layer} has width {width}; widths must be positive")]
    BadWidth { layer: usize, width: usize },

    #[error("connection ({0}, {1}) is invalid: need 0 <= j < l <= L")]
    BadPair(usize, usize),

    #[error("connection ({0}, {1}) is listed more than once")]
    DuplicatePair(usize, usize),

    #[error("missing consecutive connection ({0}, {next}); the network must have a unique underlying path", next = .0 + 1)]
    MissingConsecutivePair(usize),

    #[error("bad weight entry {key:?}: {reason}")]
    BadWeight { key: String, reason: String },

    #[error("path enumeration exceeded the guard of {0} paths")]
    PathCountGuardExceeded(usize),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("expected a network without skip connections; found ({0}, {1})")]
    NotChain(usize, usize),

    #[error("substructure selection reached rank {reached} of {target}")]
    RankShortfall { reached: usize, target: usize },

    #[error("linear system is inconsistent; the candidate set does not span the path")]
    Inconsistent,
}
