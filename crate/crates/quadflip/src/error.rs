use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("edge index {0} out of range")]
    InvalidEdge(usize),
    #[error("vertex {0} is not a leaf")]
    NotALeaf(u32),
    #[error("corner {0} out of range")]
    BadCorner(usize),
    #[error("colour {0} outside 1..={1}")]
    BadColour(u8, u8),
    #[error("operation needs at least one edge")]
    EmptyTree,
    #[error("tree has a negative label")]
    NegativeLabel,
    #[error("malformed code: {0}")]
    MalformedCode(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("root rotation undefined: next edge equals the root")]
    DegenerateRotation,
    #[error("state space of {0} states exceeds ceiling {1}")]
    TooLarge(usize, usize),
    #[error("observable is constant")]
    ConstantObservable,
    #[error("position {0} is not a peak")]
    NotAPeak(usize),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
