use thiserror::Error;

/// Errors produced by the `vcdiam` library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("graph is disconnected: infinite diameter")]
    Disconnected,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance with {n} vertices exceeds the exhaustive-search guard of {guard}")]
    TooLarge { n: usize, guard: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid set handle {0}")]
    InvalidHandle(u32),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("duplicate point: {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("input is not a tree: {0}")]
    NotATree(String),

    #[error("point {0} lies outside the stripe band")]
    OutsideBand(usize),

    #[error("versions belong to different structures")]
    ForeignVersion,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
