use thiserror::Error;

/// Errors raised while reading hypergraph text or constructing edge sets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected \"n m\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed edge, expected three vertex indices")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: repeated vertex {vertex} inside an edge")]
    RepeatedVertex { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {edge:?}")]
    DuplicateEdge { line: usize, edge: [usize; 3] },
    #[error("header announces {expected} edges but {found} were given")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Other { line: usize, message: String },
}

/// Errors shared by the search and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TuranError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{what}: size {value} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        bound: usize,
    },
    #[error("edge {0:?} is not present")]
    MissingEdge([usize; 3]),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T, E = TuranError> = std::result::Result<T, E>;

pub(crate) fn check_bound(what: &'static str, value: usize, bound: usize) -> Result<()> {
    if value > bound {
        Err(TuranError::BoundExceeded { what, value, bound })
    } else {
        Ok(())
    }
}
