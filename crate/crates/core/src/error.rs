use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("expected {expected} grid rows, found {found}")]
    RowCount { expected: usize, found: usize },

    #[error("line {line}: expected {expected} cells, found {found}")]
    RowLength {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: unknown cell character {ch:?}")]
    UnknownCell {
        line: usize,
        column: usize,
        ch: char,
    },

    #[error("region has no cell that is both required and placeable")]
    NoPlaceableRequired,

    #[error("region has no required cells")]
    ZeroRequiredArea,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cover depth underflow at ({x}, {y}): depth map is inconsistent with the placement")]
    DepthUnderflow { x: usize, y: usize },

    #[error("router index {index} out of range for {len} routers")]
    RouterIndex { index: usize, len: usize },

    #[error("router removal needs at least 2 routers, have {0}")]
    TooFewRouters(usize),

    #[error("router at ({x}, {y}) is not on a required, placeable cell")]
    IllegalCenter { x: usize, y: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
