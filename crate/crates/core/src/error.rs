use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackError {
    #[error("degenerate piece {width} x {height}: both sides must be positive")]
    DegeneratePiece { width: f64, height: f64 },

    #[error("empty packing")]
    EmptyPacking,

    #[error("empty stream")]
    EmptyStream,

    #[error("bricks of levels {0} and {1} cannot be compared")]
    LevelMismatch(i32, i32),

    #[error("brick has no room for the piece")]
    NoRoom,

    #[error("piece of width {width} does not fit a box of width {box_width}")]
    PieceTooWide { width: f64, box_width: f64 },

    #[error("instance too large for exact oracle: {0}")]
    InstanceTooLarge(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
