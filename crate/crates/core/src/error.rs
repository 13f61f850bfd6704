use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level {level} exceeds the configured cap {cap}")]
    LevelTooLarge { level: u32, cap: u32 },
    #[error("level {level} is below the minimum {min} for this operation")]
    LevelTooSmall { level: u32, min: u32 },
    #[error("level mismatch: expected {expected}, got {actual}")]
    LevelMismatch { expected: u32, actual: u32 },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("invalid cell word symbol {0:?} (expected 1, 2 or 3)")]
    InvalidWordSymbol(u8),
    #[error("point ({x}, {y}) lies outside the gasket triangle")]
    PointOutsideTriangle { x: f64, y: f64 },
    #[error("point is not a vertex of the level-{level} graph")]
    NotDyadic { level: u32 },
    #[error("configuration is not stable at vertex {0}")]
    Unstable(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
