use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid support box: {0}")]
    InvalidBox(String),

    #[error("invalid plane point ({alpha}, {beta}): {reason}")]
    InvalidPoint {
        alpha: f64,
        beta: f64,
        reason: &'static str,
    },

    #[error("invalid memory interface: {0}")]
    InvalidInterface(String),

    #[error("interface support box does not contain the weighting support")]
    SupportMismatch,

    #[error("invalid weighting grid: {0}")]
    InvalidGrid(String),

    #[error("grid file line {line}: {message}")]
    GridParse { line: usize, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("weighting support does not intersect the quadrant alpha >= 0, beta <= 0")]
    EmptyIntersection,

    #[error("invalid Q region: {0}")]
    InvalidQRegion(String),

    #[error("weighting is negative on Q at ({alpha}, {beta}): {value}")]
    NegativeOnQ { alpha: f64, beta: f64, value: f64 },

    #[error("invalid butterfly parameters: {0}")]
    InvalidButterfly(String),

    #[error("line {axis} = {value} misses the interface")]
    OutOfRange { axis: &'static str, value: f64 },

    #[error("inadmissible remnant problem: {0}")]
    Inadmissible(String),

    #[error("degenerate sector bounds: the weighting vanishes on Q")]
    DegenerateBounds,

    #[error("invalid controller configuration: {0}")]
    InvalidConfig(String),
}
