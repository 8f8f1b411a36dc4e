use thiserror::Error;

/// Errors raised by the geometric operations and the scenario runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("form of degree {got} used where degree {expected} is required")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("{0} is not available on this ambient space")]
    UnsupportedSpace(&'static str),

    #[error("objects live on different ambient spaces")]
    SpaceMismatch,

    #[error("loop needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("edge {index} has length {length:e}, below the minimum 1e-12")]
    EdgeTooShort { index: usize, length: f64 },

    #[error("edge {index} has length {length}, at least half the smallest torus period")]
    EdgeTooLong { index: usize, length: f64 },

    #[error("lift is discontinuous at edge {index}")]
    DiscontinuousLift { index: usize },

    #[error("vertex {0} is degenerate: its neighbours coincide")]
    DegenerateVertex(usize),

    #[error("cusp at vertex {0}: consecutive edges are antiparallel")]
    Cusp(usize),

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("section is not normal at vertex {index} (tangential component {component:e})")]
    NotNormal { index: usize, component: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("vector field `{0}` carries no potential 1-form")]
    MissingPotential(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("flow aborted at step {step}: {reason}")]
    StepFailure { step: usize, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario rejected: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
