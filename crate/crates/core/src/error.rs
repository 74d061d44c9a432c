use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("convex body is empty")]
    EmptyBody,
    #[error("body has no halfspace representation and no lineality hint")]
    NonPolyhedral,
    #[error("point lies inside the body (distance {distance:e})")]
    PointInsideBody { distance: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("plane directions are not orthonormal (defect {defect:e})")]
    DegeneratePlane { defect: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("ambient real dimension {0} is odd")]
    OddDimension(usize),
    #[error("Hessian has non-finite entries")]
    NonFiniteHessian,
    #[error("zero set of the exhaustion is empty on the grid")]
    EmptyZeroSet,
    #[error("map does not touch the zero set at the centre (value {value:e})")]
    NotTouching { value: f64 },
    #[error("map enters the body (value {value:e})")]
    InsideBody { value: f64 },
    #[error("grid too coarse: {0} interior nodes along an axis, need at least 4")]
    GridTooCoarse(usize),
    #[error("loop leaves the sampled grid")]
    LoopExitsGrid,
    #[error("nonzero real period (norm {norm:e})")]
    PeriodObstruction { norm: f64 },
    #[error("path integration disagrees between routes (max {max:e})")]
    PathDisagreement { max: f64 },
    #[error("h is not null (residual {residual:e})")]
    NotNull { residual: f64 },
    #[error("unknown surface `{0}`")]
    UnknownSurface(String),
    #[error("no path found inside the domain")]
    NoPathFound,
    #[error("endpoint lies outside the domain")]
    EndpointOutsideDomain,
    #[error("zero vector")]
    ZeroVector,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, got })
    }
}
