use thiserror::Error;

/// Errors raised by knot construction and the geometric operations built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnotError {
    #[error("a closed polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge {0} is degenerate (repeated consecutive vertex)")]
    DegenerateEdge(usize),
    #[error("polygon is not simple: {0}")]
    NotSimple(String),
    #[error("direction required for general-position mode {0}")]
    MissingDirection(&'static str),
    #[error("perturbation magnitude {magnitude} must be below half the clearance {clearance}")]
    MagnitudeTooLarge { magnitude: f64, clearance: f64 },
    #[error("perturbed polygon lost simplicity")]
    SimplicityLost,
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point lies on the curve (distance {0:e} to edge {1})")]
    PointOnCurve(f64, usize),
    #[error("edge {0} projects to antipodal points")]
    AntipodalEdge(usize),
    #[error("marks are not in cyclic order along the knot")]
    MarksOutOfOrder,
    #[error("at least 3 marks are required, got {0}")]
    TooFewMarks(usize),
    #[error("vertices {0} and {1} are at equal height")]
    TiedHeights(usize, usize),
    #[error("retry budget exhausted after {0} redraws")]
    RetryBudgetExhausted(usize),
    #[error("solid triangle is blocked by edge {0}")]
    BlockedTriangle(usize),
    #[error("degenerate triangle does not satisfy the incidence conditions")]
    DegenerateTriangle,
    #[error("height function has {0} local maxima, expected 1")]
    MultipleLocalMaxima(usize),
    #[error("move does not apply to this knot: {0}")]
    InvalidMove(String),
    #[error("no generic projection direction found in {0} attempts")]
    NoGenericDirection(usize),
    #[error("projection direction is not generic: {0}")]
    NonGenericDirection(String),
    #[error("chessboard coloring failed: {0}")]
    ColoringFailed(String),
    #[error("knot has {0} edges, above the search cap of {1}")]
    TooManyEdges(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, KnotError>;
