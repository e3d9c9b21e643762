use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported surface S_{{{genus},{marked}}}: complexity 3g-3+n = {complexity} must be at least 1")]
    UnsupportedSurface {
        genus: u32,
        marked: u32,
        complexity: i64,
    },

    #[error("invalid multicurve graph: {0}")]
    InvalidGraph(String),

    #[error("curve count {k} out of range 1..={max}")]
    CurveCountOutOfRange { k: usize, max: usize },

    #[error("unknown orbit id {0}")]
    UnknownOrbit(String),

    #[error("invalid cone point: {0}")]
    InvalidPoint(String),

    #[error("points live on different orbits ({left} vs {right})")]
    OrbitMismatch { left: String, right: String },

    #[error("points belong to different complexes")]
    ComplexMismatch,

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("oracle box bound {bound} does not contain coordinate {needed}")]
    BoxTooSmall { bound: f64, needed: f64 },

    #[error("mesh must be positive and finite, got {0}")]
    InvalidMesh(f64),

    #[error("edge sets do not match: {0}")]
    EdgeSetMismatch(String),

    #[error("shared edge set is empty")]
    EmptySharedEdges,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no maximal coface for orbit {0}")]
    NoMaximalCoface(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
