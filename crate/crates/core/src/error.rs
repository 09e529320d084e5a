use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the kernel can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("tangent vanishes at t = {t}")]
    DegenerateTangent { t: f64 },
    #[error("curve has no normal field")]
    MissingNormalField,
    #[error("parameter t = {t} is singular for this formula")]
    SingularParameter { t: f64 },
    #[error("curve does not close: |r(0) - r(a)| = {gap:e}")]
    NotClosed { gap: f64 },
    #[error("operation needs a {expected}-dimensional curve, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("boundary is not a simple closed curve")]
    NotSimple,
    #[error("region has zero mass")]
    DegenerateRegion,
    #[error("diagonals do not cross at a single interior point")]
    NoDiagonalIntersection,
    #[error("shaved regions overlap")]
    OverlappingShaves,

    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("scale attains its global {kind} more than once")]
    NonUniqueExtremum { kind: &'static str },

    #[error("seam mismatch: last ring is {distance:e} away from the first")]
    SeamMismatch { distance: f64 },
    #[error("mesh self-intersects between sections {sections:?}")]
    SelfIntersecting { sections: Vec<(usize, usize)>, pairs: usize },
    #[error("curve samples {} and {} are {min_distance:e} apart, inside the clearance", pair.0, pair.1)]
    CurveClearance { min_distance: f64, pair: (usize, usize) },
    #[error("ring resolution {ring} is incompatible with the profile symmetry ({reason})")]
    ResolutionMismatch { ring: usize, reason: String },
    #[error("no tangential contact between the given sculptures")]
    NoContact,
    #[error("mesh carries no section provenance")]
    NoSections,
    #[error("bad resolution: {0}")]
    BadResolution(String),

    #[error("bad controls: {0}")]
    BadControls(String),
    #[error("control {0} is immutable")]
    Immutable(String),
    #[error("control centroids are degenerate: {0}")]
    DegenerateControls(String),

    #[error("config error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
