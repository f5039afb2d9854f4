use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero or non-finite matrix")]
    ZeroMatrix,
    #[error("point lies on the quadric ad-bc=0")]
    OnQuadric,
    #[error("point is not on the quadric (|det| = {0:e})")]
    NotOnQuadric(f64),
    #[error("points do not span a line")]
    DegenerateSpan,
    #[error("point is fixed by the P-real involution")]
    OnRealLocus,
    #[error("arccosh argument {0} below one")]
    ArgumentBelowOne(f64),
    #[error("direction undefined at the origin")]
    AtOrigin,
    #[error("scale parameter t = {0} must exceed 1")]
    BadScale(f64),
    #[error("geodesic endpoints coincide")]
    CoincidingEndpoints,
    #[error("line lies in the quadric; its amoeba is empty")]
    EmptyAmoeba,
    #[error("line lies in the quadric")]
    LineInQuadric,
    #[error("singular curve parameter")]
    SingularParameter,
    #[error("components share a common root")]
    NotCoprime,
    #[error("curve is contained in the quadric")]
    ContainedInQuadric,
    #[error("polynomial is a multiple of ad-bc")]
    IsQuadric,
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("point is not on the surface (|p| = {0:e})")]
    NotOnSurface(f64),
    #[error("singular point of the surface")]
    SingularPoint,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero coordinate at index {0}")]
    ZeroCoordinate(usize),
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("no complement point found after {0} rejections")]
    NoComplementFound(usize),
    #[error("need at least {needed} points, got {got}")]
    UnderDetermined { needed: usize, got: usize },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
