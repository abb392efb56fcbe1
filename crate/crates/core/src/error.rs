use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("exponent is real (beta = 0), no oscillation ratios exist")]
    NoOscillation,

    #[error("invalid mesh specification: {0}")]
    InvalidSpec(String),

    #[error("mesh would need {projected} vertices, cap is {cap}")]
    MeshTooLarge { projected: usize, cap: usize },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("element {element} has non-positive jacobian {jacobian:e}")]
    Quadrature { element: usize, jacobian: f64 },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("point at radius {radius:e} is outside every triangle")]
    PointLocation { radius: f64 },

    #[error("mesh is not mirror symmetric: {0}")]
    AsymmetricMesh(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
