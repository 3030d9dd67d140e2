use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("imaginary part of the Riemann matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Riemann matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("truncation radius {radius} exceeds cap {cap}")]
    RadiusCap { radius: f64, cap: f64 },
    #[error("invalid characteristic: {0}")]
    InvalidCharacteristic(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("homology construction failed: {0}")]
    Homology(String),
    #[error("quadrature did not converge (drift {drift:e} at {order} nodes)")]
    Quadrature { drift: f64, order: usize },
    #[error("characteristic snap failed (residual {0:e})")]
    Snap(f64),
    #[error("no half-period passes the vanishing test")]
    RiemannConstants,
    #[error("invalid path: {0}")]
    Path(String),
    #[error("invalid point: {0}")]
    Point(String),
}
