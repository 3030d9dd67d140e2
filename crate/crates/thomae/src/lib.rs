//! Numerical laboratory for Thomae-type formulae on hyperelliptic and
//! trigonal curves: quadrature-based period matrices, Abel–Jacobi images,
//! Riemann theta functions with characteristics and the verifications built
//! from them.

pub mod algebra;
mod error;
pub mod quadrature;
pub mod surface;
pub mod theta;
pub mod thomae;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;
