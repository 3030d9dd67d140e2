//! Analytic data of cyclic covers w^n = f(z), n ∈ {2, 3}.

pub mod abel;
pub mod curve;
pub mod homology;
pub mod jacobian;
pub mod periods;
pub mod riemann;
pub mod segment;

pub use abel::{
    abel_jacobi, abel_jacobi_raw, abel_jacobi_sum, continue_point, local_point, random_point, PathHint, SurfacePoint,
};
pub use curve::{CurveSpec, Differential, DifferentialBasis};
pub use homology::Homology;
pub use jacobian::{aj_jacobian_hyper, aj_jacobian_hyper_closed, aj_jacobian_trig, sym_coord_derivatives, AnchorPattern};
pub use periods::{build_periods, BuildConfig, Invariants, PeriodData};
pub use riemann::{lattice_distance, lattice_reduce, lattice_snap, riemann_constants};
