//! The Borel-plane coefficients `ω_n(u, ε)` of the auxiliary convolution
//! problem: a recursion in `n` evaluated on rays, on shrinking discs and as
//! truncated power series, plus constant fitting for their growth bounds.

mod bounds;
mod family;
mod ops;
mod taylor;

pub use bounds::{verify_coeff_bounds, verify_coeff_bounds_over, BoundFitReport, GrowthBound, BOUND_TOLERANCE};
pub use family::{solve_family, solve_family_along, solve_ray, CoefficientFamily, CoefficientRay, SolverOptions};
pub use ops::{recursion_step, singular_depths, valuations, Recursion};
pub use taylor::{TaylorFamily, TaylorOptions};

pub use numerics_core::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("small divisor: |P(k u^k)| = {value:.3e} at u = {u} (floor {floor:.3e})")]
    SmallDivisor { u: C64, value: f64, floor: f64 },
    #[error("coefficient {index} is not available at radius {radius} (known up to {available})")]
    Coverage { index: usize, radius: f64, available: f64 },
    #[error("resource limit: pyramid radius {required} exceeds cap {cap}")]
    Resource { required: f64, cap: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Numerics(#[from] numerics_core::NumericsError),
    #[error(transparent)]
    Geometry(#[from] sector_geometry::GeometryError),
}

pub type Result<T> = std::result::Result<T, SolverError>;
