//! Numerical substrate shared by the Borel/Laplace crates: the real Gamma
//! function, endpoint-aware quadrature, sampled functions on rays and discs,
//! and one-sided envelope fitting by linear programming.

pub mod envelope;
pub mod gamma;
pub mod jacobi;
pub mod legendre;
pub mod ray;

pub use envelope::{fit_upper_envelope, EnvelopeFit, EnvelopeRow, GrowthEnvelope, VarBounds};
pub use gamma::{gamma_real, ln_gamma};
pub use jacobi::{integrate_jacobi, integrate_jacobi_with, JacobiRule};
pub use legendre::{gauss_legendre, integrate_panels};
pub use ray::{geometric_radii, interpolate_ray, DiscSampling, RaySampling, DEFAULT_NODES_PER_DECADE};

pub use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: radius {requested} outside sampled range (max {max})")]
    Range { requested: f64, max: f64 },
    #[error("construction error: {0}")]
    Construction(String),
    #[error("linear program failed: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
