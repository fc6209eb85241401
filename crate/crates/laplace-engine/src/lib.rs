//! Order-k Laplace transform along a ray,
//! `L_k(f)(T) = k ∫_0^{∞e^{iγ}} f(u) exp(−(u/T)^k) du/u`,
//! the convolution `u^m ⋆_k f`, and numerical checks of the operational
//! identities relating them.

mod battery;
mod conv;
mod identities;
mod transform;

pub use battery::{identity_battery, identity_battery_with, IdentityBatteryReport, IDENTITY_NAMES, IDENTITY_TOLERANCES};
pub use conv::{conv_star, conv_star_with};
pub use identities::{
    check_convolution_identity, check_derivative_identity, check_dilation_identity, check_monomial_identity,
    check_monomial_identity_with,
    relative_residual, IdentityOptions,
};
pub use transform::{cut_radius, cut_radius_from, laplace_ray, laplace_tail, LaplaceOptions, RayIntegrand, Sampled};

pub use numerics_core::{GrowthEnvelope, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LaplaceError {
    #[error("direction error: cos(k(γ − arg T)) = {cosine:.3e} is not above the margin {margin:.3e}")]
    Direction { cosine: f64, margin: f64 },
    #[error("range error: integrand known up to radius {available}, truncation needs {needed}")]
    Range { needed: f64, available: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Numerics(#[from] numerics_core::NumericsError),
}

pub type Result<T> = std::result::Result<T, LaplaceError>;
