//! The linear singularly perturbed Cauchy problem: data types, JSON layout,
//! the structural hypotheses and the map between physical Cauchy data
//! `φ_j(t, ε)` and their Borel-side polynomials `P_j(u, ε)`.

mod cauchy;
mod poly;
mod spec;
mod validate;

pub use cauchy::{cauchy_to_physical, physical_to_cauchy, CauchyData};
pub use poly::{EpsPoly, JsonComplex, MAX_EPS_DEGREE};
pub use spec::{MonomialTerm, ProblemSpec};
pub use validate::{search_delta_k1, validate, Check, HypothesisReport};

pub use numerics_core::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("malformed document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
