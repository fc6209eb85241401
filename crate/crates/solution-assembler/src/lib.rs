//! Sectorial solutions `u_p(t, z, ε) = Σ_n u_{p,n}(t, ε) zⁿ/n!` with
//! `u_{p,n}(t, ε) = L_k(ω_{p,n}(·, ε))(εt)` along an admissible direction, and
//! the residual of the original equation evaluated on them.

mod family;
mod residual;
mod solution;

pub use family::{RayFamily, Weight};
pub use residual::{borel_laplace_commutation, pde_residual, ResidualReport};
pub use solution::{assemble, evaluate, geometric_tail, grid, toy1_admissible, AssemblyOptions, Evaluation, ProbeValue, SectorialSolution};

pub use numerics_core::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no admissible direction for t = {t}, ε = {eps}: {reason}")]
    Direction { t: C64, eps: C64, reason: String },
    #[error(transparent)]
    Laplace(#[from] laplace_engine::LaplaceError),
    #[error(transparent)]
    Solver(#[from] borel_solver::SolverError),
    #[error(transparent)]
    Geometry(#[from] sector_geometry::GeometryError),
    #[error(transparent)]
    Numerics(#[from] numerics_core::NumericsError),
}

pub type Result<T> = std::result::Result<T, AssemblyError>;
