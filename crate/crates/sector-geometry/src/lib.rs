//! Sectors with vertex at the origin, good coverings of a punctured disc,
//! roots of the Borel symbol `u ↦ P(k u^k)` and the admissibility checks that
//! tie the three together.

mod admissible;
mod covering;
mod roots;
mod sector;

pub use admissible::{build_admissible, choose_direction, AdmissibleConfig, Variant, BOUNDARY_INSET};
pub use covering::{is_good_covering, CoveringReport, CoveringViolation, GoodCovering};
pub use roots::{poly_eval, polynomial_roots, roots_of_borel_symbol};
pub use sector::{angle_diff, wrap_angle, Sector, SectorDeg};

pub use numerics_core::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no admissible direction in sector at {bisector_deg:.3}° for phase {phase_deg:.3}° (best cosine {best:.4})")]
    Infeasible { bisector_deg: f64, phase_deg: f64, best: f64 },
    #[error("admissibility error: {0}")]
    Admissibility(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
