//! Series norms, cocycles between neighbouring sectorial solutions, fits of
//! exponential flatness and of Gevrey / mixed-order bounds, Cauchy–Heine
//! coefficients and growth classification.

mod battery;
mod classify;
mod cocycle;
mod flatness;
mod heine;
mod lp;
mod norm;
mod remainder;

pub use battery::{
    classifier_battery, compare_norms, norm_fixtures, run_classifier_battery, BatteryEntry, BatteryReport, NormComparison, NormFixture,
    PolynomialSeries, SyntheticSequence, Truth,
};
pub use classify::{classify_growth, ClassifyOptions, GrowthClassification, Verdict};
pub use cocycle::{cocycle, cocycle_directions, cocycle_from, cocycle_ray, heine_coefficients, overlap_ray, theta_coefficient, CocycleSample};
pub use flatness::{check_mixed_bound, fit_exponential_flatness, fit_exponential_flatness_free_k, FlatnessFit, FlatnessModel, MIN_R2};
pub use heine::{cauchy_heine_coefficients, growth_magnitudes, CocycleRay, HeineOptions};
pub use norm::{series_norm, BaseVariable, NormSpec, NormValue, NormVariant};
pub use remainder::{remainder_samples, rs_error_bound_check, FormalExpansion, RemainderSample, RsMode, RsReport};

pub use numerics_core::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Assembly(#[from] solution_assembler::AssemblyError),
    #[error(transparent)]
    Solver(#[from] borel_solver::SolverError),
    #[error(transparent)]
    Geometry(#[from] sector_geometry::GeometryError),
    #[error(transparent)]
    Numerics(#[from] numerics_core::NumericsError),
}

pub type Result<T> = std::result::Result<T, LabError>;
