//! The experiment config: problem, geometry, grids, fit settings and seed.
//! Every section except `problem` has defaults.

use problem_model::{JsonComplex, ProblemSpec, C64};
use sector_geometry::{build_admissible, AdmissibleConfig, GoodCovering, Sector, Variant};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub asym: AsymConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    0x5eed
}

/// Covering sectors on `bisectors_deg`, a companion sector, and unbounded
/// Borel sectors on the same bisectors. The covered variable's disc has radius
/// `eps0` (ε-covering) or `t_radius` (t-covering); the companion gets the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub bisectors_deg: Vec<f64>,
    pub covering_half_opening_deg: f64,
    pub companion_bisector_deg: f64,
    pub companion_half_opening_deg: f64,
    pub borel_half_opening_deg: f64,
    pub t_radius: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            bisectors_deg: vec![0.0, 120.0, 240.0],
            covering_half_opening_deg: 75.0,
            companion_bisector_deg: 0.0,
            companion_half_opening_deg: 10.0,
            borel_half_opening_deg: 55.0,
            t_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub n_max: usize,
    pub t_grid: Vec<JsonComplex>,
    pub eps_grid: Vec<JsonComplex>,
    pub z_grid: Vec<JsonComplex>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let polar = |r: f64, deg: f64| {
            let c = C64::from_polar(r, deg.to_radians());
            JsonComplex::Pair([c.re, c.im])
        };
        SolveConfig {
            n_max: 8,
            t_grid: vec![polar(0.3, 0.0), polar(0.6, 5.0)],
            eps_grid: vec![polar(0.05, 0.0), polar(0.08, 120.0), polar(0.1, 240.0)],
            z_grid: vec![JsonComplex::Real(0.0), JsonComplex::Real(0.1), JsonComplex::Pair([0.0, 0.2])],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeineConfig {
    /// Which z-coefficient `u_n` the cocycle rays carry.
    pub coefficient: usize,
    pub m_max: usize,
    /// Leading coefficients left out of the growth fit.
    pub skip: usize,
    pub floor: f64,
    /// The fixed base point sits on the companion bisector at this fraction of its radius.
    pub base_fraction: f64,
}

impl Default for HeineConfig {
    fn default() -> Self {
        HeineConfig { coefficient: 2, m_max: 60, skip: 20, floor: 1e-8, base_fraction: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymConfig {
    pub n_norm: usize,
    /// Cocycle probes on each overlap bisector, as fractions of the covering radius.
    pub cocycle_fractions: Vec<f64>,
    /// Remainder probes in covering sector 0 (offset 0.3 rad from its bisector).
    pub remainder_fractions: Vec<f64>,
    pub remainder_orders: Vec<usize>,
    /// Orders N of the mixed-bound fit of the cocycle norms.
    pub mixed_orders: Vec<u32>,
    pub free_k_range: [f64; 2],
    pub radial: usize,
    pub angular: usize,
    pub heine: HeineConfig,
}

impl Default for AsymConfig {
    fn default() -> Self {
        AsymConfig {
            n_norm: 8,
            cocycle_fractions: (0..9).map(|i| 0.16 + 0.08 * i as f64).collect(),
            remainder_fractions: (0..5).map(|i| 0.15 + 0.15 * i as f64).collect(),
            remainder_orders: (0..=4).collect(),
            mixed_orders: (1..=6).collect(),
            free_k_range: [0.1, 6.0],
            radial: 12,
            angular: 7,
            heine: HeineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub r2_min: f64,
    pub free_k_rel: f64,
    pub classifier_margin: f64,
    pub bootstrap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { r2_min: 0.99, free_k_rel: 0.15, classifier_margin: 10.0, bootstrap: 200 }
    }
}

pub fn complexes(v: &[JsonComplex]) -> Vec<C64> {
    v.iter().map(|c| C64::from(*c)).collect()
}

impl Config {
    /// Parses a config, reporting the failing field path with line and column.
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse(format!("line {} column {}, field `{path}`: {inner}", inner.line(), inner.column()))
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", cfg.schema_version)));
        }
        cfg.problem.check_structure().map_err(|e| CliError::Parse(format!("field `problem`: {e}")))?;
        Ok(cfg)
    }

    pub fn toy1() -> Config {
        Config {
            schema_version: SCHEMA_VERSION,
            problem: ProblemSpec::toy1(),
            geometry: GeometryConfig::default(),
            solve: SolveConfig::default(),
            asym: AsymConfig::default(),
            tolerances: Tolerances::default(),
            seed: default_seed(),
        }
    }

    /// Disc radii `(covered variable, companion)` for a variant.
    pub fn radii(&self, variant: Variant) -> (f64, f64) {
        match variant {
            Variant::EpsilonCovering => (self.problem.eps0, self.geometry.t_radius),
            Variant::TCovering => (self.geometry.t_radius, self.problem.eps0),
        }
    }

    pub fn admissible(&self, variant: Variant, probes: &[(C64, C64)]) -> Result<AdmissibleConfig, CliError> {
        let g = &self.geometry;
        let (cov_r, comp_r) = self.radii(variant);
        let bis: Vec<f64> = g.bisectors_deg.iter().map(|d| d.to_radians()).collect();
        let covering = GoodCovering::uniform(&bis, g.covering_half_opening_deg.to_radians(), cov_r)?;
        let companion = Sector::new(g.companion_bisector_deg.to_radians(), g.companion_half_opening_deg.to_radians(), Some(comp_r))?;
        let borel = bis
            .iter()
            .map(|b| Sector::unbounded(*b, g.borel_half_opening_deg.to_radians()))
            .collect::<sector_geometry::Result<Vec<_>>>()?;
        Ok(build_admissible(covering, companion, borel, &self.problem.p, self.problem.k, probes, variant)?)
    }
}
