use numerics_core::{ln_gamma, C64};
use sector_geometry::Sector;
use serde::{Deserialize, Serialize};
use solution_assembler::geometric_tail;

use crate::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormVariant {
    /// n-th sup over `base ∩ D_{q^{-n}}`.
    QRelative,
    /// n-th sup over the whole base sector.
    Sup,
}

/// Which variable the sup runs over; the other one is the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseVariable {
    T,
    Epsilon,
}

/// `‖h‖ = Σ_n sup |h_n| R₁ⁿ/n!` with the sup sampled on a fixed grid of the base sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSpec {
    pub variant: NormVariant,
    pub base_variable: BaseVariable,
    pub base: Sector,
    pub q: f64,
    pub r1: f64,
    pub n_norm: usize,
    /// Evenly spaced radii per ray of the grid.
    pub radial: usize,
    /// Rays of the grid, edges included.
    pub angular: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormValue {
    /// `Σ_{n ≤ N_norm} sup|h_n| R₁ⁿ/n!`.
    pub value: f64,
    /// Ratio-test estimate of the omitted terms.
    pub tail: f64,
    /// `sup|h_n|` per n.
    pub sups: Vec<f64>,
}

impl NormSpec {
    pub fn new(variant: NormVariant, base_variable: BaseVariable, base: Sector, q: f64, r1: f64, n_norm: usize) -> Result<Self> {
        if !(r1 > 0.0) || !r1.is_finite() {
            return Err(LabError::Domain(format!("R₁ must be positive and finite, got {r1}")));
        }
        if !(q > 1.0) {
            return Err(LabError::Domain(format!("q must exceed 1, got {q}")));
        }
        if !base.is_bounded() {
            return Err(LabError::Domain("the base sector must be bounded".into()));
        }
        Ok(NormSpec { variant, base_variable, base, q, r1, n_norm, radial: 12, angular: 7 })
    }

    fn outer(&self) -> f64 {
        self.base.radius.unwrap_or(1.0)
    }

    /// Radius of the disc the n-th sup runs over.
    pub fn radius(&self, n: usize) -> f64 {
        match self.variant {
            NormVariant::QRelative => self.outer().min(self.q.powi(-(n as i32))),
            NormVariant::Sup => self.outer(),
        }
    }

    /// The full sample grid. The radii include every `q^{-n}` below the outer
    /// radius, so the q-relative samples are a subset of the sup samples and
    /// reach the edge of each disc.
    pub fn grid(&self) -> Vec<C64> {
        let outer = self.outer();
        let mut radii: Vec<f64> = (1..=self.radial).map(|i| outer * i as f64 / self.radial as f64).collect();
        radii.extend((0..=self.n_norm).map(|n| self.q.powi(-(n as i32))).filter(|r| *r < outer));
        radii.sort_by(f64::total_cmp);
        radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * *b);
        let a = self.angular;
        let angles: Vec<f64> = (0..a)
            .map(|i| {
                let f = if a == 1 { 0.0 } else { 2.0 * i as f64 / (a - 1) as f64 - 1.0 };
                self.base.bisector + self.base.half_opening * f
            })
            .collect();
        angles.iter().flat_map(|th| radii.iter().map(move |r| C64::from_polar(*r, *th))).collect()
    }

    /// Grid points used for the n-th sup.
    pub fn sample_points(&self, n: usize) -> Vec<C64> {
        let r = self.radius(n) * (1.0 + 1e-12);
        self.grid().into_iter().filter(|x| x.norm() <= r).collect()
    }
}

pub(crate) fn weight(r1: f64, n: usize) -> f64 {
    (n as f64 * r1.ln() - ln_gamma(n as f64 + 1.0).unwrap_or(0.0)).exp()
}

/// Norm of `h(x, z) = Σ_n h_n(x) zⁿ/n!` given `h_n` pointwise.
pub fn series_norm<F>(norm: &NormSpec, mut h: F) -> Result<NormValue>
where
    F: FnMut(usize, C64) -> Result<C64>,
{
    let grid = norm.grid();
    let mut sups = Vec::with_capacity(norm.n_norm + 1);
    let mut terms = Vec::with_capacity(norm.n_norm + 1);
    for n in 0..=norm.n_norm {
        let r = norm.radius(n) * (1.0 + 1e-12);
        let mut sup: f64 = 0.0;
        let mut seen = false;
        for x in grid.iter().filter(|x| x.norm() <= r) {
            seen = true;
            sup = sup.max(h(n, *x)?.norm());
        }
        if !seen {
            return Err(LabError::Domain(format!("no sample points for n = {n}")));
        }
        sups.push(sup);
        terms.push(sup * weight(norm.r1, n));
    }
    Ok(NormValue { value: terms.iter().sum(), tail: geometric_tail(&terms), sups })
}
