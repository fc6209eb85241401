//! Sampled complex functions on a ray [0, ∞)·e^{iγ} and on a disc.

use crate::{NumericsError, Result, C64};

/// Default density of the geometric radial layout.
pub const DEFAULT_NODES_PER_DECADE: f64 = 48.0;
/// Default local interpolation order.
pub const DEFAULT_ORDER: usize = 3;

/// Radii `r_max·ρ^{-(M-j)}`, `j = 0..=M`, with `ρ = 10^{1/per_decade}` and the
/// smallest radius at most `r_min`.
pub fn geometric_radii(r_min: f64, r_max: f64, per_decade: f64) -> Vec<f64> {
    assert!(r_min > 0.0 && r_max > r_min && per_decade > 0.0);
    let m = ((r_max / r_min).log10() * per_decade).ceil() as i32;
    let step = 10f64.powf(-1.0 / per_decade);
    (0..=m).map(|j| r_max * step.powi(m - j)).collect()
}

/// A function sampled along a ray. The point `u = 0` is an implicit node
/// with value zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySampling {
    pub direction: f64,
    radii: Vec<f64>,
    values: Vec<C64>,
}

impl RaySampling {
    pub fn new(direction: f64, radii: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(NumericsError::Construction(format!(
                "{} radii for {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericsError::Construction("radii must be positive and strictly increasing".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(NumericsError::Construction(format!("non-finite sample at radius {}", radii[i])));
        }
        Ok(RaySampling { direction, radii, values })
    }

    pub fn from_fn<F: FnMut(C64) -> C64>(direction: f64, radii: Vec<f64>, mut f: F) -> Result<Self> {
        let e = C64::from_polar(1.0, direction);
        let values = radii.iter().map(|&r| f(e * r)).collect();
        Self::new(direction, radii, values)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value_at_zero(&self) -> C64 {
        C64::new(0.0, 0.0)
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn point(&self, r: f64) -> C64 {
        C64::from_polar(r, self.direction)
    }

    /// Scale every sample by `s` (used for fixtures and linearity checks).
    pub fn scaled(&self, s: C64) -> RaySampling {
        RaySampling {
            direction: self.direction,
            radii: self.radii.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn interpolate(&self, r: f64) -> Result<C64> {
        self.interpolate_order(r, DEFAULT_ORDER)
    }

    /// Lagrange interpolation through the `order + 1` nodes nearest to `r`
    /// (stencils are clamped at both ends; the origin counts as a node).
    pub fn interpolate_order(&self, r: f64, order: usize) -> Result<C64> {
        let rmax = self.max_radius();
        if !(r >= 0.0) || r > rmax * (1.0 + 1e-12) {
            return Err(NumericsError::Range { requested: r, max: rmax });
        }
        if r == 0.0 {
            return Ok(self.value_at_zero());
        }
        let n = self.radii.len() + 1;
        let node = |i: usize| if i == 0 { 0.0 } else { self.radii[i - 1] };
        let val = |i: usize| if i == 0 { C64::new(0.0, 0.0) } else { self.values[i - 1] };
        // first extended index whose node is >= r
        let pos = 1 + self.radii.partition_point(|&x| x < r);
        if pos < n && node(pos) == r {
            return Ok(val(pos));
        }
        let m = (order + 1).min(n);
        let start = pos.saturating_sub(m / 2).min(n - m);
        let mut acc = C64::new(0.0, 0.0);
        for i in start..start + m {
            let xi = node(i);
            let mut l = 1.0;
            for j in start..start + m {
                if j != i {
                    let xj = node(j);
                    l *= (r - xj) / (xi - xj);
                }
            }
            acc += val(i) * l;
        }
        Ok(acc)
    }
}

/// Interpolate `f` at radius `r` with the default (cubic) stencil.
pub fn interpolate_ray(f: &RaySampling, r: f64) -> Result<C64> {
    f.interpolate(r)
}

/// A function sampled at scattered nodes of a closed disc.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscSampling {
    pub radius: f64,
    nodes: Vec<C64>,
    values: Vec<C64>,
}

impl DiscSampling {
    pub fn new(radius: f64, nodes: Vec<C64>, values: Vec<C64>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(NumericsError::Construction("disc radius must be positive".into()));
        }
        if nodes.len() != values.len() {
            return Err(NumericsError::Construction("node/value length mismatch".into()));
        }
        if let Some(z) = nodes.iter().find(|z| z.norm() > radius * (1.0 + 1e-12)) {
            return Err(NumericsError::Construction(format!("node {z} outside disc of radius {radius}")));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(NumericsError::Construction("non-finite disc sample".into()));
        }
        Ok(DiscSampling { radius, nodes, values })
    }

    /// Gathers the samples of several rays truncated to the disc.
    pub fn from_rays(radius: f64, rays: &[RaySampling]) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for ray in rays {
            for (r, v) in ray.radii().iter().zip(ray.values()) {
                if *r <= radius * (1.0 + 1e-12) {
                    nodes.push(ray.point(*r));
                    values.push(*v);
                }
            }
        }
        Self::new(radius, nodes, values)
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}
