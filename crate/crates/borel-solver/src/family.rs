use std::f64::consts::PI;
use std::fmt::Write as _;

use numerics_core::{geometric_radii, DiscSampling, JacobiRule, RaySampling, C64};
use problem_model::ProblemSpec;
use sector_geometry::{roots_of_borel_symbol, AdmissibleConfig};

use crate::ops::{valuations, Recursion};
use crate::taylor::{TaylorFamily, TaylorOptions};
use crate::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub per_decade: f64,
    /// Innermost ray node.
    pub r_min: f64,
    /// Lagrange order used when reading earlier coefficients off a ray.
    pub order: usize,
    pub jacobi_nodes: usize,
    /// Relative floor for `|P(k u^k)|`.
    pub small_divisor: f64,
    /// Largest ray radius the pyramid may request.
    pub radius_cap: f64,
    pub disc_rays: usize,
    /// `R₀` as a fraction of the smallest root modulus of `P(k u^k)`.
    pub r0_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            per_decade: 48.0,
            r_min: 1e-10,
            order: 7,
            jacobi_nodes: 20,
            small_divisor: 1e-8,
            radius_cap: 1e6,
            disc_rays: 8,
            r0_fraction: 0.5,
        }
    }
}

impl SolverOptions {
    /// Twice the ray density and quadrature nodes, for convergence checks.
    pub fn refined(&self) -> Self {
        SolverOptions { per_decade: 2.0 * self.per_decade, jacobi_nodes: 2 * self.jacobi_nodes, ..*self }
    }
}

/// One coefficient `ω_n` sampled along a ray.
///
/// Near `u = 0`, `ω_n` behaves like `a uᵛ` with `v` up to `2N+1`, which a
/// local polynomial on a geometric grid reproduces poorly. Reads therefore go
/// through `ω_n(u)/|u|ᵛ`, which is smooth down to the origin, where it takes
/// the value `a e^{ivγ}` supplied by the power series.
#[derive(Debug, Clone)]
pub struct CoefficientRay {
    pub samples: RaySampling,
    /// `ω_n/|u|ᵛ − a e^{ivγ}` on the same radii (zero at the origin).
    reduced: RaySampling,
    pub valuation: u32,
    origin: C64,
}

impl CoefficientRay {
    fn new(samples: RaySampling, valuation: u32, leading: C64) -> Result<Self> {
        let origin = leading * C64::from_polar(1.0, valuation as f64 * samples.direction);
        let values = samples
            .radii()
            .iter()
            .zip(samples.values())
            .map(|(r, w)| w / r.powi(valuation as i32) - origin)
            .collect();
        let reduced = RaySampling::new(samples.direction, samples.radii().to_vec(), values)?;
        Ok(CoefficientRay { samples, reduced, valuation, origin })
    }

    pub fn direction(&self) -> f64 {
        self.samples.direction
    }

    pub fn max_radius(&self) -> f64 {
        self.samples.max_radius()
    }

    /// `ω_n(r e^{iγ})` by Lagrange interpolation of the given order.
    pub fn value(&self, r: f64, order: usize) -> numerics_core::Result<C64> {
        if r == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        // below the first node the stencil would lean on the clustered inner
        // nodes and amplify rounding; g is flat there, so a chord suffices
        let r1 = self.reduced.radii()[0];
        let g = if r < r1 {
            self.origin + self.reduced.values()[0] * (r / r1)
        } else {
            self.reduced.interpolate_order(r, order)? + self.origin
        };
        Ok(g * r.powi(self.valuation as i32))
    }

    fn scaled(&self, s: C64) -> CoefficientRay {
        CoefficientRay {
            samples: self.samples.scaled(s),
            reduced: self.reduced.scaled(s),
            valuation: self.valuation,
            origin: self.origin * s,
        }
    }
}

/// Borel coefficients `ω_0, …, ω_N` for one sector and one ε.
#[derive(Debug, Clone)]
pub struct CoefficientFamily {
    pub p: usize,
    pub gamma: f64,
    pub eps: C64,
    pub n_max: usize,
    pub r_out: f64,
    pub r0: f64,
    pub q: f64,
    pub s: usize,
    /// One ray per n on direction `gamma`, reaching out to the pyramid radius.
    pub rays: Vec<CoefficientRay>,
    /// `disc_rays[j][n]`: ray `gamma + 2πj/J` out to `R₀/qⁿ`.
    pub disc_rays: Vec<Vec<CoefficientRay>>,
    pub order: usize,
}

impl CoefficientFamily {
    pub fn disc_radius(&self, n: usize) -> f64 {
        self.r0 / self.q.powi(n as i32)
    }

    pub fn disc(&self, n: usize) -> Result<DiscSampling> {
        let rays: Vec<RaySampling> = self.disc_rays.iter().map(|r| r[n].samples.clone()).collect();
        Ok(DiscSampling::from_rays(self.disc_radius(n), &rays)?)
    }

    /// `ω_n` at radius `r` on the main ray.
    pub fn ray_value(&self, n: usize, r: f64) -> Result<C64> {
        let ray = &self.rays[n];
        ray.value(r, self.order).map_err(|_| SolverError::Coverage {
            index: n,
            radius: r,
            available: ray.max_radius(),
        })
    }

    /// `ω_n` at radius `r` on disc ray `j`.
    pub fn disc_value(&self, j: usize, n: usize, r: f64) -> Result<C64> {
        let ray = &self.disc_rays[j][n];
        ray.value(r, self.order).map_err(|_| SolverError::Coverage {
            index: n,
            radius: r,
            available: ray.max_radius(),
        })
    }

    /// Multiply every sample of `ω_n` by `factor` (test fixtures).
    pub fn scale_coefficient(&mut self, n: usize, factor: C64) {
        self.rays[n] = self.rays[n].scaled(factor);
        for rays in &mut self.disc_rays {
            rays[n] = rays[n].scaled(factor);
        }
    }

    /// CSV rows `p,n,grid,radius,arg,re,im` for the main ray and every disc ray.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,n,grid,radius,arg,re,im\n");
        for (n, ray) in self.rays.iter().enumerate() {
            let ray = &ray.samples;
            for (r, v) in ray.radii().iter().zip(ray.values()) {
                let _ = writeln!(out, "{},{},ray,{:.14e},{:.14e},{:.14e},{:.14e}", self.p, n, r, ray.direction, v.re, v.im);
            }
        }
        for rays in &self.disc_rays {
            for (n, ray) in rays.iter().enumerate() {
                let ray = &ray.samples;
                for (r, v) in ray.radii().iter().zip(ray.values()) {
                    let _ = writeln!(out, "{},{},disc,{:.14e},{:.14e},{:.14e},{:.14e}", self.p, n, r, ray.direction, v.re, v.im);
                }
            }
        }
        out
    }
}

/// Outer radius of `ω_m` needed so that every dilated read `q^{ℓ₃}u` made while
/// building `ω_{m+σ}, …, ω_N` on `|u| ≤ R_out` stays inside the sampled range.
pub(crate) fn pyramid_radius(rec: &Recursion, n_max: usize, m: usize, r_out: f64) -> f64 {
    let l = rec.max_l3() as i32;
    let sigma = rec.min_gap().max(1) as usize;
    let steps = (n_max.saturating_sub(m)).div_ceil(sigma) as i32;
    r_out * rec.q.powi(l * steps)
}

fn recursion_for(spec: &ProblemSpec, eps: C64, opts: &SolverOptions) -> Result<Recursion> {
    let mut rec = Recursion::new(spec, eps)?;
    rec.small_divisor = opts.small_divisor;
    rec.jacobi = JacobiRule { nodes: opts.jacobi_nodes, near_zero_power: 1 };
    Ok(rec)
}

/// Per-coefficient data shared by every ray of one solve.
struct Leading {
    valuation: Vec<u32>,
    coefficient: Vec<C64>,
}

impl Leading {
    fn new(spec: &ProblemSpec, rec: &Recursion, n_max: usize) -> Result<Self> {
        let vals = valuations(rec, n_max);
        let opts = TaylorOptions { terms: vals.iter().flatten().max().map_or(2, |v| *v as usize + 2), ..Default::default() };
        let tay = TaylorFamily::numeric(spec, rec.eps, n_max, &opts)?;
        let valuation: Vec<u32> = vals.iter().map(|v| v.unwrap_or(0)).collect();
        let coefficient = valuation
            .iter()
            .enumerate()
            .map(|(n, &v)| tay.coefficient(n, v as usize).first().copied().unwrap_or(C64::new(0.0, 0.0)))
            .collect();
        Ok(Leading { valuation, coefficient })
    }
}

/// Run the recursion along one ray with coefficient `i` sampled out to `radius(i)`.
fn solve_along(
    rec: &Recursion,
    lead: &Leading,
    gamma: f64,
    n_max: usize,
    radius: &dyn Fn(usize) -> f64,
    opts: &SolverOptions,
) -> Result<Vec<CoefficientRay>> {
    let s = rec.s as usize;
    let dir = C64::from_polar(1.0, gamma);
    let mut rays: Vec<CoefficientRay> = Vec::with_capacity(n_max + 1);
    for i in 0..=n_max {
        let rmax = radius(i);
        let radii = geometric_radii(opts.r_min, rmax, opts.per_decade);
        let mut values = Vec::with_capacity(radii.len());
        if i < s {
            for &r in &radii {
                values.push(rec.initial(i, dir * r));
            }
        } else {
            let n = i - s;
            let mut access = |m: usize, v: C64| -> Result<C64> {
                if m < s {
                    return Ok(rec.initial(m, v));
                }
                let ray = &rays[m];
                ray.value(v.norm(), opts.order).map_err(|_| SolverError::Coverage {
                    index: m,
                    radius: v.norm(),
                    available: ray.max_radius(),
                })
            };
            for &r in &radii {
                values.push(rec.step(n, &mut access, dir * r)?);
            }
        }
        let samples = RaySampling::new(gamma, radii, values)?;
        rays.push(CoefficientRay::new(samples, lead.valuation[i], lead.coefficient[i])?);
    }
    Ok(rays)
}

/// `ω_0, …, ω_N` on the single ray `arg u = gamma`, coefficient `m` reaching the
/// pyramid radius for `R_out`.
pub fn solve_ray(spec: &ProblemSpec, gamma: f64, eps: C64, n_max: usize, r_out: f64, opts: &SolverOptions) -> Result<Vec<CoefficientRay>> {
    let rec = recursion_for(spec, eps, opts)?;
    check_request(&rec, n_max, r_out, opts)?;
    let lead = Leading::new(spec, &rec, n_max)?;
    solve_along(&rec, &lead, gamma, n_max, &|m| pyramid_radius(&rec, n_max, m, r_out), opts)
}

fn check_request(rec: &Recursion, n_max: usize, r_out: f64, opts: &SolverOptions) -> Result<()> {
    if n_max < rec.s as usize {
        return Err(SolverError::Invalid(format!("truncation N = {n_max} below S = {}", rec.s)));
    }
    if !(r_out > opts.r_min) || !r_out.is_finite() {
        return Err(SolverError::Invalid(format!("outer radius {r_out} must exceed the innermost node {}", opts.r_min)));
    }
    let required = pyramid_radius(rec, n_max, 0, r_out);
    if required > opts.radius_cap {
        return Err(SolverError::Resource { required, cap: opts.radius_cap });
    }
    Ok(())
}

/// Family on an explicit direction `gamma`; `p` is only recorded.
pub fn solve_family_along(
    spec: &ProblemSpec,
    p: usize,
    gamma: f64,
    eps: C64,
    n_max: usize,
    r_out: f64,
    opts: &SolverOptions,
) -> Result<CoefficientFamily> {
    let rec = recursion_for(spec, eps, opts)?;
    check_request(&rec, n_max, r_out, opts)?;
    let roots = roots_of_borel_symbol(&spec.p, spec.k)?;
    let min_root = roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
    let r0 = opts.r0_fraction * min_root;
    let lead = Leading::new(spec, &rec, n_max)?;
    let rays = solve_along(&rec, &lead, gamma, n_max, &|m| pyramid_radius(&rec, n_max, m, r_out), opts)?;
    let q = spec.q;
    let mut disc_rays = Vec::with_capacity(opts.disc_rays);
    for j in 0..opts.disc_rays {
        let dir = gamma + 2.0 * PI * j as f64 / opts.disc_rays as f64;
        disc_rays.push(solve_along(&rec, &lead, dir, n_max, &|m| r0 / q.powi(m as i32), opts)?);
    }
    Ok(CoefficientFamily {
        p,
        gamma,
        eps,
        n_max,
        r_out,
        r0,
        q,
        s: spec.s as usize,
        rays,
        disc_rays,
        order: opts.order,
    })
}

/// Family for Borel sector `p` of `config`, on its bisecting direction.
pub fn solve_family(
    spec: &ProblemSpec,
    config: &AdmissibleConfig,
    p: usize,
    eps: C64,
    n_max: usize,
    r_out: f64,
    opts: &SolverOptions,
) -> Result<CoefficientFamily> {
    let sector = config
        .borel_sectors
        .get(p)
        .ok_or_else(|| SolverError::Invalid(format!("no Borel sector {p} in the configuration")))?;
    solve_family_along(spec, p, sector.bisector, eps, n_max, r_out, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pyramid_for_toy() {
        let rec = Recursion::new(&ProblemSpec::toy1(), C64::new(0.0, 0.0)).unwrap();
        let q: f64 = 1.2;
        assert!((pyramid_radius(&rec, 8, 8, 1.0) - 1.0).abs() < 1e-15);
        assert!((pyramid_radius(&rec, 8, 7, 1.0) - q).abs() < 1e-15);
        assert!((pyramid_radius(&rec, 8, 6, 1.0) - q).abs() < 1e-15);
        assert!((pyramid_radius(&rec, 8, 0, 1.0) - q.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn resource_cap() {
        let opts = SolverOptions { radius_cap: 1.5, ..Default::default() };
        let e = solve_ray(&ProblemSpec::toy1(), 0.0, C64::new(0.05, 0.0), 8, 1.0, &opts).unwrap_err();
        assert!(matches!(e, SolverError::Resource { .. }));
    }

    #[test]
    fn truncation_below_order_rejected() {
        let mut spec = ProblemSpec::toy1();
        spec.s = 2;
        spec.cauchy = problem_model::CauchyData::zero(2);
        let e = solve_ray(&spec, 0.0, C64::new(0.05, 0.0), 1, 1.0, &SolverOptions::default()).unwrap_err();
        assert!(matches!(e, SolverError::Invalid(_)));
    }
}
