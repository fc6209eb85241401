use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use borel_solver::{solve_ray, verify_coeff_bounds, CoefficientFamily, GrowthBound, SolverError, SolverOptions, TaylorFamily, TaylorOptions};
use laplace_engine::{LaplaceError, LaplaceOptions};
use numerics_core::{ln_gamma, C64};
use problem_model::ProblemSpec;
use sector_geometry::{build_admissible, choose_direction, AdmissibleConfig, GoodCovering, Sector, Variant};

use crate::family::{RayFamily, Weight};
use crate::{AssemblyError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub solver: SolverOptions,
    pub laplace: LaplaceOptions,
    pub taylor: TaylorOptions,
    /// Radius of the z-disc; estimated from the coefficient growth when `None`.
    pub r1: Option<f64>,
    /// Headroom in `(r/|T|)^k` kept between the largest transform argument and the ray ends.
    pub decay_budget: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            solver: SolverOptions::default(),
            laplace: LaplaceOptions::default(),
            taylor: TaylorOptions::default(),
            r1: None,
            decay_budget: 40.0,
        }
    }
}

/// Cached `u_{p,n}(t, ε)` for one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeValue {
    pub t: C64,
    pub eps: C64,
    pub gamma: f64,
    pub margin: f64,
    pub coefficients: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    /// Estimated size of the discarded z-series tail.
    pub remainder: f64,
    /// `u_{p,n}(t, ε) zⁿ/n!` for `n = 0..=N`.
    pub terms: Vec<C64>,
}

type FamilyKey = (u64, u64, u64);

#[derive(Debug)]
pub struct SectorialSolution {
    pub variant: Variant,
    pub p: usize,
    pub n_max: usize,
    pub spec: ProblemSpec,
    pub config: AdmissibleConfig,
    pub opts: AssemblyOptions,
    pub r1: f64,
    pub probes: Vec<ProbeValue>,
    /// The Borel data do not depend on ε, so one family per direction serves every ε.
    pub eps_free: bool,
    families: Mutex<HashMap<FamilyKey, Arc<RayFamily>>>,
    taylor: Mutex<HashMap<(u64, u64), Arc<TaylorFamily>>>,
}

/// All pairs `(t, ε)` of two grids.
pub fn grid(ts: &[C64], eps: &[C64]) -> Vec<(C64, C64)> {
    ts.iter().flat_map(|t| eps.iter().map(move |e| (*t, *e))).collect()
}

/// Geometry of the single-term test problem: three sectors at 0°, 120°, 240°
/// of half-opening 75° covering the chosen variable, a companion sector of
/// half-opening 10° on the positive axis, and Borel sectors of half-opening 55°
/// on the same bisectors.
pub fn toy1_admissible(spec: &ProblemSpec, variant: Variant, probes: &[(C64, C64)]) -> Result<AdmissibleConfig> {
    let bis = [0.0, 120f64.to_radians(), 240f64.to_radians()];
    let (cov_r, comp_r) = match variant {
        Variant::EpsilonCovering => (spec.eps0, 1.0),
        Variant::TCovering => (1.0, spec.eps0),
    };
    let covering = GoodCovering::uniform(&bis, 75f64.to_radians(), cov_r)?;
    let companion = Sector::new(0.0, 10f64.to_radians(), Some(comp_r))?;
    let borel = bis.iter().map(|b| Sector::unbounded(*b, 55f64.to_radians())).collect::<sector_geometry::Result<Vec<_>>>()?;
    Ok(build_admissible(covering, companion, borel, &spec.p, spec.k, probes, variant)?)
}

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0).unwrap_or(0.0)
}

/// Tail estimate for `Σ_{n>N} c_n` from the last nonzero terms `c_n = |term_n|`,
/// assuming geometric decay at the worst observed rate.
pub fn geometric_tail(terms: &[f64]) -> f64 {
    let nz: Vec<usize> = (0..terms.len()).filter(|&i| terms[i] > 0.0).collect();
    let n_max = terms.len() - 1;
    match nz.len() {
        0 => 0.0,
        1 => terms[nz[0]],
        len => {
            let b = nz[len - 1];
            let mut ratio: f64 = 0.0;
            for &a in nz[len.saturating_sub(3)..len - 1].iter() {
                ratio = ratio.max((terms[b] / terms[a]).powf(1.0 / (b - a) as f64));
            }
            if ratio >= 1.0 {
                f64::INFINITY
            } else {
                terms[b] * ratio.powi((n_max + 1 - b) as i32) / (1.0 - ratio)
            }
        }
    }
}

fn key(eps: C64, gamma: f64) -> FamilyKey {
    (eps.re.to_bits(), eps.im.to_bits(), gamma.to_bits())
}

impl SectorialSolution {
    pub fn k(&self) -> u32 {
        self.spec.k
    }

    /// The Borel sector `𝓤_p`.
    pub fn borel_sector(&self) -> &Sector {
        &self.config.borel_sectors[self.p]
    }

    /// Error unless `(t, ε)` lies in `𝓣 × 𝓔_p` (resp. `𝓣_p × 𝓔`).
    pub fn check_domain(&self, t: C64, eps: C64) -> Result<()> {
        let own = &self.config.covering.sectors[self.p];
        let (cov, comp, names) = match self.variant {
            Variant::EpsilonCovering => (eps, t, ("ε", "t")),
            Variant::TCovering => (t, eps, ("t", "ε")),
        };
        if !own.contains(cov) {
            return Err(AssemblyError::Domain(format!("{} = {cov} is outside covering sector {}", names.0, self.p)));
        }
        if !self.config.companion.contains(comp) {
            return Err(AssemblyError::Domain(format!("{} = {comp} is outside the companion sector", names.1)));
        }
        Ok(())
    }

    /// Admissible direction for `(t, ε)` with its cosine margin.
    pub fn direction(&self, t: C64, eps: C64) -> Result<(f64, f64)> {
        choose_direction(self.borel_sector(), self.k(), (eps * t).arg())
            .map_err(|e| AssemblyError::Direction { t, eps, reason: e.to_string() })
    }

    fn needed_r_out(&self, t_abs: f64, cosine: f64) -> f64 {
        let l = self.spec.max_l3() as i32;
        let reach = (self.opts.decay_budget / cosine.max(1e-3)).powf(1.0 / self.k() as f64);
        (t_abs * self.spec.q.powi(l) * reach).max(1e-3)
    }

    fn eps_key(&self, eps: C64) -> C64 {
        if self.eps_free {
            C64::new(0.0, 0.0)
        } else {
            eps
        }
    }

    /// Taylor expansions of `ω_0, …, ω_N` at the origin for this ε.
    pub fn taylor(&self, eps: C64) -> Result<Arc<TaylorFamily>> {
        let e = self.eps_key(eps);
        let key = (e.re.to_bits(), e.im.to_bits());
        if let Some(f) = self.taylor.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let fam = Arc::new(TaylorFamily::numeric(&self.spec, eps, self.n_max, &self.opts.taylor)?);
        self.taylor.lock().unwrap().insert(key, fam.clone());
        Ok(fam)
    }

    /// Coefficients on direction `gamma` reaching at least `r_out`.
    pub fn ray_family(&self, eps: C64, gamma: f64, r_out: f64) -> Result<Arc<RayFamily>> {
        let key = key(self.eps_key(eps), gamma);
        if let Some(f) = self.families.lock().unwrap().get(&key) {
            if f.r_out >= r_out {
                return Ok(f.clone());
            }
        }
        let rays = solve_ray(&self.spec, gamma, eps, self.n_max, r_out, &self.opts.solver)?;
        let fam = Arc::new(RayFamily::new(eps, gamma, r_out, self.k(), rays, self.opts.solver.order));
        self.families.lock().unwrap().insert(key, fam.clone());
        Ok(fam)
    }

    /// Run `f` on a family long enough for it, growing the family when the
    /// transform reports that its truncation radius is out of reach.
    fn with_family<F>(&self, eps: C64, gamma: f64, big_t: C64, start: f64, f: F) -> Result<C64>
    where
        F: Fn(&RayFamily) -> Result<C64>,
    {
        let cosine = (self.k() as f64 * (gamma - big_t.arg())).cos();
        let shift = self.spec.q.powi(self.spec.max_l3() as i32);
        let mut r_out = self.needed_r_out(big_t.norm(), cosine).max(start * shift * 4.0);
        for _ in 0..8 {
            let fam = self.ray_family(eps, gamma, r_out)?;
            match f(&fam) {
                Err(AssemblyError::Laplace(LaplaceError::Range { needed, .. })) => {
                    r_out = fam.r_out.max(needed / shift) * 1.5;
                }
                other => return other,
            }
        }
        Err(AssemblyError::Solver(SolverError::Resource { required: r_out, cap: self.opts.solver.radius_cap }))
    }

    /// `L_k(weight · ω_n)(T)` on direction `gamma`.
    pub fn transform(&self, n: usize, weight: &Weight, eps: C64, gamma: f64, big_t: C64) -> Result<C64> {
        self.with_family(eps, gamma, big_t, 0.0, |fam| fam.laplace(n, weight, big_t, &self.opts.laplace))
    }

    /// The part of `L_k(ω_n)(T)` on direction `gamma` beyond radius `start`.
    pub fn transform_tail(&self, n: usize, eps: C64, gamma: f64, big_t: C64, start: f64) -> Result<C64> {
        self.with_family(eps, gamma, big_t, start, |fam| fam.laplace_tail(n, &Weight::One, big_t, start, &self.opts.laplace))
    }

    /// `u_{p,n}(t, ε)` for `n = 0..=N` along `gamma`.
    pub fn coefficients_along(&self, t: C64, eps: C64, gamma: f64) -> Result<Vec<C64>> {
        (0..=self.n_max).map(|n| self.transform(n, &Weight::One, eps, gamma, eps * t)).collect()
    }

    /// `u_{p,n}(t, ε)` for `n = 0..=N` on the admissible direction (cached probes first).
    pub fn coefficients(&self, t: C64, eps: C64) -> Result<Vec<C64>> {
        if let Some(pv) = self.probes.iter().find(|pv| pv.t == t && pv.eps == eps) {
            return Ok(pv.coefficients.clone());
        }
        self.check_domain(t, eps)?;
        let (gamma, _) = self.direction(t, eps)?;
        self.coefficients_along(t, eps, gamma)
    }

    /// Sum the z-series from given coefficients.
    pub fn sum_series(&self, coefficients: &[C64], z: C64) -> Evaluation {
        let mut terms = Vec::with_capacity(coefficients.len());
        let mut value = C64::new(0.0, 0.0);
        for (n, c) in coefficients.iter().enumerate() {
            let term = if *c == C64::new(0.0, 0.0) {
                C64::new(0.0, 0.0)
            } else if z == C64::new(0.0, 0.0) {
                if n == 0 { *c } else { C64::new(0.0, 0.0) }
            } else {
                c * (z.ln() * n as f64 - ln_factorial(n)).exp()
            };
            value += term;
            terms.push(term);
        }
        let sizes: Vec<f64> = terms.iter().map(|c| c.norm()).collect();
        Evaluation { value, remainder: geometric_tail(&sizes), terms }
    }

    pub fn check_z(&self, z: C64) -> Result<()> {
        if !(z.norm() < self.r1) {
            return Err(AssemblyError::Domain(format!("|z| = {} is outside the disc of radius {}", z.norm(), self.r1)));
        }
        Ok(())
    }

    pub fn evaluate(&self, t: C64, z: C64, eps: C64) -> Result<Evaluation> {
        self.check_domain(t, eps)?;
        self.check_z(z)?;
        let c = self.coefficients(t, eps)?;
        Ok(self.sum_series(&c, z))
    }

    /// CSV rows `t_re,t_im,z_re,z_im,eps_re,eps_im,u_re,u_im,remainder` for every cached probe and every `z`.
    pub fn to_csv(&self, zs: &[C64]) -> String {
        let mut out = String::from("t_re,t_im,z_re,z_im,eps_re,eps_im,u_re,u_im,remainder\n");
        for pv in &self.probes {
            for z in zs {
                let e = self.sum_series(&pv.coefficients, *z);
                let _ = writeln!(
                    out,
                    "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                    pv.t.re, pv.t.im, z.re, z.im, pv.eps.re, pv.eps.im, e.value.re, e.value.im, e.remainder
                );
            }
        }
        out
    }
}

const R1_MIN_TERMS: usize = 8;

/// `R₁ = R/2` with `R` from the sectorial growth fit of the coefficients on
/// one direction; the z-series then converges geometrically on `D_{R₁}`.
fn estimate_r1(sol: &SectorialSolution, eps: C64, gamma: f64) -> Result<f64> {
    // a short truncation says nothing about the growth rate
    let n_max = sol.n_max.max(R1_MIN_TERMS);
    let rays = solve_ray(&sol.spec, gamma, eps, n_max, 1.0, &sol.opts.solver)?;
    let cf = CoefficientFamily {
        p: sol.p,
        gamma,
        eps,
        n_max,
        r_out: 1.0,
        r0: 0.0,
        q: sol.spec.q,
        s: sol.spec.s as usize,
        rays,
        disc_rays: Vec::new(),
        order: sol.opts.solver.order,
    };
    let report = verify_coeff_bounds(&cf, GrowthBound::Sectorial, sol.spec.delta, sol.spec.k1)?;
    let r = report.constants.get("R").copied().unwrap_or(f64::INFINITY);
    Ok(if r.is_finite() { 0.5 * r } else { 1.0 })
}

/// Build `u_p` and cache its coefficients on `probes`.
pub fn assemble(
    spec: &ProblemSpec,
    config: &AdmissibleConfig,
    p: usize,
    probes: &[(C64, C64)],
    n_max: usize,
    opts: &AssemblyOptions,
) -> Result<SectorialSolution> {
    if p >= config.borel_sectors.len() {
        return Err(AssemblyError::Domain(format!("no sector {p} in the configuration")));
    }
    if n_max < spec.s as usize {
        return Err(AssemblyError::Domain(format!("truncation N = {n_max} below S = {}", spec.s)));
    }
    let mut sol = SectorialSolution {
        variant: config.variant,
        p,
        n_max,
        spec: spec.clone(),
        config: config.clone(),
        opts: *opts,
        r1: opts.r1.unwrap_or(f64::INFINITY),
        probes: Vec::new(),
        eps_free: spec.borel_data_eps_free(),
        families: Mutex::new(HashMap::new()),
        taylor: Mutex::new(HashMap::new()),
    };
    let mut values = Vec::with_capacity(probes.len());
    for &(t, eps) in probes {
        sol.check_domain(t, eps)?;
        let (gamma, margin) = sol.direction(t, eps)?;
        let coefficients = sol.coefficients_along(t, eps, gamma)?;
        values.push(ProbeValue { t, eps, gamma, margin, coefficients });
    }
    sol.probes = values;
    if opts.r1.is_none() {
        let (eps, gamma) = match sol.probes.first() {
            Some(pv) => (pv.eps, pv.gamma),
            None => (C64::new(0.5 * spec.eps0, 0.0), config.borel_sectors[p].bisector),
        };
        sol.r1 = estimate_r1(&sol, eps, gamma)?;
    }
    Ok(sol)
}

/// `u_p(t, z, ε)` with its tail estimate.
pub fn evaluate(sol: &SectorialSolution, t: C64, z: C64, eps: C64) -> Result<Evaluation> {
    sol.evaluate(t, z, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_of_geometric_terms() {
        let terms: Vec<f64> = (0..6).map(|n| 0.5f64.powi(n)).collect();
        let est = geometric_tail(&terms);
        assert!((est - 0.5f64.powi(6) / 0.5).abs() < 1e-15);
        assert_eq!(geometric_tail(&[0.0, 0.0]), 0.0);
        assert!(geometric_tail(&[1.0, 2.0]).is_infinite());
        // alternating zeros use the stride between nonzero terms
        let est = geometric_tail(&[1.0, 0.0, 0.25, 0.0, 0.0625]);
        assert!((est - 0.0625 * 0.5 / 0.5).abs() < 1e-15);
    }
}
