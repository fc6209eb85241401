use std::f64::consts::PI;

use borel_solver::TaylorFamily;
use numerics_core::{gauss_legendre, C64};
use sector_geometry::{angle_diff, choose_direction, Sector, Variant};
use serde::Serialize;
use solution_assembler::{AssemblyError, SectorialSolution};

use crate::heine::{cauchy_heine_coefficients, CocycleRay, HeineOptions};
use crate::norm::{series_norm, BaseVariable, NormSpec};
use crate::{LabError, Result};

/// One probe of `‖u_b − u_a‖` over the base sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleSample {
    /// The covered variable (ε or t) as `[re, im]`.
    pub probe: [f64; 2],
    pub magnitude: f64,
    pub norm: f64,
    pub tail: f64,
    pub sups: Vec<f64>,
    /// Transform directions used for the two solutions.
    pub directions: Option<(f64, f64)>,
    /// Smallest `cos(k(θ − arg εt))` over the connecting arc and the base grid.
    pub arc_margin: Option<f64>,
}

/// `(t, ε)` from a probe of the covered variable and a base point.
fn split(variant: Variant, probe: C64, base: C64) -> (C64, C64) {
    match variant {
        Variant::EpsilonCovering => (base, probe),
        Variant::TCovering => (probe, base),
    }
}

/// Directions for the two solutions at a probe, chosen once for the whole
/// base sector from the phase at its bisector.
pub fn cocycle_directions(sol_a: &SectorialSolution, sol_b: &SectorialSolution, probe: C64, base: &Sector) -> Result<(f64, f64)> {
    let phase = probe.arg() + base.bisector;
    let pick = |sol: &SectorialSolution| -> Result<f64> {
        let (t, eps) = split(sol.variant, probe, C64::from_polar(1.0, base.bisector));
        choose_direction(sol.borel_sector(), sol.k(), phase)
            .map(|(g, _)| g)
            .map_err(|e| AssemblyError::Direction { t, eps, reason: e.to_string() }.into())
    };
    let ga = pick(sol_a)?;
    let gb = pick(sol_b)?;
    Ok((ga, ga + angle_diff(gb, ga)))
}

/// `k ∮ ω_n(u) exp(−(u/T)^k) du/u` over the arc `|u| = ρ` from `γ_a` to `γ_b`.
fn arc_integral(taylor: &TaylorFamily, n: usize, k: u32, rho: f64, ga: f64, gb: f64, eps: C64, big_t: C64) -> Result<C64> {
    let span = gb - ga;
    if span == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let kf = k as f64;
    let stiffness = kf * (rho / big_t.norm()).powf(kf) * span.abs();
    let panels = ((span.abs() / (10.0 * PI / 180.0)).ceil().max((stiffness / 3.0).ceil()) as usize).clamp(1, 4000);
    let rule = gauss_legendre(16);
    let width = span / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = ga + width * (p as f64 + 0.5);
        for (x, w) in rule.0.iter().zip(rule.1.iter()) {
            let u = C64::from_polar(rho, mid + 0.5 * width * x);
            let f = taylor.eval(n, u, eps)? * (-(u / big_t).powf(kf)).exp();
            acc += f * (w * 0.5 * width);
        }
    }
    Ok(acc * C64::new(0.0, kf))
}

/// `u_{b,n}(t, ε) − u_{a,n}(t, ε)` on fixed directions, computed without
/// differencing the two transforms: both are split at the radius `ρ_n` where
/// the Taylor expansion of `ω_n` is valid, the two tails are computed on their
/// own rays, and the inner segments are joined by an arc of radius `ρ_n`.
pub fn theta_coefficient(sol_a: &SectorialSolution, sol_b: &SectorialSolution, n: usize, t: C64, eps: C64, directions: (f64, f64)) -> Result<C64> {
    let (ga, gb) = directions;
    let big_t = eps * t;
    let taylor = sol_a.taylor(eps)?;
    let rho = taylor.rho[n];
    let tail_a = sol_a.transform_tail(n, eps, ga, big_t, rho)?;
    let tail_b = sol_b.transform_tail(n, eps, gb, big_t, rho)?;
    let arc = arc_integral(&taylor, n, sol_a.k(), rho, ga, gb, eps, big_t)?;
    Ok(tail_b - tail_a + arc)
}

/// Cocycle samples from an arbitrary coefficient difference `diff(n, probe, base point)`.
pub fn cocycle_from<F>(probes: &[C64], norm: &NormSpec, mut diff: F) -> Result<Vec<CocycleSample>>
where
    F: FnMut(usize, C64, C64) -> Result<C64>,
{
    probes
        .iter()
        .map(|&x| {
            let v = series_norm(norm, |n, b| diff(n, x, b))?;
            Ok(CocycleSample {
                probe: [x.re, x.im],
                magnitude: x.norm(),
                norm: v.value,
                tail: v.tail,
                sups: v.sups,
                directions: None,
                arc_margin: None,
            })
        })
        .collect()
}

fn arc_margin(k: u32, ga: f64, gb: f64, phases: impl Iterator<Item = f64>) -> f64 {
    let kf = k as f64;
    let steps = 64;
    let mut worst = f64::INFINITY;
    for ph in phases {
        for i in 0..=steps {
            let th = ga + (gb - ga) * i as f64 / steps as f64;
            worst = worst.min((kf * (th - ph)).cos());
        }
    }
    worst
}

/// `‖u_b − u_a‖` under `norm` at each probe of the covered variable; the
/// probes must lie in the overlap of the two covering sectors.
pub fn cocycle(sol_a: &SectorialSolution, sol_b: &SectorialSolution, probes: &[C64], norm: &NormSpec) -> Result<Vec<CocycleSample>> {
    if sol_a.variant != sol_b.variant {
        return Err(LabError::Domain("the two solutions belong to different variants".into()));
    }
    let expected = match sol_a.variant {
        Variant::EpsilonCovering => BaseVariable::T,
        Variant::TCovering => BaseVariable::Epsilon,
    };
    if norm.base_variable != expected {
        return Err(LabError::Domain(format!("the norm must run over {expected:?} for this variant")));
    }
    if norm.n_norm > sol_a.n_max.min(sol_b.n_max) {
        return Err(LabError::Domain(format!("norm truncation {} exceeds the solution truncation", norm.n_norm)));
    }
    let sec_a = &sol_a.config.covering.sectors[sol_a.p];
    let sec_b = &sol_b.config.covering.sectors[sol_b.p];
    let grid = norm.grid();
    let mut out = Vec::with_capacity(probes.len());
    for &x in probes {
        if !(sec_a.contains(x) && sec_b.contains(x)) {
            return Err(LabError::Domain(format!("probe {x} is outside the overlap of sectors {} and {}", sol_a.p, sol_b.p)));
        }
        let dirs = cocycle_directions(sol_a, sol_b, x, &norm.base)?;
        let margin = arc_margin(sol_a.k(), dirs.0, dirs.1, grid.iter().map(|b| x.arg() + b.arg()));
        let mut s = cocycle_from(&[x], norm, |n, x, b| {
            let (t, eps) = split(sol_a.variant, x, b);
            theta_coefficient(sol_a, sol_b, n, t, eps, dirs)
        })?;
        let mut s = s.remove(0);
        s.directions = Some(dirs);
        s.arc_margin = Some(margin);
        out.push(s);
    }
    Ok(out)
}

/// Bisector and radius of the overlap of two covering sectors.
pub fn overlap_ray(a: &Sector, b: &Sector) -> Result<(f64, f64)> {
    let d = angle_diff(b.bisector, a.bisector);
    let lo = (-a.half_opening).max(d - b.half_opening);
    let hi = a.half_opening.min(d + b.half_opening);
    if lo >= hi {
        return Err(LabError::Domain("the two covering sectors do not overlap".into()));
    }
    let radius = match (a.radius, b.radius) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Err(LabError::Domain("the overlap is unbounded".into())),
    };
    Ok((a.bisector + 0.5 * (lo + hi), radius))
}

/// `ξ ↦ Θ_n(ξ)` on the overlap bisector of the two solutions' covering
/// sectors, at a fixed point `base_point` of the other variable.
pub fn cocycle_ray<'a>(sol_a: &'a SectorialSolution, sol_b: &'a SectorialSolution, n: usize, base_point: C64) -> Result<CocycleRay<'a>> {
    if sol_a.variant != sol_b.variant {
        return Err(LabError::Domain("the two solutions belong to different variants".into()));
    }
    if n > sol_a.n_max.min(sol_b.n_max) {
        return Err(LabError::Domain(format!("coefficient {n} exceeds the solution truncation")));
    }
    let (direction, radius) = overlap_ray(&sol_a.config.covering.sectors[sol_a.p], &sol_b.config.covering.sectors[sol_b.p])?;
    let base = Sector::new(base_point.arg(), 1e-9, Some(base_point.norm()))?;
    let dirs = cocycle_directions(sol_a, sol_b, C64::from_polar(1.0, direction), &base)?;
    let variant = sol_a.variant;
    Ok(CocycleRay {
        direction,
        radius,
        theta: Box::new(move |xi| {
            let (t, eps) = split(variant, xi, base_point);
            theta_coefficient(sol_a, sol_b, n, t, eps, dirs)
        }),
    })
}

/// Cauchy–Heine coefficients `a_0..=a_{m_max}` of the z-coefficient `n`
/// from every neighbouring pair `(p, p+1 mod ς)` of a full covering.
pub fn heine_coefficients(sols: &[SectorialSolution], n: usize, base_point: C64, m_max: usize, opts: &HeineOptions) -> Result<Vec<C64>> {
    if sols.len() < 2 {
        return Err(LabError::InsufficientData("need the solutions of at least two sectors".into()));
    }
    let mut rays = (0..sols.len())
        .map(|p| cocycle_ray(&sols[p], &sols[(p + 1) % sols.len()], n, base_point))
        .collect::<Result<Vec<_>>>()?;
    cauchy_heine_coefficients(&mut rays, m_max, opts)
}
