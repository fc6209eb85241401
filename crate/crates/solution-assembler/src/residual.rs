use numerics_core::{ln_gamma, C64};
use problem_model::ProblemSpec;
use sector_geometry::Variant;
use serde::Serialize;

use crate::family::Weight;
use crate::solution::SectorialSolution;
use crate::{AssemblyError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Left side minus right side of the equation for the truncated solution.
    pub residual: C64,
    /// `|residual| / scale`.
    pub relative: f64,
    /// Size of the right-side z-powers above `N − S`, which the truncated left side cannot match.
    pub remainder: f64,
    /// `|residual − tail| / scale`: what is left after removing the truncation tail.
    pub numerical: f64,
    /// Magnitude of the largest term.
    pub scale: f64,
    pub lhs: C64,
    pub rhs: C64,
    /// Largest relative gap between the Borel-side and finite-difference values of `ε^k t^{k+1}∂_t u_n`.
    pub commutation: f64,
}

fn z_power(z: C64, n: usize) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    (z.ln() * n as f64 - ln_gamma(n as f64 + 1.0).unwrap_or(0.0)).exp()
}

fn check_t(sol: &SectorialSolution, t: C64) -> Result<()> {
    let dom = match sol.variant {
        Variant::EpsilonCovering => &sol.config.companion,
        Variant::TCovering => &sol.config.covering.sectors[sol.p],
    };
    if !dom.contains(t) {
        return Err(AssemblyError::Domain(format!("shifted time {t} leaves the t-domain")));
    }
    Ok(())
}

/// Borel-side and finite-difference values of `ε^k t^{k+1}∂_t u_n(t, ε)` on
/// direction `gamma`, with their relative gap. The difference quotient runs
/// along `arg t` with two Richardson levels.
pub fn borel_laplace_commutation(sol: &SectorialSolution, n: usize, t: C64, eps: C64, gamma: f64) -> Result<(C64, C64, f64)> {
    let k = sol.k();
    let big_t = eps * t;
    let borel = sol.transform(n, &Weight::KPower(1), eps, gamma, big_t)?;
    let dir = C64::from_polar(1.0, t.arg());
    let u = |s: f64| sol.transform(n, &Weight::One, eps, gamma, eps * (t + dir * s));
    let central = |h: f64| -> Result<C64> { Ok((u(h)? - u(-h)?) / (dir * (2.0 * h))) };
    let h = 0.02 * t.norm();
    let d1 = central(h)?;
    let d2 = central(h / 2.0)?;
    let d3 = central(h / 4.0)?;
    let r1 = (d2 * 4.0 - d1) / 3.0;
    let r2 = (d3 * 4.0 - d2) / 3.0;
    let deriv = (r2 * 16.0 - r1) / 15.0;
    let fd = eps.powu(k) * t.powu(k + 1) * deriv;
    let scale = borel.norm().max(fd.norm());
    let gap = if scale == 0.0 { 0.0 } else { (borel - fd).norm() / scale };
    Ok((borel, fd, gap))
}

/// Residual of the equation for the truncated `u_p` at `(t, z, ε)`.
///
/// `∂_z^j` shifts the coefficient index, and each `ε^k t^{k+1}∂_t`
/// multiplies `ω_n` by `k u^k` before the transform.
pub fn pde_residual(sol: &SectorialSolution, spec: &ProblemSpec, t: C64, z: C64, eps: C64) -> Result<ResidualReport> {
    sol.check_domain(t, eps)?;
    sol.check_z(z)?;
    for term in &spec.terms {
        check_t(sol, t * spec.q.powi(term.l3 as i32))?;
    }
    let (gamma, _) = sol.direction(t, eps)?;
    let n_max = sol.n_max;
    let s = spec.s as usize;
    let big_t = eps * t;
    let zero = C64::new(0.0, 0.0);

    let symbol = Weight::Symbol(spec.borel_symbol_coeffs());
    let mut lhs = zero;
    for n in 0..=n_max - s {
        lhs += sol.transform(n + s, &symbol, eps, gamma, big_t)? * z_power(z, n);
    }

    let mut rhs = zero;
    let mut tail = zero;
    let mut scale = lhs.norm();
    for term in &spec.terms {
        let l2 = term.l2 as usize;
        if l2 > n_max {
            continue;
        }
        let weight = Weight::KPower(term.l1);
        let shifted = big_t * spec.q.powi(term.l3 as i32);
        let pre = eps.powu(term.delta) * t.powu(term.l0);
        let mut sum = zero;
        for m in 0..=n_max - l2 {
            let v = sol.transform(m + l2, &weight, eps, gamma, shifted)?;
            if v == zero {
                continue;
            }
            for (&h, poly) in &term.c {
                let c = pre * poly.eval(eps) * v * z_power(z, m) * z.powu(h);
                sum += c;
                if m + h as usize > n_max - s {
                    tail += c;
                }
            }
        }
        scale = scale.max(sum.norm());
        rhs += sum;
    }

    let mut commutation: f64 = 0.0;
    for n in 0..=n_max {
        commutation = commutation.max(borel_laplace_commutation(sol, n, t, eps, gamma)?.2);
    }

    let residual = lhs - rhs;
    let rel = |x: f64| if scale == 0.0 { 0.0 } else { x / scale };
    Ok(ResidualReport {
        residual,
        relative: rel(residual.norm()),
        remainder: rel(tail.norm()),
        numerical: rel((residual + tail).norm()),
        scale,
        lhs,
        rhs,
        commutation,
    })
}
