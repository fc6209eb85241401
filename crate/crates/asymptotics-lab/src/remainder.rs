use std::collections::HashMap;

use borel_solver::{TaylorFamily, TaylorOptions};
use numerics_core::{gamma_real, ln_gamma, C64};
use problem_model::ProblemSpec;
use sector_geometry::{choose_direction, Variant};
use serde::Serialize;
use solution_assembler::{AssemblyError, SectorialSolution, Weight};

use crate::flatness::{LN_CONST_CAP, LN_RATE_RANGE};
use crate::lp::fit_envelope;
use crate::norm::{series_norm, BaseVariable, NormSpec};
use crate::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RsMode {
    /// `C M^{N+1} Γ((N+1)/k)`.
    Gevrey,
    /// The Gevrey bound times `q^{(N+1)²/2}`.
    Mixed,
}

/// `‖u_p − Σ_{m ≤ N} û_m x^m‖ / |x|^{N+1}` at one probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderSample {
    pub order: usize,
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsReport {
    pub mode: RsMode,
    pub k: u32,
    pub q: f64,
    pub c: Option<f64>,
    pub m: Option<f64>,
    pub pass: bool,
    pub samples: usize,
    /// Samples with a zero remainder, which constrain nothing.
    pub zero_samples: usize,
    pub min_slack: Option<f64>,
    pub orders: Vec<usize>,
}

/// Smallest `(C, M)` with every sample under the chosen envelope, as the
/// total-slack minimiser inside the caps.
pub fn rs_error_bound_check(samples: &[RemainderSample], mode: RsMode, k: u32, q: f64) -> Result<RsReport> {
    if k == 0 || !(q > 1.0) {
        return Err(LabError::Domain(format!("need k ≥ 1 and q > 1, got k = {k}, q = {q}")));
    }
    if let Some(s) = samples.iter().find(|s| !(s.value >= 0.0) || !(s.x > 0.0)) {
        return Err(LabError::Domain(format!("bad remainder sample {s:?}")));
    }
    let mut orders: Vec<usize> = samples.iter().map(|s| s.order).collect();
    orders.sort_unstable();
    orders.dedup();
    let rows: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.value > 0.0)
        .map(|s| {
            let m = (s.order + 1) as f64;
            let mixed = if mode == RsMode::Mixed { 0.5 * m * m * q.ln() } else { 0.0 };
            (m, s.value.ln() - ln_gamma(m / k as f64).unwrap_or(f64::NAN) - mixed)
        })
        .collect();
    let mut report = RsReport {
        mode,
        k,
        q,
        c: None,
        m: None,
        pass: false,
        samples: samples.len(),
        zero_samples: samples.len() - rows.len(),
        min_slack: None,
        orders,
    };
    if rows.is_empty() {
        report.pass = !samples.is_empty();
        report.c = Some(0.0);
        return Ok(report);
    }
    if let Some((lc, lm)) = fit_envelope(&rows, LN_CONST_CAP, LN_RATE_RANGE.0, LN_RATE_RANGE.1) {
        let slack = rows.iter().map(|(m, c)| lc + m * lm - c).fold(f64::INFINITY, f64::min);
        report.c = Some(lc.exp());
        report.m = Some(lm.exp());
        report.min_slack = Some(slack);
        report.pass = slack >= -1e-9;
    }
    Ok(report)
}

/// Formal expansion of `u_{p,n}` in ε (or t), read off the Taylor coefficients
/// of `ω_n` at the origin: `L_k(uʲ)(T) = Γ(j/k) Tʲ` termwise.
#[derive(Debug, Clone)]
pub struct FormalExpansion {
    pub k: u32,
    pub variant: Variant,
    pub max_order: usize,
    /// `coeffs[n][j]`: the ε-polynomial multiplying `uʲ` in `ω_n`.
    coeffs: Vec<Vec<Vec<C64>>>,
    gammas: Vec<f64>,
}

impl FormalExpansion {
    pub fn new(spec: &ProblemSpec, n_max: usize, max_order: usize, variant: Variant) -> Result<Self> {
        let opts = TaylorOptions { terms: max_order + 2, ..TaylorOptions::default() };
        let fam = TaylorFamily::formal(spec, n_max, &opts)?;
        let coeffs = (0..=n_max).map(|n| (0..=max_order).map(|j| fam.coefficient(n, j)).collect()).collect();
        let gammas = (0..=max_order)
            .map(|j| if j == 0 { 0.0 } else { gamma_real(j as f64 / spec.k as f64).unwrap_or(f64::NAN) })
            .collect();
        Ok(FormalExpansion { k: spec.k, variant, max_order, coeffs, gammas })
    }

    /// `Σ_{m ≤ order} û_{n,m}(·) x^m` at `(t, ε)`.
    pub fn partial_sum(&self, n: usize, t: C64, eps: C64, order: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, poly) in self.coeffs[n].iter().enumerate().skip(1) {
            if j > order {
                break;
            }
            let tj = (eps * t).powu(j as u32) * self.gammas[j];
            let c = match self.variant {
                // ε-degree of the term is j + e
                Variant::EpsilonCovering => {
                    let mut s = C64::new(0.0, 0.0);
                    let mut ep = C64::new(1.0, 0.0);
                    for x in poly.iter().take(order - j + 1) {
                        s += x * ep;
                        ep *= eps;
                    }
                    s
                }
                Variant::TCovering => poly.iter().rev().fold(C64::new(0.0, 0.0), |acc, x| acc * eps + x),
            };
            acc += c * tj;
        }
        acc
    }
}

/// Remainder samples for orders `orders` at probes of the covered variable,
/// with the transform direction fixed per probe from the base bisector.
pub fn remainder_samples(
    sol: &SectorialSolution,
    expansion: &FormalExpansion,
    norm: &NormSpec,
    orders: &[usize],
    probes: &[C64],
) -> Result<Vec<RemainderSample>> {
    let expected = match sol.variant {
        Variant::EpsilonCovering => BaseVariable::T,
        Variant::TCovering => BaseVariable::Epsilon,
    };
    if norm.base_variable != expected || expansion.variant != sol.variant {
        return Err(LabError::Domain("norm, expansion and solution disagree on the variant".into()));
    }
    if let Some(n) = orders.iter().find(|&&n| n > expansion.max_order) {
        return Err(LabError::Domain(format!("order {n} exceeds the expansion order {}", expansion.max_order)));
    }
    if norm.n_norm > sol.n_max {
        return Err(LabError::Domain(format!("norm truncation {} exceeds the solution truncation", norm.n_norm)));
    }
    let own = &sol.config.covering.sectors[sol.p];
    let grid = norm.grid();
    let mut out = Vec::new();
    for &x in probes {
        if !own.contains(x) {
            return Err(LabError::Domain(format!("probe {x} is outside covering sector {}", sol.p)));
        }
        let (gamma, _) = choose_direction(sol.borel_sector(), sol.k(), x.arg() + norm.base.bisector).map_err(|e| {
            LabError::Assembly(AssemblyError::Direction { t: x, eps: x, reason: e.to_string() })
        })?;
        let split = |b: C64| match sol.variant {
            Variant::EpsilonCovering => (b, x),
            Variant::TCovering => (x, b),
        };
        let mut values: HashMap<(u64, u64), Vec<C64>> = HashMap::new();
        for b in &grid {
            let (t, eps) = split(*b);
            let u = (0..=norm.n_norm)
                .map(|n| sol.transform(n, &Weight::One, eps, gamma, eps * t))
                .collect::<solution_assembler::Result<Vec<_>>>()?;
            values.insert((b.re.to_bits(), b.im.to_bits()), u);
        }
        for &order in orders {
            let v = series_norm(norm, |n, b| {
                let (t, eps) = split(b);
                let u = values[&(b.re.to_bits(), b.im.to_bits())][n];
                Ok(u - expansion.partial_sum(n, t, eps, order))
            })?;
            out.push(RemainderSample { order, x: x.norm(), value: v.value / x.norm().powi(order as i32 + 1) });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gevrey_samples(c: f64, m: f64) -> Vec<RemainderSample> {
        (0..5)
            .flat_map(|n| {
                [0.02, 0.05, 0.1].map(|x| RemainderSample {
                    order: n,
                    x,
                    value: c * m.powi(n as i32 + 1) * gamma_real((n + 1) as f64).unwrap(),
                })
            })
            .collect()
    }

    #[test]
    fn recovers_gevrey_constants() {
        let r = rs_error_bound_check(&gevrey_samples(3.0, 0.7), RsMode::Gevrey, 1, 1.2).unwrap();
        assert!(r.pass);
        assert!((r.c.unwrap() / 3.0 - 1.0).abs() < 0.05 && (r.m.unwrap() / 0.7 - 1.0).abs() < 0.05, "{r:?}");
        let mixed = rs_error_bound_check(&gevrey_samples(3.0, 0.7), RsMode::Mixed, 1, 1.2).unwrap();
        assert!(mixed.pass);
    }

    #[test]
    fn violating_fixture_fails() {
        let s: Vec<RemainderSample> = (0..6)
            .flat_map(|n| [0.02, 0.05].map(|x| RemainderSample { order: n, x, value: (((n + 1) * (n + 1) * (n + 1)) as f64).exp() }))
            .collect();
        for mode in [RsMode::Gevrey, RsMode::Mixed] {
            assert!(!rs_error_bound_check(&s, mode, 1, 1.2).unwrap().pass);
        }
    }

    #[test]
    fn toy_expansion_starts_with_the_datum() {
        let spec = ProblemSpec::toy1();
        let e = FormalExpansion::new(&spec, 4, 4, Variant::EpsilonCovering).unwrap();
        let (t, eps) = (C64::new(0.4, 0.1), C64::new(0.05, 0.02));
        // u_0 = εt exactly
        assert!((e.partial_sum(0, t, eps, 1) - eps * t).norm() < 1e-15);
        assert!((e.partial_sum(0, t, eps, 4) - eps * t).norm() < 1e-15);
        // ω₂ = q u³/2 + O(u⁶): û₂ starts at order 3 with Γ(3) q/2 t³
        assert_eq!(e.partial_sum(2, t, eps, 2), C64::new(0.0, 0.0));
        let want = (eps * t).powu(3) * 2.0 * 0.6;
        assert!((e.partial_sum(2, t, eps, 4) - want).norm() < 1e-15 * want.norm().max(1.0));
    }
}
