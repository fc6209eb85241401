use numerics_core::{gamma_real, integrate_jacobi_with, JacobiRule, NumericsError, C64};
use problem_model::ProblemSpec;

use crate::{Result, SolverError};

/// One `(term, h)` pair of the recursion with its ε-dependent prefactor
/// `ε^{Δ_ℓ − ℓ₀} c_{ℓ,h}(ε)` already evaluated.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TermOp {
    pub l0: u32,
    pub l1: u32,
    pub l2: u32,
    pub l3: u32,
    pub h: u32,
    pub coeff: C64,
    /// ε-polynomial form of `coeff`, used by the formal power-series recursion.
    pub coeff_poly: Vec<C64>,
    pub gamma_l0: f64,
}

/// Recursion data for one problem at one ε.
#[derive(Debug, Clone)]
pub struct Recursion {
    pub k: u32,
    pub s: u32,
    pub q: f64,
    pub eps: C64,
    pub(crate) ops: Vec<TermOp>,
    /// Coefficients of `u ↦ P(k u^k)`.
    pub symbol: Vec<C64>,
    pub small_divisor: f64,
    pub jacobi: JacobiRule,
    /// Exponent used in the `ℓ₀ = 0` multiplier when reproducing the literal text.
    pub literal_exponent: Option<f64>,
    spec: ProblemSpec,
}

fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl Recursion {
    pub fn new(spec: &ProblemSpec, eps: C64) -> Result<Self> {
        spec.check_structure().map_err(|e| SolverError::Invalid(e.to_string()))?;
        let k = spec.k;
        let mut ops = Vec::new();
        for t in &spec.terms {
            if t.l2 >= spec.s {
                return Err(SolverError::Invalid(format!("term with l2 = {} references order >= S = {}", t.l2, spec.s)));
            }
            if t.delta < t.l0 {
                return Err(SolverError::Invalid("term exponent Delta_l below l0".into()));
            }
            let pow = (t.delta - t.l0) as usize;
            let gamma_l0 = if t.l0 == 0 { 1.0 } else { gamma_real(t.l0 as f64 / k as f64)? };
            for (&h, c) in &t.c {
                let mut eps_pow = vec![C64::new(0.0, 0.0); pow + 1];
                eps_pow[pow] = C64::new(1.0, 0.0);
                let coeff_poly = poly_mul(&eps_pow, c.coeffs());
                let coeff = c.eval(eps) * eps.powu(pow as u32);
                ops.push(TermOp { l0: t.l0, l1: t.l1, l2: t.l2, l3: t.l3, h, coeff, coeff_poly, gamma_l0 });
            }
        }
        let literal_exponent = spec.literal_k1_exponent.then_some(spec.k1);
        Ok(Recursion {
            k,
            s: spec.s,
            q: spec.q,
            eps,
            ops,
            symbol: spec.borel_symbol_coeffs(),
            small_divisor: 1e-8,
            jacobi: JacobiRule::default(),
            literal_exponent,
            spec: spec.clone(),
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    /// Indices `m` referenced when computing `ω_{n+S}`.
    pub fn sources(&self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .ops
            .iter()
            .filter(|o| o.h as usize <= n)
            .map(|o| n - o.h as usize + o.l2 as usize)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Largest dilation exponent `ℓ₃` of any term.
    pub fn max_l3(&self) -> u32 {
        self.ops.iter().map(|o| o.l3).max().unwrap_or(0)
    }

    /// `min (S − ℓ₂ + h)` over all `(term, h)`: the smallest index gap of the recursion.
    pub fn min_gap(&self) -> u32 {
        self.ops.iter().map(|o| self.s - o.l2 + o.h).min().unwrap_or(self.s)
    }

    /// Initial data `P_j(u, ε)` for `j < S`.
    pub fn initial(&self, j: usize, u: C64) -> C64 {
        self.spec.cauchy.borel_value(j as u32, u, self.eps)
    }

    pub fn symbol_at(&self, u: C64) -> (C64, f64) {
        let mut v = C64::new(0.0, 0.0);
        let mut scale = 0.0;
        let r = u.norm();
        for (i, c) in self.symbol.iter().enumerate().rev() {
            v = v * u + c;
            scale += c.norm() * r.powi(i as i32);
        }
        (v, scale)
    }

    /// `ω_{n+S}(u)` given an evaluator `access(m, v)` of earlier coefficients
    /// at points `v` on the ray through `u`.
    pub fn step(&self, n: usize, access: &mut dyn FnMut(usize, C64) -> Result<C64>, u: C64) -> Result<C64> {
        if u.norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let k = self.k;
        let kf = k as f64;
        let mut total = C64::new(0.0, 0.0);
        for op in &self.ops {
            if op.h as usize > n {
                continue;
            }
            let m = n - op.h as usize + op.l2 as usize;
            let ff: f64 = ((n - op.h as usize + 1)..=n).map(|x| x as f64).product();
            let dil = self.q.powi(op.l3 as i32);
            let mult = kf * self.q.powf(kf * op.l3 as f64);
            let value = if op.l0 == 0 {
                let pre = match self.literal_exponent {
                    Some(e) => (C64::new(kf, 0.0) * (u * dil).powf(e)).powu(op.l1),
                    None => (u.powu(k) * mult).powu(op.l1),
                };
                if op.l1 == 0 {
                    access(m, u * dil)?
                } else {
                    pre * access(m, u * dil)?
                }
            } else {
                let alpha = op.l0 as f64 / kf;
                let inv_k = 1.0 / kf;
                let mut failure = None;
                let rule = JacobiRule { near_zero_power: k, ..self.jacobi };
                let integral = integrate_jacobi_with(
                    |tau| {
                        if failure.is_some() || tau == 0.0 {
                            return C64::new(0.0, 0.0);
                        }
                        let v = u * tau.powf(inv_k);
                        match access(m, v * dil) {
                            Ok(w) => {
                                let g = if op.l1 == 0 { w } else { (v.powu(k) * mult).powu(op.l1) * w };
                                g / tau
                            }
                            Err(e) => {
                                failure = Some(e);
                                C64::new(0.0, 0.0)
                            }
                        }
                    },
                    alpha,
                    rule,
                )
                .map_err(|e: NumericsError| SolverError::from(e))?;
                if let Some(e) = failure {
                    return Err(e);
                }
                u.powu(op.l0) * integral / op.gamma_l0
            };
            total += op.coeff * ff * value;
        }
        let (p, scale) = self.symbol_at(u);
        let floor = self.small_divisor * scale;
        if p.norm() < floor {
            return Err(SolverError::SmallDivisor { u, value: p.norm(), floor });
        }
        Ok(total / p)
    }
}

/// `ω_{n+S}(u, ε)` for a one-off evaluation.
pub fn recursion_step(
    spec: &ProblemSpec,
    n: usize,
    access: &mut dyn FnMut(usize, C64) -> Result<C64>,
    u: C64,
    eps: C64,
) -> Result<C64> {
    Recursion::new(spec, eps)?.step(n, access, u)
}

/// Lower bound on the order of vanishing of each `ω_n` at `u = 0`, read off
/// the shape of the recursion. `None` marks coefficients that vanish identically
/// for structural reasons.
pub fn valuations(rec: &Recursion, n_max: usize) -> Vec<Option<u32>> {
    let s = rec.s as usize;
    let mut val: Vec<Option<u32>> = Vec::with_capacity(n_max + 1);
    for i in 0..=n_max {
        if i < s {
            let v = rec.spec.cauchy.terms(i as u32).filter(|(_, p)| !p.is_zero()).map(|(h, _)| h).min();
            val.push(v);
            continue;
        }
        let n = i - s;
        let mut best: Option<u32> = None;
        for op in &rec.ops {
            if op.h as usize > n || op.coeff_poly.iter().all(|c| c.norm() == 0.0) {
                continue;
            }
            let m = n - op.h as usize + op.l2 as usize;
            if let Some(vm) = val[m] {
                let shift = match rec.literal_exponent {
                    Some(e) if op.l0 == 0 => (e * op.l1 as f64).round() as u32,
                    _ => rec.k * op.l1,
                };
                let v = vm + shift + op.l0;
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        val.push(best);
    }
    val
}

/// Depth `J(n)` of the singular set of `ω_n`: it is analytic on the disc of radius
/// `min|root| · q^{−J(n)}`. `None` marks coefficients that are entire (initial data).
pub fn singular_depths(rec: &Recursion, n_max: usize) -> Vec<Option<u32>> {
    let s = rec.s as usize;
    let mut depth: Vec<Option<u32>> = vec![None; n_max + 1];
    for i in s..=n_max {
        let mut j = 0;
        for op in &rec.ops {
            let n = i - s;
            if op.h as usize > n {
                continue;
            }
            let m = n - op.h as usize + op.l2 as usize;
            if let Some(dm) = depth[m] {
                j = j.max(dm + op.l3);
            }
        }
        depth[i] = Some(j);
    }
    depth
}
