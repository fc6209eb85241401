//! Truncated power series of `ω_n` at `u = 0`, with coefficients kept as
//! polynomials in ε. Coefficients are stored scaled by `ρ_nʲ`, where `ρ_n` is a
//! fixed fraction of the radius of the disc on which `ω_n` is analytic, so the
//! stored values decay geometrically and never overflow.

use numerics_core::{ln_gamma, C64};
use problem_model::ProblemSpec;

use crate::ops::{singular_depths, Recursion};
use crate::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorOptions {
    /// `ρ_n = theta · r_s(n)` with `r_s(n)` the analyticity radius of `ω_n`.
    pub theta: f64,
    /// Number of Taylor terms kept per coefficient.
    pub terms: usize,
    /// Highest power of ε retained in the formal coefficients.
    pub eps_degree: usize,
}

impl Default for TaylorOptions {
    fn default() -> Self {
        let theta: f64 = 0.9;
        TaylorOptions { theta, terms: (1e-18f64.ln() / theta.ln()).ceil() as usize, eps_degree: 32 }
    }
}

type EpsSeries = Vec<C64>;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn series_mul(a: &[C64], b: &[C64], cap: usize) -> EpsSeries {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(cap + 1);
    let mut out = vec![zero(); len];
    for (i, x) in a.iter().enumerate() {
        if *x == zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn add_scaled(acc: &mut EpsSeries, a: &[C64], s: C64) {
    if acc.len() < a.len() {
        acc.resize(a.len(), zero());
    }
    for (x, y) in acc.iter_mut().zip(a) {
        *x += y * s;
    }
}

fn eval_eps(a: &[C64], eps: C64) -> C64 {
    a.iter().rev().fold(zero(), |acc, c| acc * eps + c)
}

/// Taylor data for `ω_0, …, ω_N`.
#[derive(Debug, Clone)]
pub struct TaylorFamily {
    pub k: u32,
    /// Scaling radius per coefficient.
    pub rho: Vec<f64>,
    /// `coeffs[n][j]`: ε-polynomial of `a_{n,j} ρ_nʲ`.
    coeffs: Vec<Vec<EpsSeries>>,
    /// ε at which the family was evaluated, or `None` for formal coefficients.
    pub eps: Option<C64>,
}

impl TaylorFamily {
    /// Coefficients as polynomials in ε.
    pub fn formal(spec: &ProblemSpec, n_max: usize, opts: &TaylorOptions) -> Result<Self> {
        Self::build(spec, None, n_max, opts)
    }

    /// Coefficients at a fixed ε.
    pub fn numeric(spec: &ProblemSpec, eps: C64, n_max: usize, opts: &TaylorOptions) -> Result<Self> {
        Self::build(spec, Some(eps), n_max, opts)
    }

    fn build(spec: &ProblemSpec, eps: Option<C64>, n_max: usize, opts: &TaylorOptions) -> Result<Self> {
        if !(opts.theta > 0.0 && opts.theta < 1.0) {
            return Err(SolverError::Invalid(format!("Taylor radius fraction {} must lie in (0, 1)", opts.theta)));
        }
        let rec = Recursion::new(spec, eps.unwrap_or(zero()))?;
        if spec.literal_k1_exponent && spec.k1.fract() != 0.0 && rec.ops.iter().any(|o| o.l0 == 0 && o.l1 > 0) {
            return Err(SolverError::Invalid(format!(
                "the literal multiplier u^(k1 l1) with k1 = {} has no power series at 0",
                spec.k1
            )));
        }
        let k = spec.k;
        let kf = k as f64;
        let m_terms = opts.terms.max(2);
        let cap = if eps.is_some() { 0 } else { opts.eps_degree };
        let roots = sector_geometry::roots_of_borel_symbol(&spec.p, k)?;
        let min_root = roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
        let depths = singular_depths(&rec, n_max);
        let rho: Vec<f64> = depths
            .iter()
            .map(|d| opts.theta * min_root * spec.q.powi(-(d.unwrap_or(0) as i32)))
            .collect();

        let as_series = |c: &[C64]| -> EpsSeries {
            match eps {
                Some(e) => vec![eval_eps(c, e)],
                None => c.iter().take(cap + 1).copied().collect(),
            }
        };

        let s = spec.s as usize;
        let mut coeffs: Vec<Vec<EpsSeries>> = Vec::with_capacity(n_max + 1);
        for i in 0..s.min(n_max + 1) {
            let mut row = vec![Vec::new(); m_terms];
            for (h, p) in spec.cauchy.terms(i as u32) {
                if (h as usize) < m_terms {
                    let mut c = as_series(p.coeffs());
                    let sc = rho[i].powi(h as i32);
                    c.iter_mut().for_each(|x| *x *= sc);
                    row[h as usize] = c;
                }
            }
            coeffs.push(row);
        }

        // scaled symbol P(k (ρ v)^k) in the variable v = u/ρ is rebuilt per n
        let symbol = &rec.symbol;
        if symbol[0].norm() == 0.0 {
            return Err(SolverError::Invalid("P(0) = 0".into()));
        }
        for i in s..=n_max {
            let n = i - s;
            let rho_i = rho[i];
            let mut rhs: Vec<EpsSeries> = vec![Vec::new(); m_terms];
            for op in &rec.ops {
                if op.h as usize > n {
                    continue;
                }
                let m = n - op.h as usize + op.l2 as usize;
                let ff: f64 = ((n - op.h as usize + 1)..=n).map(|x| x as f64).product();
                let coeff = as_series(&op.coeff_poly);
                let dil = spec.q.powi(op.l3 as i32) * rho_i / rho[m];
                let (shift, mult) = if op.l0 == 0 && spec.literal_k1_exponent {
                    let e = spec.k1 as usize * op.l1 as usize;
                    let mult = kf.powi(op.l1 as i32) * spec.q.powf(op.l3 as f64 * spec.k1 * op.l1 as f64);
                    (e, mult * rho_i.powi(e as i32))
                } else {
                    let e = k as usize * op.l1 as usize;
                    let mult = (kf * spec.q.powf(kf * op.l3 as f64)).powi(op.l1 as i32);
                    (e, mult * rho_i.powi(e as i32))
                };
                // g_J with J = j + shift, scaled to ρ_i
                let src = &coeffs[m];
                let mut dpow = 1.0;
                for j in 0..m_terms {
                    if j > 0 {
                        dpow *= dil;
                    }
                    let jj = j + shift;
                    if src[j].is_empty() || dpow == 0.0 {
                        continue;
                    }
                    let (target, weight) = if op.l0 == 0 {
                        (jj, mult * dpow)
                    } else {
                        if jj == 0 {
                            return Err(SolverError::Invalid("convolution of a function not vanishing at 0".into()));
                        }
                        let l0 = op.l0 as usize;
                        let ratio = (ln_gamma(jj as f64 / kf)? - ln_gamma((jj + l0) as f64 / kf)?).exp();
                        (jj + l0, mult * dpow * ratio * rho_i.powi(l0 as i32))
                    };
                    if target >= m_terms {
                        continue;
                    }
                    let term = series_mul(&coeff, &src[j], cap);
                    add_scaled(&mut rhs[target], &term, C64::new(ff * weight, 0.0));
                }
            }
            // divide by the scaled symbol
            let p_hat: Vec<C64> = symbol.iter().enumerate().map(|(d, c)| c * rho_i.powi(d as i32)).collect();
            let inv0 = 1.0 / p_hat[0];
            let mut out: Vec<EpsSeries> = vec![Vec::new(); m_terms];
            for jj in 0..m_terms {
                let mut acc = rhs[jj].clone();
                for d in 1..p_hat.len().min(jj + 1) {
                    if p_hat[d] != zero() && !out[jj - d].is_empty() {
                        add_scaled(&mut acc, &out[jj - d], -p_hat[d]);
                    }
                }
                acc.iter_mut().for_each(|x| *x *= inv0);
                out[jj] = acc;
            }
            coeffs.push(out);
        }
        Ok(TaylorFamily { k, rho, coeffs, eps })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn terms(&self) -> usize {
        self.coeffs.first().map_or(0, |c| c.len())
    }

    /// `a_{n,j}` as an ε-polynomial (unscaled).
    pub fn coefficient(&self, n: usize, j: usize) -> EpsSeries {
        let s = self.rho[n].powi(-(j as i32));
        self.coeffs[n][j].iter().map(|c| c * s).collect()
    }

    /// `ω_n(u, ε)` from the series; `|u|` may not exceed `ρ_n`.
    pub fn eval(&self, n: usize, u: C64, eps: C64) -> Result<C64> {
        self.eval_filtered(n, u, eps, |_, _| true)
    }

    /// Sum of the terms `a_{n,j,e} εᵉ uʲ` with `keep(j, e)`.
    pub fn eval_filtered(&self, n: usize, u: C64, eps: C64, keep: impl Fn(usize, usize) -> bool) -> Result<C64> {
        let rho = self.rho[n];
        if u.norm() > rho * (1.0 + 1e-12) {
            return Err(SolverError::Coverage { index: n, radius: u.norm(), available: rho });
        }
        let v = u / rho;
        let mut acc = zero();
        let mut vp = C64::new(1.0, 0.0);
        for (j, c) in self.coeffs[n].iter().enumerate() {
            if !c.is_empty() {
                let term = match self.eps {
                    Some(_) => {
                        if keep(j, 0) {
                            c[0]
                        } else {
                            zero()
                        }
                    }
                    None => {
                        let mut t = zero();
                        let mut ep = C64::new(1.0, 0.0);
                        for (e, x) in c.iter().enumerate() {
                            if keep(j, e) {
                                t += x * ep;
                            }
                            ep *= eps;
                        }
                        t
                    }
                };
                acc += term * vp;
            }
            vp *= v;
        }
        Ok(acc)
    }

    /// Polynomial part `Σ_{j+e ≤ order} a_{n,j,e} εᵉ uʲ`, valid at any `u`.
    /// At a fixed ε the degree in ε is not tracked and only `j ≤ order` applies.
    pub fn eval_polynomial(&self, n: usize, u: C64, eps: C64, order: usize) -> C64 {
        let mut acc = zero();
        for j in 0..=order.min(self.terms().saturating_sub(1)) {
            let c = self.coefficient(n, j);
            let t = match self.eps {
                Some(_) => c.first().copied().unwrap_or(zero()),
                None => eval_eps(&c[..c.len().min(order - j + 1)], eps),
            };
            acc += t * u.powu(j as u32);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_second_coefficient() {
        let spec = ProblemSpec::toy1();
        let fam = TaylorFamily::formal(&spec, 4, &TaylorOptions::default()).unwrap();
        for &u in &[C64::new(0.3, 0.0), C64::from_polar(0.5, 1.0), C64::from_polar(0.85, 2.5)] {
            let got = fam.eval(2, u, C64::new(0.05, 0.0)).unwrap();
            let want = u * u * u * 1.2 / ((u * u * u + 1.0) * 2.0);
            assert!(((got - want) / want).norm() < 1e-13, "{u}: {got} vs {want}");
        }
        assert_eq!(fam.eval(1, C64::new(0.4, 0.0), C64::new(0.05, 0.0)).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn default_terms_reach_tolerance() {
        let o = TaylorOptions::default();
        assert!(o.theta.powi(o.terms as i32) <= 1e-18);
    }

    #[test]
    fn series_coefficients_of_second() {
        // q u³ / (2(1+u³)) = (q/2)(u³ − u⁶ + u⁹ − …)
        let fam = TaylorFamily::formal(&ProblemSpec::toy1(), 2, &TaylorOptions::default()).unwrap();
        let a3 = fam.coefficient(2, 3);
        let a6 = fam.coefficient(2, 6);
        assert!((a3[0] - C64::new(0.6, 0.0)).norm() < 1e-14);
        assert!((a6[0] + C64::new(0.6, 0.0)).norm() < 1e-14);
        assert!(fam.coefficient(2, 4)[..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn outside_disc_is_range_error() {
        let fam = TaylorFamily::formal(&ProblemSpec::toy1(), 2, &TaylorOptions::default()).unwrap();
        assert!(fam.eval(2, C64::new(0.95, 0.0), C64::new(0.0, 0.0)).is_err());
    }
}
