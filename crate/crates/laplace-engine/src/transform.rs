use numerics_core::{gauss_legendre, GrowthEnvelope, RaySampling, C64};

use crate::{LaplaceError, Result};

/// Something that can be evaluated along a ray from the origin.
pub trait RayIntegrand {
    fn value(&self, u: C64) -> Result<C64>;

    /// Largest radius at which `value` is defined.
    fn reach(&self) -> f64 {
        f64::INFINITY
    }

    /// Growth bound used to place the truncation radius.
    fn envelope(&self) -> Option<GrowthEnvelope> {
        None
    }
}

impl<F: Fn(C64) -> C64> RayIntegrand for F {
    fn value(&self, u: C64) -> Result<C64> {
        Ok(self(u))
    }
}

/// A sampled ray evaluated by local interpolation, with a growth envelope
/// fitted to its samples unless one is supplied.
#[derive(Debug, Clone)]
pub struct Sampled<'a> {
    pub ray: &'a RaySampling,
    pub order: usize,
    pub envelope: GrowthEnvelope,
}

impl<'a> Sampled<'a> {
    pub fn new(ray: &'a RaySampling) -> Result<Self> {
        let samples: Vec<(f64, f64)> = ray.radii().iter().zip(ray.values()).map(|(r, v)| (*r, v.norm())).collect();
        let (envelope, _) = GrowthEnvelope::fit(&samples, 1.0, 1.0)?;
        Ok(Sampled { ray, order: 7, envelope })
    }

    pub fn with_envelope(ray: &'a RaySampling, envelope: GrowthEnvelope) -> Self {
        Sampled { ray, order: 7, envelope }
    }
}

impl RayIntegrand for Sampled<'_> {
    fn value(&self, u: C64) -> Result<C64> {
        Ok(self.ray.interpolate_order(u.norm(), self.order)?)
    }

    fn reach(&self) -> f64 {
        self.ray.max_radius()
    }

    fn envelope(&self) -> Option<GrowthEnvelope> {
        Some(self.envelope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceOptions {
    /// Required lower bound on `cos(k(γ − arg T))`.
    pub min_cosine: f64,
    /// Relative size of the discarded tail.
    pub tol: f64,
    /// Gauss–Legendre nodes per panel of unit width in `ln r`.
    pub nodes: usize,
    /// Inner cut as a fraction of `|T|`; the piece below it is taken as `k f(r_lo)`.
    pub inner_fraction: f64,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions { min_cosine: 1e-12, tol: 1e-10, nodes: 16, inner_fraction: 1e-8 }
    }
}

/// Radius beyond which `envelope(r)·exp(−c (r/|T|)^k)` stays below
/// `tol·envelope(|T|)`.
pub fn cut_radius(env: &GrowthEnvelope, k: u32, t_abs: f64, cosine: f64, tol: f64) -> f64 {
    cut_radius_from(env, k, t_abs, cosine, tol, t_abs)
}

/// Like [`cut_radius`], but relative to the integrand bound at `r_ref ≥ |T|`,
/// so that a tail starting far out keeps its own relative accuracy.
pub fn cut_radius_from(env: &GrowthEnvelope, k: u32, t_abs: f64, cosine: f64, tol: f64, r_ref: f64) -> f64 {
    let kf = k as f64;
    let kern = |r: f64| cosine * (r / t_abs).powf(kf);
    let r_ref = r_ref.max(t_abs);
    let target = tol.ln() + env.ln_value(r_ref) - if r_ref > t_abs { kern(r_ref) } else { 0.0 };
    let excess = |r: f64| env.ln_value(r) - kern(r) - target;
    let mut last_bad = r_ref;
    let mut r = r_ref;
    // scan far enough that the exponential has clearly won
    while r < r_ref * 1e8 {
        if excess(r) > 0.0 {
            last_bad = r;
        } else if r > 4.0 * last_bad && kern(r) - kern(r_ref).min(kern(r)) > 50.0 {
            break;
        }
        r *= 1.05;
    }
    last_bad * 1.05
}

/// `k ∫_0^{∞} f(r e^{iγ}) exp(−(r e^{iγ}/T)^k) dr/r`.
pub fn laplace_ray<F: RayIntegrand + ?Sized>(f: &F, k: u32, gamma: f64, t: C64, opts: &LaplaceOptions) -> Result<C64> {
    check_direction(k, gamma, t, opts)?;
    let r_lo = t.norm() * opts.inner_fraction;
    let dir = C64::from_polar(1.0, gamma);
    Ok(f.value(dir * r_lo)? * k as f64 + laplace_tail(f, k, gamma, t, r_lo, opts)?)
}

fn check_direction(k: u32, gamma: f64, t: C64, opts: &LaplaceOptions) -> Result<f64> {
    if k == 0 {
        return Err(LaplaceError::Domain("k must be positive".into()));
    }
    let t_abs = t.norm();
    if !(t_abs > 0.0) || !t_abs.is_finite() {
        return Err(LaplaceError::Domain(format!("T = {t} must be nonzero and finite")));
    }
    let cosine = (k as f64 * (gamma - t.arg())).cos();
    if cosine <= opts.min_cosine {
        return Err(LaplaceError::Direction { cosine, margin: opts.min_cosine });
    }
    Ok(cosine)
}

/// The part of the transform beyond radius `start`:
/// `k ∫_{start e^{iγ}}^{∞ e^{iγ}} f(u) exp(−(u/T)^k) du/u`.
pub fn laplace_tail<F: RayIntegrand + ?Sized>(f: &F, k: u32, gamma: f64, t: C64, start: f64, opts: &LaplaceOptions) -> Result<C64> {
    let cosine = check_direction(k, gamma, t, opts)?;
    if !(start > 0.0) || !start.is_finite() {
        return Err(LaplaceError::Domain(format!("tail start {start} must be positive and finite")));
    }
    let t_abs = t.norm();
    let kf = k as f64;
    let dir = C64::from_polar(1.0, gamma);
    let kernel = |r: f64| -> C64 { (-(dir * r / t).powf(kf)).exp() };
    let integrand = |x: f64| -> Result<C64> {
        let r = x.exp();
        Ok(f.value(dir * r)? * kernel(r) * kf)
    };

    let mut acc = C64::new(0.0, 0.0);
    let rule = gauss_legendre(opts.nodes);
    let (gx, gw) = (&rule.0, &rule.1);
    let panel = |a: f64, b: f64| -> Result<C64> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in gx.iter().zip(gw.iter()) {
            s += integrand(mid + half * x)? * w;
        }
        Ok(s * half)
    };

    let x_lo = start.ln();
    match f.envelope() {
        Some(env) => {
            let r_cut = cut_radius_from(&env, k, t_abs, cosine, opts.tol, start).max(start * std::f64::consts::E);
            if r_cut > f.reach() * (1.0 + 1e-12) {
                return Err(LaplaceError::Range { needed: r_cut, available: f.reach() });
            }
            let x_hi = r_cut.ln();
            // unit panels in ln r while the kernel is mild, narrower once (r/|T|)^k
            // changes by more than a few units per panel
            let mut a = x_lo;
            while a < x_hi {
                let rate = kf * (a.exp() / t_abs).powf(kf);
                let b = (a + (6.0 / rate).clamp(1e-3, 1.0)).min(x_hi);
                acc += panel(a, b)?;
                a = b;
            }
        }
        None => {
            // closed-form integrand: march until the kernel has won
            let mut a = x_lo;
            let mut quiet = 0;
            let decay0 = cosine * (start / t_abs).powf(kf);
            for _ in 0..4000 {
                let rate = kf * (a.exp() / t_abs).powf(kf);
                let b = a + (6.0 / rate).clamp(1e-3, 1.0);
                if b.exp() > f.reach() {
                    return Err(LaplaceError::Range { needed: b.exp(), available: f.reach() });
                }
                let p = panel(a, b)?;
                acc += p;
                let a_prev = a;
                a = b;
                let decay = cosine * (a.exp() / t_abs).powf(kf) - decay0.max(0.0);
                if decay > 40.0 && p.norm() / (b - a_prev) <= opts.tol * 1e-3 * acc.norm().max(1e-300) {
                    quiet += 1;
                    if quiet >= 2 {
                        return Ok(acc);
                    }
                } else if decay > 700.0 {
                    return Ok(acc);
                } else {
                    quiet = 0;
                }
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use numerics_core::{gamma_real, geometric_radii, RaySampling};
    use std::f64::consts::PI;

    fn opts() -> LaplaceOptions {
        LaplaceOptions::default()
    }

    #[test]
    fn tail_of_linear_integrand() {
        // ∫_ρ^∞ e^{−r/T} dr = T e^{−ρ/T}
        let f = |u: C64| u;
        let t = C64::new(0.3, 0.0);
        let got = laplace_tail(&f, 1, 0.0, t, 0.5, &LaplaceOptions::default()).unwrap();
        let want = 0.3 * (-0.5f64 / 0.3).exp();
        assert!((got.re - want).abs() < 1e-12 * want && got.im.abs() < 1e-15);
        // a tail far beyond |T| keeps its relative accuracy
        let small = C64::from_polar(0.01, 0.4);
        let got = laplace_tail(&f, 1, 0.0, small, 0.9, &LaplaceOptions::default()).unwrap();
        let want = small * (-0.9 / small).exp();
        assert!((got - want).norm() < 1e-11 * want.norm(), "{got} {want}");
        // inner part + tail = whole transform
        let whole = laplace_ray(&f, 1, 0.0, t, &LaplaceOptions::default()).unwrap();
        assert!((whole.re - 0.3).abs() < 1e-12);
    }

    #[test]
    fn linear_k1() {
        let v = laplace_ray(&|u: C64| u, 1, 0.0, C64::new(0.3, 0.0), &opts()).unwrap();
        assert!((v - C64::new(0.3, 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn square_k2() {
        let v = laplace_ray(&|u: C64| u * u, 2, 0.0, C64::new(0.5, 0.0), &opts()).unwrap();
        assert!((v - C64::new(0.25, 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn rotated_argument() {
        let t = C64::from_polar(0.3, PI / 3.0);
        let v = laplace_ray(&|u: C64| u, 1, 0.0, t, &opts()).unwrap();
        assert!((v - t).norm() < 1e-11, "{v}");
    }

    #[test]
    fn direction_error() {
        let t = C64::from_polar(0.3, PI / 2.0);
        assert!(matches!(laplace_ray(&|u: C64| u, 1, 0.0, t, &opts()), Err(LaplaceError::Direction { .. })));
    }

    #[test]
    fn sampled_polynomial() {
        let ray = RaySampling::from_fn(0.2, geometric_radii(1e-10, 20.0, 48.0), |u| u * u * u + u).unwrap();
        let s = Sampled::new(&ray).unwrap();
        let t = C64::from_polar(0.4, 0.1);
        let v = laplace_ray(&s, 1, 0.2, t, &opts()).unwrap();
        let exact = t * t * t * gamma_real(3.0).unwrap() + t;
        assert!(((v - exact) / exact).norm() < 1e-9, "{v} vs {exact}");
    }

    #[test]
    fn short_sampling_is_a_range_error() {
        let ray = RaySampling::from_fn(0.0, geometric_radii(1e-10, 1.0, 48.0), |u| u).unwrap();
        let s = Sampled::new(&ray).unwrap();
        let e = laplace_ray(&s, 1, 0.0, C64::new(0.5, 0.0), &opts()).unwrap_err();
        assert!(matches!(e, LaplaceError::Range { needed, .. } if needed > 1.0));
    }

    proptest::proptest! {
        #[test]
        fn linear_in_integrand(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let t = C64::from_polar(0.3, 0.2);
            let f = |u: C64| u * u + u;
            let g = |u: C64| (u * 0.5).sin();
            let h = |u: C64| f(u) * a + g(u) * b;
            let lhs = laplace_ray(&h, 1, 0.0, t, &opts()).unwrap();
            let rhs = laplace_ray(&f, 1, 0.0, t, &opts()).unwrap() * a + laplace_ray(&g, 1, 0.0, t, &opts()).unwrap() * b;
            proptest::prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn homogeneous_in_t(h in 1u32..5, lambda in 0.3f64..2.0) {
            let t = C64::from_polar(0.2, 0.1);
            let f = move |u: C64| u.powu(h);
            let a = laplace_ray(&f, 1, 0.0, t, &opts()).unwrap();
            let b = laplace_ray(&f, 1, 0.0, t * lambda, &opts()).unwrap();
            let want = a * lambda.powi(h as i32);
            proptest::prop_assert!((b - want).norm() <= 1e-10 * want.norm());
        }
    }
}
