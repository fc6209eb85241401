use numerics_core::{gamma_real, C64};

use crate::{conv_star, laplace_ray, LaplaceError, LaplaceOptions, Result};

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_residual(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    pub laplace: LaplaceOptions,
    /// Direction of integration; `None` uses `arg T`.
    pub direction: Option<f64>,
    /// Growth constant `K` with `|f(u)| ≲ exp(K |u|^k)`.
    pub growth: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions { laplace: LaplaceOptions::default(), direction: None, growth: 1.0 }
    }
}

impl IdentityOptions {
    fn gamma(&self, t: C64) -> f64 {
        self.direction.unwrap_or_else(|| t.arg())
    }
}

/// Relative error of `L_k(u^h)(T) = Γ(h/k) T^h`.
pub fn check_monomial_identity(h: u32, k: u32, t: C64) -> Result<f64> {
    check_monomial_identity_with(h, k, t, |x| Ok(gamma_real(x)?))
}

/// As [`check_monomial_identity`] with the reference Γ supplied by the caller.
pub fn check_monomial_identity_with<G: Fn(f64) -> Result<f64>>(h: u32, k: u32, t: C64, gamma: G) -> Result<f64> {
    let got = laplace_ray(&|u: C64| u.powu(h), k, t.arg(), t, &LaplaceOptions::default())?;
    let want = t.powu(h) * gamma(h as f64 / k as f64)?;
    Ok(relative_residual(got, want))
}

/// `L_k(k u^k f)(T)` against `T^{k+1} d/dT L_k(f)(T)`, the derivative taken by
/// Richardson-extrapolated central differences of size `step` along `arg T`.
pub fn check_derivative_identity<F: Fn(C64) -> C64>(f: F, k: u32, t: C64, step: f64, opts: &IdentityOptions) -> Result<f64> {
    let gamma = opts.gamma(t);
    let kf = k as f64;
    let lhs = laplace_ray(&|u: C64| f(u) * u.powu(k) * kf, k, gamma, t, &opts.laplace)?;
    let dir = C64::from_polar(1.0, t.arg());
    let lap = |tt: C64| laplace_ray(&f, k, gamma, tt, &opts.laplace);
    let central = |h: f64| -> Result<C64> { Ok((lap(t + dir * h)? - lap(t - dir * h)?) / (dir * (2.0 * h))) };
    let d1 = central(step)?;
    let d2 = central(step / 2.0)?;
    let deriv = (d2 * 4.0 - d1) / 3.0;
    Ok(relative_residual(lhs, t.powu(k + 1) * deriv))
}

/// `L_k(f(q^δ u))(T)` against `L_k(f)(q^δ T)`, under `|T|^k < margin/(K q^{kδ})`
/// where `margin = cos(k(γ − arg T))`.
pub fn check_dilation_identity<F: Fn(C64) -> C64>(f: F, k: u32, delta: u32, q: f64, t: C64, opts: &IdentityOptions) -> Result<f64> {
    let gamma = opts.gamma(t);
    let kf = k as f64;
    let margin = (kf * (gamma - t.arg())).cos();
    let scale = q.powi(delta as i32);
    let limit = margin / (opts.growth * scale.powf(kf));
    if !(t.norm().powf(kf) < limit) {
        return Err(LaplaceError::Precondition(format!(
            "|T|^k = {:.4e} must be below margin/(K q^(k delta)) = {:.4e}",
            t.norm().powf(kf),
            limit
        )));
    }
    let lhs = laplace_ray(&|u: C64| f(u * scale), k, gamma, t, &opts.laplace)?;
    let rhs = laplace_ray(&f, k, gamma, t * scale, &opts.laplace)?;
    Ok(relative_residual(lhs, rhs))
}

/// `L_k(u^m ⋆_k f)(T)` against `T^m L_k(f)(T)`.
pub fn check_convolution_identity<F: Fn(C64) -> C64>(m: u32, f: F, k: u32, t: C64, opts: &IdentityOptions) -> Result<f64> {
    let gamma = opts.gamma(t);
    let conv = |u: C64| conv_star(m, &f, k, u).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let lhs = laplace_ray(&conv, k, gamma, t, &opts.laplace)?;
    if !lhs.re.is_finite() {
        return Err(LaplaceError::Domain("convolution failed along the ray".into()));
    }
    let rhs = laplace_ray(&f, k, gamma, t, &opts.laplace)? * t.powu(m);
    Ok(relative_residual(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn monomial_examples() {
        assert!(check_monomial_identity(1, 1, r(0.2)).unwrap() <= 1e-7);
        assert!(check_monomial_identity(2, 2, r(0.4)).unwrap() <= 1e-7);
        assert!(check_monomial_identity(3, 1, C64::from_polar(0.1, PI / 6.0)).unwrap() <= 1e-7);
    }

    #[test]
    fn derivative_examples() {
        let o = IdentityOptions::default();
        assert!(check_derivative_identity(|u| u, 1, r(0.3), 1e-3, &o).unwrap() <= 1e-5);
        assert!(check_derivative_identity(|u| u * u, 2, r(0.3), 1e-3, &o).unwrap() <= 1e-5);
        assert_eq!(check_derivative_identity(|_| r(0.0), 1, r(0.3), 1e-3, &o).unwrap(), 0.0);
    }

    #[test]
    fn dilation_examples() {
        let o = IdentityOptions::default();
        assert!(check_dilation_identity(|u| u, 1, 1, 1.2, r(0.1), &o).unwrap() <= 1e-6);
        let lhs = laplace_ray(&|u: C64| u * 1.2, 1, 0.0, r(0.1), &LaplaceOptions::default()).unwrap();
        assert!((lhs - r(0.12)).norm() < 1e-12);
        assert!(check_dilation_identity(|u| u * u * u, 1, 2, 1.2, r(0.1), &o).unwrap() <= 1e-6);
        assert!(matches!(check_dilation_identity(|u| u, 1, 1, 1.2, r(1.0), &o), Err(LaplaceError::Precondition(_))));
    }

    #[test]
    fn convolution_examples() {
        let o = IdentityOptions::default();
        assert!(check_convolution_identity(1, |u| u, 1, r(0.2), &o).unwrap() <= 1e-5);
        assert!(check_convolution_identity(2, |u| u, 1, r(0.2), &o).unwrap() <= 1e-5);
        assert_eq!(check_convolution_identity(1, |_| r(0.0), 1, r(0.2), &o).unwrap(), 0.0);
    }
}
