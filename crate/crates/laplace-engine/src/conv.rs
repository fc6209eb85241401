use numerics_core::{gamma_real, integrate_jacobi_with, JacobiRule, C64};

use crate::{LaplaceError, Result};

/// `u^m ⋆_k f = u^k/Γ(m/k) ∫_0^{u^k} (u^k − s)^{m/k − 1} f(s^{1/k}) ds/s`,
/// integrated along the segment that maps onto the ray through `u`.
pub fn conv_star<F: Fn(C64) -> C64>(m: u32, f: F, k: u32, u: C64) -> Result<C64> {
    conv_star_with(m, |v| Ok(f(v)), k, u)
}

/// Fallible-integrand version of [`conv_star`].
pub fn conv_star_with<F: FnMut(C64) -> Result<C64>>(m: u32, mut f: F, k: u32, u: C64) -> Result<C64> {
    if m == 0 {
        return Err(LaplaceError::Domain("convolution power m must be positive".into()));
    }
    if k == 0 {
        return Err(LaplaceError::Domain("k must be positive".into()));
    }
    if u.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let alpha = m as f64 / k as f64;
    let rule = JacobiRule { near_zero_power: k, ..JacobiRule::default() };
    let inv_k = 1.0 / k as f64;
    // s = u^k τ turns the integral into u^m ∫_0^1 (1−τ)^{α−1} f(u τ^{1/k}) dτ/τ
    let mut err = None;
    let integral = integrate_jacobi_with(
        |tau| {
            if err.is_some() {
                return C64::new(0.0, 0.0);
            }
            match f(u * tau.powf(inv_k)) {
                Ok(v) => v / tau,
                Err(e) => {
                    err = Some(e);
                    C64::new(0.0, 0.0)
                }
            }
        },
        alpha,
        rule,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(u.powu(m) * integral / gamma_real(alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn beta_oracles() {
        assert!((conv_star(1, |u| u, 1, r(2.0)).unwrap() - r(4.0)).norm() < 1e-12);
        assert!((conv_star(2, |u| u, 1, r(1.0)).unwrap() - r(0.5)).norm() < 1e-12);
        assert_eq!(conv_star(3, |_| r(0.0), 2, r(0.7)).unwrap(), r(0.0));
    }

    #[test]
    fn monomials_for_several_k() {
        // u^m ⋆_k u^j = Γ(j/k)/Γ((j+m)/k) u^{j+m}
        for k in 1..=3u32 {
            for m in 1..=4u32 {
                for j in 1..=4u32 {
                    let u = C64::from_polar(0.8, 0.3);
                    let got = conv_star(m, |v| v.powu(j), k, u).unwrap();
                    let kf = k as f64;
                    let want = u.powu(j + m) * gamma_real(j as f64 / kf).unwrap() / gamma_real((j + m) as f64 / kf).unwrap();
                    assert!(((got - want) / want).norm() < 1e-10, "k={k} m={m} j={j}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn zero_power_rejected() {
        assert!(matches!(conv_star(0, |u| u, 1, r(1.0)), Err(LaplaceError::Domain(_))));
    }
}
