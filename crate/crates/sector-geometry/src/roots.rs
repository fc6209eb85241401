use nalgebra::DMatrix;

use crate::{GeometryError, Result, C64};

/// Horner evaluation with ascending coefficients.
pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn poly_deriv(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

fn trimmed(coeffs: &[C64]) -> &[C64] {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].norm() <= 1e-300f64.max(1e-15 * scale) {
        n -= 1;
    }
    &coeffs[..n]
}

/// All roots of a polynomial (ascending coefficients) from the eigenvalues of
/// its companion matrix, each polished by Newton steps.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let p = trimmed(coeffs);
    if p.len() < 2 {
        return Err(GeometryError::Domain("polynomial must have degree at least 1".into()));
    }
    let d = p.len() - 1;
    let lead = p[d];
    let mut m = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -p[i] / lead;
    }
    let eig = m
        .schur()
        .eigenvalues()
        .ok_or_else(|| GeometryError::Domain("companion eigenvalues did not converge".into()))?;
    let dp = poly_deriv(p);
    let roots = eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..3 {
                let dv = poly_eval(&dp, z);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = poly_eval(p, z) / dv;
                if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1e-3 * (1.0 + z.norm()) {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect();
    Ok(roots)
}

/// Roots of `u ↦ P(k u^k)`: each root τ of P contributes the k values of `(τ/k)^{1/k}`.
pub fn roots_of_borel_symbol(p: &[C64], k: u32) -> Result<Vec<C64>> {
    if k == 0 {
        return Err(GeometryError::Domain("k must be positive".into()));
    }
    let pt = trimmed(p);
    if pt.len() < 2 {
        return Err(GeometryError::Domain("P is constant".into()));
    }
    if pt[0].norm() == 0.0 {
        return Err(GeometryError::Domain("P(0) must be nonzero".into()));
    }
    let kf = k as f64;
    let mut out = Vec::with_capacity(k as usize * (pt.len() - 1));
    for tau in polynomial_roots(pt)? {
        let base = (tau / kf).powf(1.0 / kf);
        for j in 0..k {
            out.push(base * C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / kf));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn contains(roots: &[C64], z: C64, tol: f64) -> bool {
        roots.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn cube_roots_of_minus_one() {
        let r = roots_of_borel_symbol(&[c(1.0), c(0.0), c(0.0), c(1.0)], 1).unwrap();
        assert_eq!(r.len(), 3);
        for z in [C64::from_polar(1.0, PI / 3.0), c(-1.0), C64::from_polar(1.0, -PI / 3.0)] {
            assert!(contains(&r, z, 1e-12), "{r:?}");
        }
    }

    #[test]
    fn k_two_linear() {
        let r = roots_of_borel_symbol(&[c(1.0), c(1.0)], 2).unwrap();
        assert_eq!(r.len(), 2);
        let s = 0.5f64.sqrt();
        assert!(contains(&r, C64::new(0.0, s), 1e-12) && contains(&r, C64::new(0.0, -s), 1e-12));
    }

    #[test]
    fn residuals_small() {
        let p = [C64::new(2.0, 1.0), c(-3.0), C64::new(0.0, 0.5), c(1.0), c(0.25)];
        for k in 1..=3u32 {
            for u in roots_of_borel_symbol(&p, k).unwrap() {
                let v = poly_eval(&p, u.powu(k) * k as f64);
                assert!(v.norm() <= 1e-9 * 4.0, "k={k} |P|={}", v.norm());
            }
        }
    }

    #[test]
    fn constant_rejected() {
        assert!(roots_of_borel_symbol(&[c(2.0)], 3).is_err());
        assert!(roots_of_borel_symbol(&[c(2.0), c(0.0)], 1).is_err());
        assert!(roots_of_borel_symbol(&[c(0.0), c(1.0)], 1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn k_fold_symmetry(k in 1u32..5, a in -2.0f64..2.0, b in 0.1f64..2.0) {
            let p = [C64::new(b, a), c(1.0), c(0.5)];
            let r = roots_of_borel_symbol(&p, k).unwrap();
            let w = C64::from_polar(1.0, 2.0 * PI / k as f64);
            for z in &r {
                proptest::prop_assert!(contains(&r, z * w, 1e-9 * (1.0 + z.norm())));
            }
        }
    }
}
