//! Real Gamma function via the Lanczos approximation (g = 7, nine terms).

use crate::{NumericsError, Result};
use std::f64::consts::PI;

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Gamma function for `0 < x <= 170`.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain(format!("gamma_real needs x > 0, got {x}")));
    }
    if x > 170.0 {
        return Err(NumericsError::Domain(format!("gamma_real overflows for x = {x} > 170")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    // small positive integers are exact factorials
    if x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        for i in 2..(x as u32) {
            f *= i as f64;
        }
        return f;
    }
    let xm = x - 1.0;
    let t = xm + G + 0.5;
    // split the power to stay finite up to x = 170
    let half = t.powf((xm + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(xm)
}

/// Natural log of Gamma for `x > 0`, valid far beyond the overflow guard of
/// [`gamma_real`].
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    if x < 100.0 {
        return Ok(gamma_unchecked(x).ln());
    }
    let xm = x - 1.0;
    let t = xm + G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        assert_eq!(gamma_real(1.0).unwrap(), 1.0);
        assert!(rel(gamma_real(0.5).unwrap(), PI.sqrt()) < 1e-14);
        // recurrence oracle: 1.5 * 0.5 * sqrt(pi)
        assert!(rel(gamma_real(2.5).unwrap(), 1.5 * 0.5 * PI.sqrt()) < 1e-13);
        assert!(rel(gamma_real(2.5).unwrap(), 1.329340388179137) < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(gamma_real(0.0).is_err());
        assert!(gamma_real(-1.5).is_err());
        assert!(gamma_real(171.0).is_err());
        assert!(gamma_real(f64::NAN).is_err());
        assert!(gamma_real(170.0).unwrap().is_finite());
    }

    #[test]
    fn recurrence_on_grid() {
        let mut x = 0.1;
        while x <= 20.0 {
            let lhs = gamma_real(x + 1.0).unwrap();
            let rhs = x * gamma_real(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
            x += 0.0625;
        }
    }

    #[test]
    fn against_statrs() {
        for i in 1..=1700 {
            let x = i as f64 * 0.1;
            let ours = gamma_real(x).unwrap();
            let theirs = statrs::function::gamma::gamma(x);
            if theirs.is_finite() {
                assert!(rel(ours, theirs) < 1e-12, "x = {x}: {ours} vs {theirs}");
            } else {
                // the oracle overflows just below 170; compare logarithms there
                let lt = statrs::function::gamma::ln_gamma(x);
                assert!((ours.ln() - lt).abs() < 1e-12 * lt, "x = {x}");
            }
        }
    }

    #[test]
    fn ln_gamma_matches() {
        for &x in &[0.01, 0.3, 1.0, 7.5, 99.0, 101.0, 170.0, 400.0, 1e4] {
            let theirs = statrs::function::gamma::ln_gamma(x);
            assert!((ln_gamma(x).unwrap() - theirs).abs() < 1e-12 * theirs.abs().max(1.0), "x = {x}");
        }
    }
}
