use std::f64::consts::PI;

use numerics_core::{gauss_legendre, C64};

use crate::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeineOptions {
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Panel width in `ln |ξ|`.
    pub panel_width: f64,
    /// Innermost radius as a fraction of the ray length.
    pub depth: f64,
    /// Stop once a panel contributes less than this fraction of the largest one.
    pub tol: f64,
}

impl Default for HeineOptions {
    fn default() -> Self {
        HeineOptions { nodes: 16, panel_width: 0.25, depth: 1e-14, tol: 1e-17 }
    }
}

/// A cocycle `Θ_p` given on the segment from 0 to `radius·e^{i direction}`.
pub struct CocycleRay<'a> {
    pub direction: f64,
    pub radius: f64,
    pub theta: Box<dyn FnMut(C64) -> Result<C64> + 'a>,
}

/// `a_m = Σ_p (2πi)^{−1} ∫_{Γ_p} Θ_p(ξ) ξ^{−m−1} dξ` for `m = 0..=n_max`.
///
/// Along each ray `ξ^{−m−1} dξ = ξ^{−m} d ln|ξ|`; panels run inward from the
/// outer radius until the weighted integrand has died out.
pub fn cauchy_heine_coefficients(rays: &mut [CocycleRay<'_>], n_max: usize, opts: &HeineOptions) -> Result<Vec<C64>> {
    let mut a = vec![C64::new(0.0, 0.0); n_max + 1];
    let rule = gauss_legendre(opts.nodes.max(2));
    for ray in rays.iter_mut() {
        if !(ray.radius > 0.0) || !ray.radius.is_finite() {
            return Err(LabError::Domain(format!("ray radius {} must be positive and finite", ray.radius)));
        }
        let x_top = ray.radius.ln();
        let x_floor = x_top + opts.depth.ln();
        let h = 0.5 * opts.panel_width;
        let mut hi = x_top;
        let mut peak = f64::NEG_INFINITY;
        let mut quiet = 0;
        let mut done = false;
        while hi > x_floor {
            let mid = hi - h;
            let mut panel_peak = f64::NEG_INFINITY;
            for (s, w) in rule.0.iter().zip(rule.1.iter()) {
                let x = mid + h * s;
                let xi = C64::from_polar(x.exp(), ray.direction);
                let th = (ray.theta)(xi)?;
                if th == C64::new(0.0, 0.0) {
                    continue;
                }
                let ln_th = th.ln();
                let ln_xi = C64::new(x, ray.direction);
                // |Θ| max(1, |ξ|^{−n_max}), the largest weight any a_m sees
                panel_peak = panel_peak.max(ln_th.re - n_max as f64 * x.min(0.0));
                for (m, am) in a.iter_mut().enumerate() {
                    *am += (ln_th - ln_xi * m as f64).exp() * (w * h);
                }
            }
            peak = peak.max(panel_peak);
            if panel_peak == f64::NEG_INFINITY || panel_peak < peak + opts.tol.ln() {
                quiet += 1;
                if quiet >= 2 {
                    done = true;
                    break;
                }
            } else {
                quiet = 0;
            }
            hi -= opts.panel_width;
        }
        if !done {
            return Err(LabError::Precondition(format!(
                "cocycle on direction {:.4} does not decay fast enough toward 0",
                ray.direction
            )));
        }
    }
    let c = C64::new(0.0, -1.0 / (2.0 * PI));
    Ok(a.into_iter().map(|x| x * c).collect())
}

/// `|a_m|` prepared for growth classification: entries below `skip` are
/// dropped (the truncated rays add a convergent part that dominates there),
/// as are entries negligible against their neighbours within ±3, which are
/// cancellation residue of a symmetric covering rather than coefficients.
pub fn growth_magnitudes(a: &[C64], skip: usize, rel_floor: f64) -> Vec<f64> {
    let mags: Vec<f64> = a.iter().map(|x| x.norm()).collect();
    (0..mags.len())
        .map(|m| {
            let lo = m.saturating_sub(3);
            let hi = (m + 3).min(mags.len() - 1);
            let local = mags[lo..=hi].iter().cloned().fold(0.0, f64::max);
            if m < skip || mags[m] <= rel_floor * local {
                0.0
            } else {
                mags[m]
            }
        })
        .collect()
}


#[cfg(test)]
mod magnitude_tests {
    use super::*;

    #[test]
    fn drops_head_and_residue() {
        let a: Vec<C64> = (0..12).map(|m| C64::new(if m % 3 == 0 { 10f64.powi(m) } else { 1e-20 }, 0.0)).collect();
        let g = growth_magnitudes(&a, 4, 1e-10);
        assert_eq!(g.iter().filter(|x| **x > 0.0).count(), 2);
        assert_eq!(g[6], 1e6);
    }
}
