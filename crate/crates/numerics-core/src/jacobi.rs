//! Integrals of the form ∫₀¹ (1-τ)^(α-1) g(τ) dτ with algebraic endpoint
//! behaviour at both ends.

use crate::legendre::integrate_panels;
use crate::{NumericsError, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiRule {
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// When g(τ) behaves like τ^(1/p - 1) near 0, τ = σ^p / 2 removes it.
    pub near_zero_power: u32,
}

impl Default for JacobiRule {
    fn default() -> Self {
        JacobiRule { nodes: 20, near_zero_power: 1 }
    }
}

/// Smallest m with m·α integral, so that 1-τ = σ^m leaves a polynomial weight.
fn rational_power(alpha: f64) -> Option<u32> {
    (1..=24u32).find(|&m| {
        let v = m as f64 * alpha;
        (v - v.round()).abs() < 1e-12 && v.round() >= 1.0
    })
}

/// ∫₀¹ (1-τ)^(α-1) g(τ) dτ with the default rule.
pub fn integrate_jacobi<G: FnMut(f64) -> C64>(g: G, alpha: f64) -> Result<C64> {
    integrate_jacobi_with(g, alpha, JacobiRule::default())
}

pub fn integrate_jacobi_with<G: FnMut(f64) -> C64>(mut g: G, alpha: f64, rule: JacobiRule) -> Result<C64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(NumericsError::Domain(format!("Jacobi exponent must be positive, got {alpha}")));
    }
    let n = rule.nodes.max(2);
    let p = rule.near_zero_power.max(1) as i32;
    let edges = [0.0, 0.25, 0.5, 1.0];

    // left half: τ = σ^p / 2
    let left = integrate_panels(&edges, n, |s| {
        let tau = 0.5 * s.powi(p);
        let jac = 0.5 * p as f64 * s.powi(p - 1);
        g(tau) * ((1.0 - tau).powf(alpha - 1.0) * jac)
    });

    // right half: 1-τ = σ^m
    let right = match rational_power(alpha) {
        Some(m) => {
            let top = 0.5f64.powf(1.0 / m as f64);
            let w = (m as f64 * alpha).round() as i32 - 1;
            let e: Vec<f64> = edges.iter().map(|x| x * top).collect();
            integrate_panels(&e, n, |s| g(1.0 - s.powi(m as i32)) * (m as f64 * s.powi(w)))
        }
        None => {
            // no small denominator: a large integer power still gives a weight
            // that is smooth to high order at σ = 0
            let m = (6.0 / alpha).ceil().max(1.0) as i32;
            let top = 0.5f64.powf(1.0 / m as f64);
            let w = m as f64 * alpha - 1.0;
            let e: Vec<f64> = edges.iter().map(|x| x * top).collect();
            integrate_panels(&e, n, |s| g(1.0 - s.powi(m)) * (m as f64 * s.powf(w)))
        }
    };
    Ok(left + right)
}
