//! Two-unknown upper envelopes `a + m_i b ≥ c_i` with `m_i ≥ 0`.

use numerics_core::{fit_upper_envelope, EnvelopeRow, VarBounds};

/// Minimises the total slack `Σ (a + m_i b − c_i)` over `b ∈ [b_lo, b_hi]`,
/// `a ≤ a_cap`. `None` when no pair satisfies the caps.
pub(crate) fn fit_envelope(rows: &[(f64, f64)], a_cap: f64, b_lo: f64, b_hi: f64) -> Option<(f64, f64)> {
    if rows.is_empty() || rows.iter().any(|(m, c)| !m.is_finite() || !c.is_finite()) {
        return None;
    }
    // low enough that the optimum a = max_i (c_i − m_i b) is never clipped
    let m_max = rows.iter().map(|r| r.0.abs()).fold(0.0, f64::max);
    let c_min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let a_lo = (c_min - m_max * b_lo.abs().max(b_hi.abs()) - 1.0).min(a_cap - 1.0);
    let lp_rows: Vec<EnvelopeRow> = rows.iter().map(|&(m, c)| EnvelopeRow::new(vec![1.0, m], c)).collect();
    let fit = fit_upper_envelope(&lp_rows, &[VarBounds::new(a_lo, a_cap), VarBounds::new(b_lo, b_hi)]).ok()?;
    if !fit.feasible {
        return None;
    }
    // absorb LP round-off into a so every row is dominated
    let (mut a, b) = (fit.params[0], fit.params[1]);
    let worst = rows.iter().map(|(m, c)| c - a - m * b).fold(f64::NEG_INFINITY, f64::max);
    if worst > 0.0 {
        a += worst;
    }
    (a <= a_cap + 1e-9 * a_cap.abs().max(1.0)).then_some((a, b))
}
