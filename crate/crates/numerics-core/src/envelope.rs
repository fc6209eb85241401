//! One-sided envelope fits: find parameters `x` with `A x ≥ b` row by row,
//! minimising the total overshoot `Σ (A x − b)`. When no parameter vector
//! inside the bounds dominates every row, the fit falls back to minimising the
//! largest violation and reports it.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::{NumericsError, Result};

/// One constraint `features · x ≥ target`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRow {
    pub features: Vec<f64>,
    pub target: f64,
}

impl EnvelopeRow {
    pub fn new(features: Vec<f64>, target: f64) -> Self {
        EnvelopeRow { features, target }
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        self.features.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.target
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        VarBounds { lower, upper }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFit {
    pub params: Vec<f64>,
    /// Largest `target − features·x` over the rows (≤ 0 when dominated).
    pub max_violation: f64,
    /// `Σ (features·x − target)`.
    pub total_slack: f64,
    /// Number of rows with a violation above tolerance.
    pub violations: usize,
    pub feasible: bool,
}

const FEAS_TOL: f64 = 1e-7;

fn row_tol(r: &EnvelopeRow) -> f64 {
    FEAS_TOL * (1.0 + r.target.abs())
}

pub fn fit_upper_envelope(rows: &[EnvelopeRow], bounds: &[VarBounds]) -> Result<EnvelopeFit> {
    let nv = bounds.len();
    if rows.is_empty() {
        return Err(NumericsError::Lp("no rows to fit".into()));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.features.len() != nv {
            return Err(NumericsError::Lp(format!("row {i} has {} features, expected {nv}", r.features.len())));
        }
        if !r.target.is_finite() || r.features.iter().any(|a| !a.is_finite()) {
            return Err(NumericsError::Lp(format!("row {i} is not finite")));
        }
    }
    if bounds.iter().any(|b| !(b.lower <= b.upper) || !b.lower.is_finite() || !b.upper.is_finite()) {
        return Err(NumericsError::Lp("variable bounds must be finite and ordered".into()));
    }

    let params = match solve_overshoot(rows, bounds)? {
        Some(x) => x,
        None => solve_minimax(rows, bounds)?,
    };
    Ok(summarise(rows, params))
}

fn summarise(rows: &[EnvelopeRow], params: Vec<f64>) -> EnvelopeFit {
    let mut max_violation = f64::NEG_INFINITY;
    let mut total_slack = 0.0;
    let mut violations = 0;
    for r in rows {
        let s = r.slack(&params);
        total_slack += s;
        max_violation = max_violation.max(-s);
        if -s > row_tol(r) {
            violations += 1;
        }
    }
    EnvelopeFit { params, max_violation, total_slack, violations, feasible: violations == 0 }
}

fn solve_overshoot(rows: &[EnvelopeRow], bounds: &[VarBounds]) -> Result<Option<Vec<f64>>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = bounds
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let c: f64 = rows.iter().map(|r| r.features[j]).sum();
            lp.add_var(c, (b.lower, b.upper))
        })
        .collect();
    for r in rows {
        let expr: Vec<_> = vars.iter().copied().zip(r.features.iter().copied()).collect();
        lp.add_constraint(expr, ComparisonOp::Ge, r.target);
    }
    match lp.solve() {
        Ok(out) => {
            let sol = out.into_solution().map_err(|_| NumericsError::Lp("solve interrupted".into()))?;
            Ok(Some(vars.iter().map(|v| sol.var_value(*v)).collect()))
        }
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(e) => Err(NumericsError::Lp(e.to_string())),
    }
}

fn solve_minimax(rows: &[EnvelopeRow], bounds: &[VarBounds]) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = bounds.iter().map(|b| lp.add_var(0.0, (b.lower, b.upper))).collect();
    let gap = lp.add_var(1.0, (0.0, f64::INFINITY));
    for r in rows {
        let mut expr: Vec<_> = vars.iter().copied().zip(r.features.iter().copied()).collect();
        expr.push((gap, 1.0));
        lp.add_constraint(expr, ComparisonOp::Ge, r.target);
    }
    let out = lp.solve().map_err(|e| NumericsError::Lp(e.to_string()))?;
    let sol = out.into_solution().map_err(|_| NumericsError::Lp("solve interrupted".into()))?;
    Ok(vars.iter().map(|v| sol.var_value(*v)).collect())
}

/// Upper bound of the shape `exp(log_const + log_sq·ln²(r+shift) + log_lin·ln(r+shift))`
/// for a sampled modulus `|f(r e^{iγ})|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEnvelope {
    pub log_const: f64,
    pub log_sq: f64,
    pub log_lin: f64,
    pub shift: f64,
}

impl GrowthEnvelope {
    pub fn constant(c: f64) -> Self {
        GrowthEnvelope { log_const: c.ln(), log_sq: 0.0, log_lin: 0.0, shift: 1.0 }
    }

    /// `C (r + shift)^p`.
    pub fn power(c: f64, p: f64, shift: f64) -> Self {
        GrowthEnvelope { log_const: c.ln(), log_sq: 0.0, log_lin: p, shift }
    }

    pub fn ln_value(&self, r: f64) -> f64 {
        let l = (r + self.shift).ln();
        self.log_const + self.log_sq * l * l + self.log_lin * l
    }

    /// Fit the tightest envelope of this shape over samples `(r, |f|)`
    /// with zero values dropped. `shift` is held fixed.
    pub fn fit(samples: &[(f64, f64)], shift: f64, max_log_sq: f64) -> Result<(GrowthEnvelope, EnvelopeFit)> {
        let rows: Vec<_> = samples
            .iter()
            .filter(|(_, y)| *y > 0.0)
            .map(|&(r, y)| {
                let l = (r + shift).ln();
                EnvelopeRow::new(vec![1.0, l * l, l], y.ln())
            })
            .collect();
        if rows.is_empty() {
            let env = GrowthEnvelope { log_const: -700.0, log_sq: 0.0, log_lin: 0.0, shift };
            return Ok((env, EnvelopeFit { params: vec![-700.0, 0.0, 0.0], max_violation: 0.0, total_slack: 0.0, violations: 0, feasible: true }));
        }
        let bounds = [VarBounds::new(-700.0, 700.0), VarBounds::new(0.0, max_log_sq), VarBounds::new(-50.0, 50.0)];
        let fit = fit_upper_envelope(&rows, &bounds)?;
        let p = &fit.params;
        Ok((GrowthEnvelope { log_const: p[0], log_sq: p[1], log_lin: p[2], shift }, fit))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        // log y = 2 + 0.5 n, with some points strictly below
        let rows: Vec<_> = (0..10)
            .map(|n| {
                let n = n as f64;
                let drop = if n as usize % 3 == 0 { 0.0 } else { 0.7 };
                EnvelopeRow::new(vec![1.0, n], 2.0 + 0.5 * n - drop)
            })
            .collect();
        let fit = fit_upper_envelope(&rows, &[VarBounds::new(-10.0, 10.0), VarBounds::new(-5.0, 5.0)]).unwrap();
        assert!(fit.feasible);
        assert!((fit.params[0] - 2.0).abs() < 1e-8 && (fit.params[1] - 0.5).abs() < 1e-8, "{:?}", fit.params);
        assert!(fit.max_violation <= 1e-9);
    }

    #[test]
    fn caps_force_minimax_fallback() {
        let rows: Vec<_> = (1..8).map(|n| EnvelopeRow::new(vec![1.0, n as f64], (n as f64).powi(3))).collect();
        let fit = fit_upper_envelope(&rows, &[VarBounds::new(-30.0, 30.0), VarBounds::new(-4.0, 4.0)]).unwrap();
        assert!(!fit.feasible);
        assert!(fit.max_violation > 100.0);
        assert!(fit.violations > 0);
    }

    #[test]
    fn rejects_malformed_rows() {
        let r = [EnvelopeRow::new(vec![1.0], 0.0)];
        assert!(fit_upper_envelope(&r, &[VarBounds::new(0.0, 1.0), VarBounds::new(0.0, 1.0)]).is_err());
        assert!(fit_upper_envelope(&[], &[VarBounds::new(0.0, 1.0)]).is_err());
    }

    #[test]
    fn growth_envelope_dominates_samples() {
        let samples: Vec<_> = (1..60).map(|i| {
            let r = 0.1 * i as f64;
            (r, 3.0 * (1.0 + r).powf(2.5) * (1.0 + 0.3 * (r * 5.0).sin().abs()) / 1.3)
        }).collect();
        let (env, fit) = GrowthEnvelope::fit(&samples, 1.0, 1.0).unwrap();
        assert!(fit.feasible);
        for (r, y) in samples {
            assert!(env.ln_value(r) >= y.ln() - 1e-7);
        }
    }
}
