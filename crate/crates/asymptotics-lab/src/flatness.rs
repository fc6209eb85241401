use std::fmt::Write as _;

use numerics_core::ln_gamma;
use serde::Serialize;

use crate::lp::fit_envelope;
use crate::{LabError, Result};

/// R² below which the fitted rate `B` is not recorded.
pub const MIN_R2: f64 = 0.99;

/// Caps on the logarithms of the fitted bound constants.
pub(crate) const LN_CONST_CAP: f64 = 50.0;
pub(crate) const LN_RATE_RANGE: (f64, f64) = (-30.0, 14.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatnessModel {
    /// `y ≤ A exp(−B/x^k)`.
    ExpFlat { k: f64 },
    /// `y ≤ Ã B̃^N Γ(N/k) q^{N²/2} x^N` for every N.
    Mixed { k: u32, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessFit {
    pub model: FlatnessModel,
    pub a: f64,
    /// Rate constant; for the flatness model only when `r2 ≥ MIN_R2`.
    pub b: Option<f64>,
    pub r2: Option<f64>,
    /// Sum of squared log residuals (least-squares fits).
    pub residual: Option<f64>,
    pub x_range: (f64, f64),
    pub samples: usize,
    /// Flatness model: `B > 0` with a trustworthy fit.
    pub flat: bool,
    /// Mixed model: constants found inside the caps.
    pub pass: bool,
    /// Mixed model: every sample was zero, so any `Ã > 0` works.
    pub degenerate: bool,
    pub free_k: bool,
    /// Log-slack of each sample under the fitted mixed bound.
    pub slack: Option<SlackSummary>,
}

fn x_range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn check_samples(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < 4 {
        return Err(LabError::InsufficientData(format!("{} samples, need at least 4", samples.len())));
    }
    if let Some((x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(LabError::Domain(format!("flatness samples need x > 0 and y > 0, got ({x}, {y})")));
    }
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(LabError::Domain("flatness samples need distinct x".into()));
    }
    Ok(())
}

/// Least squares of `ln y` on `(1, x^{−k})`: `(intercept, slope, rss, r2)`.
fn regress(samples: &[(f64, f64)], k: f64) -> (f64, f64, f64, f64) {
    let n = samples.len() as f64;
    let pts: Vec<(f64, f64)> = samples.iter().map(|(x, y)| (x.powf(-k), y.ln())).collect();
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (u, v)| (a + u / n, b + v / n));
    let sxx: f64 = pts.iter().map(|(u, _)| (u - mx) * (u - mx)).sum();
    let sxy: f64 = pts.iter().map(|(u, v)| (u - mx) * (v - my)).sum();
    let syy: f64 = pts.iter().map(|(_, v)| (v - my) * (v - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|(u, v)| (v - intercept - slope * u).powi(2)).sum();
    let r2 = if syy > 1e-300 {
        1.0 - rss / syy
    } else if rss <= 1e-24 {
        1.0
    } else {
        0.0
    };
    (intercept, slope, rss, r2)
}

fn flatness_fit(samples: &[(f64, f64)], k: f64, free_k: bool) -> FlatnessFit {
    let (c0, c1, rss, r2) = regress(samples, k);
    let b = -c1;
    let trusted = r2 >= MIN_R2;
    FlatnessFit {
        model: FlatnessModel::ExpFlat { k },
        a: c0.exp(),
        b: trusted.then_some(b),
        r2: Some(r2),
        residual: Some(rss),
        x_range: x_range(samples.iter().map(|s| s.0)),
        samples: samples.len(),
        flat: trusted && b > 1e-8,
        pass: trusted,
        degenerate: false,
        free_k,
        slack: None,
    }
}

/// Fit `y ≈ A exp(−B/x^k)` for a given order `k`.
pub fn fit_exponential_flatness(samples: &[(f64, f64)], k: f64) -> Result<FlatnessFit> {
    check_samples(samples)?;
    if !(k > 0.0) {
        return Err(LabError::Domain(format!("order k must be positive, got {k}")));
    }
    Ok(flatness_fit(samples, k, false))
}

/// As [`fit_exponential_flatness`], with `k ∈ [k_lo, k_hi]` chosen to minimise
/// the residual (log grid, then golden section around the best grid point).
pub fn fit_exponential_flatness_free_k(samples: &[(f64, f64)], k_lo: f64, k_hi: f64) -> Result<FlatnessFit> {
    check_samples(samples)?;
    if !(k_lo > 0.0 && k_hi > k_lo) {
        return Err(LabError::Domain(format!("bad order range [{k_lo}, {k_hi}]")));
    }
    let rss = |k: f64| regress(samples, k).2;
    let m = 160;
    let grid: Vec<f64> = (0..=m).map(|i| k_lo * (k_hi / k_lo).powf(i as f64 / m as f64)).collect();
    let best = (0..=m).min_by(|&i, &j| rss(grid[i]).total_cmp(&rss(grid[j]))).unwrap_or(0);
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(m)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (rss(c), rss(d));
    for _ in 0..200 {
        if (b - a) < 1e-12 * b {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = rss(d);
        }
    }
    Ok(flatness_fit(samples, 0.5 * (a + b), true))
}

/// Smallest mixed bound `Ã B̃^N Γ(N/k) q^{N²/2} x^N` over samples `(N, x, y)`,
/// found as the total-slack minimiser among constants inside the caps.
pub fn check_mixed_bound(samples: &[(u32, f64, f64)], k: u32, q: f64) -> Result<FlatnessFit> {
    let mut ns: Vec<u32> = samples.iter().map(|s| s.0).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut xs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if ns.len() < 3 || xs.len() < 4 {
        return Err(LabError::InsufficientData(format!("{} orders and {} abscissae, need 3 and 4", ns.len(), xs.len())));
    }
    if k == 0 || !(q > 1.0) {
        return Err(LabError::Domain(format!("need k ≥ 1 and q > 1, got k = {k}, q = {q}")));
    }
    if let Some(s) = samples.iter().find(|(n, x, y)| *n == 0 || !(*x > 0.0) || !(*y >= 0.0) || !y.is_finite()) {
        return Err(LabError::Domain(format!("mixed-bound samples need N ≥ 1, x > 0, y ≥ 0; got {s:?}")));
    }
    let log_shape = |n: u32, x: f64| ln_gamma(n as f64 / k as f64).unwrap_or(f64::NAN) + 0.5 * (n * n) as f64 * q.ln() + n as f64 * x.ln();
    let rows: Vec<(f64, f64)> = samples.iter().filter(|s| s.2 > 0.0).map(|&(n, x, y)| (n as f64, y.ln() - log_shape(n, x))).collect();
    let mut fit = FlatnessFit {
        model: FlatnessModel::Mixed { k, q },
        a: 0.0,
        b: None,
        r2: None,
        residual: None,
        x_range: x_range(samples.iter().map(|s| s.1)),
        samples: samples.len(),
        flat: false,
        pass: true,
        degenerate: rows.is_empty(),
        free_k: false,
        slack: None,
    };
    if rows.is_empty() {
        return Ok(fit);
    }
    match fit_envelope(&rows, LN_CONST_CAP, LN_RATE_RANGE.0, LN_RATE_RANGE.1) {
        Some((la, lb)) => {
            let mut sl: Vec<f64> = rows.iter().map(|(m, c)| la + m * lb - c).collect();
            sl.sort_by(f64::total_cmp);
            fit.a = la.exp();
            fit.b = Some(lb.exp());
            fit.pass = sl[0] >= -1e-9;
            fit.slack = Some(SlackSummary { min: sl[0], median: sl[sl.len() / 2], max: sl[sl.len() - 1] });
        }
        None => fit.pass = false,
    }
    Ok(fit)
}

impl FlatnessFit {
    /// `x,y,model` rows for a flatness fit.
    pub fn flatness_csv(&self, samples: &[(f64, f64)]) -> String {
        let mut out = String::from("x,y,model\n");
        let k = match self.model {
            FlatnessModel::ExpFlat { k } => k,
            FlatnessModel::Mixed { .. } => return out,
        };
        let b = self.b.unwrap_or(f64::NAN);
        for (x, y) in samples {
            let _ = writeln!(out, "{:.14e},{:.14e},{:.14e}", x, y, self.a * (-b / x.powf(k)).exp());
        }
        out
    }

    /// `n,x,y,bound` rows for a mixed-bound fit.
    pub fn mixed_csv(&self, samples: &[(u32, f64, f64)]) -> String {
        let mut out = String::from("n,x,y,bound\n");
        let (k, q) = match self.model {
            FlatnessModel::Mixed { k, q } => (k, q),
            FlatnessModel::ExpFlat { .. } => return out,
        };
        let b = self.b.unwrap_or(f64::NAN);
        for &(n, x, y) in samples {
            let ln_bound = self.a.ln() + n as f64 * b.ln() + ln_gamma(n as f64 / k as f64).unwrap_or(f64::NAN) + 0.5 * (n * n) as f64 * q.ln() + n as f64 * x.ln();
            let _ = writeln!(out, "{},{:.14e},{:.14e},{:.14e}", n, x, y, ln_bound.exp());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xs() -> Vec<f64> {
        (0..9).map(|i| 0.02 + 0.01 * i as f64).collect()
    }

    #[test]
    fn recovers_synthetic_constants() {
        for k in [1.0, 2.0, 3.0] {
            let s: Vec<(f64, f64)> = xs().into_iter().map(|x| (x * 10.0, 2.0 * (-3.0 / (x * 10.0).powf(k)).exp())).collect();
            let f = fit_exponential_flatness(&s, k).unwrap();
            assert!((f.a - 2.0).abs() < 1e-6 && (f.b.unwrap() - 3.0).abs() < 1e-6, "{f:?}");
            assert!(f.residual.unwrap() < 1e-9 && f.flat);
        }
    }

    #[test]
    fn constant_is_not_flat() {
        let s: Vec<(f64, f64)> = xs().into_iter().map(|x| (x, 0.7)).collect();
        let f = fit_exponential_flatness(&s, 1.0).unwrap();
        assert!(f.b.unwrap().abs() < 1e-9 && !f.flat);
    }

    #[test]
    fn free_order_recovers_k() {
        let s: Vec<(f64, f64)> = xs().into_iter().map(|x| (x, (-1.0 / x).exp())).collect();
        let wrong = fit_exponential_flatness(&s, 2.0).unwrap();
        assert!(wrong.r2.unwrap() < 0.99);
        let f = fit_exponential_flatness_free_k(&s, 0.1, 6.0).unwrap();
        let FlatnessModel::ExpFlat { k } = f.model else { panic!() };
        assert!((k - 1.0).abs() < 0.05, "{k}");
    }

    #[test]
    fn sample_errors() {
        assert!(matches!(fit_exponential_flatness(&[(1.0, 1.0); 3], 1.0), Err(LabError::InsufficientData(_))));
        let s = [(0.1, 1.0), (0.2, 0.0), (0.3, 1.0), (0.4, 1.0)];
        assert!(matches!(fit_exponential_flatness(&s, 1.0), Err(LabError::Domain(_))));
    }

    fn mixed_samples(f: impl Fn(u32, f64) -> f64) -> Vec<(u32, f64, f64)> {
        (1..=5).flat_map(|n| [0.02, 0.04, 0.06, 0.08, 0.1].map(|x| (n, x, f(n, x)))).collect()
    }

    #[test]
    fn mixed_bound_recovers_constants() {
        let q: f64 = 1.2;
        let s = mixed_samples(|n, x| 2f64.powi(n as i32) * ln_gamma(n as f64).unwrap().exp() * q.powf(0.5 * (n * n) as f64) * x.powi(n as i32));
        let f = check_mixed_bound(&s, 1, q).unwrap();
        assert!(f.pass && (f.a - 1.0).abs() < 1e-6 && (f.b.unwrap() - 2.0).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn mixed_bound_degenerate_and_infeasible() {
        let f = check_mixed_bound(&mixed_samples(|_, _| 0.0), 1, 1.2).unwrap();
        assert!(f.pass && f.degenerate && f.a == 0.0);
        let s: Vec<(u32, f64, f64)> = (1..=6).flat_map(|n| [0.2, 0.4, 0.6, 0.8].map(|x| (n, x, ((n * n * n) as f64).exp()))).collect();
        let f = check_mixed_bound(&s, 1, 1.2).unwrap();
        assert!(!f.pass);
        assert!(matches!(check_mixed_bound(&s[..8], 1, 1.2), Err(LabError::InsufficientData(_))));
    }
}
