use nalgebra::{DMatrix, DVector};
use numerics_core::ln_gamma;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// Residual ratio one model needs over the other to win.
    pub margin: f64,
    pub bootstrap: usize,
    pub seed: u64,
    /// Below this fitted `s` a Gevrey verdict reads as convergent.
    pub s_min: f64,
    /// Below this fitted `ln q̂` a mixed verdict is not credible.
    pub ln_q_min: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { margin: 10.0, bootstrap: 200, seed: 0x5eed, s_min: 0.05, ln_q_min: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    Gevrey { s: f64 },
    Mixed { s: f64, q: f64 },
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthClassification {
    pub verdict: Verdict,
    /// Gevrey index of the winning model.
    pub s: f64,
    /// Bootstrap standard deviation of `s`.
    pub s_err: f64,
    /// Fitted (or prescribed) `ln q̂` of the mixed model.
    pub log_q: f64,
    pub residual_gevrey: f64,
    pub residual_mixed: f64,
    /// Points used (nonzero `|a_n|`, `n ≥ 1`).
    pub length: usize,
    /// `1/k` when an order hint was given.
    pub expected_s: Option<f64>,
}

/// Columns `1, n, ln n, 1/n, ln n!` (+ `n²/2`). The `ln n` and `1/n` columns
/// absorb the Stirling corrections that separate `Γ(sn)` from `(n!)^s`.
fn design(ns: &[f64], mixed: bool) -> DMatrix<f64> {
    let cols = if mixed { 6 } else { 5 };
    DMatrix::from_fn(ns.len(), cols, |i, j| {
        let n = ns[i];
        match j {
            0 => 1.0,
            1 => n,
            2 => n.ln(),
            3 => 1.0 / n,
            4 => ln_gamma(n + 1.0).unwrap_or(f64::NAN),
            _ => 0.5 * n * n,
        }
    })
}

/// Least squares with column equilibration; returns coefficients and RSS.
fn lsq(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let scales: Vec<f64> = (0..x.ncols()).map(|j| x.column(j).amax().max(1e-300)).collect();
    let mut xs = x.clone();
    for (j, s) in scales.iter().enumerate() {
        xs.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = xs.clone().svd(true, true);
    let mut beta = svd.solve(y, 1e-13).map_err(|e| LabError::Domain(format!("least squares failed: {e}")))?;
    let rss = (&xs * &beta - y).norm_squared();
    for (j, s) in scales.iter().enumerate() {
        beta[j] /= s;
    }
    Ok((beta, rss))
}

struct Fits {
    s_g: f64,
    s_m: f64,
    log_q: f64,
    rss_g: f64,
    rss_m: f64,
}

fn fit_models(ns: &[f64], ys: &[f64], q: Option<f64>) -> Result<Fits> {
    let y = DVector::from_column_slice(ys);
    let (bg, rss_g) = lsq(&design(ns, false), &y)?;
    let (s_m, log_q, rss_m) = match q {
        Some(q) => {
            let shifted = DVector::from_iterator(ns.len(), ns.iter().zip(ys).map(|(n, y)| y - 0.5 * n * n * q.ln()));
            let (bm, rss) = lsq(&design(ns, false), &shifted)?;
            (bm[4], q.ln(), rss)
        }
        None => {
            let (bm, rss) = lsq(&design(ns, true), &y)?;
            (bm[4], bm[5], rss)
        }
    };
    Ok(Fits { s_g: bg[4], s_m, log_q, rss_g, rss_m })
}

/// Gevrey vs mixed-order reading of `|a_n|` (index = n; zeros and `n = 0`
/// skipped). With `q` given the mixed model uses it, otherwise `q̂` is fitted.
pub fn classify_growth(magnitudes: &[f64], q: Option<f64>, k_hint: Option<u32>, opts: &ClassifyOptions) -> Result<GrowthClassification> {
    let (ns, ys): (Vec<f64>, Vec<f64>) = magnitudes
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, a)| **a > 0.0 && a.is_finite())
        .map(|(n, a)| (n as f64, a.ln()))
        .unzip();
    if ns.len() < 8 {
        return Err(LabError::InsufficientData(format!("{} usable magnitudes, need at least 8", ns.len())));
    }
    if let Some(q) = q {
        if !(q > 1.0) {
            return Err(LabError::Domain(format!("q must exceed 1, got {q}")));
        }
    }
    let f = fit_models(&ns, &ys, q)?;
    let floor = ns.len() as f64 * 1e-20;
    let (g, m) = (f.rss_g.max(floor), f.rss_m.max(floor));
    let mixed_wins = g > opts.margin * m;
    let gevrey_wins = m > opts.margin * g || (q.is_none() && !mixed_wins);
    let verdict = if mixed_wins && f.log_q > opts.ln_q_min {
        Verdict::Mixed { s: f.s_m, q: f.log_q.exp() }
    } else if gevrey_wins && !mixed_wins {
        if f.s_g < opts.s_min {
            Verdict::Convergent
        } else {
            Verdict::Gevrey { s: f.s_g }
        }
    } else {
        Verdict::Ambiguous
    };
    let use_mixed = matches!(verdict, Verdict::Mixed { .. });
    let s = if use_mixed { f.s_m } else { f.s_g };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut draws = Vec::with_capacity(opts.bootstrap);
    let len = ns.len();
    for _ in 0..opts.bootstrap {
        let mut idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..len)).collect();
        idx.sort_unstable();
        let mut distinct = idx.clone();
        distinct.dedup();
        if distinct.len() < 7 {
            continue;
        }
        let bn: Vec<f64> = idx.iter().map(|&i| ns[i]).collect();
        let by: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
        if let Ok(bf) = fit_models(&bn, &by, q) {
            draws.push(if use_mixed { bf.s_m } else { bf.s_g });
        }
    }
    let s_err = if draws.len() > 1 {
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(GrowthClassification {
        verdict,
        s,
        s_err,
        log_q: f.log_q,
        residual_gevrey: f.rss_g,
        residual_mixed: f.rss_m,
        length: len,
        expected_s: k_hint.map(|k| 1.0 / k as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lg(x: f64) -> f64 {
        ln_gamma(x).unwrap()
    }

    fn seq(f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=30).map(|n| if n == 0 { 0.0 } else { f(n as f64).exp() }).collect()
    }

    #[test]
    fn half_gevrey() {
        let c = classify_growth(&seq(|n| lg(n / 2.0)), None, Some(2), &ClassifyOptions::default()).unwrap();
        let Verdict::Gevrey { s } = c.verdict else { panic!("{c:?}") };
        assert!((s - 0.5).abs() < 0.05, "{c:?}");
        assert!(c.s_err.is_finite());
    }

    #[test]
    fn mixed_sequence() {
        let c = classify_growth(&seq(|n| lg(n) + 0.5 * n * n * 1.5f64.ln()), None, None, &ClassifyOptions::default()).unwrap();
        let Verdict::Mixed { s, q } = c.verdict else { panic!("{c:?}") };
        assert!((s - 1.0).abs() < 0.05 && (q - 1.5).abs() < 0.1, "{c:?}");
    }

    #[test]
    fn geometric_is_convergent() {
        let c = classify_growth(&seq(|n| n * 3f64.ln()), None, None, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Convergent, "{c:?}");
        assert!(c.s.abs() < 0.05);
    }

    #[test]
    fn too_short() {
        let a = [0.0, 1.0, 2.0, 0.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        assert!(matches!(classify_growth(&a, None, None, &ClassifyOptions::default()), Err(LabError::InsufficientData(_))));
    }
}
