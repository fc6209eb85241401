//! Synthetic fixtures with known answers: a classifier battery and random
//! polynomial series for the norm comparison.

use numerics_core::{ln_gamma, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sector_geometry::Sector;
use serde::Serialize;

use crate::{classify_growth, series_norm, BaseVariable, ClassifyOptions, NormSpec, NormVariant, Result, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Truth {
    Gevrey { s: f64 },
    Mixed { s: f64, q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticSequence {
    pub label: String,
    pub truth: Truth,
    /// `|a_n|` for `n = 0..=len`; `a_0` is set to zero.
    pub magnitudes: Vec<f64>,
}

/// `|a_n| = C·Mⁿ·Γ(s n)·q^{n²/2}` (q = 1 for the Gevrey entries).
fn sequence(label: String, truth: Truth, c: f64, m: f64, len: usize) -> SyntheticSequence {
    let (s, lq) = match truth {
        Truth::Gevrey { s } => (s, 0.0),
        Truth::Mixed { s, q } => (s, q.ln()),
    };
    let magnitudes = (0..=len)
        .map(|n| {
            if n == 0 {
                return 0.0;
            }
            let n = n as f64;
            (c.ln() + n * m.ln() + ln_gamma(s * n).unwrap_or(f64::NAN) + 0.5 * n * n * lq).exp()
        })
        .collect();
    SyntheticSequence { label, truth, magnitudes }
}

/// Ten Gevrey sequences with `s ∈ {1/3, 1/2, 1}` and ten mixed ones with
/// `q ∈ {1.2, 1.5, 2}`, each with its own prefactor and geometric rate.
pub fn classifier_battery() -> Vec<SyntheticSequence> {
    let len = 30;
    let gevrey = [
        (1.0 / 3.0, 1.0, 1.0),
        (1.0 / 3.0, 0.2, 2.5),
        (1.0 / 3.0, 40.0, 0.6),
        (0.5, 1.0, 1.0),
        (0.5, 3.0, 0.3),
        (0.5, 0.01, 4.0),
        (1.0, 1.0, 1.0),
        (1.0, 7.0, 0.5),
        (1.0, 0.5, 2.0),
        (1.0, 1e-3, 0.1),
    ];
    let mixed = [
        (1.2, 1.0, 1.0, 1.0),
        (1.2, 0.5, 5.0, 0.7),
        (1.2, 1.0, 0.1, 2.0),
        (1.5, 1.0, 1.0, 1.0),
        (1.5, 0.5, 2.0, 1.5),
        (1.5, 1.0 / 3.0, 0.3, 0.8),
        (2.0, 1.0, 1.0, 1.0),
        (2.0, 0.5, 10.0, 0.4),
        (2.0, 1.0, 0.05, 3.0),
        (1.5, 1.0, 100.0, 0.2),
    ];
    let mut out: Vec<SyntheticSequence> = gevrey
        .iter()
        .map(|&(s, c, m)| sequence(format!("gevrey s={s:.4} C={c} M={m}"), Truth::Gevrey { s }, c, m, len))
        .collect();
    out.extend(
        mixed
            .iter()
            .map(|&(q, s, c, m)| sequence(format!("mixed q={q} s={s:.4} C={c} M={m}"), Truth::Mixed { s, q }, c, m, len)),
    );
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryEntry {
    pub label: String,
    pub truth: Truth,
    pub verdict: Option<Verdict>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub correct: usize,
    pub total: usize,
    pub entries: Vec<BatteryEntry>,
}

/// Classifies every battery entry with no prescribed q. A verdict counts as
/// correct when the model matches, `s` is within `s_tol` and `q̂` within `q_tol`.
pub fn run_classifier_battery(opts: &ClassifyOptions, s_tol: f64, q_tol: f64) -> BatteryReport {
    let entries: Vec<BatteryEntry> = classifier_battery()
        .into_iter()
        .map(|seq| {
            let verdict = classify_growth(&seq.magnitudes, None, None, opts).ok().map(|c| c.verdict);
            let correct = match (seq.truth, verdict) {
                (Truth::Gevrey { s }, Some(Verdict::Gevrey { s: fs })) => (fs - s).abs() <= s_tol,
                (Truth::Mixed { s, q }, Some(Verdict::Mixed { s: fs, q: fq })) => (fs - s).abs() <= s_tol && (fq - q).abs() <= q_tol,
                _ => false,
            };
            BatteryEntry { label: seq.label, truth: seq.truth, verdict, correct }
        })
        .collect();
    BatteryReport { correct: entries.iter().filter(|e| e.correct).count(), total: entries.len(), entries }
}

/// `h(x, z) = Σ_n h_n(x) zⁿ/n!` with each `h_n` a random polynomial in x.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSeries {
    /// `coeffs[n][j]` multiplies `xʲ` in `h_n`.
    pub coeffs: Vec<Vec<C64>>,
}

impl PolynomialSeries {
    pub fn eval(&self, n: usize, x: C64) -> C64 {
        self.coeffs[n].iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormFixture {
    pub norm: NormSpec,
    pub series: PolynomialSeries,
}

/// Random sector, q, R₁, truncation and polynomial coefficients, seeded.
pub fn norm_fixtures(seed: u64, count: usize) -> Vec<NormFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let base = Sector::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.05..1.2),
                Some(rng.gen_range(0.2..1.5)),
            )
            .expect("random sector parameters are valid");
            let q = rng.gen_range(1.05..3.0);
            let r1 = rng.gen_range(0.1..4.0);
            let n_norm = rng.gen_range(2..9);
            let degree = rng.gen_range(0..5);
            let norm = NormSpec::new(NormVariant::Sup, BaseVariable::T, base, q, r1, n_norm).expect("valid norm");
            let coeffs = (0..=n_norm)
                .map(|_| (0..=degree).map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect())
                .collect();
            NormFixture { norm, series: PolynomialSeries { coeffs } }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormComparison {
    pub q_relative: f64,
    pub sup: f64,
}

impl NormComparison {
    pub fn holds(&self) -> bool {
        self.q_relative <= self.sup
    }
}

/// Both norms of the fixture's series on the fixture's grid.
pub fn compare_norms(fixture: &NormFixture) -> Result<NormComparison> {
    let sup_norm = NormSpec { variant: NormVariant::Sup, ..fixture.norm.clone() };
    let q_norm = NormSpec { variant: NormVariant::QRelative, ..fixture.norm.clone() };
    let h = |n: usize, x: C64| Ok(fixture.series.eval(n, x));
    Ok(NormComparison { q_relative: series_norm(&q_norm, h)?.value, sup: series_norm(&sup_norm, h)?.value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_has_twenty_entries() {
        let b = classifier_battery();
        assert_eq!(b.len(), 20);
        assert_eq!(b.iter().filter(|s| matches!(s.truth, Truth::Mixed { .. })).count(), 10);
    }

    #[test]
    fn fixtures_are_seeded() {
        assert_eq!(norm_fixtures(7, 3), norm_fixtures(7, 3));
        assert_ne!(norm_fixtures(7, 3), norm_fixtures(8, 3));
    }

    #[test]
    fn polynomial_eval() {
        let p = PolynomialSeries { coeffs: vec![vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)]] };
        assert!((p.eval(0, C64::new(2.0, 0.0)) - C64::new(17.0, 0.0)).norm() < 1e-15);
    }
}
