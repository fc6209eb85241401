use serde::Serialize;

use crate::ProblemSpec;

/// One inequality of the hypothesis set, evaluated as `lhs (>|≥) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub term: Option<usize>,
    pub h: Option<u32>,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub slack: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, term: Option<usize>, h: Option<u32>, lhs: f64, rhs: f64, strict: bool) -> Self {
        let slack = lhs - rhs;
        let pass = if strict { slack > 0.0 } else { slack >= -1e-12 * (1.0 + rhs.abs()) };
        Check { name, term, h, lhs, rhs, strict, slack, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl HypothesisReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn find(&self, name: &str, term: usize) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.term == Some(term))
    }
}

/// Evaluates every hypothesis for every term and every `h` of its `z`-coefficient.
/// Failures are report entries; nothing here errors.
pub fn validate(spec: &ProblemSpec) -> HypothesisReport {
    let k = spec.k as f64;
    let s = spec.s as f64;
    let d = spec.delta;
    let mut checks = vec![
        Check::new("Delta >= 1/2", None, None, d, 0.5, false),
        Check::new("k1 > 0", None, None, spec.k1, 0.0, true),
    ];
    let deg = spec.degree_p() as f64;
    for (i, t) in spec.terms.iter().enumerate() {
        let (l0, l1, l2, l3) = (t.l0 as f64, t.l1 as f64, t.l2 as f64, t.l3 as f64);
        let w = l0 + k * l1;
        checks.push(Check::new("l2 < S", Some(i), None, s, l2, true));
        checks.push(Check::new("S >= l2 + l3", Some(i), None, s, l2 + l3, false));
        checks.push(Check::new("Delta_l >= l0", Some(i), None, t.delta as f64, l0, false));
        for h in t.z_degrees() {
            let m = l2 - h as f64;
            checks.push(Check::new("shift weight (i)", Some(i), Some(h), 2.0 * m * d + w - 2.0 * (s - 1.0) * d, 0.0, true));
            let lhs = d * (2.0 * m - 1.0).max(0.0) - m * m * d;
            let rhs = [s - 1.0, s].iter().map(|a| a * w - a * a * d).fold(f64::INFINITY, f64::min);
            checks.push(Check::new("shift weight (ii)", Some(i), Some(h), rhs, lhs, true));
        }
        checks.push(Check::new("dilation weight (iii)", Some(i), None, -2.0 * d * l3 + w, 0.0, true));
        checks.push(Check::new("degree of P", Some(i), None, k * deg, k * l1 + l0 + 2.0 * spec.k1 * l3 * spec.q.ln(), false));
    }
    let pass = checks.iter().all(|c| c.pass);
    HypothesisReport { checks, pass }
}

/// Smallest `Δ` on the grid `1/2, 3/4, …, 4` admitting some `k₁` on a
/// logarithmic grid, paired with the largest such `k₁`.
pub fn search_delta_k1(spec: &ProblemSpec) -> Option<(f64, f64)> {
    let k1_grid: Vec<f64> = (0..=48).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 48.0)).collect();
    for step in 0..=14 {
        let delta = 0.5 + 0.25 * step as f64;
        let mut best = None;
        for &k1 in &k1_grid {
            let mut trial = spec.clone();
            trial.delta = delta;
            trial.k1 = k1;
            if validate(&trial).pass {
                best = Some(k1);
            }
        }
        if let Some(k1) = best {
            return Some((delta, k1));
        }
    }
    None
}
