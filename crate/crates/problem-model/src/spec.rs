use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::poly::JsonComplex;
use crate::{CauchyData, EpsPoly, ModelError, Result, C64};

/// One term `ε^{Δ_ℓ} c_ℓ(z,ε) t^{ℓ₀} ((ε^k t^{k+1} ∂_t)^{ℓ₁} ∂_z^{ℓ₂} u)(q^{ℓ₃} t, z, ε)`
/// of the equation, with `c_ℓ(z,ε) = Σ_h c_{ℓ,h}(ε) z^h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub l0: u32,
    pub l1: u32,
    pub l2: u32,
    pub l3: u32,
    #[serde(rename = "Delta")]
    pub delta: u32,
    pub c: BTreeMap<u32, EpsPoly>,
}

impl MonomialTerm {
    pub fn coefficient(&self, h: u32, eps: C64) -> C64 {
        self.c.get(&h).map_or(C64::new(0.0, 0.0), |p| p.eval(eps))
    }

    /// `c_ℓ(z, ε)`.
    pub fn c_at(&self, z: C64, eps: C64) -> C64 {
        self.c.iter().map(|(&h, p)| p.eval(eps) * z.powu(h)).sum()
    }

    pub fn z_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.c.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub k: u32,
    #[serde(rename = "S")]
    pub s: u32,
    pub q: f64,
    pub eps0: f64,
    #[serde(rename = "P", with = "complex_list")]
    pub p: Vec<C64>,
    pub terms: Vec<MonomialTerm>,
    pub cauchy: CauchyData,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub k1: f64,
    /// Use the exponent `k₁` instead of `k` in the `ℓ₀ = 0` multiplier of the
    /// Borel recursion.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub literal_k1_exponent: bool,
}

mod complex_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let j: Vec<JsonComplex> = v.iter().map(|&c| JsonComplex::from(c)).collect();
        j.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        let j = Vec::<JsonComplex>::deserialize(d)?;
        Ok(j.into_iter().map(C64::from).collect())
    }
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        spec.check_structure()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem spec serializes")
    }

    /// Structural invariants; the analytic hypotheses live in [`crate::validate`].
    pub fn check_structure(&self) -> Result<()> {
        let bad = |m: String| Err(ModelError::Invalid(m));
        if self.k == 0 || self.s == 0 {
            return bad("k and S must be positive".into());
        }
        if !(self.q > 1.0) || !self.q.is_finite() {
            return bad(format!("q = {} must exceed 1", self.q));
        }
        if !(self.eps0 > 0.0) {
            return bad("eps0 must be positive".into());
        }
        if !(self.k1 > 0.0) || !self.delta.is_finite() {
            return bad("k1 must be positive and Delta finite".into());
        }
        if self.degree_p() < 1 {
            return bad("P must have degree at least 1".into());
        }
        if self.p[0].norm() == 0.0 {
            return bad("P(0) must be nonzero".into());
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.c.contains_key(&0) {
                return bad(format!("term {i}: c_l(0, eps) must vanish (no h = 0 entry)"));
            }
            if t.c.is_empty() {
                return bad(format!("term {i} has no z-coefficients"));
            }
        }
        self.cauchy.check(self.s)?;
        Ok(())
    }

    pub fn degree_p(&self) -> usize {
        let mut n = self.p.len();
        while n > 0 && self.p[n - 1].norm() == 0.0 {
            n -= 1;
        }
        n.saturating_sub(1)
    }

    /// `P(τ)`.
    pub fn p_at(&self, tau: C64) -> C64 {
        self.p.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * tau + c)
    }

    /// The Borel symbol `P(k u^k)`.
    pub fn borel_symbol(&self, u: C64) -> C64 {
        self.p_at(u.powu(self.k) * self.k as f64)
    }

    /// Coefficient list of `u ↦ P(k u^k)` in powers of u.
    pub fn borel_symbol_coeffs(&self) -> Vec<C64> {
        let k = self.k as usize;
        let mut out = vec![C64::new(0.0, 0.0); k * self.degree_p() + 1];
        for (j, c) in self.p.iter().take(self.degree_p() + 1).enumerate() {
            out[j * k] = c * (self.k as f64).powi(j as i32);
        }
        out
    }

    /// True when the Borel recursion does not see ε: every `ε^{Δ_ℓ−ℓ₀} c_{ℓ,h}(ε)`
    /// and every Cauchy polynomial is constant.
    pub fn borel_data_eps_free(&self) -> bool {
        let zero = C64::new(0.0, 0.0);
        let terms_ok = self.terms.iter().all(|t| {
            t.c.values().all(|p| {
                p.coeffs()
                    .iter()
                    .enumerate()
                    .all(|(d, c)| *c == zero || d as i64 + t.delta as i64 == t.l0 as i64)
            })
        });
        let cauchy_ok = self.cauchy.0.values().flat_map(|m| m.values()).all(|p| p.coeffs().iter().skip(1).all(|c| *c == zero));
        terms_ok && cauchy_ok
    }

    pub fn max_l3(&self) -> u32 {
        self.terms.iter().map(|t| t.l3).max().unwrap_or(0)
    }

    /// The single-term test problem used throughout: `k = S = 1`, `q = 1.2`,
    /// `P(τ) = 1 + τ³`, one term `(2,0,0,1)` with `Δ_ℓ = 2`, `c = z`, `φ₀ = εt`.
    pub fn toy1() -> Self {
        let mut c = BTreeMap::new();
        c.insert(1, EpsPoly::real(1.0));
        let mut cauchy = CauchyData::zero(1);
        cauchy.set(0, 1, EpsPoly::real(1.0));
        ProblemSpec {
            k: 1,
            s: 1,
            q: 1.2,
            eps0: 0.125,
            p: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            terms: vec![MonomialTerm { l0: 2, l1: 0, l2: 0, l3: 1, delta: 2, c }],
            cauchy,
            delta: 0.5,
            k1: 1.0,
            literal_k1_exponent: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_roundtrips_through_json() {
        let s = ProblemSpec::toy1();
        let back = ProblemSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn parses_documented_layout() {
        let text = r#"{"k":1,"S":1,"q":1.2,"eps0":0.125,"P":[1,0,0,1],
            "terms":[{"l0":2,"l1":0,"l2":0,"l3":1,"Delta":2,"c":{"1":[1]}}],
            "cauchy":{"0":{"1":[1]}},"Delta":0.5,"k1":1}"#;
        assert_eq!(ProblemSpec::from_json(text).unwrap(), ProblemSpec::toy1());
    }

    #[test]
    fn eps_dependence_of_borel_data() {
        let mut s = ProblemSpec::toy1();
        assert!(s.borel_data_eps_free());
        s.terms[0].delta = 3;
        assert!(!s.borel_data_eps_free());
        s.terms[0].c.insert(1, EpsPoly::new(vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)]).unwrap());
        assert!(!s.borel_data_eps_free());
        let mut s = ProblemSpec::toy1();
        s.terms[0].l0 = 3;
        s.terms[0].c.insert(1, EpsPoly::new(vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)]).unwrap());
        assert!(s.borel_data_eps_free());
        let mut s = ProblemSpec::toy1();
        s.cauchy.set(0, 1, EpsPoly::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap());
        assert!(!s.borel_data_eps_free());
    }

    #[test]
    fn structural_errors() {
        let mut s = ProblemSpec::toy1();
        s.p[0] = C64::new(0.0, 0.0);
        assert!(s.check_structure().is_err());
        let mut s = ProblemSpec::toy1();
        s.q = 1.0;
        assert!(s.check_structure().is_err());
        let mut s = ProblemSpec::toy1();
        s.terms[0].c.insert(0, EpsPoly::real(1.0));
        assert!(s.check_structure().is_err());
        assert!(matches!(ProblemSpec::from_json("{"), Err(ModelError::Parse(_))));
    }

    #[test]
    fn borel_symbol_coefficients() {
        let mut s = ProblemSpec::toy1();
        s.k = 2;
        let c = s.borel_symbol_coeffs();
        assert_eq!(c.len(), 7);
        assert_eq!(c[6], C64::new(8.0, 0.0));
        let u = C64::new(0.3, 0.2);
        let direct = s.borel_symbol(u);
        let horner = c.iter().rev().fold(C64::new(0.0, 0.0), |a, &x| a * u + x);
        assert!((direct - horner).norm() < 1e-14);
    }
}
