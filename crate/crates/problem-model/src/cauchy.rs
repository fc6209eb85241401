use std::collections::BTreeMap;

use numerics_core::gamma_real;
use serde::{Deserialize, Serialize};

use crate::{EpsPoly, ModelError, Result, C64};

/// Borel-side Cauchy data: `P_j(u, ε) = Σ_h p_{j,h}(ε) u^h`, keyed by `j` then `h`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CauchyData(pub BTreeMap<u32, BTreeMap<u32, EpsPoly>>);

impl CauchyData {
    /// Empty data for orders `0..s` (all `P_j ≡ 0`).
    pub fn zero(s: u32) -> Self {
        CauchyData((0..s).map(|j| (j, BTreeMap::new())).collect())
    }

    pub fn set(&mut self, j: u32, h: u32, p: EpsPoly) {
        self.0.entry(j).or_default().insert(h, p);
    }

    pub fn terms(&self, j: u32) -> impl Iterator<Item = (u32, &EpsPoly)> {
        self.0.get(&j).into_iter().flat_map(|m| m.iter().map(|(&h, p)| (h, p)))
    }

    /// Number of orders `j` carried, i.e. one past the largest key.
    pub fn order(&self) -> u32 {
        self.0.keys().next_back().map_or(0, |j| j + 1)
    }

    /// `P_j(u, ε)`.
    pub fn borel_value(&self, j: u32, u: C64, eps: C64) -> C64 {
        self.terms(j).map(|(h, p)| p.eval(eps) * u.powu(h)).sum()
    }

    pub(crate) fn check(&self, s: u32) -> Result<()> {
        for (&j, m) in &self.0 {
            if j >= s {
                return Err(ModelError::Invalid(format!("Cauchy datum for j = {j} but S = {s}")));
            }
            if m.contains_key(&0) {
                return Err(ModelError::Invalid(format!("P_{j} has a constant term (phi_j(0, eps) must vanish)")));
            }
        }
        Ok(())
    }
}

/// `φ_j(t, ε) = Σ_h Γ(h/k) p_{j,h}(ε) (εt)^h` for `j = 0..order`.
pub fn cauchy_to_physical(data: &CauchyData, k: u32, eps: C64, t: C64) -> Result<Vec<C64>> {
    let x = eps * t;
    (0..data.order())
        .map(|j| {
            data.terms(j)
                .map(|(h, p)| Ok(gamma_real(h as f64 / k as f64).map_err(|e| ModelError::Domain(e.to_string()))? * p.eval(eps) * x.powu(h)))
                .sum()
        })
        .collect()
}

/// Inverse of [`cauchy_to_physical`] on coefficients: the coefficient of
/// `(εt)^h` in `φ_j` is divided by `Γ(h/k)`.
pub fn physical_to_cauchy(phi: &BTreeMap<u32, BTreeMap<u32, EpsPoly>>, k: u32) -> Result<CauchyData> {
    if k == 0 {
        return Err(ModelError::Domain("k must be positive".into()));
    }
    let mut out = CauchyData::default();
    for (&j, m) in phi {
        out.0.entry(j).or_default();
        for (&h, p) in m {
            if h == 0 {
                if p.is_zero() {
                    continue;
                }
                return Err(ModelError::Domain(format!("phi_{j} has a constant term")));
            }
            let g = gamma_real(h as f64 / k as f64).map_err(|e| ModelError::Domain(e.to_string()))?;
            out.set(j, h, p.scaled(C64::new(1.0 / g, 0.0)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(j: u32, hs: &[(u32, f64)]) -> CauchyData {
        let mut d = CauchyData::zero(j + 1);
        for &(h, c) in hs {
            d.set(j, h, EpsPoly::real(c));
        }
        d
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn forward_examples() {
        let v = cauchy_to_physical(&data(0, &[(1, 1.0)]), 1, r(0.1), r(2.0)).unwrap();
        assert!((v[0] - r(0.2)).norm() < 1e-15);
        let v = cauchy_to_physical(&data(0, &[(2, 1.0)]), 2, r(1.0), r(0.5)).unwrap();
        assert!((v[0] - r(0.25)).norm() < 1e-15);
        let v = cauchy_to_physical(&data(0, &[(1, 1.0), (2, 1.0)]), 1, r(1.0), r(1.0)).unwrap();
        assert!((v[0] - r(2.0)).norm() < 1e-14);
    }

    #[test]
    fn inverse_examples() {
        let mut phi = BTreeMap::new();
        phi.insert(0, BTreeMap::from([(1, EpsPoly::real(1.0))]));
        assert_eq!(physical_to_cauchy(&phi, 1).unwrap(), data(0, &[(1, 1.0)]));
        let mut phi = BTreeMap::new();
        phi.insert(0, BTreeMap::from([(3, EpsPoly::real(2.0))]));
        assert_eq!(physical_to_cauchy(&phi, 3).unwrap(), data(0, &[(3, 2.0)]));
        let mut phi = BTreeMap::new();
        phi.insert(0, BTreeMap::from([(0, EpsPoly::real(1.0)), (1, EpsPoly::real(1.0))]));
        assert!(matches!(physical_to_cauchy(&phi, 1), Err(ModelError::Domain(_))));
    }

    proptest::proptest! {
        #[test]
        fn roundtrip(k in 1u32..4, cs in proptest::collection::vec(-5.0f64..5.0, 1..6)) {
            let mut d = CauchyData::zero(1);
            for (i, c) in cs.iter().enumerate() {
                d.set(0, i as u32 + 1, EpsPoly::new(vec![r(*c), C64::new(0.5, *c)]).unwrap());
            }
            // physical coefficients of (εt)^h
            let mut phi = BTreeMap::new();
            for (h, p) in d.terms(0) {
                let g = gamma_real(h as f64 / k as f64).unwrap();
                phi.entry(0).or_insert_with(BTreeMap::new).insert(h, p.scaled(r(g)));
            }
            let back = physical_to_cauchy(&phi, k).unwrap();
            for ((h1, p1), (h2, p2)) in d.terms(0).zip(back.terms(0)) {
                proptest::prop_assert_eq!(h1, h2);
                for (a, b) in p1.coeffs().iter().zip(p2.coeffs()) {
                    proptest::prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
                }
            }
        }
    }
}
