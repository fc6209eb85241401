use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::roots::roots_of_borel_symbol;
use crate::{GeometryError, GoodCovering, Result, Sector, C64};

/// Distance kept between a chosen direction and the edges of its Borel sector.
pub const BOUNDARY_INSET: f64 = 2.0 * PI / 180.0;

/// Direction `γ` inside `sector` (with the boundary inset) maximising
/// `cos(k(γ − phase))`, returned with that cosine. Ties go to the smaller γ.
pub fn choose_direction(sector: &Sector, k: u32, phase: f64) -> Result<(f64, f64)> {
    if sector.is_bounded() {
        return Err(GeometryError::Domain("Borel sectors must be unbounded".into()));
    }
    if k == 0 {
        return Err(GeometryError::Domain("k must be positive".into()));
    }
    let kf = k as f64;
    let (lo, hi) = if sector.half_opening > BOUNDARY_INSET {
        (sector.bisector - sector.half_opening + BOUNDARY_INSET, sector.bisector + sector.half_opening - BOUNDARY_INSET)
    } else {
        (sector.bisector, sector.bisector)
    };
    let mut cands = vec![lo, hi];
    // interior maximisers γ = phase + 2πm/k
    let period = 2.0 * PI / kf;
    let m0 = ((lo - phase) / period).ceil() as i64;
    let m1 = ((hi - phase) / period).floor() as i64;
    for m in m0..=m1 {
        cands.push(phase + period * m as f64);
    }
    cands.sort_by(f64::total_cmp);
    let mut best = (lo, f64::NEG_INFINITY);
    for g in cands {
        let c = (kf * (g - phase)).cos();
        if c > best.1 + 1e-13 {
            best = (g, c);
        }
    }
    if best.1 <= 0.0 {
        return Err(GeometryError::Infeasible {
            bisector_deg: sector.bisector.to_degrees(),
            phase_deg: phase.to_degrees(),
            best: best.1,
        });
    }
    Ok(best)
}

/// Which variable the good covering lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// covering in ε, companion sector in t
    EpsilonCovering,
    /// covering in t, companion sector in ε
    TCovering,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleConfig {
    pub covering: GoodCovering,
    pub companion: Sector,
    pub borel_sectors: Vec<Sector>,
    pub variant: Variant,
    /// Minimum cosine over the probes of each sector; `None` when no probe fell in it.
    pub margins: Vec<Option<f64>>,
    pub roots: Vec<C64>,
    pub warnings: Vec<String>,
}

impl AdmissibleConfig {
    /// Index of the covering sector holding the covered variable of a `(t, ε)` pair.
    pub fn sector_of(&self, t: C64, eps: C64) -> Option<usize> {
        let z = match self.variant {
            Variant::EpsilonCovering => eps,
            Variant::TCovering => t,
        };
        self.covering.sectors.iter().position(|s| s.contains(z))
    }
}


/// Checks root avoidance and direction feasibility over `probes` of `(t, ε)`.
/// A probe counts for sector p when its covered variable lies in the p-th
/// covering sector and the other variable lies in the companion sector.
pub fn build_admissible(
    covering: GoodCovering,
    companion: Sector,
    borel_sectors: Vec<Sector>,
    p: &[C64],
    k: u32,
    probes: &[(C64, C64)],
    variant: Variant,
) -> Result<AdmissibleConfig> {
    if borel_sectors.len() != covering.len() {
        return Err(GeometryError::Admissibility(format!(
            "{} Borel sectors for {} covering sectors",
            borel_sectors.len(),
            covering.len()
        )));
    }
    if let Some(i) = borel_sectors.iter().position(|s| s.is_bounded()) {
        return Err(GeometryError::Domain(format!("Borel sector {i} must be unbounded")));
    }
    let roots = roots_of_borel_symbol(p, k)?;
    for (i, s) in borel_sectors.iter().enumerate() {
        if let Some(r) = roots.iter().find(|r| s.contains(**r)) {
            return Err(GeometryError::Admissibility(format!(
                "root {:.6}{:+.6}i (arg {:.3}°) lies in Borel sector {i}",
                r.re,
                r.im,
                r.arg().to_degrees()
            )));
        }
    }

    let mut warnings = Vec::new();
    let kf = k as f64;
    for (i, (cov, b)) in covering.sectors.iter().zip(&borel_sectors).enumerate() {
        let spread = 2.0 * (cov.half_opening + companion.half_opening);
        let limit = PI / kf + 2.0 * b.half_opening;
        if spread >= limit {
            warnings.push(format!(
                "sector {i}: phase spread {:.2}° is not below π/k + 2·(Borel half-opening) = {:.2}°",
                spread.to_degrees(),
                limit.to_degrees()
            ));
        }
    }

    let mut margins = vec![None::<f64>; covering.len()];
    for &(t, eps) in probes {
        let (cov_z, comp_z) = match variant {
            Variant::EpsilonCovering => (eps, t),
            Variant::TCovering => (t, eps),
        };
        if !companion.contains(comp_z) {
            continue;
        }
        let phase = (eps * t).arg();
        for (i, cov) in covering.sectors.iter().enumerate() {
            if !cov.contains(cov_z) {
                continue;
            }
            let (_, m) = choose_direction(&borel_sectors[i], k, phase).map_err(|e| {
                GeometryError::Admissibility(format!("probe t={t}, ε={eps} inadmissible for sector {i}: {e}"))
            })?;
            margins[i] = Some(margins[i].map_or(m, |x: f64| x.min(m)));
        }
    }
    if margins.iter().any(Option::is_none) {
        warnings.push("some sectors have no probes; their margins are undefined".into());
    }
    Ok(AdmissibleConfig { covering, companion, borel_sectors, variant, margins, roots, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn aligned_ray() {
        let u = Sector::unbounded(0.0, d(50.0)).unwrap();
        let (g, m) = choose_direction(&u, 1, 0.0).unwrap();
        assert!(g.abs() < 1e-15 && (m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn opposite_phase_infeasible() {
        let u = Sector::unbounded(0.0, d(10.0)).unwrap();
        assert!(matches!(choose_direction(&u, 1, PI), Err(GeometryError::Infeasible { .. })));
    }

    #[test]
    fn boundary_clamped() {
        let u = Sector::unbounded(d(60.0), d(30.0)).unwrap();
        let (g, m) = choose_direction(&u, 2, 0.0).unwrap();
        assert!((g - d(32.0)).abs() < 1e-12);
        assert!((m - d(64.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn tie_breaks_to_smaller_direction() {
        // phase opposite the bisector, k = 2: both edges give the same cosine
        let u = Sector::unbounded(0.0, d(80.0)).unwrap();
        let (g, _) = choose_direction(&u, 2, d(90.0) + PI).unwrap();
        assert!((g + d(78.0)).abs() < 1e-12, "{}", g.to_degrees());
        let wide = Sector::unbounded(0.0, d(100.0)).unwrap();
        let (g2, _) = choose_direction(&wide, 1, PI).unwrap();
        assert!((g2 + d(98.0)).abs() < 1e-12);
    }

    #[test]
    fn bounded_borel_sector_rejected() {
        assert!(choose_direction(&Sector::new(0.0, 1.0, Some(1.0)).unwrap(), 1, 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn rotation_equivariant(theta in -3.0f64..3.0, phase in -0.6f64..0.6, k in 1u32..4) {
            let u = Sector::unbounded(0.3, d(55.0)).unwrap();
            let (g, m) = choose_direction(&u, k, phase).unwrap();
            let (g2, m2) = choose_direction(&u.rotated(theta), k, phase + theta).unwrap();
            proptest::prop_assert!((g2 - g - theta).abs() < 1e-9);
            proptest::prop_assert!((m2 - m).abs() < 1e-9);
        }
    }
}
