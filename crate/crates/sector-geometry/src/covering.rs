use serde::{Deserialize, Serialize};

use crate::sector::wrap_angle;
use crate::{GeometryError, Result, Sector};

/// A violated bullet of the good-covering definition, with a witness direction
/// (radians) where one exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CoveringViolation {
    NeighboursDisjoint { first: usize, second: usize },
    TripleOverlap { sectors: [usize; 3], witness: f64 },
    Gap { witness: f64 },
    RadiusBelowDisc { index: usize, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub pass: bool,
    pub violations: Vec<CoveringViolation>,
}

/// Checks the three bullets purely in angle. The sectors are open, so a shared
/// endpoint direction that no sector contains counts as a gap.
pub fn is_good_covering(sectors: &[Sector]) -> Result<CoveringReport> {
    if sectors.len() < 2 {
        return Err(GeometryError::Domain(format!("a good covering needs at least 2 sectors, got {}", sectors.len())));
    }
    if let Some(i) = sectors.iter().position(|s| !s.is_bounded()) {
        return Err(GeometryError::Domain(format!("sector {i} is unbounded")));
    }

    let mut cuts: Vec<f64> = sectors
        .iter()
        .flat_map(|s| [wrap_angle(s.bisector - s.half_opening), wrap_angle(s.bisector + s.half_opening)])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    // probe each cut direction and the midpoint of each elementary arc
    let mut probes: Vec<f64> = Vec::with_capacity(2 * cuts.len());
    for (i, &a) in cuts.iter().enumerate() {
        let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + std::f64::consts::TAU };
        probes.push(wrap_angle(0.5 * (a + b)));
    }
    probes.extend_from_slice(&cuts);
    let arcs_mid = &probes[..cuts.len()];

    let mut violations = Vec::new();
    let mut gap_reported = false;
    let mut triples_seen = Vec::new();
    for &theta in &probes {
        let inside: Vec<usize> = (0..sectors.len()).filter(|&i| sectors[i].contains_direction(theta)).collect();
        if inside.is_empty() && !gap_reported {
            violations.push(CoveringViolation::Gap { witness: theta });
            gap_reported = true;
        }
        if inside.len() >= 3 {
            let t = [inside[0], inside[1], inside[2]];
            if !triples_seen.contains(&t) {
                triples_seen.push(t);
                violations.push(CoveringViolation::TripleOverlap { sectors: t, witness: theta });
            }
        }
    }

    let n = sectors.len();
    let pairs: Vec<(usize, usize)> = if n == 2 { vec![(0, 1)] } else { (0..n).map(|i| (i, (i + 1) % n)).collect() };
    for (i, j) in pairs {
        let meet = arcs_mid.iter().any(|&t| sectors[i].contains_direction(t) && sectors[j].contains_direction(t));
        if !meet {
            violations.push(CoveringViolation::NeighboursDisjoint { first: i, second: j });
        }
    }
    Ok(CoveringReport { pass: violations.is_empty(), violations })
}

/// Validated good covering of the punctured disc of radius `disc_radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodCovering {
    pub sectors: Vec<Sector>,
    pub disc_radius: f64,
}

impl GoodCovering {
    pub fn new(sectors: Vec<Sector>, disc_radius: f64) -> Result<Self> {
        let mut report = is_good_covering(&sectors)?;
        for (i, s) in sectors.iter().enumerate() {
            let r = s.radius.unwrap_or(f64::INFINITY);
            if r < disc_radius {
                report.violations.push(CoveringViolation::RadiusBelowDisc { index: i, radius: r });
            }
        }
        if !report.violations.is_empty() {
            return Err(GeometryError::Domain(format!("not a good covering: {:?}", report.violations)));
        }
        Ok(GoodCovering { sectors, disc_radius })
    }

    /// Sectors at `bisectors` (radians) sharing one half-opening and radius.
    pub fn uniform(bisectors: &[f64], half_opening: f64, radius: f64) -> Result<Self> {
        let sectors = bisectors.iter().map(|&d| Sector::new(d, half_opening, Some(radius))).collect::<Result<Vec<_>>>()?;
        Self::new(sectors, radius)
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(ds: &[f64], h: f64) -> Vec<Sector> {
        ds.iter().map(|&d| Sector::from_degrees(d, h, Some(1.0)).unwrap()).collect()
    }

    #[test]
    fn three_sectors_pass() {
        let r = is_good_covering(&deg(&[0.0, 120.0, 240.0], 75.0)).unwrap();
        assert!(r.pass, "{:?}", r.violations);
    }

    #[test]
    fn two_narrow_sectors_leave_gap() {
        let r = is_good_covering(&deg(&[0.0, 180.0], 60.0)).unwrap();
        assert!(!r.pass);
        let gap = r.violations.iter().find_map(|v| match v {
            CoveringViolation::Gap { witness } => Some(*witness),
            _ => None,
        });
        let w = gap.unwrap().to_degrees();
        assert!((60.0..120.0).contains(&w) || (240.0..300.0).contains(&w), "{w}");
    }

    #[test]
    fn gap_near_270() {
        let r = is_good_covering(&deg(&[0.0, 90.0, 180.0], 89.0)).unwrap();
        assert!(r.violations.iter().any(|v| matches!(v, CoveringViolation::Gap { witness } if (witness.to_degrees() - 270.0).abs() < 2.0)));
    }

    #[test]
    fn touching_endpoints_are_a_gap() {
        let r = is_good_covering(&deg(&[0.0, 120.0, 240.0], 60.0)).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn triple_overlap_detected() {
        let r = is_good_covering(&deg(&[0.0, 120.0, 240.0], 130.0)).unwrap();
        assert!(r.violations.iter().any(|v| matches!(v, CoveringViolation::TripleOverlap { .. })));
    }

    #[test]
    fn unbounded_rejected() {
        let s = vec![Sector::unbounded(0.0, 2.0).unwrap(), Sector::unbounded(3.0, 2.0).unwrap()];
        assert!(is_good_covering(&s).is_err());
        assert!(is_good_covering(&deg(&[0.0], 179.0)).is_err());
    }

    #[test]
    fn radius_bullet() {
        let mut s = deg(&[0.0, 120.0, 240.0], 75.0);
        s[1].radius = Some(0.5);
        assert!(GoodCovering::new(s, 0.9).is_err());
    }

    proptest::proptest! {
        #[test]
        fn rotation_invariant(theta in -7.0f64..7.0, h in 50.0f64..100.0) {
            let s = deg(&[0.0, 120.0, 240.0], h);
            let rot: Vec<_> = s.iter().map(|x| x.rotated(theta)).collect();
            proptest::prop_assert_eq!(is_good_covering(&s).unwrap().pass, is_good_covering(&rot).unwrap().pass);
        }
    }
}
