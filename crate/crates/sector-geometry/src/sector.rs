use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{GeometryError, Result, C64};

/// Angle reduced to `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a − b` reduced to `(−π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Open sector `{z ≠ 0 : |arg z − d| < δ, |z| < ρ}`; `radius = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SectorDeg", into = "SectorDeg")]
pub struct Sector {
    pub bisector: f64,
    pub half_opening: f64,
    pub radius: Option<f64>,
}

impl Sector {
    pub fn new(bisector: f64, half_opening: f64, radius: Option<f64>) -> Result<Self> {
        if !(half_opening > 0.0 && half_opening <= PI) {
            return Err(GeometryError::Domain(format!("half-opening {half_opening} outside (0, π]")));
        }
        if let Some(r) = radius {
            if !(r > 0.0) {
                return Err(GeometryError::Domain(format!("radial bound {r} must be positive")));
            }
        }
        if !bisector.is_finite() {
            return Err(GeometryError::Domain("bisector must be finite".into()));
        }
        Ok(Sector { bisector, half_opening, radius })
    }

    pub fn from_degrees(bisector: f64, half_opening: f64, radius: Option<f64>) -> Result<Self> {
        Self::new(bisector.to_radians(), half_opening.to_radians(), radius)
    }

    pub fn unbounded(bisector: f64, half_opening: f64) -> Result<Self> {
        Self::new(bisector, half_opening, None)
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_some()
    }

    pub fn contains_direction(&self, theta: f64) -> bool {
        angle_diff(theta, self.bisector).abs() < self.half_opening
    }

    pub fn contains(&self, z: C64) -> bool {
        if z.norm() == 0.0 {
            return false;
        }
        if let Some(r) = self.radius {
            if z.norm() >= r {
                return false;
            }
        }
        self.contains_direction(z.arg())
    }

    pub fn rotated(&self, theta: f64) -> Sector {
        Sector { bisector: self.bisector + theta, ..*self }
    }
}

/// File representation: angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorDeg {
    pub bisector_deg: f64,
    pub half_opening_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl TryFrom<SectorDeg> for Sector {
    type Error = GeometryError;

    fn try_from(s: SectorDeg) -> Result<Self> {
        Sector::from_degrees(s.bisector_deg, s.half_opening_deg, s.radius)
    }
}

impl From<Sector> for SectorDeg {
    fn from(s: Sector) -> Self {
        SectorDeg { bisector_deg: s.bisector.to_degrees(), half_opening_deg: s.half_opening.to_degrees(), radius: s.radius }
    }
}
