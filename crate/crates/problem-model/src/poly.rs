use serde::{Deserialize, Serialize};

use crate::{ModelError, Result, C64};

/// Highest ε-degree accepted in a coefficient polynomial.
pub const MAX_EPS_DEGREE: usize = 16;

/// A complex number in a JSON document: either a bare real or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<JsonComplex> for C64 {
    fn from(j: JsonComplex) -> C64 {
        match j {
            JsonComplex::Real(x) => C64::new(x, 0.0),
            JsonComplex::Pair([a, b]) => C64::new(a, b),
        }
    }
}

impl From<C64> for JsonComplex {
    fn from(c: C64) -> Self {
        if c.im == 0.0 {
            JsonComplex::Real(c.re)
        } else {
            JsonComplex::Pair([c.re, c.im])
        }
    }
}

/// Dense polynomial in ε, ascending powers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<JsonComplex>", into = "Vec<JsonComplex>")]
pub struct EpsPoly(Vec<C64>);

impl EpsPoly {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() > MAX_EPS_DEGREE + 1 {
            return Err(ModelError::Invalid(format!(
                "ε-polynomial of degree {} exceeds the cap {MAX_EPS_DEGREE}",
                coeffs.len() - 1
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(ModelError::Invalid("non-finite ε-coefficient".into()));
        }
        Ok(EpsPoly(coeffs))
    }

    pub fn constant(c: C64) -> Self {
        EpsPoly(vec![c])
    }

    pub fn real(c: f64) -> Self {
        EpsPoly(vec![C64::new(c, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn eval(&self, eps: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * eps + c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.norm() == 0.0)
    }

    pub fn scaled(&self, s: C64) -> EpsPoly {
        EpsPoly(self.0.iter().map(|c| c * s).collect())
    }
}

impl TryFrom<Vec<JsonComplex>> for EpsPoly {
    type Error = ModelError;

    fn try_from(v: Vec<JsonComplex>) -> Result<Self> {
        EpsPoly::new(v.into_iter().map(C64::from).collect())
    }
}

impl From<EpsPoly> for Vec<JsonComplex> {
    fn from(p: EpsPoly) -> Self {
        p.0.into_iter().map(JsonComplex::from).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let p: EpsPoly = serde_json::from_str("[1, [0, 2], -0.5]").unwrap();
        assert_eq!(p.coeffs()[1], C64::new(0.0, 2.0));
        let v = p.eval(C64::new(2.0, 0.0));
        assert_eq!(v, C64::new(-1.0, 4.0));
    }

    #[test]
    fn degree_cap() {
        assert!(EpsPoly::new(vec![C64::new(1.0, 0.0); 18]).is_err());
        assert!(EpsPoly::new(vec![C64::new(1.0, 0.0); 17]).is_ok());
    }
}
