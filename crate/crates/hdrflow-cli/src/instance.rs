//! Instance files: a field, a marked line, a component (N, d) and optionally
//! the coefficients of a Higgs field on it.

use hdrflow::algebra::{Field, FieldElem, Mat, Poly, RatFunc};
use hdrflow::cartier::Route;
use hdrflow::connections::HiggsField;
use hdrflow::flow::{ModuliPoint, TwistMode};
use hdrflow::parabolic::{MarkedLine, ParBundle, Point};
use hdrflow::{Error, Result};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

fn one() -> u32 {
    1
}

fn default_twist() -> TwistMode {
    TwistMode::Twisted
}

fn default_route() -> Route {
    Route::Direct
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub p: u32,
    #[serde(default = "one")]
    pub s: u32,
    #[serde(default)]
    pub seed: u64,
    /// Monic modulus, constant term first; chosen from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    #[serde(rename = "N")]
    pub n: u32,
    pub d: u32,
    /// Shorthand for the points inf, 0, 1, lambda.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    /// Marked points; the first one carries the weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    /// Coefficients of P, constant term first, in the normalized coordinate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<String>,
    #[serde(default = "default_twist")]
    pub twist_mode: TwistMode,
    #[serde(default)]
    pub verify: bool,
    #[serde(default = "default_route")]
    pub route: Route,
}

impl InstanceSpec {
    pub fn field(&self) -> Result<Field> {
        match &self.modulus {
            Some(m) => Field::with_modulus(self.p, m.clone()),
            None if self.s == 1 => Field::prime(self.p),
            None => Field::new(self.p, self.s, self.seed),
        }
    }

    pub fn line(&self, k: &Field) -> Result<MarkedLine> {
        let line = match (&self.lambda, &self.points) {
            (Some(l), None) => MarkedLine::legendre(k, k.parse(l)?, self.n)?,
            (None, Some(pts)) => {
                let pts = pts.iter().map(|s| Point::parse(k, s)).collect::<Result<Vec<_>>>()?;
                MarkedLine::new(k, pts, self.n, 0)?
            }
            _ => return Err(Error::Parse("give exactly one of `lambda` and `points`".into())),
        };
        Ok(line.normalized())
    }

    pub fn theta_coeffs(&self, k: &Field) -> Result<Vec<FieldElem>> {
        self.theta.iter().map(|c| k.parse(c)).collect()
    }

    pub fn moduli_point(&self, k: &Field) -> Result<ModuliPoint> {
        let line = self.line(k)?;
        ModuliPoint::new(&line, self.d, self.theta_coeffs(k)?)
    }

    /// theta = P dx / prod (x - a) on O(d/N) + O(-d/N), without the moduli
    /// constraints; integral d/N gives a trivial parabolic structure.
    pub fn higgs(&self, k: &Field) -> Result<HiggsField> {
        let line = self.line(k)?;
        let p = Poly::new(k, self.theta_coeffs(k)?);
        let mut theta = Mat::zero(k, 2);
        theta[(1, 0)] = RatFunc::new(p, line.finite_divisor_poly())?;
        let lambda = Rational64::new(self.d as i64, self.n as i64);
        HiggsField::new(&line, ParBundle::component(lambda), theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let src = r#"{"p":11,"N":5,"d":1,"lambda":"4","theta":["3","1"]}"#;
        let spec: InstanceSpec = serde_json::from_str(src).unwrap();
        let back: InstanceSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, back);
        let k = spec.field().unwrap();
        let pt = spec.moduli_point(&k).unwrap();
        assert_eq!(pt.p1_coordinate(), Some(Point::Finite(k.from_i64(8))));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<InstanceSpec>(r#"{"p":7,"N":2,"d":1,"lamda":"3"}"#).is_err());
    }
}
