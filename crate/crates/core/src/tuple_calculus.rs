//! Polynomial tuples and the componentwise derivative / integral operators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// An ordered tuple `(f_1, ..., f_n)` of polynomials, `n >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Polynomial>", into = "Vec<Polynomial>")]
pub struct PolyTuple {
    components: Vec<Polynomial>,
}

impl TryFrom<Vec<Polynomial>> for PolyTuple {
    type Error = Error;

    fn try_from(components: Vec<Polynomial>) -> Result<Self> {
        PolyTuple::new(components)
    }
}

impl From<PolyTuple> for Vec<Polynomial> {
    fn from(t: PolyTuple) -> Self {
        t.components
    }
}

impl PolyTuple {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::TupleTooShort(components.len()));
        }
        Ok(PolyTuple { components })
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Length-preserving componentwise map. The length invariant is inherited.
    pub(crate) fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyTuple {
        PolyTuple {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn sum(&self) -> Polynomial {
        self.components.iter().sum()
    }

    /// The derivative operator: differentiate every component.
    pub fn nabla(&self) -> PolyTuple {
        self.map(Polynomial::derivative)
    }

    /// Derivative of every component evaluated at the same point `a`.
    pub fn nabla_at(&self, a: f64) -> PointTuple {
        PointTuple::new(
            self.components
                .iter()
                .map(|f| f.derivative().eval(a))
                .collect(),
        )
    }

    /// The integral operator: antiderivative of every component, constants 0.
    pub fn delta(&self) -> PolyTuple {
        self.map(Polynomial::antiderivative)
    }

    /// Componentwise definite integrals, component `i` over `[from_i, to_i]`.
    pub fn delta_between(&self, from: &PointTuple, to: &PointTuple) -> Result<PointTuple> {
        for p in [from, to] {
            if p.len() != self.len() {
                return Err(Error::LengthMismatch {
                    expected: self.len(),
                    actual: p.len(),
                });
            }
        }
        Ok(PointTuple::new(
            self.components
                .iter()
                .zip(from.coords().iter().zip(to.coords()))
                .map(|(f, (&a, &b))| f.definite_integral(a, b))
                .collect(),
        ))
    }

    /// Splits a degree-`n` polynomial into `(c_n x^n, ..., c_2 x^2, c_1 x + c_0)`.
    ///
    /// Zero coefficients produce zero components in place, so the length is
    /// always the degree.
    pub fn tuple_repr(f: &Polynomial) -> Result<PolyTuple> {
        let n = f.degree();
        if f.is_zero() || n < 2 {
            return Err(Error::DegreeTooLow { degree: n, min: 2 });
        }
        let c = f.coeffs();
        let mut components: Vec<Polynomial> =
            (2..=n).rev().map(|k| Polynomial::monomial(c[k], k)).collect();
        components.push(Polynomial::new(vec![c[0], c[1]]));
        PolyTuple::new(components)
    }
}

/// Semicolon-separated polynomials, e.g. `"0,0,0,1; 0,0,1; 1,-1"`.
impl FromStr for PolyTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let components = s
            .split(';')
            .map(str::parse)
            .collect::<Result<Vec<Polynomial>>>()?;
        PolyTuple::new(components)
    }
}

impl fmt::Display for PolyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A real n-tuple with its Euclidean norm cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct PointTuple {
    coords: Vec<f64>,
    norm: f64,
}

impl From<Vec<f64>> for PointTuple {
    fn from(coords: Vec<f64>) -> Self {
        PointTuple::new(coords)
    }
}

impl From<PointTuple> for Vec<f64> {
    fn from(p: PointTuple) -> Self {
        p.coords
    }
}

impl PointTuple {
    pub fn new(coords: Vec<f64>) -> Self {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        PointTuple { coords, norm }
    }

    /// The all-ones tuple of length `n`.
    pub fn ones(n: usize) -> Self {
        PointTuple::new(vec![1.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dot(&self, other: &PointTuple) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Dot product with the all-ones tuple.
    pub fn sum(&self) -> f64 {
        self.coords.iter().sum()
    }

    pub fn distance(&self, other: &PointTuple) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// `"0.5,0.57,0"` style coordinates.
impl FromStr for PointTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                match tok.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::Parse(format!("bad coordinate {tok:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PointTuple::new(coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> PolyTuple {
        s.parse().unwrap()
    }

    fn pt(v: &[f64]) -> PointTuple {
        PointTuple::new(v.to_vec())
    }

    const S3: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)

    #[test]
    fn nabla_examples() {
        assert_eq!(t("0,0,0,1; 0,0,1; 1,-1").nabla(), t("0,0,3; 0,2; -1"));
        let z = t("5; 7").nabla();
        assert!(z.components().iter().all(Polynomial::is_zero));
        let s = t("1,1; 0,0,1");
        assert_eq!(s.delta().nabla(), s);
    }

    #[test]
    fn nabla_at_examples() {
        let s = t("0,0,0,1; 0,0,1; 1,-1");
        assert_eq!(s.nabla_at(1.0).coords(), &[3.0, 2.0, -1.0]);
        assert_eq!(s.nabla_at(0.0).coords(), &[0.0, 0.0, -1.0]);
        assert_eq!(t("4; 4").nabla_at(-3.5).coords(), &[0.0, 0.0]);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(t("0,0,3; 0,2").delta(), t("0,0,0,1; 0,0,1"));
        let z = t("0; 0").delta();
        assert!(z.components().iter().all(Polynomial::is_zero));
        assert_eq!(t("-1,2; -1").delta(), t("0,-1,1; 0,-1"));
    }

    #[test]
    fn delta_between_cubic_example() {
        let s = t("0,0,0,1; 0,0,1; 1,-1");
        let a = pt(&[0.5, S3, 0.0]);
        let b = pt(&[0.5, -S3, -2.0 / 3.0]);
        let d = s.delta_between(&a, &b).unwrap();
        let want = [0.0, -2.0 * 3f64.sqrt() / 27.0, -8.0 / 9.0];
        for (x, w) in d.coords().iter().zip(want) {
            assert!((x - w).abs() < 1e-15, "{x} vs {w}");
        }
    }

    #[test]
    fn delta_between_equal_points_is_zero() {
        let s = t("3,1; 0,0,2; 1");
        let a = pt(&[0.3, -1.0, 2.0]);
        assert!(s.delta_between(&a, &a).unwrap().coords().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn delta_between_squares() {
        let s = t("0,0,1; 0,0,1");
        let d = s
            .delta_between(&pt(&[-S3, -S3]), &pt(&[S3, S3]))
            .unwrap();
        for x in d.coords() {
            assert!((x - 0.128_300_059_819_916_85).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_between_length_mismatch() {
        let s = t("1; 1");
        let err = s.delta_between(&pt(&[0.0]), &pt(&[1.0, 1.0])).unwrap_err();
        assert_eq!(err.code(), "LengthMismatch");
    }

    #[test]
    fn tuple_repr_examples() {
        let f: Polynomial = "1,-1,1,1".parse().unwrap();
        assert_eq!(PolyTuple::tuple_repr(&f).unwrap(), t("0,0,0,1; 0,0,1; 1,-1"));

        let f: Polynomial = "0,0,1".parse().unwrap();
        let r = PolyTuple::tuple_repr(&f).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.components()[1].is_zero());

        let f: Polynomial = "0,1,0,0,2".parse().unwrap();
        let r = PolyTuple::tuple_repr(&f).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.components()[0], "0,0,0,0,2".parse().unwrap());
        assert!(r.components()[1].is_zero() && r.components()[2].is_zero());
        assert_eq!(r.components()[3], "0,1".parse().unwrap());
    }

    #[test]
    fn tuple_repr_degree_too_low() {
        let f: Polynomial = "1,2".parse().unwrap();
        assert_eq!(
            PolyTuple::tuple_repr(&f).unwrap_err(),
            Error::DegreeTooLow { degree: 1, min: 2 }
        );
    }

    #[test]
    fn short_tuple_rejected() {
        assert!("1,2".parse::<PolyTuple>().is_err());
    }

    #[test]
    fn point_norm_cached() {
        let p = pt(&[3.0, 4.0]);
        assert_eq!(p.norm(), 5.0);
        assert_eq!(p.sum(), 7.0);
    }
}
