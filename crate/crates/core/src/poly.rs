//! Dense univariate polynomials over `f64`.
//!
//! Coefficients are stored in ascending order (`coeffs[i]` multiplies `x^i`).
//! Real roots are isolated with a Sturm chain of the squarefree part on a
//! Cauchy bound interval, refined by Sturm-count bisection and then polished
//! to full precision. Even-multiplicity roots, which do not change sign, are
//! found as reliably as simple ones; multiplicities come from `gcd(p, p')`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Leading coefficients below this magnitude are dropped on canonicalization.
pub const LEADING_ZERO_THRESHOLD: f64 = 1e-14;

/// Default relative bracket width for root refinement.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Relative size under which a Sturm remainder's leading term counts as zero.
const REMAINDER_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

/// A distinct real root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Sup,
    Inf,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming negligible
    /// leading terms. Interior coefficients are kept as given.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| c.abs() < LEADING_ZERO_THRESHOLD)
        {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0 (check [`Self::is_zero`]).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    /// Antiderivative with zero integration constant.
    pub fn antiderivative(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Polynomial::new(coeffs)
    }

    /// Signed integral over `[a, b]`; `a > b` flips the sign.
    pub fn definite_integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Distinct real roots in ascending order, refined to the default
    /// relative tolerance.
    pub fn real_roots(&self) -> Result<Vec<Root>> {
        self.real_roots_with_tol(DEFAULT_ROOT_TOL)
    }

    pub fn real_roots_with_tol(&self, tol: f64) -> Result<Vec<Root>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Ok(Vec::new());
        }
        let chain = SturmChain::new(self);
        // The chain's last member is gcd(p, p'); its roots are exactly the
        // repeated roots of p, one multiplicity lower and better conditioned.
        let gcd = chain.gcd();
        let (repeated, chain) = if gcd.degree() >= 1 {
            // Isolate on the squarefree part: at a repeated root every member
            // of the full chain vanishes and sign counts break down.
            let squarefree = self.quotient(gcd);
            (gcd.real_roots_with_tol(tol)?, SturmChain::new(&squarefree))
        } else {
            (Vec::new(), chain)
        };
        let bound = self.cauchy_bound();
        let mut values = Vec::new();
        let total = chain.count(-bound, bound);
        chain.isolate(-bound, bound, total, tol, &mut values);

        let roots = values
            .into_iter()
            .map(|value| {
                let nearest = repeated
                    .iter()
                    .filter(|r| (r.value - value).abs() <= 1e-6 * (1.0 + value.abs()))
                    .min_by(|a, b| {
                        (a.value - value)
                            .abs()
                            .total_cmp(&(b.value - value).abs())
                    });
                match nearest {
                    Some(r) => Root {
                        value: r.value,
                        multiplicity: r.multiplicity + 1,
                    },
                    None => Root {
                        value,
                        multiplicity: 1,
                    },
                }
            })
            .collect();
        Ok(roots)
    }

    /// Supremum or infimum of `|p|` on the closed interval spanned by `a` and `b`.
    pub fn extremum_abs(&self, a: f64, b: f64, mode: Extremum) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut xs = vec![lo];
        let d = self.derivative();
        if d.degree() >= 1 {
            if let Ok(crit) = d.real_roots() {
                xs.extend(crit.iter().map(|r| r.value).filter(|&x| x > lo && x < hi));
            }
        }
        xs.push(hi);
        let values: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        match mode {
            Extremum::Sup => values.iter().fold(0.0, |m, v| m.max(v.abs())),
            Extremum::Inf => {
                // p is monotone between consecutive critical points, so a root
                // inside shows up as a sign change or an exact zero.
                let crosses = values.contains(&0.0)
                    || values.windows(2).any(|w| w[0].signum() != w[1].signum());
                if crosses {
                    0.0
                } else {
                    values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
                }
            }
        }
    }

    /// Every real root lies strictly inside `(-B, B)`.
    fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let n = self.degree();
        let max_ratio = self.coeffs[..n]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs() / lead));
        1.0 + max_ratio
    }

    fn normalized(&self) -> Polynomial {
        let lead = self.leading().abs();
        if lead == 0.0 {
            return self.clone();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    /// Quotient of `self / divisor`, remainder discarded.
    fn quotient(&self, divisor: &Polynomial) -> Polynomial {
        let db = divisor.degree();
        let lead = divisor.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![0.0; r.len().saturating_sub(db)];
        while r.len() > db {
            let c = r[r.len() - 1] / lead;
            let shift = r.len() - 1 - db;
            q[shift] = c;
            for (i, &d) in divisor.coeffs.iter().enumerate().take(db) {
                r[shift + i] -= c * d;
            }
            r.pop();
        }
        Polynomial::new(q)
    }

    /// Remainder of `self / divisor`, with numerically cancelled leading
    /// terms removed.
    fn remainder(&self, divisor: &Polynomial) -> Polynomial {
        let db = divisor.degree();
        let lead = divisor.leading();
        let scale = self.max_abs_coeff().max(divisor.max_abs_coeff());
        let mut r = self.coeffs.clone();
        while r.len() > db {
            let q = r[r.len() - 1] / lead;
            let shift = r.len() - 1 - db;
            for (i, &c) in divisor.coeffs.iter().enumerate().take(db) {
                r[shift + i] -= q * c;
            }
            r.pop();
        }
        while r.last().is_some_and(|c| c.abs() <= REMAINDER_ZERO_TOL * scale) {
            r.pop();
        }
        Polynomial { coeffs: r }
    }
}

struct SturmChain {
    seq: Vec<Polynomial>,
}

impl SturmChain {
    fn new(p: &Polynomial) -> Self {
        let mut seq = vec![p.normalized()];
        let d = p.derivative();
        if !d.is_zero() {
            seq.push(d.normalized());
        }
        while seq.len() >= 2 {
            let n = seq.len();
            if seq[n - 1].degree() == 0 {
                break;
            }
            let r = seq[n - 2].remainder(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push((-r).normalized());
        }
        SturmChain { seq }
    }

    fn gcd(&self) -> &Polynomial {
        self.seq.last().expect("chain is never empty")
    }

    fn sign_changes(&self, x: f64) -> usize {
        let mut changes = 0;
        let mut last = 0.0_f64;
        for q in &self.seq {
            let v = q.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                changes += 1;
            }
            last = v;
        }
        changes
    }

    /// Number of distinct roots in `(a, b]`.
    fn count(&self, a: f64, b: f64) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }

    fn isolate(&self, a: f64, b: f64, count: usize, tol: f64, out: &mut Vec<f64>) {
        if count == 0 {
            return;
        }
        if count == 1 {
            out.push(self.refine(a, b, tol));
            return;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Cluster narrower than f64 resolution: collapse to one root.
            out.push(b);
            return;
        }
        let left = self.count(a, mid);
        self.isolate(a, mid, left, tol, out);
        self.isolate(mid, b, count.saturating_sub(left), tol, out);
    }

    /// Shrinks `(a, b]`, known to hold exactly one distinct root.
    fn refine(&self, mut a: f64, mut b: f64, tol: f64) -> f64 {
        let p = &self.seq[0];
        loop {
            if p.eval(b) == 0.0 {
                return b;
            }
            if b - a <= tol * a.abs().max(b.abs()) {
                break;
            }
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.count(a, mid) >= 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        // Polish by plain sign bisection down to f64 resolution. The bracket
        // holds a single simple root of the squarefree chain head, so a sign
        // change is present unless rounding hides it.
        let (mut fa, fb) = (p.eval(a), p.eval(b));
        if fa.signum() != fb.signum() && fa != 0.0 {
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = p.eval(mid);
                if fm == 0.0 {
                    return mid;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
        }
        let mid = 0.5 * (a + b);
        [mid, a, b]
            .into_iter()
            .min_by(|x, y| p.eval(*x).abs().total_cmp(&p.eval(*y).abs()))
            .expect("three candidates")
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0) + rhs.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Polynomial::new(coeffs)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs.clone())
    }
}

impl<'a> std::iter::Sum<&'a Polynomial> for Polynomial {
    fn sum<I: Iterator<Item = &'a Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |acc, p| &acc + p)
    }
}

/// Ascending comma-separated coefficients, e.g. `"1,-1,1,1"` is `x^3 + x^2 - x + 1`.
impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let coeffs = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                match tok.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::Parse(format!("bad coefficient {tok:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            }
            first = false;
            if mag != 1.0 || i == 0 {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_cubic() {
        let f = p("1,-1,1,1");
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(2.0), 11.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("0,0,0,1").derivative(), p("0,0,3"));
        assert!(Polynomial::constant(5.0).derivative().is_zero());
        assert_eq!(p("1,-1,1,1").derivative(), p("-1,2,3"));
        assert!(Polynomial::zero().derivative().is_zero());
    }

    #[test]
    fn antiderivative_examples() {
        assert!(Polynomial::zero().antiderivative().is_zero());
        assert_eq!(p("0,0,3").antiderivative(), p("0,0,0,1"));
        assert_eq!(p("-1,2").antiderivative(), p("0,-1,1"));
    }

    #[test]
    fn definite_integral_examples() {
        let s = 1.0 / 3f64.sqrt();
        let v = p("0,0,1").definite_integral(-s, s);
        assert!(close(v, 2.0 * 3f64.sqrt() / 27.0, 1e-15));
        assert_eq!(p("3,1,4").definite_integral(0.7, 0.7), 0.0);
        let v = p("1,-1").definite_integral(0.0, -2.0 / 3.0);
        assert!(close(v, -8.0 / 9.0, 1e-15));
    }

    #[test]
    fn integral_is_antisymmetric() {
        let f = p("0.3,-2,0,1.5");
        let a = f.definite_integral(-1.2, 2.5);
        assert_eq!(a, -f.definite_integral(2.5, -1.2));
    }

    #[test]
    fn roots_linear_and_quadratic() {
        let r = p("-1,2").real_roots().unwrap();
        assert_eq!(r.len(), 1);
        assert!(close(r[0].value, 0.5, 1e-12));

        let r = p("-1,0,3").real_roots().unwrap();
        assert_eq!(r.len(), 2);
        let s = 1.0 / 3f64.sqrt();
        assert!(close(r[0].value, -s, 1e-12));
        assert!(close(r[1].value, s, 1e-12));

        assert!(p("1,0,3").real_roots().unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_roots_error() {
        assert_eq!(Polynomial::zero().real_roots(), Err(Error::ZeroPolynomial));
        assert_eq!(p("0,0").real_roots(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(p("4").real_roots().unwrap().is_empty());
    }

    #[test]
    fn repeated_roots_collapse_with_multiplicity() {
        // x^2 (x - 1)^3 = -x^2 + 3x^3 - 3x^4 + x^5
        let f = p("0,0,-1,3,-3,1");
        let r = f.real_roots().unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 2);
        assert!(close(r[0].value, 0.0, 1e-9));
        assert_eq!(r[1].multiplicity, 3);
        assert!(close(r[1].value, 1.0, 1e-9));
    }

    #[test]
    fn roots_of_factored_product() {
        // (x+3)(x+1)(x-2)(x-5) = x^4 - 3x^3 - 15x^2 + 19x + 30
        let f = p("30,19,-15,-3,1");
        let r: Vec<f64> = f.real_roots().unwrap().iter().map(|r| r.value).collect();
        let want = [-3.0, -1.0, 2.0, 5.0];
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip(want) {
            assert!(close(*a, b, 1e-10), "{a} vs {b}");
        }
    }

    #[test]
    fn extremum_examples() {
        let v = p("1,-1").extremum_abs(0.0, -2.0 / 3.0, Extremum::Sup);
        assert!(close(v, 5.0 / 3.0, 1e-15));
        let s = 1.0 / 3f64.sqrt();
        assert_eq!(p("0,0,1").extremum_abs(-s, s, Extremum::Inf), 0.0);
        assert_eq!(p("0,0,0,1").extremum_abs(0.5, 0.5, Extremum::Sup), 0.125);
    }

    #[test]
    fn extremum_uses_interior_critical_points() {
        // 1 - x^2 on [-2, 0.5]: sup |.| = 3 at -2, interior max 1 at 0; inf 0 at -1
        let f = p("1,0,-1");
        assert_eq!(f.extremum_abs(-2.0, 0.5, Extremum::Sup), 3.0);
        assert_eq!(f.extremum_abs(-2.0, 0.5, Extremum::Inf), 0.0);
        // 2 + x^2 on [-1, 1]: inf 2 at interior critical point 0
        assert_eq!(p("2,0,1").extremum_abs(-1.0, 1.0, Extremum::Inf), 2.0);
    }

    #[test]
    fn add_and_scale() {
        assert!((&p("0,0,1") + &p("0,0,-1")).is_zero());
        assert_eq!(p("1,1").scale(2.0), p("2,2"));
        assert_eq!(&p("0,0,3") + &p("0,2"), p("0,2,3"));
    }

    #[test]
    fn canonicalization_trims_leading_only() {
        let q = Polynomial::new(vec![0.0, 1.0, 0.0, 1e-16]);
        assert_eq!(q.coeffs(), &[0.0, 1.0]);
        let q = Polynomial::new(vec![1e-16, 0.0, 2.0]);
        assert_eq!(q.coeffs(), &[1e-16, 0.0, 2.0]);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("1,-1,1,1").to_string(), "x^3 + x^2 - x + 1");
        assert_eq!(p("-1,0,3").to_string(), "3x^2 - 1");
        assert_eq!(p("0").to_string(), "0");
        assert!("1,,2".parse::<Polynomial>().is_err());
        assert!("".parse::<Polynomial>().is_err());
        assert!("1,nan".parse::<Polynomial>().is_err());
    }
}
