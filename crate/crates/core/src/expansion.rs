//! The expansion operator, boundary-point enumeration and the boundary integral.
//!
//! One expansion step differentiates every component of a tuple and then
//! replaces component `i` by the sum of all the other derivatives (the hollow
//! all-ones matrix acting on the derivative stack). The boundary of the
//! `m`-th expansion is the Cartesian product of the distinct real roots of the
//! components of `E^m(S)`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, DEFAULT_ROOT_TOL};
use crate::tuple_calculus::{PointTuple, PolyTuple};

/// Norms closer than this (relative to `max(1, norm)`) are treated as ties.
pub const NORM_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    pub max_boundary_size: usize,
    pub root_tol: f64,
    pub eval_tol: f64,
    pub include_tied_pairs: bool,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            max_boundary_size: 10_000,
            root_tol: DEFAULT_ROOT_TOL,
            eval_tol: 1e-9,
            include_tied_pairs: true,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_boundary_size == 0 {
            return Err(Error::InvalidArgument("max_boundary_size must be >= 1".into()));
        }
        if !(self.root_tol > 0.0 && self.eval_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One expansion step.
pub fn expand(s: &PolyTuple) -> PolyTuple {
    let derivs = s.nabla();
    let d = derivs.components();
    let components = (0..d.len())
        .map(|i| {
            d.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p)
                .sum()
        })
        .collect();
    PolyTuple::new(components).expect("expansion preserves length")
}

/// `m`-fold expansion; `m = 0` is the identity.
pub fn expand_iter(s: &PolyTuple, m: usize) -> PolyTuple {
    (0..m).fold(s.clone(), |acc, _| expand(&acc))
}

pub(crate) fn norms_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= NORM_TIE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn lex_cmp(a: &PointTuple, b: &PointTuple) -> Ordering {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Orders by norm, clustering norms within [`NORM_TIE_TOL`] and ordering each
/// cluster lexicographically. Deterministic and total.
fn sort_points(points: &mut [PointTuple]) {
    points.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then_with(|| lex_cmp(a, b)));
    let mut start = 0;
    for i in 1..=points.len() {
        if i == points.len() || !norms_tied(points[i - 1].norm(), points[i].norm()) {
            points[start..i].sort_by(lex_cmp);
            start = i;
        }
    }
}

/// The norm-sorted boundary of the `phase`-th expansion of `source`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    pub points: Vec<PointTuple>,
    pub source: PolyTuple,
    pub expanded: PolyTuple,
    pub phase: usize,
    /// Distinct real roots per component of the expansion.
    pub root_counts: Vec<usize>,
}

impl BoundarySet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(PointTuple::norm).collect()
    }

    /// Distances between consecutive sorted points.
    pub fn consecutive_gaps(&self) -> Result<Vec<f64>> {
        if self.points.len() < 2 {
            return Err(Error::InsufficientPoints(self.points.len()));
        }
        Ok(self
            .points
            .windows(2)
            .map(|w| w[0].distance(&w[1]))
            .collect())
    }

    /// Largest `|E^m(S)_i(a_i)| / (1 + max|coeffs of E^m(S)_i|)` over all points.
    pub fn max_scaled_residual(&self) -> f64 {
        let comps = self.expanded.components();
        self.points
            .iter()
            .flat_map(|p| {
                p.coords()
                    .iter()
                    .zip(comps)
                    .map(|(&a, g)| g.eval(a).abs() / (1.0 + g.max_abs_coeff()))
            })
            .fold(0.0, f64::max)
    }
}

/// Enumerates the boundary of `E^m(s)`.
///
/// A component without real roots yields an empty set, not an error.
pub fn boundary(s: &PolyTuple, m: usize, cfg: &ExpansionConfig) -> Result<BoundarySet> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::InvalidPhase);
    }
    let expanded = expand_iter(s, m);
    if let Some(index) = expanded.components().iter().position(Polynomial::is_zero) {
        return Err(Error::DegenerateComponent { index });
    }
    let roots: Vec<Vec<f64>> = expanded
        .components()
        .iter()
        .map(|g| {
            g.real_roots_with_tol(cfg.root_tol)
                .map(|rs| rs.into_iter().map(|r| r.value).collect())
        })
        .collect::<Result<_>>()?;
    let root_counts: Vec<usize> = roots.iter().map(Vec::len).collect();
    let size = root_counts.iter().map(|&c| c as u128).product::<u128>();
    if size > cfg.max_boundary_size as u128 {
        return Err(Error::BoundaryTooLarge {
            size,
            limit: cfg.max_boundary_size,
        });
    }

    let mut points = Vec::with_capacity(size as usize);
    if size > 0 {
        let mut idx = vec![0usize; roots.len()];
        loop {
            points.push(PointTuple::new(
                idx.iter().zip(&roots).map(|(&i, r)| r[i]).collect(),
            ));
            // odometer increment, last coordinate fastest
            let mut k = roots.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < roots[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    sort_points(&mut points);

    Ok(BoundarySet {
        points,
        source: s.clone(),
        expanded,
        phase: m,
        root_counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairIntegral {
    /// Index of the first point of the pair in the sorted boundary.
    pub index: usize,
    /// `sum_j int_{a_j}^{b_j} g_j`, the Δ-vector dotted with the all-ones tuple.
    pub value: f64,
    pub tied: bool,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryIntegral {
    pub total: f64,
    pub pairs: Vec<PairIntegral>,
    pub tuple: PolyTuple,
    pub boundary: BoundarySet,
}

impl BoundaryIntegral {
    pub fn abs(&self) -> f64 {
        self.total.abs()
    }
}

/// Tuple representation of `f` plus its phase-`m` boundary, checking `m < deg f`.
pub fn tuple_and_boundary(
    f: &Polynomial,
    m: usize,
    cfg: &ExpansionConfig,
) -> Result<(PolyTuple, BoundarySet)> {
    let tuple = PolyTuple::tuple_repr(f)?;
    if m >= f.degree() {
        return Err(Error::PhaseTooHigh {
            phase: m,
            degree: f.degree(),
        });
    }
    let b = boundary(&tuple, m, cfg)?;
    Ok((tuple, b))
}

/// Per-pair integrals over consecutive points and their total. Pairs whose
/// norms tie are summed only when `include_tied_pairs` is set.
pub fn integrate_pairs(
    tuple: &PolyTuple,
    points: &[PointTuple],
    include_tied_pairs: bool,
) -> Result<(f64, Vec<PairIntegral>)> {
    if let Some(p) = points.iter().find(|p| p.len() != tuple.len()) {
        return Err(Error::LengthMismatch {
            expected: tuple.len(),
            actual: p.len(),
        });
    }
    let pairs: Vec<PairIntegral> = points
        .par_windows(2)
        .enumerate()
        .map(|(index, w)| {
            let tied = norms_tied(w[0].norm(), w[1].norm());
            let value = tuple
                .delta_between(&w[0], &w[1])
                .expect("lengths checked above")
                .sum();
            PairIntegral {
                index,
                value,
                tied,
                skipped: tied && !include_tied_pairs,
            }
        })
        .collect();
    // sequential reduction in pair order keeps the total bitwise reproducible
    let total = pairs
        .iter()
        .filter(|p| !p.skipped)
        .map(|p| p.value)
        .sum();
    Ok((total, pairs))
}

/// Integral of `f` along the boundary of its `m`-th expansion: the sum over
/// consecutive norm-sorted boundary pairs of the componentwise definite
/// integrals of the tuple representation, each dotted with `(1, ..., 1)`.
pub fn boundary_integral(f: &Polynomial, m: usize, cfg: &ExpansionConfig) -> Result<BoundaryIntegral> {
    let (tuple, boundary) = tuple_and_boundary(f, m, cfg)?;
    if boundary.len() < 2 {
        return Err(Error::InsufficientPoints(boundary.len()));
    }
    let (total, pairs) = integrate_pairs(&tuple, &boundary.points, cfg.include_tied_pairs)?;
    Ok(BoundaryIntegral {
        total,
        pairs,
        tuple,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub poly: Polynomial,
    /// 1-based index of the successful trial.
    pub trials: usize,
    pub boundary_size: usize,
}

/// Seeded random search for a polynomial whose phase-`m` boundary has exactly
/// `k` points. Degrees range over `m+1 ..= m+6`, integer coefficients over
/// `[-9, 9]`. Returns `None` once `budget` trials are spent.
pub fn find_poly_with_boundary_size(
    k: usize,
    m: usize,
    budget: usize,
    seed: u64,
    cfg: &ExpansionConfig,
) -> Option<Construction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 1..=budget {
        let degree = rng.random_range(m + 1..=m + 6).max(2);
        let f = random_integer_poly(&mut rng, degree);
        if let Ok((_, b)) = tuple_and_boundary(&f, m, cfg) {
            if b.len() == k {
                return Some(Construction {
                    poly: f,
                    trials: trial,
                    boundary_size: k,
                });
            }
        }
    }
    None
}

/// Integer coefficients in `[-9, 9]` with a nonzero leading coefficient.
pub(crate) fn random_integer_poly<R: Rng>(rng: &mut R, degree: usize) -> Polynomial {
    let mut coeffs: Vec<f64> = (0..degree).map(|_| rng.random_range(-9..=9) as f64).collect();
    let mut lead = 0;
    while lead == 0 {
        lead = rng.random_range(-9..=9);
    }
    coeffs.push(lead as f64);
    Polynomial::new(coeffs)
}
