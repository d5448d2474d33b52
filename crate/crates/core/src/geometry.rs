//! Rotations of a boundary (as permutations of its points), their powers,
//! stability under rotation, and spherical defoliation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::BoundarySet;
use crate::tuple_calculus::PointTuple;

/// Default tolerance for "norm approximately preserved".
pub const DEFAULT_STABILITY_EPS: f64 = 1e-6;

/// A permutation of boundary indices; point `i` maps to point `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Rotation {
    perm: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Rotation {
    type Error = Error;

    fn try_from(perm: Vec<usize>) -> Result<Self> {
        Rotation::new(perm)
    }
}

impl From<Rotation> for Vec<usize> {
    fn from(r: Rotation) -> Self {
        r.perm
    }
}

impl Rotation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            if i >= perm.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("{perm:?}")));
            }
        }
        Ok(Rotation { perm })
    }

    pub fn identity(n: usize) -> Self {
        Rotation {
            perm: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        if i >= n || j >= n {
            return Err(Error::InvalidPermutation(format!("swap({i},{j}) on {n}")));
        }
        perm.swap(i, j);
        Ok(Rotation { perm })
    }

    /// `i -> i + 1 (mod n)`.
    pub fn cycle(n: usize) -> Self {
        Rotation {
            perm: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self` after `first`: index `i` goes to `self[first[i]]`.
    pub fn compose(&self, first: &Rotation) -> Rotation {
        Rotation {
            perm: first.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    /// `s`-fold composition; `s = 0` gives the identity.
    pub fn pow(&self, s: usize) -> Rotation {
        (0..s).fold(Rotation::identity(self.len()), |acc, _| self.compose(&acc))
    }

    /// Relabels points: output slot `i` holds `points[perm[i]]`.
    pub fn apply(&self, points: &[PointTuple]) -> Result<Vec<PointTuple>> {
        if points.len() != self.len() {
            return Err(Error::SizeMismatch {
                rotation: self.len(),
                boundary: points.len(),
            });
        }
        Ok(self.perm.iter().map(|&i| points[i].clone()).collect())
    }
}

pub fn apply_rotation(r: &Rotation, b: &BoundarySet) -> Result<Vec<PointTuple>> {
    r.apply(&b.points)
}

pub fn rotation_pow(r: &Rotation, s: usize) -> Rotation {
    r.pow(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub stable: bool,
    pub max_deviation: f64,
    pub epsilon: f64,
}

/// Stable iff every point keeps its norm within `eps` under `r`.
pub fn is_stable(r: &Rotation, points: &[PointTuple], eps: f64) -> Result<StabilityCheck> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("stability tolerance must be positive".into()));
    }
    let moved = r.apply(points)?;
    let max_deviation = moved
        .iter()
        .zip(points)
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max);
    Ok(StabilityCheck {
        stable: max_deviation <= eps,
        max_deviation,
        epsilon: eps,
    })
}

/// Projects a nonzero point onto the unit sphere of its own dimension.
pub fn defoliate(p: &PointTuple) -> Result<PointTuple> {
    let n = p.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(PointTuple::new(p.coords().iter().map(|c| c / n).collect()))
}
