//! Certificates for the boundary-integral inequality chains.
//!
//! Forward direction: by the triangle inequality,
//! `|I| <= sqrt(n) * sum ||Δ_pair|| <= (#B - 1) * sqrt(n) * M * max_gap`,
//! where `I` is the boundary integral and `M` bounds every integrand on its
//! interval. Reverse direction, per pair: `||Δ_pair|| >= R_pair * gap_pair`
//! with `R_pair` the smallest infimum of `|g_j|` on the pair's intervals.
//!
//! Everything that follows from those two chains is checked; the stronger
//! statements (closest-pair lower bound, stability of small boundaries) are
//! measured and reported only.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{
    integrate_pairs, random_integer_poly, tuple_and_boundary, ExpansionConfig,
};
use crate::geometry::{is_stable, Rotation};
use crate::poly::{Extremum, Polynomial};
use crate::tuple_calculus::{PointTuple, PolyTuple};

/// Relative allowance for last-bit rounding when comparing the two sides of
/// an inequality that can hold with equality.
pub const ROUNDING_SLACK: f64 = 1e-12;

fn le_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + ROUNDING_SLACK * rhs.abs().max(lhs.abs()) + f64::MIN_POSITIVE
}

/// Both per-pair bounds for the integrals of `tuple` between two points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub index: usize,
    pub gap: f64,
    pub delta_norm: f64,
    /// `sum_j int g_j`, the Δ-vector dotted with `(1, ..., 1)`.
    pub dot: f64,
    pub m_pair: f64,
    pub r_pair: f64,
    /// Cosine of the angle between Δ and the all-ones vector; `None` when Δ = 0.
    pub cos_alpha: Option<f64>,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub skipped: bool,
}

/// `R * gap <= ||Δ|| <= M * sqrt(n) * gap` for one pair of points.
pub fn pair_bound(tuple: &PolyTuple, from: &PointTuple, to: &PointTuple) -> Result<PairBound> {
    let delta = tuple.delta_between(from, to)?;
    let n = tuple.len() as f64;
    let (mut m_pair, mut r_pair) = (0.0_f64, f64::INFINITY);
    for ((g, &a), &b) in tuple.components().iter().zip(from.coords()).zip(to.coords()) {
        m_pair = m_pair.max(g.extremum_abs(a, b, Extremum::Sup));
        r_pair = r_pair.min(g.extremum_abs(a, b, Extremum::Inf));
    }
    let gap = from.distance(to);
    let delta_norm = delta.norm();
    let dot = delta.sum();
    let cos_alpha = (delta_norm > 0.0).then(|| (dot / (delta_norm * n.sqrt())).clamp(-1.0, 1.0));
    Ok(PairBound {
        index: 0,
        gap,
        delta_norm,
        dot,
        m_pair,
        r_pair,
        cos_alpha,
        lower_holds: le_with_slack(r_pair * gap, delta_norm),
        upper_holds: le_with_slack(delta_norm, m_pair * n.sqrt() * gap),
        skipped: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub integral: f64,
    pub integral_abs: f64,
    pub boundary_count: usize,
    pub tuple_dim: usize,
    pub m_global: f64,
    pub r_per_pair: Vec<f64>,
    pub max_gap: f64,
    pub min_gap: f64,
    /// `integral_abs / ((#B - 1) * M * sqrt(n))`.
    pub implied_delta: f64,
    /// `implied_delta / max_gap`; 1 means the chain is tight.
    pub c_emp: Option<f64>,
    /// `integral_abs <= (#B - 1) * sqrt(n) * M * max_gap`, i.e. `max_gap >= implied_delta`.
    pub holds: bool,
    /// Largest gap over consecutive pairs whose second point is the strict
    /// nearest neighbour of the first. Measured, not asserted.
    pub closest_pair_gap: Option<f64>,
    pub closest_pair_exceeds_delta: Option<bool>,
    pub pairs: Vec<PairBound>,
}

impl BoundCertificate {
    pub const CSV_HEADER: &'static str =
        "degree,m,boundary_count,integral_abs,M,max_gap,implied_delta,C_emp,holds";

    pub fn chain_rhs(&self) -> f64 {
        (self.boundary_count as f64 - 1.0)
            * (self.tuple_dim as f64).sqrt()
            * self.m_global
            * self.max_gap
    }

    pub fn csv_row(&self, degree: usize, m: usize) -> String {
        use crate::report::round_sig;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            degree,
            m,
            self.boundary_count,
            round_sig(self.integral_abs),
            round_sig(self.m_global),
            round_sig(self.max_gap),
            round_sig(self.implied_delta),
            self.c_emp.map(|c| round_sig(c).to_string()).unwrap_or_default(),
            self.holds
        )
    }
}

/// Certificate for an explicit tuple and ordered point list.
pub fn certify_points(
    tuple: &PolyTuple,
    points: &[PointTuple],
    include_tied_pairs: bool,
) -> Result<BoundCertificate> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    let (integral, integrals) = integrate_pairs(tuple, points, include_tied_pairs)?;
    let pairs: Vec<PairBound> = points
        .windows(2)
        .zip(&integrals)
        .map(|(w, pi)| {
            pair_bound(tuple, &w[0], &w[1]).map(|pb| PairBound {
                index: pi.index,
                skipped: pi.skipped,
                ..pb
            })
        })
        .collect::<Result<_>>()?;

    let m_global = pairs.iter().fold(0.0_f64, |m, p| m.max(p.m_pair));
    if m_global == 0.0 {
        return Err(Error::DegenerateM);
    }
    let max_gap = pairs.iter().fold(0.0_f64, |m, p| m.max(p.gap));
    let min_gap = pairs.iter().fold(f64::INFINITY, |m, p| m.min(p.gap));
    let integral_abs = integral.abs();
    let n = tuple.len();
    let count = points.len();
    let implied_delta = integral_abs / ((count as f64 - 1.0) * m_global * (n as f64).sqrt());
    let c_emp = (max_gap > 0.0).then(|| implied_delta / max_gap);

    let closest_pair_gap = pairs
        .iter()
        .filter(|p| {
            let i = p.index;
            (0..count)
                .filter(|&j| j != i && j != i + 1)
                .all(|j| p.gap < points[i].distance(&points[j]))
        })
        .map(|p| p.gap)
        .reduce(f64::max);

    let mut cert = BoundCertificate {
        integral,
        integral_abs,
        boundary_count: count,
        tuple_dim: n,
        m_global,
        r_per_pair: pairs.iter().map(|p| p.r_pair).collect(),
        max_gap,
        min_gap,
        implied_delta,
        c_emp,
        holds: false,
        closest_pair_gap,
        closest_pair_exceeds_delta: closest_pair_gap.map(|g| g > implied_delta),
        pairs,
    };
    cert.holds = le_with_slack(integral_abs, cert.chain_rhs());
    Ok(cert)
}

/// Forward certificate for `f` at phase `m`.
pub fn forward_certificate(f: &Polynomial, m: usize, cfg: &ExpansionConfig) -> Result<BoundCertificate> {
    let (tuple, boundary) = tuple_and_boundary(f, m, cfg)?;
    certify_points(&tuple, &boundary.points, cfg.include_tied_pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseReport {
    pub pairs: Vec<PairBound>,
    /// Every pair satisfies `R_pair * gap <= ||Δ_pair||`.
    pub all_hold: bool,
    /// All summed pairs have `cos α` of one strict sign. Only then does the
    /// aggregate lower bound follow from the per-pair bounds.
    pub aggregate_certified: bool,
    /// `(#B - 1) * min R * min gap * sqrt(n) * min |cos α|` over summed pairs.
    pub aggregate_lower: Option<f64>,
    pub aggregate_holds: Option<bool>,
    pub integral_abs: f64,
}

/// Per-pair lower bounds for `f` at phase `m`, plus the aggregate when the
/// cosine signs allow it.
pub fn reverse_pair_check(f: &Polynomial, m: usize, cfg: &ExpansionConfig) -> Result<ReverseReport> {
    let (tuple, boundary) = tuple_and_boundary(f, m, cfg)?;
    if boundary.len() < 2 {
        return Err(Error::InsufficientPoints(boundary.len()));
    }
    let (integral, integrals) =
        integrate_pairs(&tuple, &boundary.points, cfg.include_tied_pairs)?;
    let pairs: Vec<PairBound> = boundary
        .points
        .windows(2)
        .zip(&integrals)
        .map(|(w, pi)| {
            pair_bound(&tuple, &w[0], &w[1]).map(|pb| PairBound {
                index: pi.index,
                skipped: pi.skipped,
                ..pb
            })
        })
        .collect::<Result<_>>()?;

    let summed: Vec<&PairBound> = pairs.iter().filter(|p| !p.skipped).collect();
    let all_pos = summed.iter().all(|p| p.cos_alpha.is_some_and(|c| c > 0.0));
    let all_neg = summed.iter().all(|p| p.cos_alpha.is_some_and(|c| c < 0.0));
    let aggregate_certified = !summed.is_empty() && (all_pos || all_neg);
    let integral_abs = integral.abs();
    let aggregate_lower = aggregate_certified.then(|| {
        let min_r = summed.iter().fold(f64::INFINITY, |m, p| m.min(p.r_pair));
        let min_gap = summed.iter().fold(f64::INFINITY, |m, p| m.min(p.gap));
        let min_cos = summed
            .iter()
            .filter_map(|p| p.cos_alpha)
            .fold(f64::INFINITY, |m, c| m.min(c.abs()));
        summed.len() as f64 * min_r * min_gap * (tuple.len() as f64).sqrt() * min_cos
    });
    Ok(ReverseReport {
        all_hold: pairs.iter().all(|p| p.lower_holds),
        aggregate_certified,
        aggregate_holds: aggregate_lower.map(|lo| le_with_slack(lo, integral_abs)),
        aggregate_lower,
        integral_abs,
        pairs,
    })
}

/// Diagnostic for the claim that a boundary with `|I| < 1` is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub integral_abs: f64,
    /// `|I| < 1`.
    pub hypothesis_met: bool,
    /// `max_i | ||S_{i+1}|| - ||S_i|| |`.
    pub norm_spread: f64,
    /// `max ||S|| - min ||S||`, the worst deviation any permutation can cause.
    pub norm_range: f64,
    pub identity_stable: bool,
    /// Every permutation is stable at tolerance `norm_spread`.
    pub all_stable_at_spread: bool,
    pub epsilon: f64,
    /// Every permutation is stable at tolerance `epsilon`.
    pub all_stable_at_epsilon: bool,
}

pub fn stability_report(
    f: &Polynomial,
    m: usize,
    cfg: &ExpansionConfig,
    epsilon: f64,
) -> Result<StabilityReport> {
    if f.degree() < 3 {
        return Err(Error::DegreeTooLow {
            degree: f.degree(),
            min: 3,
        });
    }
    let (tuple, boundary) = tuple_and_boundary(f, m, cfg)?;
    if boundary.len() < 2 {
        return Err(Error::InsufficientPoints(boundary.len()));
    }
    let (integral, _) = integrate_pairs(&tuple, &boundary.points, cfg.include_tied_pairs)?;
    let norms = boundary.norms();
    let norm_spread = norms
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    let (lo, hi) = norms
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let norm_range = hi - lo;
    let identity = is_stable(&Rotation::identity(boundary.len()), &boundary.points, epsilon)?;
    Ok(StabilityReport {
        integral_abs: integral.abs(),
        hypothesis_met: integral.abs() < 1.0,
        norm_spread,
        norm_range,
        identity_stable: identity.stable,
        all_stable_at_spread: le_with_slack(norm_range, norm_spread),
        epsilon,
        all_stable_at_epsilon: norm_range <= epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantTarget {
    Delta,
    Epsilon,
}

/// Tightest constant on this instance: for `Delta` the gap-normalized ratio
/// `implied_delta / max_gap` (1 means the forward chain is an equality), for
/// `Epsilon` the measured `|I|`.
pub fn empirical_constant(
    f: &Polynomial,
    m: usize,
    target: ConstantTarget,
    cfg: &ExpansionConfig,
) -> Result<f64> {
    let cert = forward_certificate(f, m, cfg)?;
    certificate_constant(&cert, target)
}

pub fn certificate_constant(cert: &BoundCertificate, target: ConstantTarget) -> Result<f64> {
    match target {
        ConstantTarget::Epsilon => Ok(cert.integral_abs),
        ConstantTarget::Delta => cert
            .c_emp
            .ok_or(Error::InsufficientPoints(cert.boundary_count)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignInstance {
    pub index: usize,
    pub poly: Polynomial,
    pub degree: usize,
    pub phase: usize,
    pub certificate: BoundCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub seed: u64,
    pub attempted: usize,
    pub valid: usize,
    /// Skipped instances by error code.
    pub skipped: BTreeMap<String, usize>,
    pub instances: Vec<CampaignInstance>,
}

impl Campaign {
    pub fn all_hold(&self) -> bool {
        self.instances.iter().all(|i| i.certificate.holds)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(BoundCertificate::CSV_HEADER);
        out.push('\n');
        for inst in &self.instances {
            out.push_str(&inst.certificate.csv_row(inst.degree, inst.phase));
            out.push('\n');
        }
        out
    }
}

/// The `index`-th campaign instance: degree in `3..=6`, integer coefficients
/// in `[-9, 9]`, phase in `1..degree`. Independent of evaluation order.
pub fn campaign_instance(seed: u64, index: usize) -> (Polynomial, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let degree = rng.random_range(3..=6);
    let phase = rng.random_range(1..degree);
    (random_integer_poly(&mut rng, degree), phase)
}

/// Forward certificates over `count` seeded random polynomials. Instances
/// whose boundary is degenerate, empty or a single point are counted and
/// skipped.
pub fn run_campaign(seed: u64, count: usize, cfg: &ExpansionConfig) -> Campaign {
    let results: Vec<(usize, Polynomial, usize, Result<BoundCertificate>)> = (0..count)
        .into_par_iter()
        .map(|index| {
            let (poly, phase) = campaign_instance(seed, index);
            let cert = forward_certificate(&poly, phase, cfg);
            (index, poly, phase, cert)
        })
        .collect();

    let mut skipped = BTreeMap::new();
    let mut instances = Vec::new();
    for (index, poly, phase, cert) in results {
        match cert {
            Ok(certificate) => instances.push(CampaignInstance {
                index,
                degree: poly.degree(),
                poly,
                phase,
                certificate,
            }),
            Err(e) => *skipped.entry(e.code().to_string()).or_insert(0) += 1,
        }
    }
    Campaign {
        seed,
        attempted: count,
        valid: instances.len(),
        skipped,
        instances,
    }
}
