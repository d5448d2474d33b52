//! Runners on a unit-radius circular track.
//!
//! Runner `i` sits at angle `start + speed_i * t (mod 2π)`. Distances between
//! runners use one of three metrics: chord length, arc length, or arc length
//! as a fraction of the circumference (the metric of the classical lonely
//! runner problem).

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GRID: usize = 1_000_000;
pub const DEFAULT_REFINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Chord,
    Arc,
    Normalized,
}

impl Metric {
    /// Distance between two angles (radians).
    pub fn distance(self, a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        let arc = d.min(TAU - d);
        match self {
            Metric::Chord => 2.0 * (0.5 * (a - b)).sin().abs(),
            Metric::Arc => arc,
            Metric::Normalized => arc / TAU,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunnerConfig {
    pub speeds: Vec<f64>,
    pub metric: Metric,
    pub start_angle: f64,
    /// Take consecutive runners in angular order at time `t` instead of input order.
    pub sort_by_angle: bool,
}

impl RunnerConfig {
    pub fn new(speeds: Vec<f64>, metric: Metric) -> Result<Self> {
        if speeds.len() < 2 {
            return Err(Error::InvalidRunners(format!(
                "need at least 2 runners, got {}",
                speeds.len()
            )));
        }
        if let Some(s) = speeds.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidRunners(format!("speed {s} is not finite")));
        }
        for (i, a) in speeds.iter().enumerate() {
            if speeds[i + 1..].contains(a) {
                return Err(Error::InvalidRunners(format!("speed {a} repeats")));
            }
        }
        Ok(RunnerConfig {
            speeds,
            metric,
            start_angle: 0.0,
            sort_by_angle: false,
        })
    }

    pub fn k(&self) -> usize {
        self.speeds.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunnerSnapshot {
    pub time: f64,
    /// Angles in `[0, 2π)`, in input order.
    pub angles: Vec<f64>,
    /// Runner indices in the order used for consecutive gaps.
    pub order: Vec<usize>,
    /// `gaps[i]` is the distance between `order[i]` and `order[i + 1]`.
    pub gaps: Vec<f64>,
    pub metric: Metric,
}

impl RunnerSnapshot {
    pub fn from_angles(time: f64, angles: Vec<f64>, metric: Metric, sort_by_angle: bool) -> Self {
        let angles: Vec<f64> = angles.into_iter().map(|a| a.rem_euclid(TAU)).collect();
        let mut order: Vec<usize> = (0..angles.len()).collect();
        if sort_by_angle {
            order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]).then(i.cmp(&j)));
        }
        let gaps = order
            .windows(2)
            .map(|w| metric.distance(angles[w[0]], angles[w[1]]))
            .collect();
        RunnerSnapshot {
            time,
            angles,
            order,
            gaps,
            metric,
        }
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_i |gaps[i] - gaps[0]|`; zero when all consecutive gaps agree.
    pub fn gap_deviation(&self) -> f64 {
        match self.gaps.first() {
            Some(&g0) => self.gaps.iter().map(|g| (g - g0).abs()).fold(0.0, f64::max),
            None => 0.0,
        }
    }
}

pub fn positions_at(cfg: &RunnerConfig, t: f64) -> RunnerSnapshot {
    let angles = cfg
        .speeds
        .iter()
        .map(|v| cfg.start_angle + v * t)
        .collect();
    RunnerSnapshot::from_angles(t, angles, cfg.metric, cfg.sort_by_angle)
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Times in `window` where all consecutive gaps agree within `tol`: every
/// qualifying grid point, plus grid-local minima of the gap deviation refined
/// by golden-section search. `after` keeps only times strictly greater.
pub fn equal_gap_times(
    cfg: &RunnerConfig,
    window: (f64, f64),
    tol: f64,
    grid: usize,
    after: Option<f64>,
) -> Result<Vec<f64>> {
    let (t0, t1) = window;
    if !(t0 < t1) || grid < 2 {
        return Err(Error::InvalidArgument(
            "window must satisfy t0 < t1 and grid >= 2".into(),
        ));
    }
    let step = (t1 - t0) / (grid - 1) as f64;
    let time = |i: usize| if i == grid - 1 { t1 } else { t0 + step * i as f64 };
    let dev = |t: f64| positions_at(cfg, t).gap_deviation();
    let h: Vec<f64> = (0..grid).into_par_iter().map(|i| dev(time(i))).collect();

    let mut times: Vec<f64> = Vec::new();
    for i in 0..grid {
        if h[i] <= tol {
            times.push(time(i));
            continue;
        }
        let left = if i > 0 { h[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < grid { h[i + 1] } else { f64::INFINITY };
        if h[i] <= left && h[i] <= right {
            let a = time(i.saturating_sub(1));
            let b = time((i + 1).min(grid - 1));
            let t = golden_min(dev, a, b, 1e-13 * (1.0 + b.abs()));
            if dev(t) <= tol {
                times.push(t);
            }
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|b, a| (*b - *a).abs() < 0.5 * step);
    if let Some(s) = after {
        times.retain(|&t| t > s);
    }
    Ok(times)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EightRunnerBound {
    /// `π / (7 D √3)`.
    pub bound: f64,
    pub pass: bool,
    /// `π / (7 √3 min_gap)`: the largest `D` for which the bound still holds.
    pub d_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub time: f64,
    pub metric: Metric,
    pub k: usize,
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub deviation: f64,
    pub d: f64,
    /// `D π / (k - 1)`.
    pub general_bound: f64,
    pub general_pass: bool,
    /// `min_gap (k - 1) / π`: the largest `D` for which the general bound holds.
    pub d_min_general: f64,
    /// Present when `k = 8` and the polynomial degree is 3.
    pub eight_runner: Option<EightRunnerBound>,
    /// The 8-runner `D_min` when that form applies, otherwise the general one.
    pub d_min: Option<f64>,
}

/// Checks the conditional gap bounds at one snapshot. The equal-gap condition
/// must hold within `tol`.
pub fn check_snapshot(snap: &RunnerSnapshot, d: f64, n_poly: usize, tol: f64) -> Result<BoundCheck> {
    let k = snap.angles.len();
    if k < 2 {
        return Err(Error::InvalidRunners("need at least 2 runners".into()));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidArgument("D must be positive".into()));
    }
    let deviation = snap.gap_deviation();
    if deviation > tol {
        return Err(Error::ConditionNotMet { deviation, tol });
    }
    let min_gap = snap.min_gap();
    let general_bound = d * PI / (k as f64 - 1.0);
    let d_min_general = min_gap * (k as f64 - 1.0) / PI;
    let eight_runner = (k == 8 && n_poly == 3).then(|| {
        let bound = PI / (7.0 * d * 3f64.sqrt());
        EightRunnerBound {
            bound,
            pass: min_gap > bound,
            d_min: (min_gap > 0.0).then(|| PI / (7.0 * 3f64.sqrt() * min_gap)),
        }
    });
    let d_min = match eight_runner {
        Some(e) => e.d_min,
        None => Some(d_min_general),
    };
    Ok(BoundCheck {
        time: snap.time,
        metric: snap.metric,
        k,
        gaps: snap.gaps.clone(),
        min_gap,
        deviation,
        d,
        general_bound,
        general_pass: min_gap > general_bound,
        d_min_general,
        eight_runner,
        d_min,
    })
}

pub fn conditional_bound_check(
    cfg: &RunnerConfig,
    t: f64,
    d: f64,
    n_poly: usize,
    tol: f64,
) -> Result<BoundCheck> {
    check_snapshot(&positions_at(cfg, t), d, n_poly, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LonelyResult {
    pub t_star: f64,
    /// Largest minimum normalized distance from the stationary runner.
    pub max_min: f64,
    pub grid_t: f64,
    pub grid_max_min: f64,
}

fn frac_dist(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    f.min(1.0 - f)
}

/// Brute-force gap of loneliness for integer speeds with one stationary
/// runner: scans `t = i / grid` over one period, then refines every
/// near-best grid peak by golden-section search to `refine_tol`.
pub fn lonely_oracle(speeds: &[f64], grid: usize, refine_tol: f64) -> Result<LonelyResult> {
    if let Some(&s) = speeds.iter().find(|s| s.fract() != 0.0 || !s.is_finite()) {
        return Err(Error::NonIntegerSpeeds(s));
    }
    RunnerConfig::new(speeds.to_vec(), Metric::Normalized)?;
    if !speeds.contains(&0.0) {
        return Err(Error::NoStationaryRunner);
    }
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must be >= 2".into()));
    }
    let moving: Vec<i64> = speeds.iter().filter(|&&s| s != 0.0).map(|&s| s as i64).collect();
    let g = grid as i64;

    // exact on the grid: the fractional part of v * i / grid is ((v * i) mod grid) / grid
    let at_grid = |i: usize| -> f64 {
        moving
            .iter()
            .map(|&v| {
                let r = (v as i128 * i as i128).rem_euclid(g as i128) as i64;
                r.min(g - r) as f64 / grid as f64
            })
            .fold(f64::INFINITY, f64::min)
    };
    let at = |t: f64| -> f64 {
        moving
            .iter()
            .map(|&v| frac_dist(v as f64 * t))
            .fold(f64::INFINITY, f64::min)
    };

    let values: Vec<f64> = (0..grid).into_par_iter().map(at_grid).collect();
    let (best_i, best) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });

    let lipschitz = moving.iter().map(|v| v.unsigned_abs()).max().unwrap_or(1) as f64;
    let slack = lipschitz / grid as f64;
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&i| {
            let l = values[(i + grid - 1) % grid];
            let r = values[(i + 1) % grid];
            values[i] >= best - slack && values[i] >= l && values[i] >= r
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(256);

    let h = 1.0 / grid as f64;
    let (mut t_star, mut max_min) = (best_i as f64 * h, best);
    for &i in &peaks {
        let centre = i as f64 * h;
        let t = golden_min(|t| -at(t), centre - h, centre + h, refine_tol);
        let v = at(t);
        if v > max_min {
            t_star = t.rem_euclid(1.0);
            max_min = v;
        }
    }
    Ok(LonelyResult {
        t_star,
        max_min,
        grid_t: best_i as f64 * h,
        grid_max_min: best,
    })
}
