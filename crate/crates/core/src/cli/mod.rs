//! The `expansionlab` command line.
//!
//! Every subcommand writes one JSON report to standard output. Exit codes:
//! 0 on success, 1 on a domain error (the report carries the error code),
//! 2 on a usage or configuration error.

mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use config::{Config, CONFIG_ENV};

use crate::bounds::{forward_certificate, reverse_pair_check, run_campaign, stability_report};
use crate::error::{Error, Result};
use crate::expansion::{boundary, boundary_integral, expand_iter, find_poly_with_boundary_size, tuple_and_boundary};
use crate::geometry::{defoliate, is_stable, Rotation};
use crate::poly::Polynomial;
use crate::report::{error_json, to_value, RunReport};
use crate::runners::{
    conditional_bound_check, equal_gap_times, lonely_oracle, positions_at, Metric, RunnerConfig,
    RunnerSnapshot,
};
use crate::tuple_calculus::{PointTuple, PolyTuple};

#[derive(Debug, Parser)]
#[command(name = "expansionlab", version)]
#[command(about = "Expansion calculus on polynomial tuples, boundary bounds and runner checks")]
struct Cli {
    /// JSON config file (falls back to $EXPANSIONLAB_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Relative bracket width for root refinement.
    #[arg(long, global = true)]
    root_tol: Option<f64>,

    /// Residual tolerance for boundary points.
    #[arg(long, global = true)]
    eval_tol: Option<f64>,

    /// Tolerance for "norm preserved" in stability checks.
    #[arg(long, global = true)]
    stability_eps: Option<f64>,

    #[arg(long, global = true)]
    max_boundary_size: Option<usize>,

    /// Sum boundary pairs whose norms tie (default true).
    #[arg(long, global = true)]
    include_tied_pairs: Option<bool>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Polynomial as ascending coefficients, e.g. "1,-1,1,1".
    #[arg(long, conflicts_with = "tuple", allow_hyphen_values = true)]
    poly: Option<String>,

    /// Polynomial tuple, e.g. "0,0,0,1; 0,0,1; 1,-1".
    #[arg(long, allow_hyphen_values = true)]
    tuple: Option<String>,

    #[arg(long, default_value_t = 1)]
    phase: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply the expansion map `phase` times.
    Expand(Source),
    /// Boundary points of the phase-m expansion.
    Boundary(Source),
    /// Boundary integral with its per-pair breakdown.
    Integral {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 1)]
        phase: usize,
    },
    /// Bound certificates for given polynomials or a seeded random campaign.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        poly: Vec<String>,
        #[arg(long, default_value_t = 1)]
        phase: usize,
        /// Number of random instances (degrees 3-6, coefficients in [-9, 9]).
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV summary here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rotate a boundary by a permutation and report stability.
    Rotate {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 1)]
        phase: usize,
        /// 0-based permutation, e.g. "1,0,2,3".
        #[arg(long, conflicts_with = "cycle", allow_hyphen_values = true)]
        perm: Option<String>,
        /// Use the cyclic shift i -> i+1.
        #[arg(long)]
        cycle: bool,
        /// Frequency: apply the rotation this many times.
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Project points onto the unit sphere.
    Defoliate {
        #[arg(long, conflicts_with = "poly", allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(long, default_value_t = 1)]
        phase: usize,
    },
    /// Runner snapshots, equal-gap times, conditional bounds, lonely-runner oracle.
    Runners(RunnersArgs),
    /// Search for a polynomial with a given boundary size.
    Construct {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        phase: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct RunnersArgs {
    /// Comma-separated speeds.
    #[arg(long, allow_hyphen_values = true)]
    speeds: String,
    #[arg(long, value_enum, default_value_t = Metric::Chord)]
    metric: Metric,
    #[arg(long, default_value_t = 0.0)]
    start_angle: f64,
    /// Snapshot time.
    #[arg(long)]
    time: Option<f64>,
    /// Scan window "t0,t1" for equal-gap times.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Equal-gap tolerance (overrides config gap_tol).
    #[arg(long)]
    tol: Option<f64>,
    /// Samples for scans (window scan or oracle).
    #[arg(long)]
    grid: Option<usize>,
    /// Keep only equal-gap times strictly after this.
    #[arg(long)]
    after: Option<f64>,
    /// Consecutive runners by angular order instead of input order.
    #[arg(long)]
    sort_by_angle: bool,
    /// Check the conditional gap bound with this constant D at --time.
    #[arg(long)]
    bound: Option<f64>,
    /// Degree of the underlying polynomial (3 enables the 8-runner form).
    #[arg(long, default_value_t = 3)]
    n_poly: usize,
    /// Run the brute-force lonely-runner oracle (integer speeds, one of them 0).
    #[arg(long)]
    oracle: bool,
    /// Write snapshot gaps as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Expand(_) => "expand",
            Command::Boundary(_) => "boundary",
            Command::Integral { .. } => "integral",
            Command::Verify { .. } => "verify",
            Command::Rotate { .. } => "rotate",
            Command::Defoliate { .. } => "defoliate",
            Command::Runners(_) => "runners",
            Command::Construct { .. } => "construct",
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let name = cli.command.name();
    match resolve_config(&cli).and_then(|cfg| execute(&cli.command, &cfg)) {
        Ok(report) => Outcome {
            code: 0,
            stdout: report.to_json(),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: if e.is_usage() { 2 } else { 1 },
            stdout: error_json(name, &e),
            stderr: format!("error [{}]: {e}\n", e.code()),
        },
    }
}

fn resolve_config(cli: &Cli) -> Result<Config> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => Config::load(&p)?,
        None => Config::default(),
    };
    if let Some(x) = cli.root_tol {
        cfg.root_tol = x;
    }
    if let Some(x) = cli.eval_tol {
        cfg.eval_tol = x;
    }
    if let Some(x) = cli.stability_eps {
        cfg.stability_eps = x;
    }
    if let Some(x) = cli.max_boundary_size {
        cfg.max_boundary_size = x;
    }
    if let Some(x) = cli.include_tied_pairs {
        cfg.include_tied_pairs = x;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} {tok:?}")))
        })
        .collect()
}

fn poly_arg(s: &str) -> Result<Polynomial> {
    s.parse()
}

fn tuple_json(t: &PolyTuple) -> Value {
    json!({
        "components": t.components(),
        "text": t.to_string(),
    })
}

fn boundary_json(b: &crate::BoundarySet) -> Result<Value> {
    Ok(json!({
        "count": b.len(),
        "root_counts": b.root_counts,
        "points": to_value(&b.points)?,
        "norms": to_value(&b.norms())?,
        "expanded": tuple_json(&b.expanded),
        "max_scaled_residual": b.max_scaled_residual(),
    }))
}

fn source_tuple(src: &Source) -> Result<PolyTuple> {
    match (&src.poly, &src.tuple) {
        (Some(p), None) => PolyTuple::tuple_repr(&poly_arg(p)?),
        (None, Some(t)) => t.parse(),
        _ => Err(Error::InvalidArgument("give exactly one of --poly or --tuple".into())),
    }
}

fn execute(cmd: &Command, cfg: &Config) -> Result<RunReport> {
    let ecfg = cfg.expansion();
    let name = cmd.name();
    match cmd {
        Command::Expand(src) => {
            let t = source_tuple(src)?;
            let e = expand_iter(&t, src.phase);
            let inputs = json!({"poly": src.poly, "tuple": src.tuple, "phase": src.phase});
            let results = json!({"tuple": tuple_json(&t), "expanded": tuple_json(&e)});
            RunReport::new(name, &inputs, &results, cfg)
        }
        Command::Boundary(src) => {
            let t = source_tuple(src)?;
            if let Some(p) = &src.poly {
                let f = poly_arg(p)?;
                if src.phase >= f.degree() {
                    return Err(Error::PhaseTooHigh { phase: src.phase, degree: f.degree() });
                }
            }
            let b = boundary(&t, src.phase, &ecfg)?;
            let inputs = json!({"poly": src.poly, "tuple": src.tuple, "phase": src.phase});
            let mut results = boundary_json(&b)?;
            results["tuple"] = tuple_json(&t);
            if b.len() >= 2 {
                results["gaps"] = to_value(&b.consecutive_gaps()?)?;
            }
            RunReport::new(name, &inputs, &results, cfg)
        }
        Command::Integral { poly, phase } => {
            let f = poly_arg(poly)?;
            let bi = boundary_integral(&f, *phase, &ecfg)?;
            let inputs = json!({"poly": f, "phase": phase});
            let results = json!({
                "input": f.to_string(),
                "phase": phase,
                "tuple": tuple_json(&bi.tuple),
                "boundary": to_value(&bi.boundary.points)?,
                "norms": to_value(&bi.boundary.norms())?,
                "gaps": to_value(&bi.boundary.consecutive_gaps()?)?,
                "pair_integrals": to_value(&bi.pairs)?,
                "total": bi.total,
                "abs": bi.abs(),
            });
            RunReport::new(name, &inputs, &results, cfg)
        }
        Command::Verify { poly, phase, count, seed, csv } => verify(cfg, poly, *phase, *count, *seed, csv.as_ref()),
        Command::Rotate { poly, phase, perm, cycle, power } => {
            let f = poly_arg(poly)?;
            let (_, b) = tuple_and_boundary(&f, *phase, &ecfg)?;
            let rot = match (perm, cycle) {
                (Some(p), false) => Rotation::new(parse_list(p, "index")?)?,
                (None, true) => Rotation::cycle(b.len()),
                (None, false) => Rotation::identity(b.len()),
                (Some(_), true) => unreachable!("clap rejects --perm with --cycle"),
            };
            let powered = rot.pow(*power);
            let rotated = powered.apply(&b.points)?;
            let stability = is_stable(&powered, &b.points, cfg.stability_eps)?;
            let diagnostic = stability_report(&f, *phase, &ecfg, cfg.stability_eps).map_or_else(
                |e| json!({"error": e.code()}),
                |r| to_value(&r).unwrap_or(Value::Null),
            );
            let inputs = json!({"poly": f, "phase": phase, "perm": rot, "power": power});
            let results = json!({
                "boundary": boundary_json(&b)?,
                "rotation": powered,
                "rotated_points": to_value(&rotated)?,
                "stability": to_value(&stability)?,
                "stability_report": diagnostic,
            });
            RunReport::new(name, &inputs, &results, cfg)
        }
        Command::Defoliate { point, poly, phase } => {
            let points: Vec<PointTuple> = match (point, poly) {
                (Some(p), None) => vec![p.parse()?],
                (None, Some(p)) => tuple_and_boundary(&poly_arg(p)?, *phase, &ecfg)?.1.points,
                _ => return Err(Error::InvalidArgument("give exactly one of --point or --poly".into())),
            };
            let out = points.iter().map(defoliate).collect::<Result<Vec<_>>>()?;
            let inputs = json!({"point": point, "poly": poly, "phase": phase});
            let results = json!({
                "points": to_value(&points)?,
                "defoliated": to_value(&out)?,
                "norms": to_value(&out.iter().map(PointTuple::norm).collect::<Vec<_>>())?,
            });
            RunReport::new(name, &inputs, &results, cfg)
        }
        Command::Runners(args) => runners(cfg, args),
        Command::Construct { k, phase, budget, seed } => {
            if *k == 0 || *phase == 0 {
                return Err(Error::InvalidArgument("need k >= 1 and phase >= 1".into()));
            }
            let found = find_poly_with_boundary_size(*k, *phase, *budget, *seed, &ecfg);
            let inputs = json!({"k": k, "phase": phase, "budget": budget, "seed": seed});
            let results = match found {
                Some(c) => json!({
                    "found": true,
                    "poly": c.poly,
                    "text": c.poly.to_string(),
                    "trials": c.trials,
                    "boundary_size": c.boundary_size,
                }),
                None => json!({"found": false, "trials": budget}),
            };
            RunReport::new(name, &inputs, &results, cfg)
        }
    }
}

fn verify(
    cfg: &Config,
    polys: &[String],
    phase: usize,
    count: Option<usize>,
    seed: u64,
    csv: Option<&PathBuf>,
) -> Result<RunReport> {
    let ecfg = cfg.expansion();
    let (results, csv_text) = match (polys.is_empty(), count) {
        (false, None) => {
            let mut certs = Vec::new();
            let mut rows = String::from(crate::bounds::BoundCertificate::CSV_HEADER);
            rows.push('\n');
            for p in polys {
                let f = poly_arg(p)?;
                let cert = forward_certificate(&f, phase, &ecfg)?;
                let reverse = reverse_pair_check(&f, phase, &ecfg)?;
                rows.push_str(&cert.csv_row(f.degree(), phase));
                rows.push('\n');
                certs.push(json!({
                    "poly": f,
                    "degree": f.degree(),
                    "phase": phase,
                    "certificate": to_value(&cert)?,
                    "reverse": to_value(&reverse)?,
                }));
            }
            let all_hold = certs.iter().all(|c| c["certificate"]["holds"] == json!(true));
            (json!({"certificates": certs, "all_hold": all_hold}), rows)
        }
        (true, Some(n)) => {
            let campaign = run_campaign(seed, n, &ecfg);
            let pairs = campaign.instances.iter().flat_map(|i| &i.certificate.pairs);
            let (mut total, mut lower, mut upper) = (0usize, 0usize, 0usize);
            for p in pairs {
                total += 1;
                lower += p.lower_holds as usize;
                upper += p.upper_holds as usize;
            }
            let summary = json!({
                "attempted": campaign.attempted,
                "valid": campaign.valid,
                "skipped": campaign.skipped,
                "all_hold": campaign.all_hold(),
                "pairs_checked": total,
                "pairs_lower_hold": lower,
                "pairs_upper_hold": upper,
            });
            let csv_text = campaign.csv();
            (json!({"summary": summary, "certificates": to_value(&campaign.instances)?}), csv_text)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give --poly (one or more) or --count, not both".into(),
            ))
        }
    };
    if let Some(path) = csv {
        std::fs::write(path, csv_text)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    }
    let inputs = json!({"poly": polys, "phase": phase, "count": count, "seed": seed});
    RunReport::new("verify", &inputs, &results, cfg)
}

fn snapshot_csv(snaps: &[RunnerSnapshot]) -> String {
    let k = snaps.first().map_or(0, |s| s.gaps.len());
    let mut out = String::from("time");
    for i in 0..k {
        out.push_str(&format!(",gap_{i}"));
    }
    out.push('\n');
    for s in snaps {
        out.push_str(&crate::report::round_sig(s.time).to_string());
        for g in &s.gaps {
            out.push(',');
            out.push_str(&crate::report::round_sig(*g).to_string());
        }
        out.push('\n');
    }
    out
}

fn runners(cfg: &Config, args: &RunnersArgs) -> Result<RunReport> {
    let speeds: Vec<f64> = parse_list(&args.speeds, "speed")?;
    let tol = args.tol.unwrap_or(cfg.gap_tol);
    let mut results = serde_json::Map::new();
    let mut snaps = Vec::new();

    if args.oracle {
        let grid = args.grid.unwrap_or(cfg.oracle_grid);
        let r = lonely_oracle(&speeds, grid, cfg.refine_tol)?;
        results.insert("oracle".into(), to_value(&r)?);
        results.insert("oracle_grid".into(), json!(grid));
        results.insert("oracle_metric".into(), json!(Metric::Normalized));
    } else {
        let mut rc = RunnerConfig::new(speeds.clone(), args.metric)?;
        rc.start_angle = args.start_angle;
        rc.sort_by_angle = args.sort_by_angle;

        let t = args.time.unwrap_or(0.0);
        if args.time.is_some() || args.window.is_none() {
            let snap = positions_at(&rc, t);
            results.insert("snapshot".into(), to_value(&snap)?);
            snaps.push(snap);
        }
        if let Some(w) = &args.window {
            let bounds: Vec<f64> = parse_list(w, "window bound")?;
            let [t0, t1] = bounds[..] else {
                return Err(Error::Parse(format!("window needs two values, got {w:?}")));
            };
            let grid = args.grid.unwrap_or(cfg.scan_grid);
            let times = equal_gap_times(&rc, (t0, t1), tol, grid, args.after)?;
            snaps.extend(times.iter().map(|&t| positions_at(&rc, t)));
            results.insert("equal_gap_times".into(), to_value(&times)?);
            results.insert("equal_gap_count".into(), json!(times.len()));
        }
        if let Some(d) = args.bound {
            let check = conditional_bound_check(&rc, t, d, args.n_poly, tol)?;
            results.insert("bound".into(), to_value(&check)?);
        }
        results.insert("metric".into(), json!(args.metric));
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, snapshot_csv(&snaps))
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    }
    let inputs = json!({
        "speeds": speeds,
        "metric": args.metric,
        "start_angle": args.start_angle,
        "time": args.time,
        "window": args.window,
        "tol": tol,
        "after": args.after,
        "sort_by_angle": args.sort_by_angle,
        "bound": args.bound,
        "n_poly": args.n_poly,
        "oracle": args.oracle,
    });
    RunReport::new("runners", &inputs, &Value::Object(results), cfg)
}
