//! Command-line front end for the window-survey, congruence, and toric
//! engines. Every invocation writes its artifacts to a fresh directory
//! `runs/<timestamp>-<command>/`:
//!
//! * `points.csv` (zoom) / `values.csv` (congruence) — the raw data;
//! * `report.json` — schema-versioned summary (bucket counts, fits,
//!   statistic values, relation lists);
//! * `manifest.json` — command echo, tool version, worker count, the
//!   enumeration bounds actually used, and wall time.
//!
//! The data artifacts (`points.csv`, `values.csv`, `report.json`) are
//! byte-identical across runs and worker counts for identical flags and
//! version; timing lives only in the manifest. All files are written via
//! a temporary name plus rename, so an interrupted run never leaves a
//! partial artifact. Exit codes: 0 success, 1 any error, 2 specifically
//! when the two enumeration engines disagree.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use zoomscope::congruence::{
    central_count, interval_count, rho, rho_sum, roots_up_to, star_discrepancy, GDescriptor,
    QuadPoly,
};
use zoomscope::rat::Rat;
use zoomscope::toric::{
    admissible_multidegrees, builtin_fan, irreducible_relations, lr_rank, positive_relations, Fan,
    FanSpec, PositiveRelation,
};
use zoomscope::zoom::{
    csv_header, fit_exponent, line_enumerate, run_enumeration, thin_split, CountReport,
    EnumerationBounds, PointRecord, Strategy, ZoomQuery, MAX_HEIGHT_BOUND,
};
use zoomscope::Error as EngineError;

const REPORT_SCHEMA: &str = "zoomscope-report/1";
const MANIFEST_SCHEMA: &str = "zoomscope-manifest/1";

#[derive(Parser)]
#[command(
    name = "zoomscope",
    version,
    about = "Exact surveys of rational points in shrinking height windows, \
             congruence-root statistics, and toric multidegree searches"
)]
struct Cli {
    /// Root directory for run artifacts.
    #[arg(long, default_value = "runs")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate windowed rational points and report bucketed counts.
    Zoom(ZoomArgs),
    /// Root statistics of quadratic congruences.
    Congruence(CongruenceArgs),
    /// Positive relations and admissible multidegrees of complete plane fans.
    Toric(ToricArgs),
}

#[derive(Args)]
struct ZoomArgs {
    /// Height bound (integer; scientific shorthand like 1e8 accepted).
    #[arg(long = "B", value_name = "B")]
    b: Option<String>,
    /// Zoom factor, written as a fraction p/q (decimals are refused).
    #[arg(long)]
    r: String,
    /// Window multiplier epsilon, written as a fraction p/q.
    #[arg(long)]
    epsilon: String,
    /// Comma-separated height bounds for a series run (replaces --B).
    #[arg(long, conflicts_with = "b", value_name = "B1,B2,...")]
    grid: Option<String>,
    /// Append per-bucket log-log slope fits to a series report.
    #[arg(long)]
    fit: bool,
    /// Enumeration engine; `both` cross-checks the two and fails on any
    /// difference, `param` adds the line closed forms to the parametric
    /// off-line engine.
    #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
    strategy: StrategyArg,
    /// Worker threads for the enumeration engines.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Brute,
    Param,
    Both,
}

impl StrategyArg {
    fn engine(self) -> Strategy {
        match self {
            StrategyArg::Brute => Strategy::Brute,
            StrategyArg::Param => Strategy::Param,
            StrategyArg::Both => Strategy::Both,
        }
    }

    fn label(self) -> &'static str {
        match self {
            StrategyArg::Brute => "brute",
            StrategyArg::Param => "param",
            StrategyArg::Both => "both",
        }
    }
}

#[derive(Args)]
struct CongruenceArgs {
    /// Polynomial lead,constant for F(X) = lead*X^2 + constant.
    #[arg(long, value_name = "LEAD,CONST")]
    poly: String,
    #[command(subcommand)]
    action: CongruenceAction,
}

#[derive(Subcommand)]
enum CongruenceAction {
    /// Number of roots of F modulo n.
    Rho {
        #[arg(long)]
        n: String,
    },
    /// Summatory root count over moduli up to X, with normalizations.
    Sum {
        #[arg(long = "X")]
        x: String,
    },
    /// Exact star discrepancy of the root fractions with modulus up to X.
    Discrepancy {
        #[arg(long = "X")]
        x: String,
    },
    /// Count of root fractions in [lo, hi) with modulus up to X.
    Interval {
        #[arg(long = "X")]
        x: String,
        #[arg(long)]
        lo: String,
        #[arg(long)]
        hi: String,
    },
    /// Windowed central count: pairs (l, m) with F(l) = 0 mod m,
    /// theta2 <= A - l/m <= theta1, and m^2 G(A - l/m) <= X.
    Central {
        #[arg(long = "X")]
        x: String,
        #[arg(long = "A")]
        a: String,
        #[arg(long)]
        theta2: String,
        #[arg(long)]
        theta1: String,
        /// Constant weight G (fraction p/q).
        #[arg(long, conflicts_with = "g_nodal", default_value = "1")]
        g_const: String,
        /// Nodal weight G(x) = scale * x * (c - x)^2, written scale,c.
        #[arg(long, value_name = "SCALE,C")]
        g_nodal: Option<String>,
    },
}

#[derive(Args)]
struct ToricArgs {
    /// Built-in surface name: P2, X1, X2, X3, P1xP1, Y3, Y4.
    #[arg(long, conflicts_with = "fan")]
    surface: Option<String>,
    /// JSON fan description {"name": ..., "rays": [[x, y], ...]}.
    #[arg(long, value_name = "FILE")]
    fan: Option<PathBuf>,
    #[command(subcommand)]
    action: ToricAction,
}

#[derive(Subcommand)]
enum ToricAction {
    /// All positive relations among the rays, up to a degree bound.
    Relations {
        #[arg(long)]
        maxdeg: i64,
    },
    /// Only the irreducible positive relations, up to a degree bound.
    Irreducible {
        #[arg(long)]
        maxdeg: i64,
    },
    /// Multidegrees admissible at zoom factor r, with their lattice rank.
    Admissible {
        #[arg(long)]
        r: String,
        #[arg(long)]
        maxdeg: i64,
    },
    /// Rank of the lattice generated by the admissible multidegrees.
    Rank {
        #[arg(long)]
        r: String,
        #[arg(long)]
        maxdeg: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let mismatch = err
                .chain()
                .filter_map(|cause| cause.downcast_ref::<EngineError>())
                .any(|e| matches!(e, EngineError::OracleMismatch { .. }));
            if mismatch {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let echo = command_echo();
    match cli.command {
        Command::Zoom(args) => cmd_zoom(&cli.out_dir, echo, args),
        Command::Congruence(args) => cmd_congruence(&cli.out_dir, echo, args),
        Command::Toric(args) => cmd_toric(&cli.out_dir, echo, args),
    }
}

// ---------------------------------------------------------------------------
// Flag parsing

/// Exact rational from "p/q" or "p"; decimals are refused so window and
/// zoom-factor membership stays exact.
fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    if text.contains('.') {
        bail!("{text:?} is a decimal; write an exact fraction p/q");
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i128>().context("numerator")?,
            d.trim().parse::<i128>().context("denominator")?,
        ),
        None => (text.parse::<i128>().context("integer")?, 1),
    };
    if den == 0 {
        bail!("{text:?} has a zero denominator");
    }
    Ok(Rat::new(num, den))
}

/// Positive integer, plain ("100000000") or scientific shorthand ("1e8").
fn parse_count(text: &str) -> Result<i128> {
    let text = text.trim();
    let value = match text.split_once(['e', 'E']) {
        Some((mantissa, exponent)) => {
            let m = mantissa.parse::<i128>().context("mantissa")?;
            let e = exponent.parse::<u32>().context("exponent")?;
            10i128
                .checked_pow(e)
                .and_then(|p| m.checked_mul(p))
                .with_context(|| format!("{text:?} overflows the supported integer range"))?
        }
        None => text.parse::<i128>()?,
    };
    if value < 1 {
        bail!("{text:?} must be a positive integer");
    }
    Ok(value)
}

fn parse_height(text: &str) -> Result<i128> {
    let value = parse_count(text)?;
    if value > MAX_HEIGHT_BOUND {
        bail!("height bound {value} exceeds the supported maximum {MAX_HEIGHT_BOUND}");
    }
    Ok(value)
}

/// "lead,constant" integer pair.
fn parse_poly(text: &str) -> Result<QuadPoly> {
    let (lead, constant) = text
        .split_once(',')
        .with_context(|| format!("{text:?} is not of the form lead,constant"))?;
    let lead = lead.trim().parse::<i128>().context("lead coefficient")?;
    let constant = constant.trim().parse::<i128>().context("constant coefficient")?;
    if lead == 0 || constant == 0 {
        bail!("both coefficients must be nonzero");
    }
    Ok(QuadPoly::new(lead, constant))
}

fn command_echo() -> String {
    let args: Vec<String> = std::env::args().collect();
    args.join(" ")
}

// ---------------------------------------------------------------------------
// Artifact plumbing

/// Creates `root/<timestamp>-<command>/`, appending `-2`, `-3`, ... if the
/// second-resolution timestamp collides.
fn create_run_dir(root: &Path, command: &str) -> Result<PathBuf> {
    fs::create_dir_all(root)
        .with_context(|| format!("creating output root {}", root.display()))?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{stamp}-{command}");
    for attempt in 0u32.. {
        let name = if attempt == 0 {
            base.clone()
        } else {
            format!("{base}-{}", attempt + 1)
        };
        let dir = root.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e).with_context(|| format!("creating {}", dir.display())),
        }
    }
    unreachable!("run directory creation loop is unbounded");
}

/// Write-then-rename so interrupted runs never leave a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, &text)
}

#[derive(Serialize)]
struct ManifestFile {
    schema: &'static str,
    command: String,
    version: &'static str,
    workers: usize,
    wall_seconds: f64,
    /// Enumeration bounds actually used, one entry per surveyed height
    /// (empty for the congruence and toric commands).
    bounds: Vec<BoundsEntry>,
}

#[derive(Serialize)]
struct BoundsEntry {
    b: i128,
    y_max: i128,
    c3_max: i128,
    d_max: i128,
    u_max: i128,
    kappa: f64,
    wall_seconds: f64,
}

fn write_manifest(
    dir: &Path,
    command: String,
    workers: usize,
    wall_seconds: f64,
    bounds: Vec<BoundsEntry>,
) -> Result<()> {
    let manifest = ManifestFile {
        schema: MANIFEST_SCHEMA,
        command,
        version: env!("CARGO_PKG_VERSION"),
        workers,
        wall_seconds,
        bounds,
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

// ---------------------------------------------------------------------------
// zoom

#[derive(Serialize)]
struct SlopeFit {
    slope: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct ReportFits {
    on_lines: Option<SlopeFit>,
    thin: Option<SlopeFit>,
    generic: Option<SlopeFit>,
    total: Option<SlopeFit>,
}

#[derive(Serialize)]
struct ZoomReportFile {
    schema: &'static str,
    strategy: &'static str,
    runs: Vec<CountReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fits: Option<ReportFits>,
}

/// One full survey: the parametric engine covers only off-line points, so
/// that strategy merges in the line closed forms; the others already
/// include them.
fn survey(
    query: &ZoomQuery,
    strategy: Strategy,
    workers: usize,
) -> Result<(Vec<PointRecord>, EnumerationBounds), EngineError> {
    let (mut records, bounds) = run_enumeration(query, strategy, workers)?;
    if strategy == Strategy::Param {
        records.extend(line_enumerate(query)?);
        records.sort_by_key(|rec| (rec.point.x(), rec.point.y(), rec.point.s(), rec.point.t()));
    }
    Ok((records, bounds))
}

fn cmd_zoom(out_root: &Path, echo: String, args: ZoomArgs) -> Result<()> {
    let r = parse_rat(&args.r).context("--r")?;
    let epsilon = parse_rat(&args.epsilon).context("--epsilon")?;
    let heights: Vec<i128> = match (&args.b, &args.grid) {
        (Some(b), None) => vec![parse_height(b).context("--B")?],
        (None, Some(grid)) => grid
            .split(',')
            .map(|part| parse_height(part).context("--grid"))
            .collect::<Result<_>>()?,
        (None, None) => bail!("one of --B or --grid is required"),
        (Some(_), Some(_)) => unreachable!("clap rejects --B with --grid"),
    };
    if heights.is_empty() {
        bail!("--grid needs at least one height bound");
    }
    let workers = args.threads.max(1);
    let dir = create_run_dir(out_root, "zoom")?;
    let started = Instant::now();

    let mut runs: Vec<CountReport> = Vec::new();
    let mut bounds_entries: Vec<BoundsEntry> = Vec::new();
    for &b in &heights {
        let query = ZoomQuery::new(b, r, epsilon)
            .map_err(|e| anyhow::anyhow!(e))
            .context("invalid query parameters")?;
        let run_started = Instant::now();
        let (records, bounds) =
            survey(&query, args.strategy.engine(), workers).map_err(keep_engine_error)?;
        let wall = run_started.elapsed().as_secs_f64();

        let mut csv = String::with_capacity(64 * (records.len() + 1));
        csv.push_str(csv_header());
        csv.push('\n');
        for rec in &records {
            csv.push_str(&rec.csv_row());
            csv.push('\n');
        }
        let csv_name = if heights.len() == 1 {
            "points.csv".to_string()
        } else {
            format!("points-{b}.csv")
        };
        write_atomic(&dir.join(csv_name), &csv)?;

        let report = thin_split(&records, &query);
        println!(
            "B={b} eps={epsilon} r={r}: total={} (lines {}, thin {}, generic {})",
            report.buckets.total,
            report.buckets.on_lines,
            report.buckets.thin,
            report.buckets.generic,
        );
        runs.push(report);
        bounds_entries.push(BoundsEntry {
            b,
            y_max: bounds.y_max,
            c3_max: bounds.c3_max,
            d_max: bounds.d_max,
            u_max: bounds.u_max,
            kappa: bounds.kappa,
            wall_seconds: wall,
        });
    }

    let fits = if args.fit {
        if runs.len() < 3 {
            println!("fit skipped: a series of at least 3 heights is required");
            None
        } else {
            let series = |pick: fn(&CountReport) -> u64| -> Option<SlopeFit> {
                let data: Vec<(i128, u64)> = runs.iter().map(|r| (r.b, pick(r))).collect();
                fit_exponent(&data)
                    .ok()
                    .map(|(slope, stderr)| SlopeFit { slope, stderr })
            };
            let fits = ReportFits {
                on_lines: series(|r| r.buckets.on_lines),
                thin: series(|r| r.buckets.thin),
                generic: series(|r| r.buckets.generic),
                total: series(|r| r.buckets.total),
            };
            for (name, fit) in [
                ("on_lines", &fits.on_lines),
                ("thin", &fits.thin),
                ("generic", &fits.generic),
                ("total", &fits.total),
            ] {
                match fit {
                    Some(f) => println!(
                        "fit {name}: slope {:.4} (stderr {:.4})",
                        f.slope, f.stderr
                    ),
                    None => println!("fit {name}: skipped (zero count in series)"),
                }
            }
            Some(fits)
        }
    } else {
        None
    };

    let report_file = ZoomReportFile {
        schema: REPORT_SCHEMA,
        strategy: args.strategy.label(),
        runs,
        fits,
    };
    write_json(&dir.join("report.json"), &report_file)?;
    write_manifest(
        &dir,
        echo,
        workers,
        started.elapsed().as_secs_f64(),
        bounds_entries,
    )?;
    println!("artifacts: {}", dir.display());
    Ok(())
}

/// Wraps an engine error for anyhow while keeping the concrete value in
/// the chain, so `main` can map the engine-disagreement case to exit 2.
fn keep_engine_error(err: EngineError) -> anyhow::Error {
    anyhow::Error::new(err)
}

// ---------------------------------------------------------------------------
// congruence

fn cmd_congruence(out_root: &Path, echo: String, args: CongruenceArgs) -> Result<()> {
    let f = parse_poly(&args.poly).context("--poly")?;
    let dir = create_run_dir(out_root, "congruence")?;
    let started = Instant::now();
    let poly_echo = format!("{},{}", f.lead, f.constant);

    let (csv, report): (String, serde_json::Value) = match &args.action {
        CongruenceAction::Rho { n } => {
            let n = parse_count(n).context("--n")?;
            let value = rho(&f, n);
            println!("rho({poly_echo}; {n}) = {value}");
            (
                format!("poly,n,rho\n\"{poly_echo}\",{n},{value}\n"),
                serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "action": "rho",
                    "poly": poly_echo,
                    "n": n.to_string(),
                    "rho": value.to_string(),
                }),
            )
        }
        CongruenceAction::Sum { x } => {
            let x = parse_count(x).context("--X")?;
            let value = rho_sum(&f, x);
            let per_x = value as f64 / x as f64;
            let per_x_log = value as f64 / (x as f64 * (x as f64).ln());
            println!(
                "rho_sum({poly_echo}; {x}) = {value}  per X: {per_x:.6}  per X ln X: {per_x_log:.6}"
            );
            (
                format!(
                    "poly,X,rho_sum,per_x,per_x_log_x\n\"{poly_echo}\",{x},{value},{per_x},{per_x_log}\n"
                ),
                serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "action": "sum",
                    "poly": poly_echo,
                    "X": x.to_string(),
                    "rho_sum": value.to_string(),
                    "per_x": per_x,
                    "per_x_log_x": per_x_log,
                }),
            )
        }
        CongruenceAction::Discrepancy { x } => {
            let x = parse_count(x).context("--X")?;
            let fractions = roots_up_to(&f, x).fractions();
            let value = star_discrepancy(&fractions).map_err(keep_engine_error)?;
            let decimal = value.to_f64();
            println!(
                "star discrepancy({poly_echo}; X={x}) = {}/{} = {decimal:.8}",
                value.num(),
                value.den()
            );
            (
                format!(
                    "poly,X,samples,num,den,decimal\n\"{poly_echo}\",{x},{},{},{},{decimal}\n",
                    fractions.len(),
                    value.num(),
                    value.den()
                ),
                serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "action": "discrepancy",
                    "poly": poly_echo,
                    "X": x.to_string(),
                    "samples": fractions.len(),
                    "num": value.num().to_string(),
                    "den": value.den().to_string(),
                    "decimal": decimal,
                }),
            )
        }
        CongruenceAction::Interval { x, lo, hi } => {
            let x = parse_count(x).context("--X")?;
            let lo = parse_rat(lo).context("--lo")?;
            let hi = parse_rat(hi).context("--hi")?;
            if hi <= lo {
                bail!("empty interval: need lo < hi");
            }
            let value = interval_count(&f, x, lo, hi);
            let width = (hi - lo).to_f64();
            let per_xw = value as f64 / (x as f64 * width);
            println!(
                "interval_count({poly_echo}; [{lo}, {hi}), X={x}) = {value}  per X|I|: {per_xw:.6}"
            );
            (
                format!(
                    "poly,X,lo,hi,count,per_x_width\n\"{poly_echo}\",{x},{lo},{hi},{value},{per_xw}\n"
                ),
                serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "action": "interval",
                    "poly": poly_echo,
                    "X": x.to_string(),
                    "lo": lo.to_string(),
                    "hi": hi.to_string(),
                    "count": value.to_string(),
                    "per_x_width": per_xw,
                }),
            )
        }
        CongruenceAction::Central {
            x,
            a,
            theta2,
            theta1,
            g_const,
            g_nodal,
        } => {
            let x = parse_count(x).context("--X")?;
            let a = parse_rat(a).context("--A")?;
            let theta2 = parse_rat(theta2).context("--theta2")?;
            let theta1 = parse_rat(theta1).context("--theta1")?;
            let (g, g_echo) = match g_nodal {
                Some(text) => {
                    let (scale, c) = text
                        .split_once(',')
                        .with_context(|| format!("{text:?} is not of the form scale,c"))?;
                    let scale = parse_rat(scale).context("nodal scale")?;
                    let c = parse_rat(c).context("nodal vertex c")?;
                    let g = GDescriptor::scaled_nodal(scale, c).map_err(keep_engine_error)?;
                    (g, format!("nodal({scale},{c})"))
                }
                None => {
                    let value = parse_rat(g_const).context("--g-const")?;
                    let g = GDescriptor::constant(value).map_err(keep_engine_error)?;
                    (g, format!("const({value})"))
                }
            };
            let value = central_count(&f, &g, a, theta2, theta1, x).map_err(keep_engine_error)?;
            println!(
                "central_count({poly_echo}; G={g_echo}, A={a}, window [{theta2}, {theta1}], X={x}) = {value}"
            );
            (
                format!(
                    "poly,G,A,theta2,theta1,X,count\n\"{poly_echo}\",\"{g_echo}\",{a},{theta2},{theta1},{x},{value}\n"
                ),
                serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "action": "central",
                    "poly": poly_echo,
                    "G": g_echo,
                    "A": a.to_string(),
                    "theta2": theta2.to_string(),
                    "theta1": theta1.to_string(),
                    "X": x.to_string(),
                    "count": value.to_string(),
                }),
            )
        }
    };

    write_atomic(&dir.join("values.csv"), &csv)?;
    write_json(&dir.join("report.json"), &report)?;
    write_manifest(&dir, echo, 1, started.elapsed().as_secs_f64(), Vec::new())?;
    println!("artifacts: {}", dir.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// toric

fn load_fan(args: &ToricArgs) -> Result<Fan> {
    match (&args.surface, &args.fan) {
        (Some(name), None) => builtin_fan(name).map_err(keep_engine_error),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading fan file {}", path.display()))?;
            let spec: FanSpec = serde_json::from_str(&text)
                .with_context(|| format!("parsing fan file {}", path.display()))?;
            Fan::from_spec(spec).map_err(keep_engine_error)
        }
        _ => bail!("exactly one of --surface or --fan is required"),
    }
}

#[derive(Serialize)]
struct ToricReportFile {
    schema: &'static str,
    surface: String,
    action: &'static str,
    /// Zoom factor echo for the admissibility actions.
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<String>,
    maxdeg: i64,
    count: usize,
    /// Coefficient vectors over the fan's rays, one per relation.
    relations: Vec<Vec<i64>>,
    /// Rank of the integer lattice the relations generate (0 when empty).
    rank: usize,
}

fn relation_rows(relations: &[PositiveRelation]) -> Vec<Vec<i64>> {
    relations.iter().map(|rel| rel.coeffs().to_vec()).collect()
}

fn rank_of(relations: &[PositiveRelation]) -> usize {
    if relations.is_empty() {
        0
    } else {
        lr_rank(relations).expect("nonempty relation list has a rank")
    }
}

fn cmd_toric(out_root: &Path, echo: String, args: ToricArgs) -> Result<()> {
    let fan = load_fan(&args)?;
    let dir = create_run_dir(out_root, "toric")?;
    let started = Instant::now();

    let (action, r_echo, maxdeg, relations) = match &args.action {
        ToricAction::Relations { maxdeg } => {
            ("relations", None, *maxdeg, positive_relations(&fan, *maxdeg))
        }
        ToricAction::Irreducible { maxdeg } => (
            "irreducible",
            None,
            *maxdeg,
            irreducible_relations(&fan, *maxdeg),
        ),
        ToricAction::Admissible { r, maxdeg } | ToricAction::Rank { r, maxdeg } => {
            let r = parse_rat(r).context("--r")?;
            if !r.is_positive() {
                bail!("--r must be positive");
            }
            let admissible = admissible_multidegrees(&fan, r, *maxdeg);
            let action = if matches!(args.action, ToricAction::Rank { .. }) {
                "rank"
            } else {
                "admissible"
            };
            (action, Some(r.to_string()), *maxdeg, admissible)
        }
    };
    let rank = rank_of(&relations);

    let mut summary = format!(
        "{action}({}) maxdeg {maxdeg}: {} relations, rank {rank}",
        fan.name(),
        relations.len()
    );
    if let Some(r) = &r_echo {
        write!(summary, ", r = {r}").unwrap();
    }
    println!("{summary}");
    for rel in &relations {
        println!("  degree {:>2}: {:?}", rel.degree(), rel.coeffs());
    }

    let report = ToricReportFile {
        schema: REPORT_SCHEMA,
        surface: fan.name().to_string(),
        action,
        r: r_echo,
        maxdeg,
        count: relations.len(),
        relations: relation_rows(&relations),
        rank,
    };
    write_json(&dir.join("report.json"), &report)?;
    write_manifest(&dir, echo, 1, started.elapsed().as_secs_f64(), Vec::new())?;
    println!("artifacts: {}", dir.display());
    Ok(())
}
