//! `fareylab`: exact Farey-group computations and matrix random walks from
//! the command line.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a resource cap is
//! exceeded, 1 on I/O failure.

pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use farey_orbits::farey::{self, DEFAULT_LEVEL_CAP};
use farey_orbits::group::{sphere_size, Sphere, DEFAULT_SPHERE_CAP};
use farey_orbits::minkowski::{self, Dyadic};
use farey_orbits::orbit;
use farey_orbits::{Arc, ExtRational};
use farey_walk::{
    angular_ecdf, clt_check, estimate_lyapunov, ks_distance, radial_profile,
    run_ensemble_with_workers, CltReport, EnsembleStats, Reference, WalkConfig, WalkError,
    WalkMeasure,
};

use output::{float_cell, write_output, Format, RunManifest, Table};

pub const DEFAULT_WALK_CAP: u64 = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "fareylab", version, about = "Farey sequences, Minkowski's ? function, the Farey group and its random walks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mediant-interleaved Farey sequences
    #[command(subcommand)]
    Farey(FareyCmd),
    /// Minkowski's question-mark function and its extension to the line
    #[command(subcommand)]
    Mink(MinkCmd),
    /// Word-metric spheres of the Farey group
    #[command(subcommand)]
    Group(GroupCmd),
    /// Exact orbit statistics
    #[command(subcommand)]
    Orbit(OrbitCmd),
    /// Monte Carlo random matrix products
    #[command(subcommand)]
    Walk(WalkCmd),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write machine output here (relative to $FAREYLAB_OUT_DIR if set)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine output format; without --out the table is printed to stdout
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum FareyCmd {
    /// Print the terms of the level-n sequence, one per line
    Seq {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_LEVEL_CAP)]
        cap: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Level at which p and q first become neighbours, or "none"
    PairLevel { p: ExtRational, q: ExtRational },
}

#[derive(Debug, Args)]
struct FloatFlag {
    /// Also print a decimal approximation
    #[arg(long)]
    float: bool,
}

#[derive(Debug, Subcommand)]
enum MinkCmd {
    /// ?(x) for x in [0, 1]
    Eval {
        x: ExtRational,
        #[command(flatten)]
        float: FloatFlag,
    },
    /// The extended function on the whole line
    Mbar {
        x: ExtRational,
        #[command(flatten)]
        float: FloatFlag,
    },
    /// Mass of an arc start..end (wrapping through 1/0 when start > end)
    Measure {
        arc: Arc,
        #[command(flatten)]
        float: FloatFlag,
    },
    /// The rational with ?(x) = k/2^n
    Inverse {
        d: Dyadic,
        #[command(flatten)]
        float: FloatFlag,
    },
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    /// Elements of word length exactly n
    Sphere {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        count_only: bool,
        #[arg(long, default_value_t = DEFAULT_SPHERE_CAP)]
        cap: u32,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
enum OrbitCmd {
    /// Sphere counts in an arc, normalized, against their limit
    Limit {
        #[arg(long)]
        arc: Arc,
        #[arg(long, default_value = "0")]
        base: ExtRational,
        #[arg(long)]
        nmax: u32,
        #[arg(long, default_value_t = DEFAULT_SPHERE_CAP)]
        cap: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Both sides of the one-step stationarity identity for an arc
    Stationarity {
        #[arg(long)]
        arc: Arc,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Distribution function of the n-step walk from x0 at the given points
    Convolution {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "0")]
        x0: ExtRational,
        /// File with one rational per line (default: the 17 terms of level 4)
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SPHERE_CAP)]
        cap: u32,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, Debug)]
struct Vec2([f64; 2]);

impl std::str::FromStr for Vec2 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s.split_once(',').ok_or("expected x,y")?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
        Ok(Vec2([p(x)?, p(y)?]))
    }
}

#[derive(Clone, Copy, Debug)]
struct Window(f64, f64);

impl std::str::FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or("expected lo..hi")?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
        Ok(Window(p(a)?, p(b)?))
    }
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    /// JSON measure file (default: uniform on the Farey generators)
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long, default_value_t = 120)]
    steps: u32,
    #[arg(long, default_value_t = 100_000)]
    walks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base vector as x,y
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    x0: Vec2,
    /// Worker threads (output does not depend on this)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_WALK_CAP)]
    max_walks: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum RefArg {
    /// ? on [0, 1]; directions outside [0, 1] are dropped first
    Mink,
    /// ?̄ on the whole line
    Mbar,
}

#[derive(Debug, Subcommand)]
enum WalkCmd {
    /// Simulate and write per-walk log radius and direction
    Run {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Estimated top Lyapunov exponent and CLT scale
    Lyapunov {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Histogram of log radii shifted by alpha·n
    Radial {
        #[command(flatten)]
        ens: EnsembleArgs,
        /// Shift rate (default: the estimated exponent)
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Use this exponent instead of the ensemble estimate
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 16)]
        bins: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Direction distribution against ? or ?̄
    Angular {
        #[command(flatten)]
        ens: EnsembleArgs,
        /// Keep only walks with radius in lo..hi
        #[arg(long)]
        window: Option<Window>,
        #[arg(long, value_enum, default_value_t = RefArg::Mbar)]
        reference: RefArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Standardized log radii against the standard normal
    Clt {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Cap(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Cap(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<farey_orbits::Error> for CliError {
    fn from(e: farey_orbits::Error) -> Self {
        match e {
            farey_orbits::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Pool(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a subcommand produced: lines for people, and optionally a table.
struct Report {
    summary: Vec<String>,
    table: Option<Table>,
    seed: Option<u64>,
}

impl Report {
    fn lines(summary: Vec<String>) -> Self {
        Self {
            summary,
            table: None,
            seed: None,
        }
    }
}

/// Parses `args` (including the binary name), runs the command and prints
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let argv: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli.command, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn subcommand_name(argv: &[String]) -> String {
    argv.iter()
        .take_while(|a| !a.starts_with('-'))
        .take(2)
        .cloned()
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(command: Command, argv: &[String]) -> CliResult<()> {
    let start = Instant::now();
    let (report, out) = match command {
        Command::Farey(c) => farey_cmd(c)?,
        Command::Mink(c) => (mink_cmd(c)?, None),
        Command::Group(c) => group_cmd(c)?,
        Command::Orbit(c) => orbit_cmd(c)?,
        Command::Walk(c) => walk_cmd(c)?,
    };
    let table_out = out.zip(report.table.as_ref());
    match table_out {
        Some((OutArgs { out: Some(path), format }, table)) => {
            let format = format.unwrap_or(Format::Csv);
            let manifest = RunManifest::new(
                &subcommand_name(argv),
                argv,
                report.seed,
                start.elapsed().as_millis(),
            );
            let written = write_output(&path, table, format, &manifest)?;
            for line in &report.summary {
                println!("{line}");
            }
            println!(
                "wrote {} rows to {} (manifest {})",
                table.rows.len(),
                written.display(),
                manifest.hash
            );
        }
        Some((OutArgs { out: None, format: Some(format) }, table)) => {
            print!("{}", table.render(format));
        }
        _ => {
            for line in &report.summary {
                println!("{line}");
            }
        }
    }
    Ok(())
}

fn with_float(exact: String, value: f64, float: &FloatFlag) -> String {
    if float.float {
        format!("{exact} ≈ {value}")
    } else {
        exact
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn farey_cmd(c: FareyCmd) -> CliResult<(Report, Option<OutArgs>)> {
    Ok(match c {
        FareyCmd::Seq { level, cap, out } => {
            let seq = farey::farey_sequence_capped(level, cap)?;
            let mut table = Table::new(&["term"]);
            for t in seq.terms() {
                table.push(vec![t.to_string()]);
            }
            let summary = seq.terms().iter().map(|t| t.to_string()).collect();
            let report = Report {
                summary,
                table: Some(table),
                seed: None,
            };
            (report, Some(out))
        }
        FareyCmd::PairLevel { p, q } => {
            let level = farey::farey_pair_level(&p, &q)?;
            let line = level.map_or_else(|| "none".to_string(), |n| n.to_string());
            (Report::lines(vec![line]), None)
        }
    })
}

fn mink_cmd(c: MinkCmd) -> CliResult<Report> {
    let line = match c {
        MinkCmd::Eval { x, float } => {
            let d = minkowski::question_mark(&x)?;
            with_float(d.to_string(), d.to_f64(), &float)
        }
        MinkCmd::Mbar { x, float } => {
            let v = minkowski::mbar(&x)?;
            with_float(v.to_string(), ratio_f64(&v), &float)
        }
        MinkCmd::Measure { arc, float } => {
            let v = minkowski::measure_arc(&arc)?;
            with_float(v.to_string(), ratio_f64(&v), &float)
        }
        MinkCmd::Inverse { d, float } => {
            let x = minkowski::question_mark_inverse(&d)?;
            with_float(x.to_string(), x.to_f64(), &float)
        }
    };
    Ok(Report::lines(vec![line]))
}

fn group_cmd(c: GroupCmd) -> CliResult<(Report, Option<OutArgs>)> {
    let GroupCmd::Sphere {
        n,
        count_only,
        cap,
        out,
    } = c;
    if count_only {
        let count = Sphere::with_cap(n, cap)?.count() as u64;
        debug_assert_eq!(count, sphere_size(n));
        return Ok((Report::lines(vec![count.to_string()]), None));
    }
    let mut table = Table::new(&["word", "a", "b", "c", "d", "v0", "v1", "v2"]);
    let mut summary = Vec::new();
    for g in Sphere::with_cap(n, cap)? {
        let word = g.cached_word().expect("sphere words").to_string();
        let tile = g.tile();
        summary.push(format!("{word}\t{}\t{tile}", g.matrix()));
        let mut row = vec![word];
        row.extend(g.matrix().entries().iter().map(|e| e.to_string()));
        row.extend(tile.vertices().iter().map(|v| v.to_string()));
        table.push(row);
    }
    let report = Report {
        summary,
        table: Some(table),
        seed: None,
    };
    Ok((report, Some(out)))
}

fn read_points(path: &PathBuf) -> CliResult<Vec<ExtRational>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<ExtRational>().map_err(CliError::from))
        .collect()
}

fn orbit_cmd(c: OrbitCmd) -> CliResult<(Report, Option<OutArgs>)> {
    Ok(match c {
        OrbitCmd::Limit {
            arc,
            base,
            nmax,
            cap,
            out,
        } => {
            let lt = orbit::word_limit_table_capped(&arc, &base, nmax, cap)?;
            let mut table = Table::new(&["n", "count", "ratio_num", "ratio_den", "target"]);
            let mut summary = vec![format!("arc {} base {} target {}", lt.arc, lt.base, lt.target)];
            for r in &lt.rows {
                table.push(vec![
                    r.n.to_string(),
                    r.count.to_string(),
                    r.ratio.numer().to_string(),
                    r.ratio.denom().to_string(),
                    lt.target.to_string(),
                ]);
                let err = (&r.ratio - &lt.target).abs();
                summary.push(format!(
                    "n={:<3} count={:<8} ratio={} (error {:.3e})",
                    r.n,
                    r.count,
                    r.ratio,
                    ratio_f64(&err)
                ));
            }
            let report = Report {
                summary,
                table: Some(table),
                seed: None,
            };
            (report, Some(out))
        }
        OrbitCmd::Stationarity { arc, out } => {
            let (lhs, rhs) = orbit::stationarity_check(&arc)?;
            let equal = lhs == rhs;
            let mut table = Table::new(&["arc", "lhs", "rhs", "equal"]);
            table.push(vec![arc.to_string(), lhs.to_string(), rhs.to_string(), equal.to_string()]);
            let summary = vec![
                format!("lhs = {lhs}"),
                format!("rhs = {rhs}"),
                if equal { "equal" } else { "NOT equal" }.to_string(),
            ];
            let report = Report {
                summary,
                table: Some(table),
                seed: None,
            };
            (report, Some(out))
        }
        OrbitCmd::Convolution {
            n,
            x0,
            points,
            cap,
            out,
        } => {
            let points = match &points {
                Some(p) => read_points(p)?,
                None => farey::farey_sequence(4)?.terms().to_vec(),
            };
            let cdf = orbit::convolution_cdf_capped(n, &x0, &points, cap)?;
            let mut table = Table::new(&["t", "cdf", "mbar", "difference"]);
            let mut sup = BigRational::default();
            for (t, f) in points.iter().zip(&cdf) {
                let m = minkowski::mbar(t)?;
                let diff = f - &m;
                if diff.abs() > sup {
                    sup = diff.abs();
                }
                table.push(vec![t.to_string(), f.to_string(), m.to_string(), diff.to_string()]);
            }
            let mut summary: Vec<String> = table
                .rows
                .iter()
                .map(|r| format!("F({}) = {}  ?̄ = {}", r[0], r[1], r[2]))
                .collect();
            summary.push(format!("sup |F − ?̄| = {sup} ≈ {:.6}", ratio_f64(&sup)));
            let report = Report {
                summary,
                table: Some(table),
                seed: None,
            };
            (report, Some(out))
        }
    })
}

fn ensemble(args: &EnsembleArgs) -> CliResult<EnsembleStats> {
    if args.walks > args.max_walks {
        return Err(CliError::Cap(format!(
            "walks {} exceeds the configured cap of {}",
            args.walks, args.max_walks
        )));
    }
    let measure = match &args.measure {
        Some(path) => WalkMeasure::from_json(&std::fs::read_to_string(path)?)?,
        None => WalkMeasure::farey(),
    };
    let config = WalkConfig {
        steps: args.steps,
        walks: args.walks,
        seed: args.seed,
        x0: args.x0.0,
    };
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    Ok(run_ensemble_with_workers(&measure, &config, workers)?)
}

fn walk_cmd(c: WalkCmd) -> CliResult<(Report, Option<OutArgs>)> {
    let (WalkCmd::Run { ens, .. }
    | WalkCmd::Lyapunov { ens, .. }
    | WalkCmd::Radial { ens, .. }
    | WalkCmd::Angular { ens, .. }
    | WalkCmd::Clt { ens, .. }) = &c;
    let seed = ens.seed;
    let stats = ensemble(ens)?;
    let ly = estimate_lyapunov(&stats)?;
    let header = format!(
        "walks={} steps={} seed={} lambda={:.6} s={:.6}",
        stats.config.walks, stats.config.steps, seed, ly.lambda, ly.s
    );
    let (mut summary, table, out) = match c {
        WalkCmd::Run { out, .. } => {
            let mut table = Table::new(&["walk_id", "log_radius", "direction"]);
            for (i, r) in stats.records.iter().enumerate() {
                table.push(vec![i.to_string(), float_cell(r.log_radius), float_cell(r.direction)]);
            }
            (vec![], table, out)
        }
        WalkCmd::Lyapunov { out, .. } => {
            let mut table = Table::new(&["steps", "walks", "lambda", "s"]);
            table.push(vec![
                stats.config.steps.to_string(),
                stats.config.walks.to_string(),
                float_cell(ly.lambda),
                float_cell(ly.s),
            ]);
            (vec![], table, out)
        }
        WalkCmd::Radial {
            alpha,
            lambda,
            lo,
            hi,
            bins,
            out,
            ..
        } => {
            let lambda = lambda.unwrap_or(ly.lambda);
            let alpha = alpha.unwrap_or(lambda);
            let p = radial_profile(&stats, alpha, lo, hi, bins)?;
            let mut table = Table::new(&["bin_lo", "bin_hi", "count", "mass"]);
            let mut summary = Vec::new();
            for (i, w) in p.edges.windows(2).enumerate() {
                table.push(vec![
                    float_cell(w[0]),
                    float_cell(w[1]),
                    p.counts[i].to_string(),
                    float_cell(p.mass[i]),
                ]);
                summary.push(format!("[{:+.3}, {:+.3}) {:>8} {:.6}", w[0], w[1], p.counts[i], p.mass[i]));
            }
            summary.push(format!("alpha = {alpha}"));
            match p.slope {
                Some(s) => summary.push(format!(
                    "fitted log-density slope {s:.4}, predicted (lambda − alpha)/s² = {:.4}",
                    (lambda - alpha) / ly.s.powi(2)
                )),
                None => summary.push("fitted slope unavailable (fewer than two occupied bins)".into()),
            }
            if let Some(w) = p.warning {
                eprintln!("warning: {w}");
            }
            (summary, table, out)
        }
        WalkCmd::Angular {
            window,
            reference,
            out,
            ..
        } => {
            let mut ecdf = angular_ecdf(&stats, window.map(|w| (w.0, w.1)))?;
            let reference = match reference {
                RefArg::Mink => {
                    ecdf = ecdf.restrict(0.0, 1.0);
                    if ecdf.len() < farey_walk::stats::MIN_ANGULAR_SAMPLES {
                        return Err(WalkError::TooFewSamples {
                            count: ecdf.len(),
                            needed: farey_walk::stats::MIN_ANGULAR_SAMPLES,
                        }
                        .into());
                    }
                    Reference::Minkowski
                }
                RefArg::Mbar => Reference::MinkowskiExtended,
            };
            let ks = ks_distance(&ecdf, |x| reference.cdf(x));
            let mut table = Table::new(&["quantile", "direction", "ecdf", "reference"]);
            for k in 1..100 {
                let idx = (k * ecdf.len() / 100).min(ecdf.len() - 1);
                let x = ecdf.samples()[idx];
                table.push(vec![
                    float_cell(k as f64 / 100.0),
                    float_cell(x),
                    float_cell(ecdf.value(x)),
                    float_cell(reference.cdf(x)),
                ]);
            }
            let summary = vec![
                format!("{} directions", ecdf.len()),
                format!("KS distance to {reference:?} = {ks:.5}"),
            ];
            (summary, table, out)
        }
        WalkCmd::Clt { out, .. } => {
            let mut table = Table::new(&["p", "empirical", "normal", "error"]);
            let summary = match clt_check(&stats)? {
                CltReport::Degenerate => vec!["degenerate (deterministic radial growth)".to_string()],
                CltReport::Normal { ks, deciles, .. } => {
                    for d in &deciles {
                        table.push(vec![
                            float_cell(d.p),
                            float_cell(d.empirical),
                            float_cell(d.normal),
                            float_cell(d.error()),
                        ]);
                    }
                    let worst = deciles.iter().fold(0.0f64, |m, d| m.max(d.error().abs()));
                    vec![
                        format!("KS distance to N(0, 1) = {ks:.5}"),
                        format!("largest decile error = {worst:.5}"),
                    ]
                }
            };
            (summary, table, out)
        }
    };
    summary.insert(0, header);
    let report = Report {
        summary,
        table: Some(table),
        seed: Some(seed),
    };
    Ok((report, Some(out)))
}
