//! Command-line surface: trace a curve to a voxel list, run experiment
//! suites into CSV/JSON reports, and verify voxel lists against the
//! brute-force oracle.

use clap::{Args, Parser, Subcommand};
use curvox::{
    builtin_suite, emit_report_csv, emit_report_json, emit_voxels, load_suite, oracle_nearest,
    parse_voxels, run_suite, trace, verify_against_oracle, CylCurveParams, ExperimentConfig,
    ExperimentRow, Grid, ParametricCurve, TangentMode, TraceConfig, Variant, HALF_DIAGONAL,
};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "curvox", version, about = "Voxelize parametric space curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace one curve and write its voxel sequence
    Trace(TraceArgs),
    /// Run an experiment suite and write a metrics report
    Experiment(ExperimentArgs),
    /// Check a voxel list against a curve with the brute-force oracle
    Verify(VerifyArgs),
}

/// Curve selection shared by `trace` and `verify`: the built-in curve for
/// a resolution and frequency, with optional per-field overrides.
#[derive(Args)]
struct CurveArgs {
    /// Nominal grid resolution
    #[arg(long, default_value_t = 128)]
    resolution: u32,
    /// Height-profile frequency of the built-in curve
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    omega: f64,
    /// Base-circle radius override
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Height amplitude override
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Axis x offset override
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Axis y offset override
    #[arg(long, allow_negative_numbers = true)]
    y0: Option<f64>,
    /// Base height override
    #[arg(long, allow_negative_numbers = true)]
    z0: Option<f64>,
    /// Parameter range start, radians
    #[arg(long, allow_negative_numbers = true)]
    phi_min: Option<f64>,
    /// Parameter range end, radians
    #[arg(long, allow_negative_numbers = true)]
    phi_max: Option<f64>,
}

impl CurveArgs {
    fn params(&self) -> CylCurveParams {
        let mut p = CylCurveParams::reference(self.resolution, self.omega);
        if let Some(v) = self.r {
            p.r = v;
        }
        if let Some(v) = self.a {
            p.a = v;
        }
        if let Some(v) = self.x0 {
            p.x0 = v;
        }
        if let Some(v) = self.y0 {
            p.y0 = v;
        }
        if let Some(v) = self.z0 {
            p.z0 = v;
        }
        if let Some(v) = self.phi_min {
            p.phi_min = v;
        }
        if let Some(v) = self.phi_max {
            p.phi_max = v;
        }
        p
    }
}

fn parse_variant(s: &str) -> curvox::Result<Variant> {
    s.parse()
}

fn parse_tangent(s: &str) -> curvox::Result<TangentMode> {
    s.parse()
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Distance estimator: v1, v2, or v3
    #[arg(long, default_value = "v3", value_parser = parse_variant)]
    variant: Variant,
    /// Tangent source: analytic or fd
    #[arg(long, default_value = "analytic", value_parser = parse_tangent)]
    tangent: TangentMode,
    /// Finite-difference tangent step
    #[arg(long, default_value_t = curvox::curve::DEFAULT_FD_STEP)]
    fd_step: f64,
    /// Tracing headroom beyond the nominal resolution
    #[arg(long, default_value_t = curvox::experiment::BUILTIN_GRID_MARGIN)]
    grid_margin: u32,
    /// Step budget; 0 means 64 steps per grid cell
    #[arg(long, default_value_t = 0)]
    max_steps: usize,
    /// Verify the trace against the oracle with this many scan samples
    #[arg(long, default_value_t = 0)]
    oracle_samples: usize,
    /// Voxel list destination; "-" is stdout
    #[arg(long, default_value = "-")]
    out: String,
    /// Also write a one-row CSV report here
    #[arg(long)]
    report: Option<PathBuf>,
    /// Suppress the wall-time column of the report
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON suite file; omitted runs the built-in 12-cell suite
    #[arg(long)]
    suite: Option<PathBuf>,
    /// CSV report destination; "-" is stdout
    #[arg(long, default_value = "-")]
    csv: String,
    /// Also write the JSON report here
    #[arg(long)]
    json: Option<PathBuf>,
    /// Suppress the wall-time column for byte-comparable reports
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Voxel list to check; "-" is stdin
    #[arg(long, default_value = "-")]
    voxels: String,
    /// Oracle scan sample count
    #[arg(long, default_value_t = curvox::experiment::DEFAULT_ORACLE_SAMPLES)]
    samples: usize,
}

/// Opens `path` for writing, with "-" meaning stdout.
fn sink(path: &str) -> curvox::Result<Box<dyn Write>> {
    Ok(match path {
        "-" => Box::new(io::stdout().lock()),
        p => Box::new(BufWriter::new(File::create(p)?)),
    })
}

fn source(path: &str) -> curvox::Result<Box<dyn Read>> {
    Ok(match path {
        "-" => Box::new(io::stdin().lock()),
        p => Box::new(File::open(p)?),
    })
}

fn run_trace(args: &TraceArgs) -> curvox::Result<ExitCode> {
    let started = Instant::now();
    let config = ExperimentConfig {
        resolution: args.curve.resolution,
        curve: args.curve.params(),
        distance: curvox::DistanceConfig::new(args.variant),
        tangent_mode: args.tangent,
        fd_step: args.fd_step,
        grid_margin: args.grid_margin,
        oracle_samples: args.oracle_samples,
        max_steps: args.max_steps,
    };
    let grid = Grid::new(config.resolution.saturating_add(config.grid_margin))?;
    let curve = ParametricCurve::cylindrical(config.curve)?;
    curve.check_in_volume(&grid, curvox::experiment::VOLUME_CHECK_SAMPLES)?;
    let mut tc = TraceConfig::new(grid);
    tc.tangent_mode = config.tangent_mode;
    tc.fd_step = config.fd_step;
    tc.distance = config.distance;
    if config.max_steps > 0 {
        tc.max_steps = config.max_steps;
    }
    let result = trace(&curve, &tc)?;

    let mut row = ExperimentRow {
        config: config.clone(),
        n_voxels: Some(result.n_voxels()),
        eps_max: Some(result.eps_max),
        eps_av: Some(result.eps_av),
        oracle_max: None,
        oracle_min_slack: None,
        oracle_mean_slack: None,
        violations: Some(result.adjacency_violations.len()),
        wall_time_s: None,
        status: "ok".into(),
    };
    if config.oracle_samples > 0 {
        let report = verify_against_oracle(&curve, &result, config.oracle_samples);
        row.oracle_max = Some(report.oracle_max);
        row.oracle_min_slack = Some(report.min_slack);
        row.oracle_mean_slack = Some(report.mean_slack);
    }
    row.wall_time_s = Some(started.elapsed().as_secs_f64());

    let mut out = sink(&args.out)?;
    emit_voxels(&result.sequence, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.report {
        let mut w = BufWriter::new(File::create(path)?);
        emit_report_csv(std::slice::from_ref(&row), &mut w, !args.no_timing)?;
        w.flush()?;
    }
    eprintln!(
        "traced {} voxels ({}): eps_max {:.6}, eps_av {:.6}, adjacency violations {}{}",
        result.n_voxels(),
        if result.closed { "closed loop" } else { "open" },
        result.eps_max,
        result.eps_av,
        result.adjacency_violations.len(),
        row.oracle_max
            .map(|m| format!(", oracle max {m:.6}"))
            .unwrap_or_default(),
    );
    Ok(ExitCode::SUCCESS)
}

fn run_experiment(args: &ExperimentArgs) -> curvox::Result<ExitCode> {
    let suite = match &args.suite {
        Some(path) => load_suite(BufReader::new(File::open(path)?))?,
        None => builtin_suite(),
    };
    let rows = run_suite(&suite);
    let mut out = sink(&args.csv)?;
    emit_report_csv(&rows, &mut out, !args.no_timing)?;
    out.flush()?;
    if let Some(path) = &args.json {
        let mut w = BufWriter::new(File::create(path)?);
        emit_report_json(&rows, &mut w, !args.no_timing)?;
        w.flush()?;
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> curvox::Result<ExitCode> {
    let curve = ParametricCurve::cylindrical(args.curve.params())?;
    let voxels = parse_voxels(BufReader::new(source(&args.voxels)?))?;
    let mut max_dist: f64 = 0.0;
    let mut sum = 0.0;
    let mut over = 0usize;
    for (k, v) in voxels.iter().enumerate() {
        let d = oracle_nearest(&curve, v.center(), args.samples).dist;
        max_dist = max_dist.max(d);
        sum += d;
        if d > HALF_DIAGONAL {
            over += 1;
            println!(
                "voxel {k} ({} {} {}): distance {d:.6} exceeds {HALF_DIAGONAL:.6}",
                v.i, v.j, v.l
            );
        }
    }
    let n = voxels.len();
    let mean = if n > 0 { sum / n as f64 } else { 0.0 };
    println!("checked {n} voxels: max {max_dist:.6}, mean {mean:.6}, over threshold {over}");
    Ok(if over == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Trace(args) => run_trace(args),
        Cmd::Experiment(args) => run_experiment(args),
        Cmd::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
