//! Experiment harness: runs suites of trace configurations, collects error
//! metrics, and serializes voxel sequences and reports.

use crate::curve::{CylCurveParams, ParametricCurve, DEFAULT_FD_STEP};
use crate::distance::{DistanceConfig, Variant};
use crate::error::{Error, Result};
use crate::grid::{Grid, VoxelIndex};
use crate::tracer::{trace, verify_against_oracle, TangentMode, TraceConfig, TraceResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};
use std::time::Instant;

/// Tracing headroom used by the built-in suite: the built-in curve crests
/// slightly above the nominal volume (peak height offset + 2x amplitude),
/// so the tracing grid extends past the reported resolution.
pub const BUILTIN_GRID_MARGIN: u32 = 8;

/// Default sample count of the per-voxel oracle verification scan.
pub const DEFAULT_ORACLE_SAMPLES: usize = 2048;

/// Samples of the curve-in-volume check run before each trace.
pub const VOLUME_CHECK_SAMPLES: usize = 4096;

/// One cell of an experiment matrix: a curve, a grid, and the estimator
/// and tangent-mode selection for a single trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Nominal grid resolution reported for the run.
    pub resolution: u32,
    pub curve: CylCurveParams,
    pub distance: DistanceConfig,
    pub tangent_mode: TangentMode,
    pub fd_step: f64,
    /// Extra voxels of tracing headroom beyond the nominal resolution.
    pub grid_margin: u32,
    /// Sample count of the oracle verification; 0 skips verification.
    pub oracle_samples: usize,
    /// Trace step budget; 0 means 64 steps per grid cell.
    pub max_steps: usize,
}

impl ExperimentConfig {
    /// Built-in configuration: the reference curve for `resolution` at the
    /// given frequency, analytic tangent, adaptive windows.
    pub fn reference(resolution: u32, omega: f64, variant: Variant) -> Self {
        ExperimentConfig {
            resolution,
            curve: CylCurveParams::reference(resolution, omega),
            distance: DistanceConfig::new(variant),
            tangent_mode: TangentMode::Analytic,
            fd_step: DEFAULT_FD_STEP,
            grid_margin: BUILTIN_GRID_MARGIN,
            oracle_samples: DEFAULT_ORACLE_SAMPLES,
            max_steps: 0,
        }
    }

    pub fn omega(&self) -> f64 {
        self.curve.omega
    }

    pub fn variant(&self) -> Variant {
        self.distance.variant
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::reference(128, 2.0, Variant::V3)
    }
}

/// Measured outputs of one experiment cell. Metric fields are absent when
/// the run failed; `status` is "ok" or the error text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub config: ExperimentConfig,
    pub n_voxels: Option<usize>,
    pub eps_max: Option<f64>,
    pub eps_av: Option<f64>,
    pub oracle_max: Option<f64>,
    pub oracle_min_slack: Option<f64>,
    pub oracle_mean_slack: Option<f64>,
    pub violations: Option<usize>,
    pub wall_time_s: Option<f64>,
    pub status: String,
}

impl ExperimentRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn run_config(config: &ExperimentConfig) -> Result<(TraceResult, ParametricCurve, Grid)> {
    let grid = Grid::new(config.resolution.saturating_add(config.grid_margin))?;
    let curve = ParametricCurve::cylindrical(config.curve)?;
    curve.check_in_volume(&grid, VOLUME_CHECK_SAMPLES)?;
    let mut tc = TraceConfig::new(grid);
    tc.tangent_mode = config.tangent_mode;
    tc.fd_step = config.fd_step;
    tc.distance = config.distance;
    if config.max_steps > 0 {
        tc.max_steps = config.max_steps;
    }
    let result = trace(&curve, &tc)?;
    Ok((result, curve, grid))
}

/// Runs one experiment cell. Errors are captured into the row status, not
/// propagated.
pub fn run_row(config: &ExperimentConfig) -> ExperimentRow {
    let started = Instant::now();
    let outcome = run_config(config);
    let mut row = ExperimentRow {
        config: config.clone(),
        n_voxels: None,
        eps_max: None,
        eps_av: None,
        oracle_max: None,
        oracle_min_slack: None,
        oracle_mean_slack: None,
        violations: None,
        wall_time_s: None,
        status: String::new(),
    };
    match outcome {
        Ok((result, curve, _)) => {
            row.n_voxels = Some(result.n_voxels());
            row.eps_max = Some(result.eps_max);
            row.eps_av = Some(result.eps_av);
            row.violations = Some(result.adjacency_violations.len());
            if config.oracle_samples > 0 {
                let report = verify_against_oracle(&curve, &result, config.oracle_samples);
                row.oracle_max = Some(report.oracle_max);
                row.oracle_min_slack = Some(report.min_slack);
                row.oracle_mean_slack = Some(report.mean_slack);
            }
            row.status = "ok".into();
        }
        Err(e) => row.status = e.to_string(),
    }
    row.wall_time_s = Some(started.elapsed().as_secs_f64());
    row
}

/// Runs every cell of a suite. Rows come back in input order regardless of
/// how the cells were scheduled.
pub fn run_suite(suite: &[ExperimentConfig]) -> Vec<ExperimentRow> {
    suite.par_iter().map(run_row).collect()
}

/// The built-in 12-cell suite: resolutions 128 and 256, frequencies 2 and
/// 4, all three estimator variants, analytic tangent.
pub fn builtin_suite() -> Vec<ExperimentConfig> {
    let mut suite = Vec::new();
    for resolution in [128, 256] {
        for omega in [2.0, 4.0] {
            for variant in [Variant::V1, Variant::V2, Variant::V3] {
                suite.push(ExperimentConfig::reference(resolution, omega, variant));
            }
        }
    }
    suite
}

/// Reads a suite from a JSON list of configuration records. Missing fields
/// take their built-in defaults.
pub fn load_suite(reader: impl Read) -> Result<Vec<ExperimentConfig>> {
    serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes a voxel sequence as newline-delimited "i j l" records.
pub fn emit_voxels(sequence: &[VoxelIndex], w: &mut impl Write) -> Result<()> {
    for v in sequence {
        writeln!(w, "{} {} {}", v.i, v.j, v.l)?;
    }
    Ok(())
}

/// Parses a voxel list in the format written by [`emit_voxels`].
pub fn parse_voxels(reader: impl BufRead) -> Result<Vec<VoxelIndex>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::Parse(format!("line {}: bad index '{s}'", idx + 1)))
        };
        match fields.as_slice() {
            [i, j, l] => out.push(VoxelIndex::new(parse(i)?, parse(j)?, parse(l)?)),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 fields, got {}",
                    idx + 1,
                    fields.len()
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn fmt_omega(omega: f64) -> String {
    if omega.fract() == 0.0 && omega.abs() < 1e15 {
        format!("{}", omega as i64)
    } else {
        format!("{omega}")
    }
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes rows as CSV. The wall-time column is appended only when timing
/// is requested, so reports meant for byte comparison stay reproducible.
pub fn emit_report_csv(
    rows: &[ExperimentRow],
    w: &mut impl Write,
    include_timing: bool,
) -> Result<()> {
    let mut header = String::from(
        "resolution,omega,variant,tangent,n_voxels,eps_max,eps_av,oracle_max,violations,status",
    );
    if include_timing {
        header.push_str(",wall_time");
    }
    writeln!(w, "{header}")?;
    for row in rows {
        let mut fields = vec![
            row.config.resolution.to_string(),
            fmt_omega(row.config.omega()),
            row.config.variant().label().to_string(),
            row.config.tangent_mode.label().to_string(),
            row.n_voxels.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt_f64(row.eps_max),
            fmt_opt_f64(row.eps_av),
            fmt_opt_f64(row.oracle_max),
            row.violations.map(|n| n.to_string()).unwrap_or_default(),
            csv_field(&row.status),
        ];
        if include_timing {
            fields.push(fmt_opt_f64(row.wall_time_s));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Writes rows as a JSON document carrying the same fields with the full
/// configuration echo nested per row.
pub fn emit_report_json(
    rows: &[ExperimentRow],
    w: &mut impl Write,
    include_timing: bool,
) -> Result<()> {
    let doc: Vec<ExperimentRow> = rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            if !include_timing {
                r.wall_time_s = None;
            }
            r
        })
        .collect();
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

pub fn emit_report(
    rows: &[ExperimentRow],
    w: &mut impl Write,
    format: ReportFormat,
    include_timing: bool,
) -> Result<()> {
    match format {
        ReportFormat::Csv => emit_report_csv(rows, w, include_timing),
        ReportFormat::Json => emit_report_json(rows, w, include_timing),
    }
}
