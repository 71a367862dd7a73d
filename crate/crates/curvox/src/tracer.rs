//! The voxelization loop: walks a 26-connected voxel sequence along a
//! curve, selecting each step by minimum estimated center-to-curve distance.

use crate::advance::{build_step_matrix, candidates};
use crate::curve::{ParametricCurve, Tangent, DEFAULT_FD_STEP};
use crate::distance::{estimate, oracle_nearest, DistanceConfig, DistanceResult};
use crate::error::{Error, Result};
use crate::grid::{Grid, VoxelIndex, HALF_DIAGONAL};
use serde::{Deserialize, Serialize};

/// Endpoint separation below which a curve counts as closed.
pub const CLOSURE_TOL: f64 = 1e-9;

/// How the curve tangent is obtained at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentMode {
    #[default]
    Analytic,
    FiniteDifference,
}

impl TangentMode {
    pub fn label(self) -> &'static str {
        match self {
            TangentMode::Analytic => "analytic",
            TangentMode::FiniteDifference => "finite_difference",
        }
    }
}

impl std::fmt::Display for TangentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for TangentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<TangentMode> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(TangentMode::Analytic),
            "fd" | "finite_difference" | "finite-difference" => Ok(TangentMode::FiniteDifference),
            other => Err(Error::Parse(format!("unknown tangent mode '{other}'"))),
        }
    }
}

/// Configuration of one trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    pub grid: Grid,
    pub tangent_mode: TangentMode,
    /// Step of the finite-difference tangent.
    pub fd_step: f64,
    pub distance: DistanceConfig,
    pub max_steps: usize,
}

impl TraceConfig {
    /// Defaults: analytic tangent, adaptive variant-3 distance, and a step
    /// budget of 64 per grid cell of resolution.
    pub fn new(grid: Grid) -> Self {
        TraceConfig {
            grid,
            tangent_mode: TangentMode::Analytic,
            fd_step: DEFAULT_FD_STEP,
            distance: DistanceConfig::default(),
            max_steps: 64 * grid.h() as usize,
        }
    }
}

/// Result of one trace: the voxel sequence with per-voxel distance
/// estimates, error metrics, and the adjacency audit.
#[derive(Debug, Clone)]
pub struct TraceResult {
    pub sequence: Vec<VoxelIndex>,
    /// Estimated center-to-curve distance of each sequence voxel.
    pub dists: Vec<f64>,
    /// Parameter of the estimated nearest curve point per voxel.
    pub phis: Vec<f64>,
    pub eps_max: f64,
    pub eps_av: f64,
    /// Interior positions whose in-sequence neighbor count is not 2 and
    /// endpoints whose count is not 1, with the observed count.
    pub adjacency_violations: Vec<(usize, usize)>,
    pub steps_taken: usize,
    /// Whether the curve endpoints coincide, i.e. the sequence is a loop
    /// that begins and ends with the shared start voxel.
    pub closed: bool,
}

impl TraceResult {
    pub fn n_voxels(&self) -> usize {
        self.sequence.len()
    }
}

/// Maximum and mean of a nonempty distance list.
pub fn error_metrics(dists: &[f64]) -> Result<(f64, f64)> {
    if dists.is_empty() {
        return Err(Error::EmptySequence);
    }
    let max = dists.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = dists.iter().sum::<f64>() / dists.len() as f64;
    Ok((max, mean))
}

/// Counts, for every sequence position, the other sequence members within
/// Chebyshev distance 1. Interior positions are expected to have exactly 2,
/// endpoints exactly 1; mismatches are reported as (position, count).
pub fn adjacency_audit(sequence: &[VoxelIndex]) -> Vec<(usize, usize)> {
    let n = sequence.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut violations = Vec::new();
    for k in 0..n {
        let count = sequence
            .iter()
            .enumerate()
            .filter(|&(m, v)| m != k && sequence[k].is_neighbor(*v))
            .count();
        let expected = if k == 0 || k == n - 1 { 1 } else { 2 };
        if count != expected {
            violations.push((k, count));
        }
    }
    violations
}

/// Cycle form of [`adjacency_audit`] for a loop whose first and last entries
/// are the same voxel: the duplicate tail entry is dropped and every
/// remaining position is expected to have exactly 2 neighbors.
pub fn adjacency_audit_closed(sequence: &[VoxelIndex]) -> Vec<(usize, usize)> {
    let n = sequence.len();
    if n <= 1 {
        return Vec::new();
    }
    let ring = &sequence[..n - 1];
    let mut violations = Vec::new();
    for k in 0..ring.len() {
        let count = ring
            .iter()
            .enumerate()
            .filter(|&(m, v)| m != k && ring[k].is_neighbor(*v))
            .count();
        if count != 2 {
            violations.push((k, count));
        }
    }
    violations
}

fn tangent_at(curve: &ParametricCurve, cfg: &TraceConfig, phi: f64) -> Result<Tangent> {
    match cfg.tangent_mode {
        TangentMode::Analytic => curve.tangent_analytic(phi),
        TangentMode::FiniteDifference => curve.tangent_fd(phi, cfg.fd_step),
    }
}

/// Walks the voxel sequence from the curve start to the voxel containing
/// the curve end.
///
/// Each step evaluates the tangent at the parameter of the previous
/// voxel's nearest curve point (initially the range start), builds the
/// step matrix from its signs, and selects the candidate voxel whose
/// center has the smallest estimated distance to the curve; ties keep the
/// lowest candidate index. Candidates whose distance estimate fails are
/// skipped.
///
/// When the curve endpoints coincide (within [`CLOSURE_TOL`]) the walk is
/// a loop: it must leave the start voxel and terminates on re-entering it,
/// so the sequence begins and ends with the shared voxel. Otherwise it
/// terminates as soon as the voxel containing the end point is appended,
/// immediately if the start voxel already contains it.
pub fn trace(curve: &ParametricCurve, cfg: &TraceConfig) -> Result<TraceResult> {
    if cfg.max_steps == 0 {
        return Err(Error::InvalidConfig("step budget must be positive".into()));
    }
    let s = curve.eval_point(curve.phi_min())?;
    let e = curve.eval_point(curve.phi_max())?;
    let start = cfg
        .grid
        .point_to_voxel(s)
        .map_err(|_| Error::StartOutOfVolume {
            x: s.x,
            y: s.y,
            z: s.z,
        })?;
    let end = cfg
        .grid
        .point_to_voxel(e)
        .map_err(|_| Error::EndOutOfVolume {
            x: e.x,
            y: e.y,
            z: e.z,
        })?;
    let closed = s.dist(e) <= CLOSURE_TOL;
    let target = if closed { start } else { end };

    let first = estimate(curve, start.center(), curve.phi_min(), &cfg.distance)?;
    let mut sequence = vec![start];
    let mut dists = vec![first.dist];
    let mut phis = vec![first.phi_star];
    let mut hint = curve.phi_min();
    let mut prev: Option<VoxelIndex> = None;
    let mut current = start;
    let mut steps_taken = 0;
    let mut arrived = !closed && current == target;

    while !arrived {
        if steps_taken >= cfg.max_steps {
            return Err(Error::VoxelizationDiverged { steps: steps_taken });
        }
        let g = tangent_at(curve, cfg, hint)?;
        let cands = candidates(current, &build_step_matrix(&g), prev, &cfg.grid)?;
        let mut best: Option<(VoxelIndex, DistanceResult)> = None;
        let mut last_err = None;
        for (_, cand) in cands {
            match estimate(curve, cand.center(), hint, &cfg.distance) {
                Ok(r) => {
                    if best.as_ref().is_none_or(|(_, b)| r.dist < b.dist) {
                        best = Some((cand, r));
                    }
                }
                Err(err) => last_err = Some(err),
            }
        }
        let Some((chosen, est)) = best else {
            return Err(last_err.unwrap_or(Error::DegenerateTangent {
                i: current.i,
                j: current.j,
                l: current.l,
            }));
        };
        arrived = chosen == target;
        if !arrived && sequence[sequence.len().saturating_sub(3)..].contains(&chosen) {
            return Err(Error::VoxelizationDiverged { steps: steps_taken });
        }
        debug_assert!(current.is_neighbor(chosen));
        sequence.push(chosen);
        dists.push(est.dist);
        phis.push(est.phi_star);
        prev = Some(current);
        current = chosen;
        hint = est.phi_star;
        steps_taken += 1;
    }

    let (eps_max, eps_av) = error_metrics(&dists)?;
    let adjacency_violations = if closed {
        adjacency_audit_closed(&sequence)
    } else {
        adjacency_audit(&sequence)
    };
    Ok(TraceResult {
        sequence,
        dists,
        phis,
        eps_max,
        eps_av,
        adjacency_violations,
        steps_taken,
        closed,
    })
}

/// Independent check of a trace: the true (brute-force) nearest distance of
/// every sequence voxel and how the reported estimates compare to it.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    /// Largest true center-to-curve distance over the sequence.
    pub oracle_max: f64,
    /// Voxels whose true distance exceeds the half-diagonal criterion.
    pub over_threshold: usize,
    /// Smallest reported-minus-true distance gap (negative means some
    /// estimate claims less than the true distance).
    pub min_slack: f64,
    /// Mean reported-minus-true distance gap.
    pub mean_slack: f64,
}

pub fn verify_against_oracle(
    curve: &ParametricCurve,
    result: &TraceResult,
    n_samples: usize,
) -> OracleReport {
    let mut oracle_max: f64 = 0.0;
    let mut over_threshold = 0;
    let mut min_slack = f64::INFINITY;
    let mut slack_sum = 0.0;
    for (voxel, reported) in result.sequence.iter().zip(&result.dists) {
        let oracle = oracle_nearest(curve, voxel.center(), n_samples).dist;
        oracle_max = oracle_max.max(oracle);
        if oracle > HALF_DIAGONAL {
            over_threshold += 1;
        }
        let slack = reported - oracle;
        min_slack = min_slack.min(slack);
        slack_sum += slack;
    }
    let n = result.sequence.len().max(1);
    OracleReport {
        oracle_max,
        over_threshold,
        min_slack: if min_slack.is_finite() {
            min_slack
        } else {
            0.0
        },
        mean_slack: slack_sum / n as f64,
    }
}
