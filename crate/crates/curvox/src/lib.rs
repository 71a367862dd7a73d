//! Voxelization of parametric space curves on a cubic grid.
//!
//! A curve given by point and tangent functions of a scalar parameter is
//! approximated by an ordered, 26-connected voxel sequence. Each step builds
//! seven candidate voxels from the signs of the local tangent and keeps the
//! candidate whose center lies nearest the curve, under a selectable
//! nearest-distance estimator. An experiment harness measures approximation
//! error across grid resolutions, curve frequencies, and estimator variants,
//! and checks results against a brute-force oracle.

pub mod advance;
pub mod curve;
pub mod distance;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod point;
pub mod tracer;

pub use advance::{build_step_matrix, candidates, StepMatrix};
pub use curve::{CylCurveParams, ParametricCurve, Tangent};
pub use distance::{
    dist_v1, dist_v2, dist_v3, estimate, oracle_nearest, DistanceConfig, DistanceResult, Variant,
};
pub use error::{Error, Result};
pub use experiment::{
    builtin_suite, emit_report_csv, emit_report_json, emit_voxels, load_suite, parse_voxels,
    run_row, run_suite, ExperimentConfig, ExperimentRow, ReportFormat,
};
pub use grid::{Grid, VoxelIndex, HALF_DIAGONAL};
pub use point::Point3;
pub use tracer::{
    adjacency_audit, adjacency_audit_closed, error_metrics, trace, verify_against_oracle,
    OracleReport, TangentMode, TraceConfig, TraceResult, CLOSURE_TOL,
};
