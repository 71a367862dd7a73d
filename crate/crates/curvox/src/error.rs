//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {phi} outside range [{min}, {max}]")]
    ParameterOutOfRange { phi: f64, min: f64, max: f64 },

    #[error("curve provides no analytic tangent")]
    NoAnalyticTangent,

    #[error("point ({x}, {y}, {z}) lies on the cylinder axis, azimuth undefined")]
    OnAxis { x: f64, y: f64, z: f64 },

    #[error("curve provides no parameter projection")]
    ProjectionUnavailable,

    #[error("empty search window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("no admissible step from voxel ({i}, {j}, {l})")]
    DegenerateTangent { i: u32, j: u32, l: u32 },

    #[error("point ({x}, {y}, {z}) outside the voxel volume")]
    OutOfVolume { x: f64, y: f64, z: f64 },

    #[error("curve start point ({x}, {y}, {z}) outside the voxel volume")]
    StartOutOfVolume { x: f64, y: f64, z: f64 },

    #[error("curve end point ({x}, {y}, {z}) outside the voxel volume")]
    EndOutOfVolume { x: f64, y: f64, z: f64 },

    #[error("voxelization diverged after {steps} steps without reaching the end voxel")]
    VoxelizationDiverged { steps: usize },

    #[error("empty voxel sequence")]
    EmptySequence,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
