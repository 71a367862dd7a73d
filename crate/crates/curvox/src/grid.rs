//! Bounded cubic voxel volume, voxel indexing, and the discrete metrics.

use crate::error::{Error, Result};
use crate::point::Point3;
use serde::{Deserialize, Serialize};

/// Half of a unit voxel's space diagonal. A voxel center farther than this
/// from the curve cannot have the curve passing through the voxel.
pub const HALF_DIAGONAL: f64 = 0.866_025_403_784_438_6;

/// Cubic voxel volume with `h` cells per axis, covering [0, h)^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    h: u32,
}

impl Grid {
    /// Creates a grid with `h` voxels per axis. Requires `h >= 2`.
    pub fn new(h: u32) -> Result<Grid> {
        if h < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid resolution must be at least 2, got {h}"
            )));
        }
        Ok(Grid { h })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn contains(&self, v: VoxelIndex) -> bool {
        v.i < self.h && v.j < self.h && v.l < self.h
    }

    /// True when the point lies inside the half-open volume [0, h)^3.
    pub fn contains_point(&self, p: Point3) -> bool {
        let h = self.h as f64;
        p.x >= 0.0 && p.x < h && p.y >= 0.0 && p.y < h && p.z >= 0.0 && p.z < h
    }

    /// Index of the voxel whose half-open cube contains `p`.
    pub fn point_to_voxel(&self, p: Point3) -> Result<VoxelIndex> {
        if !self.contains_point(p) {
            return Err(Error::OutOfVolume {
                x: p.x,
                y: p.y,
                z: p.z,
            });
        }
        Ok(VoxelIndex::new(
            p.x.floor() as u32,
            p.y.floor() as u32,
            p.z.floor() as u32,
        ))
    }
}

/// Lattice cell addressed by non-negative indices. A voxel occupies the
/// half-open cube [i, i+1) x [j, j+1) x [l, l+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VoxelIndex {
    pub i: u32,
    pub j: u32,
    pub l: u32,
}

impl VoxelIndex {
    pub const fn new(i: u32, j: u32, l: u32) -> Self {
        VoxelIndex { i, j, l }
    }

    /// Center of the voxel cube.
    pub fn center(self) -> Point3 {
        Point3::new(
            self.i as f64 + 0.5,
            self.j as f64 + 0.5,
            self.l as f64 + 0.5,
        )
    }

    /// Chebyshev index distance: max of per-axis absolute differences.
    pub fn chebyshev(self, other: VoxelIndex) -> u32 {
        let di = self.i.abs_diff(other.i);
        let dj = self.j.abs_diff(other.j);
        let dl = self.l.abs_diff(other.l);
        di.max(dj).max(dl)
    }

    /// Manhattan index distance: sum of per-axis absolute differences.
    pub fn manhattan(self, other: VoxelIndex) -> u32 {
        self.i.abs_diff(other.i) + self.j.abs_diff(other.j) + self.l.abs_diff(other.l)
    }

    /// 26-connectivity: true iff the Chebyshev distance is exactly 1.
    /// A voxel is not its own neighbor.
    pub fn is_neighbor(self, other: VoxelIndex) -> bool {
        self.chebyshev(other) == 1
    }
}
