//! Step matrix construction from tangent signs and candidate enumeration.

use crate::curve::Tangent;
use crate::error::{Error, Result};
use crate::grid::{Grid, VoxelIndex};

/// The 7 nonempty axis subsets, in candidate order q = 0..6:
/// {x}, {y}, {z}, {x,y}, {y,z}, {x,z}, {x,y,z}.
const AXIS_MASKS: [[i32; 3]; 7] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [0, 1, 1],
    [1, 0, 1],
    [1, 1, 1],
];

/// The 7 candidate integer offsets for one advance step, indexed by q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepMatrix {
    offsets: [[i32; 3]; 7],
}

impl StepMatrix {
    pub fn offsets(&self) -> &[[i32; 3]; 7] {
        &self.offsets
    }

    pub fn offset(&self, q: usize) -> [i32; 3] {
        self.offsets[q]
    }
}

fn sgn(v: f64) -> i32 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Builds the step matrix from a tangent: each axis subset contributes an
/// offset whose included axes carry the sign of the tangent component
/// (zero components contribute zero motion).
pub fn build_step_matrix(g: &Tangent) -> StepMatrix {
    let s = [sgn(g.gx), sgn(g.gy), sgn(g.gz)];
    let mut offsets = [[0i32; 3]; 7];
    for (q, mask) in AXIS_MASKS.iter().enumerate() {
        for axis in 0..3 {
            offsets[q][axis] = mask[axis] * s[axis];
        }
    }
    StepMatrix { offsets }
}

/// Enumerates candidate successor voxels of `v`: the step-matrix offsets
/// applied to `v`, dropping zero offsets, duplicates (keeping the lowest q),
/// the previous voxel, and candidates outside the grid. Candidates are
/// returned in ascending q order.
pub fn candidates(
    v: VoxelIndex,
    m: &StepMatrix,
    prev: Option<VoxelIndex>,
    grid: &Grid,
) -> Result<Vec<(usize, VoxelIndex)>> {
    let h = grid.h() as i64;
    let mut out: Vec<(usize, VoxelIndex)> = Vec::with_capacity(7);
    for (q, off) in m.offsets.iter().enumerate() {
        if *off == [0, 0, 0] {
            continue;
        }
        let i = v.i as i64 + off[0] as i64;
        let j = v.j as i64 + off[1] as i64;
        let l = v.l as i64 + off[2] as i64;
        if i < 0 || i >= h || j < 0 || j >= h || l < 0 || l >= h {
            continue;
        }
        let cand = VoxelIndex::new(i as u32, j as u32, l as u32);
        if prev == Some(cand) {
            continue;
        }
        if out.iter().any(|(_, c)| *c == cand) {
            continue;
        }
        out.push((q, cand));
    }
    if out.is_empty() {
        return Err(Error::DegenerateTangent {
            i: v.i,
            j: v.j,
            l: v.l,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive_signs_give_the_seven_subsets() {
        let m = build_step_matrix(&Tangent::new(1.0, 1.0, 1.0));
        assert_eq!(
            m.offsets(),
            &[
                [1, 0, 0],
                [0, 1, 0],
                [0, 0, 1],
                [1, 1, 0],
                [0, 1, 1],
                [1, 0, 1],
                [1, 1, 1],
            ]
        );
    }

    #[test]
    fn zero_components_zero_out_axes() {
        let m = build_step_matrix(&Tangent::new(0.0, 40.0, 0.0));
        assert_eq!(
            m.offsets(),
            &[
                [0, 0, 0],
                [0, 1, 0],
                [0, 0, 0],
                [0, 1, 0],
                [0, 1, 0],
                [0, 0, 0],
                [0, 1, 0],
            ]
        );
    }

    #[test]
    fn negative_zero_component_counts_as_zero() {
        let m = build_step_matrix(&Tangent::new(-0.0, 1.0, -2.0));
        assert_eq!(m.offset(0), [0, 0, 0]);
        assert_eq!(m.offset(6), [0, 1, -1]);
    }

    #[test]
    fn mixed_signs() {
        let m = build_step_matrix(&Tangent::new(-3.0, 5.0, 0.0));
        assert_eq!(
            m.offsets(),
            &[
                [-1, 0, 0],
                [0, 1, 0],
                [0, 0, 0],
                [-1, 1, 0],
                [0, 1, 0],
                [-1, 0, 0],
                [-1, 1, 0],
            ]
        );
    }

    #[test]
    fn interior_full_tangent_yields_seven_candidates() {
        let grid = Grid::new(128).unwrap();
        let m = build_step_matrix(&Tangent::new(1.0, 1.0, 1.0));
        let cands = candidates(VoxelIndex::new(10, 10, 10), &m, None, &grid).unwrap();
        assert_eq!(cands.len(), 7);
        assert_eq!(cands[0], (0, VoxelIndex::new(11, 10, 10)));
        assert_eq!(cands[6], (6, VoxelIndex::new(11, 11, 11)));
    }

    #[test]
    fn single_axis_tangent_yields_single_candidate() {
        let grid = Grid::new(128).unwrap();
        let m = build_step_matrix(&Tangent::new(0.0, 40.0, 0.0));
        let cands = candidates(VoxelIndex::new(10, 10, 10), &m, None, &grid).unwrap();
        assert_eq!(cands, vec![(1, VoxelIndex::new(10, 11, 10))]);
    }

    #[test]
    fn dedup_keeps_lowest_q() {
        let grid = Grid::new(128).unwrap();
        let m = build_step_matrix(&Tangent::new(-3.0, 5.0, 0.0));
        let cands = candidates(VoxelIndex::new(10, 10, 10), &m, None, &grid).unwrap();
        assert_eq!(
            cands,
            vec![
                (0, VoxelIndex::new(9, 10, 10)),
                (1, VoxelIndex::new(10, 11, 10)),
                (3, VoxelIndex::new(9, 11, 10)),
            ]
        );
    }

    #[test]
    fn corner_exhaustion_is_degenerate() {
        let grid = Grid::new(128).unwrap();
        let m = build_step_matrix(&Tangent::new(1.0, 1.0, 1.0));
        assert!(matches!(
            candidates(VoxelIndex::new(127, 127, 127), &m, None, &grid),
            Err(Error::DegenerateTangent { .. })
        ));
    }

    #[test]
    fn zero_tangent_is_degenerate() {
        let grid = Grid::new(128).unwrap();
        let m = build_step_matrix(&Tangent::new(0.0, 0.0, 0.0));
        assert!(matches!(
            candidates(VoxelIndex::new(10, 10, 10), &m, None, &grid),
            Err(Error::DegenerateTangent { .. })
        ));
    }

    #[test]
    fn prev_voxel_is_excluded() {
        let grid = Grid::new(128).unwrap();
        let m = build_step_matrix(&Tangent::new(0.0, 40.0, 0.0));
        let prev = Some(VoxelIndex::new(10, 11, 10));
        assert!(matches!(
            candidates(VoxelIndex::new(10, 10, 10), &m, prev, &grid),
            Err(Error::DegenerateTangent { .. })
        ));
    }

    #[test]
    fn candidates_are_neighbors_of_origin() {
        let grid = Grid::new(16).unwrap();
        let v = VoxelIndex::new(8, 8, 8);
        let m = build_step_matrix(&Tangent::new(2.0, -1.5, 0.7));
        for (_, c) in candidates(v, &m, None, &grid).unwrap() {
            assert!(v.is_neighbor(c));
            assert_ne!(v, c);
        }
    }
}
