//! Helpers shared by the integration test targets. The geometry here is
//! written from scratch on purpose: it cross-checks the library rather
//! than reusing it.

#![allow(dead_code)]

use curvox::{ParametricCurve, Point3, Tangent};

/// Straight segment from `s` to `e` over the parameter range [0, 1].
pub fn segment_curve(s: Point3, e: Point3) -> ParametricCurve {
    let d = e - s;
    ParametricCurve::new(0.0, 1.0, move |phi| s + d * phi)
        .unwrap()
        .with_analytic_tangent(move |_| Tangent::new(d.x, d.y, d.z))
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Plain point-to-segment distance on raw coordinates.
pub fn point_segment_dist(p: [f64; 3], s: [f64; 3], e: [f64; 3]) -> f64 {
    let d = sub(e, s);
    let dd = dot(d, d);
    let t = if dd > 0.0 {
        (dot(sub(p, s), d) / dd).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [s[0] + t * d[0], s[1] + t * d[1], s[2] + t * d[2]];
    dot(sub(p, q), sub(p, q)).sqrt()
}

/// Line-stepping voxelization of a segment: walks the segment at a fine
/// pitch and floors each sample, deduplicating consecutive repeats. Uses
/// only plain arithmetic so it is an oracle for the tracer.
pub fn line_voxels(s: [f64; 3], e: [f64; 3]) -> Vec<[i64; 3]> {
    let len = dot(sub(e, s), sub(e, s)).sqrt();
    let n = ((len * 256.0).ceil() as usize).max(1);
    let mut out: Vec<[i64; 3]> = Vec::new();
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let v = [
            (s[0] + t * (e[0] - s[0])).floor() as i64,
            (s[1] + t * (e[1] - s[1])).floor() as i64,
            (s[2] + t * (e[2] - s[2])).floor() as i64,
        ];
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

pub fn chebyshev_i64(a: [i64; 3], b: [i64; 3]) -> i64 {
    (a[0] - b[0])
        .abs()
        .max((a[1] - b[1]).abs())
        .max((a[2] - b[2]).abs())
}
