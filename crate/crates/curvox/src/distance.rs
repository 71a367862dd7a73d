//! Center-to-curve distance estimators and an independent brute-force
//! oracle used for verification.

use crate::curve::ParametricCurve;
use crate::error::{Error, Result};
use crate::point::Point3;
use serde::{Deserialize, Serialize};

/// Distance estimator selection.
///
/// * `V1`: single parameter projection of the query point.
/// * `V2`: windowed parameter scan around the projection.
/// * `V3`: scan plus parabolic refinement of the scan minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    V1,
    V2,
    V3,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::V1 => "V1",
            Variant::V2 => "V2",
            Variant::V3 => "V3",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "v1" | "1" => Ok(Variant::V1),
            "v2" | "2" => Ok(Variant::V2),
            "v3" | "3" => Ok(Variant::V3),
            other => Err(Error::Parse(format!("unknown variant '{other}'"))),
        }
    }
}

/// Configuration of the windowed estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceConfig {
    pub variant: Variant,
    /// Half-width of the scan window, radians (fixed mode).
    pub phi_d: f64,
    /// Scan pitch, radians (fixed mode).
    pub delta_phi: f64,
    /// Minimum magnitude of the parabola denominator; smaller is treated
    /// as degenerate and refinement falls back to the scan minimum.
    pub refine_tol: f64,
    /// Number of parabolic refinement steps.
    pub refine_steps: usize,
    /// Derive the window from the local tangent magnitude so that it spans
    /// roughly four voxels of arc on either side, with pitch window/200.
    /// The anchor projection ignores one coordinate, so its error can reach
    /// a couple of voxels of arc; the margin keeps the window minimum
    /// interior, where it is stable, rather than pinned to a window edge.
    pub adaptive: bool,
}

impl DistanceConfig {
    pub fn new(variant: Variant) -> Self {
        DistanceConfig {
            variant,
            phi_d: 0.05,
            delta_phi: 5e-4,
            refine_tol: 1e-12,
            refine_steps: 1,
            adaptive: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi_d.is_finite() && self.phi_d > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "window half-width must be positive, got {}",
                self.phi_d
            )));
        }
        if !(self.delta_phi.is_finite() && self.delta_phi > 0.0 && self.delta_phi < self.phi_d) {
            return Err(Error::InvalidConfig(format!(
                "scan pitch must lie in (0, {}), got {}",
                self.phi_d, self.delta_phi
            )));
        }
        Ok(())
    }
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig::new(Variant::V3)
    }
}

/// A distance estimate together with the curve point that realizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub dist: f64,
    pub phi_star: f64,
    pub point: Point3,
}

fn result_at(curve: &ParametricCurve, center: Point3, phi: f64) -> Result<DistanceResult> {
    let point = curve.eval_point(phi)?;
    Ok(DistanceResult {
        dist: center.dist(point),
        phi_star: phi,
        point,
    })
}

/// Variant 1: distance to the curve point at the projected parameter.
pub fn dist_v1(curve: &ParametricCurve, center: Point3, phi_hint: f64) -> Result<DistanceResult> {
    let phi = curve.project_param(center, phi_hint)?;
    result_at(curve, center, phi)
}

/// Scan window and sample ladder shared by variants 2 and 3.
struct Scan {
    phis: Vec<f64>,
    dists: Vec<f64>,
    best: usize,
}

fn scan_window(
    curve: &ParametricCurve,
    center: Point3,
    phi_hint: f64,
    cfg: &DistanceConfig,
) -> Result<Scan> {
    if !phi_hint.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "parameter hint must be finite, got {phi_hint}"
        )));
    }
    let (min, max) = (curve.phi_min(), curve.phi_max());
    let hint = phi_hint.clamp(min, max);

    // Window anchor: the projected parameter when a projection exists,
    // the hint otherwise.
    let seed = match curve.project_param(center, hint) {
        Ok(phi) => phi,
        Err(Error::ProjectionUnavailable) | Err(Error::OnAxis { .. }) => hint,
        Err(e) => return Err(e),
    };

    let (phi_d, delta_phi) = if cfg.adaptive {
        let g = curve.tangent_preferred(hint)?;
        let gn = g.norm();
        let span = max - min;
        let phi_d = if gn > f64::EPSILON && 4.0 / gn < span {
            4.0 / gn
        } else {
            span
        };
        (phi_d, phi_d / 200.0)
    } else {
        cfg.validate()?;
        (cfg.phi_d, cfg.delta_phi)
    };

    // Forward-biased window: ahead of the anchor up to phi_d, behind it no
    // farther than one window below the hint, so the estimate cannot fall
    // back onto an earlier pass of a self-approaching curve.
    let lo = (seed - phi_d).max(hint - phi_d).max(min);
    let hi = (seed + phi_d).min(max);
    if lo > hi {
        return Err(Error::EmptyWindow { lo, hi });
    }

    let n_steps = ((hi - lo) / delta_phi).floor() as usize;
    let mut phis = Vec::with_capacity(n_steps + 3);
    for k in 0..=n_steps {
        let phi = lo + k as f64 * delta_phi;
        if phi > hi {
            break;
        }
        phis.push(phi);
    }
    if *phis.last().unwrap() < hi {
        phis.push(hi);
    }
    if seed > lo && seed < hi {
        let pos = phis.partition_point(|&p| p < seed);
        if phis[pos] != seed {
            phis.insert(pos, seed);
        }
    }

    let mut dists = Vec::with_capacity(phis.len());
    for &phi in &phis {
        dists.push(center.dist(curve.eval_point(phi)?));
    }
    let mut best = 0;
    for k in 1..dists.len() {
        if dists[k] < dists[best] {
            best = k;
        }
    }
    Ok(Scan { phis, dists, best })
}

/// Variant 2: minimum distance over the sampled window.
pub fn dist_v2(
    curve: &ParametricCurve,
    center: Point3,
    phi_hint: f64,
    cfg: &DistanceConfig,
) -> Result<DistanceResult> {
    let scan = scan_window(curve, center, phi_hint, cfg)?;
    result_at(curve, center, scan.phis[scan.best])
}

/// Vertex of the parabola through (x1,y1), (x2,y2), (x3,y3), or None when
/// the denominator magnitude falls below `tol`.
fn parabola_vertex(x1: f64, y1: f64, x2: f64, y2: f64, x3: f64, y3: f64, tol: f64) -> Option<f64> {
    let num = (x2 - x1).powi(2) * (y2 - y3) - (x2 - x3).powi(2) * (y2 - y1);
    let den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
    if den.abs() < tol {
        return None;
    }
    let x = x2 - 0.5 * num / den;
    x.is_finite().then_some(x)
}

/// Variant 3: the window scan of variant 2 followed by parabolic
/// refinement of the scan minimum, fitted to squared distance. Refinement
/// requires an interior bracket with a strictly smallest middle sample and
/// is kept only when it strictly improves on the scan minimum.
pub fn dist_v3(
    curve: &ParametricCurve,
    center: Point3,
    phi_hint: f64,
    cfg: &DistanceConfig,
) -> Result<DistanceResult> {
    let scan = scan_window(curve, center, phi_hint, cfg)?;
    let m = scan.best;
    let mut best = result_at(curve, center, scan.phis[m])?;
    if m == 0 || m == scan.phis.len() - 1 {
        return Ok(best);
    }
    let (mut a, mut b, mut c) = (scan.phis[m - 1], scan.phis[m], scan.phis[m + 1]);
    let (mut da, mut db, mut dc) = (scan.dists[m - 1], scan.dists[m], scan.dists[m + 1]);
    if !(db < da && db < dc) {
        return Ok(best);
    }
    for _ in 0..cfg.refine_steps {
        let Some(vertex) = parabola_vertex(a, da * da, b, db * db, c, dc * dc, cfg.refine_tol)
        else {
            break;
        };
        let phi = vertex.clamp(a, c);
        if phi == a || phi == b || phi == c {
            break;
        }
        let trial = result_at(curve, center, phi)?;
        if trial.dist < best.dist {
            best = trial;
        }
        // Shrink the bracket around the smallest distance seen so far.
        if trial.dist < db {
            if phi < b {
                (c, dc) = (b, db);
            } else {
                (a, da) = (b, db);
            }
            (b, db) = (phi, trial.dist);
        } else if phi < b {
            (a, da) = (phi, trial.dist);
        } else {
            (c, dc) = (phi, trial.dist);
        }
    }
    Ok(best)
}

/// Runs the estimator selected by `cfg.variant`.
pub fn estimate(
    curve: &ParametricCurve,
    center: Point3,
    phi_hint: f64,
    cfg: &DistanceConfig,
) -> Result<DistanceResult> {
    match cfg.variant {
        Variant::V1 => dist_v1(curve, center, phi_hint),
        Variant::V2 => dist_v2(curve, center, phi_hint, cfg),
        Variant::V3 => dist_v3(curve, center, phi_hint, cfg),
    }
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Brute-force global nearest point: a dense scan of the whole parameter
/// range followed by golden-section refinement of every sampled local
/// basin. Used only for verification, never inside a trace.
pub fn oracle_nearest(curve: &ParametricCurve, center: Point3, n_samples: usize) -> DistanceResult {
    let n = n_samples.max(2);
    let (lo, hi) = (curve.phi_min(), curve.phi_max());
    let step = (hi - lo) / (n - 1) as f64;
    let eval = |phi: f64| {
        curve
            .eval_point(phi.clamp(lo, hi))
            .expect("parameter clamped into range")
    };
    let f = |phi: f64| center.dist(eval(phi));

    let phis: Vec<f64> = (0..n).map(|k| (lo + k as f64 * step).min(hi)).collect();
    let dists: Vec<f64> = phis.iter().map(|&p| f(p)).collect();

    let mut best_phi = phis[0];
    let mut best_dist = dists[0];
    for k in 0..n {
        if dists[k] < best_dist {
            best_dist = dists[k];
            best_phi = phis[k];
        }
        let left_ok = k == 0 || dists[k] <= dists[k - 1];
        let right_ok = k == n - 1 || dists[k] <= dists[k + 1];
        if left_ok && right_ok {
            let a = phis[k.saturating_sub(1)];
            let b = phis[(k + 1).min(n - 1)];
            let (phi, dist) = golden_min(&f, a, b, 1e-10);
            if dist < best_dist {
                best_dist = dist;
                best_phi = phi;
            }
        }
    }
    let point = eval(best_phi);
    DistanceResult {
        dist: center.dist(point),
        phi_star: best_phi,
        point,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CylCurveParams;

    // Same shape as the built-in curve but over a multi-turn range, so the
    // fixtures can probe estimates well away from the one-turn window.
    fn wide_params(omega: f64) -> CylCurveParams {
        CylCurveParams {
            phi_min: -10.0,
            phi_max: 10.0,
            ..CylCurveParams::reference(128, omega)
        }
    }

    fn wide_curve(omega: f64) -> ParametricCurve {
        ParametricCurve::cylindrical(wide_params(omega)).unwrap()
    }

    fn fixed_cfg(variant: Variant, phi_d: f64, delta_phi: f64) -> DistanceConfig {
        DistanceConfig {
            variant,
            phi_d,
            delta_phi,
            adaptive: false,
            ..DistanceConfig::new(variant)
        }
    }

    fn line_curve(q: Point3, d: Point3, lo: f64, hi: f64) -> ParametricCurve {
        ParametricCurve::new(lo, hi, move |phi| q + d * phi)
            .unwrap()
            .with_analytic_tangent(move |_| crate::curve::Tangent::new(d.x, d.y, d.z))
    }

    #[test]
    fn v1_on_curve_point_is_zero() {
        let c = wide_curve(2.0);
        let r = dist_v1(&c, c.eval_point(1.0).unwrap(), 1.0).unwrap();
        assert!(r.dist <= 1e-9);
        assert!((r.phi_star - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn v1_golden_voxel_center() {
        let c = wide_curve(2.0);
        let r = dist_v1(&c, Point3::new(85.5, 69.5, 68.5), 0.5).unwrap();
        assert!((r.phi_star - 0.502302378097953).abs() < 1e-12);
        assert!((r.dist - 0.504931454531911).abs() < 1e-12);
    }

    #[test]
    fn v1_on_axis_errors() {
        let c = wide_curve(2.0);
        assert!(matches!(
            dist_v1(&c, Point3::new(50.0, 50.0, 60.0), 0.0),
            Err(Error::OnAxis { .. })
        ));
    }

    #[test]
    fn v1_requires_projection() {
        let c = line_curve(
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            0.0,
            5.0,
        );
        assert!(matches!(
            dist_v1(&c, Point3::new(1.0, 1.0, 0.0), 0.5),
            Err(Error::ProjectionUnavailable)
        ));
    }

    #[test]
    fn v2_on_curve_point_is_zero() {
        let c = wide_curve(2.0);
        let cfg = fixed_cfg(Variant::V2, 0.05, 0.001);
        let r = dist_v2(&c, c.eval_point(1.0).unwrap(), 1.0, &cfg).unwrap();
        assert!(r.dist <= 1e-6);
        assert!((r.phi_star - 1.0).abs() <= 0.001 + 1e-9);
    }

    #[test]
    fn v2_circle_offset_distance() {
        let params = CylCurveParams {
            a: 0.0,
            ..wide_params(2.0)
        };
        let c = ParametricCurve::cylindrical(params).unwrap();
        let center = Point3::new(50.0 + 42.0, 50.0, 50.0);
        let cfg = fixed_cfg(Variant::V2, 0.05, 0.001);
        let r = dist_v2(&c, center, 0.0, &cfg).unwrap();
        assert!((r.dist - 2.0).abs() <= 0.05);
    }

    #[test]
    fn v2_never_worse_than_v1_when_window_contains_projection() {
        let c = wide_curve(4.0);
        let cfg = fixed_cfg(Variant::V2, 0.05, 5e-4);
        for k in 0..40 {
            let phi = -9.5 + 0.47 * k as f64;
            let center = c.eval_point(phi).unwrap() + Point3::new(0.4, -0.3, 0.5);
            let v1 = dist_v1(&c, center, phi).unwrap();
            let v2 = dist_v2(&c, center, phi, &cfg).unwrap();
            assert!(v2.dist <= v1.dist + 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn v2_halving_pitch_never_increases() {
        let c = wide_curve(4.0);
        for k in 0..25 {
            let phi = -9.0 + 0.7 * k as f64;
            let center = c.eval_point(phi).unwrap() + Point3::new(-0.2, 0.5, 0.3);
            let coarse = fixed_cfg(Variant::V2, 0.05, 4e-4);
            let fine = fixed_cfg(Variant::V2, 0.05, 2e-4);
            let dc = dist_v2(&c, center, phi, &coarse).unwrap().dist;
            let df = dist_v2(&c, center, phi, &fine).unwrap().dist;
            assert!(df <= dc + 1e-12, "phi={phi} coarse={dc} fine={df}");
        }
    }

    #[test]
    fn v2_empty_window_errors() {
        let c = wide_curve(2.0);
        // azimuth ~ -2.0 rad; the branch nearest hint 5.0 is ~4.283, more
        // than one window behind the hint, so the window is empty
        let center = Point3::new(
            50.0 + 30.0 * (-2.0f64).cos(),
            50.0 + 30.0 * (-2.0f64).sin(),
            50.0,
        );
        let cfg = fixed_cfg(Variant::V2, 0.05, 0.001);
        assert!(matches!(
            dist_v2(&c, center, 5.0, &cfg),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn v3_exact_on_quadratic_distance() {
        let c = line_curve(
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            -5.0,
            5.0,
        );
        let center = Point3::new(1.3, 2.0, 0.0);
        let cfg = fixed_cfg(Variant::V3, 0.5, 0.073);
        let r = dist_v3(&c, center, 1.1, &cfg).unwrap();
        assert!((r.phi_star - 1.3).abs() <= 1e-9, "phi={}", r.phi_star);
        assert!((r.dist - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn v3_symmetric_bracket_keeps_middle() {
        let c = line_curve(
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            -5.0,
            5.0,
        );
        let center = Point3::new(1.3, 2.0, 0.0);
        let cfg = fixed_cfg(Variant::V3, 0.5, 0.1);
        let r = dist_v3(&c, center, 1.3, &cfg).unwrap();
        assert!((r.phi_star - 1.3).abs() <= 1e-12);
    }

    #[test]
    fn v3_edge_minimum_falls_back_to_scan() {
        let c = line_curve(
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            -5.0,
            5.0,
        );
        let center = Point3::new(0.2, 2.0, 0.0);
        let cfg = fixed_cfg(Variant::V3, 0.5, 0.1);
        let r = dist_v3(&c, center, 1.0, &cfg).unwrap();
        assert!((r.phi_star - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn v3_never_worse_than_v2() {
        let c = wide_curve(4.0);
        for k in 0..40 {
            let phi = -9.5 + 0.47 * k as f64;
            let center = c.eval_point(phi).unwrap() + Point3::new(0.3, 0.3, -0.4);
            let v2 = dist_v2(&c, center, phi, &DistanceConfig::new(Variant::V2)).unwrap();
            let v3 = dist_v3(&c, center, phi, &DistanceConfig::new(Variant::V3)).unwrap();
            assert!(v3.dist <= v2.dist + 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn oracle_on_curve_point() {
        let c = wide_curve(4.0);
        for phi in [-8.0, -1.0, 3.3, 9.7] {
            let r = oracle_nearest(&c, c.eval_point(phi).unwrap(), 2000);
            assert!(r.dist <= 1e-6, "phi={phi} dist={}", r.dist);
        }
    }

    #[test]
    fn oracle_circle_closed_form() {
        let params = CylCurveParams {
            a: 0.0,
            ..wide_params(2.0)
        };
        let c = ParametricCurve::cylindrical(params).unwrap();
        let center = Point3::new(50.0 + 42.0, 50.0, 50.0);
        let r = oracle_nearest(&c, center, 2000);
        assert!((r.dist - 2.0).abs() <= 1e-6);
    }

    #[test]
    fn oracle_bounds_all_variants() {
        let c = wide_curve(4.0);
        let cfg2 = DistanceConfig::new(Variant::V2);
        let cfg3 = DistanceConfig::new(Variant::V3);
        for k in 0..30 {
            let phi = -9.0 + 0.6 * k as f64;
            let center = c.eval_point(phi).unwrap() + Point3::new(0.5, -0.4, 0.3);
            let oracle = oracle_nearest(&c, center, 2000).dist;
            for dist in [
                dist_v1(&c, center, phi).unwrap().dist,
                dist_v2(&c, center, phi, &cfg2).unwrap().dist,
                dist_v3(&c, center, phi, &cfg3).unwrap().dist,
            ] {
                assert!(
                    oracle <= dist + 1e-9,
                    "phi={phi} oracle={oracle} est={dist}"
                );
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = DistanceConfig::new(Variant::V2);
        cfg.phi_d = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = DistanceConfig::new(Variant::V2);
        cfg.delta_phi = cfg.phi_d;
        assert!(cfg.validate().is_err());
        assert!(DistanceConfig::new(Variant::V2).validate().is_ok());
    }

    #[test]
    fn variant_labels_round_trip() {
        for v in [Variant::V1, Variant::V2, Variant::V3] {
            assert_eq!(v.label().parse::<Variant>().unwrap(), v);
        }
        assert!("v9".parse::<Variant>().is_err());
    }
}
