//! Parametric space curves: point and tangent evaluation, plus the
//! cylindrical-oscillation curve used by the built-in experiments.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::point::Point3;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Tolerance applied to parameter range checks.
pub const PARAM_TOL: f64 = 1e-9;

/// Default finite-difference step for tangent estimation.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Curve tangent vector, in grid units per unit of parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub gx: f64,
    pub gy: f64,
    pub gz: f64,
}

impl Tangent {
    pub const fn new(gx: f64, gy: f64, gz: f64) -> Self {
        Tangent { gx, gy, gz }
    }

    pub fn norm(self) -> f64 {
        (self.gx * self.gx + self.gy * self.gy + self.gz * self.gz).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.gx.is_finite() && self.gy.is_finite() && self.gz.is_finite()
    }
}

type PointFn = dyn Fn(f64) -> Point3 + Send + Sync;
type TangentFn = dyn Fn(f64) -> Tangent + Send + Sync;
type ProjectionFn = dyn Fn(Point3, f64) -> Result<f64> + Send + Sync;

/// A space curve given by a point function of a scalar parameter over a
/// closed range, optionally with an analytic tangent and a parameter
/// projection (an inverse that estimates the parameter nearest a 3D point).
#[derive(Clone)]
pub struct ParametricCurve {
    point_fn: Arc<PointFn>,
    tangent_fn: Option<Arc<TangentFn>>,
    projection_fn: Option<Arc<ProjectionFn>>,
    phi_min: f64,
    phi_max: f64,
}

impl std::fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("phi_min", &self.phi_min)
            .field("phi_max", &self.phi_max)
            .field("analytic_tangent", &self.tangent_fn.is_some())
            .field("projection", &self.projection_fn.is_some())
            .finish()
    }
}

impl ParametricCurve {
    pub fn new<F>(phi_min: f64, phi_max: f64, point_fn: F) -> Result<Self>
    where
        F: Fn(f64) -> Point3 + Send + Sync + 'static,
    {
        if !(phi_min.is_finite() && phi_max.is_finite() && phi_min < phi_max) {
            return Err(Error::InvalidConfig(format!(
                "parameter range [{phi_min}, {phi_max}] is not a finite nonempty interval"
            )));
        }
        Ok(ParametricCurve {
            point_fn: Arc::new(point_fn),
            tangent_fn: None,
            projection_fn: None,
            phi_min,
            phi_max,
        })
    }

    pub fn with_analytic_tangent<F>(mut self, tangent_fn: F) -> Self
    where
        F: Fn(f64) -> Tangent + Send + Sync + 'static,
    {
        self.tangent_fn = Some(Arc::new(tangent_fn));
        self
    }

    pub fn with_projection<F>(mut self, projection_fn: F) -> Self
    where
        F: Fn(Point3, f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.projection_fn = Some(Arc::new(projection_fn));
        self
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_min
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn has_analytic_tangent(&self) -> bool {
        self.tangent_fn.is_some()
    }

    pub fn has_projection(&self) -> bool {
        self.projection_fn.is_some()
    }

    fn check_param(&self, phi: f64) -> Result<f64> {
        if !phi.is_finite() || phi < self.phi_min - PARAM_TOL || phi > self.phi_max + PARAM_TOL {
            return Err(Error::ParameterOutOfRange {
                phi,
                min: self.phi_min,
                max: self.phi_max,
            });
        }
        Ok(phi.clamp(self.phi_min, self.phi_max))
    }

    /// Curve point at `phi`. Rejects parameters outside the range beyond
    /// a 1e-9 tolerance; within tolerance the parameter is clamped.
    pub fn eval_point(&self, phi: f64) -> Result<Point3> {
        let phi = self.check_param(phi)?;
        Ok((self.point_fn)(phi))
    }

    /// Analytic tangent at `phi`, if the curve provides one.
    pub fn tangent_analytic(&self, phi: f64) -> Result<Tangent> {
        let f = self.tangent_fn.as_ref().ok_or(Error::NoAnalyticTangent)?;
        let phi = self.check_param(phi)?;
        Ok(f(phi))
    }

    /// First-difference tangent with step `h`: right difference in the
    /// interior, left difference when `phi + h` leaves the range.
    pub fn tangent_fd(&self, phi: f64, h: f64) -> Result<Tangent> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let phi = self.check_param(phi)?;
        let (a, b) = if phi + h <= self.phi_max + PARAM_TOL {
            (phi, phi + h)
        } else if phi - h >= self.phi_min - PARAM_TOL {
            (phi - h, phi)
        } else {
            return Err(Error::ParameterOutOfRange {
                phi,
                min: self.phi_min,
                max: self.phi_max,
            });
        };
        let d = self.eval_point(b)? - self.eval_point(a)?;
        Ok(Tangent::new(d.x / h, d.y / h, d.z / h))
    }

    /// Analytic tangent when available, first-difference otherwise.
    pub fn tangent_preferred(&self, phi: f64) -> Result<Tangent> {
        if self.tangent_fn.is_some() {
            self.tangent_analytic(phi)
        } else {
            self.tangent_fd(phi, DEFAULT_FD_STEP)
        }
    }

    /// Estimates the parameter of the curve point nearest `point`, using the
    /// curve's projection and a current-parameter hint for branch selection.
    pub fn project_param(&self, point: Point3, phi_hint: f64) -> Result<f64> {
        let f = self
            .projection_fn
            .as_ref()
            .ok_or(Error::ProjectionUnavailable)?;
        f(point, phi_hint)
    }

    /// Checks that `n_samples` uniformly spaced curve points stay inside the
    /// closed volume [0, h]^3 of `grid`.
    pub fn check_in_volume(&self, grid: &Grid, n_samples: usize) -> Result<()> {
        let n = n_samples.max(2);
        let h = grid.h() as f64;
        let span = self.phi_max - self.phi_min;
        for k in 0..n {
            let phi = self.phi_min + span * (k as f64) / ((n - 1) as f64);
            let p = self.eval_point(phi)?;
            let inside = p.is_finite()
                && (0.0..=h).contains(&p.x)
                && (0.0..=h).contains(&p.y)
                && (0.0..=h).contains(&p.z);
            if !inside {
                return Err(Error::InvalidConfig(format!(
                    "curve leaves the volume at phi={phi:.6}: ({:.3}, {:.3}, {:.3}) \
                     outside [0, {h}]^3",
                    p.x, p.y, p.z
                )));
            }
        }
        Ok(())
    }

    /// Cylindrical oscillation curve: a circle of radius `r` around the axis
    /// (x0, y0) with a cosine height oscillation of amplitude `a` and
    /// frequency `omega`, traversed over `[phi_min, phi_max]` radians.
    pub fn cylindrical(params: CylCurveParams) -> Result<Self> {
        params.validate()?;
        let p = params;
        ParametricCurve::new(p.phi_min, p.phi_max, move |phi| p.eval(phi)).map(|c| {
            c.with_analytic_tangent(move |phi| p.tangent(phi))
                .with_projection(move |point, hint| p.project(point, hint))
        })
    }
}

/// Start angle of the built-in reference curve, radians.
pub const REFERENCE_PHI_MIN: f64 = -10.0;

/// Parameters of the cylindrical oscillation curve.
///
/// Deserialization fills missing fields from the resolution-128 built-in
/// curve, so terse experiment records stay valid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CylCurveParams {
    /// Cylinder radius, grid units.
    pub r: f64,
    /// Height oscillation amplitude, grid units.
    pub a: f64,
    /// Oscillation frequency: multiplier of the angular parameter.
    pub omega: f64,
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    /// Parameter range, radians.
    pub phi_min: f64,
    pub phi_max: f64,
}

impl CylCurveParams {
    /// Built-in curve for a given resolution: at h=128 a radius-40 circle
    /// with amplitude 40 around offset 50, scaled proportionally for other
    /// resolutions. The range spans exactly one revolution starting at
    /// [`REFERENCE_PHI_MIN`], so for integer `omega` the curve closes on
    /// itself and the tracer walks the full loop.
    pub fn reference(resolution: u32, omega: f64) -> CylCurveParams {
        let s = resolution as f64 / 128.0;
        CylCurveParams {
            r: 40.0 * s,
            a: 40.0 * s,
            omega,
            x0: 50.0 * s,
            y0: 50.0 * s,
            z0: 50.0 * s,
            phi_min: REFERENCE_PHI_MIN,
            phi_max: REFERENCE_PHI_MIN + TAU,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.r,
            self.a,
            self.omega,
            self.x0,
            self.y0,
            self.z0,
            self.phi_min,
            self.phi_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidConfig(
                "curve parameters must be finite".into(),
            ));
        }
        if self.r <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "cylinder radius must be positive, got {}",
                self.r
            )));
        }
        if self.a < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "oscillation amplitude must be non-negative, got {}",
                self.a
            )));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "oscillation frequency must be non-negative, got {}",
                self.omega
            )));
        }
        if self.phi_min >= self.phi_max {
            return Err(Error::InvalidConfig(format!(
                "parameter range [{}, {}] is empty",
                self.phi_min, self.phi_max
            )));
        }
        Ok(())
    }

    pub fn eval(&self, phi: f64) -> Point3 {
        Point3::new(
            self.x0 + self.r * phi.cos(),
            self.y0 + self.r * phi.sin(),
            self.z0 + self.a * (1.0 - (self.omega * phi).cos()),
        )
    }

    pub fn tangent(&self, phi: f64) -> Tangent {
        Tangent::new(
            -self.r * phi.sin(),
            self.r * phi.cos(),
            self.omega * self.a * (self.omega * phi).sin(),
        )
    }

    /// Azimuthal parameter projection: the angle of `point` around the
    /// cylinder axis, unwrapped to the whole turn nearest `phi_hint` and
    /// clamped into the parameter range.
    pub fn project(&self, point: Point3, phi_hint: f64) -> Result<f64> {
        let dx = point.x - self.x0;
        let dy = point.y - self.y0;
        if dx == 0.0 && dy == 0.0 {
            return Err(Error::OnAxis {
                x: point.x,
                y: point.y,
                z: point.z,
            });
        }
        let base = dy.atan2(dx);
        let k = ((phi_hint - base) / TAU).round();
        let phi = base + k * TAU;
        Ok(phi.clamp(self.phi_min, self.phi_max))
    }
}

impl Default for CylCurveParams {
    fn default() -> Self {
        CylCurveParams::reference(128, 2.0)
    }
}
