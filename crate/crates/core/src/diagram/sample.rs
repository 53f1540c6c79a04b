//! Diagrams of closed geodesics on the round sphere.
//!
//! A point `(u, s)` of the surface is sent to longitude `u` and a latitude
//! that depends only on `s`, linearly on each side of the equator, so that
//! the equator and the poles are kept. This is a homeomorphism, so the
//! crossing pattern of every geodesic is preserved.

use std::f64::consts::{FRAC_PI_2, TAU};

use super::curve::SphericalCurve;
use super::geometry::Vec3;
use crate::error::{Error, Result};
use crate::linking::EquatorOrientation;
use crate::ode::{detect_closure, Flow, GeodesicState, OdeOptions};
use crate::profile::{EquatorInfo, ProfileSurface};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleOptions {
    /// Vertices per half swing, between consecutive equator crossings.
    pub pts_per_swing: usize,
    pub closure_tol: f64,
    pub max_pairs: usize,
    pub ode: OdeOptions,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { pts_per_swing: 96, closure_tol: 1e-6, max_pairs: 50, ode: OdeOptions::default() }
    }
}

fn latitude(surface: &ProfileSurface, eq: &EquatorInfo, s: f64) -> f64 {
    if s >= eq.s_e {
        FRAC_PI_2 * ((s - eq.s_e) / (surface.s_max() - eq.s_e)).min(1.0)
    } else {
        -FRAC_PI_2 * ((s - eq.s_e) / (surface.s_min() - eq.s_e)).min(1.0)
    }
}

fn on_sphere(lat: f64, lon: f64) -> Vec3 {
    let (sl, cl) = lat.sin_cos();
    Vec3::new(cl * lon.cos(), cl * lon.sin(), sl)
}

/// Diagram of the closed geodesic at level `c`, launched from longitude 0.
pub fn sample_closed_geodesic(surface: &ProfileSurface, c: f64, pts_per_swing: usize) -> Result<SphericalCurve> {
    sample_geodesic_with_offset(surface, c, 0.0, &SampleOptions { pts_per_swing, ..Default::default() })
}

/// Diagram of the closed geodesic at level `c` launched northward from the
/// equator at longitude `u0`. Vertices sit at the midpoints of equal time
/// steps, so none of them lies on the equator.
pub fn sample_geodesic_with_offset(surface: &ProfileSurface, c: f64, u0: f64, opts: &SampleOptions) -> Result<SphericalCurve> {
    if opts.pts_per_swing < 4 {
        return Err(Error::Precondition(format!("need at least 4 points per swing, got {}", opts.pts_per_swing)));
    }
    let eq = surface.equator()?;
    let closure = detect_closure(surface, c, opts.max_pairs, opts.closure_tol, opts.ode)?;
    if !closure.closed {
        return Err(Error::ClosureResidual { residual: closure.residual, tol: opts.closure_tol });
    }
    let period = closure.period_length;
    let n = opts.pts_per_swing * 2 * closure.q as usize;
    let times: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * period / n as f64).collect();
    let start = GeodesicState::on_equator(surface, &eq, c, u0)?;
    let mut flow = Flow::new(surface, eq.s_e, start, opts.ode);
    let mut points = Vec::with_capacity(n);
    let mut next = 0;
    while next < n {
        let (segment, _) = flow.advance()?;
        while next < n && times[next] <= segment.t_to {
            let st = segment.state_at(times[next]);
            points.push(on_sphere(latitude(surface, &eq, st.s), st.u));
            next += 1;
        }
    }
    SphericalCurve::new(points)
}

/// Circle of constant latitude, eastward for `Plus`.
pub fn latitude_circle(lat: f64, orientation: EquatorOrientation, n: usize, phase: f64) -> Result<SphericalCurve> {
    if n < 3 {
        return Err(Error::Precondition("a circle needs at least 3 vertices".into()));
    }
    let dir = orientation.sign() as f64;
    SphericalCurve::new((0..n).map(|k| on_sphere(lat, dir * (phase + TAU * (k as f64 + 0.5) / n as f64))).collect())
}

/// Diagram of an oriented equator.
pub fn equator_curve(orientation: EquatorOrientation, n: usize) -> Result<SphericalCurve> {
    latitude_circle(0.0, orientation, n, 0.0)
}
