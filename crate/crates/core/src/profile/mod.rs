//! Spheres of revolution described by a profile curve `s -> (f(s), g(s))`.
//!
//! `f` is the distance to the rotation axis and `g` the height. The profile
//! parameter is not assumed to be arclength, so every formula carries the
//! `f'^2 + g'^2` factor explicitly.

mod pinched;
mod samples;
mod spec;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{bisect, golden_max};
use crate::spline::CubicSpline;

pub use pinched::PinchedProfile;
pub use samples::{read_profile_samples, write_profile_samples};
pub use spec::SurfaceSpec;

/// Curvature evaluation refuses points with `f` below this value.
pub const POLE_GUARD: f64 = 1e-9;

/// Profile values and derivatives at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet {
    pub f: f64,
    pub g: f64,
    pub df: f64,
    pub dg: f64,
    pub d2f: f64,
    pub d2g: f64,
}

impl ProfileJet {
    /// Squared speed of the profile parametrization.
    pub fn speed2(&self) -> f64 {
        self.df * self.df + self.dg * self.dg
    }

    /// Signed curvature of the meridian curve.
    pub fn meridian_curvature(&self) -> f64 {
        (self.df * self.d2g - self.dg * self.d2f) / self.speed2().powf(1.5)
    }

    /// Gaussian curvature, valid away from the poles.
    pub fn gaussian_curvature(&self) -> f64 {
        let v = self.speed2();
        -self.dg * (self.dg * self.d2f - self.d2g * self.df) / (self.f * v * v)
    }
}

pub type ProfileFn = Arc<dyn Fn(f64) -> ProfileJet + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Ellipsoid { b: f64 },
    Pinched(Box<PinchedProfile>),
    Sampled { f: CubicSpline, g: CubicSpline },
    Analytic(ProfileFn),
}

impl fmt::Debug for Shape {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Ellipsoid { b } => write!(out, "Ellipsoid {{ b: {b} }}"),
            Shape::Pinched(p) => write!(out, "Pinched {{ delta: {}, eps: {} }}", p.delta(), p.eps()),
            Shape::Sampled { .. } => write!(out, "Sampled"),
            Shape::Analytic(_) => write!(out, "Analytic"),
        }
    }
}

/// An immutable sphere of revolution.
#[derive(Clone, Debug)]
pub struct ProfileSurface {
    s_min: f64,
    s_max: f64,
    name: String,
    params: Vec<f64>,
    shape: Shape,
}

/// Which end of the profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pole {
    South,
    North,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub k_min: f64,
    pub k_max: f64,
    pub s_at_min: f64,
    pub s_at_max: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquatorInfo {
    pub s_e: f64,
    pub r_e: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IssueKind {
    EndpointRadius,
    NonPositiveRadius,
    NonPositiveCurvature,
    CriticalPointCount,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub s: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub grid_n: usize,
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn into_result(self) -> Result<()> {
        if self.passed {
            return Ok(());
        }
        let first = &self.issues[0];
        Err(Error::Validation(format!(
            "{} issue(s); first {:?} at s = {} (value {:e})",
            self.issues.len(),
            first.kind,
            first.s,
            first.value
        )))
    }
}

impl ProfileSurface {
    /// The unit round sphere.
    pub fn sphere() -> Self {
        let mut s = Self::ellipsoid(1.0).expect("b = 1 is valid");
        s.name = "sphere".into();
        s.params.clear();
        s
    }

    /// Ellipsoid of revolution `f = cos v`, `g = b sin v`.
    pub fn ellipsoid(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Precondition(format!("ellipsoid axis ratio must be positive, got {b}")));
        }
        Ok(Self {
            s_min: -FRAC_PI_2,
            s_max: FRAC_PI_2,
            name: "ellipsoid".into(),
            params: vec![b],
            shape: Shape::Ellipsoid { b },
        })
    }

    /// The δ-pinched sphere with an ellipsoidal equator band of half-width `eps`.
    pub fn pinched_sphere(delta: f64, eps: f64) -> Result<Self> {
        let p = PinchedProfile::new(delta, eps)?;
        let surface = Self {
            s_min: -FRAC_PI_2,
            s_max: FRAC_PI_2,
            name: "sdelta".into(),
            params: vec![delta, eps],
            shape: Shape::Pinched(Box::new(p)),
        };
        surface.validate(1024).into_result()?;
        let report = surface.curvature_report(1024)?;
        const PINCH_TOL: f64 = 1e-2;
        if (report.delta - delta).abs() > PINCH_TOL {
            return Err(Error::Validation(format!(
                "pinching {} differs from requested {} by more than {PINCH_TOL}; reduce eps",
                report.delta, delta
            )));
        }
        Ok(surface)
    }

    /// Interpolates tabulated `(s, f, g)` rows with clamped cubic splines.
    pub fn from_samples(rows: &[(f64, f64, f64)]) -> Result<Self> {
        samples::build(rows)
    }

    /// A surface given by an arbitrary closure returning the profile jet.
    pub fn analytic<F>(name: &str, params: Vec<f64>, s_min: f64, s_max: f64, jet: F) -> Result<Self>
    where
        F: Fn(f64) -> ProfileJet + Send + Sync + 'static,
    {
        if !(s_max > s_min) {
            return Err(Error::Precondition("profile interval must be non-empty".into()));
        }
        Ok(Self { s_min, s_max, name: name.into(), params, shape: Shape::Analytic(Arc::new(jet)) })
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Human-readable label such as `ellipsoid(b=2)`.
    pub fn label(&self) -> String {
        match (&self.shape, self.name.as_str()) {
            (_, "sphere") => "sphere".into(),
            (Shape::Ellipsoid { b }, _) => format!("ellipsoid(b={b})"),
            (Shape::Pinched(p), _) => format!("sdelta(delta={},eps={})", p.delta(), p.eps()),
            _ => self.name.clone(),
        }
    }

    pub fn eval(&self, s: f64) -> ProfileJet {
        match &self.shape {
            Shape::Ellipsoid { b } => {
                let (sv, cv) = s.sin_cos();
                ProfileJet { f: cv, g: b * sv, df: -sv, dg: b * cv, d2f: -cv, d2g: -b * sv }
            }
            Shape::Pinched(p) => p.eval(s),
            Shape::Sampled { f, g } => {
                let (fv, df, d2f) = f.eval(s);
                let (gv, dg, d2g) = g.eval(s);
                ProfileJet { f: fv, g: gv, df, dg, d2f, d2g }
            }
            Shape::Analytic(jet) => jet(s),
        }
    }

    /// Sorted parameters where the profile is less smooth than elsewhere.
    /// Quadratures that must be accurate near them split there.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.shape {
            Shape::Pinched(p) => p.joins(),
            Shape::Sampled { f, .. } => f.knots(),
            Shape::Ellipsoid { .. } | Shape::Analytic(_) => &[],
        }
    }

    /// Largest change in `s` per integration step that keeps the geodesic
    /// equations well resolved near `s`.
    pub fn step_limit(&self, s: f64) -> f64 {
        match &self.shape {
            Shape::Pinched(p) => p.step_limit(s),
            _ => f64::INFINITY,
        }
    }

    pub fn radius(&self, s: f64) -> f64 {
        self.eval(s).f
    }

    /// Gaussian curvature at an interior point.
    pub fn gaussian_curvature(&self, s: f64) -> Result<f64> {
        let j = self.eval(s);
        if j.f < POLE_GUARD {
            return Err(Error::PoleProximity { s, f: j.f });
        }
        Ok(j.gaussian_curvature())
    }

    /// Curvature at a pole, where the surface is umbilic and K equals the
    /// square of the meridian curvature.
    pub fn pole_curvature(&self, pole: Pole) -> f64 {
        let s = match pole {
            Pole::South => self.s_min,
            Pole::North => self.s_max,
        };
        let k = self.eval(s).meridian_curvature();
        k * k
    }

    /// Curvature, falling back to the pole limit inside the guard.
    fn curvature_or_limit(&self, s: f64) -> f64 {
        match self.gaussian_curvature(s) {
            Ok(k) => k,
            Err(_) => {
                let pole = if s - self.s_min < self.s_max - s { Pole::South } else { Pole::North };
                self.pole_curvature(pole)
            }
        }
    }

    fn interior_grid(&self, grid_n: usize) -> impl Iterator<Item = f64> + '_ {
        let span = self.s_max - self.s_min;
        (1..grid_n).map(move |i| self.s_min + span * i as f64 / grid_n as f64)
    }

    /// Extreme curvatures on a uniform grid, refined by golden-section search.
    pub fn curvature_report(&self, grid_n: usize) -> Result<CurvatureReport> {
        if grid_n < 64 {
            return Err(Error::Precondition(format!("curvature grid needs at least 64 points, got {grid_n}")));
        }
        let grid: Vec<f64> = self.interior_grid(grid_n).collect();
        let mut ks = Vec::with_capacity(grid.len());
        for &s in &grid {
            let k = self.curvature_or_limit(s);
            if !(k > 0.0) {
                return Err(Error::NonPositiveCurvature { s, k });
            }
            ks.push(k);
        }
        let span = self.s_max - self.s_min;
        let edge = 1e-7 * span;
        let refine = |i: usize, sign: f64| -> (f64, f64) {
            let lo = if i == 0 { self.s_min + edge } else { grid[i - 1] };
            let hi = if i + 1 == grid.len() { self.s_max - edge } else { grid[i + 1] };
            let (s, v) = golden_max(|s| sign * self.curvature_or_limit(s), lo, hi, 1e-12);
            let v = sign * v;
            if sign * v >= sign * ks[i] {
                (s, v)
            } else {
                (grid[i], ks[i])
            }
        };
        let i_min = argext(&ks, |a, b| a < b);
        let i_max = argext(&ks, |a, b| a > b);
        let (mut s_at_min, mut k_min) = refine(i_min, -1.0);
        let (mut s_at_max, mut k_max) = refine(i_max, 1.0);
        for (pole, s) in [(Pole::South, self.s_min), (Pole::North, self.s_max)] {
            let k = self.pole_curvature(pole);
            if k < k_min {
                k_min = k;
                s_at_min = s;
            }
            if k > k_max {
                k_max = k;
                s_at_max = s;
            }
        }
        if !(k_min > 0.0) {
            return Err(Error::NonPositiveCurvature { s: s_at_min, k: k_min });
        }
        Ok(CurvatureReport { k_min, k_max, s_at_min, s_at_max, delta: k_min / k_max })
    }

    /// Locates the unique maximum of `f`.
    pub fn equator(&self) -> Result<EquatorInfo> {
        let grid_n = 2048;
        let mut prev_s = self.s_min;
        let mut prev = self.eval(self.s_min).df;
        let mut changes = Vec::new();
        for s in self.interior_grid(grid_n).chain(std::iter::once(self.s_max)) {
            let d = self.eval(s).df;
            if d == 0.0 && s < self.s_max {
                // Exact zero on a grid point: count it once, at the next sign.
                continue;
            }
            if (d < 0.0) != (prev < 0.0) {
                changes.push((prev_s, s));
            }
            prev = d;
            prev_s = s;
        }
        if changes.len() != 1 {
            let first = changes.first().map_or(f64::NAN, |c| c.0);
            return Err(Error::MultipleCriticalPoints { count: changes.len(), first });
        }
        let (lo, hi) = changes[0];
        let s_e = bisect(|s| self.eval(s).df, lo, hi, 0.0).expect("bracket from a sign change");
        Ok(EquatorInfo { s_e, r_e: self.eval(s_e).f })
    }

    /// Checks endpoint radii, interior positivity, curvature and the single equator.
    pub fn validate(&self, grid_n: usize) -> ValidationReport {
        let mut issues = Vec::new();
        let scale = self.interior_grid(grid_n.max(8)).map(|s| self.eval(s).f.abs()).fold(0.0, f64::max).max(1.0);
        for s in [self.s_min, self.s_max] {
            let f = self.eval(s).f;
            if f.abs() > 1e-9 * scale {
                issues.push(ValidationIssue { kind: IssueKind::EndpointRadius, s, value: f });
            }
        }
        let mut prev_df: Option<f64> = None;
        let mut sign_changes = 0usize;
        let mut first_change = f64::NAN;
        for s in self.interior_grid(grid_n.max(8)) {
            let j = self.eval(s);
            if !(j.f > 0.0) {
                issues.push(ValidationIssue { kind: IssueKind::NonPositiveRadius, s, value: j.f });
                continue;
            }
            let k = self.curvature_or_limit(s);
            if !(k > 0.0) {
                issues.push(ValidationIssue { kind: IssueKind::NonPositiveCurvature, s, value: k });
            }
            if j.df != 0.0 {
                if let Some(p) = prev_df {
                    if (p < 0.0) != (j.df < 0.0) {
                        sign_changes += 1;
                        if first_change.is_nan() {
                            first_change = s;
                        }
                    }
                }
                prev_df = Some(j.df);
            }
        }
        if sign_changes != 1 {
            issues.push(ValidationIssue {
                kind: IssueKind::CriticalPointCount,
                s: first_change,
                value: sign_changes as f64,
            });
        }
        ValidationReport { passed: issues.is_empty(), grid_n, issues }
    }
}

fn argext(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if better(v, values[best]) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sphere_has_unit_curvature() {
        let s = ProfileSurface::sphere();
        assert!((s.gaussian_curvature(0.3).unwrap() - 1.0).abs() < 1e-14);
        let r = s.curvature_report(256).unwrap();
        assert!((r.delta - 1.0).abs() < 1e-12);
        let e = s.equator().unwrap();
        assert!(e.s_e.abs() < 1e-15 && (e.r_e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ellipsoid_curvature_matches_closed_form() {
        let s = ProfileSurface::ellipsoid(2.0).unwrap();
        let k = s.gaussian_curvature(std::f64::consts::FRAC_PI_4).unwrap();
        assert!((k - 0.64).abs() < 1e-13);
        assert!((s.gaussian_curvature(0.0).unwrap() - 0.25).abs() < 1e-14);
        let near_pole = s.gaussian_curvature(FRAC_PI_2 - 1e-4).unwrap();
        assert!((near_pole - 4.0).abs() < 1e-3);
        assert!((s.pole_curvature(Pole::North) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pole_guard_is_enforced() {
        let s = ProfileSurface::ellipsoid(2.0).unwrap();
        assert!(matches!(s.gaussian_curvature(FRAC_PI_2), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn curvature_grid_minimum() {
        let s = ProfileSurface::sphere();
        assert!(s.curvature_report(16).is_err());
    }

    #[test]
    fn oblate_ellipsoid_extremes_swap() {
        let s = ProfileSurface::ellipsoid(0.5).unwrap();
        let r = s.curvature_report(128).unwrap();
        assert!((r.k_max - 4.0).abs() < 1e-10, "{r:?}");
        assert!((r.k_min - 0.25).abs() < 1e-10);
    }

    #[test]
    fn validation_flags_dumbbell() {
        // Pinched waist gives negative curvature and three critical points.
        let s = ProfileSurface::analytic("dumbbell", vec![], -FRAC_PI_2, FRAC_PI_2, |v| {
            let (sv, cv) = v.sin_cos();
            let w = 1.0 - 0.8 * cv * cv;
            let dw = 1.6 * cv * sv;
            let d2w = 1.6 * (cv * cv - sv * sv);
            ProfileJet {
                f: cv * w,
                g: sv,
                df: -sv * w + cv * dw,
                dg: cv,
                d2f: -cv * w - 2.0 * sv * dw + cv * d2w,
                d2g: -sv,
            }
        })
        .unwrap();
        let rep = s.validate(512);
        assert!(!rep.passed);
        assert!(rep.issues.iter().any(|i| i.kind == IssueKind::NonPositiveCurvature));
        assert!(rep.issues.iter().any(|i| i.kind == IssueKind::CriticalPointCount));
        assert!(s.equator().is_err());
    }
}
