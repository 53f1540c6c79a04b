//! The δ-pinched sphere.
//!
//! The profile is parametrized by the angle `phi` between the outward normal
//! and the equatorial plane, so the meridian is determined by its radius of
//! curvature `rho(phi)` through `f' = -rho sin phi`, `g' = rho cos phi`.
//!
//! * `|phi| <= phi1`: the meridian of the ellipsoid with axis ratio
//!   `b = 1/sqrt(delta)`, restricted to its ellipsoid-parameter band `|v| <= eps`.
//! * `phi1 <= |phi| <= 2 phi1`: `rho` blends from the ellipsoid value to a
//!   constant `R` with a quintic smoothstep.
//! * `|phi| >= 2 phi1`: a round cap of radius `R`.
//!
//! `R` is fixed by requiring the meridian to reach the axis exactly at the
//! poles. Since `K = cos(phi) / (rho f)` never exceeds its value on the cap,
//! the pinching is `delta R^2`.

use crate::error::{Error, Result};
use crate::profile::ProfileJet;
use crate::quadrature::{adaptive, GaussLegendre};

#[derive(Clone, Debug)]
pub struct PinchedProfile {
    delta: f64,
    eps: f64,
    b: f64,
    phi1: f64,
    phi2: f64,
    cap_radius: f64,
    f_at_phi2: f64,
    g_at_phi1: f64,
    g_at_phi2: f64,
    joins: [f64; 4],
}

fn smoothstep(x: f64) -> (f64, f64) {
    let x = x.clamp(0.0, 1.0);
    let w = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    let dw = 30.0 * x * x * (1.0 - x) * (1.0 - x);
    (w, dw)
}

impl PinchedProfile {
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Precondition(format!("pinching must lie in (0, 1], got {delta}")));
        }
        if !(eps > 0.0 && eps <= 0.15) {
            return Err(Error::Precondition(format!("band half-width must lie in (0, 0.15], got {eps}")));
        }
        let b = 1.0 / delta.sqrt();
        let phi1 = (eps.tan() / b).atan();
        let phi2 = 2.0 * phi1;
        let mut p = Self {
            delta,
            eps,
            b,
            phi1,
            phi2,
            cap_radius: 1.0,
            f_at_phi2: 0.0,
            g_at_phi1: 0.0,
            g_at_phi2: 0.0,
            joins: [-phi2, -phi1, phi1, phi2],
        };
        let tol = 1e-15;
        let keep = adaptive(|a| (1.0 - p.weight(a).0) * p.ellipsoid_rho(a).0 * a.sin(), phi1, phi2, tol, 1e-17)?.value;
        let blend = adaptive(|a| p.weight(a).0 * a.sin(), phi1, phi2, tol, 1e-17)?.value;
        let (f1, g1) = p.ellipsoid_fg(phi1);
        p.cap_radius = (f1 - keep) / (phi2.cos() + blend);
        if !(p.cap_radius > 0.0) {
            return Err(Error::Validation(format!("cap radius {} is not positive", p.cap_radius)));
        }
        p.f_at_phi2 = p.cap_radius * phi2.cos();
        p.g_at_phi1 = g1;
        p.g_at_phi2 = g1 + adaptive(|a| p.rho(a).0 * a.cos(), phi1, phi2, tol, 1e-17)?.value;
        Ok(p)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Radius of the round polar caps.
    pub fn cap_radius(&self) -> f64 {
        self.cap_radius
    }

    /// Normal angle where the ellipsoidal band ends.
    pub fn band_edge(&self) -> f64 {
        self.phi1
    }

    /// Normal angles where the curvature radius is only twice differentiable.
    pub fn joins(&self) -> &[f64] {
        &self.joins
    }

    /// Largest change in `phi` per integration step that resolves the blend
    /// at normal angle `phi`. Inside the blend `rho'` is large, so small
    /// errors in `phi` turn into large errors in the speed.
    pub fn step_limit(&self, phi: f64) -> f64 {
        const STEPS_PER_BLEND: f64 = 32.0;
        let margin = 1e-6;
        let a = phi.abs();
        if a < self.phi1 - margin || a > self.phi2 + margin {
            return f64::INFINITY;
        }
        (self.phi2 - self.phi1) / STEPS_PER_BLEND
    }

    fn weight(&self, a: f64) -> (f64, f64) {
        let span = self.phi2 - self.phi1;
        let (w, dw) = smoothstep((a - self.phi1) / span);
        (w, dw / span)
    }

    /// Meridian radius of curvature of the ellipsoid and its derivative, for `a >= 0`.
    fn ellipsoid_rho(&self, a: f64) -> (f64, f64) {
        let b2 = self.b * self.b;
        let (sa, ca) = a.sin_cos();
        let q = ca * ca + b2 * sa * sa;
        let rho = b2 / q.powf(1.5);
        let drho = -3.0 * b2 * (b2 - 1.0) * sa * ca / q.powf(2.5);
        (rho, drho)
    }

    fn ellipsoid_fg(&self, a: f64) -> (f64, f64) {
        let b2 = self.b * self.b;
        let (sa, ca) = a.sin_cos();
        let d = (ca * ca + b2 * sa * sa).sqrt();
        (ca / d, b2 * sa / d)
    }

    /// `rho` and its derivative for a non-negative normal angle.
    fn rho(&self, a: f64) -> (f64, f64) {
        if a <= self.phi1 {
            self.ellipsoid_rho(a)
        } else if a >= self.phi2 {
            (self.cap_radius, 0.0)
        } else {
            let (re, dre) = self.ellipsoid_rho(a);
            let (w, dw) = self.weight(a);
            let r = self.cap_radius;
            ((1.0 - w) * re + w * r, (1.0 - w) * dre + dw * (r - re))
        }
    }

    pub fn eval(&self, phi: f64) -> ProfileJet {
        let a = phi.abs();
        let sign = if phi < 0.0 { -1.0 } else { 1.0 };
        let (rho, drho_abs) = self.rho(a);
        let drho = sign * drho_abs;
        let (f, g_abs) = if a <= self.phi1 {
            self.ellipsoid_fg(a)
        } else if a >= self.phi2 {
            (self.cap_radius * a.cos(), self.g_at_phi2 + self.cap_radius * (a.sin() - self.phi2.sin()))
        } else {
            let rule = GaussLegendre::shared();
            let f = self.f_at_phi2 + rule.integrate(|t| self.rho(t).0 * t.sin(), a, self.phi2);
            let g = self.g_at_phi1 + rule.integrate(|t| self.rho(t).0 * t.cos(), self.phi1, a);
            (f, g)
        };
        let (sp, cp) = phi.sin_cos();
        ProfileJet {
            f,
            g: sign * g_abs,
            df: -rho * sp,
            dg: rho * cp,
            d2f: -drho * sp - rho * cp,
            d2g: drho * cp - rho * sp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_pinching_is_round() {
        let p = PinchedProfile::new(1.0, 0.1).unwrap();
        assert!((p.cap_radius() - 1.0).abs() < 1e-13);
        for phi in [-1.2, -0.15, 0.0, 0.13, 0.9] {
            let j = p.eval(phi);
            assert!((j.f - f64::cos(phi)).abs() < 1e-13);
            assert!((j.g - f64::sin(phi)).abs() < 1e-13);
        }
    }

    #[test]
    fn profile_is_continuous_at_the_joins() {
        let p = PinchedProfile::new(0.2, 0.1).unwrap();
        for edge in [p.phi1, p.phi2] {
            let lo = p.eval(edge - 1e-12);
            let hi = p.eval(edge + 1e-12);
            assert!((lo.f - hi.f).abs() < 1e-11);
            assert!((lo.g - hi.g).abs() < 1e-11);
            assert!((lo.d2f - hi.d2f).abs() < 1e-9);
        }
        assert!(p.eval(std::f64::consts::FRAC_PI_2).f.abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = PinchedProfile::new(0.3, 0.12).unwrap();
        let h = 1e-6;
        for phi in [0.05, 0.2, 0.31, 1.0, -0.25] {
            let j = p.eval(phi);
            let jp = p.eval(phi + h);
            let jm = p.eval(phi - h);
            assert!(((jp.f - jm.f) / (2.0 * h) - j.df).abs() < 1e-8, "df at {phi}");
            assert!(((jp.g - jm.g) / (2.0 * h) - j.dg).abs() < 1e-8, "dg at {phi}");
            assert!(((jp.df - jm.df) / (2.0 * h) - j.d2f).abs() < 1e-7, "d2f at {phi}");
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(PinchedProfile::new(0.0, 0.1).is_err());
        assert!(PinchedProfile::new(1.2, 0.1).is_err());
        assert!(PinchedProfile::new(0.5, 0.2).is_err());
    }
}
