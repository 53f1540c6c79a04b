//! The equator return map of the geodesic flow, computed from Clairaut's
//! first integral `f cos(theta) = c`.
//!
//! A geodesic at level `c` oscillates between the parallels where `f = |c|`.
//! Between two consecutive equator crossings it advances in longitude by
//!
//! ```text
//! du = 2 |c| ∫ sqrt(f'^2 + g'^2) / (f sqrt(f^2 - c^2)) ds
//! ```
//!
//! over one hemisphere. The integrand has an inverse square root at the
//! turning point; the substitution `s = s_e + (s* - s_e) sin(t)` removes it.

mod ellipsoid;
mod verdict;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::profile::{EquatorInfo, ProfileSurface};
use crate::quadrature::{adaptive, GaussLegendre};
use crate::roots::{bisect, richardson_halving};

pub use ellipsoid::{ellipsoid_half_advance, EllipsoidForm};
pub use verdict::{critical_ellipsoid_b, Argmax, ClosedLevel, SupResult, Verdict, VerdictStatus, Witness};

/// Numerical settings shared by the return-map computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClairautConfig {
    /// Relative error target for each quadrature.
    pub quad_tol: f64,
    /// Number of interior levels scanned in `(0, r_e)`.
    pub grid_n: usize,
    /// Margin below `2 pi` required for a left-handed verdict.
    pub verdict_tol: f64,
    /// Phase-space tolerance for confirming closed geodesics.
    pub closure_tol: f64,
    pub closure_max_pairs: usize,
    pub ode: OdeOptions,
}

impl Default for ClairautConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            grid_n: 512,
            verdict_tol: 1e-6,
            closure_tol: 1e-8,
            closure_max_pairs: 50,
            ode: OdeOptions::default(),
        }
    }
}

/// A Clairaut level with its turning parallels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClairautLevel {
    pub c: f64,
    /// Angle with the eastward equator at a south-to-north crossing.
    pub theta_e: f64,
    pub turning_s_north: f64,
    pub turning_s_south: f64,
}

/// Longitude advances and durations of the two half swings at one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwingData {
    pub delta_u_north: f64,
    pub delta_u_south: f64,
    pub mean_delta_u: f64,
    pub t_half_north: f64,
    pub t_half_south: f64,
}

impl SwingData {
    pub fn mean_t_half(&self) -> f64 {
        0.5 * (self.t_half_north + self.t_half_south)
    }
}

/// Asymptotic direction of the flow on an invariant torus: longitudinal
/// turns and equator crossings per unit length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TorusSlope {
    pub x: f64,
    pub y: f64,
}

/// Extrapolated advance as the level approaches the equator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquatorLimit {
    pub value: f64,
    pub error_estimate: f64,
    /// `pi / (r_e sqrt(K_e))`, the small-oscillation prediction.
    pub conjectured: f64,
    pub agrees_with_conjecture: bool,
}

/// Below this distance from the turning point, `f - |c|` is obtained by
/// integrating `f'` rather than by subtraction.
const NEAR_TURN: f64 = 0.1;

fn short_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

/// Fixed-order rule applied separately on each piece of `[lo, hi]` cut by `breaks`.
fn split_integral<F: FnMut(f64) -> f64>(rule: &GaussLegendre, breaks: &[f64], mut f: F, lo: f64, hi: f64) -> f64 {
    let first = breaks.partition_point(|&x| x <= lo);
    let mut a = lo;
    let mut sum = 0.0;
    for &x in breaks[first..].iter().take_while(|&&x| x < hi) {
        sum += rule.integrate(&mut f, a, x);
        a = x;
    }
    sum + rule.integrate(&mut f, a, hi)
}

/// Return-map calculator bound to one surface.
pub struct ClairautMap<'a> {
    surface: &'a ProfileSurface,
    equator: EquatorInfo,
    config: ClairautConfig,
    grid: OnceLock<Vec<(f64, f64)>>,
}

impl<'a> ClairautMap<'a> {
    pub fn new(surface: &'a ProfileSurface, config: ClairautConfig) -> Result<Self> {
        let equator = surface.equator()?;
        Ok(Self { surface, equator, config, grid: OnceLock::new() })
    }

    pub fn surface(&self) -> &'a ProfileSurface {
        self.surface
    }

    pub fn equator(&self) -> EquatorInfo {
        self.equator
    }

    pub fn config(&self) -> &ClairautConfig {
        &self.config
    }

    fn check_level(&self, c: f64) -> Result<()> {
        if c == 0.0 || !(c.abs() < self.equator.r_e) {
            return Err(Error::LevelOutOfRange { c, r_e: self.equator.r_e });
        }
        Ok(())
    }

    pub fn level(&self, c: f64) -> Result<ClairautLevel> {
        self.check_level(c)?;
        let a = c.abs();
        let s = self.surface;
        let gap = |x: f64| s.eval(x).f - a;
        let EquatorInfo { s_e, r_e } = self.equator;
        let north = bisect(gap, s_e, s.s_max(), 0.0).ok_or(Error::LevelOutOfRange { c, r_e })?;
        let south = bisect(gap, s.s_min(), s_e, 0.0).ok_or(Error::LevelOutOfRange { c, r_e })?;
        Ok(ClairautLevel { c, theta_e: (c / r_e).acos(), turning_s_north: north, turning_s_south: south })
    }

    /// Longitude advance and duration of the quarter swing from the equator
    /// to the turning parallel at `s_turn`.
    fn quarter(&self, a: f64, s_turn: f64) -> Result<(f64, f64)> {
        let s_e = self.equator.s_e;
        let span = s_turn - s_e;
        let len = span.abs();
        let surface = self.surface;
        let rule = short_rule();
        let breaks = surface.breakpoints();
        let point = |t: f64| {
            // s = s_e + span sin t, written to keep full precision near the turning point.
            let w = (0.5 * (FRAC_PI_2 - t)).sin();
            let d = span * 2.0 * w * w;
            let s = s_turn - d;
            let j = surface.eval(s);
            // f(s) - |c| without cancellation: integrate f' back from the turning
            // point, which is taken as an exact root. Keeping the rounding residue
            // f(s*) - |c| would put an O(sqrt(eps)) error into the integral.
            let above = if d.abs() < NEAR_TURN {
                // Divide by the rounded interval length, but scale by the exact
                // `d`: once `d` is a few ulps of `s`, mixing the two makes the
                // integrand jump between representable points.
                let width = (s_turn - s).abs();
                let mean_slope = if width > 0.0 {
                    split_integral(rule, breaks, |x| surface.eval(x).df, s.min(s_turn), s.max(s_turn)) / width
                } else {
                    surface.eval(s_turn).df
                };
                -d * mean_slope
            } else {
                j.f - a
            };
            let gap = above.max(0.0) * (j.f + a);
            (j, gap.sqrt(), len * t.cos())
        };
        let tol = self.config.quad_tol;
        let du = adaptive(
            |t| {
                let (j, root, jac) = point(t);
                if root == 0.0 {
                    return 0.0;
                }
                a * j.speed2().sqrt() / (j.f * root) * jac
            },
            0.0,
            FRAC_PI_2,
            tol,
            1e-300,
        )?;
        let dt = adaptive(
            |t| {
                let (j, root, jac) = point(t);
                if root == 0.0 {
                    return 0.0;
                }
                j.f * j.speed2().sqrt() / root * jac
            },
            0.0,
            FRAC_PI_2,
            tol,
            1e-300,
        )?;
        Ok((du.value, dt.value))
    }

    /// Half-swing advances at level `c`.
    pub fn swing(&self, c: f64) -> Result<SwingData> {
        let level = self.level(c)?;
        let a = c.abs();
        let sign = c.signum();
        let (du_n, t_n) = self.quarter(a, level.turning_s_north)?;
        let (du_s, t_s) = self.quarter(a, level.turning_s_south)?;
        let delta_u_north = 2.0 * sign * du_n;
        let delta_u_south = 2.0 * sign * du_s;
        Ok(SwingData {
            delta_u_north,
            delta_u_south,
            mean_delta_u: 0.5 * (delta_u_north + delta_u_south),
            t_half_north: 2.0 * t_n,
            t_half_south: 2.0 * t_s,
        })
    }

    /// The meridian, with the longitude jumping by `pi` at each pole.
    pub fn meridian_swing(&self) -> Result<SwingData> {
        let s = self.surface;
        let s_e = self.equator.s_e;
        let tol = self.config.quad_tol;
        let speed = |x: f64| s.eval(x).speed2().sqrt();
        let north = adaptive(speed, s_e, s.s_max(), tol, 1e-300)?.value;
        let south = adaptive(speed, s.s_min(), s_e, tol, 1e-300)?.value;
        Ok(SwingData {
            delta_u_north: PI,
            delta_u_south: PI,
            mean_delta_u: PI,
            t_half_north: 2.0 * north,
            t_half_south: 2.0 * south,
        })
    }

    /// Swing data for any level in `(-r_e, r_e)`, the meridian included.
    pub fn swing_or_meridian(&self, c: f64) -> Result<SwingData> {
        if c == 0.0 {
            self.meridian_swing()
        } else {
            self.swing(c)
        }
    }

    pub fn mean_swing(&self, c: f64) -> Result<f64> {
        Ok(self.swing_or_meridian(c)?.mean_delta_u)
    }

    /// `rho(c) = mean advance / pi`; rational values give closed geodesics.
    pub fn rotation_number(&self, c: f64) -> Result<f64> {
        Ok(self.swing(c)?.mean_delta_u / PI)
    }

    pub fn torus_slope(&self, c: f64) -> Result<TorusSlope> {
        self.check_level(c)?;
        self.slope_at(c)
    }

    /// Slope for any level in `[-r_e, r_e]`, including the meridian torus and
    /// the two equator orbits.
    pub fn slope_at(&self, c: f64) -> Result<TorusSlope> {
        let r_e = self.equator.r_e;
        if c.abs() == r_e {
            return Ok(TorusSlope { x: c.signum() / (TAU * r_e), y: 0.0 });
        }
        let sw = self.swing_or_meridian(c)?;
        let t = sw.mean_t_half();
        Ok(TorusSlope { x: sw.mean_delta_u / (TAU * t), y: 1.0 / t })
    }

    fn limit_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let r_e = self.equator.r_e;
        (8..=16).map(move |k| r_e * (1.0 - 2f64.powi(-k)))
    }

    /// Limit of the mean advance as `c -> r_e`.
    pub fn equator_limit(&self) -> Result<EquatorLimit> {
        let values = self.limit_nodes().map(|c| self.mean_swing(c)).collect::<Result<Vec<_>>>()?;
        let (value, error_estimate) = richardson_halving(&values);
        if !(error_estimate <= 1e-4) {
            return Err(Error::NonConvergence(format!(
                "equator limit extrapolants disagree by {error_estimate:e}"
            )));
        }
        let k_e = self.surface.gaussian_curvature(self.equator.s_e)?;
        let conjectured = PI / (self.equator.r_e * k_e.sqrt());
        let agrees = (value - conjectured).abs() <= 1e-6_f64.max(10.0 * error_estimate);
        Ok(EquatorLimit { value, error_estimate, conjectured, agrees_with_conjecture: agrees })
    }

    /// Limit of the mean half-swing duration as `c -> r_e`.
    pub fn equator_limit_time(&self) -> Result<f64> {
        let values = self
            .limit_nodes()
            .map(|c| Ok(self.swing(c)?.mean_t_half()))
            .collect::<Result<Vec<_>>>()?;
        Ok(richardson_halving(&values).0)
    }

    /// Levels `r_e i / (n + 1)` with their mean advances, computed once.
    pub fn grid(&self) -> Result<&[(f64, f64)]> {
        if let Some(g) = self.grid.get() {
            return Ok(g);
        }
        let n = self.config.grid_n;
        let r_e = self.equator.r_e;
        let values = (1..=n)
            .into_par_iter()
            .map(|i| {
                let c = r_e * i as f64 / (n + 1) as f64;
                self.mean_swing(c).map(|m| (c, m))
            })
            .collect::<Result<Vec<_>>>()?;
        let _ = self.grid.set(values);
        Ok(self.grid.get().expect("grid was just stored"))
    }
}

/// Convergents `p/q` of the continued fraction of `x`, stopping once the
/// denominator exceeds `max_den`.
pub fn continued_fraction_convergents(x: f64, max_den: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = (a.saturating_mul(p1).saturating_add(p0), a.saturating_mul(q1).saturating_add(q0));
        if q2 > max_den {
            break;
        }
        out.push((p2, q2));
        let frac = r - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(surface: &ProfileSurface) -> ClairautMap<'_> {
        ClairautMap::new(surface, ClairautConfig::default()).unwrap()
    }

    #[test]
    fn round_sphere_advance_is_pi() {
        let s = ProfileSurface::sphere();
        let m = map(&s);
        for c in [1e-3, 0.2, 0.5, 0.9, 0.999] {
            let sw = m.swing(c).unwrap();
            assert!((sw.mean_delta_u - PI).abs() < 1e-9, "c = {c}: {}", sw.mean_delta_u);
            assert!((sw.t_half_north - PI).abs() < 1e-9);
        }
        let neg = m.swing(-0.5).unwrap();
        assert!((neg.mean_delta_u + PI).abs() < 1e-9);
    }

    #[test]
    fn level_turning_points_bracket_equator() {
        let s = ProfileSurface::ellipsoid(2.0).unwrap();
        let m = map(&s);
        let l = m.level(0.6).unwrap();
        assert!((s.eval(l.turning_s_north).f - 0.6).abs() < 1e-12);
        assert!(l.turning_s_south < 0.0 && l.turning_s_north > 0.0);
        assert!((l.theta_e - 0.6f64.acos()).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_levels_are_rejected() {
        let s = ProfileSurface::sphere();
        let m = map(&s);
        for c in [0.0, 1.0, -1.2] {
            assert!(matches!(m.swing(c), Err(Error::LevelOutOfRange { .. })));
        }
    }

    #[test]
    fn torus_slope_signs() {
        let s = ProfileSurface::sphere();
        let m = map(&s);
        let t = m.torus_slope(0.5).unwrap();
        assert!((t.y / t.x - 2.0).abs() < 1e-9);
        assert!(m.torus_slope(-0.5).unwrap().x < 0.0);
    }

    #[test]
    fn convergents_of_known_numbers() {
        assert_eq!(continued_fraction_convergents(1.5, 100), vec![(1, 1), (3, 2)]);
        let pi_conv = continued_fraction_convergents(PI, 110);
        assert_eq!(pi_conv, vec![(3, 1), (22, 7), (333, 106)]);
    }

    #[test]
    fn ellipsoid_limit_is_pi_b() {
        let s = ProfileSurface::ellipsoid(1.5).unwrap();
        let lim = map(&s).equator_limit().unwrap();
        assert!((lim.value - 1.5 * PI).abs() < 1e-6, "{lim:?}");
        assert!(lim.agrees_with_conjecture);
    }
}
