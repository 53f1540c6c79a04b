//! Direct integration of the geodesic equations on a surface of revolution.
//!
//! The state is `(u, s, u', s')` with arclength as time. The integrator is
//! independent of the Clairaut quadrature in [`crate::clairaut`], so the two
//! are used to check each other.

pub mod dop853;

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{EquatorInfo, ProfileSurface};
use dop853::{Dense, Dop853, OdeSystem};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub u: f64,
    pub s: f64,
    pub du: f64,
    pub ds: f64,
}

impl GeodesicState {
    fn from_array(y: &[f64; 4]) -> Self {
        Self { u: y[0], s: y[1], du: y[2], ds: y[3] }
    }

    fn to_array(self) -> [f64; 4] {
        [self.u, self.s, self.du, self.ds]
    }

    /// Unit-speed state at `(u, s)` making angle `theta` with the parallel.
    /// Positive `theta` heads toward increasing `s`.
    pub fn launch(surface: &ProfileSurface, u: f64, s: f64, theta: f64) -> Self {
        let j = surface.eval(s);
        Self { u, s, du: theta.cos() / j.f, ds: theta.sin() / j.speed2().sqrt() }
    }

    /// State on the equator heading north with Clairaut constant `c`.
    pub fn on_equator(surface: &ProfileSurface, eq: &EquatorInfo, c: f64, u: f64) -> Result<Self> {
        if !(c.abs() < eq.r_e) {
            return Err(Error::LevelOutOfRange { c, r_e: eq.r_e });
        }
        let j = surface.eval(eq.s_e);
        let cos_t = c / eq.r_e;
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        Ok(Self { u, s: eq.s_e, du: cos_t / j.f, ds: sin_t / j.speed2().sqrt() })
    }
}

/// The conserved quantity `f^2 u'`, equal to `f cos(theta)`.
pub fn clairaut_constant(surface: &ProfileSurface, state: &GeodesicState) -> f64 {
    let f = surface.eval(state.s).f;
    f * f * state.du
}

pub fn speed_squared(surface: &ProfileSurface, state: &GeodesicState) -> f64 {
    let j = surface.eval(state.s);
    j.speed2() * state.ds * state.ds + j.f * j.f * state.du * state.du
}

#[derive(Clone, Copy)]
struct GeodesicRhs<'a> {
    surface: &'a ProfileSurface,
}

impl OdeSystem<4> for GeodesicRhs<'_> {
    fn rhs(&mut self, _t: f64, y: &[f64; 4]) -> [f64; 4] {
        let [_, s, du, ds] = *y;
        let j = self.surface.eval(s);
        let v = j.speed2();
        // A meridian keeps u' = 0 exactly, even where f vanishes.
        let ddu = if du == 0.0 { 0.0 } else { -2.0 * j.df / j.f * du * ds };
        let dds = j.f * j.df / v * du * du - (j.df * j.d2f + j.dg * j.d2g) / v * ds * ds;
        [du, ds, ddu, dds]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    SouthToNorth,
    NorthToSouth,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub t: f64,
    /// Longitude reduced to `[0, 2 pi)`.
    pub u: f64,
    /// Longitude without reduction, for counting turns.
    pub u_total: f64,
    pub direction: Direction,
    pub state: GeodesicState,
}

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Give up waiting for the next equator crossing after this much arclength.
    pub crossing_timeout: f64,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, h_max: 0.25, crossing_timeout: 1e3 }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-12)
    }
}

const EVENT_TIME_TOL: f64 = 1e-13;

/// Breakpoints closer than this to either end of a step are not worth
/// stopping at.
const JOIN_SNAP: f64 = 1e-9;

/// A piece of trajectory on which the dense output is valid.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub dense: Dense<4>,
    pub t_from: f64,
    pub t_to: f64,
}

impl Segment {
    pub fn state_at(&self, t: f64) -> GeodesicState {
        GeodesicState::from_array(&self.dense.eval(t))
    }
}

/// Step-by-step geodesic flow with equator-crossing detection and pole
/// reflection for meridians.
pub struct Flow<'a> {
    surface: &'a ProfileSurface,
    s_e: f64,
    opts: OdeOptions,
    stepper: Dop853<4, GeodesicRhs<'a>>,
    side: f64,
    meridian: bool,
}

impl<'a> Flow<'a> {
    pub fn new(surface: &'a ProfileSurface, s_e: f64, state: GeodesicState, opts: OdeOptions) -> Self {
        let side = match state.s - s_e {
            d if d > 0.0 => 1.0,
            d if d < 0.0 => -1.0,
            _ => {
                if state.ds >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        Self {
            surface,
            s_e,
            opts,
            stepper: Self::stepper(surface, 0.0, state, &opts),
            side,
            meridian: state.du == 0.0,
        }
    }

    fn stepper(surface: &'a ProfileSurface, t: f64, state: GeodesicState, opts: &OdeOptions) -> Dop853<4, GeodesicRhs<'a>> {
        Dop853::new(GeodesicRhs { surface }, t, state.to_array(), opts.rtol, opts.atol, opts.h_max)
    }

    pub fn t(&self) -> f64 {
        self.stepper.t()
    }

    pub fn state(&self) -> GeodesicState {
        GeodesicState::from_array(self.stepper.y())
    }

    /// Takes one accepted step. Returns the covered segment and any equator
    /// crossing inside it.
    pub fn advance(&mut self) -> Result<(Segment, Option<CrossingEvent>)> {
        let y = self.stepper.y();
        // Bound the travel across the profile, not the arclength: a nearly
        // horizontal geodesic may take long steps through a steep blend.
        let travel = self.surface.step_limit(y[1]) / y[3].abs().max(1e-3);
        self.stepper.set_h_max(self.opts.h_max.min(travel));
        let before = self.stepper.clone();
        let was_stopping = before.stop().is_some();
        self.stepper.step()?;
        let mut landed = was_stopping && self.stepper.stop().is_none();
        if !was_stopping {
            if let Some(t_join) = self.join_crossing(before.y()[1]) {
                // The step straddled a point where the profile loses smoothness;
                // redo it so that it ends there instead.
                self.stepper = before;
                self.stepper.set_stop(Some(t_join));
                self.stepper.step()?;
                landed = self.stepper.stop().is_none();
            }
        }
        let dense = *self.stepper.dense();
        if landed {
            // Restart on the breakpoint so the next step size is chosen from
            // the new piece alone.
            let t = self.stepper.t();
            self.stepper = Self::stepper(self.surface, t, self.state(), &self.opts);
        }
        let mut segment = Segment { dense, t_from: dense.t_start, t_to: dense.t_end() };

        if self.meridian {
            let s_end = self.stepper.y()[1];
            let pole = if s_end > self.surface.s_max() {
                Some(self.surface.s_max())
            } else if s_end < self.surface.s_min() {
                Some(self.surface.s_min())
            } else {
                None
            };
            if let Some(s_pole) = pole {
                let t_pole = refine_root(&dense, |y| y[1] - s_pole, segment.t_from, segment.t_to);
                let at = segment.state_at(t_pole);
                // Passing over the pole continues on the opposite meridian.
                let reflected = GeodesicState { u: at.u + PI, s: s_pole, du: 0.0, ds: -at.ds };
                self.stepper = Self::stepper(self.surface, t_pole, reflected, &self.opts);
                segment.t_to = t_pole;
            }
        }

        let end = segment.state_at(segment.t_to);
        let offset = end.s - self.s_e;
        let new_side = if offset > 0.0 {
            1.0
        } else if offset < 0.0 {
            -1.0
        } else {
            -self.side
        };
        let mut event = None;
        if new_side != self.side {
            let s_e = self.s_e;
            let t = refine_root(&dense, |y| y[1] - s_e, segment.t_from, segment.t_to);
            let st = segment.state_at(t);
            event = Some(CrossingEvent {
                t,
                u: st.u.rem_euclid(TAU),
                u_total: st.u,
                direction: if new_side > 0.0 { Direction::SouthToNorth } else { Direction::NorthToSouth },
                state: st,
            });
            self.side = new_side;
        }
        Ok((segment, event))
    }

    /// Time at which the step just taken first met a profile breakpoint, if it
    /// passed one by more than [`JOIN_SNAP`].
    fn join_crossing(&self, s_from: f64) -> Option<f64> {
        let joins = self.surface.breakpoints();
        if joins.is_empty() {
            return None;
        }
        let s_to = self.stepper.y()[1];
        let (lo, hi) = (s_from.min(s_to) + JOIN_SNAP, s_from.max(s_to) - JOIN_SNAP);
        if lo >= hi {
            return None;
        }
        let first = joins.partition_point(|&b| b <= lo);
        let last = joins.partition_point(|&b| b < hi);
        if first >= last {
            return None;
        }
        let b = if s_to > s_from { joins[first] } else { joins[last - 1] };
        let dense = self.stepper.dense();
        Some(refine_root(dense, |y| y[1] - b, dense.t_start, dense.t_end()))
    }

    /// Runs until the next equator crossing.
    pub fn next_crossing(&mut self) -> Result<CrossingEvent> {
        let deadline = self.t() + self.opts.crossing_timeout;
        loop {
            if self.t() > deadline {
                return Err(Error::Timeout { t_max: deadline });
            }
            if let (_, Some(ev)) = self.advance()? {
                return Ok(ev);
            }
        }
    }
}

fn refine_root(dense: &Dense<4>, g: impl Fn(&[f64; 4]) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g_lo = g(&dense.eval(lo));
    for _ in 0..200 {
        if hi - lo <= EVENT_TIME_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(&dense.eval(mid));
        if (gm > 0.0) == (g_lo > 0.0) && gm != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of [`integrate`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// State after every accepted step, starting with the initial state.
    pub samples: Vec<(f64, GeodesicState)>,
    pub crossings: Vec<CrossingEvent>,
    /// Largest deviation of the Clairaut constant from its initial value.
    pub clairaut_drift: f64,
    /// Largest deviation of the speed from one.
    pub speed_drift: f64,
}

fn check_unit_speed(surface: &ProfileSurface, state: &GeodesicState) -> Result<()> {
    let v = speed_squared(surface, state).sqrt();
    if (v - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("initial state has speed {v}, expected 1")));
    }
    Ok(())
}

/// Integrates for arclength `t_max`, recording crossings and conservation drift.
pub fn integrate(surface: &ProfileSurface, state0: GeodesicState, t_max: f64, opts: OdeOptions) -> Result<Trajectory> {
    if !(t_max > 0.0) {
        return Err(Error::Precondition("t_max must be positive".into()));
    }
    check_unit_speed(surface, &state0)?;
    let eq = surface.equator()?;
    let c0 = clairaut_constant(surface, &state0);
    let mut flow = Flow::new(surface, eq.s_e, state0, opts);
    let mut traj = Trajectory { samples: vec![(0.0, state0)], crossings: Vec::new(), clairaut_drift: 0.0, speed_drift: 0.0 };
    while flow.t() < t_max {
        let (segment, event) = flow.advance()?;
        if let Some(ev) = event {
            if ev.t <= t_max {
                traj.crossings.push(ev);
            }
        }
        let (t, st) = if segment.t_to > t_max { (t_max, segment.state_at(t_max)) } else { (flow.t(), flow.state()) };
        traj.clairaut_drift = traj.clairaut_drift.max((clairaut_constant(surface, &st) - c0).abs());
        traj.speed_drift = traj.speed_drift.max((speed_squared(surface, &st).sqrt() - 1.0).abs());
        traj.samples.push((t, st));
    }
    Ok(traj)
}

/// Samples the trajectory every `stride` units of arclength up to `t_max`.
pub fn dump(surface: &ProfileSurface, state0: GeodesicState, t_max: f64, stride: f64, opts: OdeOptions) -> Result<Vec<(f64, GeodesicState)>> {
    if !(stride > 0.0) {
        return Err(Error::Precondition("output stride must be positive".into()));
    }
    let eq = surface.equator()?;
    let mut flow = Flow::new(surface, eq.s_e, state0, opts);
    let mut out = vec![(0.0, state0)];
    let mut k = 1usize;
    while flow.t() < t_max {
        let (segment, _) = flow.advance()?;
        loop {
            let t = stride * k as f64;
            if t > t_max + 1e-12 || t > segment.t_to {
                break;
            }
            out.push((t, segment.state_at(t)));
            k += 1;
        }
    }
    Ok(out)
}

/// Per-hemisphere advances measured by direct integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfSwingOde {
    pub delta_u_north: f64,
    pub delta_u_south: f64,
    pub t_half_north: f64,
    pub t_half_south: f64,
}

/// Launches north from the equator and measures the two half swings.
pub fn half_swing_ode(surface: &ProfileSurface, c: f64, opts: OdeOptions) -> Result<HalfSwingOde> {
    let eq = surface.equator()?;
    if c == 0.0 {
        return Err(Error::LevelOutOfRange { c, r_e: eq.r_e });
    }
    let start = GeodesicState::on_equator(surface, &eq, c, 0.0)?;
    let mut flow = Flow::new(surface, eq.s_e, start, opts);
    let first = flow.next_crossing()?;
    let second = flow.next_crossing()?;
    Ok(HalfSwingOde {
        delta_u_north: first.u_total,
        delta_u_south: second.u_total - first.u_total,
        t_half_north: first.t,
        t_half_south: second.t - first.t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosureResult {
    pub closed: bool,
    pub p: i64,
    pub q: i64,
    pub period_length: f64,
    pub residual: f64,
    /// Equator crossings seen over the reported period.
    pub crossings: usize,
}

/// Searches for a closing crossing pair within `max_pairs` pairs.
pub fn detect_closure(surface: &ProfileSurface, c: f64, max_pairs: usize, tol: f64, opts: OdeOptions) -> Result<ClosureResult> {
    let eq = surface.equator()?;
    let start = GeodesicState::on_equator(surface, &eq, c, 0.0)?;
    let j_e = surface.eval(eq.s_e);
    let mut flow = Flow::new(surface, eq.s_e, start, opts);
    let mut best = ClosureResult { closed: false, p: 0, q: 0, period_length: 0.0, residual: f64::INFINITY, crossings: 0 };
    let mut crossings = 0usize;
    for pair in 1..=max_pairs {
        let down = flow.next_crossing()?;
        let up = flow.next_crossing()?;
        crossings += 2;
        if down.direction != Direction::NorthToSouth || up.direction != Direction::SouthToNorth {
            return Err(Error::StepFailure { t: up.t, reason: "equator crossings do not alternate".into() });
        }
        let turns = (up.u_total / TAU).round();
        let angle_gap = (up.u_total - TAU * turns).abs() * eq.r_e;
        let dv_par = j_e.f * (up.state.du - start.du);
        let dv_mer = j_e.speed2().sqrt() * (up.state.ds - start.ds);
        let residual = angle_gap + dv_par.hypot(dv_mer);
        if residual < best.residual {
            best.residual = residual;
        }
        if residual < tol {
            let p = if c == 0.0 { 0 } else { turns as i64 };
            return Ok(ClosureResult { closed: true, p, q: pair as i64, period_length: up.t, residual, crossings });
        }
    }
    best.crossings = crossings;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn great_circle_crosses_at_antipodes() {
        let s = ProfileSurface::sphere();
        let start = GeodesicState::launch(&s, 0.0, 0.0, std::f64::consts::FRAC_PI_4);
        let traj = integrate(&s, start, TAU, OdeOptions::default()).unwrap();
        assert_eq!(traj.crossings.len(), 2, "{:?}", traj.crossings);
        let gap = traj.crossings[1].u_total - traj.crossings[0].u_total;
        assert!((gap - PI).abs() < 1e-9);
    }

    #[test]
    fn clairaut_constant_examples() {
        let s = ProfileSurface::sphere();
        let st = GeodesicState::launch(&s, 0.0, 0.0, PI / 3.0);
        assert!((clairaut_constant(&s, &st) - 0.5).abs() < 1e-15);
        let e = ProfileSurface::ellipsoid(2.0).unwrap();
        let along = GeodesicState::launch(&e, 0.0, 0.0, 0.0);
        assert!((clairaut_constant(&e, &along) - 1.0).abs() < 1e-15);
        let meridian = GeodesicState::launch(&e, 0.0, 0.3, std::f64::consts::FRAC_PI_2);
        assert!(clairaut_constant(&e, &meridian).abs() < 1e-15);
    }

    #[test]
    fn meridian_keeps_longitude_until_the_pole() {
        let e = ProfileSurface::ellipsoid(1.5).unwrap();
        let eq = e.equator().unwrap();
        let start = GeodesicState::on_equator(&e, &eq, 0.0, 0.0).unwrap();
        let mut flow = Flow::new(&e, eq.s_e, start, OdeOptions::default());
        let a = flow.next_crossing().unwrap();
        let b = flow.next_crossing().unwrap();
        assert!((a.u_total - PI).abs() < 1e-12);
        assert!((b.u_total - a.u_total - PI).abs() < 1e-12);
        assert_eq!(a.direction, Direction::NorthToSouth);
    }

    #[test]
    fn sphere_geodesics_close_after_one_pair() {
        let s = ProfileSurface::sphere();
        let r = detect_closure(&s, 0.4, 50, 1e-8, OdeOptions::default()).unwrap();
        assert!(r.closed);
        assert_eq!((r.p, r.q), (1, 1));
        assert!((r.period_length - TAU).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_unit_initial_speed() {
        let s = ProfileSurface::sphere();
        let st = GeodesicState { u: 0.0, s: 0.0, du: 2.0, ds: 0.0 };
        assert!(integrate(&s, st, 1.0, OdeOptions::default()).is_err());
    }
}
