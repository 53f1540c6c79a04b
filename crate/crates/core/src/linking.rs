//! Exact linking numbers of lifted closed geodesics and equators in the unit
//! tangent bundle of a sphere, and the linking densities of the invariant
//! measures carried by Clairaut tori.
//!
//! Linking numbers of disjoint links in this bundle live in `Z/2`, so all
//! exact values are [`HalfInt`]s. Floating point only enters through the
//! densities, which are returned as `f64` and never rounded back.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::Serialize;

use crate::clairaut::{ClairautMap, TorusSlope};
use crate::error::{Error, Result};
use crate::roots::richardson_halving;

/// A number of the form `halves / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HalfInt {
    halves: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { halves: 0 };
    pub const HALF: HalfInt = HalfInt { halves: 1 };

    pub const fn from_halves(halves: i64) -> Self {
        Self { halves }
    }

    pub const fn from_int(n: i64) -> Self {
        Self { halves: 2 * n }
    }

    pub const fn halves(self) -> i64 {
        self.halves
    }

    pub fn is_integer(self) -> bool {
        self.halves % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.halves as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}/2", self.halves)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `n` or `k/2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: {s:?}"));
        match s.split_once('/') {
            Some((num, "2")) => num.trim().parse::<i64>().map(HalfInt::from_halves).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.parse::<i64>().map(HalfInt::from_int).map_err(|_| bad()),
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_halves(self.halves + rhs.halves)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_halves(self.halves - rhs.halves)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_halves(-self.halves)
    }
}

impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, rhs: i64) -> HalfInt {
        HalfInt::from_halves(self.halves * rhs)
    }
}

impl std::iter::Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, Add::add)
    }
}

/// Signed number of turns around the axis `p` and half the number of
/// equator crossings `q` of a closed geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GeodesicType {
    p: i64,
    q: i64,
}

impl GeodesicType {
    /// Meridians are the only geodesics that never wind, and they cross the
    /// equator exactly twice; `p = 0` with `q > 1` is rejected.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidType { p, q, reason: "q must be at least 1" });
        }
        if p == 0 && q != 1 {
            return Err(Error::InvalidType { p, q, reason: "a meridian has q = 1" });
        }
        Ok(Self { p, q })
    }

    pub const fn meridian() -> Self {
        Self { p: 0, q: 1 }
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    /// `gcd(|p|, q) = 1`.
    pub fn is_primitive(self) -> bool {
        gcd(self.p.abs(), self.q) == 1
    }

    /// Same type with `p` negated, as for the reversed geodesic.
    pub fn reversed(self) -> Self {
        Self { p: -self.p, q: self.q }
    }
}

impl fmt::Display for GeodesicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

impl FromStr for GeodesicType {
    type Err = Error;

    /// Parses `p,q`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("geodesic type must be `p,q`, got {s:?}")))?;
        let p = p.trim().parse::<i64>().map_err(|e| Error::Parse(format!("bad p in {s:?}: {e}")))?;
        let q = q.trim().parse::<i64>().map_err(|e| Error::Parse(format!("bad q in {s:?}: {e}")))?;
        GeodesicType::new(p, q)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Which way the equator is traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquatorOrientation {
    Plus,
    Minus,
}

impl EquatorOrientation {
    pub fn sign(self) -> i64 {
        match self {
            EquatorOrientation::Plus => 1,
            EquatorOrientation::Minus => -1,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            EquatorOrientation::Plus => EquatorOrientation::Minus,
            EquatorOrientation::Minus => EquatorOrientation::Plus,
        }
    }
}

impl fmt::Display for EquatorOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquatorOrientation::Plus => "plus",
            EquatorOrientation::Minus => "minus",
        })
    }
}

impl FromStr for EquatorOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(EquatorOrientation::Plus),
            "minus" | "-" => Ok(EquatorOrientation::Minus),
            other => Err(Error::Parse(format!("equator orientation must be plus or minus, got {other:?}"))),
        }
    }
}

/// Linking number of two distinct oriented fibers.
pub fn lk_fibers() -> HalfInt {
    HalfInt::from_halves(-1)
}

/// Two disjoint simple closed curves: `+1/2` when the annulus between them
/// is bounded by their difference, `-1/2` otherwise.
pub fn lk_disjoint_simple(orientations_coincide: bool) -> HalfInt {
    if orientations_coincide {
        HalfInt::HALF
    } else {
        -HalfInt::HALF
    }
}

/// Two simple curves meeting in `2k` points with no meanders. `same_order`
/// means both curves visit the intersections in the same cyclic order.
pub fn lk_meander_free(k: u32, same_order: bool) -> Result<HalfInt> {
    if k == 0 {
        return Err(Error::Precondition("meander-free pairs need k >= 1".into()));
    }
    Ok(if same_order { HalfInt::from_halves(1 - 2 * k as i64) } else { -HalfInt::HALF })
}

/// Linking number between an oriented equator and a closed geodesic.
pub fn lk_equator_geodesic(t: GeodesicType, eq: EquatorOrientation) -> HalfInt {
    let (p, q) = (t.p, t.q);
    if p == 0 {
        return -HalfInt::HALF;
    }
    // The equator traversed in the geodesic's own sense of revolution.
    if p.signum() == eq.sign() {
        HalfInt::from_halves(p.abs() - 2 * q)
    } else {
        HalfInt::from_halves(-p.abs())
    }
}

/// Linking number of two closed geodesics, the first on the outer torus
/// (`|c1| >= |c2|`).
pub fn lk_two_geodesics(t1: GeodesicType, t2: GeodesicType, first_is_outer: bool) -> Result<HalfInt> {
    if !first_is_outer {
        return Err(Error::Precondition("the first geodesic must lie on the outer torus; swap the arguments".into()));
    }
    let (p1, p2, q2) = (t1.p, t2.p, t2.q);
    Ok(match (p1 == 0, p2 == 0) {
        (true, true) => -HalfInt::HALF,
        (false, true) => HalfInt::from_halves(-p1.abs()),
        // A meridian inside a winding geodesic is never reached by the
        // formula because the meridian torus is the innermost one.
        (true, false) => HalfInt::from_halves(-p2.abs()),
        (false, false) if p1.signum() == p2.signum() => HalfInt::from_halves(p1.abs() * (p2.abs() - 2 * q2)),
        (false, false) => HalfInt::from_halves(-(p1 * p2).abs()),
    })
}

/// Resolves which geodesic is outer from the Clairaut levels and applies
/// [`lk_two_geodesics`].
pub fn lk_geodesic_pair(t1: GeodesicType, c1: f64, t2: GeodesicType, c2: f64) -> Result<HalfInt> {
    if c1.abs() >= c2.abs() {
        lk_two_geodesics(t1, t2, true)
    } else {
        lk_two_geodesics(t2, t1, true)
    }
}

pub fn is_figure_eight(t: GeodesicType) -> bool {
    t.p.abs() == 2 && t.q == 1
}

fn density_from_slopes(outer: TorusSlope, outer_c: f64, inner: TorusSlope, inner_c: f64) -> f64 {
    // The meridian torus (c = 0) belongs to both sides; the formula is
    // continuous there.
    if outer_c * inner_c >= 0.0 {
        0.5 * outer.x.abs() * (inner.x.abs() - inner.y)
    } else {
        -0.5 * (outer.x * inner.x).abs()
    }
}

/// Linking per unit length squared of the invariant measures on the tori at
/// levels `c1` and `c2`, both in `[-r_e, r_e]`.
pub fn linking_density(map: &ClairautMap<'_>, c1: f64, c2: f64) -> Result<f64> {
    let r_e = map.equator().r_e;
    for c in [c1, c2] {
        if !(c.abs() <= r_e) {
            return Err(Error::LevelOutOfRange { c, r_e });
        }
    }
    let (outer_c, inner_c) = if c1.abs() >= c2.abs() { (c1, c2) } else { (c2, c1) };
    let outer = map.slope_at(outer_c)?;
    let inner = map.slope_at(inner_c)?;
    Ok(density_from_slopes(outer, outer_c, inner, inner_c))
}

/// Self-linking density of the measure on the torus at level `c`.
///
/// At `|c| = r_e` the slope of the nearby tori is extrapolated to the
/// equator; elsewhere the density is approached from both sides and the two
/// limits must agree.
pub fn self_linking_density(map: &ClairautMap<'_>, c: f64) -> Result<f64> {
    let r_e = map.equator().r_e;
    if !(c.abs() <= r_e) {
        return Err(Error::LevelOutOfRange { c, r_e });
    }
    if c.abs() == r_e {
        let advance = map.equator_limit()?.value;
        let t_half = map.equator_limit_time()?;
        let slope = TorusSlope { x: c.signum() * advance / (std::f64::consts::TAU * t_half), y: 1.0 / t_half };
        return Ok(density_from_slopes(slope, c, slope, c));
    }
    let h0 = (1e-3 * r_e).min(0.25 * (r_e - c.abs()));
    let one_sided = |side: f64| -> Result<f64> {
        let values = (0..6)
            .map(|k| linking_density(map, c + side * h0 * 0.5f64.powi(k), c))
            .collect::<Result<Vec<_>>>()?;
        Ok(richardson_halving(&values).0)
    };
    let above = one_sided(1.0)?;
    let below = one_sided(-1.0)?;
    if (above - below).abs() > 1e-6 {
        return Err(Error::NonConvergence(format!(
            "one-sided self-linking limits differ: {above} vs {below}"
        )));
    }
    Ok(0.5 * (above + below))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: i64, q: i64) -> GeodesicType {
        GeodesicType::new(p, q).unwrap()
    }

    #[test]
    fn half_int_display_and_parse() {
        assert_eq!(HalfInt::from_halves(-1).to_string(), "-1/2");
        assert_eq!(HalfInt::from_halves(6).to_string(), "3");
        assert_eq!(HalfInt::from_halves(-5).to_string(), "-5/2");
        assert_eq!("-5/2".parse::<HalfInt>().unwrap(), HalfInt::from_halves(-5));
        assert_eq!("4".parse::<HalfInt>().unwrap(), HalfInt::from_int(4));
        assert!("1/3".parse::<HalfInt>().is_err());
    }

    #[test]
    fn type_construction() {
        assert!(GeodesicType::new(0, 2).is_err());
        assert!(GeodesicType::new(3, 0).is_err());
        assert_eq!("-2,1".parse::<GeodesicType>().unwrap(), t(-2, 1));
        assert!(!t(4, 2).is_primitive());
    }

    #[test]
    fn equator_values() {
        assert_eq!(lk_equator_geodesic(t(8, 1), EquatorOrientation::Plus), HalfInt::from_int(3));
        assert_eq!(lk_equator_geodesic(t(2, 1), EquatorOrientation::Plus), HalfInt::ZERO);
        assert_eq!(lk_equator_geodesic(t(2, 1), EquatorOrientation::Minus), HalfInt::from_int(-1));
        assert_eq!(lk_equator_geodesic(t(-3, 2), EquatorOrientation::Minus), HalfInt::from_halves(-1));
        for eq in [EquatorOrientation::Plus, EquatorOrientation::Minus] {
            assert_eq!(lk_equator_geodesic(GeodesicType::meridian(), eq), HalfInt::from_halves(-1));
        }
    }

    #[test]
    fn pairs_of_geodesics() {
        assert_eq!(lk_two_geodesics(t(1, 1), t(1, 1), true).unwrap(), HalfInt::from_halves(-1));
        assert_eq!(lk_two_geodesics(t(3, 1), t(-2, 1), true).unwrap(), HalfInt::from_int(-3));
        assert_eq!(lk_two_geodesics(t(2, 1), t(0, 1), true).unwrap(), HalfInt::from_int(-1));
        assert!(lk_two_geodesics(t(2, 1), t(0, 1), false).is_err());
    }

    #[test]
    fn simple_tables() {
        assert_eq!(lk_fibers() * 2, HalfInt::from_int(-1));
        assert_eq!(lk_meander_free(3, true).unwrap(), HalfInt::from_halves(-5));
        assert_eq!(lk_meander_free(3, false).unwrap(), HalfInt::from_halves(-1));
        assert!(lk_meander_free(0, true).is_err());
        assert!(is_figure_eight(t(-2, 1)));
        assert!(!is_figure_eight(t(8, 1)));
    }
}
