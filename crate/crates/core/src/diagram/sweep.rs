//! Closed forms against the diagram pipeline over all small closed
//! geodesic types of a surface.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::sample::{equator_curve, latitude_circle, sample_geodesic_with_offset, SampleOptions};
use super::{lk_lifted_report, BigonChoice, MultiCurve, SphericalCurve};
use crate::clairaut::ClairautMap;
use crate::error::Result;
use crate::linking::{lk_disjoint_simple, lk_equator_geodesic, lk_geodesic_pair, EquatorOrientation, GeodesicType, HalfInt};

/// One side of a compared pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Partner {
    Equator(EquatorOrientation),
    Geodesic { t: GeodesicType, c: f64 },
}

impl fmt::Display for Partner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Partner::Equator(EquatorOrientation::Plus) => f.write_str("e+"),
            Partner::Equator(EquatorOrientation::Minus) => f.write_str("e-"),
            Partner::Geodesic { t, .. } => write!(f, "{},{}", t.p(), t.q()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub first: Partner,
    pub second: Partner,
    pub formula: HalfInt,
    pub oracle: HalfInt,
    pub matched: bool,
    pub retries: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSweep {
    pub types: Vec<(GeodesicType, f64)>,
    pub rows: Vec<OracleRow>,
}

impl OracleSweep {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matched)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive types with `|p| <= max_p`, `q <= max_q` carried by the surface,
/// each with its level. Negative `p` uses the mirror level `-c`.
pub fn realizable_types(map: &ClairautMap<'_>, max_p: i64, max_q: i64) -> Result<Vec<(GeodesicType, f64)>> {
    let mut out = Vec::new();
    for q in 1..=max_q {
        for p in 0..=max_p {
            if (p == 0 && q != 1) || gcd(p, q) != 1 {
                continue;
            }
            if let Some(level) = map.find_closed_geodesic(p, q)? {
                out.push((GeodesicType::new(p, q)?, level.c));
                if p > 0 {
                    out.push((GeodesicType::new(-p, q)?, -level.c));
                }
            }
        }
    }
    Ok(out)
}

/// Distinct starting longitudes keep diagrams of different geodesics in
/// general position with each other.
fn offset(index: usize) -> f64 {
    (0.618_033_988_749_894_8 * (index as f64 + 1.0) * std::f64::consts::TAU).rem_euclid(std::f64::consts::TAU)
}

/// Compares closed forms with the diagram pipeline for every realizable
/// type against both equators and for every pair of types on different tori.
pub fn oracle_sweep(map: &ClairautMap<'_>, max_p: i64, max_q: i64, opts: &SampleOptions) -> Result<OracleSweep> {
    let types = realizable_types(map, max_p, max_q)?;
    let surface = map.surface();
    let diagrams = types
        .par_iter()
        .enumerate()
        .map(|(i, &(_, c))| sample_geodesic_with_offset(surface, c, offset(i), opts))
        .collect::<Result<Vec<SphericalCurve>>>()?;
    let n_eq = 4 * opts.pts_per_swing;
    let plus = equator_curve(EquatorOrientation::Plus, n_eq)?;
    let minus = equator_curve(EquatorOrientation::Minus, n_eq)?;

    let mut jobs: Vec<(Partner, Partner, HalfInt, MultiCurve, MultiCurve)> = Vec::new();
    // The two equators, pushed apart.
    jobs.push((
        Partner::Equator(EquatorOrientation::Plus),
        Partner::Equator(EquatorOrientation::Minus),
        lk_disjoint_simple(false),
        MultiCurve::single(latitude_circle(1e-2, EquatorOrientation::Plus, n_eq, 0.0)?),
        MultiCurve::single(latitude_circle(-1e-2, EquatorOrientation::Minus, n_eq, 0.0)?),
    ));
    for (i, &(t, c)) in types.iter().enumerate() {
        for (eq, curve) in [(EquatorOrientation::Plus, &plus), (EquatorOrientation::Minus, &minus)] {
            jobs.push((
                Partner::Equator(eq),
                Partner::Geodesic { t, c },
                lk_equator_geodesic(t, eq),
                MultiCurve::single(curve.clone()),
                MultiCurve::single(diagrams[i].clone()),
            ));
        }
    }
    for i in 0..types.len() {
        for j in i + 1..types.len() {
            let ((t1, c1), (t2, c2)) = (types[i], types[j]);
            if c1.abs() == c2.abs() {
                continue;
            }
            jobs.push((
                Partner::Geodesic { t: t1, c: c1 },
                Partner::Geodesic { t: t2, c: c2 },
                lk_geodesic_pair(t1, c1, t2, c2)?,
                MultiCurve::single(diagrams[i].clone()),
                MultiCurve::single(diagrams[j].clone()),
            ));
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(first, second, formula, m1, m2)| {
            let report = lk_lifted_report(&m1, &m2, BigonChoice::default())?;
            Ok(OracleRow { first, second, formula, oracle: report.lk, matched: formula == report.lk, retries: report.retries })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleSweep { types, rows })
}
