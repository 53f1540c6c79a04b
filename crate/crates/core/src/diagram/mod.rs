//! Linking numbers of lifted curves computed from curve diagrams on the
//! round sphere, independently of the closed forms in [`crate::linking`].
//!
//! Each curve is first made embedded by Seifert smoothing. Linking is
//! bilinear, so the result is a sum over pairs of simple components, and
//! each pair is separated by Reidemeister II moves ([`rii`]).

mod curve;
pub mod geometry;
mod io;
mod rii;
mod sample;
mod seifert;
mod sweep;

use log::debug;
use nalgebra::{Unit, UnitQuaternion};
use serde::Serialize;

pub use curve::{intersections, self_intersections, ArcPosition, Crossing, MultiCurve, Side, SphericalCurve};
pub use geometry::Vec3;
pub use io::{read_diagram, write_diagram};
pub use rii::{classify_disjoint_pair, rii_reduce, rii_reduce_with, BigonChoice, FinalSides, RemovedBigon, RiiReduction};
pub use sample::{equator_curve, latitude_circle, sample_closed_geodesic, sample_geodesic_with_offset, SampleOptions};
pub use seifert::{seifert_smooth, seifert_smooth_avoiding};
pub use sweep::{oracle_sweep, realizable_types, OracleRow, OracleSweep, Partner};

use crate::error::{Error, Result};
use crate::linking::HalfInt;

/// Attempts made with the second curve rotated before giving up.
const MAX_RETRIES: u32 = 8;
const FIRST_ROTATION: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub first_component: usize,
    pub second_component: usize,
    pub crossings: usize,
    pub non_coherent: usize,
    pub orientations_coincide: bool,
    pub meander_free_same_order: Option<bool>,
    pub lk: HalfInt,
}

/// Linking of two lifted diagrams with the intermediate data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedLinking {
    pub lk: HalfInt,
    pub first_components: usize,
    pub second_components: usize,
    pub pairs: Vec<PairReport>,
    /// Number of rotations applied to the second curve.
    pub retries: u32,
}

/// Linking number of the lifts of two curves in general position.
pub fn lk_lifted(c1: &SphericalCurve, c2: &SphericalCurve) -> Result<HalfInt> {
    Ok(lk_lifted_report(&MultiCurve::single(c1.clone()), &MultiCurve::single(c2.clone()), BigonChoice::default())?.lk)
}

/// Fixed small rotation used to restore general position.
fn nudge(angle: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Unit::new_normalize(Vec3::new(1.0, 2.0, 3.0)), angle)
}

fn rotated(m: &MultiCurve, q: &UnitQuaternion<f64>) -> Result<MultiCurve> {
    Ok(MultiCurve { components: m.components.iter().map(|c| c.map(|v| q * v)).collect::<Result<_>>()? })
}

/// Linking of two multi-curves, summed over components. On a degenerate
/// configuration the second argument is rotated by a fixed quaternion with
/// angle `1e-5`, halved on each further retry.
pub fn lk_lifted_report(m1: &MultiCurve, m2: &MultiCurve, choice: BigonChoice) -> Result<LiftedLinking> {
    let mut angle = FIRST_ROTATION;
    let mut retries = 0;
    loop {
        let attempt = if retries == 0 { lk_once(m1, m2, choice) } else { lk_once(m1, &rotated(m2, &nudge(angle))?, choice) };
        match attempt {
            Ok(mut report) => {
                report.retries = retries;
                return Ok(report);
            }
            Err(e @ (Error::Degenerate(_) | Error::DiscOverlap { .. })) => {
                if retries == MAX_RETRIES {
                    return Err(e);
                }
                debug!("retrying after {e}");
                if retries > 0 {
                    angle *= 0.5;
                }
                retries += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

fn lk_once(m1: &MultiCurve, m2: &MultiCurve, choice: BigonChoice) -> Result<LiftedLinking> {
    let all2: Vec<&SphericalCurve> = m2.components.iter().collect();
    let all1: Vec<&SphericalCurve> = m1.components.iter().collect();
    let mut smooth1 = Vec::new();
    for c in &m1.components {
        smooth1.extend(seifert_smooth_avoiding(c, &all2)?.components);
    }
    let mut smooth2 = Vec::new();
    for c in &m2.components {
        smooth2.extend(seifert_smooth_avoiding(c, &all1)?.components);
    }
    let mut pairs = Vec::with_capacity(smooth1.len() * smooth2.len());
    for (i, a) in smooth1.iter().enumerate() {
        for (j, b) in smooth2.iter().enumerate() {
            let r = rii_reduce_with(a, b, choice)?;
            pairs.push(PairReport {
                first_component: i,
                second_component: j,
                crossings: r.crossings,
                non_coherent: r.non_coherent(),
                orientations_coincide: r.final_sides.orientations_coincide(),
                meander_free_same_order: r.meander_free_same_order,
                lk: r.linking(),
            });
        }
    }
    Ok(LiftedLinking {
        lk: pairs.iter().map(|p| p.lk).sum(),
        first_components: smooth1.len(),
        second_components: smooth2.len(),
        pairs,
        retries: 0,
    })
}
