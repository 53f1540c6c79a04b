//! Orientation-respecting smoothing of the double points of a curve.
//!
//! Every double point is cut out with a small disc. The incoming strand of
//! one visit is joined to the outgoing strand of the other visit by a short
//! chord, which is the only reconnection compatible with the orientation.
//! The resulting components are simple and pairwise disjoint.

use log::debug;

use super::curve::{self_intersections, MultiCurve, SphericalCurve};
use super::geometry::{angle, Vec3};
use crate::error::{Error, Result};

/// Largest smoothing radius tried.
const MAX_RADIUS: f64 = 1e-3;
/// Smallest smoothing radius accepted.
const MIN_RADIUS: f64 = 1e-7;

/// Smooths every double point of `c`.
pub fn seifert_smooth(c: &SphericalCurve) -> Result<MultiCurve> {
    seifert_smooth_avoiding(c, &[])
}

/// As [`seifert_smooth`], keeping the smoothing discs clear of `obstacles`
/// so crossings with them are unchanged.
pub fn seifert_smooth_avoiding(c: &SphericalCurve, obstacles: &[&SphericalCurve]) -> Result<MultiCurve> {
    let doubles = self_intersections(c)?;
    if doubles.is_empty() {
        return Ok(MultiCurve::single(c.clone()));
    }
    let total = c.length();
    // Visits sorted by arclength; `partner[i]` is the other visit of the same double point.
    let mut visits: Vec<(f64, usize)> = Vec::with_capacity(2 * doubles.len());
    for (k, x) in doubles.iter().enumerate() {
        visits.push((c.arclength(x.on_first), k));
        visits.push((c.arclength(x.on_second), k));
    }
    visits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = visits.len();
    let mut partner = vec![usize::MAX; m];
    let mut seen = vec![usize::MAX; doubles.len()];
    for (i, &(_, k)) in visits.iter().enumerate() {
        if seen[k] == usize::MAX {
            seen[k] = i;
        } else {
            partner[i] = seen[k];
            partner[seen[k]] = i;
        }
    }

    let radius = smoothing_radius(c, obstacles, &doubles, &visits)?;
    debug!("smoothing {} double points with radius {radius:e}", doubles.len());

    // Walk: leave visit i, follow the curve to visit i + 1, jump to its partner.
    let mut used = vec![false; m];
    let mut components = Vec::new();
    for start in 0..m {
        if used[start] {
            continue;
        }
        let mut points: Vec<Vec3> = Vec::new();
        let mut i = start;
        loop {
            used[i] = true;
            let next = (i + 1) % m;
            let from = visits[i].0 + radius;
            let mut to = visits[next].0 - radius;
            if next <= i {
                to += total;
            }
            for p in c.stretch(from, to) {
                if points.last().is_none_or(|q| angle(q, &p) > 1e-13) {
                    points.push(p);
                }
            }
            i = partner[next];
            if i == start {
                break;
            }
        }
        if points.len() > 1 && angle(&points[0], points.last().expect("non-empty")) <= 1e-13 {
            points.pop();
        }
        components.push(SphericalCurve::new(points)?);
    }
    Ok(MultiCurve { components })
}

fn smoothing_radius(
    c: &SphericalCurve,
    obstacles: &[&SphericalCurve],
    doubles: &[super::curve::Crossing],
    visits: &[(f64, usize)],
) -> Result<f64> {
    let total = c.length();
    let m = visits.len();
    let mut r: f64 = MAX_RADIUS;
    for i in 0..m {
        let gap = (visits[(i + 1) % m].0 - visits[i].0).rem_euclid(total);
        r = r.min(0.3 * gap);
    }
    let window = MAX_RADIUS;
    for x in doubles {
        let s1 = c.arclength(x.on_first);
        let s2 = c.arclength(x.on_second);
        // Edges carrying the strands through this double point are excluded.
        let near = |edge: usize| {
            let (a, b) = (c.arclength_at_vertex(edge), c.arclength_at_vertex(edge) + c.edge_length(edge));
            [s1, s2].iter().any(|&s| {
                let lo = s - window;
                let hi = s + window;
                [0.0, total, -total].iter().any(|&shift| b + shift >= lo && a + shift <= hi)
            })
        };
        let own = c.distance_filtered(&x.position, |e| !near(e));
        let other = obstacles
            .iter()
            .map(|o| o.distance_filtered(&x.position, |_| true))
            .fold(f64::INFINITY, f64::min);
        r = r.min(0.3 * own).min(0.3 * other);
        for y in doubles {
            let d = angle(&x.position, &y.position);
            if d > 0.0 {
                r = r.min(0.3 * d);
            }
        }
    }
    if r < MIN_RADIUS {
        return Err(Error::DiscOverlap { floor: MIN_RADIUS });
    }
    Ok(r)
}
