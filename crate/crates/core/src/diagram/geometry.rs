//! Spherical geometry on polylines made of great-circle arcs.

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Vertices closer than this to another curve's edge are degenerate.
pub(crate) const GENERAL_POSITION: f64 = 1e-12;

/// Angle between two unit vectors, accurate for small and large angles.
pub fn angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Point at fraction `t` of the arc from `a` to `b`.
pub fn slerp(a: &Vec3, b: &Vec3, t: f64) -> Vec3 {
    let theta = angle(a, b);
    if theta < 1e-15 {
        return *a;
    }
    let s = theta.sin();
    let p = a * (((1.0 - t) * theta).sin() / s) + b * ((t * theta).sin() / s);
    p.normalize()
}

/// Distance from `p` to the arc `a -> b` and the parameter of the nearest
/// point, with `None` when the nearest point is an endpoint.
pub(crate) fn arc_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> (f64, Option<f64>) {
    let n = a.cross(b);
    let n_norm = n.norm();
    let da = angle(p, a);
    let db = angle(p, b);
    let endpoint = if da <= db { (da, None) } else { (db, None) };
    if n_norm < 1e-300 {
        return endpoint;
    }
    let n = n / n_norm;
    let off = p.dot(&n);
    let q = p - n * off;
    let q_norm = q.norm();
    if q_norm < 1e-15 {
        return endpoint;
    }
    let q = q / q_norm;
    if a.cross(&q).dot(&n) >= 0.0 && q.cross(b).dot(&n) >= 0.0 {
        let t = angle(a, &q) / angle(a, b);
        (off.abs().atan2(q_norm), Some(t))
    } else {
        endpoint
    }
}

/// Intersection of the arcs `a0 -> a1` and `b0 -> b1`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ArcHit {
    pub point: Vec3,
    pub t_a: f64,
    pub t_b: f64,
    /// `+1` when `(tangent_a, tangent_b)` is positively oriented at the
    /// crossing, seen from outside the sphere.
    pub sign: i8,
}

/// Intersects two arcs shorter than a half circle. Touching configurations
/// are reported as degenerate so the caller can perturb.
pub(crate) fn intersect_arcs(a0: &Vec3, a1: &Vec3, b0: &Vec3, b1: &Vec3) -> Result<Option<ArcHit>> {
    let na = a0.cross(a1).normalize();
    let nb = b0.cross(b1).normalize();
    let (sb0, sb1) = (na.dot(b0), na.dot(b1));
    let (sa0, sa1) = (nb.dot(a0), nb.dot(a1));
    // A vertex lying on the other arc's great circle is only a problem when
    // it also lies within that arc.
    for (s, v, (p, q)) in [(sb0, b0, (a0, a1)), (sb1, b1, (a0, a1)), (sa0, a0, (b0, b1)), (sa1, a1, (b0, b1))] {
        if s.abs() < GENERAL_POSITION && arc_distance(v, p, q).0 < GENERAL_POSITION.sqrt() {
            return Err(Error::Degenerate(format!("vertex {v:?} touches an arc of the other curve")));
        }
    }
    if sb0 * sb1 >= 0.0 || sa0 * sa1 >= 0.0 {
        return Ok(None);
    }
    let d = na.cross(&nb);
    let d_norm = d.norm();
    if d_norm < 1e-9 {
        return Err(Error::Degenerate("nearly tangent arcs".into()));
    }
    let mut p = d / d_norm;
    if p.dot(&(a0 + a1)) < 0.0 {
        p = -p;
    }
    if p.dot(&(b0 + b1)) <= 0.0 {
        return Ok(None);
    }
    let within = |x0: &Vec3, x1: &Vec3, n: &Vec3| x0.cross(&p).dot(n) > 0.0 && p.cross(x1).dot(n) > 0.0;
    if !within(a0, a1, &na) || !within(b0, b1, &nb) {
        return Ok(None);
    }
    let t_a = angle(a0, &p) / angle(a0, a1);
    let t_b = angle(b0, &p) / angle(b0, b1);
    let ta = na.cross(&p);
    let tb = nb.cross(&p);
    let sign = if ta.cross(&tb).dot(&p) > 0.0 { 1 } else { -1 };
    Ok(Some(ArcHit { point: p, t_a, t_b, sign }))
}

/// Signed solid angle of the spherical triangle `(a, b, c)`.
fn triangle_solid_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Area of the smaller region bounded by a closed loop, from a fan of
/// triangles around the normalized vertex mean. Used only to rank bigons.
pub(crate) fn loop_area(points: &[Vec3]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let sum: Vec3 = points.iter().sum();
    let apex = if sum.norm() > 1e-12 { sum.normalize() } else { points[0] };
    let n = points.len();
    let total: f64 = (0..n).map(|i| triangle_solid_angle(&apex, &points[i], &points[(i + 1) % n])).sum();
    let a = total.abs();
    a.min(4.0 * std::f64::consts::PI - a)
}
