use serde::Serialize;

use super::geometry::{angle, arc_distance, intersect_arcs, slerp, Vec3};
use crate::error::{Error, Result};

/// A closed polyline of great-circle arcs on the unit sphere, oriented by
/// vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalCurve {
    vertices: Vec<Vec3>,
    /// `cumulative[i]` is the arclength from vertex 0 to vertex `i`; the last
    /// entry is the total length.
    cumulative: Vec<f64>,
}

/// Location on a curve: edge index and fraction along that edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcPosition {
    pub edge: usize,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl SphericalCurve {
    /// Normalizes the vertices. Repeated or antipodal consecutive vertices
    /// are rejected.
    pub fn new(vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Degenerate(format!("a closed curve needs 3 vertices, got {}", vertices.len())));
        }
        let mut vs = Vec::with_capacity(vertices.len());
        for v in vertices {
            let n = v.norm();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Degenerate(format!("vertex {v:?} cannot be normalized")));
            }
            vs.push(v / n);
        }
        let n = vs.len();
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for i in 0..n {
            let len = angle(&vs[i], &vs[(i + 1) % n]);
            if !(len > 1e-13 && len < std::f64::consts::PI - 1e-9) {
                return Err(Error::Degenerate(format!("edge {i} has length {len}")));
            }
            cumulative.push(cumulative[i] + len);
        }
        Ok(Self { vertices: vs, cumulative })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.cumulative[self.vertices.len()]
    }

    pub fn edge(&self, i: usize) -> (&Vec3, &Vec3) {
        (&self.vertices[i], &self.vertices[(i + 1) % self.vertices.len()])
    }

    pub(crate) fn arclength_at_vertex(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.cumulative[i + 1] - self.cumulative[i]
    }

    pub fn reversed(&self) -> Self {
        let mut vs = self.vertices.clone();
        vs.reverse();
        Self::new(vs).expect("reversal keeps a valid curve valid")
    }

    /// Applies `map` to every vertex.
    pub fn map(&self, map: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.vertices.iter().map(map).collect())
    }

    /// Arclength from vertex 0.
    pub fn arclength(&self, pos: ArcPosition) -> f64 {
        self.cumulative[pos.edge] + pos.t * self.edge_length(pos.edge)
    }

    /// Point at arclength `s`, taken modulo the total length.
    pub fn point_at(&self, s: f64) -> Vec3 {
        let total = self.length();
        let s = s.rem_euclid(total);
        let edge = match self.cumulative.partition_point(|&c| c <= s) {
            0 => 0,
            k => (k - 1).min(self.vertices.len() - 1),
        };
        let (a, b) = self.edge(edge);
        slerp(a, b, ((s - self.cumulative[edge]) / self.edge_length(edge)).clamp(0.0, 1.0))
    }

    /// Points of the curve from arclength `from` to `to >= from`, including
    /// both ends and every vertex strictly between them.
    pub(crate) fn stretch(&self, from: f64, to: f64) -> Vec<Vec3> {
        let total = self.length();
        let n = self.vertices.len();
        let mut out = vec![self.point_at(from)];
        let base = from.div_euclid(total) * total;
        let start = from - base;
        let end = to - base;
        let first = self.cumulative.partition_point(|&c| c <= start);
        let mut k = first;
        loop {
            let pos = self.cumulative[k % n] + (k / n) as f64 * total;
            if pos >= end {
                break;
            }
            out.push(self.vertices[k % n]);
            k += 1;
        }
        out.push(self.point_at(to));
        out
    }

    /// Which side of this curve `p` lies on, by the feature of the curve
    /// nearest to `p`. Left is the side on the left when walking along the
    /// curve seen from outside the sphere.
    pub fn side_of(&self, p: &Vec3) -> Result<Side> {
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        let mut feature = None;
        for i in 0..n {
            let (a, b) = self.edge(i);
            let (d, t) = arc_distance(p, a, b);
            if d < best {
                best = d;
                feature = Some(match t {
                    Some(_) => (i, true),
                    None => {
                        let j = if angle(p, a) <= angle(p, b) { i } else { (i + 1) % n };
                        (j, false)
                    }
                });
            }
        }
        if best < 1e-12 {
            return Err(Error::Degenerate("point lies on the curve".into()));
        }
        let (i, interior) = feature.expect("curve has edges");
        let left = if interior {
            let (a, b) = self.edge(i);
            p.dot(&a.cross(b)) > 0.0
        } else {
            let prev = &self.vertices[(i + n - 1) % n];
            let v = &self.vertices[i];
            let next = &self.vertices[(i + 1) % n];
            let n_in = prev.cross(v);
            let n_out = v.cross(next);
            let (l_in, l_out) = (p.dot(&n_in) > 0.0, p.dot(&n_out) > 0.0);
            if next.dot(&n_in) > 0.0 {
                l_in && l_out
            } else {
                l_in || l_out
            }
        };
        Ok(if left { Side::Left } else { Side::Right })
    }

    /// Minimum distance from `p` to the edges accepted by `keep`.
    pub(crate) fn distance_filtered(&self, p: &Vec3, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.vertices.len())
            .filter(|&i| keep(i))
            .map(|i| {
                let (a, b) = self.edge(i);
                arc_distance(p, a, b).0
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// A transverse intersection point of two curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    #[serde(skip)]
    pub position: Vec3,
    pub on_first: ArcPosition,
    pub on_second: ArcPosition,
    /// Orientation of the frame (tangent of first, tangent of second).
    pub sign: i8,
}

fn bounding_caps(c: &SphericalCurve) -> Vec<(Vec3, f64)> {
    (0..c.len())
        .map(|i| {
            let (a, b) = c.edge(i);
            let mid = (a + b).normalize();
            (mid, 0.5 * c.edge_length(i) + 1e-12)
        })
        .collect()
}

/// All crossings between `c1` and `c2`, ordered along `c1`.
pub fn intersections(c1: &SphericalCurve, c2: &SphericalCurve) -> Result<Vec<Crossing>> {
    let caps1 = bounding_caps(c1);
    let caps2 = bounding_caps(c2);
    let mut out = Vec::new();
    for i in 0..c1.len() {
        let (m1, r1) = caps1[i];
        let (a0, a1) = c1.edge(i);
        for j in 0..c2.len() {
            let (m2, r2) = caps2[j];
            if angle(&m1, &m2) > r1 + r2 + 1e-9 {
                continue;
            }
            let (b0, b1) = c2.edge(j);
            if let Some(hit) = intersect_arcs(a0, a1, b0, b1)? {
                out.push(Crossing {
                    position: hit.point,
                    on_first: ArcPosition { edge: i, t: hit.t_a },
                    on_second: ArcPosition { edge: j, t: hit.t_b },
                    sign: hit.sign,
                });
            }
        }
    }
    out.sort_by(|a, b| c1.arclength(a.on_first).total_cmp(&c1.arclength(b.on_first)));
    Ok(out)
}

/// Transverse self-intersections of `c`, each reported once with
/// `on_first` before `on_second` along the curve.
pub fn self_intersections(c: &SphericalCurve) -> Result<Vec<Crossing>> {
    let caps = bounding_caps(c);
    let n = c.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a0, a1) = c.edge(i);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if angle(&caps[i].0, &caps[j].0) > caps[i].1 + caps[j].1 + 1e-9 {
                continue;
            }
            let (b0, b1) = c.edge(j);
            if let Some(hit) = intersect_arcs(a0, a1, b0, b1)? {
                out.push(Crossing {
                    position: hit.point,
                    on_first: ArcPosition { edge: i, t: hit.t_a },
                    on_second: ArcPosition { edge: j, t: hit.t_b },
                    sign: hit.sign,
                });
            }
        }
    }
    out.sort_by(|a, b| c.arclength(a.on_first).total_cmp(&c.arclength(b.on_first)));
    Ok(out)
}

/// Several closed curves considered together.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiCurve {
    pub components: Vec<SphericalCurve>,
}

impl MultiCurve {
    pub fn single(c: SphericalCurve) -> Self {
        Self { components: vec![c] }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components are simple and pairwise disjoint.
    pub fn is_embedded(&self) -> Result<bool> {
        for (i, a) in self.components.iter().enumerate() {
            if !self_intersections(a)?.is_empty() {
                return Ok(false);
            }
            for b in &self.components[i + 1..] {
                if !intersections(a, b)?.is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    pub(crate) fn circle(axis_tilt: f64, n: usize) -> SphericalCurve {
        let (st, ct) = axis_tilt.sin_cos();
        SphericalCurve::new(
            (0..n)
                .map(|k| {
                    let u = TAU * (k as f64 + 0.5) / n as f64;
                    Vec3::new(u.cos(), u.sin() * ct, u.sin() * st)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_great_circles_cross_twice_with_opposite_signs() {
        let eq = circle(0.0, 40);
        let tilted = circle(0.7, 36);
        let xs = intersections(&eq, &tilted).unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(xs[0].sign + xs[1].sign, 0);
        assert!(self_intersections(&eq).unwrap().is_empty());
    }

    #[test]
    fn side_of_the_equator() {
        let eq = circle(0.0, 40);
        assert_eq!(eq.side_of(&Vec3::z()).unwrap(), Side::Left);
        assert_eq!(eq.side_of(&Vec3::new(0.3, 0.1, -0.2).normalize()).unwrap(), Side::Right);
        assert_eq!(eq.reversed().side_of(&Vec3::z()).unwrap(), Side::Right);
    }

    #[test]
    fn side_near_corners() {
        // A small square around the north pole, counterclockwise from outside.
        let h = 0.05;
        let sq = SphericalCurve::new(vec![
            Vec3::new(h, -h, 1.0),
            Vec3::new(h, h, 1.0),
            Vec3::new(-h, h, 1.0),
            Vec3::new(-h, -h, 1.0),
        ])
        .unwrap();
        // Points just outside a corner, diagonally and along each side's extension.
        for p in [Vec3::new(0.06, 0.06, 1.0), Vec3::new(0.06, 0.051, 1.0), Vec3::new(0.051, 0.06, 1.0)] {
            assert_eq!(sq.side_of(&p.normalize()).unwrap(), Side::Right);
        }
        assert_eq!(sq.side_of(&Vec3::new(0.049, 0.049, 1.0).normalize()).unwrap(), Side::Left);
        assert_eq!(sq.side_of(&-Vec3::z()).unwrap(), Side::Right);
    }

    #[test]
    fn stretch_wraps_around() {
        let c = circle(0.0, 8);
        let pts = c.stretch(c.length() - 0.1, c.length() + 0.9);
        assert!(pts.len() >= 3);
        assert!((angle(&pts[0], &c.point_at(-0.1))).abs() < 1e-14);
        assert!((angle(pts.last().unwrap(), &c.point_at(0.9))).abs() < 1e-14);
    }
}
