//! Separating two simple curves by Reidemeister II moves.
//!
//! Two crossings that are consecutive along both curves bound an empty
//! bigon. Pushing the second curve across it removes both crossings without
//! disturbing anything else, so the whole reduction can be carried out on
//! the cyclic crossing orders. The only geometric input is, for every arc
//! between consecutive crossings, the side of the other curve it lies on;
//! arcs that are never pushed keep that side to the end.

use serde::Serialize;

use super::curve::{intersections, Side, SphericalCurve};
use super::geometry::loop_area;
use crate::error::{Error, Result};
use crate::linking::{lk_disjoint_simple, HalfInt};

/// How the next bigon is picked when several are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BigonChoice {
    /// Smallest spherical area, ties broken by crossing index.
    #[default]
    SmallestArea,
    /// First candidate in the order of the first curve.
    FirstFound,
    /// Last candidate in the order of the first curve.
    LastFound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RemovedBigon {
    /// Indices of the two crossings in the order along the first curve.
    pub crossings: (usize, usize),
    /// The boundary of the bigon is a consistently oriented loop.
    pub coherent: bool,
    pub area: f64,
}

/// Sides of the separated curves: where the second lies relative to the
/// first, and where the first lies relative to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FinalSides {
    pub second_relative_to_first: Side,
    pub first_relative_to_second: Side,
}

impl FinalSides {
    /// The annulus between the curves is bounded by their difference
    /// exactly when each lies on a different side of the other.
    pub fn orientations_coincide(&self) -> bool {
        self.second_relative_to_first != self.first_relative_to_second
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiiReduction {
    pub crossings: usize,
    pub removed: Vec<RemovedBigon>,
    pub final_sides: FinalSides,
    /// For meander-free pairs, whether both curves meet the crossings in the
    /// same cyclic order.
    pub meander_free_same_order: Option<bool>,
}

impl RiiReduction {
    pub fn non_coherent(&self) -> usize {
        self.removed.iter().filter(|b| !b.coherent).count()
    }

    /// Linking number of the lifts: the disjoint value, lowered by one for
    /// every bigon removed across an incoherent boundary.
    pub fn linking(&self) -> HalfInt {
        lk_disjoint_simple(self.final_sides.orientations_coincide()) - HalfInt::from_int(self.non_coherent() as i64)
    }
}

/// Decides whether two disjoint simple curves have coinciding orientations.
pub fn classify_disjoint_pair(c1: &SphericalCurve, c2: &SphericalCurve) -> Result<bool> {
    if !intersections(c1, c2)?.is_empty() {
        return Err(Error::Precondition("curves are not disjoint".into()));
    }
    Ok(disjoint_sides(c1, c2)?.orientations_coincide())
}

fn disjoint_sides(c1: &SphericalCurve, c2: &SphericalCurve) -> Result<FinalSides> {
    Ok(FinalSides {
        second_relative_to_first: c1.side_of(&c2.vertices()[0])?,
        first_relative_to_second: c2.side_of(&c1.vertices()[0])?,
    })
}

pub fn rii_reduce(c1: &SphericalCurve, c2: &SphericalCurve) -> Result<RiiReduction> {
    rii_reduce_with(c1, c2, BigonChoice::default())
}

/// Cyclic doubly linked list over crossing indices.
struct Ring {
    next: Vec<usize>,
    prev: Vec<usize>,
}

impl Ring {
    fn from_order(order: &[usize]) -> Self {
        let k = order.len();
        let mut next = vec![0; k];
        let mut prev = vec![0; k];
        for i in 0..k {
            next[order[i]] = order[(i + 1) % k];
            prev[order[(i + 1) % k]] = order[i];
        }
        Self { next, prev }
    }

    /// Drops the consecutive pair `a -> b`. Returns the element before `a`,
    /// or `None` if the ring is now empty.
    fn remove_pair(&mut self, a: usize, b: usize) -> Option<usize> {
        debug_assert_eq!(self.next[a], b);
        let before = self.prev[a];
        if before == b {
            return None;
        }
        let after = self.next[b];
        self.next[before] = after;
        self.prev[after] = before;
        Some(before)
    }
}

fn cyclic_rotation_of(a: &[usize], b: &[usize]) -> bool {
    let k = a.len();
    if k != b.len() || k == 0 {
        return false;
    }
    let Some(shift) = b.iter().position(|&x| x == a[0]) else {
        return false;
    };
    (0..k).all(|i| a[i] == b[(i + shift) % k])
}

pub fn rii_reduce_with(c1: &SphericalCurve, c2: &SphericalCurve, choice: BigonChoice) -> Result<RiiReduction> {
    let xs = intersections(c1, c2)?;
    let k = xs.len();
    if k == 0 {
        return Ok(RiiReduction {
            crossings: 0,
            removed: Vec::new(),
            final_sides: disjoint_sides(c1, c2)?,
            meander_free_same_order: None,
        });
    }
    if k % 2 == 1 {
        return Err(Error::Degenerate(format!("closed curves met in an odd number ({k}) of points")));
    }
    let (l1, l2) = (c1.length(), c2.length());
    let pos1: Vec<f64> = xs.iter().map(|x| c1.arclength(x.on_first)).collect();
    let pos2: Vec<f64> = xs.iter().map(|x| c2.arclength(x.on_second)).collect();
    let order1: Vec<usize> = (0..k).collect();
    let mut order2 = order1.clone();
    order2.sort_by(|&a, &b| pos2[a].total_cmp(&pos2[b]));
    let mut ring1 = Ring::from_order(&order1);
    let mut ring2 = Ring::from_order(&order2);

    // Side of each original arc, keyed by the crossing it starts from. After
    // a removal the arc before the bigon absorbs it and the arc after it, and
    // its own original piece is never pushed, so it still speaks for the
    // merged arc.
    let forward = |from: f64, to: f64, total: f64| (to - from).rem_euclid(total);
    let mut side1 = vec![Side::Left; k];
    let mut side2 = vec![Side::Left; k];
    for i in 0..k {
        let j = ring1.next[i];
        side1[i] = c2.side_of(&c1.point_at(pos1[i] + 0.5 * forward(pos1[i], pos1[j], l1)))?;
        let j = ring2.next[i];
        side2[i] = c1.side_of(&c2.point_at(pos2[i] + 0.5 * forward(pos2[i], pos2[j], l2)))?;
    }

    let reversed: Vec<usize> = order2.iter().rev().copied().collect();
    let meander_free_same_order = if cyclic_rotation_of(&order1, &order2) {
        Some(true)
    } else if cyclic_rotation_of(&order1, &reversed) {
        Some(false)
    } else {
        None
    };

    let mut alive = vec![true; k];
    let mut final1 = None;
    let mut final2 = None;
    let mut removed = Vec::with_capacity(k / 2);
    while removed.len() < k / 2 {
        // (x, y, start of the second curve's arc, coherent)
        let mut candidates: Vec<(usize, usize, usize, bool)> = Vec::new();
        for x in (0..k).filter(|&x| alive[x]) {
            let y = ring1.next[x];
            if ring2.next[x] == y {
                candidates.push((x, y, x, false));
            }
            if ring2.next[y] == x {
                candidates.push((x, y, y, true));
            }
        }
        if candidates.is_empty() {
            return Err(Error::NoBigon { crossings: k - 2 * removed.len() });
        }
        let area_of = |&(x, y, b0, coherent): &(usize, usize, usize, bool)| {
            let b1 = if b0 == x { y } else { x };
            let mut ring = c1.stretch(pos1[x], pos1[x] + forward(pos1[x], pos1[y], l1));
            let mut beta = c2.stretch(pos2[b0], pos2[b0] + forward(pos2[b0], pos2[b1], l2));
            if !coherent {
                beta.reverse();
            }
            ring.extend(beta);
            loop_area(&ring)
        };
        let pick = match choice {
            BigonChoice::FirstFound => candidates[0],
            BigonChoice::LastFound => *candidates.last().expect("non-empty"),
            BigonChoice::SmallestArea => {
                let mut best = candidates[0];
                let mut best_area = area_of(&best);
                for cand in &candidates[1..] {
                    let a = area_of(cand);
                    if a < best_area {
                        best = *cand;
                        best_area = a;
                    }
                }
                best
            }
        };
        let (x, y, b0, coherent) = pick;
        let b1 = if b0 == x { y } else { x };
        let area = area_of(&pick);

        match ring1.remove_pair(x, y) {
            Some(w) => {
                if side1[w] != side1[y] {
                    return Err(Error::Degenerate("arcs around a bigon disagree on their side".into()));
                }
            }
            None => final1 = Some(y),
        }
        match ring2.remove_pair(b0, b1) {
            Some(w) => {
                if side2[w] != side2[b1] {
                    return Err(Error::Degenerate("arcs around a bigon disagree on their side".into()));
                }
            }
            None => final2 = Some(b1),
        }
        alive[x] = false;
        alive[y] = false;
        removed.push(RemovedBigon { crossings: (x.min(y), x.max(y)), coherent, area });
    }
    let final_sides = FinalSides {
        second_relative_to_first: side2[final2.expect("all crossings removed")],
        first_relative_to_second: side1[final1.expect("all crossings removed")],
    };
    Ok(RiiReduction { crossings: k, removed, final_sides, meander_free_same_order })
}
