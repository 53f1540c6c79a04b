use std::f64::consts::{PI, TAU};

use log::debug;
use serde::Serialize;

use super::{ClairautConfig, ClairautMap, EquatorLimit};
use crate::error::{Error, Result};
use crate::ode::detect_closure;
use crate::profile::ProfileSurface;
use crate::roots::{bisect, golden_max};

/// Where the supremum of the mean advance is reached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax {
    Interior(f64),
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupResult {
    pub sup: f64,
    pub argmax: Argmax,
    pub interior_max: f64,
    pub interior_argmax: f64,
    pub limit: EquatorLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    LeftHanded,
    NotLeftHanded,
}

/// A figure-eight closed geodesic confirmed by direct integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub c: f64,
    pub p: i64,
    pub q: i64,
    pub residual: f64,
    pub confirmed: bool,
    pub period_length: f64,
    pub crossings_per_period: usize,
    pub turning_s_north: f64,
    pub turning_s_south: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerdictTolerances {
    pub quad_tol: f64,
    pub verdict_tol: f64,
    pub closure_tol: f64,
    pub grid_n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub sup_mean_delta_u: f64,
    pub margin: f64,
    pub witness: Option<Witness>,
    pub asymptotic: bool,
    pub equator_limit: EquatorLimit,
    pub tolerances: VerdictTolerances,
}

/// Level carrying closed geodesics of a requested type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedLevel {
    pub c: f64,
    /// Every scanned level has this rotation number.
    pub degenerate: bool,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl ClairautMap<'_> {
    /// Maximum of the mean advance over `c` in `(0, r_e)`, boundary limit included.
    pub fn sup_mean_swing(&self) -> Result<SupResult> {
        if self.config.grid_n < 128 {
            return Err(Error::Precondition(format!("sup search needs grid_n >= 128, got {}", self.config.grid_n)));
        }
        let grid = self.grid()?;
        let limit = self.equator_limit()?;
        let best = (0..grid.len()).fold(0, |b, i| if grid[i].1 > grid[b].1 { i } else { b });
        let lo = if best == 0 { 0.5 * grid[0].0 } else { grid[best - 1].0 };
        let hi = if best + 1 == grid.len() {
            0.5 * (grid[best].0 + self.equator.r_e)
        } else {
            grid[best + 1].0
        };
        let (mut c_star, mut m_star) = (grid[best].0, grid[best].1);
        // Golden-section refinement; evaluation failures count as -inf.
        let (c_ref, m_ref) = golden_max(|c| self.mean_swing(c).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-10 * self.equator.r_e);
        if m_ref > m_star {
            c_star = c_ref;
            m_star = m_ref;
        }
        let (sup, argmax) = if limit.value >= m_star { (limit.value, Argmax::Boundary) } else { (m_star, Argmax::Interior(c_star)) };
        Ok(SupResult { sup, argmax, interior_max: m_star, interior_argmax: c_star, limit })
    }

    /// Smallest level whose mean advance reaches `target`, if any.
    fn first_level_reaching(&self, target: f64, sup: &SupResult) -> Result<Option<f64>> {
        let grid = self.grid()?;
        let mut prev = (0.0, PI);
        let mut bracket = None;
        for &(c, m) in grid {
            if (prev.1 - target) * (m - target) <= 0.0 && m != prev.1 {
                bracket = Some((prev.0, c));
                break;
            }
            prev = (c, m);
        }
        if bracket.is_none() && sup.interior_max >= target {
            let c = sup.interior_argmax;
            let below = grid.iter().rev().find(|(gc, _)| *gc < c).map_or(0.0, |g| g.0);
            bracket = Some((below, c));
        }
        let Some((lo, hi)) = bracket else {
            return Ok(None);
        };
        let lo = if lo == 0.0 { 1e-9 * self.equator.r_e } else { lo };
        Ok(bisect(|c| self.mean_swing(c).unwrap_or(f64::NAN) - target, lo, hi, 1e-15 * self.equator.r_e))
    }

    /// Decides left-handedness from the supremum of the mean advance.
    pub fn left_handed_verdict(&self) -> Result<Verdict> {
        let sup = self.sup_mean_swing()?;
        let cfg = &self.config;
        let threshold = TAU - cfg.verdict_tol;
        let uncertainty = match sup.argmax {
            Argmax::Boundary => sup.limit.error_estimate,
            Argmax::Interior(_) => 10.0 * cfg.quad_tol * sup.sup.abs(),
        };
        debug!("sup = {} ({:?}), uncertainty {:e}", sup.sup, sup.argmax, uncertainty);
        if (sup.sup - TAU).abs() < cfg.verdict_tol && sup.sup - uncertainty < threshold && threshold <= sup.sup + uncertainty {
            return Err(Error::Inconclusive { sup: sup.sup, gap: sup.sup - threshold, uncertainty });
        }
        let status = if sup.sup < threshold { VerdictStatus::LeftHanded } else { VerdictStatus::NotLeftHanded };
        let mut witness = None;
        let mut asymptotic = false;
        if status == VerdictStatus::NotLeftHanded {
            match self.first_level_reaching(TAU, &sup)? {
                Some(c) => witness = Some(self.confirm_witness(c)?),
                None => asymptotic = true,
            }
        }
        Ok(Verdict {
            status,
            sup_mean_delta_u: sup.sup,
            margin: TAU - sup.sup,
            witness,
            asymptotic,
            equator_limit: sup.limit,
            tolerances: VerdictTolerances {
                quad_tol: cfg.quad_tol,
                verdict_tol: cfg.verdict_tol,
                closure_tol: cfg.closure_tol,
                grid_n: cfg.grid_n,
            },
        })
    }

    fn confirm_witness(&self, c: f64) -> Result<Witness> {
        let cfg = &self.config;
        let closure = detect_closure(self.surface, c, 1, cfg.closure_tol.max(1e-6), cfg.ode)?;
        let level = self.level(c)?;
        let confirmed = closure.closed && closure.p == 2 && closure.q == 1 && closure.residual < cfg.closure_tol.max(1e-6);
        Ok(Witness {
            c,
            p: 2,
            q: 1,
            residual: closure.residual,
            confirmed,
            period_length: closure.period_length,
            crossings_per_period: closure.crossings,
            turning_s_north: level.turning_s_north,
            turning_s_south: level.turning_s_south,
        })
    }

    /// Level whose mean advance equals `pi p / q`.
    pub fn find_closed_geodesic(&self, p: i64, q: i64) -> Result<Option<ClosedLevel>> {
        if q < 1 || p < 0 {
            return Err(Error::InvalidType { p, q, reason: "need p >= 0 and q >= 1" });
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidType { p, q, reason: "p and q must be coprime" });
        }
        if p == 0 {
            return Ok(Some(ClosedLevel { c: 0.0, degenerate: false }));
        }
        let target = PI * p as f64 / q as f64;
        let grid = self.grid()?;
        if grid.iter().all(|(_, m)| (m - target).abs() < 1e-9) {
            let mid = grid[grid.len() / 2].0;
            return Ok(Some(ClosedLevel { c: mid, degenerate: true }));
        }
        let r_e = self.equator.r_e;
        let mut points: Vec<(f64, f64)> = grid.to_vec();
        let c_end = r_e * (1.0 - 2f64.powi(-30));
        points.push((c_end, self.mean_swing(c_end)?));
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.1 - target) * (b.1 - target) <= 0.0 && a.1 != b.1 {
                let c = bisect(|c| self.mean_swing(c).unwrap_or(f64::NAN) - target, a.0, b.0, 1e-15 * r_e);
                return Ok(c.map(|c| ClosedLevel { c, degenerate: false }));
            }
        }
        Ok(None)
    }
}

/// Axis ratio at which the ellipsoid's equator limit crosses `2 pi`.
pub fn critical_ellipsoid_b(tol: f64, config: &ClairautConfig) -> Result<f64> {
    if !(tol >= 1e-6) {
        return Err(Error::Precondition(format!("tolerance must be at least 1e-6, got {tol}")));
    }
    let below = |b: f64| -> Result<bool> {
        let surface = ProfileSurface::ellipsoid(b)?;
        let map = ClairautMap::new(&surface, *config)?;
        Ok(map.equator_limit()?.value < TAU)
    };
    let (mut lo, mut hi) = (1.5, 2.5);
    if !below(lo)? || below(hi)? {
        return Err(Error::NonConvergence("threshold not bracketed by [1.5, 2.5]".into()));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
