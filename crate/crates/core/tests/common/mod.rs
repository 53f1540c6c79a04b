#![allow(dead_code)]

use revlink_core::ProfileSurface;

pub fn sphere() -> ProfileSurface {
    ProfileSurface::sphere()
}

pub fn ellipsoid(b: f64) -> ProfileSurface {
    ProfileSurface::ellipsoid(b).expect("valid axis ratio")
}

pub fn pinched(delta: f64) -> ProfileSurface {
    ProfileSurface::pinched_sphere(delta, 0.1).expect("valid pinched sphere")
}

/// The surfaces every oracle comparison runs on.
pub fn test_surfaces() -> Vec<(&'static str, ProfileSurface)> {
    vec![("sphere", sphere()), ("E1.5", ellipsoid(1.5)), ("E2.5", ellipsoid(2.5)), ("S0.2", pinched(0.2))]
}

/// `n` levels evenly spread through `(0, r_e)`.
pub fn levels(r_e: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| r_e * k as f64 / (n + 1) as f64).collect()
}
