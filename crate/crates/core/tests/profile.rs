mod common;

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use revlink_core::profile::{read_profile_samples, write_profile_samples, IssueKind};
use revlink_core::{ProfileJet, ProfileSurface, SurfaceSpec};

use common::{ellipsoid, pinched};

#[test]
fn ellipsoid_pinching_is_inverse_fourth_power() {
    for b in [1.2, 1.5, 2.0, 3.0] {
        let r = ellipsoid(b).curvature_report(1024).unwrap();
        let expected = 1.0 / b.powi(4);
        assert!((r.delta - expected).abs() < 1e-8, "b = {b}: {} vs {expected}", r.delta);
        assert!((r.k_min - 1.0 / (b * b)).abs() < 1e-8);
        assert!((r.k_max - b * b).abs() < 1e-8);
    }
}

#[test]
fn pinched_spheres_reach_requested_pinching() {
    for delta in [0.2, 0.25, 0.5] {
        let s = pinched(delta);
        let r = s.curvature_report(1024).unwrap();
        assert!((r.delta - delta).abs() < 1e-2, "delta {delta}: got {}", r.delta);
        // The band keeps the equator at unit radius with curvature delta there.
        let eq = s.equator().unwrap();
        assert!((eq.r_e - 1.0).abs() < 1e-12);
        assert!((s.gaussian_curvature(eq.s_e).unwrap() - delta).abs() < 1e-9);
        assert!(s.validate(1024).passed);
    }
}

#[test]
fn pinched_sphere_rejects_bad_parameters() {
    assert!(ProfileSurface::pinched_sphere(0.0, 0.1).is_err());
    assert!(ProfileSurface::pinched_sphere(1.5, 0.1).is_err());
    assert!(ProfileSurface::pinched_sphere(0.25, 0.0).is_err());
}

#[test]
fn dumbbell_fails_validation() {
    let s = ProfileSurface::analytic("dumbbell", vec![], -FRAC_PI_2, FRAC_PI_2, |v| {
        let (sv, cv) = v.sin_cos();
        let w = 1.0 - 0.8 * cv * cv;
        let dw = 1.6 * cv * sv;
        let d2w = 1.6 * (cv * cv - sv * sv);
        ProfileJet { f: cv * w, g: sv, df: -sv * w + cv * dw, dg: cv, d2f: -cv * w - 2.0 * sv * dw + cv * d2w, d2g: -sv }
    })
    .unwrap();
    let report = s.validate(512);
    assert!(!report.passed);
    assert!(report.issues.iter().any(|i| i.kind == IssueKind::NonPositiveCurvature));
    assert!(report.into_result().is_err());
}

fn ellipsoid_rows(b: f64, n: usize) -> Vec<(f64, f64, f64)> {
    (0..=n)
        .map(|k| {
            let v = -FRAC_PI_2 + std::f64::consts::PI * k as f64 / n as f64;
            (v, v.cos().max(0.0), b * v.sin())
        })
        .collect()
}

#[test]
fn sampled_profile_converges_under_refinement() {
    let b = 1.5;
    let exact = |v: f64| b * b / (b * b * v.cos().powi(2) + v.sin().powi(2)).powi(2);
    let probe = [-0.9, -0.3, 0.2, 0.7];
    let err = |n: usize| {
        let s = ProfileSurface::from_samples(&ellipsoid_rows(b, n)).unwrap();
        probe.iter().map(|&v| (s.gaussian_curvature(v).unwrap() - exact(v)).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(200), err(800));
    assert!(fine < coarse, "refinement did not help: {coarse:e} -> {fine:e}");
    assert!(fine < 1e-4, "{fine:e}");
}

#[test]
fn profile_samples_roundtrip_through_text() {
    let rows = ellipsoid_rows(2.0, 64);
    let mut buf = Vec::new();
    write_profile_samples(&mut buf, &rows).unwrap();
    let back = read_profile_samples(buf.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a, b);
    }
}

#[test]
fn surface_specs_parse_and_build() {
    let cases = ["sphere", "ellipsoid:b=1.5", "sdelta:delta=0.25,eps=0.1"];
    for text in cases {
        let spec: SurfaceSpec = text.parse().unwrap();
        assert!(spec.build().is_ok(), "{text}");
    }
    for bad in ["", "torus", "ellipsoid:c=1", "ellipsoid:b=x", "sdelta:delta=0.2", "file:"] {
        assert!(bad.parse::<SurfaceSpec>().is_err(), "{bad}");
    }
    let spec: SurfaceSpec = "file:/nonexistent/profile.csv".parse().unwrap();
    assert!(spec.build().is_err());
}

#[test]
fn sampled_profile_file_builds_a_surface() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e2.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    write_profile_samples(&mut file, &ellipsoid_rows(2.0, 400)).unwrap();
    drop(file);
    let spec: SurfaceSpec = format!("file:{}", path.display()).parse().unwrap();
    let s = spec.build().unwrap();
    let r = s.curvature_report(512).unwrap();
    assert!((r.delta - 1.0 / 16.0).abs() < 1e-3, "{}", r.delta);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ellipsoid_curvature_matches_closed_form(b in 0.5f64..4.0, v in -1.5f64..1.5) {
        let s = ellipsoid(b);
        let exact = b * b / (b * b * v.cos().powi(2) + v.sin().powi(2)).powi(2);
        let k = s.gaussian_curvature(v).unwrap();
        prop_assert!((k - exact).abs() <= 1e-10 * exact.max(1.0), "{} vs {}", k, exact);
    }

    #[test]
    fn profiles_are_mirror_symmetric(delta in 0.2f64..0.6, s in 0.0f64..1.5) {
        let p = pinched(delta);
        let (a, b) = (p.eval(s), p.eval(-s));
        prop_assert!((a.f - b.f).abs() < 1e-12);
        prop_assert!((a.g + b.g).abs() < 1e-12);
        let ka = p.gaussian_curvature(s).unwrap();
        let kb = p.gaussian_curvature(-s).unwrap();
        prop_assert!((ka - kb).abs() <= 1e-9 * ka.abs().max(1.0));
    }
}
