mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use revlink_core::clairaut::{ClairautConfig, ClairautMap};
use revlink_core::ode::{clairaut_constant, detect_closure, half_swing_ode, integrate, GeodesicState, OdeOptions};

use common::{ellipsoid, levels, pinched, sphere, test_surfaces};

#[test]
fn integration_agrees_with_quadrature_at_twenty_levels() {
    for (name, s) in test_surfaces() {
        let map = ClairautMap::new(&s, ClairautConfig::default()).unwrap();
        let r_e = map.equator().r_e;
        let mut worst: f64 = 0.0;
        for c in levels(r_e, 20) {
            let quad = map.swing(c).unwrap();
            let ode = half_swing_ode(&s, c, OdeOptions::default()).unwrap();
            worst = worst
                .max((quad.delta_u_north - ode.delta_u_north).abs())
                .max((quad.delta_u_south - ode.delta_u_south).abs())
                .max((quad.t_half_north - ode.t_half_north).abs());
        }
        assert!(worst < 1e-6, "{name}: worst disagreement {worst:e}");
    }
}

#[test]
fn first_integrals_drift_little_over_long_runs() {
    let opts = OdeOptions::with_tol(1e-10);
    let mut surfaces = test_surfaces();
    surfaces.push(("S0.25", pinched(0.25)));
    surfaces.push(("S0.5", pinched(0.5)));
    for (name, s) in surfaces {
        let eq = s.equator().unwrap();
        for c in [0.05, 0.4, 0.93] {
            let start = GeodesicState::on_equator(&s, &eq, c * eq.r_e, 0.3).unwrap();
            let traj = integrate(&s, start, 100.0, opts).unwrap();
            assert!(traj.clairaut_drift < 1e-8, "{name} c={c}: Clairaut drift {:e}", traj.clairaut_drift);
            assert!(traj.speed_drift < 1e-8, "{name} c={c}: speed drift {:e}", traj.speed_drift);
        }
    }
}

#[test]
fn reversing_the_velocity_retraces_the_path() {
    let s = ellipsoid(2.5);
    let eq = s.equator().unwrap();
    let start = GeodesicState::on_equator(&s, &eq, 0.6, 0.0).unwrap();
    let forward = integrate(&s, start, 17.0, OdeOptions::default()).unwrap();
    let (_, end) = *forward.samples.last().unwrap();
    let back_start = GeodesicState { du: -end.du, ds: -end.ds, ..end };
    let back = integrate(&s, back_start, 17.0, OdeOptions::default()).unwrap();
    let (_, home) = *back.samples.last().unwrap();
    assert!((home.u - start.u).abs() < 1e-8, "u off by {:e}", home.u - start.u);
    assert!((home.s - start.s).abs() < 1e-8, "s off by {:e}", home.s - start.s);
}

#[test]
fn sphere_geodesics_close_after_one_turn() {
    let s = sphere();
    for c in [0.1, 0.5, 0.9, -0.7] {
        let r = detect_closure(&s, c, 5, 1e-8, OdeOptions::default()).unwrap();
        assert!(r.closed, "c = {c}: residual {:e}", r.residual);
        assert_eq!((r.p, r.q), (c.signum() as i64, 1));
        assert!((r.period_length - TAU).abs() < 1e-8);
        assert_eq!(r.crossings, 2);
    }
}

#[test]
fn unclosed_level_reports_its_best_residual() {
    // rho is irrational-looking here; three pairs are not enough to close.
    let s = ellipsoid(1.5);
    let r = detect_closure(&s, 0.37, 3, 1e-8, OdeOptions::default()).unwrap();
    assert!(!r.closed);
    assert!(r.residual.is_finite() && r.residual > 1e-8);
}

#[test]
fn launch_rejects_levels_beyond_the_equator() {
    let s = ellipsoid(2.0);
    let eq = s.equator().unwrap();
    assert!(GeodesicState::on_equator(&s, &eq, 1.0, 0.0).is_err());
    assert!(half_swing_ode(&s, 0.0, OdeOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn clairaut_constant_is_conserved(b in 1.05f64..3.0, c in -0.98f64..0.98, u0 in 0.0f64..TAU) {
        let s = ellipsoid(b);
        let eq = s.equator().unwrap();
        let start = GeodesicState::on_equator(&s, &eq, c, u0).unwrap();
        prop_assert!((clairaut_constant(&s, &start) - c).abs() < 1e-14);
        let traj = integrate(&s, start, 20.0, OdeOptions::default()).unwrap();
        prop_assert!(traj.clairaut_drift < 1e-9, "drift {:e}", traj.clairaut_drift);
    }

    #[test]
    fn hemispheres_agree_on_symmetric_surfaces(b in 1.05f64..3.0, c in 0.02f64..0.98) {
        let s = ellipsoid(b);
        let h = half_swing_ode(&s, c, OdeOptions::default()).unwrap();
        prop_assert!((h.delta_u_north - h.delta_u_south).abs() < 1e-9);
        prop_assert!((h.t_half_north - h.t_half_south).abs() < 1e-9);
    }

    #[test]
    fn mirrored_level_mirrors_the_advance(b in 1.05f64..3.0, c in 0.02f64..0.98) {
        let s = ellipsoid(b);
        let plus = half_swing_ode(&s, c, OdeOptions::default()).unwrap();
        let minus = half_swing_ode(&s, -c, OdeOptions::default()).unwrap();
        prop_assert!((plus.delta_u_north + minus.delta_u_north).abs() < 1e-9);
        prop_assert!(plus.delta_u_north > 0.0 && plus.delta_u_north < 2.0 * PI * b);
    }
}
