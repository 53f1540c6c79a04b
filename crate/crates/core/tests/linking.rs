mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use revlink_core::clairaut::{ClairautConfig, ClairautMap};
use revlink_core::linking::{
    is_figure_eight, linking_density, lk_equator_geodesic, lk_geodesic_pair, lk_two_geodesics, self_linking_density,
    EquatorOrientation, GeodesicType, HalfInt,
};

use common::{ellipsoid, pinched, sphere};

fn t(p: i64, q: i64) -> GeodesicType {
    GeodesicType::new(p, q).unwrap()
}

fn map(s: &revlink_core::ProfileSurface) -> ClairautMap<'_> {
    ClairautMap::new(s, ClairautConfig { grid_n: 256, ..Default::default() }).unwrap()
}

#[test]
fn equator_goldens() {
    let plus = EquatorOrientation::Plus;
    assert_eq!(lk_equator_geodesic(t(8, 1), plus), HalfInt::from_int(3));
    assert_eq!(lk_equator_geodesic(t(2, 1), plus), HalfInt::ZERO);
    assert_eq!(lk_equator_geodesic(GeodesicType::meridian(), plus), HalfInt::from_halves(-1));
    assert_eq!(lk_equator_geodesic(GeodesicType::meridian(), EquatorOrientation::Minus), HalfInt::from_halves(-1));
}

#[test]
fn both_equators_link_negatively_exactly_below_the_figure_eight_slope() {
    for q in 1..=4 {
        for p in -8..=8 {
            let Ok(ty) = GeodesicType::new(p, q) else { continue };
            let plus = lk_equator_geodesic(ty, EquatorOrientation::Plus);
            let minus = lk_equator_geodesic(ty, EquatorOrientation::Minus);
            let both_negative = plus < HalfInt::ZERO && minus < HalfInt::ZERO;
            assert_eq!(both_negative, p.abs() < 2 * q, "({p},{q}): {plus}, {minus}");
        }
    }
    assert!(is_figure_eight(t(2, 1)) && is_figure_eight(t(-2, 1)) && !is_figure_eight(t(4, 2)));
}

#[test]
fn outer_geodesic_must_come_first() {
    assert!(lk_two_geodesics(t(1, 1), t(3, 2), false).is_err());
    assert_eq!(lk_geodesic_pair(t(3, 2), 0.2, t(1, 1), 0.9).unwrap(), lk_two_geodesics(t(1, 1), t(3, 2), true).unwrap());
}

#[test]
fn sphere_density_is_minus_one_over_eight_pi_squared() {
    let s = sphere();
    let m = map(&s);
    let expected = -1.0 / (8.0 * PI * PI);
    for (c1, c2) in [(0.3, 0.7), (0.5, 0.5), (0.9, 0.1), (-0.4, 0.6)] {
        let d = linking_density(&m, c1, c2).unwrap();
        assert!((d - expected).abs() < 1e-10, "({c1}, {c2}): {d}");
    }
    let self_lk = self_linking_density(&m, 0.5).unwrap();
    assert!((self_lk - expected).abs() < 1e-9, "{self_lk}");
}

#[test]
fn densities_times_lengths_recover_exact_linking() {
    let s = ellipsoid(1.5);
    let m = map(&s);
    let types = [t(4, 3), t(5, 4), t(7, 5), t(6, 5)];
    let mut closed = Vec::new();
    for ty in types {
        let level = m.find_closed_geodesic(ty.p(), ty.q()).unwrap().expect("realizable on E1.5");
        let length = 2.0 * ty.q() as f64 * m.swing(level.c).unwrap().mean_t_half();
        closed.push((ty, level.c, length));
        // The same orbit traversed the other way round the axis.
        closed.push((ty.reversed(), -level.c, length));
    }
    let eq_len = 2.0 * PI * m.equator().r_e;
    for &(ty, c, len) in &closed {
        let exact = lk_equator_geodesic(ty, EquatorOrientation::Plus).to_f64();
        let numeric = linking_density(&m, 1.0, c).unwrap() * eq_len * len;
        assert!((numeric - exact).abs() < 1e-6, "{ty} vs e+: {numeric} vs {exact}");
    }
    for (i, &(t1, c1, l1)) in closed.iter().enumerate() {
        for &(t2, c2, l2) in &closed[i + 1..] {
            if c1.abs() == c2.abs() {
                continue;
            }
            let exact = lk_geodesic_pair(t1, c1, t2, c2).unwrap().to_f64();
            let numeric = linking_density(&m, c1, c2).unwrap() * l1 * l2;
            assert!((numeric - exact).abs() < 1e-6, "{t1} vs {t2}: {numeric} vs {exact}");
        }
    }
}

#[test]
fn self_linking_at_the_equator() {
    let s = pinched(0.25);
    let d = self_linking_density(&map(&s), 1.0).unwrap();
    assert!(d.abs() < 1e-4, "{d}");

    let e = ellipsoid(1.5);
    assert!(self_linking_density(&map(&e), 1.0).unwrap() < 0.0);
    let e = ellipsoid(2.5);
    assert!(self_linking_density(&map(&e), 1.0).unwrap() > 0.0);
}

#[test]
fn figure_eight_torus_does_not_link_the_equator() {
    let s = ellipsoid(2.5);
    let m = map(&s);
    let level = m.find_closed_geodesic(2, 1).unwrap().expect("E2.5 carries figure-eights");
    let d = linking_density(&m, 1.0, level.c).unwrap();
    assert!(d.abs() < 1e-9, "{d}");
    assert_eq!(lk_equator_geodesic(t(2, 1), EquatorOrientation::Plus), HalfInt::ZERO);
}

#[test]
fn levels_beyond_the_equator_are_rejected() {
    let s = sphere();
    let m = map(&s);
    assert!(linking_density(&m, 1.2, 0.3).is_err());
    assert!(self_linking_density(&m, -1.01).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn half_integers_form_a_group(a in -10_000i64..10_000, b in -10_000i64..10_000, k in -50i64..50) {
        let (x, y) = (HalfInt::from_halves(a), HalfInt::from_halves(b));
        prop_assert_eq!(x + y, y + x);
        prop_assert_eq!(x + y - y, x);
        prop_assert_eq!(-(-x), x);
        prop_assert_eq!((x + y) * k, x * k + y * k);
        prop_assert_eq!((x + y).to_f64(), x.to_f64() + y.to_f64());
        prop_assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
    }

    #[test]
    fn reversing_both_curves_keeps_the_linking(p in -9i64..=9, q in 1i64..=5) {
        prop_assume!(p != 0 || q == 1);
        let ty = t(p, q);
        let plus = lk_equator_geodesic(ty, EquatorOrientation::Plus);
        prop_assert_eq!(lk_equator_geodesic(ty.reversed(), EquatorOrientation::Minus), plus);
        prop_assert_eq!(plus.is_integer(), p != 0 && p % 2 == 0);
    }

    #[test]
    fn density_is_symmetric_in_its_levels(c1 in -0.99f64..0.99, c2 in -0.99f64..0.99) {
        prop_assume!(c1.abs() > 1e-3 && c2.abs() > 1e-3);
        let s = ellipsoid(1.8);
        let m = map(&s);
        let a = linking_density(&m, c1, c2).unwrap();
        let b = linking_density(&m, c2, c1).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.is_finite());
    }
}
