use std::f64::consts::TAU;

use divgreen::fam::{area_measure, density_measure};
use divgreen::fields::{divergence_of, dm_norm, fixture, FixtureParams, Integrability};
use divgreen::geometry::{density_at, perimeter, signed_distance, Point as P};
use divgreen::normal::{make_approximation, normal_measure_boundary, normal_measure_shell, ApproxKind, ApproxParams};
use divgreen::quad::{integrate_scalar, limit_extrapolate, region_area, RegionOptions};
use divgreen::trace::{lipschitz_bound, CompactSet, Lipschitz};
use divgreen::{Point, Region, ScaleSchedule};
use proptest::prelude::*;

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn primitive() -> impl Strategy<Value = Region> {
    prop_oneof![
        (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.5).prop_map(|(x, y, r)| Region::disk(p(x, y), r)),
        (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.5, 0.1f64..1.5)
            .prop_map(|(x, y, w, h)| Region::rect(p(x, y), p(x + w, y + h))),
        (0.0f64..TAU, -1.0f64..1.0).prop_map(|(t, o)| Region::half_plane(Point::polar(t), o)),
    ]
}

fn point() -> impl Strategy<Value = Point> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| p(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn contains_matches_signed_distance(r in primitive(), q in point()) {
        let d = signed_distance(&r, q).unwrap().value;
        prop_assume!(d.abs() > 1e-12);
        prop_assert_eq!(r.contains(q), d < 0.0);
    }

    #[test]
    fn contains_matches_signed_distance_f32(x in -1.0f32..1.0, y in -1.0f32..1.0, r in 0.1f32..1.5, qx in -2.0f32..2.0, qy in -2.0f32..2.0) {
        let d = divgreen::geometry::Region::disk(P::new(x, y), r);
        let q = P::new(qx, qy);
        let s = signed_distance(&d, q).unwrap().value;
        prop_assume!(s.abs() > 1e-5);
        prop_assert_eq!(d.contains(q), s < 0.0);
    }

    #[test]
    fn density_is_a_fraction(r in primitive(), q in point()) {
        let d = density_at(&r, q, 1e-3).unwrap();
        prop_assert!((0.0..=1.0).contains(&d), "{}", d);
    }

    #[test]
    fn boundary_length_is_additive_over_windows(r in primitive(), t in 0.0f64..TAU, o in -0.5f64..0.5) {
        let bounded = r.intersect(Region::rect(p(-2.0, -2.0), p(2.0, 2.0)));
        let n = Point::polar(t);
        let h = Region::half_plane(n, o);
        let hc = Region::half_plane(-n, -o);
        let whole = perimeter(&bounded, None).unwrap();
        let split = perimeter(&bounded, Some(&h)).unwrap() + perimeter(&bounded, Some(&hc)).unwrap();
        prop_assert!((whole - split).abs() < 1e-9 * (1.0 + whole), "{} {}", whole, split);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn integration_is_additive(r in primitive(), t in 0.0f64..TAU, o in -0.5f64..0.5) {
        let bounded = r.intersect(Region::disk(p(0.0, 0.0), 1.8));
        let n = Point::polar(t);
        let f = |q: Point| (q.x * 1.3).sin() + q.y * q.y;
        let opts = RegionOptions::default();
        let whole = integrate_scalar(f, &bounded, &opts).unwrap();
        let a = integrate_scalar(f, &bounded.clone().intersect(Region::half_plane(n, o)), &opts).unwrap();
        let b = integrate_scalar(f, &bounded.minus(Region::half_plane(n, o)), &opts).unwrap();
        let tol = 2.0 * (whole.error + a.error + b.error) + 1e-12;
        prop_assert!((whole.value[0] - a.value[0] - b.value[0]).abs() <= tol.max(1e-9));
    }

    #[test]
    fn area_error_bound_covers_refinement(x in -1.0f64..1.0, y in -1.0f64..1.0, r in 0.1f64..1.5) {
        let a = region_area(&Region::disk(p(x, y), r)).unwrap();
        prop_assert!((a - std::f64::consts::PI * r * r).abs() <= 1e-6 * a);
    }

    #[test]
    fn limits_are_deterministic(c in -5.0f64..5.0, a in 0.1f64..3.0) {
        let s = ScaleSchedule::default();
        let seq = |h: f64| c + a * h + (h * 7.0).sin() * h * h;
        let r1 = limit_extrapolate(seq, &s);
        let r2 = limit_extrapolate(seq, &s);
        prop_assert_eq!(r1.trace.len(), r2.trace.len());
        for (u, v) in r1.trace.iter().zip(&r2.trace) {
            prop_assert_eq!(u.0.to_bits(), v.0.to_bits());
            prop_assert_eq!(u.1.to_bits(), v.1.to_bits());
        }
        prop_assert_eq!(r1.value.to_bits(), r2.value.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn density_measure_is_finitely_additive(t in 0.0f64..TAU, s in 0.1f64..3.0) {
        let m = density_measure(Point::origin(), Region::unit_disk(), ScaleSchedule::default()).unwrap();
        let a = Region::sector(Point::origin(), 2.0, t, s);
        let b = Region::sector(Point::origin(), 2.0, t + s, 6.0 - s);
        let u = a.clone().union(b.clone());
        let (ea, eb, eu) = (m.eval(&a).unwrap(), m.eval(&b).unwrap(), m.eval(&u).unwrap());
        let tol = ea.error_bound + eb.error_bound + eu.error_bound + 1e-9;
        prop_assert!((eu.value - ea.value - eb.value).abs() <= tol.max(1e-6));
        prop_assert_eq!(m.eval(&Region::Empty).unwrap().value, 0.0);
    }

    #[test]
    fn area_measure_is_finitely_additive(x in 0.05f64..0.95, y in 0.05f64..0.95) {
        let m = area_measure(Region::unit_box());
        let a = Region::rect(p(0.0, 0.0), p(x, 1.0));
        let b = Region::rect(p(x, 0.0), p(1.0, y));
        let u = a.clone().union(b.clone());
        let s = m.eval(&a).unwrap().value + m.eval(&b).unwrap().value;
        prop_assert!((m.eval(&u).unwrap().value - s).abs() < 1e-9);
    }

    #[test]
    fn divergence_is_additive(t in 0.0f64..TAU, o in -0.3f64..0.3) {
        let f = fixture("polynomial", FixtureParams::default()).unwrap();
        let d = Region::unit_disk();
        let h = Region::half_plane(Point::polar(t), o);
        let one = |_: Point| 1.0;
        let a = divergence_of(&f, &d.clone().intersect(h.clone()), &one).unwrap().value;
        let b = divergence_of(&f, &d.clone().minus(h), &one).unwrap().value;
        let w = divergence_of(&f, &d, &one).unwrap().value;
        prop_assert!((a + b - w).abs() < 1e-8);
    }

    #[test]
    fn dm_norm_is_monotone(i in 0usize..4, r in 0.2f64..0.9, s in 0.01f64..0.5) {
        let names = ["constant", "linear", "polynomial", "vortex"];
        let f = fixture(names[i], FixtureParams::default()).unwrap();
        let small = dm_norm(&f, &Region::disk(p(0.1, 0.0), r), Integrability::L1).unwrap();
        let big = dm_norm(&f, &Region::disk(p(0.1, 0.0), r + s), Integrability::L1).unwrap();
        prop_assert!(small <= big + 1e-9);
    }

    #[test]
    fn lipschitz_bound_is_sound(a in -3.0f64..3.0, b in -3.0f64..3.0, r in 0.3f64..1.5) {
        let f = Lipschitz::new("s", move |q| (a * q.x).sin() + b * q.y * q.y, move |q| p(a * (a * q.x).cos(), 2.0 * b * q.y), a * a + 2.0 * b.abs());
        let e = lipschitz_bound(&f, &CompactSet::circle(Point::origin(), r), 0.2).unwrap();
        prop_assert!(e.accepted && e.quotient <= e.bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn closed_boundaries_carry_no_normal_mass(r in primitive(), k in 0usize..4) {
        let omega = r.intersect(Region::rect(p(-1.5, -1.5), p(1.5, 1.5)));
        let na = make_approximation(&omega, ApproxKind::ALL[k], ApproxParams::default()).unwrap();
        let all = Region::rect(p(-3.0, -3.0), p(3.0, 3.0));
        let v = normal_measure_boundary(&omega, &|q| na.chi(q), &all).unwrap();
        prop_assert!(v[0].abs() < 1e-6 && v[1].abs() < 1e-6, "{:?}", v);
    }

    #[test]
    fn shell_measure_lives_on_the_boundary(x in 0.3f64..0.7, y in 0.3f64..0.7, r in 0.01f64..0.15) {
        let na = make_approximation(&Region::unit_box(), ApproxKind::OuterPortmanteau, ApproxParams::default()).unwrap();
        let nu = normal_measure_shell(&na).unwrap();
        let v = nu.eval_vec(&Region::disk(p(x, y), r)).unwrap();
        prop_assert!(v[0].value.abs() < 1e-9 && v[1].value.abs() < 1e-9);
    }
}
