use std::f64::consts::{FRAC_PI_4, PI};

use divgreen::fields::{fixture, FixtureParams};
use divgreen::quad::LimitStatus;
use divgreen::trace::*;
use divgreen::{Point, Region};
use proptest::prelude::*;

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn field(name: &str) -> divgreen::fields::DMField {
    fixture(name, FixtureParams::default()).unwrap()
}

// Independent closed forms of the strip sums, by direct antiderivatives.
fn vortex_oracle(k: f64) -> f64 {
    // k * int_0^{1/k} (1/2) ln(1 + 1/x^2) dx with antiderivative x ln(1 + 1/x^2)/2 + atan x.
    let x = 1.0 / k;
    k * (0.5 * x * (1.0 + 1.0 / (x * x)).ln() + x.atan())
}

fn point_source_oracle(k: f64) -> f64 {
    // k/pi * int_0^{1/k} atan(1/x) dx with antiderivative x atan(1/x) + ln(1 + x^2)/2.
    let x = 1.0 / k;
    k / PI * (x * (1.0 / x).atan() + 0.5 * (1.0 + x * x).ln())
}

#[test]
fn covers() {
    let c = ball_cover(&CompactSet::circle(Point::origin(), 1.0), FRAC_PI_4).unwrap();
    assert!(c.m <= 9, "{}", c.m);
    // Every point of the circle lies in some ball.
    for i in 0..2000 {
        let q = Point::polar(2.0 * PI * i as f64 / 2000.0);
        assert!(c.centers.iter().any(|z| z.dist(q) < c.delta));
    }
    let s = ball_cover(&CompactSet::segments(&[(p(0.0, 0.0), p(1.0, 0.0))]), 0.5).unwrap();
    assert!(s.m <= 3, "{}", s.m);
    let two = CompactSet::segments(&[(p(-1.0, -2.0), p(1.0, -2.0)), (p(-1.0, 2.0), p(1.0, 2.0))]);
    assert_eq!(ball_cover(&two, 0.5), Err(TraceError::NotPathConnected { components: 2 }));
    // Crossing segments are connected; a closed annulus is connected.
    let cross = CompactSet::segments(&[(p(-1.0, 0.0), p(1.0, 0.0)), (p(0.0, -1.0), p(0.0, 1.0))]);
    assert!(ball_cover(&cross, 0.3).is_ok());
    let ann = CompactSet::Region(Region::unit_disk().minus(Region::disk(Point::origin(), 0.5)));
    assert!(ball_cover(&ann, 0.2).is_ok());
    let ann_boundary = CompactSet::boundary_of(&Region::unit_disk().minus(Region::disk(Point::origin(), 0.5))).unwrap();
    assert!(matches!(ball_cover(&ann_boundary, 0.2), Err(TraceError::NotPathConnected { .. })));
    assert!(matches!(ball_cover(&ann, 0.0), Err(TraceError::BadRadius(_))));
}

#[test]
fn lipschitz_examples() {
    let circle = CompactSet::circle(Point::origin(), 1.0);
    let a = p(3.0, 4.0);
    let e = lipschitz_bound(&Lipschitz::linear(a, 0.0), &circle, 0.2).unwrap();
    assert!(e.quotient <= 5.0 + 1e-12 && e.quotient > 4.95, "{e:?}");
    assert!(e.accepted && e.c == 2.0 * (e.m as f64 + 2.0));

    // x^2 on the unit circle: sup |2x| over the 0.1-neighbourhood is 2.2.
    let sq = Lipschitz::new("square", |q| q.x * q.x, |q| p(2.0 * q.x, 0.0), 2.0);
    let e = lipschitz_bound(&sq, &circle, 0.1).unwrap();
    assert!(e.grad_sup >= 2.2 - 1e-3 && e.grad_sup <= 2.2 + 0.05, "{e:?}");
    assert!(e.accepted && e.quotient <= 2.0 * (e.m as f64 + 2.0) * 2.2);

    // Two patches: the step in y is locally constant near both, so the gradient vanishes on
    // the neighbourhood while the difference quotient does not.
    let two = CompactSet::segments(&[(p(-1.0, -2.0), p(1.0, -2.0)), (p(-1.0, 2.0), p(1.0, 2.0))]);
    let step = Lipschitz::new(
        "step",
        |q| ((q.y + 1.0) / 2.0).clamp(0.0, 1.0),
        |q| if q.y.abs() < 1.0 { p(0.0, 0.5) } else { p(0.0, 0.0) },
        0.0,
    );
    assert_eq!(gradient_sup(&step, &two, 0.5).unwrap(), 0.0);
    assert!(sampled_quotient(&step, &two, 400).unwrap() > 0.2);
    assert!(matches!(lipschitz_bound(&step, &two, 0.5), Err(TraceError::NotPathConnected { .. })));
}

#[test]
fn lipschitz_soundness_on_fixtures() {
    let sets = [
        CompactSet::circle(Point::origin(), 1.0),
        CompactSet::Region(Region::unit_disk().minus(Region::disk(Point::origin(), 0.5))),
    ];
    let mut runs = 0;
    for k in &sets {
        for f in smooth_fixtures() {
            let e = lipschitz_bound(&f, k, 0.3).unwrap();
            assert!(e.accepted && e.quotient <= e.bound, "{} {e:?}", f.name);
            runs += 1;
        }
    }
    assert_eq!(runs, 10);
}

#[test]
fn trace_functional() {
    let bx = Region::unit_box();
    // f = 1: the trace is div F of the open set.
    let at = |c: Point| fixture("point-source", FixtureParams { center: c, ..Default::default() }).unwrap();
    let t = silhavy_trace(&at(p(0.5, 0.5)), &bx, &Lipschitz::constant(1.0)).unwrap();
    assert!((t.value - 1.0).abs() < 1e-9 && t.within_bound, "{t:?}");
    let t = silhavy_trace(&field("polynomial"), &bx, &Lipschitz::constant(1.0)).unwrap();
    assert!((t.value - 2.0).abs() < 1e-9, "{t:?}");

    // Boundary-zero scalars see nothing of the vortex.
    let v = field("vortex");
    let ramp = Lipschitz::boundary_ramp(&bx, 0.25).unwrap();
    let t = silhavy_trace(&v, &bx, &ramp).unwrap();
    assert!(t.value.abs() < TRACE_TOL && t.within_bound, "{t:?}");
    let t = silhavy_trace(&v, &bx, &box_bubble()).unwrap();
    assert!(t.value.abs() < TRACE_TOL, "{t:?}");

    // Two extensions of the boundary data 1 + x + y^2.
    let g = Lipschitz::new("g", |q| 1.0 + q.x + q.y * q.y, |q| p(1.0, 2.0 * q.y), 2.0);
    let bump = Lipschitz::new("3 + x", |q| 3.0 + q.x, |_| p(1.0, 0.0), 0.0);
    let h = g.plus(&product(&box_bubble(), &bump, 10.0));
    for name in ["vortex", "point-source", "linear", "polynomial"] {
        let f = field(name);
        let a = silhavy_trace(&f, &bx, &g).unwrap();
        let b = silhavy_trace(&f, &bx, &h).unwrap();
        assert!((a.value - b.value).abs() < TRACE_TOL, "{name} {} {}", a.value, b.value);
        assert!(a.within_bound && b.within_bound);
    }

    // Classical oracle: for F = x and f = x on the box, N(f) = int_boundary f F.n = 3/2.
    let t = silhavy_trace(&field("linear"), &bx, &Lipschitz::linear(p(1.0, 0.0), 0.0)).unwrap();
    assert!((t.value - 1.5).abs() < 1e-9, "{t:?}");
}

#[test]
fn vortex_strip_sums_diverge() {
    let r = shell_gradient_limit(&field("vortex"), &Region::unit_box(), &Lipschitz::constant(1.0), &Ramp::axis(), &decade_schedule())
        .unwrap();
    assert_eq!(r.status, LimitStatus::Diverging);
    let mut last = f64::NEG_INFINITY;
    for (d, s) in &r.trace {
        let k = 1.0 / d;
        assert!(((s - vortex_oracle(k)) / vortex_oracle(k)).abs() < 1e-6, "{k} {s}");
        assert!(*s >= 0.5 * (k * k + 1.0).ln());
        assert!(*s > last);
        last = *s;
    }
    assert!((vortex_strip_sum(100.0) - vortex_oracle(100.0)).abs() < 1e-12);
}

#[test]
fn point_source_strip_sums_converge() {
    let omega = Region::rect(p(0.0, -1.0), p(1.0, 1.0));
    let r = shell_gradient_limit(&field("point-source"), &omega, &Lipschitz::constant(1.0), &Ramp::axis(), &decade_schedule())
        .unwrap();
    assert!(r.converged() && (r.value - 0.5).abs() < 1e-4, "{r:?}");
    for (d, s) in &r.trace {
        let k = 1.0 / d;
        assert!((s - point_source_oracle(k)).abs() < 1e-9, "{k} {s}");
        assert!((s - 0.5).abs() <= 1.0 / (2.0 * PI * k) + 1e-4);
    }
    assert!((point_source_strip_sum(10.0) - point_source_oracle(10.0)).abs() < 1e-12);
}

#[test]
fn bounded_field_limit_is_boundary_flux() {
    // F = x, f = x on the unit box: the boundary flux of f F is 3/2, the limit is its negative.
    let r = shell_gradient_limit(
        &field("linear"),
        &Region::unit_box(),
        &Lipschitz::linear(p(1.0, 0.0), 0.0),
        &Ramp::Boundary,
        &decade_schedule(),
    )
    .unwrap();
    assert!(r.converged() && (r.value + 1.5).abs() < 1e-3, "{r:?}");
    // Disk: F = x, f = 1 gives flux 2 pi.
    let r = shell_gradient_limit(&field("linear"), &Region::unit_disk(), &Lipschitz::constant(1.0), &Ramp::Boundary, &decade_schedule())
        .unwrap();
    assert!(r.converged() && (r.value + 2.0 * PI).abs() < 1e-3, "{r:?}");
}

#[test]
fn detector() {
    let sched = decade_schedule();
    let d = pure_part_detector(&field("vortex"), &Region::unit_box(), &sched);
    assert_eq!(d.class, PurePart::PureGradientPartRequired, "{d:?}");
    // Radial estimate near the corner: each decade adds about 2 ln 10.
    let t = &d.criterion.trace;
    let inc = t[t.len() - 1].1 - t[t.len() - 2].1;
    assert!((inc - 2.0 * 10f64.ln()).abs() < 0.05, "{inc}");
    let d = pure_part_detector(&field("point-source"), &Region::rect(p(0.0, -1.0), p(1.0, 1.0)), &sched);
    assert_eq!(d.class, PurePart::RadonRepresentable, "{d:?}");
    // The limit is the boundary integral of |F . n|: 1/2 + 1/8 + 1/8 + 1/4.
    assert!((d.criterion.value - 1.0).abs() < 1e-3);
    let d = pure_part_detector(&field("constant"), &Region::unit_box(), &sched);
    assert_eq!(d.class, PurePart::RadonRepresentable, "{d:?}");
    assert!((d.criterion.value - 2.0).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn boundary_zero_scalars_have_zero_trace(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, w in 0.5f64..3.0,
    ) {
        let q = Lipschitz::new(
            "q",
            move |z| a + b * z.x + c * (w * z.y).sin(),
            move |z| Point::new(b, c * w * (w * z.y).cos()),
            (c * w * w).abs(),
        );
        let f = product(&box_bubble(), &q, 10.0 * (1.0 + b.abs() + c.abs() * (1.0 + w) * (1.0 + w)));
        let t = silhavy_trace(&field("vortex"), &Region::unit_box(), &f).unwrap();
        prop_assert!(t.value.abs() <= TRACE_TOL, "{:?}", t);
        prop_assert!(t.within_bound);
    }

    #[test]
    fn trace_is_bounded_by_norms(i in 0usize..6, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let names = ["vortex", "point-source", "diag-tangential", "constant", "linear", "polynomial"];
        let omega = Region::disk(Point::new(0.2, 0.1), 0.7);
        let f = Lipschitz::new("s", move |z| (a * z.x).sin() + b * z.y, move |z| Point::new(a * (a * z.x).cos(), b), a * a);
        let t = silhavy_trace(&field(names[i]), &omega, &f).unwrap();
        prop_assert!(t.within_bound, "{} {:?}", names[i], t);
    }
}
