use std::f64::consts::PI;

use divgreen::geometry::{
    classify_point, neighborhood, perimeter, reduced_boundary, shell_area, signed_distance, ClassKind, Point, Region, Side,
};
use divgreen::quad::{region_area, ScaleSchedule};

fn p(x: f64, y: f64) -> Point<f64> {
    Point::new(x, y)
}

#[test]
fn membership_examples() {
    assert!(Region::<f64>::unit_disk().contains(p(0.0, 0.0)));
    assert!(!Region::<f64>::unit_box().contains(p(2.0, 0.0)));
    let r = Region::<f64>::unit_box().minus(Region::disk(p(0.0, 0.0), 0.5));
    assert!(!r.contains(p(0.1, 0.1)));
    assert!(r.contains(p(0.9, 0.9)));
}

#[test]
fn signed_distance_examples() {
    assert!((signed_distance(&Region::<f64>::unit_disk(), p(2.0, 0.0)).unwrap().value - 1.0).abs() < 1e-14);
    assert!((signed_distance(&Region::<f64>::unit_box(), p(0.5, 0.5)).unwrap().value + 0.5).abs() < 1e-14);
    let q = Region::<f64>::quarter_disk();
    let d = signed_distance(&q, p(-0.1, -0.1)).unwrap().value;
    // Oracle: dense sampling of the quarter-disk boundary.
    let mut best = f64::INFINITY;
    let n = 20000;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        for b in [p(0.5 * t, 0.0), p(0.0, 0.5 * t), p(0.5 * (t * PI / 2.0).cos(), 0.5 * (t * PI / 2.0).sin())] {
            best = best.min(b.dist(p(-0.1, -0.1)));
        }
    }
    assert!((d - best).abs() < 1e-9);
    assert!((d - 0.1 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn areas_by_quadrature() {
    assert!((region_area(&Region::<f64>::unit_box()).unwrap() - 1.0).abs() < 1e-12);
    assert!((region_area(&Region::<f64>::unit_disk()).unwrap() - PI).abs() < 1e-10);
    assert!((region_area(&Region::<f64>::quarter_disk()).unwrap() - PI / 16.0).abs() < 1e-10);
    let r = Region::<f64>::unit_box().minus(Region::disk(p(0.0, 0.0), 0.5));
    assert!((region_area(&r).unwrap() - (1.0 - PI / 16.0)).abs() < 1e-10);
}

#[test]
fn boundary_examples() {
    let c = reduced_boundary(&Region::<f64>::unit_disk(), None).unwrap();
    assert_eq!(c.pieces.len(), 1);
    assert!((c.length() - 2.0 * PI).abs() < 1e-12);
    let b = reduced_boundary(&Region::<f64>::unit_box(), None).unwrap();
    assert_eq!(b.pieces.len(), 4);
    assert_eq!(b.corners.len(), 4);
    assert!((b.length() - 4.0).abs() < 1e-12);
    let q = reduced_boundary(&Region::<f64>::quarter_disk(), None).unwrap();
    assert_eq!(q.pieces.len(), 3);
    assert!((q.length() - (1.0 + PI / 4.0)).abs() < 1e-12);
    let w = Region::half_plane(p(1.0, 0.0), 0.5);
    assert!((perimeter(&Region::<f64>::unit_box(), Some(&w)).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn neighbourhood_examples() {
    let n = neighborhood(&Region::<f64>::unit_disk(), 0.5, Side::Outer).unwrap();
    assert!((region_area(&n).unwrap() - PI * 2.25).abs() < 1e-9);
    let i = neighborhood(&Region::<f64>::unit_box(), 0.25, Side::Inner).unwrap();
    assert!((region_area(&i).unwrap() - 0.25).abs() < 1e-12);
    let q = neighborhood(&Region::<f64>::quarter_disk(), 0.1, Side::Outer).unwrap();
    let qa = region_area(&q).unwrap();
    // Steiner formula for a convex set: A + P delta + pi delta^2.
    let steiner = PI / 16.0 + (1.0 + PI / 4.0) * 0.1 + PI * 0.01;
    assert!((qa - steiner).abs() < 1e-8, "{qa} vs {steiner}");
    assert!((shell_area(&Region::<f64>::unit_disk(), 0.5, Side::Outer).unwrap() - 3.0 * PI).abs() < 1e-12);
    assert!((shell_area(&Region::<f64>::unit_box(), 0.1, Side::Inner).unwrap() - 3.2).abs() < 1e-12);
    assert!((shell_area(&Region::<f64>::unit_box(), 0.1, Side::Outer).unwrap() - (4.0 + 0.2 * PI)).abs() < 1e-9);
    let qi = neighborhood(&Region::<f64>::quarter_disk(), 0.05, Side::Inner).unwrap();
    assert!(qi.contains(p(0.2, 0.2)));
    assert!(!qi.contains(p(0.04, 0.2)));
    assert!(neighborhood(&Region::<f64>::unit_box(), 0.6, Side::Inner).is_err());
}

#[test]
fn classification_examples() {
    let s = ScaleSchedule::default();
    let b = Region::<f64>::unit_box();
    let c = classify_point(&b, p(0.5, 0.5), &s).unwrap();
    assert_eq!(c.kind, ClassKind::EssentialInterior);
    let e = classify_point(&b, p(0.0, 0.5), &s).unwrap();
    assert_eq!(e.kind, ClassKind::ReducedBoundary);
    assert!((e.density - 0.5).abs() < 1e-3);
    let n = e.normal.unwrap();
    assert!((n.x + 1.0).abs() < 1e-6 && n.y.abs() < 1e-6);
    let k = classify_point(&b, p(0.0, 0.0), &s).unwrap();
    assert_eq!(k.kind, ClassKind::Other);
    assert!((k.density - 0.25).abs() < 1e-3);
}
