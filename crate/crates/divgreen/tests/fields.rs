use std::f64::consts::PI;

use divgreen::fields::*;
use divgreen::{Point, Region};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn fx(name: &str) -> DMField {
    fixture(name, FixtureParams::default()).unwrap()
}

#[test]
fn catalog() {
    for k in FieldKind::ALL {
        let f = fixture(k.name(), FixtureParams::default()).unwrap();
        assert_eq!(f.name(), k.name());
    }
    assert!(matches!(fixture("nope", FixtureParams::default()), Err(FieldError::UnknownFixture(_))));
    let ps = fx("point-source");
    assert_eq!(ps.divergence.atoms, vec![(Point::origin(), 1.0)]);
    let v = fx("vortex").eval(p(1.0, 0.0));
    assert!((v.x - 0.0).abs() < 1e-15 && (v.y + 1.0).abs() < 1e-15);
}

#[test]
fn jacobians_match_finite_differences() {
    let h = 1e-6;
    for k in FieldKind::ALL {
        let f = fixture(k.name(), FixtureParams::default()).unwrap();
        for q in [p(0.3, -0.7), p(-0.4, 0.9), p(1.3, 0.2)] {
            let j = f.jacobian(q);
            let dx = (f.eval(p(q.x + h, q.y)) - f.eval(p(q.x - h, q.y))) * (0.5 / h);
            let dy = (f.eval(p(q.x, q.y + h)) - f.eval(p(q.x, q.y - h))) * (0.5 / h);
            let fd = [[dx.x, dy.x], [dx.y, dy.y]];
            for a in 0..2 {
                for b in 0..2 {
                    assert!((j[a][b] - fd[a][b]).abs() < 1e-5 * (1.0 + fd[a][b].abs()), "{} {a}{b}", k.name());
                }
            }
            let div = f.pointwise_divergence(q);
            let declared = f.divergence.density_at(q);
            assert!((div - declared).abs() < 1e-9, "{}", k.name());
        }
    }
}

#[test]
fn weak_divergence() {
    let amb = Region::disk(Point::origin(), 2.0);
    let bumps = standard_bumps(&amb).unwrap();
    assert_eq!(bumps.len(), 9);
    let r = verify_weak_divergence(&fx("vortex"), &amb, &bumps, 1e-4).unwrap();
    assert!(r.pass, "{r:?}");

    // Circle flux of the point source is 1.
    let b = Bump { center: Point::origin(), radius: 0.7 };
    let (lhs, _) = integrate_against(&fx("point-source"), &|q| b.gradient(q), &b.support(), &Default::default()).unwrap();
    assert!((lhs + 1.0).abs() < 1e-3, "{lhs}");
    let r = verify_weak_divergence(&fx("point-source"), &amb, &bumps, 1e-3).unwrap();
    assert!(r.pass, "{r:?}");

    for name in ["constant", "linear", "polynomial"] {
        let r = verify_weak_divergence(&fx(name), &amb, &bumps, 1e-3).unwrap();
        assert!(r.pass, "{name} {r:?}");
    }
    let r = verify_weak_divergence(&fx("constant"), &amb, &bumps, 1e-3).unwrap();
    assert!(r.max_residual < 1e-9);
}

#[test]
fn weak_divergence_with_singular_line() {
    let amb = Region::rect(p(-1.0, -1.0), p(1.0, 1.0));
    let bumps = standard_bumps(&amb).unwrap();
    let r = verify_weak_divergence(&fx("diag-tangential"), &amb, &bumps, 1e-3).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn wrong_declaration_is_caught() {
    let amb = Region::disk(Point::origin(), 2.0);
    let bumps = standard_bumps(&amb).unwrap();
    let mut f = fx("point-source");
    f.divergence.atoms.clear();
    let r = verify_weak_divergence(&f, &amb, &bumps, 1e-3).unwrap();
    assert!(!r.pass);
}

#[test]
fn norms() {
    let n = dm_norm(&fx("constant"), &Region::unit_box(), Integrability::L1).unwrap();
    assert!((n - 1.0).abs() < 1e-9, "{n}");
    let n = dm_norm(&fx("constant"), &Region::unit_box(), Integrability::LInf).unwrap();
    assert!((n - 1.0).abs() < 1e-9, "{n}");
    let n = dm_norm(&fx("point-source"), &Region::unit_disk(), Integrability::L1).unwrap();
    assert!((n - 2.0).abs() < 1e-6, "{n}");
    // Radial oracle: integral of 1/r over 1/2 < r < 1 is pi.
    let ann = Region::unit_disk().minus(Region::disk(Point::origin(), 0.5));
    let n = dm_norm(&fx("vortex"), &ann, Integrability::L1).unwrap();
    assert!((n - PI).abs() < 1e-6, "{n}");
    assert!(matches!(
        dm_norm(&fx("vortex"), &Region::unit_disk(), Integrability::LInf),
        Err(FieldError::NotInClass { .. })
    ));
    // The singular line runs through two corners: 2 sqrt 2 * int_0^1 (1 - u) u^(-1/2) du = (8/3) sqrt 2.
    let n = dm_norm(&fx("diag-tangential"), &Region::unit_box(), Integrability::L1).unwrap();
    assert!((n - 8.0 / 3.0 * 2f64.sqrt()).abs() < 1e-6, "{n}");
    // Monotone under inclusion.
    let small = dm_norm(&fx("linear"), &Region::disk(Point::origin(), 0.5), Integrability::L1).unwrap();
    let big = dm_norm(&fx("linear"), &Region::unit_disk(), Integrability::L1).unwrap();
    assert!(small < big);
}

#[test]
fn divergence_of_weights_atoms_by_classifier() {
    let bx = Region::unit_box();
    let at = |c: Point| fixture("point-source", FixtureParams { center: c, ..Default::default() }).unwrap();
    let chi = density_classifier(&bx);
    let v = divergence_of(&at(p(0.5, 0.5)), &bx, &chi).unwrap();
    assert!((v.value - 1.0).abs() < 1e-12);
    let v = divergence_of(&at(p(0.5, 0.0)), &bx, &chi).unwrap();
    assert!((v.value - 0.5).abs() < 1e-6 && v.corner_atoms.is_empty());
    let v = divergence_of(&at(p(2.0, 0.5)), &bx, &chi).unwrap();
    assert_eq!(v.value, 0.0);
    let v = divergence_of(&at(p(0.0, 0.0)), &bx, &chi).unwrap();
    assert!((v.value - 0.25).abs() < 1e-6 && v.corner_atoms.len() == 1);
    // Density part: div = 2 over the unit disk.
    let v = divergence_of(&fx("linear"), &Region::unit_disk(), &|_| 1.0).unwrap();
    assert!((v.value - 2.0 * PI).abs() < 1e-8);
    // Additive over disjoint pieces.
    let l = Region::rect(p(0.0, 0.0), p(0.5, 1.0));
    let r = Region::rect(p(0.5, 0.0), p(1.0, 1.0));
    let f = fx("polynomial");
    let a = divergence_of(&f, &l, &|_| 1.0).unwrap().value + divergence_of(&f, &r, &|_| 1.0).unwrap().value;
    let b = divergence_of(&f, &bx, &|_| 1.0).unwrap().value;
    assert!((a - b).abs() < 1e-10 && (b - 2.0).abs() < 1e-10);
}
