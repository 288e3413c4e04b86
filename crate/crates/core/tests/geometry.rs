mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;
use vortex_strip::spectral::nodes;
use vortex_strip::{
    point_in_region, signed_area, strip_distance, vertical_moment, wrap_x1, Contour, Error, PatchSystem, StripPoint,
    Vec2,
};

use common::*;

fn ellipse(n: usize, c: Vec2, a: f64, b: f64, tilt: f64) -> Contour {
    let (s, co) = tilt.sin_cos();
    let nodes = nodes(n)
        .map(|t| {
            let p = Vec2::new(a * t.cos(), b * t.sin());
            c + Vec2::new(co * p.x - s * p.y, s * p.x + co * p.y)
        })
        .collect();
    Contour::new(nodes, 0).unwrap()
}

proptest! {
    #[test]
    fn wrap_is_idempotent(t in -1e6..1e6f64) {
        let w = wrap_x1(t).unwrap();
        prop_assert!((-0.5..0.5).contains(&w));
        prop_assert_eq!(wrap_x1(w).unwrap(), w);
    }

    #[test]
    fn area_is_translation_invariant(s in -50.0..50.0f64, a in 0.05..0.3f64, b in 0.05..0.3f64, tilt in 0.0..PI) {
        let c = ellipse(64, Vec2::new(0.1, -0.2), a, b, tilt);
        let base = signed_area(&PatchSystem::new(vec![c.clone()], 1.0).unwrap());
        let moved = signed_area(&PatchSystem::new(vec![c.translated(Vec2::new(s, 0.0))], 1.0).unwrap());
        prop_assert!((base - moved).abs() <= 1e-13 * base);
        prop_assert!((base - PI * a * b).abs() <= 1e-12);
    }

    #[test]
    fn membership_ignores_unit_shifts(x1 in -0.5..0.5f64, x2 in -0.6..0.6f64, k in -3i32..3) {
        let system = PatchSystem::new(vec![ellipse(64, Vec2::new(0.35, 0.1), 0.3, 0.12, 0.4)], 1.0).unwrap();
        let p = StripPoint::new(x1, x2).unwrap();
        let Ok(inside) = point_in_region(&system, p) else { return Ok(()) };
        let shifted = StripPoint::new(x1 + k as f64, x2).unwrap();
        prop_assert_eq!(point_in_region(&system, shifted).unwrap(), inside);
        let moved = system.translated(Vec2::new(k as f64, 0.0));
        prop_assert_eq!(point_in_region(&moved, p).unwrap(), inside);
    }
}

#[test]
fn strip_distance_triangle_inequality() {
    let mut rng = rng(11);
    let mut point = || StripPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)).unwrap();
    for _ in 0..10_000 {
        let (p, q, r) = (point(), point(), point());
        assert!(strip_distance(p, r) <= strip_distance(p, q) + strip_distance(q, r) + 1e-12);
        assert_eq!(strip_distance(p, q), strip_distance(q, p));
    }
}

#[test]
fn flat_layer_area_for_every_resolution() {
    for n in (8..=128).step_by(2) {
        for h in [0.05, 0.25, 0.7] {
            let s = flat_layer(n, h, 1.0);
            assert!((signed_area(&s) - 2.0 * h).abs() <= 1e-14, "n = {n}, h = {h}");
            assert!(vertical_moment(&s).abs() <= 1e-14);
        }
    }
}

#[test]
fn elliptical_membership_matches_the_implicit_equation() {
    let (a, b) = (0.3, 0.12);
    let system = PatchSystem::new(vec![ellipse(512, Vec2::ZERO, a, b, 0.0)], 1.0).unwrap();
    let mut rng = rng(12);
    for _ in 0..2_000 {
        let (x, y): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2));
        let level = (x / a).powi(2) + (y / b).powi(2);
        if (level - 1.0).abs() < 1e-3 {
            continue;
        }
        let inside = point_in_region(&system, StripPoint::new(x, y).unwrap()).unwrap();
        assert_eq!(inside, level < 1.0, "({x}, {y})");
    }
}

#[test]
fn membership_for_a_patch_straddling_the_seam() {
    let system = PatchSystem::new(vec![ellipse(128, Vec2::new(0.48, 0.0), 0.1, 0.1, 0.0)], 1.0).unwrap();
    assert!(point_in_region(&system, StripPoint::new(-0.47, 0.0).unwrap()).unwrap());
    assert!(point_in_region(&system, StripPoint::new(0.45, 0.02).unwrap()).unwrap());
    assert!(!point_in_region(&system, StripPoint::new(0.0, 0.0).unwrap()).unwrap());
}

#[test]
fn clockwise_circle_is_rejected() {
    let cw: Vec<Vec2> = nodes(32).map(|t| Vec2::new(0.1 * t.cos(), -0.1 * t.sin())).collect();
    let c = Contour::new(cw, 0).unwrap();
    assert!(matches!(PatchSystem::new(vec![c], 1.0), Err(Error::InvalidSystem(_))));
}
