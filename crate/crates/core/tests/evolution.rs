mod common;

use std::f64::consts::PI;

use vortex_strip::evolution::Diagnostics;
use vortex_strip::io::PresetSpec;
use vortex_strip::{redistribute, rk4_step, run, signed_area, Contour, Error, PatchSystem, Quadrature, Vec2};

use common::*;

#[test]
fn flat_layer_step_is_a_rigid_shear() {
    let (h, omega0, dt) = (0.25, 1.5, 0.01);
    let system = flat_layer(64, h, omega0);
    let next = rk4_step(&system, dt).unwrap();
    for (before, after) in system.contours().iter().zip(next.contours()) {
        assert_eq!(before.winding(), after.winding());
        // bottom line (winding +1) moves right, top line left
        let shift = omega0 * h * dt * before.winding() as f64;
        for (p, q) in before.nodes().iter().zip(after.nodes()) {
            assert!((q.y - p.y).abs() <= 1e-12);
            assert!((q.x - p.x - shift).abs() <= 1e-10);
        }
    }
    assert_eq!(next.omega0(), omega0);
}

#[test]
fn zero_vorticity_step_is_the_identity() {
    let system = circle(32, Vec2::new(0.1, 0.2), 0.1, 0.0);
    assert_eq!(rk4_step(&system, 0.1).unwrap(), system);
}

#[test]
fn circle_step_keeps_its_area() {
    let system = circle(128, Vec2::ZERO, 0.15, 2.0 * PI);
    let a0 = signed_area(&system);
    let a1 = signed_area(&rk4_step(&system, 1e-3).unwrap());
    assert!(((a1 - a0) / a0).abs() < 1e-10);
}

#[test]
fn stage_errors_are_annotated() {
    let r = 0.1;
    let gap = 5e-5;
    let mut contours = PresetSpec::Circle { center: Vec2::new(-r - gap / 2.0, 0.0), radius: r }.contours(64).unwrap();
    contours.extend(PresetSpec::Circle { center: Vec2::new(r + gap / 2.0, 0.0), radius: r }.contours(64).unwrap());
    let system = PatchSystem::new(contours, 1.0).unwrap();
    match rk4_step(&system, 1e-3) {
        Err(Error::Stage { stage: 1, source }) => assert!(matches!(*source, Error::ContourProximity(_))),
        other => panic!("{other:?}"),
    }
}

#[test]
fn redistribution_keeps_a_perturbed_line_on_its_curve() {
    let (h, a, k) = (0.25, 0.04, 3);
    let spec = PresetSpec::PerturbedLayer { h, amplitude: a, mode: k };
    let bottom = spec.contours(128).unwrap().remove(0);
    let out = redistribute(&bottom).unwrap();
    assert_eq!(out.len(), 128);
    assert_eq!(out.winding(), 1);
    for p in out.nodes() {
        let alpha = 2.0 * PI * (p.x + 0.5);
        let y = -h + a * (k as f64 * alpha).sin();
        assert!((p.y - y).abs() < 1e-10, "{p:?}");
    }
    // arc-length spacing is uniform
    let seg: Vec<f64> = out.segments().map(|(p, q)| (q - p).norm()).collect();
    let (lo, hi) = seg.iter().fold((f64::INFINITY, 0.0_f64), |(l, u), &s| (l.min(s), u.max(s)));
    assert!((hi - lo) / hi < 1e-3, "{lo} {hi}");
}

#[test]
fn redistribution_undoes_tangential_clustering_on_an_ellipse() {
    let (a, b) = (0.2, 0.1);
    let theta = |t: f64| t + 0.3 * (2.0 * t).sin() / 2.0;
    let nodes = vortex_strip::spectral::nodes(128).map(|t| Vec2::new(a * theta(t).cos(), b * theta(t).sin())).collect();
    let c = Contour::new(nodes, 0).unwrap();
    let out = redistribute(&c).unwrap();
    for p in out.nodes() {
        assert!(((p.x / a).powi(2) + (p.y / b).powi(2) - 1.0).abs() < 1e-10);
    }
    let again = redistribute(&out).unwrap();
    assert!(max_node_distance(
        &PatchSystem::new(vec![out], 1.0).unwrap(),
        &PatchSystem::new(vec![again], 1.0).unwrap()
    ) < 1e-10);
}

#[test]
fn zero_length_run_has_one_frame() {
    let cfg = config(vec![PresetSpec::FlatLayer { h: 0.25 }], 32, 1.0, 1e-2, 0.0);
    let out = run(&cfg).unwrap();
    assert_eq!(out.frames.len(), 1);
    assert!(out.breakdown.is_none());
    let f = &out.frames[0];
    assert_eq!(f.t, 0.0);
    let initial = vortex_strip::io::build_initial_system(&cfg).unwrap();
    assert_eq!(f.system(1.0).unwrap().contours(), initial.contours());
}

#[test]
fn frames_are_saved_on_schedule() {
    let mut cfg = config(vec![PresetSpec::FlatLayer { h: 0.25 }], 32, 1.0, 1e-2, 1.0);
    let out = run(&cfg).unwrap();
    let times: Vec<f64> = out.frames.iter().map(|f| f.t).collect();
    assert_eq!(times.len(), 11);
    assert_eq!(*times.last().unwrap(), 1.0);
    cfg.t_end = 0.105;
    let out = run(&cfg).unwrap();
    // steps at 0.1 and the shortened final step
    assert_eq!(out.frames.iter().map(|f| f.t).collect::<Vec<_>>(), vec![0.0, 0.1, 0.105]);
}

#[test]
fn flat_layer_stays_flat_with_exact_area() {
    let cfg = config(vec![PresetSpec::FlatLayer { h: 0.25 }], 128, 1.0, 1e-2, 1.0);
    let out = run(&cfg).unwrap();
    let a0 = out.frames[0].diagnostics.area;
    for f in &out.frames {
        assert!((f.diagnostics.area - a0).abs() < 1e-12);
        for c in &f.contours {
            let target = -0.25 * c.winding as f64;
            assert!(c.nodes.iter().all(|p| (p.y - target).abs() < 1e-9));
        }
    }
}

#[test]
fn stored_diagnostics_are_reproducible() {
    let spec = PresetSpec::PerturbedLayer { h: 0.25, amplitude: 0.02, mode: 2 };
    let mut cfg = config(vec![spec], 64, 2.0 * PI, 1e-2, 0.5);
    cfg.save_every = 5;
    cfg.redistribute_every = 7;
    let out = run(&cfg).unwrap();
    let a0 = out.frames[0].diagnostics.area;
    let m0 = out.frames[0].diagnostics.vertical_moment;
    for f in &out.frames {
        let d = Diagnostics::compute(&f.system(cfg.omega0).unwrap(), Quadrature::Spectral).unwrap();
        let stored = &f.diagnostics;
        for (x, y) in [
            (d.area, stored.area),
            (d.vertical_moment, stored.vertical_moment),
            (d.max_speed, stored.max_speed),
            (d.m2, stored.m2),
            (d.m1_sum, stored.m1_sum),
        ] {
            assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
        }
        assert!(stored.m2.abs() <= 1e-8 && stored.m1_sum.abs() <= 1e-8);
        assert!(((stored.area - a0) / a0).abs() <= 1e-6);
        assert!((stored.vertical_moment - m0).abs() <= 1e-6 * a0);
    }
}

#[test]
fn runs_are_deterministic() {
    let spec = PresetSpec::Ellipse { center: Vec2::ZERO, semi_axes: Vec2::new(0.2, 0.1) };
    let cfg = config(vec![spec], 64, 1.0, 1e-2, 0.2);
    assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
}

#[test]
fn breakdown_returns_the_partial_trajectory() {
    let r = 0.1;
    let gap = 5e-5;
    let specs = vec![
        PresetSpec::Circle { center: Vec2::new(-r - gap / 2.0, 0.0), radius: r },
        PresetSpec::Circle { center: Vec2::new(r + gap / 2.0, 0.0), radius: r },
    ];
    let out = run(&config(specs, 64, 1.0, 1e-2, 1.0)).unwrap();
    let b = out.breakdown.expect("breakdown expected");
    assert_eq!(b.step, 1);
    assert_eq!(b.t, 0.0);
    assert!(matches!(b.error.root(), Error::ContourProximity(_)));
    assert_eq!(out.frames.len(), 1);
}

#[test]
fn invalid_configs_are_errors() {
    let mut cfg = config(vec![PresetSpec::FlatLayer { h: 0.25 }], 30, 1.0, 1e-2, 1.0);
    cfg.n_nodes = 31;
    assert!(matches!(run(&cfg), Err(Error::Config { .. })));
    cfg.n_nodes = 32;
    cfg.dt = 0.0;
    assert!(matches!(run(&cfg), Err(Error::Config { .. })));
}
