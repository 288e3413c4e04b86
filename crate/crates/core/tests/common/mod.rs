#![allow(dead_code)]

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortex_strip::io::PresetSpec;
use vortex_strip::{PatchSystem, Quadrature, SimConfig, Vec2};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn flat_layer(n: usize, h: f64, omega0: f64) -> PatchSystem {
    PatchSystem::new(PresetSpec::FlatLayer { h }.contours(n).unwrap(), omega0).unwrap()
}

pub fn circle(n: usize, center: Vec2, r: f64, omega0: f64) -> PatchSystem {
    let spec = PresetSpec::Circle { center, radius: r };
    PatchSystem::new(spec.contours(n).unwrap(), omega0).unwrap()
}

pub fn config(contours: Vec<PresetSpec>, n_nodes: usize, omega0: f64, dt: f64, t_end: f64) -> SimConfig {
    SimConfig {
        omega0,
        contours,
        n_nodes,
        dt,
        t_end,
        save_every: 10,
        redistribute_every: 20,
        quadrature: Quadrature::Spectral,
    }
}

/// Explicit presets reproducing the contours of a system.
pub fn explicit(system: &PatchSystem) -> Vec<PresetSpec> {
    system
        .contours()
        .iter()
        .map(|c| PresetSpec::Explicit { nodes: c.nodes().to_vec(), closure_offset: c.closure_offset() })
        .collect()
}

pub fn max_node_distance(a: &PatchSystem, b: &PatchSystem) -> f64 {
    a.contours()
        .iter()
        .zip(b.contours())
        .flat_map(|(p, q)| p.nodes().iter().zip(q.nodes()).map(|(u, v)| (*u - *v).norm()))
        .fold(0.0, f64::max)
}

/// Velocity of a circular patch from the planar law applied to each of
/// the images `|n| <= images`, summed symmetrically:
/// `u(x) = -(ω₀/2π) Σ_n ∮ ln|x - y - (n, 0)| dy`.
pub fn circle_image_velocity(x: Vec2, center: Vec2, r: f64, omega0: f64, n: usize, images: i64) -> Vec2 {
    let h = 2.0 * PI / n as f64;
    let mut acc = Vec2::ZERO;
    for k in -images..=images {
        let mut image = Vec2::ZERO;
        for j in 0..n {
            let a = j as f64 * h;
            let y = Vec2::new(center.x + r * a.cos() + k as f64, center.y + r * a.sin());
            let dy = Vec2::new(-r * a.sin(), r * a.cos());
            image += dy * (x - y).norm().ln();
        }
        acc += image * h;
    }
    acc * (-omega0 / (2.0 * PI))
}
