//! Initial contours built from named presets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolution::SimConfig;
use crate::geometry::{validate_contour, Contour, PatchSystem};
use crate::linalg::Vec2;
use crate::spectral::nodes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetSpec {
    /// Counterclockwise circle.
    Circle { center: Vec2, radius: f64 },
    /// Counterclockwise axis-aligned ellipse.
    Ellipse { center: Vec2, semi_axes: Vec2 },
    /// The band `|x2| < h`, bounded by two wrapping lines.
    FlatLayer { h: f64 },
    /// A flat layer with `amplitude * sin(mode * α)` added to both lines.
    PerturbedLayer { h: f64, amplitude: f64, mode: u32 },
    /// Nodes in lifted coordinates with the closure shift `γ_N - γ_0`.
    Explicit {
        nodes: Vec<Vec2>,
        #[serde(default)]
        closure_offset: Vec2,
    },
}

fn ellipse(n: usize, center: Vec2, a: f64, b: f64) -> Result<Contour> {
    let nodes = nodes(n).map(|t| center + Vec2::new(a * t.cos(), b * t.sin())).collect();
    Contour::new(nodes, 0)
}

fn layer(n: usize, h: f64, amplitude: f64, mode: u32) -> Result<[Contour; 2]> {
    let bump = |a: f64| amplitude * (mode as f64 * a).sin();
    let bottom = nodes(n).map(|a| Vec2::new(a / (2.0 * PI) - 0.5, -h + bump(a))).collect();
    let top = nodes(n).map(|a| Vec2::new(0.5 - a / (2.0 * PI), h + bump(a))).collect();
    Ok([Contour::new(bottom, 1)?, Contour::new(top, -1)?])
}

impl PresetSpec {
    /// Contours of this preset with `n` nodes each (explicit contours keep
    /// their own count).
    pub fn contours(&self, n: usize) -> Result<Vec<Contour>> {
        Ok(match self {
            PresetSpec::Circle { center, radius } => vec![ellipse(n, *center, *radius, *radius)?],
            PresetSpec::Ellipse { center, semi_axes } => {
                vec![ellipse(n, *center, semi_axes.x, semi_axes.y)?]
            }
            PresetSpec::FlatLayer { h } => layer(n, *h, 0.0, 0)?.to_vec(),
            PresetSpec::PerturbedLayer { h, amplitude, mode } => {
                layer(n, *h, *amplitude, *mode)?.to_vec()
            }
            PresetSpec::Explicit { nodes, closure_offset } => {
                vec![validate_contour(nodes.clone(), *closure_offset)?]
            }
        })
    }
}

/// The patch system described by a configuration.
pub fn build_initial_system(config: &SimConfig) -> Result<PatchSystem> {
    crate::io::config::validate_config(config)?;
    let mut contours = Vec::new();
    for spec in &config.contours {
        contours.extend(spec.contours(config.n_nodes)?);
    }
    PatchSystem::new(contours, config.omega0)
}
