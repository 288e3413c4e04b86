//! JSON run configuration.

use crate::error::{Error, Result};
use crate::evolution::SimConfig;
use crate::io::presets::PresetSpec;

/// Parses and validates a configuration; defaults are filled in for the
/// optional keys.
pub fn parse_config(text: &[u8]) -> Result<SimConfig> {
    let text = std::str::from_utf8(text)
        .map_err(|e| Error::config(".", format!("configuration is not UTF-8: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: SimConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().to_string())
    })?;
    validate_config(&config)?;
    Ok(config)
}

fn check(ok: bool, path: impl FnOnce() -> String, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(path(), message()))
    }
}

fn finite_point(v: crate::linalg::Vec2) -> bool {
    v.is_finite()
}

fn check_preset(i: usize, spec: &PresetSpec) -> Result<()> {
    let at = |field: &str| format!("contours[{i}].{field}");
    match spec {
        PresetSpec::Circle { center, radius } => {
            check(finite_point(*center), || at("center"), || "center must be finite".into())?;
            check(*radius > 0.0, || at("radius"), || format!("radius {radius} must be positive"))?;
            check(
                *radius < 0.5,
                || at("radius"),
                || format!("radius {radius} exceeds the strip half-width 0.5"),
            )
        }
        PresetSpec::Ellipse { center, semi_axes } => {
            check(finite_point(*center), || at("center"), || "center must be finite".into())?;
            check(
                semi_axes.x > 0.0 && semi_axes.y > 0.0 && semi_axes.is_finite(),
                || at("semi_axes"),
                || "semi-axes must be positive".into(),
            )?;
            check(
                semi_axes.x < 0.5,
                || at("semi_axes"),
                || format!("horizontal semi-axis {} exceeds the strip half-width 0.5", semi_axes.x),
            )
        }
        PresetSpec::FlatLayer { h } => {
            check(*h > 0.0 && h.is_finite(), || at("h"), || format!("half-height {h} must be positive"))
        }
        PresetSpec::PerturbedLayer { h, amplitude, mode } => {
            check(*h > 0.0 && h.is_finite(), || at("h"), || format!("half-height {h} must be positive"))?;
            check(
                amplitude.is_finite() && amplitude.abs() < *h,
                || at("amplitude"),
                || format!("amplitude {amplitude} must be smaller than the half-height {h}"),
            )?;
            check(*mode >= 1, || at("mode"), || "mode must be at least 1".into())
        }
        PresetSpec::Explicit { nodes, .. } => check(
            nodes.len() >= 8 && nodes.len() % 2 == 0,
            || at("nodes"),
            || format!("{} nodes given; need an even count of at least 8", nodes.len()),
        ),
    }
}

/// Checks value constraints that the JSON schema cannot express.
pub fn validate_config(config: &SimConfig) -> Result<()> {
    let c = config;
    check(c.omega0.is_finite(), || "omega0".into(), || "omega0 must be finite".into())?;
    check(!c.contours.is_empty(), || "contours".into(), || "at least one contour is required".into())?;
    check(
        c.n_nodes >= 8 && c.n_nodes % 2 == 0,
        || "n_nodes".into(),
        || format!("n_nodes = {} must be even and at least 8", c.n_nodes),
    )?;
    check(c.dt > 0.0 && c.dt.is_finite(), || "dt".into(), || format!("dt = {} must be positive", c.dt))?;
    check(
        c.t_end >= 0.0 && c.t_end.is_finite(),
        || "t_end".into(),
        || format!("t_end = {} must be non-negative", c.t_end),
    )?;
    check(c.save_every >= 1, || "save_every".into(), || "save_every must be at least 1".into())?;
    for (i, spec) in c.contours.iter().enumerate() {
        check_preset(i, spec)?;
    }
    Ok(())
}
