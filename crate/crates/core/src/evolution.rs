//! Fixed-step Runge-Kutta integration of the contour dynamics equation,
//! arc-length node redistribution and per-frame diagnostics.

use std::f64::consts::PI;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::dynamics::{cde_rhs_unchecked, cde_rhs_with, mean_flow_diagnostics, CdeOptions, Quadrature};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{gamma_star, signed_area, vertical_moment, Contour, PatchSystem};
use crate::io::presets::{build_initial_system, PresetSpec};
use crate::linalg::Vec2;
use crate::spectral::{nodes, FourierSeries};

/// Mean-flow diagnostics are sampled this far beyond the vortical region.
pub const MEAN_FLOW_CLEARANCE: f64 = 1.0;

const REDISTRIBUTE_TOL: f64 = 1e-12;
const REDISTRIBUTE_MAX_ITER: usize = 50;
/// Oversampling of the speed `|γ'|` before its Fourier interpolation.
const SPEED_OVERSAMPLING: usize = 4;

fn default_dt() -> f64 {
    1e-3
}

fn default_save_every() -> usize {
    10
}

fn default_redistribute_every() -> usize {
    20
}

/// Run configuration. `n_nodes` applies to every preset contour; explicit
/// contours keep their own node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub omega0: f64,
    pub contours: Vec<PresetSpec>,
    pub n_nodes: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_save_every")]
    pub save_every: usize,
    /// Steps between redistributions; 0 disables them.
    #[serde(default = "default_redistribute_every")]
    pub redistribute_every: usize,
    #[serde(default)]
    pub quadrature: Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourRecord {
    pub winding: i32,
    pub nodes: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub area: f64,
    pub vertical_moment: f64,
    pub gamma_star: Vec<f64>,
    pub max_speed: f64,
    pub m2: f64,
    pub m1_sum: f64,
}

impl Diagnostics {
    /// Diagnostics of a system; `max_speed` uses the given self-interaction
    /// quadrature.
    pub fn compute(system: &PatchSystem, quadrature: Quadrature) -> Result<Self> {
        let options = CdeOptions { quadrature, execution: Execution::default() };
        let probe = system.x2_extent() + MEAN_FLOW_CLEARANCE;
        let mean = mean_flow_diagnostics(system, probe)?;
        Ok(Diagnostics {
            area: signed_area(system),
            vertical_moment: vertical_moment(system),
            gamma_star: system.contours().iter().map(gamma_star).collect(),
            max_speed: cde_rhs_unchecked(system, options).max_speed(),
            m2: mean.m2,
            m1_sum: mean.m1_sum,
        })
    }
}

/// One saved time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameRecord {
    pub t: f64,
    pub contours: Vec<ContourRecord>,
    pub diagnostics: Diagnostics,
}

impl FrameRecord {
    pub fn new(t: f64, system: &PatchSystem, quadrature: Quadrature) -> Result<Self> {
        Ok(FrameRecord {
            t,
            contours: system
                .contours()
                .iter()
                .map(|c| ContourRecord { winding: c.winding(), nodes: c.nodes().to_vec() })
                .collect(),
            diagnostics: Diagnostics::compute(system, quadrature)?,
        })
    }

    /// Rebuilds the patch system, validating every contour.
    pub fn system(&self, omega0: f64) -> Result<PatchSystem> {
        let contours = self
            .contours
            .iter()
            .map(|c| Contour::new(c.nodes.clone(), c.winding))
            .collect::<Result<Vec<_>>>()?;
        PatchSystem::new(contours, omega0)
    }
}

/// Why a run stopped before `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakdown {
    /// Index of the step that failed (1-based).
    pub step: usize,
    /// Time of the last good state.
    pub t: f64,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub frames: Vec<FrameRecord>,
    pub breakdown: Option<Breakdown>,
}

/// One classical Runge-Kutta step with default options.
pub fn rk4_step(system: &PatchSystem, dt: f64) -> Result<PatchSystem> {
    rk4_step_with(system, dt, CdeOptions::default())
}

fn advance(system: &PatchSystem, rates: &[Vec<Vec2>], dt: f64) -> PatchSystem {
    let contours = system
        .contours()
        .iter()
        .zip(rates)
        .map(|(c, v)| {
            let nodes = c.nodes().iter().zip(v).map(|(&p, &u)| p + u * dt).collect();
            Contour::from_parts(nodes, c.winding())
        })
        .collect();
    PatchSystem::from_parts(contours, system.omega0())
}

pub fn rk4_step_with(system: &PatchSystem, dt: f64, options: CdeOptions) -> Result<PatchSystem> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let stage = |s: usize, y: &PatchSystem| {
        cde_rhs_with(y, options)
            .map(|r| r.velocities)
            .map_err(|e| Error::Stage { stage: s, source: Box::new(e) })
    };
    let k1 = stage(1, system)?;
    let k2 = stage(2, &advance(system, &k1, 0.5 * dt))?;
    let k3 = stage(3, &advance(system, &k2, 0.5 * dt))?;
    let k4 = stage(4, &advance(system, &k3, dt))?;

    let combined: Vec<Vec<Vec2>> = (0..k1.len())
        .map(|c| {
            (0..k1[c].len())
                .map(|i| (k1[c][i] + (k2[c][i] + k3[c][i]) * 2.0 + k4[c][i]) * (1.0 / 6.0))
                .collect()
        })
        .collect();
    Ok(advance(system, &combined, dt))
}

/// Resamples a contour so its nodes are equispaced in arc length, keeping
/// node 0 fixed.
pub fn redistribute(contour: &Contour) -> Result<Contour> {
    let n = contour.len();
    let w = contour.winding() as f64;
    let slope = w / (2.0 * PI);
    let (px, py) = contour.periodic_part();
    let sx = FourierSeries::new(&px);
    let sy = FourierSeries::new(&py);

    let m = SPEED_OVERSAMPLING * n;
    let speed_samples: Vec<f64> = nodes(m)
        .map(|a| Vec2::new(sx.eval_derivative(a) + slope, sy.eval_derivative(a)).norm())
        .collect();
    let speed = FourierSeries::new(&speed_samples);
    let total = 2.0 * PI * speed.mean();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::RedistributionFailed { node: 0 });
    }

    let tol = REDISTRIBUTE_TOL * total.max(1.0);
    let mut out = Vec::with_capacity(n);
    out.push(contour.nodes()[0]);
    let mut alpha = 0.0_f64;
    for (j, guess) in nodes(n).enumerate().skip(1) {
        let target = total * j as f64 / n as f64;
        // the previous root is a lower bound; the uniform guess may do better
        alpha = alpha.max(guess.min(alpha + 2.0 * PI / n as f64));
        let mut converged = false;
        for _ in 0..REDISTRIBUTE_MAX_ITER {
            let residual = speed.integral_from_zero(alpha) - target;
            if residual.abs() <= tol {
                converged = true;
                break;
            }
            let s = speed.eval(alpha);
            if s.is_nan() || s <= 0.0 {
                break;
            }
            alpha = (alpha - residual / s).clamp(0.0, 2.0 * PI);
        }
        if !converged {
            return Err(Error::RedistributionFailed { node: j });
        }
        out.push(Vec2::new(sx.eval(alpha) + slope * alpha, sy.eval(alpha)));
    }
    Contour::new(out, contour.winding())
}

fn redistribute_all(system: &PatchSystem) -> Result<PatchSystem> {
    let contours = system.contours().iter().map(redistribute).collect::<Result<Vec<_>>>()?;
    Ok(PatchSystem::from_parts(contours, system.omega0()))
}

fn min_node_spacing(system: &PatchSystem) -> f64 {
    system
        .contours()
        .iter()
        .flat_map(|c| c.segments().map(|(a, b)| (b - a).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Number of steps and the time after step `k`.
fn schedule(config: &SimConfig) -> (usize, impl Fn(usize) -> f64) {
    let (dt, t_end) = (config.dt, config.t_end);
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    (steps, move |k: usize| if k >= steps { t_end } else { k as f64 * dt })
}

/// Runs a configuration and collects every frame.
pub fn run(config: &SimConfig) -> Result<RunOutcome> {
    let mut frames = Vec::new();
    let breakdown = run_streaming(config, Execution::default(), |f| {
        frames.push(f);
        Ok(())
    })?;
    Ok(RunOutcome { frames, breakdown })
}

/// Runs a configuration, handing each frame to `sink` in time order.
///
/// Returns `Ok(Some(..))` when the dynamics broke down; the frames already
/// emitted include the last good state. Errors from `sink` abort the run.
pub fn run_streaming<F>(config: &SimConfig, execution: Execution, mut sink: F) -> Result<Option<Breakdown>>
where
    F: FnMut(FrameRecord) -> Result<()>,
{
    let mut system = build_initial_system(config)?;
    let options = CdeOptions { quadrature: config.quadrature, execution };
    let (steps, time) = schedule(config);

    let initial = FrameRecord::new(0.0, &system, config.quadrature)?;
    let spacing = min_node_spacing(&system);
    if config.dt * initial.diagnostics.max_speed >= spacing {
        warn!(
            "dt * max speed = {:e} exceeds the minimum node spacing {spacing:e}",
            config.dt * initial.diagnostics.max_speed
        );
    }
    sink(initial)?;

    for k in 1..=steps {
        let (t0, t1) = (time(k - 1), time(k));
        system = match rk4_step_with(&system, t1 - t0, options) {
            Ok(next) => next,
            Err(error) => {
                warn!("breakdown in step {k} at t = {t0}: {error}");
                if (k - 1) % config.save_every != 0 {
                    sink(FrameRecord::new(t0, &system, config.quadrature)?)?;
                }
                return Ok(Some(Breakdown { step: k, t: t0, error }));
            }
        };
        if config.redistribute_every > 0 && k % config.redistribute_every == 0 {
            match redistribute_all(&system) {
                Ok(s) => system = s,
                Err(e) => warn!("skipping redistribution at step {k}: {e}"),
            }
        }
        if k % config.save_every == 0 || k == steps {
            sink(FrameRecord::new(t1, &system, config.quadrature)?)?;
        }
    }
    info!("finished {steps} steps at t = {}", time(steps));
    Ok(None)
}
