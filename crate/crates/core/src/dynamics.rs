//! Velocity induced by a patch system and the contour dynamics right-hand
//! side.
//!
//! The velocity is the boundary form of the periodic Biot-Savart law,
//!
//! ```text
//! u(x) = -(ω₀/2π) Σ_j ∫_0^{2π} ln ρ(x - γ_j(α)) ∂_α γ_j(α) dα,
//! ```
//!
//! and the contour dynamics equation evaluates the same integral on the
//! boundary itself. On a contour's own nodes the logarithm is split as
//! `ln ρ(γ(α_i) - γ(α')) = S(α_i, α') + ½ ln(4 sin²((α_i - α')/2))`, with the
//! smooth remainder's diagonal value `S(α_i, α_i) = ln(π |γ'(α_i)|)`.

use std::collections::HashMap;
use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{
    boundary_distance, column_crossings, gamma_star, lifted_distance, point_in_region, Contour,
    PatchSystem, StripPoint,
};
use crate::kernels::{grad_k_inf, log_rho, GRAD_OFFDIAG_CIRCLE_MEAN};
use crate::linalg::{Mat2, Vec2};
use crate::quadrature::{log_kernel_weights, punctured_log_correction, LogKernelWeights};

/// `|γ|_*` below this logs a warning; below a tenth of it evaluation stops.
pub const GAMMA_STAR_WARN: f64 = 1e-2;
/// Cross-contour strip distance below this logs a warning; below a tenth of
/// it evaluation stops.
pub const CROSS_DISTANCE_WARN: f64 = 1e-3;
/// Probes closer to a node than this multiple of the local node spacing are
/// rejected by the off-boundary evaluators.
pub const EVAL_SPACING_FACTOR: f64 = 2.0;

/// Quadrature used for a contour's interaction with itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    Spectral,
    /// Punctured trapezoid with a local correction at the singular node;
    /// kept for cross-checking the spectral rule.
    Punctured,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CdeOptions {
    pub quadrature: Quadrature,
    pub execution: Execution,
}

/// Node velocities, one vector per contour aligned with its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CdeRhs {
    pub velocities: Vec<Vec<Vec2>>,
}

impl CdeRhs {
    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

struct PreparedContour<'a> {
    contour: &'a Contour,
    tangents: Vec<Vec2>,
    step: f64,
}

fn prepare(system: &PatchSystem) -> Vec<PreparedContour<'_>> {
    system
        .contours()
        .iter()
        .map(|c| PreparedContour { contour: c, tangents: c.tangents(), step: c.step() })
        .collect()
}

/// `∫ ln ρ(x - γ(α)) γ'(α) dα` by the plain periodic trapezoid rule.
#[inline]
fn log_rho_integral(x: Vec2, pc: &PreparedContour<'_>) -> Vec2 {
    let mut acc = Vec2::ZERO;
    for (p, t) in pc.contour.nodes().iter().zip(&pc.tangents) {
        acc += *t * log_rho(x - *p);
    }
    acc * pc.step
}

fn check_clearance(system: &PatchSystem, x: Vec2) -> Result<()> {
    for (k, c) in system.contours().iter().enumerate() {
        for (j, p) in c.nodes().iter().enumerate() {
            let threshold = EVAL_SPACING_FACTOR * c.local_spacing(j);
            if lifted_distance(x, *p) < threshold {
                return Err(Error::NearBoundary { x1: x.x, x2: x.y, contour: k, threshold });
            }
        }
    }
    Ok(())
}

/// Velocity field of a patch system, with the contour tangents computed once
/// for repeated evaluation.
pub struct VelocityField<'a> {
    system: &'a PatchSystem,
    prepared: Vec<PreparedContour<'a>>,
}

impl<'a> VelocityField<'a> {
    pub fn new(system: &'a PatchSystem) -> Self {
        VelocityField { system, prepared: prepare(system) }
    }

    /// Velocity at a point off the boundary.
    pub fn at(&self, x: StripPoint) -> Result<Vec2> {
        let x = x.to_vec();
        check_clearance(self.system, x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: Vec2) -> Vec2 {
        let omega0 = self.system.omega0();
        if omega0 == 0.0 {
            return Vec2::ZERO;
        }
        let mut acc = Vec2::ZERO;
        for pc in &self.prepared {
            acc += log_rho_integral(x, pc);
        }
        acc * (-omega0 / (2.0 * PI))
    }

    /// Evaluates many probes; each result is independent of the others.
    pub fn at_many(&self, points: &[StripPoint], execution: Execution) -> Vec<Result<Vec2>> {
        execution.map(points.len(), |i| self.at(points[i]))
    }
}

/// Velocity at `x`, which must stay clear of every contour.
pub fn velocity(system: &PatchSystem, x: StripPoint) -> Result<Vec2> {
    VelocityField::new(system).at(x)
}

/// Checks contour regularity and separation; warns, or fails below a tenth of
/// the warning thresholds.
pub fn check_proximity(system: &PatchSystem) -> Result<()> {
    for (k, c) in system.contours().iter().enumerate() {
        let g = gamma_star(c);
        if g < 0.1 * GAMMA_STAR_WARN {
            return Err(Error::ContourProximity(format!(
                "contour {k} has |γ|_* = {g:e}, below {:e}",
                0.1 * GAMMA_STAR_WARN
            )));
        }
        if g < GAMMA_STAR_WARN {
            warn!("contour {k} is nearly self-touching: |γ|_* = {g:e}");
        }
    }
    if let Some((a, b, d)) = system.closest_contour_pair() {
        if d < 0.1 * CROSS_DISTANCE_WARN {
            return Err(Error::ContourProximity(format!(
                "contours {a} and {b} are {d:e} apart, below {:e}",
                0.1 * CROSS_DISTANCE_WARN
            )));
        }
        if d < CROSS_DISTANCE_WARN {
            warn!("contours {a} and {b} are close: distance {d:e}");
        }
    }
    Ok(())
}

/// Right-hand side of the contour dynamics equation with default options.
pub fn cde_rhs(system: &PatchSystem) -> Result<CdeRhs> {
    cde_rhs_with(system, CdeOptions::default())
}

pub fn cde_rhs_with(system: &PatchSystem, options: CdeOptions) -> Result<CdeRhs> {
    check_proximity(system)?;
    Ok(cde_rhs_unchecked(system, options))
}

/// Half the log kernel, `½ ln(4 sin²(πm/N))` for `m = 0..N` (entry 0 unused).
fn half_log_sin_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n];
    for (m, v) in t.iter_mut().enumerate().skip(1) {
        *v = (2.0 * (PI * m as f64 / n as f64).sin()).abs().ln();
    }
    t
}

struct SelfTables {
    weights: LogKernelWeights,
    half_log_sin: Vec<f64>,
}

pub(crate) fn cde_rhs_unchecked(system: &PatchSystem, options: CdeOptions) -> CdeRhs {
    let omega0 = system.omega0();
    if omega0 == 0.0 {
        return CdeRhs {
            velocities: system.contours().iter().map(|c| vec![Vec2::ZERO; c.len()]).collect(),
        };
    }
    let prepared = prepare(system);

    let mut tables: HashMap<usize, SelfTables> = HashMap::new();
    if options.quadrature == Quadrature::Spectral {
        for c in system.contours() {
            tables.entry(c.len()).or_insert_with(|| SelfTables {
                weights: log_kernel_weights(c.len()).expect("contours hold an even node count >= 8"),
                half_log_sin: half_log_sin_table(c.len()),
            });
        }
    }

    // flat (contour, node) index so the parallel map covers every target
    let targets: Vec<(usize, usize)> = system
        .contours()
        .iter()
        .enumerate()
        .flat_map(|(k, c)| (0..c.len()).map(move |i| (k, i)))
        .collect();

    let scale = -omega0 / (2.0 * PI);
    let flat = options.execution.map(targets.len(), |t| {
        let (k, i) = targets[t];
        let x = prepared[k].contour.nodes()[i];
        let mut acc = Vec2::ZERO;
        for (j, pc) in prepared.iter().enumerate() {
            acc += if j == k {
                match options.quadrature {
                    Quadrature::Spectral => self_term_spectral(pc, i, &tables[&pc.contour.len()]),
                    Quadrature::Punctured => self_term_punctured(pc, i),
                }
            } else {
                log_rho_integral(x, pc)
            };
        }
        acc * scale
    });

    let mut it = flat.into_iter();
    let velocities = system
        .contours()
        .iter()
        .map(|c| it.by_ref().take(c.len()).collect())
        .collect();
    CdeRhs { velocities }
}

fn diagonal_log(tangent: Vec2) -> f64 {
    (PI * tangent.norm()).ln()
}

/// Self interaction at node `i`: trapezoid of the smooth remainder plus the
/// weighted log-kernel sum. Equivalent to
/// [`crate::quadrature::integrate_with_log_singularity`] with the samples
/// formed on the fly.
fn self_term_spectral(pc: &PreparedContour<'_>, i: usize, tables: &SelfTables) -> Vec2 {
    let nodes = pc.contour.nodes();
    let n = nodes.len();
    let xi = nodes[i];
    let mut smooth = Vec2::ZERO;
    let mut singular = Vec2::ZERO;
    for l in 0..n {
        let t = pc.tangents[l];
        let s = if l == i {
            diagonal_log(t)
        } else {
            // lifted difference; ρ is 1-periodic in x1 so the lift does not matter
            log_rho(xi - nodes[l]) - tables.half_log_sin[(i + n - l) % n]
        };
        smooth += t * s;
        singular += t * tables.weights.get(i, l);
    }
    smooth * pc.step + singular * 0.5
}

fn self_term_punctured(pc: &PreparedContour<'_>, i: usize) -> Vec2 {
    let nodes = pc.contour.nodes();
    let xi = nodes[i];
    let mut acc = Vec2::ZERO;
    for (l, (p, t)) in nodes.iter().zip(&pc.tangents).enumerate() {
        if l != i {
            acc += *t * log_rho(xi - *p);
        }
    }
    let ti = pc.tangents[i];
    let h = pc.step;
    acc * h + ti * (punctured_log_correction(h) + h * diagonal_log(ti))
}

/// Side length of the cells used by [`velocity_gradient`]: `min(0.005, r/20)`
/// where `r` is the smallest half-extent of a closed (winding 0) contour,
/// adjusted so that a whole number of cells spans one period.
pub fn gradient_cell_size(system: &PatchSystem) -> f64 {
    let feature = system
        .contours()
        .iter()
        .filter(|c| c.winding() == 0)
        .map(|c| {
            let (mut lo, mut hi) = (c.nodes()[0], c.nodes()[0]);
            for p in c.nodes() {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            0.5 * (hi.x - lo.x).min(hi.y - lo.y)
        })
        .fold(f64::INFINITY, f64::min);
    let target = 0.005_f64.min(feature / 20.0);
    let mut cells = (1.0 / target).ceil() as usize;
    cells += cells % 2;
    1.0 / cells as f64
}

/// Cells with `i² + j² <= PV_RADIUS_CELLS²` form the principal-value
/// exclusion disk of radius `4 h`.
const PV_RADIUS_CELLS: i64 = 4;

/// Inside intervals `(lo, hi)` of a column given its sorted crossings.
fn inside_intervals(crossings: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    // counting from the top: above the last crossing is outside
    crossings.rchunks_exact(2).map(|pair| (pair[0], pair[1]))
}

/// Velocity gradient `∇u(x)`, rows are components and columns partials.
///
/// The jump term `ω(x)/2 [[0,-1],[1,0]]` is added to a principal-value
/// integral of `∇K∞` over the patch, computed by the midpoint rule on a grid
/// of square cells centred on `x`. Along each grid column the patch
/// occupies exact intervals between boundary crossings, so partially covered
/// cells are weighted by their covered length. Inside the exclusion disk
/// only `ω(y) - ω(x)` is integrated; the disk's principal value is
/// `ω(x)` times its area times the circle mean of the off-diagonal entries.
pub fn velocity_gradient(system: &PatchSystem, x: StripPoint) -> Result<Mat2> {
    velocity_gradient_with(system, x, Execution::Sequential)
}

pub fn velocity_gradient_with(
    system: &PatchSystem,
    x: StripPoint,
    execution: Execution,
) -> Result<Mat2> {
    let xv = x.to_vec();
    check_clearance(system, xv)?;
    let omega0 = system.omega0();
    if omega0 == 0.0 {
        return Ok(Mat2::ZERO);
    }
    let inside = point_in_region(system, x)?;
    let omega_x = if inside { omega0 } else { 0.0 };
    let Some((ylo, yhi)) = system.x2_range() else {
        return Ok(Mat2::ZERO);
    };

    let h = gradient_cell_size(system);
    let half_cols = (0.5 / h).round() as i64;
    let r2_cells = PV_RADIUS_CELLS * PV_RADIUS_CELLS;

    let columns = execution.try_map((2 * half_cols) as usize, |c| -> Result<Mat2> {
        let i = c as i64 - half_cols;
        let col_x = xv.x + i as f64 * h;
        let crossings = column_crossings(system, col_x);
        let mut acc = Mat2::ZERO;

        // covered-length contributions from the patch
        for (a, b) in inside_intervals(&crossings) {
            let (a, b) = (a.max(ylo - h), b.min(yhi + h));
            let jlo = ((a - xv.y) / h - 0.5).floor() as i64;
            let jhi = ((b - xv.y) / h + 0.5).ceil() as i64;
            for j in jlo..=jhi {
                let cell_lo = xv.y + (j as f64 - 0.5) * h;
                let cell_hi = cell_lo + h;
                let lo = a.max(cell_lo);
                let hi = b.min(cell_hi);
                if hi <= lo {
                    continue;
                }
                if i == 0 && j == 0 {
                    // the probe's own cell is fully inside; its PV is in the disk term
                    continue;
                }
                let y = Vec2::new(col_x, 0.5 * (lo + hi));
                acc += grad_k_inf(xv - y)? * (omega0 * (hi - lo) * h);
            }
        }

        // inside the exclusion disk integrate ω(y) - ω(x) only
        if omega_x != 0.0 && i * i <= r2_cells {
            let reach = ((r2_cells - i * i) as f64).sqrt() as i64;
            for j in -reach..=reach {
                if i == 0 && j == 0 {
                    continue;
                }
                let y = Vec2::new(col_x, xv.y + j as f64 * h);
                acc += grad_k_inf(xv - y)? * (-omega_x * h * h);
            }
        }
        Ok(acc)
    })?;

    let pv = columns.into_iter().fold(Mat2::ZERO, |a, b| a + b);
    let disk_cells = (-PV_RADIUS_CELLS..=PV_RADIUS_CELLS)
        .flat_map(|i| (-PV_RADIUS_CELLS..=PV_RADIUS_CELLS).map(move |j| i * i + j * j))
        .filter(|&r2| r2 <= r2_cells)
        .count() as f64;
    let off = omega_x * disk_cells * h * h * GRAD_OFFDIAG_CIRCLE_MEAN;
    let disk = Mat2::new(0.0, off, off, 0.0);

    Ok(Mat2::ROTATION * (0.5 * omega_x) + pv + disk)
}

/// Horizontal means of the velocity far from the vortical region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFlow {
    /// Mean of `u₂` along `x₂ = probe`.
    pub m2: f64,
    /// Mean of `u₁` along `x₂ = probe`.
    pub m1_at: f64,
    /// `m₁(probe) + m₁(-probe)`.
    pub m1_sum: f64,
}

pub const MEAN_FLOW_SAMPLES: usize = 64;

pub fn mean_flow_diagnostics(system: &PatchSystem, x2_probe: f64) -> Result<MeanFlow> {
    let extent = system.x2_extent();
    if !x2_probe.is_finite() || x2_probe.abs() < extent + 0.5 {
        return Err(Error::invalid(format!(
            "mean-flow probe height {x2_probe} must clear the vortical region (|x2| <= {extent}) by 0.5"
        )));
    }
    if system.omega0() == 0.0 {
        return Ok(MeanFlow { m2: 0.0, m1_at: 0.0, m1_sum: 0.0 });
    }
    let field = VelocityField::new(system);
    let n = MEAN_FLOW_SAMPLES;
    let mean_at = |y: f64| -> Vec2 {
        let mut acc = Vec2::ZERO;
        for i in 0..n {
            let x = Vec2::new(-0.5 + i as f64 / n as f64, y);
            acc += field.eval_unchecked(x);
        }
        acc * (1.0 / n as f64)
    };
    let up = mean_at(x2_probe);
    let down = mean_at(-x2_probe);
    Ok(MeanFlow { m2: up.y, m1_at: up.x, m1_sum: up.x + down.x })
}

/// Distance from `x` to the nearest contour polyline, on the strip.
pub fn distance_to_boundary(system: &PatchSystem, x: StripPoint) -> f64 {
    boundary_distance(system, x.to_vec())
}
