//! Periodic Biot-Savart kernel on the strip and its relatives.
//!
//! With `ρ(x)² = sin²(πx₁) + sinh²(πx₂)` the Green's function is
//! `G = (2π)⁻¹ ln ρ` and `K∞ = ∇⊥G`. Denominators use the identity
//! `cosh(2πx₂) - cos(2πx₁) = 2ρ²`, which avoids cancellation near the
//! lattice `Z x {0}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};

/// Evaluations with `ρ` (or `|d|` for the planar kernel) at or below this
/// raise [`Error::KernelSingularity`].
pub const EPS_SING: f64 = 1e-14;

/// Beyond this height the kernels switch to the `e^{-2π|x₂|}` form.
const FAR_FIELD: f64 = 30.0;

/// Circle average of the off-diagonal entries of `∇K∞` about the origin,
/// `Σ_{n≠0} -1/(2π n²) = -π/6`. It is the gradient of the harmonic part
/// `K∞ - K` at 0, which the mean value property makes radius independent.
pub const GRAD_OFFDIAG_CIRCLE_MEAN: f64 = -PI / 6.0;

#[inline]
fn rho_sq(d: Vec2) -> f64 {
    let s = (PI * d.x).sin();
    let sh = (PI * d.y).sinh();
    s * s + sh * sh
}

pub fn rho(d: Vec2) -> f64 {
    rho_sq(d).sqrt()
}

/// `ln ρ`, finite for all heights.
pub fn log_rho(d: Vec2) -> f64 {
    if d.y.abs() > FAR_FIELD {
        // 4ρ² = e^{2π|x₂|} (1 + E² - 2E cos 2πx₁), E = e^{-2π|x₂|}
        let e = (-2.0 * PI * d.y.abs()).exp();
        let c = (2.0 * PI * d.x).cos();
        0.5 * ((1.0 + e * e - 2.0 * e * c).ln() + 2.0 * PI * d.y.abs()) - 2f64.ln()
    } else {
        0.5 * rho_sq(d).ln()
    }
}

fn guard(r: f64) -> Result<()> {
    if r <= EPS_SING {
        Err(Error::KernelSingularity { rho: r })
    } else {
        Ok(())
    }
}

/// Green's function `(2π)⁻¹ ln ρ`.
pub fn green(d: Vec2) -> Result<f64> {
    if d.y.abs() <= FAR_FIELD {
        guard(rho(d))?;
    }
    Ok(log_rho(d) / (2.0 * PI))
}

/// The periodic kernel `K∞(d)`.
pub fn k_inf(d: Vec2) -> Result<Vec2> {
    if d.y.abs() > FAR_FIELD {
        let e = (-2.0 * PI * d.y.abs()).exp();
        let (s, c) = (2.0 * PI * d.x).sin_cos();
        let den = 1.0 + e * e - 2.0 * e * c;
        let sign = d.y.signum();
        return Ok(Vec2::new(-0.5 * sign * (1.0 - e * e) / den, e * s / den));
    }
    let r2 = rho_sq(d);
    guard(r2.sqrt())?;
    let scale = 1.0 / (4.0 * r2);
    Ok(Vec2::new(-(2.0 * PI * d.y).sinh() * scale, (2.0 * PI * d.x).sin() * scale))
}

/// Planar kernel `K(d) = d⊥ / (2π|d|²)`.
pub fn k_classical(d: Vec2) -> Result<Vec2> {
    let r2 = d.norm_sq();
    guard(r2.sqrt())?;
    Ok(d.perp() * (1.0 / (2.0 * PI * r2)))
}

/// Symmetric partial image sum `Σ_{|n|≤N} K(d - (n, 0))`.
pub fn k_sym_truncated(d: Vec2, images: usize) -> Result<Vec2> {
    let mut acc = k_classical(d)?;
    for n in 1..=images {
        let n = n as f64;
        // pair n with -n
        acc += k_classical(Vec2::new(d.x - n, d.y))? + k_classical(Vec2::new(d.x + n, d.y))?;
    }
    Ok(acc)
}

/// Symmetric, trace-free matrix `β` with `∇K∞ = (π/2) β / ρ²`.
pub fn beta(d: Vec2) -> Result<Mat2> {
    let r2 = rho_sq(d);
    guard(r2.sqrt())?;
    let (s, c) = (2.0 * PI * d.x).sin_cos();
    let (sh, ch) = ((2.0 * PI * d.y).sinh(), (2.0 * PI * d.y).cosh());
    let a = s * sh / (2.0 * r2);
    let b = (c * ch - 1.0) / (2.0 * r2);
    Ok(Mat2::new(a, b, b, -a))
}

/// Jacobian of [`k_inf`]: rows are components, columns are partials.
pub fn grad_k_inf(d: Vec2) -> Result<Mat2> {
    if d.y.abs() > FAR_FIELD {
        let e = (-2.0 * PI * d.y.abs()).exp();
        let (s, c) = (2.0 * PI * d.x).sin_cos();
        let den = 1.0 + e * e - 2.0 * e * c;
        let f = 2.0 * PI * e / (den * den);
        let a = f * s * d.y.signum() * (1.0 - e * e);
        let b = f * (c * (1.0 + e * e) - 2.0 * e);
        return Ok(Mat2::new(a, b, b, -a));
    }
    let r2 = rho_sq(d);
    Ok(beta(d)? * (0.5 * PI / r2))
}

/// Planar gradient kernel `∇K = σ / (2π|d|²)`.
pub fn grad_k_classical(d: Vec2) -> Result<Mat2> {
    let r2 = d.norm_sq();
    guard(r2.sqrt())?;
    let f = 1.0 / (2.0 * PI * r2 * r2);
    let a = 2.0 * d.x * d.y * f;
    let b = (d.y * d.y - d.x * d.x) * f;
    Ok(Mat2::new(a, b, b, -a))
}

/// `Σ_{|n|≤N} ∇K(d - (n, 0))`.
pub fn grad_k_sym_truncated(d: Vec2, images: usize) -> Result<Mat2> {
    let mut acc = grad_k_classical(d)?;
    for n in 1..=images {
        let n = n as f64;
        acc += grad_k_classical(Vec2::new(d.x - n, d.y))?
            + grad_k_classical(Vec2::new(d.x + n, d.y))?;
    }
    Ok(acc)
}
