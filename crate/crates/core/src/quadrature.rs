//! Periodic trapezoid rule and quadrature for a logarithmic singularity.
//!
//! For `f` smooth and 2π-periodic,
//!
//! ```text
//! ∫_0^{2π} ln(4 sin²((α_i - α')/2)) f(α') dα' ≈ Σ_j w[|i - j| mod N] f(α_j)
//! ```
//!
//! with weights built from the cosine series
//! `ln(4 sin²(t/2)) = -2 Σ_{m≥1} cos(mt)/m`, truncated at `m = N/2` with the
//! top mode halved. The rule is exact for trigonometric polynomials of degree
//! below `N/2`.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::linalg::Vec2;

/// Values that can be accumulated by the quadrature rules.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Integrand for Vec2 {
    fn zero() -> Self {
        Vec2::ZERO
    }
}

/// `(period / N) Σ samples`.
pub fn trapezoid_periodic<T: Integrand>(samples: &[T], period: f64) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::invalid("trapezoid rule needs at least one sample"));
    }
    let sum = samples.iter().fold(T::zero(), |acc, &s| acc + s);
    Ok(sum * (period / samples.len() as f64))
}

/// Circulant weights for the `ln(4 sin²)` kernel on `N` equispaced nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LogKernelWeights {
    w: Vec<f64>,
}

pub fn log_kernel_weights(n: usize) -> Result<LogKernelWeights> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "log-kernel weights need an even node count of at least 8, got {n}"
        )));
    }
    let half = n / 2;
    let h = 2.0 * PI / n as f64;
    let mut w = vec![0.0; n];
    // w[k] = w[N-k], so only the first half is computed
    for k in 0..=half {
        let mut acc = 0.0;
        for m in 1..half {
            let phase = (m * k % n) as f64 * h;
            acc += phase.cos() / m as f64;
        }
        let nyquist = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += nyquist / n as f64;
        w[k] = -2.0 * h * acc;
    }
    for k in half + 1..n {
        w[k] = w[n - k];
    }
    Ok(LogKernelWeights { w })
}

impl LogKernelWeights {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Weight coupling nodes `i` and `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let n = self.w.len();
        self.w[(i + n - j) % n]
    }

    /// `Σ_j w[|i - j|] f_j`, summed in node order.
    pub fn apply<T: Integrand>(&self, i: usize, f: &[T]) -> T {
        f.iter().enumerate().fold(T::zero(), |acc, (j, &v)| acc + v * self.get(i, j))
    }
}

/// `∫ [S(α') + ½ ln(4 sin²((α_i - α')/2)) L(α')] dα'` where `smooth` holds
/// samples of the already multiplied smooth part (with its finite diagonal
/// value at `i`) and `log_factor` holds `L`.
pub fn integrate_with_log_singularity<T: Integrand>(
    smooth: &[T],
    log_factor: &[T],
    i: usize,
    weights: &LogKernelWeights,
) -> Result<T> {
    let n = weights.len();
    if smooth.len() != n || log_factor.len() != n {
        return Err(Error::invalid(format!(
            "sample counts {} and {} do not match {n} weights",
            smooth.len(),
            log_factor.len()
        )));
    }
    if i >= n {
        return Err(Error::invalid(format!("node index {i} out of range for {n} nodes")));
    }
    Ok(trapezoid_periodic(smooth, 2.0 * PI)? + weights.apply(i, log_factor) * 0.5)
}

/// `∫_{-h/2}^{h/2} ln|t| dt`, the analytic value of the singular cell.
pub fn cell_log_correction(h: f64) -> f64 {
    h * ((0.5 * h).ln() - 1.0)
}

/// Singular-node correction `h ln(h/2π)` for `ln|t|` times a smooth factor.
///
/// It differs from [`cell_log_correction`] by `h (1 - ln π)`, the summed
/// midpoint defect of the neighbouring cells, and makes the punctured rule
/// exact for `ln|2 sin(t/2)|`.
pub fn punctured_log_correction(h: f64) -> f64 {
    h * (h / (2.0 * PI)).ln()
}

/// Trapezoid rule over one period with the node `i` left out, plus a
/// caller-supplied `correction` for the omitted node.
///
/// With [`cell_log_correction`] the rule is first order for `ln|t|` type
/// singularities: for `ln|2 sin(t/2)|` the error is exactly `h (ln π - 1)`.
/// [`punctured_log_correction`] removes that defect.
pub fn punctured_trapezoid_log<T: Integrand>(f: &[T], i: usize, correction: T) -> Result<T> {
    let n = f.len();
    if n == 0 {
        return Err(Error::invalid("punctured rule needs samples"));
    }
    if i >= n {
        return Err(Error::invalid(format!("node index {i} out of range for {n} nodes")));
    }
    let h = 2.0 * PI / n as f64;
    let sum = f
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold(T::zero(), |acc, (_, &v)| acc + v);
    Ok(sum * h + correction)
}
