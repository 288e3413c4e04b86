//! Fourier tools for 2π-periodic data sampled on `α_j = 2πj/N`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

fn forward(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    buf
}

fn inverse_real(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    let n = spectrum.len();
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut spectrum);
    let scale = 1.0 / n as f64;
    spectrum.into_iter().map(|c| c.re * scale).collect()
}

/// Signed wavenumber of FFT bin `k` for an even-length transform; the
/// Nyquist bin maps to `None`.
#[inline]
fn wavenumber(k: usize, n: usize) -> Option<f64> {
    use std::cmp::Ordering::*;
    match k.cmp(&(n / 2)) {
        Less => Some(k as f64),
        Equal => None,
        Greater => Some(k as f64 - n as f64),
    }
}

/// d/dα of the trigonometric interpolant through `samples`, evaluated at the
/// nodes. The Nyquist mode is dropped, which keeps the operator
/// antisymmetric.
pub fn derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut spec = forward(samples);
    for (k, c) in spec.iter_mut().enumerate() {
        *c = match wavenumber(k, n) {
            Some(m) => *c * Complex64::new(0.0, m),
            None => Complex64::new(0.0, 0.0),
        };
    }
    inverse_real(spec)
}

/// Trigonometric interpolant of real 2π-periodic samples (even `N`), with the
/// Nyquist mode carried as a cosine so the interpolant stays real.
#[derive(Debug, Clone)]
pub struct FourierSeries {
    mean: f64,
    // c_k for k = 1..N/2-1
    modes: Vec<Complex64>,
    nyquist: f64,
}

impl FourierSeries {
    pub fn new(samples: &[f64]) -> Self {
        let n = samples.len();
        debug_assert!(n >= 2 && n % 2 == 0);
        let spec = forward(samples);
        let scale = 1.0 / n as f64;
        FourierSeries {
            mean: spec[0].re * scale,
            modes: spec[1..n / 2].iter().map(|c| c * scale).collect(),
            nyquist: spec[n / 2].re * scale,
        }
    }

    fn nyquist_k(&self) -> f64 {
        (self.modes.len() + 1) as f64
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        let mut acc = self.mean;
        for (i, c) in self.modes.iter().enumerate() {
            let (s, co) = ((i + 1) as f64 * alpha).sin_cos();
            acc += 2.0 * (c.re * co - c.im * s);
        }
        acc + self.nyquist * (self.nyquist_k() * alpha).cos()
    }

    pub fn eval_derivative(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.modes.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, co) = (k * alpha).sin_cos();
            // d/dα 2 Re(c e^{ikα}) = -2k Im(c e^{ikα})
            acc -= 2.0 * k * (c.re * s + c.im * co);
        }
        let kn = self.nyquist_k();
        acc - self.nyquist * kn * (kn * alpha).sin()
    }

    /// ∫_0^α of the interpolant.
    pub fn integral_from_zero(&self, alpha: f64) -> f64 {
        let mut acc = self.mean * alpha;
        for (i, c) in self.modes.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, co) = (k * alpha).sin_cos();
            // 2 Re(c (e^{ikα} - 1) / (ik))
            acc += 2.0 * (c.re * s + c.im * (co - 1.0)) / k;
        }
        let kn = self.nyquist_k();
        acc + self.nyquist * (kn * alpha).sin() / kn
    }
}

/// Parameter nodes `α_j = 2πj/N`.
pub fn nodes(n: usize) -> impl Iterator<Item = f64> + Clone {
    let h = 2.0 * PI / n as f64;
    (0..n).map(move |j| j as f64 * h)
}
