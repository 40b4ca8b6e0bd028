//! Trigonometric interpolation and spectral differentiation of sampled
//! functions on the circle.
//!
//! Samples are taken at `φ_k = 2πk/N`. Anti-periodic data (a sign flip after
//! one loop, as happens for eigenvector branches of custom media) is handled
//! with half-integer wavenumbers.

use std::f64::consts::TAU;

use rustfft::FftPlanner;

use crate::C64;

/// Relative size below which Fourier coefficients are treated as noise.
pub const COEFF_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct Periodic {
    /// Coefficient for each wavenumber in `wavenumbers`.
    coeffs: Vec<C64>,
    wavenumbers: Vec<f64>,
    n: usize,
    antiperiodic: bool,
}

impl Periodic {
    /// Builds the interpolant from real samples.
    pub fn from_samples(samples: &[f64], antiperiodic: bool) -> Self {
        let c: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_complex_samples(&c, antiperiodic)
    }

    pub fn from_complex_samples(samples: &[C64], antiperiodic: bool) -> Self {
        let n = samples.len();
        assert!(n >= 4 && n.is_power_of_two(), "sample count must be a power of two");
        let mut buf: Vec<C64> = samples
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                if antiperiodic {
                    let phi = TAU * k as f64 / n as f64;
                    x * C64::from_polar(1.0, -0.5 * phi)
                } else {
                    x
                }
            })
            .collect();
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(n).process(&mut buf);
        let inv_n = 1.0 / n as f64;
        let mut coeffs = Vec::with_capacity(n);
        let mut wavenumbers = Vec::with_capacity(n);
        for (k, z) in buf.into_iter().enumerate() {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            coeffs.push(z * inv_n);
            wavenumbers.push(if antiperiodic { m + 0.5 } else { m });
        }
        // Nyquist mode is ambiguous; it is dropped (negligible for resolved data).
        if !antiperiodic {
            coeffs[n / 2] = C64::new(0.0, 0.0);
        }
        let cmax = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in coeffs.iter_mut() {
            if z.norm() < COEFF_FLOOR * cmax {
                *z = C64::new(0.0, 0.0);
            }
        }
        Periodic { coeffs, wavenumbers, n, antiperiodic }
    }

    /// Samples `f` at `n` equispaced angles and builds the interpolant.
    pub fn sample<F: Fn(f64) -> f64>(f: F, n: usize) -> Self {
        let s: Vec<f64> = (0..n).map(|k| f(TAU * k as f64 / n as f64)).collect();
        Self::from_samples(&s, false)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_antiperiodic(&self) -> bool {
        self.antiperiodic
    }

    /// Complex value of the `order`-th derivative at `phi`.
    pub fn derivative_complex(&self, order: u32, phi: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (c, &m) in self.coeffs.iter().zip(self.wavenumbers.iter()) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let factor = C64::new(0.0, m).powu(order);
            acc += c * factor * C64::from_polar(1.0, m * phi);
        }
        acc
    }

    /// Real part of the `order`-th derivative at `phi`.
    pub fn derivative(&self, order: u32, phi: f64) -> f64 {
        self.derivative_complex(order, phi).re
    }

    pub fn value(&self, phi: f64) -> f64 {
        self.derivative(0, phi)
    }

    /// The `order`-th derivative on the sample grid, via one inverse FFT.
    pub fn derivative_samples(&self, order: u32) -> Vec<f64> {
        let n = self.n;
        let mut buf: Vec<C64> =
            self.coeffs.iter().zip(self.wavenumbers.iter()).map(|(c, &m)| c * C64::new(0.0, m).powu(order)).collect();
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_inverse(n).process(&mut buf);
        buf.iter()
            .enumerate()
            .map(|(k, z)| {
                if self.antiperiodic {
                    let phi = TAU * k as f64 / n as f64;
                    (z * C64::from_polar(1.0, 0.5 * phi)).re
                } else {
                    z.re
                }
            })
            .collect()
    }

    /// Maximum modulus of the `order`-th derivative over the circle.
    pub fn max_abs_derivative(&self, order: u32) -> f64 {
        self.derivative_samples(order).iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// Taylor coefficients `f^{(k)}(phi)/k!` for `k = 0..=order`.
    pub fn taylor(&self, phi: f64, order: usize) -> Vec<f64> {
        let mut fact = 1.0;
        (0..=order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                self.derivative(k as u32, phi) / fact
            })
            .collect()
    }
}

/// Outcome of searching for the first non-vanishing derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstNonzero {
    Order(u32),
    /// Every derivative up to the cap is below threshold.
    AboveCap,
}

/// Smallest `k` in `start..=cap` with `|f^{(k)}(phi)| > rel · max|f^{(k)}|`.
pub fn first_nonzero_derivative(f: &Periodic, phi: f64, start: u32, cap: u32, rel: f64) -> FirstNonzero {
    for k in start..=cap {
        let scale = f.max_abs_derivative(k);
        if scale == 0.0 {
            continue;
        }
        if f.derivative(k, phi).abs() > rel * scale {
            return FirstNonzero::Order(k);
        }
    }
    FirstNonzero::AboveCap
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_trig_polynomial() {
        let f = Periodic::sample(|p| (3.0 * p).sin() + 0.5 * (p).cos(), 64);
        let phi = 0.7;
        assert!((f.derivative(1, phi) - (3.0 * (3.0 * phi).cos() - 0.5 * phi.sin())).abs() < 1e-12);
        assert!((f.derivative(2, phi) - (-9.0 * (3.0 * phi).sin() - 0.5 * phi.cos())).abs() < 1e-11);
        let s = f.derivative_samples(1);
        let p3 = TAU * 3.0 / 64.0;
        assert!((s[3] - (3.0 * (3.0 * p3).cos() - 0.5 * p3.sin())).abs() < 1e-12);
    }

    #[test]
    fn antiperiodic_half_angle() {
        let n = 64;
        let s: Vec<f64> = (0..n).map(|k| (0.5 * TAU * k as f64 / n as f64).cos()).collect();
        let f = Periodic::from_samples(&s, true);
        let phi = 1.3;
        assert!((f.value(phi) - (0.5 * phi).cos()).abs() < 1e-12);
        assert!((f.derivative(1, phi) + 0.5 * (0.5 * phi).sin()).abs() < 1e-12);
        let d = f.derivative_samples(2);
        assert!((d[5] + 0.25 * (0.5 * TAU * 5.0 / 64.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn first_nonzero_of_cubic_zero() {
        let f = Periodic::sample(|p| p.sin().powi(3), 256);
        assert_eq!(first_nonzero_derivative(&f, 0.0, 0, 8, 1e-6), FirstNonzero::Order(3));
        assert_eq!(first_nonzero_derivative(&f, 1.0, 0, 8, 1e-6), FirstNonzero::Order(0));
    }
}
