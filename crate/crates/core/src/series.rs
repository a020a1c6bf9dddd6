//! Power-series helpers: coefficients of a function analytic in the disk from
//! samples on a circle, and truncated-series evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::dft;

/// DFT of samples taken on the circle `|z| = radius`, on the grid
/// `radius * e^{2 pi i m / L + i offset}`.
#[derive(Debug, Clone)]
pub struct CircleSpectrum {
    raw: Vec<Complex64>,
    radius: f64,
    offset: f64,
}

impl CircleSpectrum {
    /// Samples `f` at `points` grid points and transforms.
    pub fn sample<F>(points: usize, radius: f64, offset: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let samples = (0..points)
            .map(|m| {
                let t = 2.0 * PI * m as f64 / points as f64 + offset;
                f(Complex64::from_polar(radius, t))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_samples(&samples, radius, offset))
    }

    pub fn from_samples(samples: &[Complex64], radius: f64, offset: f64) -> Self {
        Self {
            raw: dft(samples),
            radius,
            offset,
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Estimate of the Taylor coefficient of `z^n`, `0 <= n < len`.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        let scale = self.radius.powi(n as i32);
        self.raw[n] * Complex64::from_polar(1.0, -(n as f64) * self.offset) / scale
    }

    /// Estimate of the coefficient of `z^{-n}`; vanishes for analytic input
    /// up to aliasing.
    pub fn negative_coefficient(&self, n: usize) -> Complex64 {
        let l = self.raw.len();
        let scale = self.radius.powi(n as i32);
        self.raw[l - n] * Complex64::from_polar(1.0, n as f64 * self.offset) * scale
    }

    pub fn coefficients(&self, count: usize) -> Vec<Complex64> {
        (0..count).map(|n| self.coefficient(n)).collect()
    }
}

/// Evaluates `sum_n c_n z^n` by Horner's rule.
pub fn evaluate_series(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}
