//! Discrete Fourier transform on the root-of-unity grid.
//!
//! Convention: `dft(x)[n] = (1/M) sum_m x[m] e^{-2 pi i n m / M}`, so the
//! output holds the Taylor/Fourier coefficients of a function sampled at
//! `e^{2 pi i m / M}`. `inverse_dft` evaluates the trigonometric polynomial
//! back on the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

fn transform(x: &[Complex64], direction: FftDirection) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    if !buf.is_empty() {
        FftPlanner::new().plan_fft(buf.len(), direction).process(&mut buf);
    }
    buf
}

pub fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let scale = 1.0 / samples.len().max(1) as f64;
    let mut out = transform(samples, FftDirection::Forward);
    out.iter_mut().for_each(|z| *z *= scale);
    out
}

pub fn inverse_dft(coefficients: &[Complex64]) -> Vec<Complex64> {
    transform(coefficients, FftDirection::Inverse)
}

/// The `M` grid points `e^{2 pi i m / M + i offset}`.
pub fn circle_grid(m: usize, offset: f64) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64 + offset))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let m = x.len() as f64;
        (0..x.len())
            .map(|n| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (n * k) as f64 / m))
                    .sum::<Complex64>()
                    / m
            })
            .collect()
    }

    #[test]
    fn constant_samples() {
        let c = Complex64::new(0.3, -1.2);
        let out = dft(&[c; 8]);
        assert!((out[0] - c).norm() < 1e-15);
        assert!(out[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn pure_mode() {
        let out = dft(&circle_grid(16, 0.0));
        for (n, z) in out.iter().enumerate() {
            let want = if n == 1 { 1.0 } else { 0.0 };
            assert!((z - want).norm() < 1e-14, "n={n}: {z}");
        }
    }

    #[test]
    fn large_grid_roundtrip() {
        let x: Vec<Complex64> = (0..4096)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let back = inverse_dft(&dft(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn matches_naive_and_roundtrips(
            v in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..200)
        ) {
            let x: Vec<Complex64> = v.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let f = dft(&x);
            let g = naive(&x);
            let scale = 1e-12 * x.len() as f64 * x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in f.iter().zip(&g) {
                prop_assert!((a - b).norm() <= scale.max(1e-300));
            }
            let back = inverse_dft(&f);
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }
}
