//! Seeded generators for spectra, spectral data and distinct-moduli pairs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::cauchy::InterlacedSpectrum;
use crate::error::{Error, Result};
use crate::inner::InnerSampler;
use crate::synthesis::{fourier_coefficients_with, FourierOptions, SpectralData};

/// How consecutive levels are spaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    /// Additive gaps drawn from `[margin, max_gap]`, built from the bottom.
    Additive { margin: f64, max_gap: f64 },
    /// `s_1` drawn from `[1, 3]`, each next level divided by a ratio drawn
    /// from `[min_ratio, max_ratio]`. Keeps the poles of the symbol away
    /// from the circle.
    Geometric { min_ratio: f64, max_ratio: f64 },
}

/// Draws interlaced spectra with `N` uniform in `min_n..=max_n`.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumSampler {
    pub min_n: usize,
    pub max_n: usize,
    pub spacing: Spacing,
    /// Probability that `s~_N = 0`.
    pub zero_tail: f64,
}

impl SpectrumSampler {
    pub fn new(max_n: usize, margin: f64) -> Self {
        Self {
            min_n: 1,
            max_n,
            spacing: Spacing::Additive {
                margin,
                max_gap: 1.0,
            },
            zero_tail: 0.5,
        }
    }

    pub fn geometric(max_n: usize, min_ratio: f64, max_ratio: f64) -> Self {
        Self {
            min_n: 1,
            max_n,
            spacing: Spacing::Geometric {
                min_ratio,
                max_ratio,
            },
            zero_tail: 0.5,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> InterlacedSpectrum {
        let n = rng.random_range(self.min_n..=self.max_n);
        let zero = rng.random_bool(self.zero_tail.clamp(0.0, 1.0));
        let mut descending = Vec::with_capacity(2 * n);
        match self.spacing {
            Spacing::Additive { margin, max_gap } => {
                let hi = max_gap.max(margin);
                let mut level = 0.0;
                for i in 0..2 * n {
                    if i > 0 || !zero {
                        level += rng.random_range(margin..=hi);
                    }
                    descending.push(level);
                }
                descending.reverse();
            }
            Spacing::Geometric {
                min_ratio,
                max_ratio,
            } => {
                let mut level = rng.random_range(1.0..=3.0);
                for _ in 0..2 * n {
                    descending.push(level);
                    level /= rng.random_range(min_ratio..=max_ratio.max(min_ratio));
                }
                if zero {
                    descending[2 * n - 1] = 0.0;
                }
            }
        }
        let s = descending.iter().step_by(2).copied().collect();
        let s_tilde = descending.iter().skip(1).step_by(2).copied().collect();
        InterlacedSpectrum::new(s, s_tilde).expect("spacing respects the margin")
    }
}

/// Draws full spectral data: a spectrum plus one inner function per level.
#[derive(Debug, Clone, Copy)]
pub struct SpectralSampler {
    pub spectrum: SpectrumSampler,
    pub inner: InnerSampler,
}

impl SpectralSampler {
    pub fn new(max_n: usize, max_degree: usize, allow_singular: bool) -> Self {
        Self {
            spectrum: SpectrumSampler::new(max_n, 0.05),
            inner: InnerSampler::new(max_degree, allow_singular),
        }
    }

    /// Blaschke-only data with geometric level spacing and zeros in
    /// `|a| <= 0.5`: the symbol's poles stay well outside the circle, so
    /// moderate orders resolve it.
    pub fn resolved_blaschke(max_n: usize, max_degree: usize, min_ratio: f64, max_ratio: f64) -> Self {
        Self {
            spectrum: SpectrumSampler::geometric(max_n, min_ratio, max_ratio),
            inner: InnerSampler {
                max_zero_radius: 0.5,
                ..InnerSampler::new(max_degree, false)
            },
        }
    }

    /// Draws until the symbol's Taylor tail on `[order, 2 order)` is below
    /// `1e-6` of its norm. Returns the data and the number of rejected draws.
    pub fn sample_resolved<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        order: usize,
        max_draws: usize,
    ) -> Result<(SpectralData, usize)> {
        let mut last = None;
        for rejected in 0..max_draws {
            let data = self.sample(rng);
            match fourier_coefficients_with(&data, order, FourierOptions::default()) {
                Ok(_) => return Ok((data, rejected)),
                Err(e @ Error::TailTooLarge { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::InvalidArgument("max_draws must be at least 1".into())))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpectralData {
        let spectrum = self.spectrum.sample(rng);
        let n = spectrum.n();
        let psi = (0..n).map(|_| self.inner.sample(rng)).collect();
        let k = if spectrum.has_zero_tail() { n - 1 } else { n };
        let psi_tilde = (0..k).map(|_| self.inner.sample(rng)).collect();
        SpectralData::new(spectrum, psi, psi_tilde).expect("lengths match")
    }
}

/// `a`, `b` of length `n` with random phases and `2n` moduli in
/// `[0.1, 0.1 + span]` pairwise separated by at least `sep`.
pub fn distinct_moduli_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    sep: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let count = 2 * n;
    // Sorted moduli with prescribed minimum spacing: shift sorted uniforms.
    let span = 3.0;
    let free = span - sep * (count as f64 - 1.0);
    if !(free > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{count} moduli cannot be separated by {sep} within a span of {span}"
        )));
    }
    let mut u: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..free)).collect();
    u.sort_by(f64::total_cmp);
    let mut moduli: Vec<f64> = u.iter().enumerate().map(|(i, x)| 0.1 + x + sep * i as f64).collect();
    // Random assignment of moduli to the a's and b's.
    for i in (1..count).rev() {
        let j = rng.random_range(0..=i);
        moduli.swap(i, j);
    }
    let mut polar = moduli.into_iter().map(|r| Complex64::from_polar(r, rng.random_range(-PI..PI)));
    let a = polar.by_ref().take(n).collect();
    let b = polar.collect();
    Ok((a, b))
}
