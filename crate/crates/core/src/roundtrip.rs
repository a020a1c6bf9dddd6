//! Spectral data -> Taylor coefficients -> recovered spectral data, with the
//! error of every recovered quantity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{analyze, AnalysisOptions, AnalysisReport, Dominance, PsiSamples};
use crate::inner::InnerFunction;
use crate::synthesis::{fourier_coefficients_with, FourierOptions, SpectralData};

/// Pass thresholds of a roundtrip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundtripThresholds {
    pub level: f64,
    pub psi: f64,
    pub secular: f64,
}

impl Default for RoundtripThresholds {
    fn default() -> Self {
        Self {
            level: 1e-6,
            psi: 1e-5,
            secular: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub order: usize,
    /// Largest synthesized coefficient beyond the order.
    pub tail: f64,
    pub s_error: f64,
    pub s_tilde_error: f64,
    pub alternating: bool,
    pub dominance: Vec<Dominance>,
    /// Sup error of each recovered `psi_j` on the analysis grid.
    pub psi_error: Vec<f64>,
    /// Same for `psi~_k`; `None` where no inner function is recovered.
    pub psi_tilde_error: Vec<Option<f64>>,
    pub secular_error: f64,
    pub thresholds: RoundtripThresholds,
    pub passed: bool,
    pub analysis: AnalysisReport,
}

impl RoundtripReport {
    pub fn max_psi_error(&self) -> f64 {
        self.psi_error
            .iter()
            .chain(self.psi_tilde_error.iter().flatten())
            .fold(0.0, |a, b| a.max(*b))
    }
}

fn level_error(expected: &[f64], recovered: &[f64]) -> f64 {
    if expected.len() != recovered.len() {
        return f64::INFINITY;
    }
    expected
        .iter()
        .zip(recovered)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn psi_error(samples: &PsiSamples, points: &[Complex64], f: &InnerFunction) -> Result<f64> {
    samples.sup_error(points, |z| f.evaluate(z))
}

/// Synthesizes `2M` Taylor coefficients of `data`'s symbol (tail checked on
/// `[M, 2M)`), runs the analysis at order `M` and compares.
pub fn roundtrip(
    data: &SpectralData,
    order: usize,
    analysis: &AnalysisOptions,
    thresholds: RoundtripThresholds,
) -> Result<RoundtripReport> {
    let series = fourier_coefficients_with(
        data,
        order,
        FourierOptions {
            keep_section: true,
            ..FourierOptions::default()
        },
    )?;
    let report = analyze(&series.coefficients, order, analysis)?;
    let spec = data.spectrum();

    let s_error = level_error(spec.s(), &report.s());
    let s_tilde_error = level_error(spec.s_tilde(), &report.s_tilde());
    let dominance = report.dominance_pattern();
    let alternating = dominance.len() == 2 * spec.n()
        && dominance.iter().enumerate().all(|(i, d)| {
            *d == if i % 2 == 0 { Dominance::H } else { Dominance::K }
        });

    let points = report.grid.points();
    let mut psi_errors = Vec::with_capacity(data.n());
    for (j, f) in data.psi().iter().enumerate() {
        psi_errors.push(match report.psi.get(j) {
            Some(p) => psi_error(p, &points, f)?,
            None => f64::INFINITY,
        });
    }
    let mut psi_tilde_errors = Vec::with_capacity(data.n());
    for k in 0..data.n() {
        let expected = data.psi_tilde().get(k);
        let recovered = report.psi_tilde.get(k).and_then(|p| p.as_ref());
        psi_tilde_errors.push(match (expected, recovered) {
            (Some(f), Some(p)) => Some(psi_error(p, &points, f)?),
            (None, None) => None,
            _ => Some(f64::INFINITY),
        });
    }
    let secular_error = report.diagnostics.secular_max_error;

    let mut out = RoundtripReport {
        order,
        tail: series.tail,
        s_error,
        s_tilde_error,
        alternating,
        dominance,
        psi_error: psi_errors,
        psi_tilde_error: psi_tilde_errors,
        secular_error,
        thresholds,
        passed: false,
        analysis: report,
    };
    out.passed = out.s_error <= thresholds.level
        && out.s_tilde_error <= thresholds.level
        && out.alternating
        && out.max_psi_error() <= thresholds.psi
        && out.secular_error <= thresholds.secular;
    Ok(out)
}

/// Checks an order before running anything expensive.
pub fn check_roundtrip_order(order: usize) -> Result<()> {
    if order < 8 || !order.is_power_of_two() || order > 1024 {
        return Err(Error::InvalidOrder(format!(
            "roundtrip order must be a power of two in 8..=1024, got {order}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::InterlacedSpectrum;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rational_anchor() {
        let data = SpectralData::new(
            InterlacedSpectrum::new(vec![2.0], vec![1.0]).unwrap(),
            vec![InnerFunction::constant(0.0)],
            vec![InnerFunction::constant(0.0)],
        )
        .unwrap();
        let r = roundtrip(&data, 64, &AnalysisOptions::default(), RoundtripThresholds::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.s_error < 1e-10 && r.s_tilde_error < 1e-10);
    }

    #[test]
    fn two_level_blaschke_data() {
        let data = SpectralData::new(
            InterlacedSpectrum::new(vec![2.0, 0.7], vec![1.2, 0.0]).unwrap(),
            vec![
                InnerFunction::blaschke(0.4, vec![c(0.3, 0.1)]).unwrap(),
                InnerFunction::constant(-1.0),
            ],
            vec![InnerFunction::blaschke(0.0, vec![c(-0.2, 0.2)]).unwrap()],
        )
        .unwrap();
        let r = roundtrip(&data, 128, &AnalysisOptions::default(), RoundtripThresholds::default()).unwrap();
        assert!(r.passed, "{:?}", (r.s_error, r.s_tilde_error, &r.psi_error, &r.psi_tilde_error, r.secular_error));
        assert_eq!(r.psi_tilde_error.len(), 2);
        assert!(r.psi_tilde_error[1].is_none());
    }

    #[test]
    fn bad_orders_are_rejected() {
        assert!(check_roundtrip_order(12).is_err());
        assert!(check_roundtrip_order(256).is_ok());
    }
}
