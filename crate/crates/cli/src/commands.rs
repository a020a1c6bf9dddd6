use std::f64::consts::PI;

use hankel_spectral::cauchy::{self, InterlacedSpectrum};
use hankel_spectral::hankel::{self, AnalysisOptions};
use hankel_spectral::identities::{run_suite, SizeCaps};
use hankel_spectral::linalg::{max_singular_value, ComplexMatrix};
use hankel_spectral::random::SpectrumSampler;
use hankel_spectral::roundtrip::{self, RoundtripThresholds};
use hankel_spectral::series::evaluate_series;
use hankel_spectral::synthesis::{
    fourier_coefficients_with, grid_offset, synthesize_at, CoefficientFile, FourierOptions, SpectralData,
};
use hankel_spectral::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::io::{boundary_csv, parse, parse_coefficients, read_input, write_json, write_output, CliError, CliResult};
use crate::{AnalyzeArgs, CauchyReportArgs, RoundtripArgs, SampleArgs, SynthesizeArgs, VerifyArgs};

fn spectral_data(text: &str) -> CliResult<SpectralData> {
    parse(text, "spectral data")
}

fn analysis_options(cluster_tol: f64, dom_tol: f64) -> AnalysisOptions {
    AnalysisOptions {
        cluster_tol,
        dom_tol,
        ..AnalysisOptions::default()
    }
}

/// `u` at `points` equispaced boundary points starting at `offset`.
fn boundary_rows(data: &SpectralData, points: usize, offset: f64) -> CliResult<Vec<(f64, Complex64)>> {
    (0..points)
        .map(|m| {
            let t = 2.0 * PI * m as f64 / points as f64 + offset;
            Ok((t, synthesize_at(data, Complex64::from_polar(1.0, t))?.u))
        })
        .collect()
}

pub fn synthesize(a: &SynthesizeArgs) -> CliResult<()> {
    let data = spectral_data(&read_input(&a.io.input)?)?;
    let opts = FourierOptions {
        tail_tol: a.tail_tol,
        keep_section: a.keep_section,
        ..FourierOptions::default()
    };
    let series = fourier_coefficients_with(&data, a.order, opts)?;
    log::info!("order {}: tail {:.3e}, radius {}", a.order, series.tail, series.radius);
    let mut file = CoefficientFile::new(a.order, series);
    if let Some(path) = &a.boundary_trace {
        let points = 4 * a.order;
        let rows = boundary_rows(&data, points, grid_offset(&data, points)?)?;
        write_output(Some(path), &boundary_csv(&rows))?;
        file.boundary_trace = Some(path.display().to_string());
    }
    write_json(a.io.out.as_deref(), &file)
}

pub fn analyze(a: &AnalyzeArgs) -> CliResult<()> {
    let coeffs = parse_coefficients(&read_input(&a.io.input)?)?;
    let order = a.order.unwrap_or(coeffs.len().div_ceil(2));
    if coeffs.is_empty() || coeffs.iter().all(|c| c.norm() == 0.0) {
        return Err(hankel_spectral::Error::EmptySpectrum.into());
    }
    let report = hankel::analyze(&coeffs, order, &analysis_options(a.cluster_tol, a.dom_tol))?;
    write_json(a.io.out.as_deref(), &report)
}

pub fn roundtrip(a: &RoundtripArgs) -> CliResult<()> {
    roundtrip::check_roundtrip_order(a.order)?;
    let data = spectral_data(&read_input(&a.io.input)?)?;
    let report = roundtrip::roundtrip(
        &data,
        a.order,
        &analysis_options(a.cluster_tol, a.dom_tol),
        RoundtripThresholds::default(),
    )?;
    write_json(a.io.out.as_deref(), &report)?;
    if !report.passed {
        return Err(CliError::Threshold(format!(
            "roundtrip errors: levels {:.3e}/{:.3e}, psi {:.3e}, secular {:.3e}, alternating {}",
            report.s_error,
            report.s_tilde_error,
            report.max_psi_error(),
            report.secular_error,
            report.alternating
        )));
    }
    Ok(())
}

fn real_diag(v: &[f64]) -> ComplexMatrix {
    ComplexMatrix::real_diagonal(v)
}

fn cauchy_summary(spec: &InterlacedSpectrum, samples: usize, seed: u64) -> CliResult<Value> {
    let n = spec.n();
    let w = cauchy::weights(spec)?;
    let t = cauchy::build_t(spec);
    let v = cauchy::build_v(spec, &w);
    let identity = ComplexMatrix::identity(n);
    let inverse = t.matmul(&cauchy::explicit_inverse(spec, &w))?.max_abs_diff(&identity);
    let orthogonal = v.transpose().matmul(&v)?.max_abs_diff(&identity);
    let ones = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(1.0, 0.0));
    let commutator = real_diag(&spec.s_sq())
        .matmul(&t)?
        .sub(&t.matmul(&real_diag(&spec.s_tilde_sq()))?)?
        .max_abs_diff(&ones);
    let kappa = w.kappa();
    let update = v
        .transpose()
        .matmul(&real_diag(&spec.s_sq()))?
        .matmul(&v)?
        .max_abs_diff(&real_diag(&spec.s_tilde_sq()).add(&ComplexMatrix::from_fn(n, n, |i, j| {
            Complex64::new(kappa[i] * kappa[j], 0.0)
        }))?);
    let inv_s: Vec<f64> = spec.s().iter().map(|x| 1.0 / x).collect();
    let contraction = max_singular_value(&real_diag(&inv_s).matmul(&v)?.matmul(&real_diag(spec.s_tilde()))?)?;
    let certification = cauchy::certify_invertibility(spec, samples, seed)?;
    Ok(json!({
        "spectrum": spec,
        "weights": w,
        "residuals": {
            "explicit_inverse": inverse,
            "v_orthogonal": orthogonal,
            "commutator_rank_one": commutator,
            "v_rank_one_update": update,
        },
        "contraction_sigma_max": contraction,
        "certification": certification,
        "seed": seed,
    }))
}

pub fn cauchy_report(a: &CauchyReportArgs, seed: u64) -> CliResult<()> {
    let spec: InterlacedSpectrum = match &a.input {
        Some(path) => parse(&read_input(path)?, "spectrum")?,
        None => {
            if a.max_n == 0 {
                return Err(CliError::Input("--max-n must be at least 1".into()));
            }
            SpectrumSampler::new(a.max_n, 0.05).sample(&mut ChaCha8Rng::seed_from_u64(seed))
        }
    };
    write_json(a.out.as_deref(), &cauchy_summary(&spec, a.samples, seed)?)
}

pub fn verify(a: &VerifyArgs, seed: u64) -> CliResult<()> {
    let caps = SizeCaps {
        max_n: a.max_n,
        max_degree: a.max_degree,
        max_order: a.max_order,
    };
    let results = run_suite(seed, a.trials, caps)?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    write_json(
        None,
        &json!({
            "seed": seed,
            "trials": a.trials,
            "caps": caps,
            "passed": failed.is_empty(),
            "results": results,
        }),
    )?;
    if !failed.is_empty() {
        return Err(CliError::Threshold(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}

pub fn sample(a: &SampleArgs) -> CliResult<()> {
    if a.points == 0 {
        return Err(CliError::Input("--points must be at least 1".into()));
    }
    let text = read_input(&a.io.input)?;
    let value: Value = parse(&text, "input")?;
    let rows = if value.get("s").is_some() {
        boundary_rows(&spectral_data(&text)?, a.points, a.offset)?
    } else {
        let coeffs = parse_coefficients(&text)?;
        (0..a.points)
            .map(|m| {
                let t = 2.0 * PI * m as f64 / a.points as f64 + a.offset;
                (t, evaluate_series(&coeffs, Complex64::from_polar(1.0, t)))
            })
            .collect()
    };
    write_output(a.io.out.as_deref(), &boundary_csv(&rows))
}
