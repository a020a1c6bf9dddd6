//! Python bindings. Spectral data and reports cross the boundary as JSON
//! strings in the same formats the `hst` CLI reads and writes; coefficient
//! and boundary arrays are lists of Python `complex`.

use hankel_spectral::cauchy::{self, InterlacedSpectrum};
use hankel_spectral::hankel::{self, AnalysisOptions};
use hankel_spectral::identities::{run_suite, SizeCaps};
use hankel_spectral::roundtrip::{self as rt, RoundtripThresholds};
use hankel_spectral::synthesis::{fourier_coefficients_with, synthesize_at, FourierOptions, SpectralData};
use hankel_spectral::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn domain(e: hankel_spectral::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {}", e.kind(), e))
}

fn json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("InvalidInput: {e}")))
}

fn to_json(value: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn options(cluster_tol: f64, dom_tol: f64) -> AnalysisOptions {
    AnalysisOptions {
        cluster_tol,
        dom_tol,
        ..AnalysisOptions::default()
    }
}

/// Taylor coefficients of the symbol built from spectral data JSON.
#[pyfunction]
#[pyo3(signature = (data, order, keep_section = false, tail_tol = 1e-6))]
fn synthesize(data: &str, order: usize, keep_section: bool, tail_tol: f64) -> PyResult<Vec<Complex64>> {
    let data: SpectralData = json(data)?;
    let opts = FourierOptions {
        tail_tol,
        keep_section,
        ..FourierOptions::default()
    };
    Ok(fourier_coefficients_with(&data, order, opts).map_err(domain)?.coefficients)
}

/// Symbol values at points of the closed disk.
#[pyfunction]
fn evaluate(data: &str, points: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let data: SpectralData = json(data)?;
    points
        .into_iter()
        .map(|z| synthesize_at(&data, z).map(|v| v.u).map_err(domain))
        .collect()
}

/// Recovered spectral data from Taylor coefficients, as a JSON report.
#[pyfunction]
#[pyo3(signature = (coefficients, order = None, cluster_tol = 1e-6, dom_tol = 1e-4))]
fn analyze(coefficients: Vec<Complex64>, order: Option<usize>, cluster_tol: f64, dom_tol: f64) -> PyResult<String> {
    if coefficients.iter().all(|c| c.norm() == 0.0) {
        return Err(domain(hankel_spectral::Error::EmptySpectrum));
    }
    let m = order.unwrap_or(coefficients.len().div_ceil(2));
    to_json(&hankel::analyze(&coefficients, m, &options(cluster_tol, dom_tol)).map_err(domain)?)
}

/// Synthesize then analyze; the JSON report carries `passed`.
#[pyfunction]
#[pyo3(signature = (data, order = 256, cluster_tol = 1e-6, dom_tol = 1e-4))]
fn roundtrip(data: &str, order: usize, cluster_tol: f64, dom_tol: f64) -> PyResult<String> {
    rt::check_roundtrip_order(order).map_err(domain)?;
    let data: SpectralData = json(data)?;
    let report = rt::roundtrip(&data, order, &options(cluster_tol, dom_tol), RoundtripThresholds::default())
        .map_err(domain)?;
    to_json(&report)
}

/// `(tau_sq, kappa_sq)` for two interlaced families.
#[pyfunction]
fn cauchy_weights(s: Vec<f64>, s_tilde: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let spec = InterlacedSpectrum::new(s, s_tilde).map_err(domain)?;
    let w = cauchy::weights(&spec).map_err(domain)?;
    Ok((w.tau_sq, w.kappa_sq))
}

/// Randomized identity suite; JSON list of per-check results.
#[pyfunction]
#[pyo3(signature = (seed = 0, trials = 25, max_n = 8, max_degree = 3, max_order = 512))]
fn verify(py: Python<'_>, seed: u64, trials: usize, max_n: usize, max_degree: usize, max_order: usize) -> PyResult<String> {
    let caps = SizeCaps {
        max_n,
        max_degree,
        max_order,
    };
    let results = py.detach(|| run_suite(seed, trials, caps)).map_err(domain)?;
    to_json(&results)
}

#[pymodule]
fn pyhankel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_weights, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
