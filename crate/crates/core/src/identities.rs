//! Randomized battery over every identity the crate relies on.
//!
//! Each check draws fresh spectra (and inner functions where needed) per
//! trial from its own ChaCha stream, so results do not depend on the thread
//! count. A trial that errors counts as an infinite residual; nothing is
//! thrown past [`run_suite`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cauchy::{self, CauchyWeights, InterlacedSpectrum};
use crate::error::{Error, Result};
use crate::hankel::{build_hankel, squared_spectrum, Operator};
use crate::linalg::{dft, max_singular_value, min_singular_value, norm2, ComplexMatrix};
use crate::random::{distinct_moduli_pair, SpectralSampler, SpectrumSampler};
use crate::schmidt::{schmidt_residual_h, schmidt_residual_k, BoundaryFamily};
use crate::secular::{characterize_sigma, characterize_sigma_tilde};
use crate::synthesis::{
    family_norms, fourier_coefficients_with, sample_circle, synthesize_at, FourierOptions,
    SpectralData,
};

/// Bounds on the random instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeCaps {
    pub max_n: usize,
    pub max_degree: usize,
    pub max_order: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        Self {
            max_n: 8,
            max_degree: 3,
            max_order: 512,
        }
    }
}

impl SizeCaps {
    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.max_n) {
            return Err(Error::InvalidArgument(format!("max_n = {} not in 1..=8", self.max_n)));
        }
        if self.max_degree > 3 {
            return Err(Error::InvalidArgument(format!(
                "max_degree = {} exceeds 3",
                self.max_degree
            )));
        }
        if self.max_order < 16 || self.max_order > 512 || !self.max_order.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "max_order = {} must be a power of two in 16..=512",
                self.max_order
            )));
        }
        Ok(())
    }
}

/// Outcome of one check over all its trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub trials: usize,
    /// Inputs of the worst trial, in the crate's JSON schemas.
    pub witness: Value,
}

/// Every check with its threshold and the statement it tests. The single
/// place thresholds are tuned.
pub const MANIFEST: &[(&str, f64, &str)] = &[
    ("cauchy_explicit_inverse", 1e-9, "T D(kappa^2) T^T D(tau^2) = I"),
    ("partial_fraction_a_over_b", 1e-9, "A/B = 1 - sum_k kappa_k^2 / (x - s~_k^2)"),
    ("partial_fraction_b_over_a", 1e-9, "B/A = 1 + sum_j tau_j^2 / (x - s_j^2)"),
    ("v_orthogonal", 1e-10, "V = D(tau) T D(kappa) satisfies V^T V = I"),
    ("commutator_rank_one", 1e-11, "D(s^2) T - T D(s~^2) = 1 1^T"),
    ("v_rank_one_update", 1e-10, "V^T D(s^2) V = D(s~^2) + kappa kappa^T"),
    ("weight_column_sums", 1e-10, "T^T tau^2 = 1"),
    ("contraction_bound", 1e-10, "|D(s)^-1 V D(s~)| <= 1"),
    ("complex_cauchy_invertible", 1e12, "1 / sigma_min C(z; zeta; zeta~) on disk and torus"),
    ("distinct_moduli_invertible", 1e12, "1 / sigma_min F for pairwise distinct moduli"),
    ("dual_formulas", 1e-10, "<C^-1 psi, 1> = <D(psi) h, 1>"),
    ("projection_relations", 1e-9, "u_j = tau_j^2 sum_k T_jk u~_k and u~_k = kappa_k^2 sum_j T_jk u_j"),
    ("weighted_projection_relations", 1e-9, "the same relations with |u_j|^2, |u~_k|^2 from quadrature"),
    ("family_norms", 1e-6, "|u_j|^2 = tau_j^2 and |u~_k|^2 = kappa_k^2"),
    ("sigma_tilde_secular", 1e-8, "s~_k^2 solve sum_j |u_j|^2 / (s_j^2 - x) = 1"),
    ("sigma_secular", 1e-8, "s_j^2 solve sum_k |u~_k|^2 / (x - s~_k^2) = 1"),
    ("schmidt_action_h", 1e-6, "H_u(f h_j) = s_j conj(f) psi_j h_j for f in Ran H_psi_j"),
    ("schmidt_action_k", 1e-6, "K_u(g u~_k) = s~_k conj(g) psi~_k u~_k for g in Ran H_psi~_k"),
    ("eigenspace_projection", 1e-6, "u_j and u~_k are the projections of u onto the eigenspaces"),
];

/// Checks that `results` name every manifest entry exactly once.
pub fn audit(results: &[CheckResult]) -> Result<()> {
    for (name, _, _) in MANIFEST {
        let count = results.iter().filter(|r| r.name == *name).count();
        if count != 1 {
            return Err(Error::InvalidArgument(format!("check {name} reported {count} times")));
        }
    }
    if results.len() != MANIFEST.len() {
        return Err(Error::InvalidArgument(format!(
            "{} results for {} manifest entries",
            results.len(),
            MANIFEST.len()
        )));
    }
    Ok(())
}

type Mutation<'a> = &'a (dyn Fn(&mut CauchyWeights) + Sync);

struct Trial<'a> {
    rng: ChaCha8Rng,
    caps: SizeCaps,
    mutate: Mutation<'a>,
}

impl Trial<'_> {
    fn weights(&self, spec: &InterlacedSpectrum) -> Result<CauchyWeights> {
        let mut w = cauchy::weights(spec)?;
        (self.mutate)(&mut w);
        Ok(w)
    }

    fn spectrum(&mut self) -> InterlacedSpectrum {
        SpectrumSampler::new(self.caps.max_n, 0.05).sample(&mut self.rng)
    }

    fn interior_data(&mut self) -> SpectralData {
        SpectralSampler::new(self.caps.max_n, self.caps.max_degree, true).sample(&mut self.rng)
    }

    /// Blaschke-only data whose symbol is resolved to `1e-6` by `order`
    /// Taylor coefficients.
    fn boundary_data(&mut self, max_n: usize, order: usize) -> Result<SpectralData> {
        SpectralSampler::resolved_blaschke(max_n.min(self.caps.max_n), self.caps.max_degree, 1.25, 2.0)
            .sample_resolved(&mut self.rng, order, BOUNDARY_REDRAWS)
            .map(|(data, _)| data)
    }

    fn interior_point(&mut self) -> Complex64 {
        let r = 0.99 * self.rng.random::<f64>().sqrt();
        Complex64::from_polar(r, self.rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
    }

    fn test_polynomial(&mut self) -> Vec<Complex64> {
        let degree = self.rng.random_range(0..=4);
        (0..=degree)
            .map(|_| Complex64::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0)))
            .collect()
    }
}

const BOUNDARY_REDRAWS: usize = 40;
const POINTS_PER_TRIAL: usize = 20;
const CERTIFY_SAMPLES: usize = 1000;
const TEST_FUNCTIONS: usize = 3;

type Outcome = Result<(f64, Value)>;

fn data_json(data: &SpectralData) -> Value {
    serde_json::to_value(data).unwrap_or(Value::Null)
}

fn spectrum_json(spec: &InterlacedSpectrum, w: Option<&CauchyWeights>) -> Value {
    json!({ "spectrum": spec, "weights": w })
}

fn real_diag(v: &[f64]) -> ComplexMatrix {
    ComplexMatrix::real_diagonal(v)
}

fn check_inverse(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let w = t.weights(&spec)?;
    let prod = cauchy::build_t(&spec).matmul(&cauchy::explicit_inverse(&spec, &w))?;
    let r = prod.max_abs_diff(&ComplexMatrix::identity(spec.n()));
    Ok((r, spectrum_json(&spec, Some(&w))))
}

/// Real evaluation points away from the poles: below zero, above `s_1^2`,
/// and the midpoints of consecutive squared levels.
fn evaluation_points(t: &mut Trial, spec: &InterlacedSpectrum) -> Vec<f64> {
    let mut levels: Vec<f64> = spec.s_sq().into_iter().chain(spec.s_tilde_sq()).collect();
    levels.sort_by(f64::total_cmp);
    let mut xs: Vec<f64> = levels.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    let top = levels[levels.len() - 1];
    xs.push(-t.rng.random_range(0.1..2.0));
    xs.push(top + t.rng.random_range(0.1..5.0));
    xs
}

fn partial_fraction(t: &mut Trial, a_over_b: bool) -> Outcome {
    let spec = t.spectrum();
    let w = t.weights(&spec)?;
    let mut worst = 0.0f64;
    for x in evaluation_points(t, &spec) {
        let direct = cauchy::a_over_b(&spec, x);
        let (exact, pf, terms) = if a_over_b {
            let terms: f64 = spec.s_tilde_sq().iter().zip(&w.kappa_sq).map(|(b, k)| (k / (x - b)).abs()).sum();
            (direct, cauchy::a_over_b_partial_fractions(&spec, &w, x), terms)
        } else {
            let terms: f64 = spec.s_sq().iter().zip(&w.tau_sq).map(|(a, t)| (t / (x - a)).abs()).sum();
            (1.0 / direct, cauchy::b_over_a_partial_fractions(&spec, &w, x), terms)
        };
        worst = worst.max((exact - pf).abs() / (1.0 + terms));
    }
    Ok((worst, spectrum_json(&spec, Some(&w))))
}

fn check_v_orthogonal(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let w = t.weights(&spec)?;
    let v = cauchy::build_v(&spec, &w);
    let r = v.transpose().matmul(&v)?.max_abs_diff(&ComplexMatrix::identity(spec.n()));
    Ok((r, spectrum_json(&spec, Some(&w))))
}

fn check_commutator(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let tm = cauchy::build_t(&spec);
    let lhs = real_diag(&spec.s_sq()).matmul(&tm)?.sub(&tm.matmul(&real_diag(&spec.s_tilde_sq()))?)?;
    let ones = ComplexMatrix::from_fn(spec.n(), spec.n(), |_, _| Complex64::new(1.0, 0.0));
    Ok((lhs.max_abs_diff(&ones), spectrum_json(&spec, None)))
}

fn check_v_rank_one(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let w = t.weights(&spec)?;
    let v = cauchy::build_v(&spec, &w);
    let lhs = v.transpose().matmul(&real_diag(&spec.s_sq()))?.matmul(&v)?;
    let kappa = w.kappa();
    let rhs = real_diag(&spec.s_tilde_sq())
        .add(&ComplexMatrix::from_fn(spec.n(), spec.n(), |i, j| {
            Complex64::new(kappa[i] * kappa[j], 0.0)
        }))?;
    let scale = spec.s_sq()[0].max(1.0);
    Ok((lhs.max_abs_diff(&rhs) / scale, spectrum_json(&spec, Some(&w))))
}

fn check_column_sums(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let w = t.weights(&spec)?;
    let tau: Vec<Complex64> = w.tau_sq.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let sums = cauchy::build_t(&spec).transpose().matvec(&tau)?;
    let r = sums.iter().map(|x| (x - 1.0).norm()).fold(0.0, f64::max);
    Ok((r, spectrum_json(&spec, Some(&w))))
}

fn check_contraction(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let w = t.weights(&spec)?;
    let inv_s: Vec<f64> = spec.s().iter().map(|x| 1.0 / x).collect();
    let m = real_diag(&inv_s).matmul(&cauchy::build_v(&spec, &w))?.matmul(&real_diag(spec.s_tilde()))?;
    let sigma = max_singular_value(&m)?;
    Ok(((sigma - 1.0).max(0.0), json!({ "spectrum": spec, "weights": w, "sigma_max": sigma })))
}

fn check_complex_cauchy(t: &mut Trial) -> Outcome {
    let spec = t.spectrum();
    let seed = t.rng.random::<u64>();
    let report = cauchy::certify_invertibility(&spec, CERTIFY_SAMPLES, seed)?;
    Ok((1.0 / report.min_sigma, json!({ "spectrum": spec, "certification": report })))
}

fn check_distinct_moduli(t: &mut Trial) -> Outcome {
    let n = t.rng.random_range(1..=t.caps.max_n.min(6));
    let (a, b) = distinct_moduli_pair(&mut t.rng, n, 1e-3)?;
    let f = cauchy::distinct_moduli_matrix(&a, &b)?;
    let sigma = min_singular_value(&f)?;
    let pairs = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    Ok((1.0 / sigma, json!({ "a": pairs(&a), "b": pairs(&b), "sigma_min": sigma })))
}

fn check_dual_formulas(t: &mut Trial) -> Outcome {
    let data = t.interior_data();
    let mut worst = 0.0f64;
    for _ in 0..POINTS_PER_TRIAL {
        let v = synthesize_at(&data, t.interior_point())?;
        worst = worst.max(v.dual_residual / v.u.norm().max(1.0));
    }
    Ok((worst, data_json(&data)))
}

/// `max_j |u_j - a_j sum_k T_jk u~_k|` and its dual, relative to the terms.
fn projection_mismatch(
    spec: &InterlacedSpectrum,
    u_j: &[Complex64],
    u_tilde: &[Complex64],
    a: &[f64],
    b: &[f64],
) -> f64 {
    let s = spec.s_sq();
    let st = spec.s_tilde_sq();
    let n = spec.n();
    let mut worst = 0.0f64;
    for j in 0..n {
        let sum: Complex64 = (0..n).map(|k| u_tilde[k] / (s[j] - st[k])).sum();
        worst = worst.max((u_j[j] - a[j] * sum).norm() / u_j[j].norm().max(1.0));
    }
    for k in 0..n {
        let sum: Complex64 = (0..n).map(|j| u_j[j] / (s[j] - st[k])).sum();
        worst = worst.max((u_tilde[k] - b[k] * sum).norm() / u_tilde[k].norm().max(1.0));
    }
    worst
}

fn check_projection_relations(t: &mut Trial) -> Outcome {
    let data = t.interior_data();
    let w = t.weights(data.spectrum())?;
    let mut worst = 0.0f64;
    for _ in 0..POINTS_PER_TRIAL {
        let v = synthesize_at(&data, t.interior_point())?;
        worst = worst.max(projection_mismatch(data.spectrum(), &v.u_j(), &v.u_tilde, &w.tau_sq, &w.kappa_sq));
    }
    Ok((worst, data_json(&data)))
}

fn check_weighted_projection(t: &mut Trial) -> Outcome {
    let order = t.caps.max_order;
    let data = t.boundary_data(4, order)?;
    let norms = family_norms(&data, order)?;
    let mut worst = 0.0f64;
    for _ in 0..POINTS_PER_TRIAL {
        let v = synthesize_at(&data, t.interior_point())?;
        worst = worst.max(projection_mismatch(
            data.spectrum(),
            &v.u_j(),
            &v.u_tilde,
            &norms.norm_u_j_sq,
            &norms.norm_u_tilde_k_sq,
        ));
    }
    Ok((worst, json!({ "data": data, "norms": norms })))
}

fn check_family_norms(t: &mut Trial) -> Outcome {
    let order = t.caps.max_order;
    let data = t.boundary_data(4, order)?;
    let w = t.weights(data.spectrum())?;
    let norms = family_norms(&data, order)?;
    let rel = |x: &f64, y: &f64| (x - y).abs() / y;
    let worst = norms
        .norm_u_j_sq
        .iter()
        .zip(&w.tau_sq)
        .chain(norms.norm_u_tilde_k_sq.iter().zip(&w.kappa_sq))
        .map(|(x, y)| rel(x, y))
        .fold(0.0, f64::max);
    Ok((worst, json!({ "data": data, "norms": norms, "weights": w })))
}

fn check_secular(t: &mut Trial, tilde: bool) -> Outcome {
    let order = t.caps.max_order;
    let data = t.boundary_data(4, order)?;
    let norms = family_norms(&data, order)?;
    let spec = data.spectrum();
    let (roots, expected): (Vec<f64>, Vec<f64>) = if tilde {
        let mut e = spec.s_tilde_sq();
        e.reverse();
        (characterize_sigma_tilde(&norms.norm_u_j_sq, spec.s())?, e)
    } else {
        let mut e = spec.s_sq();
        e.reverse();
        (characterize_sigma(&norms.norm_u_tilde_k_sq, spec.s_tilde())?, e)
    };
    let scale = spec.s_sq()[0].max(1.0);
    let worst = roots.iter().zip(&expected).map(|(r, e)| (r - e).abs() / scale).fold(0.0, f64::max);
    Ok((worst, json!({ "data": data, "norms": norms, "roots": roots })))
}

fn check_schmidt(t: &mut Trial, h: bool) -> Outcome {
    let order = t.caps.max_order;
    let data = t.boundary_data(4, order)?;
    let family = BoundaryFamily::sample(&data, 4 * order)?;
    let mut worst = 0.0f64;
    let mut worst_q = Vec::new();
    for level in 0..data.n() {
        for _ in 0..TEST_FUNCTIONS {
            let q = t.test_polynomial();
            let r = if h {
                schmidt_residual_h(&data, &family, level, &q)?
            } else {
                schmidt_residual_k(&data, &family, level, &q)?
            };
            if !(r <= worst) {
                worst = r;
                worst_q = q.iter().map(|c| [c.re, c.im]).collect();
            }
        }
    }
    Ok((worst, json!({ "data": data, "test_polynomial": worst_q })))
}

fn check_eigenspace_projection(t: &mut Trial) -> Outcome {
    let order = t.caps.max_order.min(256);
    let data = t.boundary_data(3, order)?;
    let series = fourier_coefficients_with(
        &data,
        order,
        FourierOptions {
            keep_section: true,
            ..FourierOptions::default()
        },
    )?;
    let hankel = build_hankel(&series.coefficients, order)?;

    // Taylor coefficients of every u_j and u~_k from the same boundary grid.
    let points = 4 * order;
    let values = sample_circle(&data, points, 1.0, series.grid_offset)?;
    let n = data.n();
    let coefficients = |f: &dyn Fn(&crate::synthesis::SymbolValue) -> Complex64| -> Vec<Complex64> {
        let samples: Vec<Complex64> = values.iter().map(f).collect();
        dft(&samples)
            .into_iter()
            .take(order)
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -(k as f64) * series.grid_offset))
            .collect()
    };
    let u_norm = norm2(&series.coefficients[..order]);
    let lambda_max = hankel.squared(Operator::H).max_abs().max(1e-300);
    let mut worst = 0.0f64;
    for (op, levels) in [(Operator::H, data.spectrum().s()), (Operator::K, data.spectrum().s_tilde())] {
        let spectrum = squared_spectrum(&hankel, op, 1e-6 * lambda_max)?;
        for (idx, level) in levels.iter().enumerate().take(n) {
            // Non-dominant levels of one operator also show up in the
            // other's spectrum, so match by value rather than by position.
            let proj = if *level > 0.0 {
                let bundle = spectrum
                    .nonzero()
                    .min_by(|a, b| (a.level - level).abs().total_cmp(&(b.level - level).abs()))
                    .filter(|b| (b.level - level).abs() <= 1e-6 * level.max(1.0))
                    .ok_or_else(|| {
                        Error::RootCountMismatch(format!("no eigenvalue cluster at level {level}"))
                    })?;
                &bundle.proj_u
            } else {
                match spectrum.kernel() {
                    Some(k) => &k.proj_u,
                    None => continue,
                }
            };
            let target = match op {
                Operator::H => coefficients(&|v| v.psi[idx] * v.h[idx]),
                Operator::K => coefficients(&|v| v.u_tilde[idx]),
            };
            let diff: Vec<Complex64> = proj.iter().zip(&target).map(|(a, b)| a - b).collect();
            worst = worst.max(norm2(&diff) / u_norm);
        }
    }
    Ok((worst, data_json(&data)))
}

fn run_check(index: usize, seed: u64, trials: usize, caps: SizeCaps, mutate: Mutation) -> CheckResult {
    let (name, threshold, _) = MANIFEST[index];
    let outcomes: Vec<(f64, Value)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((index as u64) << 32) | trial as u64);
            let mut t = Trial { rng, caps, mutate };
            let outcome = match name {
                "cauchy_explicit_inverse" => check_inverse(&mut t),
                "partial_fraction_a_over_b" => partial_fraction(&mut t, true),
                "partial_fraction_b_over_a" => partial_fraction(&mut t, false),
                "v_orthogonal" => check_v_orthogonal(&mut t),
                "commutator_rank_one" => check_commutator(&mut t),
                "v_rank_one_update" => check_v_rank_one(&mut t),
                "weight_column_sums" => check_column_sums(&mut t),
                "contraction_bound" => check_contraction(&mut t),
                "complex_cauchy_invertible" => check_complex_cauchy(&mut t),
                "distinct_moduli_invertible" => check_distinct_moduli(&mut t),
                "dual_formulas" => check_dual_formulas(&mut t),
                "projection_relations" => check_projection_relations(&mut t),
                "weighted_projection_relations" => check_weighted_projection(&mut t),
                "family_norms" => check_family_norms(&mut t),
                "sigma_tilde_secular" => check_secular(&mut t, true),
                "sigma_secular" => check_secular(&mut t, false),
                "schmidt_action_h" => check_schmidt(&mut t, true),
                "schmidt_action_k" => check_schmidt(&mut t, false),
                "eigenspace_projection" => check_eigenspace_projection(&mut t),
                other => unreachable!("check {other} has no implementation"),
            };
            let (r, w) = outcome.unwrap_or_else(|e| {
                (f64::INFINITY, json!({ "error": { "kind": e.kind(), "detail": e.to_string() } }))
            });
            // NaN is a failure, reported as infinite.
            let r = if r.is_nan() { f64::INFINITY } else { r };
            (r, json!({ "trial": trial, "input": w }))
        })
        .collect();
    let mut worst = 0;
    for (i, (r, _)) in outcomes.iter().enumerate() {
        if *r > outcomes[worst].0 {
            worst = i;
        }
    }
    let (max_residual, witness) = outcomes[worst].clone();
    CheckResult {
        name: name.to_string(),
        max_residual,
        threshold,
        passed: max_residual <= threshold,
        trials,
        witness,
    }
}

/// Runs every manifest check `n_trials` times.
pub fn run_suite(seed: u64, n_trials: usize, caps: SizeCaps) -> Result<Vec<CheckResult>> {
    run_suite_mutated(seed, n_trials, caps, &|_| {})
}

/// As [`run_suite`], with `mutate` applied to every computed set of Cauchy
/// weights. Used to confirm that the checks can fail.
pub fn run_suite_mutated(
    seed: u64,
    n_trials: usize,
    caps: SizeCaps,
    mutate: Mutation,
) -> Result<Vec<CheckResult>> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
    }
    caps.validate()?;
    let results: Vec<CheckResult> = (0..MANIFEST.len())
        .map(|i| run_check(i, seed, n_trials, caps, mutate))
        .collect();
    audit(&results)?;
    Ok(results)
}
