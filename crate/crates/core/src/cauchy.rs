//! Cauchy matrices built from an interlaced spectrum.
//!
//! With `a_j = s_j^2` and `b_k = s~_k^2`, the classical Cauchy matrix
//! `T_{jk} = 1/(a_j - b_k)` has the explicit inverse
//! `T^{-1} = D(kappa^2) T^T D(tau^2)`, the rescaling `V = D(tau) T D(kappa)` is
//! orthogonal, and the complex Cauchy matrix
//!
//! ```text
//! C(z; zeta; zeta~)_{jk} = (s_j - z s~_k zeta_j zeta~_k) / (s_j^2 - s~_k^2)
//! ```
//!
//! is invertible whenever `z`, `zeta_j`, `zeta~_k` lie in the closed unit disk.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_singular_value, ComplexMatrix, Lu};
use crate::serde_complex;

/// Minimum gap between consecutive entries of `s_1 > s~_1 > s_2 > ...`.
pub const SPECTRUM_MARGIN: f64 = 1e-9;
/// Moduli above `1 + DISK_TOL` are outside the closed disk.
pub const DISK_TOL: f64 = 1e-12;
/// `sigma_min` at or below this value fails certification.
pub const CERTIFY_FLOOR: f64 = 1e-12;
/// Weights switch to log-space products above this order.
const LOG_SPACE_ABOVE: usize = 8;

/// Two interlaced families `s_1 > s~_1 > s_2 > ... > s_N > s~_N >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct InterlacedSpectrum {
    s: Vec<f64>,
    s_tilde: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum {
    s: Vec<f64>,
    s_tilde: Vec<f64>,
}

impl TryFrom<RawSpectrum> for InterlacedSpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        InterlacedSpectrum::new(raw.s, raw.s_tilde)
    }
}

impl From<InterlacedSpectrum> for RawSpectrum {
    fn from(spec: InterlacedSpectrum) -> Self {
        RawSpectrum {
            s: spec.s,
            s_tilde: spec.s_tilde,
        }
    }
}

impl InterlacedSpectrum {
    pub fn new(s: Vec<f64>, s_tilde: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidSpectrum("at least one level is required".into()));
        }
        if s.len() != s_tilde.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} values of s but {} values of s_tilde",
                s.len(),
                s_tilde.len()
            )));
        }
        if s.iter().chain(&s_tilde).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum("values must be finite".into()));
        }
        let last = *s_tilde.last().unwrap();
        if last < 0.0 {
            return Err(Error::InvalidSpectrum(format!("s_tilde_N = {last} is negative")));
        }
        let merged: Vec<f64> = s.iter().zip(&s_tilde).flat_map(|(a, b)| [*a, *b]).collect();
        for (i, w) in merged.windows(2).enumerate() {
            if w[0] - w[1] < SPECTRUM_MARGIN {
                return Err(Error::InvalidSpectrum(format!(
                    "interlacing fails between positions {} and {} ({} vs {})",
                    i,
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(Self { s, s_tilde })
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn s_tilde(&self) -> &[f64] {
        &self.s_tilde
    }

    pub fn s_sq(&self) -> Vec<f64> {
        self.s.iter().map(|x| x * x).collect()
    }

    pub fn s_tilde_sq(&self) -> Vec<f64> {
        self.s_tilde.iter().map(|x| x * x).collect()
    }

    /// True when `s~_N = 0`.
    pub fn has_zero_tail(&self) -> bool {
        *self.s_tilde.last().unwrap() == 0.0
    }

    /// Multiplies every level by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.s.iter().map(|x| x * factor).collect(),
            self.s_tilde.iter().map(|x| x * factor).collect(),
        )
    }
}

/// The positive weights `tau_j^2`, `kappa_k^2` of the explicit inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyWeights {
    pub tau_sq: Vec<f64>,
    pub kappa_sq: Vec<f64>,
}

impl CauchyWeights {
    pub fn tau(&self) -> Vec<f64> {
        self.tau_sq.iter().map(|x| x.sqrt()).collect()
    }

    pub fn kappa(&self) -> Vec<f64> {
        self.kappa_sq.iter().map(|x| x.sqrt()).collect()
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn reals(v: &[f64]) -> Vec<Complex64> {
    v.iter().copied().map(real).collect()
}

/// `T_{jk} = 1 / (s_j^2 - s~_k^2)`.
pub fn build_t(spec: &InterlacedSpectrum) -> ComplexMatrix {
    let a = spec.s_sq();
    let b = spec.s_tilde_sq();
    ComplexMatrix::from_fn(spec.n(), spec.n(), |j, k| real(1.0 / (a[j] - b[k])))
}

/// Ratio of products `prod num / prod den`, directly or in log-space.
fn product_ratio(num: &[f64], den: &[f64], log_space: bool, what: &str) -> Result<f64> {
    let value = if log_space {
        let mut sign = 1.0;
        let mut log = 0.0;
        for &x in num {
            sign *= x.signum();
            log += x.abs().ln();
        }
        for &x in den {
            sign *= x.signum();
            log -= x.abs().ln();
        }
        sign * log.exp()
    } else {
        let p: f64 = num.iter().product();
        let q: f64 = den.iter().product();
        if p.abs() < 1e-300 || q.abs() < 1e-300 || !p.is_finite() || !q.is_finite() {
            return Err(Error::DegenerateSpectrum(format!(
                "products for {what} leave the floating-point range"
            )));
        }
        p / q
    };
    if !(value.abs() >= 1e-300) || !value.is_finite() {
        return Err(Error::DegenerateSpectrum(format!(
            "{what} = {value:e} leaves the floating-point range"
        )));
    }
    if value <= 0.0 {
        return Err(Error::DegenerateSpectrum(format!("{what} = {value:e} is not positive")));
    }
    Ok(value)
}

/// `tau_j^2 = prod_k (a_j - b_k) / prod_{i != j} (a_j - a_i)` and
/// `kappa_k^2 = prod_j (a_j - b_k) / prod_{l != k} (b_l - b_k)`.
pub fn weights(spec: &InterlacedSpectrum) -> Result<CauchyWeights> {
    let a = spec.s_sq();
    let b = spec.s_tilde_sq();
    let n = spec.n();
    let log_space = n > LOG_SPACE_ABOVE;
    let mut tau_sq = Vec::with_capacity(n);
    let mut kappa_sq = Vec::with_capacity(n);
    for j in 0..n {
        let num: Vec<f64> = b.iter().map(|bk| a[j] - bk).collect();
        let den: Vec<f64> = (0..n).filter(|&i| i != j).map(|i| a[j] - a[i]).collect();
        tau_sq.push(product_ratio(&num, &den, log_space, &format!("tau_{}^2", j + 1))?);
    }
    for k in 0..n {
        let num: Vec<f64> = a.iter().map(|aj| aj - b[k]).collect();
        let den: Vec<f64> = (0..n).filter(|&l| l != k).map(|l| b[l] - b[k]).collect();
        kappa_sq.push(product_ratio(&num, &den, log_space, &format!("kappa_{}^2", k + 1))?);
    }
    Ok(CauchyWeights { tau_sq, kappa_sq })
}

/// `x = D(kappa^2) T^T D(tau^2) y`, the solution of `T x = y`, in `O(N^2)`.
pub fn apply_explicit_inverse(
    spec: &InterlacedSpectrum,
    weights: &CauchyWeights,
    y: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = spec.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for order {n}",
            y.len()
        )));
    }
    let a = spec.s_sq();
    let b = spec.s_tilde_sq();
    Ok((0..n)
        .map(|k| {
            let acc: Complex64 = (0..n).map(|j| y[j] * (weights.tau_sq[j] / (a[j] - b[k]))).sum();
            acc * weights.kappa_sq[k]
        })
        .collect())
}

/// The explicit inverse as a matrix.
pub fn explicit_inverse(spec: &InterlacedSpectrum, weights: &CauchyWeights) -> ComplexMatrix {
    build_t(spec)
        .transpose()
        .scale_rows(&reals(&weights.kappa_sq))
        .scale_cols(&reals(&weights.tau_sq))
}

/// `V = D(tau) T D(kappa)`, real orthogonal.
pub fn build_v(spec: &InterlacedSpectrum, weights: &CauchyWeights) -> ComplexMatrix {
    build_t(spec)
        .scale_rows(&reals(&weights.tau()))
        .scale_cols(&reals(&weights.kappa()))
}

fn check_disk(name: &str, z: Complex64) -> Result<()> {
    let modulus = z.norm();
    if !(modulus <= 1.0 + DISK_TOL) {
        return Err(Error::OutOfDisk {
            name: name.to_string(),
            modulus,
        });
    }
    Ok(())
}

fn check_parameters(
    spec: &InterlacedSpectrum,
    z: Complex64,
    zeta: &[Complex64],
    zeta_tilde: &[Complex64],
) -> Result<()> {
    let n = spec.n();
    if zeta.len() != n || zeta_tilde.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "order {n} needs {n} values of zeta and zeta_tilde, got {} and {}",
            zeta.len(),
            zeta_tilde.len()
        )));
    }
    check_disk("z", z)?;
    for (j, v) in zeta.iter().enumerate() {
        check_disk(&format!("zeta_{}", j + 1), *v)?;
    }
    for (k, v) in zeta_tilde.iter().enumerate() {
        check_disk(&format!("zeta_tilde_{}", k + 1), *v)?;
    }
    Ok(())
}

/// The complex Cauchy matrix `C(z; zeta; zeta~)`.
pub fn build_c(
    spec: &InterlacedSpectrum,
    z: Complex64,
    zeta: &[Complex64],
    zeta_tilde: &[Complex64],
) -> Result<ComplexMatrix> {
    check_parameters(spec, z, zeta, zeta_tilde)?;
    Ok(assemble_c(spec, z, zeta, zeta_tilde))
}

fn assemble_c(
    spec: &InterlacedSpectrum,
    z: Complex64,
    zeta: &[Complex64],
    zeta_tilde: &[Complex64],
) -> ComplexMatrix {
    let s = spec.s();
    let st = spec.s_tilde();
    ComplexMatrix::from_fn(spec.n(), spec.n(), |j, k| {
        (s[j] - z * st[k] * zeta[j] * zeta_tilde[k]) / (s[j] * s[j] - st[k] * st[k])
    })
}

/// A factored complex Cauchy matrix, ready for plain and transposed solves.
#[derive(Debug, Clone)]
pub struct FactoredCauchy {
    matrix: ComplexMatrix,
    lu: Lu,
}

impl FactoredCauchy {
    pub fn new(
        spec: &InterlacedSpectrum,
        z: Complex64,
        zeta: &[Complex64],
        zeta_tilde: &[Complex64],
    ) -> Result<Self> {
        let matrix = build_c(spec, z, zeta, zeta_tilde)?;
        let lu = Lu::factor(&matrix).map_err(|e| match e {
            Error::SingularMatrix { pivot, .. } => Error::NumericalBreakdown(format!(
                "pivot {pivot:.3e} collapsed while factoring the complex Cauchy matrix at z = {z}"
            )),
            other => other,
        })?;
        Ok(Self { matrix, lu })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Solves `C x = rhs`, or `C^T x = rhs` when `transposed`.
    pub fn solve(&self, rhs: &[Complex64], transposed: bool) -> Result<Vec<Complex64>> {
        let (x, back) = if transposed {
            let x = self.lu.solve_transposed(rhs)?;
            let back = self.matrix.transpose().matvec(&x)?;
            (x, back)
        } else {
            let x = self.lu.solve(rhs)?;
            let back = self.matrix.matvec(&x)?;
            (x, back)
        };
        let scale = crate::linalg::norm2(rhs);
        let residual = crate::linalg::norm2(
            &back.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>(),
        );
        if !(residual <= 1e-9 * scale.max(f64::MIN_POSITIVE)) && residual > 0.0 {
            return Err(Error::NumericalBreakdown(format!(
                "solve residual {residual:.3e} against right-hand side norm {scale:.3e}"
            )));
        }
        Ok(x)
    }
}

/// Solves `C x = rhs` (or `C^T x = rhs`).
pub fn solve_c(
    spec: &InterlacedSpectrum,
    z: Complex64,
    zeta: &[Complex64],
    zeta_tilde: &[Complex64],
    rhs: &[Complex64],
    transposed: bool,
) -> Result<Vec<Complex64>> {
    FactoredCauchy::new(spec, z, zeta, zeta_tilde)?.solve(rhs, transposed)
}

/// One parameter point `(z, zeta, zeta~)` drawn by the certifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub index: usize,
    /// True when every parameter was drawn from the unit circle.
    pub on_torus: bool,
    #[serde(with = "serde_complex::scalar")]
    pub z: Complex64,
    #[serde(with = "serde_complex::vec")]
    pub zeta: Vec<Complex64>,
    #[serde(with = "serde_complex::vec")]
    pub zeta_tilde: Vec<Complex64>,
}

/// Empirical minimum of `sigma_min(C)` over the sampled parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub n: usize,
    pub samples: usize,
    pub min_sigma: f64,
    pub worst_point: ParameterPoint,
}

const CHUNK: usize = 512;

fn draw_point<R: Rng>(rng: &mut R, n: usize, index: usize) -> ParameterPoint {
    // Even samples on the torus, odd samples in the solid polydisk.
    let on_torus = index % 2 == 0;
    let draw = |rng: &mut R| {
        let r = if on_torus { 1.0 } else { rng.random::<f64>().sqrt() };
        Complex64::from_polar(r, rng.random_range(-PI..PI))
    };
    let z = draw(rng);
    let zeta = (0..n).map(|_| draw(rng)).collect();
    let zeta_tilde = (0..n).map(|_| draw(rng)).collect();
    ParameterPoint {
        index,
        on_torus,
        z,
        zeta,
        zeta_tilde,
    }
}

/// Samples `(z, zeta, zeta~)` from the torus and the closed polydisk and
/// reports the smallest `sigma_min(C)` seen.
///
/// Samples are split into fixed chunks, each with its own ChaCha stream, so
/// the result is independent of the thread count.
pub fn certify_invertibility(
    spec: &InterlacedSpectrum,
    sample_count: usize,
    seed: u64,
) -> Result<CertificationReport> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1".into()));
    }
    let n = spec.n();
    let chunks = sample_count.div_ceil(CHUNK);
    let per_chunk: Vec<Result<(f64, ParameterPoint)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut best: Option<(f64, ParameterPoint)> = None;
            for index in c * CHUNK..((c + 1) * CHUNK).min(sample_count) {
                let p = draw_point(&mut rng, n, index);
                let c_mat = assemble_c(spec, p.z, &p.zeta, &p.zeta_tilde);
                let sigma = min_singular_value(&c_mat)?;
                if sigma <= CERTIFY_FLOOR {
                    return Err(Error::CertificationFailure { sigma, sample: index });
                }
                if best.as_ref().is_none_or(|(b, _)| sigma < *b) {
                    best = Some((sigma, p));
                }
            }
            Ok(best.expect("chunk is nonempty"))
        })
        .collect();
    let mut best: Option<(f64, ParameterPoint)> = None;
    for r in per_chunk {
        let (sigma, p) = r?;
        if best.as_ref().is_none_or(|(b, _)| sigma < *b) {
            best = Some((sigma, p));
        }
    }
    let (min_sigma, worst_point) = best.expect("at least one sample");
    Ok(CertificationReport {
        n,
        samples: sample_count,
        min_sigma,
        worst_point,
    })
}

/// `F_{jk} = (a_j - b_k) / (|a_j|^2 - |b_k|^2)` for complex `a`, `b` whose
/// `2N` moduli are pairwise distinct.
pub fn distinct_moduli_matrix(a: &[Complex64], b: &[Complex64]) -> Result<ComplexMatrix> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "need equal nonzero lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut moduli: Vec<f64> = a.iter().chain(b).map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    if moduli.windows(2).any(|w| w[1] - w[0] <= 0.0) {
        return Err(Error::InvalidArgument("moduli must be pairwise distinct".into()));
    }
    let n = a.len();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        (a[j] - b[k]) / (a[j].norm_sqr() - b[k].norm_sqr())
    }))
}

/// `A(x)/B(x)` with `A(x) = prod (x - s_i^2)`, `B(x) = prod (x - s~_l^2)`,
/// evaluated as a product of ratios.
pub fn a_over_b(spec: &InterlacedSpectrum, x: f64) -> f64 {
    spec.s_sq()
        .iter()
        .zip(spec.s_tilde_sq())
        .map(|(a, b)| (x - a) / (x - b))
        .product()
}

/// Partial-fraction form `1 - sum_k kappa_k^2 / (x - s~_k^2)` of `A/B`.
pub fn a_over_b_partial_fractions(spec: &InterlacedSpectrum, w: &CauchyWeights, x: f64) -> f64 {
    1.0 - spec
        .s_tilde_sq()
        .iter()
        .zip(&w.kappa_sq)
        .map(|(b, k)| k / (x - b))
        .sum::<f64>()
}

/// Partial-fraction form `1 + sum_j tau_j^2 / (x - s_j^2)` of `B/A`.
pub fn b_over_a_partial_fractions(spec: &InterlacedSpectrum, w: &CauchyWeights, x: f64) -> f64 {
    1.0 + spec
        .s_sq()
        .iter()
        .zip(&w.tau_sq)
        .map(|(a, t)| t / (x - a))
        .sum::<f64>()
}
