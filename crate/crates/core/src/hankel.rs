//! The direct spectral map: truncated Hankel sections of a symbol, the
//! eigen-clusters of `H_u^2` and `K_u^2`, dominance of each level and
//! recovery of the inner functions as sampled values.
//!
//! `H_u f = P(u conj f)` acts on coefficient vectors as `f -> Gamma conj(f)`
//! with `Gamma = {u^(n+m)}`, so `H_u^2` is the Hermitian matrix
//! `Gamma conj(Gamma)`. `K_u = H_{S* u}` uses `{u^(n+m+1)}` on the same index
//! set.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner, max_abs, norm2, ComplexMatrix, HermitianEigen};
use crate::secular::characterize_sigma_tilde;
use crate::serde_complex::C64;
use crate::series::evaluate_series;

/// Largest radius at which truncated series are evaluated.
pub const R_MAX: f64 = 0.9;
/// Denominators below this drop the grid point.
pub const SMALL_DENOMINATOR: f64 = 1e-8;

/// Which squared operator a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operator {
    H,
    K,
}

/// `M x M` sections of the Hankel matrices of `u` and `S* u`.
#[derive(Debug, Clone)]
pub struct TruncatedHankel {
    order: usize,
    coefficients: Vec<Complex64>,
    gamma: ComplexMatrix,
    gamma_shifted: ComplexMatrix,
    zero_padded: usize,
}

/// Builds `Gamma = {u^(n+m)}` and `Gamma_K = {u^(n+m+1)}`, zero-padding
/// missing coefficients.
pub fn build_hankel(coeffs: &[Complex64], m: usize) -> Result<TruncatedHankel> {
    if m == 0 {
        return Err(Error::InvalidOrder("Hankel order must be positive".into()));
    }
    let needed = 2 * m;
    let mut c: Vec<Complex64> = coeffs.iter().take(needed).copied().collect();
    // Gamma alone needs 2M - 1 entries; the last one only feeds Gamma_K.
    let zero_padded = (2 * m - 1).saturating_sub(c.len());
    c.resize(needed, Complex64::new(0.0, 0.0));
    let gamma = ComplexMatrix::from_fn(m, m, |i, j| c[i + j]);
    let gamma_shifted = ComplexMatrix::from_fn(m, m, |i, j| c[i + j + 1]);
    Ok(TruncatedHankel {
        order: m,
        coefficients: c,
        gamma,
        gamma_shifted,
        zero_padded,
    })
}

impl TruncatedHankel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// The `2M` coefficients in use, padding included.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn gamma(&self) -> &ComplexMatrix {
        &self.gamma
    }

    pub fn gamma_shifted(&self) -> &ComplexMatrix {
        &self.gamma_shifted
    }

    pub fn zero_padded(&self) -> usize {
        self.zero_padded
    }

    /// Coefficient vector of `u` on the section, `Gamma e_0`.
    pub fn u_vector(&self) -> Vec<Complex64> {
        self.coefficients[..self.order].to_vec()
    }

    pub fn matrix(&self, op: Operator) -> &ComplexMatrix {
        match op {
            Operator::H => &self.gamma,
            Operator::K => &self.gamma_shifted,
        }
    }

    /// `G conj(G)`, the matrix of the squared operator.
    pub fn squared(&self, op: Operator) -> ComplexMatrix {
        let g = self.matrix(op);
        g.matmul(&g.conj()).expect("square sections")
    }

    /// The anti-linear action `f -> G conj(f)`.
    pub fn apply(&self, op: Operator, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let conj: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
        self.matrix(op).matvec(&conj)
    }

    /// `max |Gamma_K conj(Gamma_K) - Gamma conj(Gamma) + c c*|` over the
    /// leading `(M - band)` block.
    pub fn rank_one_residual(&self, band: usize) -> f64 {
        let h2 = self.squared(Operator::H);
        let k2 = self.squared(Operator::K);
        let c = self.u_vector();
        let size = self.order.saturating_sub(band);
        let mut worst = 0.0f64;
        for i in 0..size {
            for j in 0..size {
                let d = k2[(i, j)] - h2[(i, j)] + c[i] * c[j].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// One cluster of eigenvalues of a squared operator.
#[derive(Debug, Clone)]
pub struct EigenspaceBundle {
    /// `sqrt` of the cluster mean; exactly 0 for the numerical kernel.
    pub level: f64,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub spread: f64,
    pub is_kernel: bool,
    /// Orthonormal columns spanning the cluster.
    pub basis: ComplexMatrix,
    /// `P_s 1`.
    pub proj_one: Vec<Complex64>,
    /// `P_s u`.
    pub proj_u: Vec<Complex64>,
    /// Largest `|A v - lambda v|` over the basis.
    pub max_residual: f64,
}

/// Eigenvalues of a squared operator (descending) with its clusters.
#[derive(Debug, Clone)]
pub struct SquaredSpectrum {
    pub op: Operator,
    pub eigenvalues: Vec<f64>,
    pub cluster_tol: f64,
    /// Descending levels; the kernel, if any, comes last.
    pub bundles: Vec<EigenspaceBundle>,
}

impl SquaredSpectrum {
    pub fn kernel(&self) -> Option<&EigenspaceBundle> {
        self.bundles.last().filter(|b| b.is_kernel)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &EigenspaceBundle> {
        self.bundles.iter().filter(|b| !b.is_kernel)
    }

    pub fn rank(&self) -> usize {
        self.nonzero().map(|b| b.multiplicity).sum()
    }
}

fn project(basis: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let n = basis.rows();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..basis.cols() {
        let v = basis.column(k);
        let a = inner(x, &v);
        for (o, vi) in out.iter_mut().zip(&v) {
            *o += a * vi;
        }
    }
    out
}

/// Groups sorted eigenvalues whose consecutive gaps are at most `tol`.
fn cluster_ranges(ascending: &[f64], tol: f64) -> Result<Vec<(usize, usize)>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=ascending.len() {
        if i == ascending.len() || ascending[i] - ascending[i - 1] > tol {
            if i < ascending.len() && ascending[i] - ascending[i - 1] <= 3.0 * tol {
                return Err(Error::ClusterAmbiguity {
                    a: ascending[i - 1],
                    b: ascending[i],
                });
            }
            ranges.push((start, i));
            start = i;
        }
    }
    Ok(ranges)
}

/// Clusters an eigen-decomposition of `squared` with absolute tolerance `tol`.
pub fn cluster_spectrum(
    op: Operator,
    squared: &ComplexMatrix,
    eig: &HermitianEigen,
    u: &[Complex64],
    tol: f64,
) -> Result<SquaredSpectrum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("cluster tolerance {tol} must be positive")));
    }
    let m = eig.values.len();
    let values: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let ranges = cluster_ranges(&values, tol)?;
    let mut one = vec![Complex64::new(0.0, 0.0); m];
    if m > 0 {
        one[0] = Complex64::new(1.0, 0.0);
    }
    let mut bundles: Vec<EigenspaceBundle> = ranges
        .into_iter()
        .map(|(a, b)| {
            let slice = &values[a..b];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            let is_kernel = slice[0] <= tol;
            let basis = eig.vectors.columns(a, b - a);
            let mut max_residual = 0.0f64;
            for k in 0..basis.cols() {
                let v = basis.column(k);
                let av = squared.matvec(&v).expect("square");
                let r: Vec<Complex64> = av.iter().zip(&v).map(|(x, y)| x - y * mean).collect();
                max_residual = max_residual.max(norm2(&r));
            }
            EigenspaceBundle {
                level: if is_kernel { 0.0 } else { mean.sqrt() },
                eigenvalue: if is_kernel { 0.0 } else { mean },
                multiplicity: b - a,
                spread: slice[slice.len() - 1] - slice[0],
                is_kernel,
                proj_one: project(&basis, &one),
                proj_u: project(&basis, u),
                basis,
                max_residual,
            }
        })
        .collect();
    bundles.reverse();
    let mut eigenvalues = values;
    eigenvalues.reverse();
    Ok(SquaredSpectrum {
        op,
        eigenvalues,
        cluster_tol: tol,
        bundles,
    })
}

/// Eigen-clusters of `H_u^2` or `K_u^2` on the section; `cluster_tol` is
/// absolute.
pub fn squared_spectrum(h: &TruncatedHankel, op: Operator, cluster_tol: f64) -> Result<SquaredSpectrum> {
    let sq = h.squared(op);
    let eig = hermitian_eigen(&sq)?;
    cluster_spectrum(op, &sq, &eig, &h.u_vector(), cluster_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominance {
    H,
    K,
}

/// A level of `sigma(H^2) U sigma(K^2)` with its dominance verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: f64,
    pub dominance: Dominance,
    pub multiplicity_h: usize,
    pub multiplicity_k: usize,
    /// `|P^H_s u| / |u|`.
    pub h_weight: f64,
    /// `|P^K_s u| / |u|`.
    pub k_weight: f64,
}

/// Pairs the nonzero levels of both spectra and decides which of `P^H_s u`,
/// `P^K_s u` is nonzero. Level 0 is K-dominant when `u` has a component in
/// the numerical kernel of `K_u^2`. Levels come out descending.
pub fn classify_dominance(
    hs: &SquaredSpectrum,
    ks: &SquaredSpectrum,
    u_norm: f64,
    dom_tol: f64,
) -> Result<Vec<LevelReport>> {
    if !(u_norm > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let merge = 3.0 * hs.cluster_tol.max(ks.cluster_tol);
    let weight = |b: &EigenspaceBundle| norm2(&b.proj_u) / u_norm;
    let mut k_used = vec![false; ks.bundles.len()];
    let mut raw: Vec<(f64, usize, usize, f64, f64)> = Vec::new();
    for hb in hs.nonzero() {
        let partner = ks
            .bundles
            .iter()
            .enumerate()
            .find(|(i, kb)| !kb.is_kernel && !k_used[*i] && (kb.eigenvalue - hb.eigenvalue).abs() <= merge);
        let (mk, kw) = match partner {
            Some((i, kb)) => {
                k_used[i] = true;
                (kb.multiplicity, weight(kb))
            }
            None => (0, 0.0),
        };
        raw.push((hb.eigenvalue, hb.multiplicity, mk, weight(hb), kw));
    }
    for (i, kb) in ks.bundles.iter().enumerate() {
        if !kb.is_kernel && !k_used[i] {
            raw.push((kb.eigenvalue, 0, kb.multiplicity, 0.0, weight(kb)));
        }
    }
    raw.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut out = Vec::with_capacity(raw.len() + 1);
    for (lambda, mh, mk, hw, kw) in raw {
        let level = lambda.sqrt();
        let dominance = match (hw > dom_tol, kw > dom_tol) {
            (true, false) => Dominance::H,
            (false, true) => Dominance::K,
            _ => {
                return Err(Error::DominanceAmbiguity {
                    level,
                    h_weight: hw,
                    k_weight: kw,
                })
            }
        };
        out.push(LevelReport {
            level,
            dominance,
            multiplicity_h: mh,
            multiplicity_k: mk,
            h_weight: hw,
            k_weight: kw,
        });
    }
    if let Some(kernel) = ks.kernel() {
        let kw = weight(kernel);
        if kw > dom_tol {
            // dim (Ker K ∩ Ran H) = rank H^2 - rank K^2
            out.push(LevelReport {
                level: 0.0,
                dominance: Dominance::K,
                multiplicity_h: 0,
                multiplicity_k: hs.rank().saturating_sub(ks.rank()),
                h_weight: 0.0,
                k_weight: kw,
            });
        }
    }
    Ok(out)
}

/// Sample points `r e^{i t}` for each radius, the origin counted once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            radii: vec![0.0, 0.3, 0.6, 0.9],
            angles: 16,
        }
    }
}

impl DiskGrid {
    pub fn validate(&self) -> Result<()> {
        if self.angles == 0 || self.radii.is_empty() {
            return Err(Error::InvalidArgument("disk grid is empty".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r >= 0.0 && **r <= R_MAX)) {
            return Err(Error::InvalidArgument(format!("grid radius {r} outside [0, {R_MAX}]")));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for &r in &self.radii {
            if r == 0.0 {
                pts.push(Complex64::new(0.0, 0.0));
                continue;
            }
            for k in 0..self.angles {
                pts.push(Complex64::from_polar(r, 2.0 * PI * k as f64 / self.angles as f64));
            }
        }
        pts
    }
}

/// Recovered values of one inner function on the grid; `None` where the
/// denominator was too small.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSamples {
    pub level: f64,
    pub values: Vec<Option<C64>>,
    pub dropped: usize,
    pub max_modulus: f64,
}

impl PsiSamples {
    /// `sup |value - f(z)|` over the kept points.
    pub fn sup_error(&self, points: &[Complex64], f: impl Fn(Complex64) -> Result<Complex64>) -> Result<f64> {
        let mut worst = 0.0f64;
        for (v, z) in self.values.iter().zip(points) {
            if let Some(v) = v {
                worst = worst.max((Complex64::from(*v) - f(*z)?).norm());
            }
        }
        Ok(worst)
    }
}

fn quotient_samples(
    level: f64,
    numerator: &[Complex64],
    denominator: &[Complex64],
    grid: &DiskGrid,
) -> Result<PsiSamples> {
    grid.validate()?;
    let points = grid.points();
    let mut values = Vec::with_capacity(points.len());
    let mut dropped = 0;
    let mut max_modulus = 0.0f64;
    let mut smallest = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for z in &points {
        let den = evaluate_series(denominator, *z);
        if den.norm() < SMALL_DENOMINATOR {
            log::debug!("dropping grid point {z}: denominator {:.3e}", den.norm());
            dropped += 1;
            if den.norm() < smallest.0 {
                smallest = (den.norm(), *z);
            }
            values.push(None);
            continue;
        }
        let q = evaluate_series(numerator, *z) / den;
        max_modulus = max_modulus.max(q.norm());
        values.push(Some(C64::from(q)));
    }
    if dropped == points.len() {
        return Err(Error::SmallDenominator {
            z: smallest.1.to_string(),
            value: smallest.0,
        });
    }
    Ok(PsiSamples {
        level,
        values,
        dropped,
        max_modulus,
    })
}

/// `psi = u_j / h_j` with `u_j = P_s u` and `h_j = s P_s 1`.
pub fn extract_psi(bundle: &EigenspaceBundle, grid: &DiskGrid) -> Result<PsiSamples> {
    let h: Vec<Complex64> = bundle.proj_one.iter().map(|x| x * bundle.level).collect();
    quotient_samples(bundle.level, &bundle.proj_u, &h, grid)
}

/// `psi~ = K_u u~_k / (s~ u~_k)` with `u~_k = P~_s u`; `None` at level 0.
pub fn extract_psi_tilde(
    h: &TruncatedHankel,
    bundle: &EigenspaceBundle,
    grid: &DiskGrid,
) -> Result<Option<PsiSamples>> {
    if bundle.is_kernel || bundle.level == 0.0 {
        return Ok(None);
    }
    let num = h.apply(Operator::K, &bundle.proj_u)?;
    let den: Vec<Complex64> = bundle.proj_u.iter().map(|x| x * bundle.level).collect();
    quotient_samples(bundle.level, &num, &den, grid).map(Some)
}

/// Tolerances of the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Cluster tolerance relative to `|Gamma conj(Gamma)|`.
    pub cluster_tol: f64,
    pub dom_tol: f64,
    /// Allowed excess of `|psi|` over 1 on the grid before a warning.
    pub psi_tol: f64,
    pub grid: DiskGrid,
    /// Retry on ambiguity with doubled order, then halved tolerance.
    pub ladder: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-6,
            dom_tol: 1e-4,
            psi_tol: 1e-6,
            grid: DiskGrid::default(),
            ladder: true,
        }
    }
}

/// A level and the dimension of its eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelMultiplicity {
    pub level: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub zero_padded: usize,
    /// Absolute cluster tolerance used.
    pub cluster_tol: f64,
    pub dom_tol: f64,
    pub lambda_max: f64,
    pub u_norm: f64,
    pub kernel_h: usize,
    pub kernel_k: usize,
    pub max_eigen_residual: f64,
    /// `|Gamma_K conj(Gamma_K) - Gamma conj(Gamma) + c c*|_max`.
    pub rank_one_residual: f64,
    /// Smallest gap between consecutive squared levels.
    pub interlacing_margin: f64,
    /// `max_k |root_k - s~_k^2|` against the secular equation.
    pub secular_max_error: f64,
    pub max_psi_modulus: f64,
    pub dropped_points: usize,
    pub attempts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub order: usize,
    /// Descending.
    pub sigma_h: Vec<LevelMultiplicity>,
    /// Descending; the multiplicity of a zero level is `dim(Ker K ∩ Ran H)`.
    pub sigma_k: Vec<LevelMultiplicity>,
    /// Every level, descending, with its dominance.
    pub levels: Vec<LevelReport>,
    pub grid: DiskGrid,
    /// One entry per `sigma_h` level.
    pub psi: Vec<PsiSamples>,
    /// One entry per `sigma_k` level; `None` at level 0.
    pub psi_tilde: Vec<Option<PsiSamples>>,
    /// Roots `s~^2` of the secular equation, ascending.
    pub secular_roots: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl AnalysisReport {
    pub fn s(&self) -> Vec<f64> {
        self.sigma_h.iter().map(|l| l.level).collect()
    }

    pub fn s_tilde(&self) -> Vec<f64> {
        self.sigma_k.iter().map(|l| l.level).collect()
    }

    pub fn dominance_pattern(&self) -> Vec<Dominance> {
        self.levels.iter().map(|l| l.dominance).collect()
    }
}

fn check_interlacing(levels: &[LevelReport], tol: f64) -> Result<f64> {
    if levels.first().map(|l| l.dominance) != Some(Dominance::H) {
        return Err(Error::InterlacingViolation("the top level is not H-dominant".into()));
    }
    for (i, w) in levels.windows(2).enumerate() {
        if w[0].dominance == w[1].dominance {
            return Err(Error::InterlacingViolation(format!(
                "levels {} and {} ({} and {}) are both {:?}-dominant",
                i,
                i + 1,
                w[0].level,
                w[1].level,
                w[0].dominance
            )));
        }
    }
    if levels.len() % 2 == 1 {
        return Err(Error::InterlacingViolation(format!(
            "{} H-levels but {} K-levels",
            levels.len().div_ceil(2),
            levels.len() / 2
        )));
    }
    let margin = levels
        .windows(2)
        .map(|w| w[0].level * w[0].level - w[1].level * w[1].level)
        .fold(f64::INFINITY, f64::min);
    if levels.len() > 1 && margin <= tol {
        return Err(Error::InterlacingViolation(format!(
            "squared levels separated by only {margin:.3e}"
        )));
    }
    Ok(margin)
}

fn analyze_once(coeffs: &[Complex64], m: usize, cluster_rel: f64, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let h = build_hankel(coeffs, m)?;
    let u = h.u_vector();
    let u_norm = norm2(&u);
    if u_norm == 0.0 {
        return Err(Error::EmptySpectrum);
    }
    let (h2, k2) = rayon::join(|| h.squared(Operator::H), || h.squared(Operator::K));
    let (eh, ek) = rayon::join(|| hermitian_eigen(&h2), || hermitian_eigen(&k2));
    let (eh, ek) = (eh?, ek?);
    let lambda_max = eh.values.last().copied().unwrap_or(0.0).max(0.0);
    let tol = cluster_rel * lambda_max;
    let hs = cluster_spectrum(Operator::H, &h2, &eh, &u, tol)?;
    let ks = cluster_spectrum(Operator::K, &k2, &ek, &u, tol)?;
    let levels = classify_dominance(&hs, &ks, u_norm, opts.dom_tol)?;
    let margin = check_interlacing(&levels, tol)?;

    let find = |spec: &SquaredSpectrum, level: &LevelReport| -> Option<EigenspaceBundle> {
        if level.level == 0.0 {
            return spec.kernel().cloned();
        }
        let lambda = level.level * level.level;
        spec.nonzero()
            .find(|b| (b.eigenvalue - lambda).abs() <= 3.0 * tol)
            .cloned()
    };
    let mut h_bundles = Vec::new();
    let mut k_bundles = Vec::new();
    for l in &levels {
        match l.dominance {
            Dominance::H => h_bundles.push(find(&hs, l).expect("H-dominant level has an H cluster")),
            Dominance::K => k_bundles.push(find(&ks, l).expect("K-dominant level has a K cluster")),
        }
    }

    let psi = h_bundles
        .par_iter()
        .map(|b| extract_psi(b, &opts.grid))
        .collect::<Result<Vec<_>>>()?;
    let psi_tilde = k_bundles
        .par_iter()
        .map(|b| extract_psi_tilde(&h, b, &opts.grid))
        .collect::<Result<Vec<_>>>()?;

    let s: Vec<f64> = h_bundles.iter().map(|b| b.level).collect();
    let w: Vec<f64> = h_bundles.iter().map(|b| norm2(&b.proj_u).powi(2)).collect();
    let secular_roots = characterize_sigma_tilde(&w, &s)?;
    let secular_max_error = secular_roots
        .iter()
        .zip(k_bundles.iter().rev())
        .map(|(r, b)| (r - b.level * b.level).abs())
        .fold(0.0, f64::max);

    let max_psi_modulus = psi
        .iter()
        .chain(psi_tilde.iter().flatten())
        .map(|p| p.max_modulus)
        .fold(0.0, f64::max);
    if max_psi_modulus > 1.0 + opts.psi_tol {
        log::warn!("recovered inner function reaches modulus {max_psi_modulus:.9} on the grid");
    }
    let dropped_points = psi
        .iter()
        .chain(psi_tilde.iter().flatten())
        .map(|p| p.dropped)
        .sum();
    let rank_one_residual = {
        let c = &u;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((k2[(i, j)] - h2[(i, j)] + c[i] * c[j].conj()).norm());
            }
        }
        worst
    };
    let diagnostics = Diagnostics {
        zero_padded: h.zero_padded(),
        cluster_tol: tol,
        dom_tol: opts.dom_tol,
        lambda_max,
        u_norm,
        kernel_h: hs.kernel().map_or(0, |b| b.multiplicity),
        kernel_k: ks.kernel().map_or(0, |b| b.multiplicity),
        max_eigen_residual: hs
            .bundles
            .iter()
            .chain(&ks.bundles)
            .map(|b| b.max_residual)
            .fold(0.0, f64::max),
        rank_one_residual,
        interlacing_margin: if margin.is_finite() { margin } else { 0.0 },
        secular_max_error,
        max_psi_modulus,
        dropped_points,
        attempts: Vec::new(),
    };
    let multiplicities = |bs: &[EigenspaceBundle], levels: &[&LevelReport]| -> Vec<LevelMultiplicity> {
        bs.iter()
            .zip(levels)
            .map(|(b, l)| LevelMultiplicity {
                level: b.level,
                multiplicity: if b.is_kernel { l.multiplicity_k } else { b.multiplicity },
            })
            .collect()
    };
    let h_levels: Vec<&LevelReport> = levels.iter().filter(|l| l.dominance == Dominance::H).collect();
    let k_levels: Vec<&LevelReport> = levels.iter().filter(|l| l.dominance == Dominance::K).collect();
    Ok(AnalysisReport {
        order: m,
        sigma_h: multiplicities(&h_bundles, &h_levels),
        sigma_k: multiplicities(&k_bundles, &k_levels),
        levels,
        grid: opts.grid.clone(),
        psi,
        psi_tilde,
        secular_roots,
        diagnostics,
    })
}

fn is_ambiguity(e: &Error) -> bool {
    matches!(e, Error::ClusterAmbiguity { .. } | Error::DominanceAmbiguity { .. })
}

/// Full pipeline from Taylor coefficients. On an ambiguous clustering or
/// dominance verdict the order is doubled (when enough coefficients are
/// available), then the cluster tolerance halved, before giving up.
pub fn analyze(coeffs: &[Complex64], m: usize, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    if coeffs.is_empty() || max_abs(coeffs) == 0.0 {
        return Err(Error::EmptySpectrum);
    }
    if !(opts.cluster_tol > 0.0 && opts.dom_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    opts.grid.validate()?;
    let mut attempts = Vec::new();
    let mut order = m;
    let mut tol = opts.cluster_tol;
    let mut result = analyze_once(coeffs, order, tol, opts);
    if opts.ladder {
        let mut stage = 0;
        while let Err(e) = &result {
            if !is_ambiguity(e) || stage == 2 {
                break;
            }
            attempts.push(format!("order {order}, cluster_tol {tol:e}: {e}"));
            if stage == 0 && coeffs.len() >= 4 * order - 1 {
                order *= 2;
            } else {
                tol *= 0.5;
                stage = 1;
            }
            stage += 1;
            log::info!("retrying analysis at order {order}, cluster_tol {tol:e}");
            result = analyze_once(coeffs, order, tol, opts);
        }
    }
    result.map(|mut r| {
        r.diagnostics.attempts = attempts;
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_coeffs(len: usize) -> Vec<Complex64> {
        let mut v = vec![c(0.0, 0.0); len];
        v[1] = c(1.0, 0.0);
        v
    }

    fn rational_coeffs(len: usize) -> Vec<Complex64> {
        (0..len).map(|n| c(3.0 / 2f64.powi(n as i32 + 1), 0.0)).collect()
    }

    #[test]
    fn hankel_sections() {
        let h = build_hankel(&z_coeffs(6), 3).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(h.gamma(), &want);
        let want_k = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(h.gamma_shifted(), &want_k);
        assert_eq!(h.zero_padded(), 0);

        let k = c(0.5, -2.0);
        let h = build_hankel(&[k], 3).unwrap();
        assert_eq!(h.gamma()[(0, 0)], k);
        assert_eq!(h.gamma().max_abs(), k.norm());
        assert_eq!(h.zero_padded(), 4);
    }

    #[test]
    fn sections_are_symmetric_and_shifted() {
        let coeffs: Vec<Complex64> = (0..40).map(|n| c((n as f64).sin(), (n as f64 * 0.3).cos())).collect();
        let h = build_hankel(&coeffs, 20).unwrap();
        assert_eq!(h.gamma().transpose(), *h.gamma());
        for i in 0..20 {
            for j in 0..19 {
                assert_eq!(h.gamma_shifted()[(i, j)], h.gamma()[(i, j + 1)]);
            }
        }
    }

    #[test]
    fn spectrum_of_z() {
        let h = build_hankel(&z_coeffs(8), 4).unwrap();
        let hs = squared_spectrum(&h, Operator::H, 1e-6).unwrap();
        assert_eq!(hs.bundles.len(), 2);
        assert!((hs.bundles[0].level - 1.0).abs() < 1e-14);
        assert_eq!(hs.bundles[0].multiplicity, 2);
        assert!(hs.bundles[1].is_kernel);
        assert_eq!(hs.bundles[1].multiplicity, 2);
    }

    #[test]
    fn kernel_grows_with_the_section() {
        // 3/(2 - z): rank one, so the kernel of a section is everything else.
        let coeffs: Vec<Complex64> = (0..512).map(|n| c(1.5 / 2f64.powi(n), 0.0)).collect();
        let kernel = |m| {
            let h = build_hankel(&coeffs, m).unwrap();
            squared_spectrum(&h, Operator::H, 1e-6).unwrap().kernel().unwrap().multiplicity
        };
        let (small, big) = (kernel(64), kernel(256));
        assert_eq!(small, 63);
        assert!(big > small);
    }

    #[test]
    fn spectrum_of_constant() {
        let h = build_hankel(&[c(0.0, 2.0)], 4).unwrap();
        let hs = squared_spectrum(&h, Operator::H, 1e-6).unwrap();
        assert!((hs.bundles[0].level - 2.0).abs() < 1e-14);
        assert_eq!(hs.bundles[0].multiplicity, 1);
        assert!(hs.kernel().is_some());
    }

    #[test]
    fn dominance_of_z_and_constant() {
        for coeffs in [z_coeffs(8), vec![c(0.6, 0.8)]] {
            let h = build_hankel(&coeffs, 4).unwrap();
            let hs = squared_spectrum(&h, Operator::H, 1e-6).unwrap();
            let ks = squared_spectrum(&h, Operator::K, 1e-6).unwrap();
            let levels = classify_dominance(&hs, &ks, norm2(&h.u_vector()), 1e-4).unwrap();
            assert_eq!(levels.len(), 2);
            assert_eq!(levels[0].dominance, Dominance::H);
            assert!((levels[0].level - 1.0).abs() < 1e-14);
            assert_eq!(levels[1].dominance, Dominance::K);
            assert_eq!(levels[1].level, 0.0);
        }
    }

    #[test]
    fn psi_of_z() {
        let h = build_hankel(&z_coeffs(16), 8).unwrap();
        let hs = squared_spectrum(&h, Operator::H, 1e-6).unwrap();
        let b = &hs.bundles[0];
        assert!((b.proj_one[0] - 1.0).norm() < 1e-14);
        assert!((b.proj_u[1] - 1.0).norm() < 1e-14);
        let grid = DiskGrid::default();
        let p = extract_psi(b, &grid).unwrap();
        let err = p.sup_error(&grid.points(), Ok).unwrap();
        assert!(err < 1e-14);
        assert_eq!(p.dropped, 0);
    }

    #[test]
    fn psi_of_constant_is_its_phase() {
        let k = Complex64::from_polar(0.7, 2.1);
        let grid = DiskGrid::default();
        let r = analyze(&[k], 8, &AnalysisOptions::default()).unwrap();
        let err = r.psi[0].sup_error(&grid.points(), |_| Ok(Complex64::from_polar(1.0, 2.1))).unwrap();
        assert!(err < 1e-14);
        assert_eq!(r.psi_tilde, vec![None]);
    }

    #[test]
    fn analyze_z() {
        let r = analyze(&z_coeffs(64), 32, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.s(), vec![1.0]);
        assert_eq!(r.s_tilde(), vec![0.0]);
        assert_eq!(r.sigma_h[0].multiplicity, 2);
        assert_eq!(r.sigma_k[0].multiplicity, 1);
        assert_eq!(r.secular_roots, vec![0.0]);
        let err = r.psi[0].sup_error(&r.grid.points(), Ok).unwrap();
        assert!(err < 1e-13);
    }

    #[test]
    fn analyze_rational() {
        let r = analyze(&rational_coeffs(128), 64, &AnalysisOptions::default()).unwrap();
        assert!((r.s()[0] - 2.0).abs() < 1e-12);
        assert!((r.s_tilde()[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.dominance_pattern(), vec![Dominance::H, Dominance::K]);
        let one = |_| Ok(c(1.0, 0.0));
        assert!(r.psi[0].sup_error(&r.grid.points(), one).unwrap() < 1e-10);
        let pt = r.psi_tilde[0].as_ref().unwrap();
        assert!(pt.sup_error(&r.grid.points(), one).unwrap() < 1e-10);
        assert!((r.secular_roots[0] - 1.0).abs() < 1e-10);
        assert!(r.diagnostics.rank_one_residual < 1e-12);
    }

    #[test]
    fn zero_symbol_is_rejected() {
        assert!(matches!(analyze(&[c(0.0, 0.0); 8], 4, &AnalysisOptions::default()), Err(Error::EmptySpectrum)));
        assert!(matches!(analyze(&[], 4, &AnalysisOptions::default()), Err(Error::EmptySpectrum)));
    }

    #[test]
    fn rank_one_identity_on_section() {
        let coeffs: Vec<Complex64> = (0..64)
            .map(|n| Complex64::from_polar(0.6f64.powi(n), n as f64 * 0.7))
            .collect();
        let h = build_hankel(&coeffs, 32).unwrap();
        assert!(h.rank_one_residual(0) < 1e-12);
        // Eigenvalues of the two squares interlace.
        let a = hermitian_eigen(&h.squared(Operator::H)).unwrap().values;
        let b = hermitian_eigen(&h.squared(Operator::K)).unwrap().values;
        for i in 0..31 {
            assert!(b[i] <= a[i] + 1e-12 && a[i] <= b[i + 1] + 1e-12);
        }
    }

    #[test]
    fn close_clusters_are_ambiguous() {
        assert!(matches!(
            cluster_ranges(&[0.0, 1.0, 1.0 + 2e-6], 1e-6),
            Err(Error::ClusterAmbiguity { .. })
        ));
        assert_eq!(cluster_ranges(&[0.0, 1.0, 1.0 + 5e-7, 3.0], 1e-6).unwrap(), vec![(0, 1), (1, 3), (3, 4)]);
    }

    #[test]
    fn report_json_roundtrip() {
        let r = analyze(&rational_coeffs(64), 32, &AnalysisOptions::default()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
