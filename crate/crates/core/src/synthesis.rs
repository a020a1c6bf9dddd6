//! The inverse spectral map: from spectral data to the symbol `u`.
//!
//! At each `z` in the closed disk, with `C(z)` the complex Cauchy matrix
//! evaluated at `zeta = psi(z)`, `zeta~ = psi~(z)`:
//!
//! ```text
//! C(z)^T h(z) = 1,    C(z) u~(z) = psi(z),    u(z) = <u~(z), 1> = <D(psi) h, 1>
//! ```
//!
//! and `u_j = psi_j h_j` are the projections of `u` on the H-eigenspaces.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cauchy::{self, CauchyWeights, FactoredCauchy, InterlacedSpectrum};
use crate::error::{Error, Result};
use crate::inner::InnerFunction;
use crate::linalg::norm2;
use crate::serde_complex;
use crate::series::CircleSpectrum;

/// Schema version written into spectral-data JSON.
pub const SCHEMA_VERSION: u32 = 1;

/// Spectral data: the interlaced levels and one inner function per level.
/// When `s~_N = 0` the last `psi~` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectralData", into = "RawSpectralData")]
pub struct SpectralData {
    spectrum: InterlacedSpectrum,
    psi: Vec<InnerFunction>,
    psi_tilde: Vec<InnerFunction>,
}

#[derive(Serialize, Deserialize)]
struct RawSpectralData {
    #[serde(default = "default_version")]
    v: u32,
    s: Vec<f64>,
    s_tilde: Vec<f64>,
    psi: Vec<InnerFunction>,
    psi_tilde: Vec<InnerFunction>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

impl TryFrom<RawSpectralData> for SpectralData {
    type Error = Error;

    fn try_from(raw: RawSpectralData) -> Result<Self> {
        if raw.v != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported spectral data version {}",
                raw.v
            )));
        }
        SpectralData::new(InterlacedSpectrum::new(raw.s, raw.s_tilde)?, raw.psi, raw.psi_tilde)
    }
}

impl From<SpectralData> for RawSpectralData {
    fn from(d: SpectralData) -> Self {
        RawSpectralData {
            v: SCHEMA_VERSION,
            s: d.spectrum.s().to_vec(),
            s_tilde: d.spectrum.s_tilde().to_vec(),
            psi: d.psi,
            psi_tilde: d.psi_tilde,
        }
    }
}

impl SpectralData {
    pub fn new(
        spectrum: InterlacedSpectrum,
        psi: Vec<InnerFunction>,
        mut psi_tilde: Vec<InnerFunction>,
    ) -> Result<Self> {
        let n = spectrum.n();
        if psi.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} inner functions psi for {n} levels",
                psi.len()
            )));
        }
        let allowed_short = spectrum.has_zero_tail() && psi_tilde.len() + 1 == n;
        if psi_tilde.len() != n && !allowed_short {
            return Err(Error::InvalidArgument(format!(
                "{} inner functions psi_tilde for {n} levels",
                psi_tilde.len()
            )));
        }
        // psi~_N only ever appears multiplied by s~_N = 0.
        if spectrum.has_zero_tail() && psi_tilde.len() == n {
            psi_tilde.pop();
        }
        Ok(Self {
            spectrum,
            psi,
            psi_tilde,
        })
    }

    pub fn spectrum(&self) -> &InterlacedSpectrum {
        &self.spectrum
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn psi(&self) -> &[InnerFunction] {
        &self.psi
    }

    /// The stored `psi~`; one shorter than `n` when `s~_N = 0`.
    pub fn psi_tilde(&self) -> &[InnerFunction] {
        &self.psi_tilde
    }

    pub fn has_singular_part(&self) -> bool {
        self.psi
            .iter()
            .chain(&self.psi_tilde)
            .any(InnerFunction::has_singular_part)
    }

    fn all_inner(&self) -> impl Iterator<Item = &InnerFunction> {
        self.psi.iter().chain(&self.psi_tilde)
    }

    /// Values `psi_j(z)` and `psi~_k(z)`, the absent `psi~_N` read as 1.
    pub fn inner_values(&self, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let psi = self
            .psi
            .iter()
            .map(|f| f.evaluate(z))
            .collect::<Result<Vec<_>>>()?;
        let mut psi_tilde = self
            .psi_tilde
            .iter()
            .map(|f| f.evaluate(z))
            .collect::<Result<Vec<_>>>()?;
        psi_tilde.resize(self.n(), Complex64::new(1.0, 0.0));
        Ok((psi, psi_tilde))
    }
}

/// The symbol and its family at one point of the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolValue {
    pub z: Complex64,
    pub u: Complex64,
    pub h: Vec<Complex64>,
    pub u_tilde: Vec<Complex64>,
    pub psi: Vec<Complex64>,
    pub psi_tilde: Vec<Complex64>,
    /// `|<u~, 1> - <D(psi) h, 1>|`.
    pub dual_residual: f64,
}

impl SymbolValue {
    /// `u_j(z) = psi_j(z) h_j(z)`.
    pub fn u_j(&self) -> Vec<Complex64> {
        self.psi.iter().zip(&self.h).map(|(p, h)| p * h).collect()
    }
}

/// Evaluates `u`, `h` and `u~` at `z`.
pub fn synthesize_at(data: &SpectralData, z: Complex64) -> Result<SymbolValue> {
    let (psi, psi_tilde) = data.inner_values(z)?;
    let c = FactoredCauchy::new(&data.spectrum, z, &psi, &psi_tilde)?;
    let ones = vec![Complex64::new(1.0, 0.0); data.n()];
    let h = c.solve(&ones, true)?;
    let u_tilde = c.solve(&psi, false)?;
    let u: Complex64 = u_tilde.iter().sum();
    let via_h: Complex64 = psi.iter().zip(&h).map(|(p, h)| p * h).sum();
    Ok(SymbolValue {
        z,
        u,
        h,
        u_tilde,
        psi,
        psi_tilde,
        dual_residual: (u - via_h).norm(),
    })
}

/// Options for extracting Taylor coefficients of `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions {
    /// `TailTooLarge` when the tail exceeds `tail_tol * |u^|`.
    pub tail_tol: f64,
    /// Sampling radius; `None` picks the unit circle for Blaschke-only data
    /// and an interior circle when singular atoms are present.
    pub radius: Option<f64>,
    /// Keep `2M` coefficients instead of `M`: everything an `M x M` Hankel
    /// section and its shift read. The tail is still measured on `[M, 2M)`.
    pub keep_section: bool,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-6,
            radius: None,
            keep_section: false,
        }
    }
}

/// Truncated Taylor series of the symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    #[serde(with = "serde_complex::vec")]
    pub coefficients: Vec<Complex64>,
    /// `max |u^(n)|` over `n` in `[M, 2M)`.
    pub tail: f64,
    /// Largest estimated negative-index coefficient.
    pub negative_max: f64,
    pub radius: f64,
    pub grid_offset: f64,
    /// `max |u|` over the sampling grid: an empirical bound, not a proof.
    #[serde(default)]
    pub sup_modulus: f64,
}

/// The coefficient file written by `hst synthesize` and read by `hst analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    #[serde(default = "schema_version")]
    pub v: u32,
    pub order: usize,
    #[serde(flatten)]
    pub series: FourierSeries,
    #[serde(default)]
    pub boundary_trace: Option<String>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl CoefficientFile {
    pub fn new(order: usize, series: FourierSeries) -> Self {
        Self {
            v: SCHEMA_VERSION,
            order,
            series,
            boundary_trace: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("coefficient file: {e}")))?;
        if file.v != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "coefficient file version {} is not {SCHEMA_VERSION}",
                file.v
            )));
        }
        Ok(file)
    }
}

/// Interior radius `rho` with `rho^{2M} = 1e-3`: aliasing is damped by
/// `rho^{4M} = 1e-6` while unscaling amplifies roundoff by at most `1e3`.
fn interior_radius(m: usize) -> f64 {
    10f64.powf(-3.0 / (2.0 * m as f64))
}

/// Grid offset avoiding every atom of `data`, trying 0 then `pi / points`.
pub fn grid_offset(data: &SpectralData, points: usize) -> Result<f64> {
    let half_step = PI / points as f64;
    for offset in [0.0, half_step] {
        if data.all_inner().all(|f| f.atom_on_grid(points, offset).is_none()) {
            return Ok(offset);
        }
    }
    let angle = data
        .all_inner()
        .find_map(|f| f.atom_on_grid(points, half_step))
        .unwrap_or_default();
    Err(Error::GridHitsAtom { points, angle })
}

fn check_order(m: usize) -> Result<()> {
    if m < 8 || !m.is_power_of_two() {
        return Err(Error::InvalidOrder(format!(
            "order must be a power of two >= 8, got {m}"
        )));
    }
    Ok(())
}

/// Samples the symbol family on `points` equispaced points of `|z| = radius`.
pub fn sample_circle(
    data: &SpectralData,
    points: usize,
    radius: f64,
    offset: f64,
) -> Result<Vec<SymbolValue>> {
    (0..points)
        .into_par_iter()
        .map(|m| {
            let t = 2.0 * PI * m as f64 / points as f64 + offset;
            synthesize_at(data, Complex64::from_polar(radius, t))
        })
        .collect()
}

/// First `M` Taylor coefficients of `u` from `4M` samples.
pub fn fourier_coefficients(data: &SpectralData, m: usize) -> Result<FourierSeries> {
    fourier_coefficients_with(data, m, FourierOptions::default())
}

pub fn fourier_coefficients_with(
    data: &SpectralData,
    m: usize,
    opts: FourierOptions,
) -> Result<FourierSeries> {
    check_order(m)?;
    let points = 4 * m;
    let radius = opts.radius.unwrap_or(if data.has_singular_part() {
        interior_radius(m)
    } else {
        1.0
    });
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::InvalidArgument(format!("sampling radius {radius} not in (0, 1]")));
    }
    let offset = if radius < 1.0 { 0.0 } else { grid_offset(data, points)? };
    let values = sample_circle(data, points, radius, offset)?;
    let samples: Vec<Complex64> = values.iter().map(|v| v.u).collect();
    let spectrum = CircleSpectrum::from_samples(&samples, radius, offset);

    let coefficients = spectrum.coefficients(if opts.keep_section { 2 * m } else { m });
    let tail = (m..2 * m)
        .map(|n| spectrum.coefficient(n).norm())
        .fold(0.0, f64::max);
    let negative_max = (1..2 * m)
        .map(|n| spectrum.negative_coefficient(n).norm())
        .fold(0.0, f64::max);
    let size = norm2(&coefficients[..m]);
    if size == 0.0 {
        return Err(Error::EmptySpectrum);
    }
    let peak = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if negative_max > 1e-8 * peak {
        log::warn!(
            "negative-index coefficients reach {negative_max:.3e} (peak {peak:.3e}); sampling is aliased"
        );
    }
    if tail > opts.tail_tol * size {
        return Err(Error::TailTooLarge {
            tail,
            limit: opts.tail_tol * size,
        });
    }
    Ok(FourierSeries {
        coefficients,
        tail,
        negative_max,
        radius,
        grid_offset: offset,
        sup_modulus: samples.iter().map(|u| u.norm()).fold(0.0, f64::max),
    })
}

/// Squared `L^2` norms of `u_j` and `u~_k` on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyNorms {
    pub norm_u_j_sq: Vec<f64>,
    pub norm_u_tilde_k_sq: Vec<f64>,
}

/// Trapezoidal quadrature of `|u_j|^2` and `|u~_k|^2` on `4M` boundary points.
pub fn family_norms(data: &SpectralData, m: usize) -> Result<FamilyNorms> {
    check_order(m)?;
    let points = 4 * m;
    let offset = grid_offset(data, points)?;
    let values = sample_circle(data, points, 1.0, offset)?;
    let n = data.n();
    let mut u_sq = vec![0.0; n];
    let mut ut_sq = vec![0.0; n];
    for v in &values {
        for (acc, x) in u_sq.iter_mut().zip(v.u_j()) {
            *acc += x.norm_sqr();
        }
        for (acc, x) in ut_sq.iter_mut().zip(&v.u_tilde) {
            *acc += x.norm_sqr();
        }
    }
    let scale = 1.0 / points as f64;
    Ok(FamilyNorms {
        norm_u_j_sq: u_sq.into_iter().map(|x| x * scale).collect(),
        norm_u_tilde_k_sq: ut_sq.into_iter().map(|x| x * scale).collect(),
    })
}

/// [`family_norms`] at doubling orders from 64 until two consecutive
/// results agree to `rel_tol`. Returns the norms and the order reached.
pub fn family_norms_converged(
    data: &SpectralData,
    rel_tol: f64,
    max_order: usize,
) -> Result<(FamilyNorms, usize)> {
    check_order(max_order)?;
    let flat = |n: &FamilyNorms| -> Vec<f64> {
        n.norm_u_j_sq.iter().chain(&n.norm_u_tilde_k_sq).copied().collect()
    };
    let mut m = 64.min(max_order);
    let mut prev = family_norms(data, m)?;
    let mut change = f64::INFINITY;
    while m < max_order {
        m *= 2;
        let next = family_norms(data, m)?;
        change = flat(&prev)
            .iter()
            .zip(flat(&next))
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        prev = next;
        if change <= rel_tol {
            return Ok((prev, m));
        }
    }
    // The relative change between the last two orders stands in for the tail.
    Err(Error::TailTooLarge {
        tail: change,
        limit: rel_tol,
    })
}

/// Spectral data together with its synthesized Taylor series.
#[derive(Debug, Clone)]
pub struct SymbolFamily {
    pub data: SpectralData,
    pub weights: CauchyWeights,
    pub fourier: FourierSeries,
}

impl SymbolFamily {
    pub fn synthesize(data: SpectralData, m: usize, opts: FourierOptions) -> Result<Self> {
        let weights = cauchy::weights(data.spectrum())?;
        let fourier = fourier_coefficients_with(&data, m, opts)?;
        Ok(Self {
            data,
            weights,
            fourier,
        })
    }

    pub fn at(&self, z: Complex64) -> Result<SymbolValue> {
        synthesize_at(&self.data, z)
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.fourier.coefficients.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::SingularAtom;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(s: &[f64], st: &[f64]) -> InterlacedSpectrum {
        InterlacedSpectrum::new(s.to_vec(), st.to_vec()).unwrap()
    }

    fn identity_symbol() -> SpectralData {
        SpectralData::new(spec(&[1.0], &[0.0]), vec![InnerFunction::identity()], vec![]).unwrap()
    }

    fn rational_symbol() -> SpectralData {
        SpectralData::new(
            spec(&[2.0], &[1.0]),
            vec![InnerFunction::constant(0.0)],
            vec![InnerFunction::constant(0.0)],
        )
        .unwrap()
    }

    fn disk_points() -> Vec<Complex64> {
        vec![c(0.0, 0.0), c(0.5, 0.0), c(-0.3, 0.7), c(0.0, -0.99), c(0.6, 0.8)]
    }

    #[test]
    fn identity_symbol_is_z() {
        let d = identity_symbol();
        for z in disk_points() {
            let v = synthesize_at(&d, z).unwrap();
            assert!((v.u - z).norm() < 1e-15);
            assert!(v.dual_residual < 1e-15);
        }
    }

    #[test]
    fn scalar_closed_form() {
        let psi = InnerFunction::blaschke(0.4, vec![c(0.3, 0.2)]).unwrap();
        let pst = InnerFunction::blaschke(-1.0, vec![c(-0.5, 0.1), c(0.0, 0.6)]).unwrap();
        let d = SpectralData::new(spec(&[1.7], &[0.6]), vec![psi.clone()], vec![pst.clone()]).unwrap();
        for z in disk_points() {
            let p = psi.evaluate(z).unwrap();
            let q = pst.evaluate(z).unwrap();
            let want = (1.7 * 1.7 - 0.36) * p / (1.7 - z * 0.6 * p * q);
            let v = synthesize_at(&d, z).unwrap();
            assert!((v.u - want).norm() < 1e-13, "{} vs {}", v.u, want);
        }
    }

    #[test]
    fn constant_symbol() {
        let d = SpectralData::new(spec(&[0.8], &[0.0]), vec![InnerFunction::constant(1.2)], vec![])
            .unwrap();
        let want = Complex64::from_polar(0.8, 1.2);
        for z in disk_points() {
            assert!((synthesize_at(&d, z).unwrap().u - want).norm() < 1e-15);
        }
        let f = fourier_coefficients(&d, 8).unwrap();
        assert!((f.coefficients[0] - want).norm() < 1e-14);
        assert!(f.coefficients[1..].iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn identity_coefficients() {
        let f = fourier_coefficients(&identity_symbol(), 16).unwrap();
        for (n, x) in f.coefficients.iter().enumerate() {
            let want = if n == 1 { 1.0 } else { 0.0 };
            assert!((x - want).norm() < 1e-12);
        }
    }

    #[test]
    fn rational_coefficients_are_geometric() {
        // u = 3/(2 - z), u^(n) = 3 / 2^{n+1}
        let f = fourier_coefficients(&rational_symbol(), 64).unwrap();
        for (n, x) in f.coefficients.iter().enumerate() {
            let want = 3.0 / 2f64.powi(n as i32 + 1);
            assert!((x - want).norm() < 1e-13, "n={n}");
        }
        assert!(f.negative_max < 1e-12);
        // |u| peaks at 3 on z = 1, just off the half-step grid.
        assert!(f.sup_modulus > 2.99 && f.sup_modulus <= 3.0 + 1e-12);
    }

    #[test]
    fn section_keeps_twice_the_order() {
        let opts = FourierOptions {
            keep_section: true,
            ..Default::default()
        };
        let f = fourier_coefficients_with(&rational_symbol(), 32, opts).unwrap();
        assert_eq!(f.coefficients.len(), 64);
        assert!((f.coefficients[63] - 3.0 / 2f64.powi(64)).norm() < 1e-15);
        assert_eq!(f.tail, f.coefficients[32].norm());
    }

    #[test]
    fn tail_too_large_for_small_order() {
        let d = SpectralData::new(
            spec(&[1.0], &[0.95]),
            vec![InnerFunction::constant(0.0)],
            vec![InnerFunction::constant(0.0)],
        )
        .unwrap();
        assert!(matches!(fourier_coefficients(&d, 8), Err(Error::TailTooLarge { .. })));
        assert!(matches!(fourier_coefficients(&d, 12), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn norms_match_weights() {
        let f = family_norms(&identity_symbol(), 8).unwrap();
        assert!((f.norm_u_j_sq[0] - 1.0).abs() < 1e-12);
        let f = family_norms(&rational_symbol(), 64).unwrap();
        assert!((f.norm_u_tilde_k_sq[0] - 3.0).abs() < 1e-12);
        assert!((f.norm_u_j_sq[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn norms_scale_quadratically() {
        let psi = vec![
            InnerFunction::blaschke(0.3, vec![c(0.2, 0.1)]).unwrap(),
            InnerFunction::constant(1.0),
        ];
        let pst = vec![InnerFunction::constant(0.5), InnerFunction::identity()];
        let base = spec(&[2.0, 1.0], &[1.5, 0.4]);
        let a = SpectralData::new(base.clone(), psi.clone(), pst.clone()).unwrap();
        let b = SpectralData::new(base.scaled(2.0).unwrap(), psi, pst).unwrap();
        let na = family_norms(&a, 128).unwrap();
        let nb = family_norms(&b, 128).unwrap();
        for (x, y) in na.norm_u_j_sq.iter().zip(&nb.norm_u_j_sq) {
            assert!((4.0 * x - y).abs() < 1e-9 * y);
        }
        for (x, y) in na.norm_u_tilde_k_sq.iter().zip(&nb.norm_u_tilde_k_sq) {
            assert!((4.0 * x - y).abs() < 1e-9 * y);
        }
    }

    #[test]
    fn converged_norms_of_the_rational_example() {
        let d = rational_symbol();
        let (n, m) = family_norms_converged(&d, 1e-13, 4096).unwrap();
        assert!((n.norm_u_tilde_k_sq[0] - 3.0).abs() < 1e-12);
        assert!(m <= 256);
        assert!(family_norms_converged(&d, 1e-13, 12).is_err());
    }

    #[test]
    fn coefficient_file_roundtrip() {
        let series = fourier_coefficients(&rational_symbol(), 32).unwrap();
        let mut file = CoefficientFile::new(32, series);
        file.boundary_trace = Some("trace.csv".into());
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(CoefficientFile::from_json(&text).unwrap(), file);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["v"], 1);
        assert!(v["coefficients"][0]["re"].is_f64());
        let bumped = text.replacen("\"v\":1", "\"v\":2", 1);
        assert!(CoefficientFile::from_json(&bumped).is_err());
    }

    #[test]
    fn atoms_avoid_the_grid() {
        let atom = SingularAtom { angle: 0.0, mass: 1.0 };
        let psi = InnerFunction::new(0.0, vec![], vec![atom]).unwrap();
        let d = SpectralData::new(spec(&[1.0], &[0.0]), vec![psi], vec![]).unwrap();
        // The unrotated grid contains z = 1.
        assert_eq!(grid_offset(&d, 32).unwrap(), PI / 32.0);
        assert!(family_norms(&d, 8).is_ok());
        let f = fourier_coefficients_with(&d, 64, FourierOptions { tail_tol: f64::INFINITY, ..Default::default() })
            .unwrap();
        assert!(f.radius < 1.0);
        // u = psi = exp(-(1+z)/(1-z)); aliasing is damped only by rho^{4M} = 1e-6
        let e = (-1.0f64).exp();
        assert!((f.coefficients[0] - c(e, 0.0)).norm() < 1e-6);
        assert!((f.coefficients[1] + c(2.0 * e, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn psi_tilde_length_rules() {
        let s = spec(&[1.0], &[0.0]);
        let one = InnerFunction::constant(0.0);
        assert!(SpectralData::new(s.clone(), vec![one.clone()], vec![]).is_ok());
        let full = SpectralData::new(s.clone(), vec![one.clone()], vec![one.clone()]).unwrap();
        assert!(full.psi_tilde().is_empty());
        let s2 = spec(&[1.0], &[0.5]);
        assert!(SpectralData::new(s2, vec![one.clone()], vec![]).is_err());
        assert!(SpectralData::new(s, vec![], vec![]).is_err());
    }

    #[test]
    fn json_roundtrip_and_version() {
        let d = SpectralData::new(
            spec(&[2.0, 1.0], &[1.5, 0.0]),
            vec![InnerFunction::identity(), InnerFunction::constant(0.3)],
            vec![InnerFunction::blaschke(0.0, vec![c(0.1, 0.2)]).unwrap()],
        )
        .unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"v\":1"));
        let back: SpectralData = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let bad = text.replace("\"v\":1", "\"v\":2");
        assert!(serde_json::from_str::<SpectralData>(&bad).is_err());
    }
}
