//! Coefficient-space checks of how `H_u` and `K_u` act on the family
//! `h_j`, `u~_k`:
//!
//! ```text
//! H_u(f h_j)  = s_j  conj(f) psi_j  h_j      for f in Ran H_{psi_j}
//! K_u(g u~_k) = s~_k conj(g) psi~_k u~_k     for g in Ran H_{psi~_k}
//! ```
//!
//! with `K_u v = P(conj(z) u conj(v))` and `K_u u~_N = 0` when `s~_N = 0`.
//! Everything is sampled on one boundary grid and compared after a DFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dft, inverse_dft, norm2};
use crate::synthesis::{sample_circle, SpectralData, SymbolValue};

/// The symbol family sampled on `points` boundary points.
#[derive(Debug, Clone)]
pub struct BoundaryFamily {
    pub points: usize,
    pub offset: f64,
    pub values: Vec<SymbolValue>,
}

impl BoundaryFamily {
    /// Blaschke-only data: the boundary grid then never meets a singularity.
    pub fn sample(data: &SpectralData, points: usize) -> Result<Self> {
        if data.has_singular_part() {
            return Err(Error::InvalidArgument(
                "boundary Schmidt checks need Blaschke-only spectral data".into(),
            ));
        }
        if points < 16 || points % 2 != 0 {
            return Err(Error::InvalidArgument(format!("{points} boundary points is too few")));
        }
        let offset = PI / points as f64;
        Ok(Self {
            points,
            offset,
            values: sample_circle(data, points, 1.0, offset)?,
        })
    }

    fn grid(&self, m: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * m as f64 / self.points as f64 + self.offset)
    }

    /// Taylor coefficients `0..points/2` of the sampled function `f`.
    fn coefficients(&self, samples: &[Complex64]) -> Vec<Complex64> {
        dft(samples)
            .into_iter()
            .take(self.points / 2)
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * self.offset))
            .collect()
    }

    /// Boundary values of `sum_n c_n z^n`.
    fn evaluate(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut padded = vec![Complex64::new(0.0, 0.0); self.points];
        for (n, c) in coeffs.iter().enumerate().take(self.points) {
            padded[n] = c * Complex64::from_polar(1.0, n as f64 * self.offset);
        }
        inverse_dft(&padded)
    }

    /// Samples of `H_theta q = P(theta conj(q))` for a polynomial `q`, with
    /// `theta` given by its boundary samples.
    pub fn hankel_range_element(&self, theta: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
        let t = self.coefficients(theta);
        let half = self.points / 2;
        let f: Vec<Complex64> = (0..half)
            .map(|m| {
                q.iter()
                    .enumerate()
                    .filter(|(n, _)| n + m < half)
                    .map(|(n, qn)| t[n + m] * qn.conj())
                    .sum()
            })
            .collect();
        self.evaluate(&f)
    }
}

/// `|P(lhs) - rhs| / |P(lhs)|` in coefficient space, counting any
/// negative-frequency content of `rhs` as error.
fn projected_mismatch(lhs: &[Complex64], rhs: &[Complex64], scale: f64) -> f64 {
    let a = dft(lhs);
    let b = dft(rhs);
    let half = a.len() / 2;
    let mut err = 0.0;
    for n in 0..a.len() {
        let d = if n < half { a[n] - b[n] } else { b[n] };
        err += d.norm_sqr();
    }
    err.sqrt() / scale
}

fn analytic_norm(samples: &[Complex64]) -> f64 {
    let c = dft(samples);
    norm2(&c[..c.len() / 2])
}

/// Relative residual of `H_u(f h_j) = s_j conj(f) psi_j h_j` for
/// `f = H_{psi_j} q`.
pub fn schmidt_residual_h(
    data: &SpectralData,
    family: &BoundaryFamily,
    j: usize,
    q: &[Complex64],
) -> Result<f64> {
    let s = data.spectrum().s()[j];
    let psi: Vec<Complex64> = family.values.iter().map(|v| v.psi[j]).collect();
    let f = family.hankel_range_element(&psi, q);
    let mut lhs = Vec::with_capacity(family.points);
    let mut rhs = Vec::with_capacity(family.points);
    for (v, fz) in family.values.iter().zip(&f) {
        let h = v.h[j];
        lhs.push(v.u * (fz * h).conj());
        rhs.push(s * fz.conj() * v.psi[j] * h);
    }
    let scale = analytic_norm(&lhs);
    if scale == 0.0 {
        return Err(Error::InvalidArgument("test function vanishes".into()));
    }
    Ok(projected_mismatch(&lhs, &rhs, scale))
}

/// Relative residual of `K_u(g u~_k) = s~_k conj(g) psi~_k u~_k` for
/// `g = H_{psi~_k} q`; at `s~_N = 0`, `|K_u u~_N| / |u|`.
pub fn schmidt_residual_k(
    data: &SpectralData,
    family: &BoundaryFamily,
    k: usize,
    q: &[Complex64],
) -> Result<f64> {
    let st = data.spectrum().s_tilde()[k];
    let zero_level = st == 0.0;
    let g = if zero_level {
        vec![Complex64::new(1.0, 0.0); family.points]
    } else {
        let psi: Vec<Complex64> = family.values.iter().map(|v| v.psi_tilde[k]).collect();
        family.hankel_range_element(&psi, q)
    };
    let mut lhs = Vec::with_capacity(family.points);
    let mut rhs = Vec::with_capacity(family.points);
    for (m, (v, gz)) in family.values.iter().zip(&g).enumerate() {
        let ut = v.u_tilde[k];
        lhs.push(family.grid(m).conj() * v.u * (gz * ut).conj());
        rhs.push(st * gz.conj() * v.psi_tilde[k] * ut);
    }
    let scale = if zero_level {
        let u: Vec<Complex64> = family.values.iter().map(|v| v.u).collect();
        analytic_norm(&u)
    } else {
        analytic_norm(&lhs)
    };
    if scale == 0.0 {
        return Err(Error::InvalidArgument("test function vanishes".into()));
    }
    Ok(projected_mismatch(&lhs, &rhs, scale))
}
