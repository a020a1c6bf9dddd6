//! The secular equation `sum_j w_j / (s_j^2 - x) = 1`, whose roots are the
//! squares of the K-levels given the H-levels and the weights `w_j = |u_j|^2`.

use crate::error::{Error, Result};

/// `f(0)` up to this value is treated as a root at zero (`s~_N = 0`).
pub const ZERO_ROOT_TOL: f64 = 1e-8;

const MAX_BISECTIONS: usize = 400;

fn secular(w: &[f64], s_sq: &[f64], x: f64) -> f64 {
    w.iter().zip(s_sq).map(|(w, s)| w / (s - x)).sum::<f64>() - 1.0
}

/// Root of the increasing function `f` on `(lo, hi)`, `f(lo+) < 0 < f(hi-)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-12 * mid.abs() {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Returns the `N` roots `x = s~_k^2`, ascending.
pub fn characterize_sigma_tilde(norm_u_j_sq: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    if norm_u_j_sq.len() != s.len() || s.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} levels",
            norm_u_j_sq.len(),
            s.len()
        )));
    }
    if norm_u_j_sq.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument("weights must be positive and finite".into()));
    }
    if s.windows(2).any(|p| !(p[0] > p[1])) || !(s[s.len() - 1] > 0.0) {
        return Err(Error::InvalidSpectrum("levels must be positive and strictly decreasing".into()));
    }
    let s_sq: Vec<f64> = s.iter().map(|x| x * x).collect();
    let f = |x: f64| secular(norm_u_j_sq, &s_sq, x);
    let n = s.len();

    let mut roots = Vec::with_capacity(n);
    let at_zero = f(0.0);
    if at_zero > ZERO_ROOT_TOL {
        return Err(Error::RootCountMismatch(format!(
            "sum of w_j / s_j^2 exceeds 1 by {at_zero:.3e}; no root in [0, s_N^2)"
        )));
    }
    roots.push(if at_zero >= 0.0 {
        0.0
    } else {
        bisect(f, 0.0, s_sq[n - 1])
    });
    for j in (0..n - 1).rev() {
        roots.push(bisect(f, s_sq[j + 1], s_sq[j]));
    }
    Ok(roots)
}

/// The dual equation `sum_k w_k / (x - s~_k^2) = 1` with `w_k = |u~_k|^2`:
/// returns its `N` roots `x = s_j^2`, ascending, one in each gap of the
/// `s~_k^2` and one above `s~_1^2`.
pub fn characterize_sigma(norm_u_tilde_k_sq: &[f64], s_tilde: &[f64]) -> Result<Vec<f64>> {
    if norm_u_tilde_k_sq.len() != s_tilde.len() || s_tilde.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} levels",
            norm_u_tilde_k_sq.len(),
            s_tilde.len()
        )));
    }
    if norm_u_tilde_k_sq.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument("weights must be positive and finite".into()));
    }
    if s_tilde.windows(2).any(|p| !(p[0] > p[1])) || s_tilde[s_tilde.len() - 1] < 0.0 {
        return Err(Error::InvalidSpectrum(
            "levels must be nonnegative and strictly decreasing".into(),
        ));
    }
    let t: Vec<f64> = s_tilde.iter().map(|x| x * x).collect();
    let w = norm_u_tilde_k_sq;
    // Decreasing in x between poles; negate for the increasing bisection.
    let g = |x: f64| 1.0 - w.iter().zip(&t).map(|(w, t)| w / (x - t)).sum::<f64>();
    let n = t.len();
    let mut roots = Vec::with_capacity(n);
    for k in (1..n).rev() {
        roots.push(bisect(g, t[k], t[k - 1]));
    }
    let top = t[0] + w.iter().sum::<f64>() + 1.0;
    roots.push(bisect(g, t[0], top));
    Ok(roots)
}
