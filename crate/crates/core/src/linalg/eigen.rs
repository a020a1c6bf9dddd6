use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: ComplexMatrix,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation removes the phase of the pivot entry with a diagonal unitary
/// and then applies the real symmetric Jacobi rotation, so the accumulated
/// eigenvector matrix stays unitary to working precision.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let scale = a.max_abs();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            asym = asym.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { asymmetry: asym });
    }

    // Work on a symmetrized copy in a flat buffer.
    let mut m: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            m[i * n + j] = v;
            m[j * n + i] = v.conj();
        }
    }
    let mut v: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let frob = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 || n < 2 {
        return Ok(sorted(n, &m, v));
    }
    let stop = 1e-15 * frob;
    let skip = 1e-18 * frob;

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(n, &m);
        if off <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                rotate(n, &mut m, &mut v, p, q, apq, r);
            }
        }
    }
    Ok(sorted(n, &m, v))
}

fn off_diagonal_norm(n: usize, m: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    n: usize,
    m: &mut [Complex64],
    v: &mut [Complex64],
    p: usize,
    q: usize,
    apq: Complex64,
    r: f64,
) {
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let phase = apq / r; // e^{i phi}
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_c = phase.conj();

    // Unitary G acting on columns p, q:
    //   G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let g_qp = -s * ph_c;
    let g_qq = c * ph_c;

    // A <- A G (columns)
    for k in 0..n {
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        m[k * n + p] = akp * c + akq * g_qp;
        m[k * n + q] = akp * s + akq * g_qq;
    }
    // A <- G^* A (rows)
    let (cg_qp, cg_qq) = (g_qp.conj(), g_qq.conj());
    for k in 0..n {
        let apk = m[p * n + k];
        let aqk = m[q * n + k];
        m[p * n + k] = apk * c + aqk * cg_qp;
        m[q * n + k] = apk * s + aqk * cg_qq;
    }
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
    m[p * n + p] = Complex64::new(app - t * r, 0.0);
    m[q * n + q] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c + vkq * g_qp;
        v[k * n + q] = vkp * s + vkq * g_qq;
    }
}

fn sorted(n: usize, m: &[Complex64], v: Vec<Complex64>) -> HermitianEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    HermitianEigen { values, vectors }
}

/// Smallest singular value, `sqrt(lambda_min(A^* A))`.
pub fn min_singular_value(a: &ComplexMatrix) -> Result<f64> {
    let gram = gram(a)?;
    let eig = hermitian_eigen(&gram)?;
    Ok(eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Largest singular value, `sqrt(lambda_max(A^* A))`.
pub fn max_singular_value(a: &ComplexMatrix) -> Result<f64> {
    let gram = gram(a)?;
    let eig = hermitian_eigen(&gram)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

fn gram(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    a.adjoint().matmul(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        b.add(&b.adjoint()).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let e = hermitian_eigen(&ComplexMatrix::real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eigen(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn characteristic_polynomial_oracle() {
        // det([[2,1],[1,2]] - x I) = (2-x)^2 - 1 -> x = 1, 3
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = hermitian_eigen(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eigen(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn random_hermitian_residual_trace_and_orthogonality() {
        for (n, seed) in [(1, 1), (5, 2), (17, 3), (40, 4)] {
            let a = random_hermitian(n, seed);
            let e = hermitian_eigen(&a).unwrap();
            let norm = a.frobenius_norm();
            let av = a.matmul(&e.vectors).unwrap();
            let vl = e.vectors.scale_cols(
                &e.values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
            );
            assert!(av.max_abs_diff(&vl) <= 1e-9 * norm);
            let vv = e.vectors.adjoint().matmul(&e.vectors).unwrap();
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-9);
            let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            assert!((e.values.iter().sum::<f64>() - trace).abs() <= 1e-9 * norm);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn singular_value_extremes() {
        assert!((min_singular_value(&ComplexMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        let rank1 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(min_singular_value(&rank1).unwrap(), 0.0);
        let d = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert!((min_singular_value(&d).unwrap() - 2.0).abs() < 1e-15);
        assert!((max_singular_value(&d).unwrap() - 3.0).abs() < 1e-15);
    }
}
