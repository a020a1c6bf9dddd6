use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `PIVOT_TOL * max|A|` is singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    // Unit-lower L below the diagonal, U on and above.
    factors: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let threshold = PIVOT_TOL * a.max_abs();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, f[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            if p != k {
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let inv = f[(k, k)].inv();
            for i in k + 1..n {
                let l = f[(i, k)] * inv;
                f[(i, k)] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = f[(k, j)];
                    f[(i, j)] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            factors: f,
            perm,
            swaps,
        })
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(b)?;
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.factors[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.factors[(i, j)] * x[j];
            }
            x[i] = acc / self.factors[(i, i)];
        }
        Ok(x)
    }

    /// Solves `A^T x = b` with the same factorization.
    pub fn solve_transposed(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(b)?;
        let n = self.n;
        // A^T = U^T L^T P, so solve U^T w = b, L^T v = w, x = P^T v.
        let mut w = b.to_vec();
        for i in 0..n {
            let mut acc = w[i];
            for j in 0..i {
                acc -= self.factors[(j, i)] * w[j];
            }
            w[i] = acc / self.factors[(i, i)];
        }
        for i in (0..n).rev() {
            let mut acc = w[i];
            for j in i + 1..n {
                acc -= self.factors[(j, i)] * w[j];
            }
            w[i] = acc;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = w[k];
        }
        Ok(x)
    }

    pub fn determinant(&self) -> Complex64 {
        let mut det: Complex64 = (0..self.n).map(|i| self.factors[(i, i)]).product();
        if self.swaps % 2 == 1 {
            det = -det;
        }
        det
    }

    fn check_len(&self, b: &[Complex64]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for a {}x{} system",
                b.len(),
                self.n,
                self.n
            )));
        }
        Ok(())
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    Lu::factor(a)?.solve(b)
}

/// Determinant via LU; a numerically singular matrix yields zero.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    match Lu::factor(a) {
        Ok(lu) => Ok(lu.determinant()),
        Err(Error::SingularMatrix { .. }) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn assert_close(x: &[Complex64], y: &[Complex64], tol: f64) {
        for (a, b) in x.iter().zip(y) {
            assert!((a - b).norm() <= tol, "{a} vs {b}");
        }
    }

    #[test]
    fn identity_system() {
        let x = lu_solve(&ComplexMatrix::identity(3), &re(&[1.0, 2.0, 3.0])).unwrap();
        assert_close(&x, &re(&[1.0, 2.0, 3.0]), 0.0);
    }

    #[test]
    fn permutation_system() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = lu_solve(&a, &re(&[5.0, 7.0])).unwrap();
        assert_close(&x, &re(&[7.0, 5.0]), 0.0);
    }

    #[test]
    fn hand_inverted_two_by_two() {
        // [[1,1],[1,-1]]^{-1} = 1/2 [[1,1],[1,-1]]
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let x = lu_solve(&a, &re(&[2.0, 0.0])).unwrap();
        assert_close(&x, &re(&[1.0, 1.0]), 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            lu_solve(&a, &re(&[1.0, 1.0])),
            Err(Error::SingularMatrix { .. })
        ));
        assert_eq!(determinant(&a).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn transposed_solve_and_determinant() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            Complex64::new((i * 3 + j) as f64 + if i == j { 5.0 } else { 0.0 }, i as f64 - j as f64)
        });
        let lu = Lu::factor(&a).unwrap();
        let b = vec![Complex64::new(1.0, 2.0), Complex64::new(-1.0, 0.5), Complex64::new(0.0, 3.0)];
        let x = lu.solve_transposed(&b).unwrap();
        let back = a.transpose().matvec(&x).unwrap();
        assert_close(&back, &b, 1e-12);

        let d = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        assert!((determinant(&d).unwrap() - Complex64::new(5.0, 0.0)).norm() < 1e-14);
    }
}
