//! Dense complex linear algebra and the discrete Fourier transform.

mod dft;
mod eigen;
mod lu;
mod matrix;

pub use dft::{circle_grid, dft, inverse_dft};
pub use eigen::{hermitian_eigen, max_singular_value, min_singular_value, HermitianEigen};
pub use lu::{determinant, lu_solve, Lu, PIVOT_TOL};
pub use matrix::{inner, max_abs, norm2, ComplexMatrix};
