pub mod cauchy;
pub mod error;
pub mod hankel;
pub mod identities;
pub mod inner;
pub mod linalg;
pub mod random;
pub mod roundtrip;
pub mod schmidt;
pub mod secular;
pub mod serde_complex;
pub mod series;
pub mod synthesis;

pub use error::{Error, Result};
pub use num_complex::Complex64;
