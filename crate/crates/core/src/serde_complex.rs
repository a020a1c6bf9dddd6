//! JSON representation of complex scalars as `{"re": f, "im": f}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C64 {
    fn from(z: Complex64) -> Self {
        C64 { re: z.re, im: z.im }
    }
}

impl From<C64> for Complex64 {
    fn from(z: C64) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// `#[serde(with = "crate::serde_complex::vec")]` for `Vec<Complex64>`.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| C64::from(*z)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw: Vec<C64> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(Complex64::from).collect())
    }
}

/// `#[serde(with = "crate::serde_complex::scalar")]` for a single `Complex64`.
pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        C64::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(C64::deserialize(d)?.into())
    }
}
