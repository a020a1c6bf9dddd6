//! Inner functions on the unit disk: a unimodular constant times a finite
//! Blaschke product times finitely many singular atoms,
//!
//! ```text
//! theta(z) = e^{i phase} prod_i (z - a_i) / (1 - conj(a_i) z)
//!                        prod_k exp(-m_k (w_k + z) / (w_k - z)),   w_k = e^{i angle_k}
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_complex::C64;

/// Zeros must satisfy `|a| <= 1 - ZERO_MARGIN`.
pub const ZERO_MARGIN: f64 = 1e-9;
/// A boundary point closer than this to an atom is treated as the atom.
pub const ATOM_TOL: f64 = 1e-12;

/// Point mass of the singular measure on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularAtom {
    pub angle: f64,
    pub mass: f64,
}

impl SingularAtom {
    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInner", into = "RawInner")]
pub struct InnerFunction {
    phase: f64,
    zeros: Vec<Complex64>,
    atoms: Vec<SingularAtom>,
}

#[derive(Serialize, Deserialize)]
struct RawInner {
    phase: f64,
    #[serde(default)]
    zeros: Vec<C64>,
    #[serde(default)]
    atoms: Vec<SingularAtom>,
}

impl TryFrom<RawInner> for InnerFunction {
    type Error = Error;

    fn try_from(raw: RawInner) -> Result<Self> {
        InnerFunction::new(
            raw.phase,
            raw.zeros.into_iter().map(Complex64::from).collect(),
            raw.atoms,
        )
    }
}

impl From<InnerFunction> for RawInner {
    fn from(f: InnerFunction) -> Self {
        RawInner {
            phase: f.phase,
            zeros: f.zeros.into_iter().map(C64::from).collect(),
            atoms: f.atoms,
        }
    }
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

impl InnerFunction {
    pub fn new(phase: f64, zeros: Vec<Complex64>, atoms: Vec<SingularAtom>) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidInnerFunction("phase must be finite".into()));
        }
        for a in &zeros {
            if !(a.norm() <= 1.0 - ZERO_MARGIN) {
                return Err(Error::InvalidInnerFunction(format!(
                    "zero {a} is not strictly inside the unit disk"
                )));
            }
        }
        for (i, atom) in atoms.iter().enumerate() {
            if !atom.angle.is_finite() || !(atom.mass > 0.0) || !atom.mass.is_finite() {
                return Err(Error::InvalidInnerFunction(format!(
                    "atom {i} needs a finite angle and a positive mass"
                )));
            }
            for other in &atoms[..i] {
                if angle_distance(atom.angle, other.angle) <= ATOM_TOL {
                    return Err(Error::InvalidInnerFunction(format!(
                        "duplicate atom at angle {}",
                        atom.angle
                    )));
                }
            }
        }
        Ok(Self { phase, zeros, atoms })
    }

    /// The unimodular constant `e^{i phase}`.
    pub fn constant(phase: f64) -> Self {
        Self {
            phase,
            zeros: Vec::new(),
            atoms: Vec::new(),
        }
    }

    /// `theta(z) = z`.
    pub fn identity() -> Self {
        Self {
            phase: 0.0,
            zeros: vec![Complex64::new(0.0, 0.0)],
            atoms: Vec::new(),
        }
    }

    pub fn blaschke(phase: f64, zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(phase, zeros, Vec::new())
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn atoms(&self) -> &[SingularAtom] {
        &self.atoms
    }

    /// Number of Blaschke zeros, counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn has_singular_part(&self) -> bool {
        !self.atoms.is_empty()
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::OutOfDisk {
                name: "z".into(),
                modulus: z.norm(),
            });
        }
        let mut value = Complex64::from_polar(1.0, self.phase);
        for a in &self.zeros {
            value *= (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
        }
        for atom in &self.atoms {
            let w = atom.point();
            if (w - z).norm() <= ATOM_TOL {
                return Err(Error::AtomSingularity {
                    z: z.to_string(),
                    angle: atom.angle,
                });
            }
            value *= (-atom.mass * (w + z) / (w - z)).exp();
        }
        Ok(value)
    }

    /// Values on the grid `e^{2 pi i m / M}`.
    pub fn boundary_samples(&self, m: usize) -> Result<Vec<Complex64>> {
        self.boundary_samples_rotated(m, 0.0)
    }

    /// Values on the grid `e^{2 pi i m / M + i offset}`.
    pub fn boundary_samples_rotated(&self, m: usize, offset: f64) -> Result<Vec<Complex64>> {
        if m == 0 {
            return Err(Error::InvalidOrder("sample count must be positive".into()));
        }
        if let Some(angle) = self.atom_on_grid(m, offset) {
            return Err(Error::GridHitsAtom { points: m, angle });
        }
        crate::linalg::circle_grid(m, offset)
            .into_iter()
            .map(|z| self.evaluate(z))
            .collect()
    }

    /// Angle of an atom lying on the rotated `m`-point grid, if any.
    pub fn atom_on_grid(&self, m: usize, offset: f64) -> Option<f64> {
        let step = 2.0 * PI / m as f64;
        self.atoms.iter().map(|a| a.angle).find(|&angle| {
            let r = (angle - offset).rem_euclid(step);
            r.min(step - r) <= ATOM_TOL
        })
    }

    /// The pointwise product as a merged representation; coinciding atoms
    /// add their masses.
    pub fn product(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        for b in &other.atoms {
            match atoms
                .iter_mut()
                .find(|a| angle_distance(a.angle, b.angle) <= ATOM_TOL)
            {
                Some(a) => a.mass += b.mass,
                None => atoms.push(*b),
            }
        }
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        Self {
            phase: self.phase + other.phase,
            zeros,
            atoms,
        }
    }
}

/// Parameters for drawing random inner functions.
#[derive(Debug, Clone, Copy)]
pub struct InnerSampler {
    pub max_degree: usize,
    pub allow_singular: bool,
    /// Zeros are drawn uniformly from the disk of this radius.
    pub max_zero_radius: f64,
}

impl InnerSampler {
    pub fn new(max_degree: usize, allow_singular: bool) -> Self {
        Self {
            max_degree,
            allow_singular,
            max_zero_radius: 0.9,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> InnerFunction {
        let phase = rng.random_range(-PI..PI);
        let degree = rng.random_range(0..=self.max_degree);
        let zeros = (0..degree)
            .map(|_| {
                let r = self.max_zero_radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, rng.random_range(-PI..PI))
            })
            .collect();
        let atoms = if self.allow_singular && rng.random_bool(0.5) {
            vec![SingularAtom {
                angle: rng.random_range(-PI..PI),
                mass: rng.random_range(0.1..=2.0),
            }]
        } else {
            Vec::new()
        };
        InnerFunction {
            phase,
            zeros,
            atoms,
        }
    }
}

/// Deterministic random inner function: zeros uniform in `|a| <= 0.9`, at
/// most one atom with mass in `[0.1, 2]` when `allow_singular` is set.
pub fn random_inner(max_degree: usize, allow_singular: bool, seed: u64) -> InnerFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    InnerSampler::new(max_degree, allow_singular).sample(&mut rng)
}
