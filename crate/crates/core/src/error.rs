use thiserror::Error;

/// Errors raised by the toolkit. Every variant maps onto a stable `kind`
/// string that the CLI reports in its structured error output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is numerically singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("invalid inner function: {0}")]
    InvalidInnerFunction(String),

    #[error("evaluation point {z} coincides with a singular atom at angle {angle}")]
    AtomSingularity { z: String, angle: f64 },

    #[error("sampling grid of {points} points hits a singular atom at angle {angle}")]
    GridHitsAtom { points: usize, angle: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("parameter {name} = {modulus} lies outside the closed unit disk")]
    OutOfDisk { name: String, modulus: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("certification failure: sigma_min = {sigma:.3e} at sample {sample}")]
    CertificationFailure { sigma: f64, sample: usize },

    #[error("Fourier tail {tail:.3e} exceeds {limit:.3e}; raise the order")]
    TailTooLarge { tail: f64, limit: f64 },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("eigenvalue clusters at {a:.6e} and {b:.6e} are too close to separate")]
    ClusterAmbiguity { a: f64, b: f64 },

    #[error("dominance of level {level:.6e} is ambiguous (H weight {h_weight:.3e}, K weight {k_weight:.3e})")]
    DominanceAmbiguity {
        level: f64,
        h_weight: f64,
        k_weight: f64,
    },

    #[error("denominator {value:.3e} too small at z = {z}")]
    SmallDenominator { z: String, value: f64 },

    #[error("secular equation has the wrong number of roots: {0}")]
    RootCountMismatch(String),

    #[error("recovered levels violate interlacing: {0}")]
    InterlacingViolation(String),

    #[error("symbol is identically zero")]
    EmptySpectrum,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::InvalidInnerFunction(_) => "InvalidInnerFunction",
            Error::AtomSingularity { .. } => "AtomSingularity",
            Error::GridHitsAtom { .. } => "GridHitsAtom",
            Error::InvalidSpectrum(_) => "InvalidSpectrum",
            Error::DegenerateSpectrum(_) => "DegenerateSpectrum",
            Error::OutOfDisk { .. } => "OutOfDisk",
            Error::NumericalBreakdown(_) => "NumericalBreakdown",
            Error::CertificationFailure { .. } => "CertificationFailure",
            Error::TailTooLarge { .. } => "TailTooLarge",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::ClusterAmbiguity { .. } => "ClusterAmbiguity",
            Error::DominanceAmbiguity { .. } => "DominanceAmbiguity",
            Error::SmallDenominator { .. } => "SmallDenominator",
            Error::RootCountMismatch(_) => "RootCountMismatch",
            Error::InterlacingViolation(_) => "InterlacingViolation",
            Error::EmptySpectrum => "EmptySpectrum",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
