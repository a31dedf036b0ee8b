//! Error types shared across the crate.

use thiserror::Error;

/// Failures while building or validating measurement data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasurementError {
    #[error("invalid conductivity: {0}")]
    InvalidConductivity(String),
    #[error("phase conductivities are equal")]
    EqualConductivities,
    #[error("beta = Re(s1) Im(s2) - Im(s1) Re(s2) vanishes ({0:e}); the splitting method does not apply")]
    BetaZero(f64),
    #[error("eta for phase {phase} is degenerate ({value:e}); the field vanishes in that phase or the data is inconsistent")]
    EtaDegenerate { phase: usize, value: f64 },
    #[error("non-finite entry in measurement: {0}")]
    NonFinite(&'static str),
    #[error("measurement document: {0}")]
    Format(String),
}

/// Failures of the analytic forward solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForwardError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid radii: {0}")]
    InvalidRadii(String),
    #[error("boundary condition has no modes")]
    EmptyBoundaryCondition,
    #[error("transmission system for mode {mode} is singular")]
    SingularTransmission { mode: i32 },
    #[error("invalid laminate parameters: {0}")]
    InvalidLaminate(String),
    #[error("boundary trace needs an even node count >= 16, got {0}")]
    InvalidNodeCount(usize),
}

/// Failures while evaluating boundary integrals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("trace needs an even node count >= 16, got {0}")]
    InvalidNodeCount(usize),
    #[error("trace arrays have inconsistent lengths")]
    LengthMismatch,
    #[error("trace radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("net boundary current {net:e} exceeds tolerance {tol:e}")]
    NonConservative { net: f64, tol: f64 },
    #[error("trace appears to be sampled clockwise")]
    Clockwise,
    #[error("trace document: {0}")]
    Format(String),
}

/// Failures of the bounding procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error("rotational null Lagrangians are unavailable (3-D data or equal moduli)")]
    MissingRotData,
    #[error("|sigma1| = |sigma2|; improved bounds are undefined")]
    EqualModuli,
    #[error("test value {f} outside the admissible domain [{lo}, {hi}]")]
    OutOfDomain { f: f64, lo: f64, hi: f64 },
    #[error("quadratic cancellation failed: mu1..mu3 = {0:?}")]
    QuadraticCancellation([f64; 3]),
    #[error("bound ordering violated: {0}")]
    Ordering(String),
    #[error(transparent)]
    Scan(#[from] ScanError),
}

/// Failures of the interval scan.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("scan domain [{lo}, {hi}] is empty")]
    EmptyDomain { lo: f64, hi: f64 },
    #[error("scan grid needs at least 3 points, got {0}")]
    GridTooCoarse(usize),
    #[error("admissible set is empty")]
    EmptySet,
}
