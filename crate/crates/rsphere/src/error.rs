//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by the geometric and numerical operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {defect:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("eigenvalue {eigenvalue} of the argument lies outside the domain of {function}")]
    SpectrumOutOfDomain { function: &'static str, eigenvalue: f64 },

    #[error("matrix is not unitary (defect {defect:.3e} exceeds tolerance {tol:.3e})")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("unitary has spectrum within {gap:.3e} of -1; principal logarithm rejected")]
    SpectrumTouchesMinusOne { gap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("block pair is not an isometric column (defect {defect:.3e} exceeds tolerance {tol:.3e})")]
    NotInSphere { defect: f64, tol: f64 },

    #[error("top block is singular; the point lies outside the principal chart of the sphere")]
    TopBlockSingular,

    #[error("projection lies outside the principal chart (top-left block singular)")]
    NotInChart,

    #[error("vectors lie on different fibers (projections differ by {defect:.3e})")]
    NotSameFiber { defect: f64 },

    #[error("vector is not tangent at the given point (defect {defect:.3e})")]
    NotTangent { defect: f64 },

    #[error("matrix is not codiagonal with respect to the base projection (defect {defect:.3e})")]
    NotCodiagonal { defect: f64 },

    #[error("matrix is not a Hermitian idempotent of the expected rank (defect {defect:.3e})")]
    NotProjection { defect: f64 },

    #[error("Moebius denominator c + d a is singular")]
    MobiusPole,

    #[error("projection lies outside the closed-form log domain (min eigenvalue of p11 is {min_eig:.6}, needs > 1/2); use the general log")]
    OutsideLogDomain { min_eig: f64 },

    #[error("projections are too far apart for a unique geodesic (gap to norm 1 is {margin:.3e})")]
    ProjectionsTooFar { margin: f64 },

    #[error("parameter {value} outside the admissible range {range}")]
    ParameterOutOfRange { value: f64, range: &'static str },

    #[error("sampled path is too coarse for the transport integrator: {reason}")]
    PathTooCoarse { reason: String },

    #[error("kernel data mismatch: {reason}")]
    KernelMismatch { reason: String },

    #[error("operator has non-zero index: dim ker = {dim_ker}, dim coker = {dim_coker}")]
    IndexNonZero { dim_ker: usize, dim_coker: usize },

    #[error("projections have different traces ({left} vs {right})")]
    TraceMismatch { left: usize, right: usize },

    #[error("no geodesic found joining the given projections")]
    NoGeodesicFound,

    #[error("conjugation condition u p u* = 1 - p fails (defect {defect:.3e})")]
    NotRsp { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
