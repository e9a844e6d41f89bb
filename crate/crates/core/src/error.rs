//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by domain construction, solvers and evaluators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a circle domain needs at least 2 boundary circles, got {0}")]
    TooFewBoundaryComponents(usize),

    #[error("circle {0} has non-positive radius {1}")]
    NonPositiveRadius(usize, f64),

    #[error("closed discs of circles {0} and {1} are not disjoint")]
    OverlappingCircles(usize, usize),

    #[error("hole {0} does not lie strictly inside the outer circle")]
    HoleOutsideOuter(usize),

    #[error("node count {0} per circle is below the minimum of 16")]
    NTooSmall(usize),

    #[error("node count {0} per circle must be even")]
    OddNodeCount(usize),

    #[error("samples were taken on a different grid")]
    GridMismatch,

    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("evaluation point {point} hits a pole of `{subexpr}`")]
    PoleAtEvaluationPoint { point: Complex64, subexpr: String },

    #[error("boundary data must be real, max |Im| is {0:.3e}")]
    NonRealSamples(f64),

    #[error("basis degree {0} is below the minimum of 4")]
    DegreeTooSmall(usize),

    #[error("grid has {nodes} nodes but the fit needs at least {needed}")]
    TooFewNodes { nodes: usize, needed: usize },

    #[error("least-squares system ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("point {0} is not an interior point of the domain")]
    PointNotInterior(Complex64),

    #[error("pairing integral has imaginary part {0:.3e}; orientation or solver bug")]
    NonRealPairing(f64),

    #[error("probe {point} is {distance:.3e} from the boundary, below the minimum {minimum:.3e}")]
    ProbeTooCloseToBoundary {
        point: Complex64,
        distance: f64,
        minimum: f64,
    },

    #[error("extension not certified: extendibility verdict was {0}")]
    NotCertifiedExtendible(String),

    #[error("all period fields are below 1e-10 at {0}; period-field solve is suspect")]
    AllFieldsTinyAtPoint(Complex64),

    #[error("integral-equation solve failed: {0}")]
    SolveFailed(String),

    #[error("expected {expected} zeros, found {found}")]
    WrongZeroCount { expected: usize, found: usize },

    #[error("refined zero {0} left the domain or its boundary clearance")]
    ZeroNearBoundary(Complex64),

    #[error("residue normalization check failed: got {got}, expected {expected}")]
    ResidueCheckFailed { got: Complex64, expected: Complex64 },

    #[error("common zero of all period fields near {0}")]
    CommonZeroFound(Complex64),

    #[error("series truncation {order} insufficient: last term {last:.3e} above 1e-14")]
    TruncationInsufficient { order: usize, last: f64 },

    #[error("winding count ambiguous: {0}")]
    WindingAmbiguous(String),

    #[error("invalid tolerances: accept {accept:.3e} must be below reject {reject:.3e}")]
    InvalidTolerances { accept: f64, reject: f64 },

    #[error("invalid domain file: {0}")]
    InvalidDomainFile(String),

    #[error("invalid samples file, line {line}: {message}")]
    InvalidSamplesFile { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
