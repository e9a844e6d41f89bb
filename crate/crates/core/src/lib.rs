//! Function theory on multiply connected circle domains, numerically.
//!
//! The central question this crate makes executable: which continuous
//! boundary functions Φ extend holomorphically through a domain bounded by
//! m ≥ 2 circles? On such domains the answer is visible in harmonic
//! conjugates: Φ extends exactly when, for every boundary function g that
//! extends, the harmonic extension of Re(gΦ) has a single-valued
//! conjugate. Each hole contributes one period functional, computable as a
//! contour pairing with the period field W_j of the hole's harmonic
//! measure, and the whole criterion becomes a finite numerical sweep.
//!
//! Modules:
//!
//! - [`geometry`]: circle domains, boundary grids, spectrally accurate
//!   contour quadrature.
//! - [`expr`]: the boundary-function expression language.
//! - [`harmonic`]: Dirichlet solver with explicit period structure,
//!   harmonic measures, period fields and the three period functionals.
//! - [`extendibility`]: the extendibility verdict machinery and the
//!   holomorphic extension reconstruction.
//! - [`kernels`]: Szegő/Garabedian kernels via the Kerzman–Stein integral
//!   equation, Szegő zeros, span and common-zero checks.
//! - [`oracles`]: closed-form annulus ground truth used for certification.
//! - [`zeros`]: argument-principle zero counting with Newton refinement.
//! - [`io`]: domain JSON and sample CSV formats.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so everything is safe to share across threads. Reductions
//! use a fixed pairwise order: results are reproducible bit for bit.

pub mod error;
pub mod expr;
pub mod extendibility;
pub mod geometry;
pub mod harmonic;
pub mod io;
pub mod kernels;
pub mod oracles;
pub mod zeros;

pub use error::{Error, Result};
pub use expr::{eval_expr, parse_expr, sample_boundary, Expr};
pub use extendibility::{
    cauchy_transform, extendibility_test, probe_points, reconstruct_extension,
    ExtendibilityReport, TestFamily, Tolerances, Verdict,
};
pub use geometry::{
    contour_integral, BoundaryGrid, BoundarySamples, Circle, CircleDomain, RealBoundarySamples,
};
pub use harmonic::{
    conjugate_periods, flux_period, harmonic_measure, normal_derivative, period_fields,
    period_pairing, solve_dirichlet, w_field, AnalyticEvaluator, DirichletSolver, HarmonicRep,
    PeriodFields, PeriodVector,
};
pub use kernels::{
    common_zero_check, default_base_point, garabedian_field, kerzman_stein_solve, span_check,
    szego_with_zeros, szego_zeros, KernelField, KerzmanSteinOperator, SzegoZeros,
};
pub use oracles::{annulus_szego_series, AnnulusOracle};

/// Default nodes per circle.
pub const DEFAULT_NODES: usize = 256;
/// Default Laurent basis degree of the Dirichlet solver.
pub const DEFAULT_DEGREE: usize = 32;
/// Default truncation degree of the extendibility test family.
pub const DEFAULT_P_TEST: usize = 12;
