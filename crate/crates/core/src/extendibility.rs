//! Executable holomorphic-extendibility test.
//!
//! A continuous boundary function Φ extends holomorphically through an
//! m-connected circle domain exactly when, for every boundary function g
//! that itself extends, the harmonic extension of Re(gΦ) has a
//! single-valued conjugate — equivalently, when every pairing
//! Re ∫_{bD} g(ζ)Φ(ζ) iW_j(ζ) dζ vanishes (j over holes).
//!
//! The test sweeps a finite family of Laurent-type generators g whose
//! closed span is dense among boundary functions extending through the
//! domain, so a clean verdict certifies extendibility "up to the
//! truncation degree" recorded in the report. A classical Cauchy-transform
//! probe of the complement is always computed as an independent
//! cross-check; the two diagnostics must agree for a definite verdict,
//! and both are reported either way.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{builtins, Expr};
use crate::geometry::{contour_integral, BoundaryGrid, BoundarySamples, CircleDomain};
use crate::harmonic::{period_pairing, PeriodFields, TOL_DIRICHLET};

/// Verdict thresholds. `accept` and `reject` apply to the scaled
/// diagnostics; `probe_clearance_factor` scales the outer radius into the
/// minimum allowed probe distance from the boundary.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub accept: f64,
    pub reject: f64,
    pub probe_clearance_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            accept: 1e-7,
            reject: 1e-4,
            probe_clearance_factor: 0.05,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.accept > 0.0 && self.reject > 0.0 && self.accept < self.reject) {
            return Err(Error::InvalidTolerances {
                accept: self.accept,
                reject: self.reject,
            });
        }
        Ok(())
    }

    /// Thresholds degrade honestly with solver quality: both scale by
    /// max(1, residual/1e-9).
    pub fn scaled_by_residual(&self, residual: f64) -> (f64, f64) {
        let s = 1.0_f64.max(residual / TOL_DIRICHLET);
        (self.accept * s, self.reject * s)
    }
}

/// A named member of the test family.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub name: String,
    pub expr: Expr,
}

/// Finite stand-in for "every boundary function that extends": the
/// Laurent generators ((z−c_out)/r_out)^n for 0 ≤ n ≤ p_test and
/// (r_k/(z−c_k))^n for 1 ≤ n ≤ p_test per hole k. Every member is
/// holomorphic on the closed domain.
#[derive(Clone, Debug)]
pub struct TestFamily {
    members: Vec<FamilyMember>,
    p_test: usize,
}

impl TestFamily {
    /// Builds the Laurent family of degree `p_test` for `domain`.
    pub fn laurent(domain: &CircleDomain, p_test: usize) -> Self {
        let mut members = Vec::new();
        for n in 0..=p_test as i32 {
            let expr = builtins::monomial(domain.outer(), n);
            members.push(FamilyMember {
                name: expr.to_string(),
                expr,
            });
        }
        for hole in domain.holes() {
            for n in 1..=p_test as i32 {
                let expr = builtins::runge(hole, n);
                members.push(FamilyMember {
                    name: expr.to_string(),
                    expr,
                });
            }
        }
        Self { members, p_test }
    }

    /// A family restricted by a member-name predicate (used to exclude
    /// specific generators in experiments).
    pub fn filtered(&self, keep: impl Fn(&FamilyMember) -> bool) -> Self {
        Self {
            members: self.members.iter().filter(|m| keep(m)).cloned().collect(),
            p_test: self.p_test,
        }
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn p_test(&self) -> usize {
        self.p_test
    }
}

/// Cauchy transform (1/2πi) ∫_{bD} f(ζ)/(ζ−z) dζ with the default probe
/// clearance 0.05·r_out for exterior points.
pub fn cauchy_transform(
    grid: &BoundaryGrid,
    samples: &BoundarySamples,
    z: Complex64,
) -> Result<Complex64> {
    cauchy_transform_with_clearance(
        grid,
        samples,
        z,
        Tolerances::default().probe_clearance_factor * grid.domain().outer().radius,
    )
}

/// Cauchy transform with an explicit minimum boundary distance for
/// exterior probes. Interior points (reconstruction use) only need to be
/// strictly inside the domain.
pub fn cauchy_transform_with_clearance(
    grid: &BoundaryGrid,
    samples: &BoundarySamples,
    z: Complex64,
    min_distance: f64,
) -> Result<Complex64> {
    samples.check(grid)?;
    let domain = grid.domain();
    let dist = domain.boundary_distance(z);
    if domain.contains(z) {
        if dist <= 1e-12 {
            return Err(Error::ProbeTooCloseToBoundary {
                point: z,
                distance: dist,
                minimum: 1e-12,
            });
        }
    } else if dist < min_distance {
        return Err(Error::ProbeTooCloseToBoundary {
            point: z,
            distance: dist,
            minimum: min_distance,
        });
    }
    let kernel = BoundarySamples::from_fn(grid, |zeta| 1.0 / (zeta - z));
    let weighted = BoundarySamples::from_values(
        grid,
        samples
            .values()
            .iter()
            .zip(kernel.values())
            .map(|(&f, &k)| f * k)
            .collect(),
    )?;
    let integral = contour_integral(grid, &weighted)?;
    Ok(integral / (Complex64::i() * std::f64::consts::TAU))
}

/// Fixed probe layout in the complement of the closed domain: every hole
/// center, an 8-point ring inside each hole at half its radius, and an
/// 8-point ring outside at twice the outer radius. A single probe can miss
/// non-extendibility (conj ζ on the annulus vanishes at the hole center),
/// hence the rings.
pub fn probe_points(domain: &CircleDomain) -> Vec<Complex64> {
    let mut probes = Vec::new();
    for hole in domain.holes() {
        probes.push(hole.center);
        for t in 0..8 {
            let theta = std::f64::consts::TAU * t as f64 / 8.0;
            probes.push(hole.center + 0.5 * hole.radius * Complex64::new(theta.cos(), theta.sin()));
        }
    }
    let outer = domain.outer();
    for t in 0..8 {
        let theta = std::f64::consts::TAU * t as f64 / 8.0;
        probes.push(outer.center + 2.0 * outer.radius * Complex64::new(theta.cos(), theta.sin()));
    }
    probes
}

/// Extendibility verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "EXTENDS")]
    Extends,
    #[serde(rename = "NOT_EXTENDS")]
    NotExtends,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Extends => write!(f, "EXTENDS"),
            Verdict::NotExtends => write!(f, "NOT_EXTENDS"),
            Verdict::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

/// The witness achieving the largest diagnostic value.
#[derive(Clone, Debug, Serialize)]
pub enum Witness {
    Pairing {
        member: String,
        hole: usize,
        value: f64,
    },
    Probe {
        point: [f64; 2],
        value: [f64; 2],
        modulus: f64,
    },
}

impl Witness {
    pub fn label(&self) -> String {
        match self {
            Witness::Pairing { member, hole, .. } => format!("g={member} (hole {hole})"),
            Witness::Probe { point, .. } => format!("probe=({}, {})", point[0], point[1]),
        }
    }
}

/// Full record of one extendibility test.
#[derive(Clone, Debug)]
pub struct ExtendibilityReport {
    /// Pairing values Re ∫ gΦ iW_j dζ, row-major by family member.
    pub rho: Vec<Vec<f64>>,
    pub member_names: Vec<String>,
    /// (probe, transform value) pairs.
    pub cauchy_residuals: Vec<(Complex64, Complex64)>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub tolerances: Tolerances,
    pub scaled_accept: f64,
    pub scaled_reject: f64,
    pub dirichlet_residual: f64,
    pub p_test: usize,
    pub max_pairing: f64,
    pub max_cauchy: f64,
    pub diagnostics_agree: bool,
}

fn band_verdict(value: f64, accept: f64, reject: f64) -> Verdict {
    if value < accept {
        Verdict::Extends
    } else if value > reject {
        Verdict::NotExtends
    } else {
        Verdict::Inconclusive
    }
}

/// Runs the period sweep and Cauchy probes for Φ and combines them into a
/// verdict. Disagreeing diagnostics are not an error; they downgrade the
/// verdict to INCONCLUSIVE with both values in the report.
pub fn extendibility_test(
    grid: &BoundaryGrid,
    fields: &PeriodFields,
    phi: &BoundarySamples,
    family: &TestFamily,
    tolerances: &Tolerances,
) -> Result<ExtendibilityReport> {
    tolerances.validate()?;
    phi.check(grid)?;
    let (scaled_accept, scaled_reject) = tolerances.scaled_by_residual(fields.max_residual);

    let mut rho = Vec::with_capacity(family.members().len());
    let mut member_names = Vec::with_capacity(family.members().len());
    let mut max_pairing = 0.0_f64;
    let mut pairing_witness: Option<Witness> = None;
    for member in family.members() {
        let g = crate::expr::sample_boundary(&member.expr, grid)?;
        let re_g_phi = BoundarySamples::from_values(
            grid,
            g.values()
                .iter()
                .zip(phi.values())
                .map(|(&gv, &pv)| gv * pv)
                .collect(),
        )?
        .real_part();
        let mut row = Vec::with_capacity(fields.fields.len());
        for (j, w) in fields.fields.iter().enumerate() {
            let value = period_pairing(grid, &re_g_phi, w)?;
            if value.abs() > max_pairing {
                max_pairing = value.abs();
                pairing_witness = Some(Witness::Pairing {
                    member: member.name.clone(),
                    hole: j,
                    value,
                });
            }
            row.push(value);
        }
        rho.push(row);
        member_names.push(member.name.clone());
    }

    let mut cauchy_residuals = Vec::new();
    let mut max_cauchy = 0.0_f64;
    let mut cauchy_witness: Option<Witness> = None;
    for probe in probe_points(grid.domain()) {
        let value = cauchy_transform_with_clearance(
            grid,
            phi,
            probe,
            tolerances.probe_clearance_factor * grid.domain().outer().radius,
        )?;
        if value.norm() > max_cauchy {
            max_cauchy = value.norm();
            cauchy_witness = Some(Witness::Probe {
                point: [probe.re, probe.im],
                value: [value.re, value.im],
                modulus: value.norm(),
            });
        }
        cauchy_residuals.push((probe, value));
    }

    let v_periods = band_verdict(max_pairing, scaled_accept, scaled_reject);
    let v_cauchy = band_verdict(max_cauchy, scaled_accept, scaled_reject);
    let diagnostics_agree = v_periods == v_cauchy;
    let verdict = if diagnostics_agree {
        v_periods
    } else {
        Verdict::Inconclusive
    };
    let witness = if max_pairing >= max_cauchy {
        pairing_witness
    } else {
        cauchy_witness
    };

    Ok(ExtendibilityReport {
        rho,
        member_names,
        cauchy_residuals,
        verdict,
        witness,
        tolerances: *tolerances,
        scaled_accept,
        scaled_reject,
        dirichlet_residual: fields.max_residual,
        p_test: family.p_test(),
        max_pairing,
        max_cauchy,
        diagnostics_agree,
    })
}

/// Reconstructs the holomorphic extension of a certified Φ at an interior
/// point via H_j(z)/W_j(z), where H_j is the Cauchy integral of Φ·W_j and
/// j maximizes |W_j(z)| (the W_j have no common zero, so some |W_j(z)| is
/// safely away from zero).
pub fn reconstruct_extension(
    grid: &BoundaryGrid,
    fields: &PeriodFields,
    phi: &BoundarySamples,
    report: &ExtendibilityReport,
    z: Complex64,
) -> Result<Complex64> {
    if report.verdict != Verdict::Extends {
        return Err(Error::NotCertifiedExtendible(report.verdict.to_string()));
    }
    if !grid.domain().contains_with_clearance(z, 1e-12) {
        return Err(Error::PointNotInterior(z));
    }
    let best = fields
        .fields
        .iter()
        .enumerate()
        .map(|(j, w)| (j, w.eval(z).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one hole");
    if best.1 < 1e-10 {
        return Err(Error::AllFieldsTinyAtPoint(z));
    }
    reconstruct_with_field(grid, fields, best.0, phi, z)
}

/// Single-field reconstruction H_j(z)/W_j(z) for a chosen hole index.
/// Certification is the caller's responsibility; used directly for the
/// j-independence diagnostics.
pub fn reconstruct_with_field(
    grid: &BoundaryGrid,
    fields: &PeriodFields,
    j: usize,
    phi: &BoundarySamples,
    z: Complex64,
) -> Result<Complex64> {
    phi.check(grid)?;
    let w = &fields.fields[j];
    let phi_w = BoundarySamples::from_values(
        grid,
        phi.values()
            .iter()
            .zip(grid.nodes())
            .map(|(&p, &zeta)| p * w.eval(zeta))
            .collect(),
    )?;
    let h = cauchy_transform_with_clearance(grid, &phi_w, z, 1e-12)?;
    Ok(h / w.eval(z))
}
