//! JSON report shapes. Every report carries `schema_version` and a
//! `command` tag; complex numbers serialize as `[re, im]` pairs. Field
//! order is fixed by the struct definitions, so reports are byte-stable.

use num_complex::Complex64;
use serde::Serialize;

use conjp_core::extendibility::{ExtendibilityReport, Witness};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
pub struct ParamsReport {
    pub nodes: usize,
    pub degree: usize,
    pub p_test: usize,
    pub tol_accept: f64,
    pub tol_reject: f64,
    pub seed: u64,
    pub threads_cap: usize,
}

#[derive(Serialize)]
pub struct WitnessReport {
    pub label: String,
    pub kind: &'static str,
    pub value: f64,
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Pairing { value, .. } => Self {
                label: w.label(),
                kind: "period",
                value: *value,
            },
            Witness::Probe { modulus, .. } => Self {
                label: w.label(),
                kind: "cauchy",
                value: *modulus,
            },
        }
    }
}

#[derive(Serialize)]
pub struct ProbeReport {
    pub probe: [f64; 2],
    pub value: [f64; 2],
    pub modulus: f64,
}

#[derive(Serialize)]
pub struct TestReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub domain: serde_json::Value,
    pub params: ParamsReport,
    pub dirichlet_residual: f64,
    pub scaled_accept: f64,
    pub scaled_reject: f64,
    pub members: Vec<String>,
    /// Row-major: rho[member][hole].
    pub rho: Vec<Vec<f64>>,
    pub cauchy_probes: Vec<ProbeReport>,
    pub max_pairing: f64,
    pub max_cauchy: f64,
    pub diagnostics_agree: bool,
    pub verdict: String,
    pub witness: Option<WitnessReport>,
}

impl TestReport {
    pub fn new(
        domain_json: serde_json::Value,
        params: ParamsReport,
        rep: &ExtendibilityReport,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: "test",
            domain: domain_json,
            params,
            dirichlet_residual: rep.dirichlet_residual,
            scaled_accept: rep.scaled_accept,
            scaled_reject: rep.scaled_reject,
            members: rep.member_names.clone(),
            rho: rep.rho.clone(),
            cauchy_probes: rep
                .cauchy_residuals
                .iter()
                .map(|(p, v)| ProbeReport {
                    probe: [p.re, p.im],
                    value: [v.re, v.im],
                    modulus: v.norm(),
                })
                .collect(),
            max_pairing: rep.max_pairing,
            max_cauchy: rep.max_cauchy,
            diagnostics_agree: rep.diagnostics_agree,
            verdict: rep.verdict.to_string(),
            witness: rep.witness.as_ref().map(WitnessReport::from),
        }
    }
}

#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub domain: serde_json::Value,
    pub params: ParamsReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SolveReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub degree: usize,
    pub a0: f64,
    pub log_coefficients: Vec<f64>,
    pub outer_coefficients: Vec<[f64; 2]>,
    pub hole_coefficients: Vec<Vec<[f64; 2]>>,
    pub residual: f64,
    pub periods: Vec<f64>,
}

#[derive(Serialize)]
pub struct SzegoReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub a: [f64; 2],
    pub nodes: usize,
    pub expected_zero_count: usize,
    pub zero_count: usize,
    pub zeros: Vec<[f64; 2]>,
    pub simplicity_margins: Vec<f64>,
    pub s_at_a: f64,
    pub skew_defect: f64,
    pub reproducing_error: f64,
    pub garabedian_residue_error: f64,
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}
