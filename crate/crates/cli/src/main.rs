//! `conjp` — harmonic conjugate periods and holomorphic extendibility on
//! multiply connected circle domains.
//!
//! Commands: `verify` (full pipeline self-check with margins), `test`
//! (extendibility verdict for a boundary function), `solve` (Dirichlet
//! solve of boundary data), `kernels szego` (Szegő field and zeros),
//! `dump` (plot-ready field values on an interior lattice).
//!
//! Exit codes: `test` returns 0 for EXTENDS, 2 for NOT_EXTENDS, 3 for
//! INCONCLUSIVE; `verify` returns 0 only if every check passes; all
//! commands return 1 on operational errors.

mod point;
mod reports;

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conjp_core::expr::{builtins, parse_expr, random_extendible, sample_boundary, Expr};
use conjp_core::extendibility::{
    cauchy_transform_with_clearance, extendibility_test, TestFamily, Tolerances, Verdict, Witness,
};
use conjp_core::geometry::{
    contour_integral, pairwise_sum, BoundaryGrid, BoundarySamples, CircleDomain,
};
use conjp_core::harmonic::{
    period_fields, random_smooth_data, DirichletSolver, PeriodFields,
};
use conjp_core::io::{domain_from_json, read_samples_csv};
use conjp_core::kernels::{
    common_zero_check, garabedian_field, span_check, szego_with_zeros, szego_zeros,
    KernelField, KerzmanSteinOperator, SzegoZeros,
};

use reports::{
    Check, ParamsReport, SolveReport, SzegoReport, TestReport, VerifyReport, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(name = "conjp", version, about = "Conjugate periods and holomorphic extendibility on circle domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification pipeline and report every margin
    Verify(VerifyArgs),
    /// Test a boundary function for holomorphic extendibility
    Test(TestArgs),
    /// Solve the Dirichlet problem for boundary data from a CSV file
    Solve(SolveArgs),
    /// Kernel computations
    Kernels(KernelsArgs),
    /// Dump field values on an interior lattice as CSV
    Dump(DumpArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Domain description JSON
    #[arg(long)]
    domain: PathBuf,
    /// Nodes per circle (even, >= 16)
    #[arg(long, default_value_t = conjp_core::DEFAULT_NODES)]
    nodes: usize,
    /// Laurent basis degree
    #[arg(long, default_value_t = conjp_core::DEFAULT_DEGREE)]
    degree: usize,
    /// Test family truncation degree
    #[arg(long, default_value_t = conjp_core::DEFAULT_P_TEST)]
    ptest: usize,
    /// Number of random extendible boundary functions
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol_accept: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol_reject: f64,
    /// Seed for the replayable random boundary functions
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Boundary function expression (or builtin: conj_z, zpow n, runge k n)
    #[arg(long, conflicts_with = "phi_samples")]
    phi: Option<String>,
    /// Boundary samples CSV; the grid is inferred from the file
    #[arg(long)]
    phi_samples: Option<PathBuf>,
    /// Nodes per circle (ignored when --phi-samples fixes the grid)
    #[arg(long, default_value_t = conjp_core::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = conjp_core::DEFAULT_DEGREE)]
    degree: usize,
    #[arg(long, default_value_t = conjp_core::DEFAULT_P_TEST)]
    ptest: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol_accept: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol_reject: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Real boundary data CSV; the grid is inferred from the file
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = conjp_core::DEFAULT_DEGREE)]
    degree: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct KernelsArgs {
    #[command(subcommand)]
    command: KernelsCommand,
}

#[derive(Subcommand)]
enum KernelsCommand {
    /// Szegő kernel boundary values, zeros, and margins
    Szego(SzegoArgs),
}

#[derive(Args)]
struct SzegoArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Base point as a constant expression, e.g. "0.85*exp(i*pi/7)";
    /// default c_out + 0.85*r_out*e^{iπ/7} with a retry ladder
    #[arg(long)]
    a: Option<String>,
    #[arg(long, default_value_t = conjp_core::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Optional boundary function; adds reconstructed-extension columns
    /// when the extendibility test certifies EXTENDS
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, default_value_t = conjp_core::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = conjp_core::DEFAULT_DEGREE)]
    degree: usize,
    #[arg(long, default_value_t = conjp_core::DEFAULT_P_TEST)]
    ptest: usize,
    /// Lattice points per side
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// CONJP_THREADS caps internal parallelism. The numerics are sequential
/// (deterministic by construction), so any cap >= 1 is honored as-is.
fn threads_cap() -> Result<usize> {
    match std::env::var("CONJP_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| anyhow!("CONJP_THREADS must be a positive integer, got `{v}`"))?;
            if n == 0 {
                bail!("CONJP_THREADS must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(1),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Test(args) => cmd_test(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Kernels(args) => match args.command {
            KernelsCommand::Szego(args) => cmd_szego(args),
        },
        Command::Dump(args) => cmd_dump(args),
    }
}

fn load_domain(path: &Path) -> Result<CircleDomain> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading domain file {}", path.display()))?;
    Ok(domain_from_json(&text)?)
}

fn domain_json_value(domain: &CircleDomain) -> serde_json::Value {
    serde_json::from_str(&conjp_core::io::domain_to_json(domain)).expect("round trip")
}

fn parse_phi(text: &str, domain: &CircleDomain) -> Result<Expr> {
    if let Some(e) = builtins::lookup(text, domain) {
        return Ok(e);
    }
    Ok(parse_expr(text)?)
}

fn emit(json: &str, path: Option<&Path>, summary: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?;
            println!("{summary} (report: {})", p.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn make_tolerances(accept: f64, reject: f64) -> Result<Tolerances> {
    let tol = Tolerances {
        accept,
        reject,
        ..Tolerances::default()
    };
    tol.validate()?;
    Ok(tol)
}

/// Detects the unit concentric annulus, for which closed-form oracle
/// values are pinned.
fn unit_annulus_modulus(domain: &CircleDomain) -> Option<f64> {
    if domain.hole_count() != 1 {
        return None;
    }
    let outer = domain.outer();
    let hole = &domain.holes()[0];
    let concentric = (hole.center - outer.center).norm() < 1e-12;
    let unit = (outer.radius - 1.0).abs() < 1e-12 && outer.center.norm() < 1e-12;
    (concentric && unit).then_some(hole.radius)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let threads = threads_cap()?;
    let tol = make_tolerances(args.tol_accept, args.tol_reject)?;
    let domain = load_domain(&args.domain)?;
    let grid = BoundaryGrid::new(&domain, args.nodes)?;
    let fields = period_fields(&grid, args.degree)?;
    let family = TestFamily::laurent(&domain, args.ptest);
    let mut checks: Vec<Check> = Vec::new();

    let below = |name: &'static str, value: f64, threshold: f64, detail: String| Check {
        name,
        pass: value < threshold,
        value,
        threshold,
        detail,
    };

    // Quadrature sanity.
    let mut weight_err: f64 = 0.0;
    for k in 0..domain.circle_count() {
        let total: f64 = grid.circle_range(k).map(|i| grid.weights()[i]).sum();
        let exact = TAU * domain.circle(k).radius;
        weight_err = weight_err.max(((total - exact) / exact).abs());
    }
    checks.push(below(
        "quadrature_weights",
        weight_err,
        1e-12,
        "max relative error of circumference sums".into(),
    ));

    let outer = domain.outer();
    let exterior_pole = outer.center + 1.7 * outer.radius * Complex64::new(0.96, 0.28);
    let rational = BoundarySamples::from_fn(&grid, |z| {
        let mut v = 1.0 / (z - exterior_pole);
        for hole in domain.holes() {
            v += 1.0 / (z - hole.center);
        }
        v
    });
    let cauchy_zero = contour_integral(&grid, &rational)?.norm();
    checks.push(below(
        "quadrature_cauchy_theorem",
        cauchy_zero,
        1e-10,
        "contour integral of a function holomorphic on the closed domain".into(),
    ));

    // The canonical counterexample: conj(z) must be rejected.
    let conj_phi = sample_boundary(&builtins::conj_z(), &grid)?;
    let conj_rep = extendibility_test(&grid, &fields, &conj_phi, &family, &tol)?;
    checks.push(Check {
        name: "counterexample_conj_rejected",
        pass: conj_rep.verdict == Verdict::NotExtends,
        value: conj_rep.max_pairing,
        threshold: conj_rep.scaled_reject,
        detail: format!(
            "verdict {} with witness {}",
            conj_rep.verdict,
            conj_rep
                .witness
                .as_ref()
                .map(Witness::label)
                .unwrap_or_default()
        ),
    });

    if let Some(r) = unit_annulus_modulus(&domain) {
        let expected = TAU * (r * r - 1.0) / r.ln();
        let z_row = conj_rep
            .member_names
            .iter()
            .position(|n| n == "z")
            .map(|i| conj_rep.rho[i][0]);
        let (value, detail) = match z_row {
            Some(got) => (
                (got - expected).abs(),
                format!("period for g=z is {got:.9}, oracle {expected:.9}"),
            ),
            None => (f64::INFINITY, "family lacks the member z".into()),
        };
        checks.push(below(
            "counterexample_period_matches_oracle",
            value,
            1e-8,
            detail,
        ));
    }

    // Forward direction on seeded random members of A(bD).
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst_rho: f64 = 0.0;
    let mut worst_cauchy: f64 = 0.0;
    for _ in 0..args.samples {
        let phi_expr = random_extendible(&domain, &mut rng);
        let phi = sample_boundary(&phi_expr, &grid)?;
        let rep = extendibility_test(&grid, &fields, &phi, &family, &tol)?;
        worst_rho = worst_rho.max(rep.max_pairing);
        worst_cauchy = worst_cauchy.max(rep.max_cauchy);
    }
    checks.push(below(
        "forward_direction_periods",
        worst_rho,
        1e-8,
        format!("{} random extendible functions, seed {}", args.samples, args.seed),
    ));
    checks.push(below(
        "forward_direction_cauchy",
        worst_cauchy,
        1e-8,
        format!("{} random extendible functions, seed {}", args.samples, args.seed),
    ));

    // Three-route period agreement on random smooth data.
    let solver = DirichletSolver::new(&grid, args.degree)?;
    let mut route_worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = random_smooth_data(&grid, &mut rng);
        let rep = solver.solve(&phi)?;
        let periods = rep.conjugate_periods();
        for j in 0..domain.hole_count() {
            let p_pair = conjp_core::harmonic::period_pairing(&grid, &phi, &fields.fields[j])?;
            let p_flux = conjp_core::harmonic::flux_period(&grid, &phi, &fields.measures[j])?;
            route_worst = route_worst
                .max((periods.0[j] - p_pair).abs())
                .max((p_pair - p_flux).abs());
        }
    }
    checks.push(below(
        "three_route_period_agreement",
        route_worst,
        1e-8,
        "coefficients vs flux pairing vs contour pairing, 20 smooth data".into(),
    ));

    // Partition of unity over the full set of harmonic measures.
    let mut partition_worst: f64 = 0.0;
    {
        let measures: Vec<_> = (0..domain.circle_count())
            .map(|j| {
                let mut data = vec![0.0; grid.node_count()];
                for i in grid.circle_range(j) {
                    data[i] = 1.0;
                }
                solver.solve(
                    &conjp_core::geometry::RealBoundarySamples::from_values(&grid, data).unwrap(),
                )
            })
            .collect::<conjp_core::Result<Vec<_>>>()?;
        let mut count = 0;
        use rand::Rng;
        while count < 100 {
            let z = outer.center
                + outer.radius
                    * Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if !domain.contains_with_clearance(z, 0.02 * outer.radius) {
                continue;
            }
            count += 1;
            let total: f64 = measures.iter().map(|m| m.eval_unchecked(z)).sum();
            partition_worst = partition_worst.max((total - 1.0).abs());
        }
    }
    checks.push(below(
        "partition_of_unity",
        partition_worst,
        1e-9,
        "sum of all harmonic measures at 100 interior points".into(),
    ));

    // Kernel machinery.
    let op = KerzmanSteinOperator::new(&grid)?;
    let (szego, zeros) = szego_with_zeros(&op, &grid)?;
    checks.push(Check {
        name: "szego_zero_count",
        pass: zeros.points.len() == domain.hole_count(),
        value: zeros.points.len() as f64,
        threshold: domain.hole_count() as f64,
        detail: format!("base point {}", szego.base_point()),
    });

    if let Some(r) = unit_annulus_modulus(&domain) {
        let mut worst: f64 = 0.0;
        for (i, &z) in grid.nodes().iter().enumerate() {
            let oracle = conjp_core::oracles::annulus_szego_series(r, z, szego.base_point(), 400)?;
            worst = worst.max((szego.boundary_values()[i] - oracle).norm());
        }
        checks.push(below(
            "szego_matches_series_oracle",
            worst,
            1e-7,
            "boundary values against the Hardy-space series".into(),
        ));
    }

    let gar = garabedian_field(&grid, &szego)?;
    let a = szego.base_point();
    let ring: Vec<Complex64> = (0..8)
        .map(|t| {
            let theta = TAU * t as f64 / 8.0;
            let z = a + 1e-3 * Complex64::new(theta.cos(), theta.sin());
            (z - a) * gar.eval(z)
        })
        .collect();
    let residue_err = (pairwise_sum(&ring) / 8.0 - Complex64::new(1.0 / TAU, 0.0)).norm();
    checks.push(below(
        "garabedian_residue",
        residue_err,
        1e-5,
        "ring average of (z-a)L(z,a) against 1/(2π)".into(),
    ));

    let span = span_check(&grid, &op, &szego, &zeros, &fields.fields)?;
    checks.push(below(
        "span_identity",
        span.w_onto_products.max(span.products_onto_w),
        1e-5,
        format!(
            "residuals {:.3e}/{:.3e}, negative control {:.3e}",
            span.w_onto_products, span.products_onto_w, span.negative_control
        ),
    ));

    let czr = common_zero_check(&grid, &fields.fields)?;
    checks.push(Check {
        name: "common_zero_margin",
        pass: czr.lattice_margin > 0.0,
        value: czr.lattice_margin,
        threshold: 0.0,
        detail: "min over interior lattice of max_j |W_j|".into(),
    });

    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        domain: domain_json_value(&domain),
        params: ParamsReport {
            nodes: args.nodes,
            degree: args.degree,
            p_test: args.ptest,
            tol_accept: args.tol_accept,
            tol_reject: args.tol_reject,
            seed: args.seed,
            threads_cap: threads,
        },
        checks,
        pass,
    };
    let json = serde_json::to_string_pretty(&report)?;
    emit(
        &json,
        args.json.as_deref(),
        if pass { "verify: PASS" } else { "verify: FAIL" },
    )?;
    if !pass {
        let first = report.checks.iter().find(|c| !c.pass).expect("failed check");
        eprintln!(
            "verify failed at check `{}`: value {:.3e}, threshold {:.3e}",
            first.name, first.value, first.threshold
        );
        return Ok(1);
    }
    Ok(0)
}

fn cmd_test(args: TestArgs) -> Result<u8> {
    let threads = threads_cap()?;
    let tol = make_tolerances(args.tol_accept, args.tol_reject)?;
    let domain = load_domain(&args.domain)?;

    let (grid, phi) = match (&args.phi, &args.phi_samples) {
        (Some(text), None) => {
            let grid = BoundaryGrid::new(&domain, args.nodes)?;
            let expr = parse_phi(text, &domain)?;
            let phi = sample_boundary(&expr, &grid)?;
            (grid, phi)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading samples {}", path.display()))?;
            read_samples_csv(&domain, &text)?
        }
        _ => bail!("exactly one of --phi and --phi-samples is required"),
    };

    let fields = period_fields(&grid, args.degree)?;
    let family = TestFamily::laurent(&domain, args.ptest);
    let rep = extendibility_test(&grid, &fields, &phi, &family, &tol)?;

    let report = TestReport::new(
        domain_json_value(&domain),
        ParamsReport {
            nodes: grid.nodes_per_circle(),
            degree: args.degree,
            p_test: args.ptest,
            tol_accept: args.tol_accept,
            tol_reject: args.tol_reject,
            seed: args.seed,
            threads_cap: threads,
        },
        &rep,
    );
    let json = serde_json::to_string_pretty(&report)?;
    emit(&json, args.json.as_deref(), &format!("verdict: {}", rep.verdict))?;
    Ok(match rep.verdict {
        Verdict::Extends => 0,
        Verdict::NotExtends => 2,
        Verdict::Inconclusive => 3,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let domain = load_domain(&args.domain)?;
    let text = std::fs::read_to_string(&args.data)
        .with_context(|| format!("reading data {}", args.data.display()))?;
    let (grid, samples) = read_samples_csv(&domain, &text)?;
    let data = samples.try_into_real()?;
    let rep = DirichletSolver::new(&grid, args.degree)?.solve(&data)?;
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        command: "solve",
        degree: args.degree,
        a0: rep.a0(),
        log_coefficients: rep.log_coefficients().to_vec(),
        outer_coefficients: rep.outer_coefficients().iter().map(|&c| reports::pair(c)).collect(),
        hole_coefficients: rep
            .hole_coefficients()
            .iter()
            .map(|block| block.iter().map(|&c| reports::pair(c)).collect())
            .collect(),
        residual: rep.boundary_residual(),
        periods: rep.conjugate_periods().0,
    };
    let json = serde_json::to_string_pretty(&report)?;
    emit(
        &json,
        args.json.as_deref(),
        &format!("residual: {:.3e}", rep.boundary_residual()),
    )?;
    Ok(0)
}

fn cmd_szego(args: SzegoArgs) -> Result<u8> {
    let domain = load_domain(&args.domain)?;
    let grid = BoundaryGrid::new(&domain, args.nodes)?;
    let op = KerzmanSteinOperator::new(&grid)?;
    let (szego, zeros): (KernelField, SzegoZeros) = match &args.a {
        Some(text) => {
            let a = point::parse_point(text)?;
            let field = op.szego(a)?;
            let zeros = szego_zeros(&grid, &field)?;
            (field, zeros)
        }
        None => szego_with_zeros(&op, &grid)?,
    };

    let a = szego.base_point();
    let s_at_a = szego.eval(a);
    let mut reproducing_error: f64 = 0.0;
    for f in [|_: Complex64| Complex64::new(1.0, 0.0), |z: Complex64| z] {
        let terms: Vec<Complex64> = (0..grid.node_count())
            .map(|i| f(grid.nodes()[i]) * szego.boundary_values()[i].conj() * grid.weights()[i])
            .collect();
        reproducing_error = reproducing_error.max((pairwise_sum(&terms) - f(a)).norm());
    }
    let gar = garabedian_field(&grid, &szego)?;
    let ring: Vec<Complex64> = (0..8)
        .map(|t| {
            let theta = TAU * t as f64 / 8.0;
            let z = a + 1e-3 * Complex64::new(theta.cos(), theta.sin());
            (z - a) * gar.eval(z)
        })
        .collect();
    let garabedian_residue_error =
        (pairwise_sum(&ring) / 8.0 - Complex64::new(1.0 / TAU, 0.0)).norm();

    let report = SzegoReport {
        schema_version: SCHEMA_VERSION,
        command: "kernels-szego",
        a: reports::pair(a),
        nodes: args.nodes,
        expected_zero_count: domain.hole_count(),
        zero_count: zeros.points.len(),
        zeros: zeros.points.iter().map(|&z| reports::pair(z)).collect(),
        simplicity_margins: zeros.margins.clone(),
        s_at_a: s_at_a.re,
        skew_defect: op.skew_defect(),
        reproducing_error,
        garabedian_residue_error,
    };
    let json = serde_json::to_string_pretty(&report)?;
    emit(
        &json,
        args.json.as_deref(),
        &format!("{} zeros located", zeros.points.len()),
    )?;
    Ok(0)
}

fn cmd_dump(args: DumpArgs) -> Result<u8> {
    let domain = load_domain(&args.domain)?;
    let grid = BoundaryGrid::new(&domain, args.nodes)?;
    let m = domain.circle_count();
    if args.grid < 2 {
        bail!("lattice needs at least 2 points per side");
    }

    let solver = DirichletSolver::new(&grid, args.degree)?;
    let mut measures = Vec::with_capacity(m);
    for j in 0..m {
        let mut data = vec![0.0; grid.node_count()];
        for i in grid.circle_range(j) {
            data[i] = 1.0;
        }
        measures.push(
            solver.solve(&conjp_core::geometry::RealBoundarySamples::from_values(
                &grid, data,
            )?)?,
        );
    }
    let w_fields: Vec<_> = measures[..m - 1]
        .iter()
        .map(|rep| rep.completion_derivative())
        .collect();

    // Optional reconstruction columns, only when certified extendible.
    let mut phi_products: Option<(PeriodFields, Vec<BoundarySamples>)> = None;
    if let Some(text) = &args.phi {
        let expr = parse_phi(text, &domain)?;
        let phi = sample_boundary(&expr, &grid)?;
        let fields = period_fields(&grid, args.degree)?;
        let family = TestFamily::laurent(&domain, args.ptest);
        let rep = extendibility_test(&grid, &fields, &phi, &family, &Tolerances::default())?;
        if rep.verdict == Verdict::Extends {
            let products = (0..m - 1)
                .map(|j| {
                    BoundarySamples::from_values(
                        &grid,
                        phi.values()
                            .iter()
                            .zip(grid.nodes())
                            .map(|(&p, &z)| p * fields.fields[j].eval(z))
                            .collect(),
                    )
                })
                .collect::<conjp_core::Result<Vec<_>>>()?;
            phi_products = Some((fields, products));
        } else {
            eprintln!(
                "note: phi verdict is {}, reconstruction columns stay empty",
                rep.verdict
            );
        }
    }

    let mut out = String::new();
    out.push_str("x,y,inside");
    for j in 0..m {
        out.push_str(&format!(",h_{j}"));
    }
    for j in 0..m - 1 {
        out.push_str(&format!(",absW_{j}"));
    }
    if args.phi.is_some() {
        out.push_str(",phi_re,phi_im");
    }
    out.push('\n');

    let outer = domain.outer();
    let side = args.grid;
    for iy in 0..side {
        for ix in 0..side {
            let x = outer.center.re - outer.radius
                + 2.0 * outer.radius * ix as f64 / (side - 1) as f64;
            let y = outer.center.im - outer.radius
                + 2.0 * outer.radius * iy as f64 / (side - 1) as f64;
            let z = Complex64::new(x, y);
            let inside = domain.contains_with_clearance(z, 1e-9 * outer.radius);
            out.push_str(&format!("{x},{y},{}", u8::from(inside)));
            if inside {
                for rep in &measures {
                    out.push_str(&format!(",{}", rep.eval_unchecked(z)));
                }
                for w in &w_fields {
                    out.push_str(&format!(",{}", w.eval(z).norm()));
                }
                if let Some((fields, products)) = &phi_products {
                    let best = (0..m - 1)
                        .map(|j| (j, fields.fields[j].eval(z).norm()))
                        .max_by(|a, b| a.1.total_cmp(&b.1))
                        .expect("at least one hole");
                    let h = cauchy_transform_with_clearance(&grid, &products[best.0], z, 1e-12)?;
                    let v = h / fields.fields[best.0].eval(z);
                    out.push_str(&format!(",{},{}", v.re, v.im));
                } else if args.phi.is_some() {
                    out.push_str(",,");
                }
            } else {
                let value_cols = m + (m - 1) + if args.phi.is_some() { 2 } else { 0 };
                for _ in 0..value_cols {
                    out.push(',');
                }
            }
            out.push('\n');
        }
    }
    std::fs::write(&args.out, &out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} lattice rows to {}", side * side, args.out.display());
    Ok(0)
}
