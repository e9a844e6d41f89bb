//! Cross-module pipeline checks on the two test domains.

use num_complex::Complex64;

use conjp_core::expr::{parse_expr, sample_boundary, Expr};
use conjp_core::extendibility::{
    extendibility_test, reconstruct_extension, TestFamily, Tolerances, Verdict,
};
use conjp_core::geometry::{pairwise_sum, BoundaryGrid, BoundarySamples, Circle, CircleDomain};
use conjp_core::harmonic::period_fields;
use conjp_core::kernels::{szego_zeros, KerzmanSteinOperator};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn three_connected() -> CircleDomain {
    CircleDomain::from_circles(&[
        Circle::new(c(0.0, 0.0), 1.0),
        Circle::new(c(-0.05, -0.05), 0.15),
        Circle::new(c(0.45, 0.1), 0.18),
    ])
    .unwrap()
}

#[test]
fn conj_shifted_to_each_hole_center_is_flagged() {
    let d = three_connected();
    let g = BoundaryGrid::new(&d, 256).unwrap();
    let fields = period_fields(&g, 32).unwrap();
    let family = TestFamily::laurent(&d, 12);
    let tol = Tolerances::default();
    for hole in d.holes() {
        let phi = BoundarySamples::from_fn(&g, |z| (z - hole.center).conj());
        let rep = extendibility_test(&g, &fields, &phi, &family, &tol).unwrap();
        assert_eq!(rep.verdict, Verdict::NotExtends, "hole at {}", hole.center);
        assert!(rep.witness.is_some());
        assert!(rep.diagnostics_agree);
    }
}

#[test]
fn diagnostics_agree_on_library_examples() {
    for (domain, exprs) in [
        (
            CircleDomain::annulus(0.5),
            vec!["conj(z)", "z^2", "1/z", "z^-2 + 0.5/(z-0.3)*0"],
        ),
        (
            three_connected(),
            vec!["conj(z)", "z^2", "1/z", "z^3 - 2*z"],
        ),
    ] {
        let g = BoundaryGrid::new(&domain, 256).unwrap();
        let fields = period_fields(&g, 32).unwrap();
        let family = TestFamily::laurent(&domain, 12);
        for text in exprs {
            let phi = sample_boundary(&parse_expr(text).unwrap(), &g).unwrap();
            let rep =
                extendibility_test(&g, &fields, &phi, &family, &Tolerances::default()).unwrap();
            assert!(
                rep.diagnostics_agree,
                "diagnostics disagree for {text}: periods {:.3e}, cauchy {:.3e}",
                rep.max_pairing, rep.max_cauchy
            );
        }
    }
}

#[test]
fn reconstruction_converges_at_boundary_adjacent_points() {
    // Pull every 16th node inward by 0.05 of its circle radius; the
    // reconstructed extension must be within 1e-4 of the boundary value.
    let d = three_connected();
    let g = BoundaryGrid::new(&d, 256).unwrap();
    let fields = period_fields(&g, 32).unwrap();
    let family = TestFamily::laurent(&d, 12);
    let c1 = d.holes()[0].center;
    let phi_fn = |z: Complex64| 1.0 / (z - c1) + 0.5 * z;
    let phi = BoundarySamples::from_fn(&g, phi_fn);
    let rep = extendibility_test(&g, &fields, &phi, &family, &Tolerances::default()).unwrap();
    assert_eq!(rep.verdict, Verdict::Extends);
    let mut worst: f64 = 0.0;
    for i in (0..g.node_count()).step_by(16) {
        let k = g.circle_of(i);
        let radius = d.circle(k).radius;
        let z = g.nodes()[i] - 0.05 * radius * g.outward_normal(i);
        let v = reconstruct_extension(&g, &fields, &phi, &rep, z).unwrap();
        worst = worst.max((v - phi_fn(z)).norm());
    }
    assert!(worst < 1e-4, "worst boundary-adjacent error {worst:.3e}");
}

#[test]
fn szego_reproduces_all_family_members() {
    let d = three_connected();
    let g = BoundaryGrid::new(&d, 256).unwrap();
    let op = KerzmanSteinOperator::new(&g).unwrap();
    let a = conjp_core::kernels::default_base_point(&d);
    let s = op.szego(a).unwrap();
    let family = TestFamily::laurent(&d, 12);
    let mut worst: f64 = 0.0;
    for member in family.members() {
        let g_boundary = sample_boundary(&member.expr, &g).unwrap();
        let terms: Vec<Complex64> = (0..g.node_count())
            .map(|i| g_boundary.values()[i] * s.boundary_values()[i].conj() * g.weights()[i])
            .collect();
        let ip = pairwise_sum(&terms);
        let expected = member.expr.eval_at(a).unwrap();
        worst = worst.max((ip - expected).norm());
    }
    assert!(worst < 1e-6, "worst reproducing error {worst:.3e}");
}

#[test]
fn period_fields_have_no_boundary_zeros() {
    // Each W_j must stay away from zero on the boundary itself.
    let d = three_connected();
    let g = BoundaryGrid::new(&d, 256).unwrap();
    let fields = period_fields(&g, 32).unwrap();
    for (j, w) in fields.fields.iter().enumerate() {
        let margin = g
            .nodes()
            .iter()
            .map(|&z| w.eval(z).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(margin > 1e-2, "W_{j} boundary margin {margin:.3e}");
    }
}

#[test]
fn central_base_point_still_sees_one_zero() {
    // The zero count m−1 does not depend on the base point; a centrally
    // placed a on the symmetric annulus still gives exactly one zero.
    let d = CircleDomain::annulus(0.5);
    let g = BoundaryGrid::new(&d, 256).unwrap();
    let op = KerzmanSteinOperator::new(&g).unwrap();
    let a = 0.7 * c((std::f64::consts::PI / 3.0).cos(), (std::f64::consts::PI / 3.0).sin());
    let s = op.szego(a).unwrap();
    let zeros = szego_zeros(&g, &s).unwrap();
    assert_eq!(zeros.points.len(), 1);
    // Annulus Szegő zero sits at −R/conj(a).
    let expected = -c(0.5, 0.0) / a.conj();
    assert!(
        (zeros.points[0] - expected).norm() < 1e-8,
        "zero {} vs closed form {expected}",
        zeros.points[0]
    );
}

#[test]
fn random_phi_generator_is_deterministic() {
    use rand::SeedableRng;
    let d = three_connected();
    let build = || {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let e: Expr = conjp_core::expr::random_extendible(&d, &mut rng);
        e.to_string()
    };
    assert_eq!(build(), build());
}
