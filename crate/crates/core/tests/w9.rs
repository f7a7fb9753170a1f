mod common;

use common::{c, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use w9_core::periods::{build_cycles, period_matrix, Layout};
use w9_core::quadrature::QuadConfig;
use w9_core::reference;
use w9_core::siegel::RiemannMatrix;
use w9_core::theta::TruncationPolicy;
use w9_core::w9::{
    base_from_cover, cirre_classify, classify_real_mcurve, cover_shape_extract, cover_to_base,
    curve_pu, curve_qs, double_cover, f3, f3_point, g_of_s, normalize_branch_points,
    order4_quartic, silhol_order4_period, theta_membership_check, u_dual, w9_cubic,
    w9_involution_conditions, GroupLabel, ProjectivePoint, W9Param, CONDITION_TOL,
};
use w9_core::Error;

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn finite(p: ProjectivePoint) -> Complex64 {
    p.finite().expect("finite point")
}

fn cover_matrix(s: f64) -> RiemannMatrix {
    let cover = double_cover(&curve_qs(s).unwrap()).unwrap();
    period_matrix(
        &cover,
        &build_cycles(&cover, Layout::CoverGenus3).unwrap(),
        &QuadConfig::default(),
    )
    .unwrap()
}

fn s_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| 0.05 + 0.45 * (i as f64 + 0.5) / n as f64)
}

#[test]
fn order_three_mobius_map() {
    for x in [c(0.3, 0.0), c(-2.0, 0.5), c(0.1, -1.7)] {
        let back = finite(f3_point(f3_point(f3(x))));
        assert!((back - x).norm() < 1e-13, "{x} -> {back}");
    }
    let orbit: Vec<Complex64> = [f3(c(0.0, 0.0)), f3_point(f3(c(0.0, 0.0)))]
        .into_iter()
        .map(finite)
        .collect();
    assert!((orbit[0] - c(SQRT3, 0.0)).norm() < 1e-15);
    assert!((orbit[1] - c(-SQRT3, 0.0)).norm() < 1e-14);

    let from_inf = finite(f3_point(ProjectivePoint::Infinity));
    assert!((from_inf - c(-1.0 / SQRT3, 0.0)).norm() < 1e-15);
    assert!((finite(f3(from_inf)) - c(1.0 / SQRT3, 0.0)).norm() < 1e-15);
    assert_eq!(f3(c(1.0 / SQRT3, 0.0)), ProjectivePoint::Infinity);

    assert!((finite(f3(c(0.0, 1.0))) - c(0.0, 1.0)).norm() < 1e-15);
}

#[test]
fn g_is_even_and_invariant() {
    let s0 = reference::s_three_square();
    assert!((g_of_s(s0).unwrap() + 18.0).abs() < 1e-12);
    for k in 1..40 {
        let s = k as f64 * (1.0 / SQRT3) / 40.0;
        let g = g_of_s(s).unwrap();
        assert!(g < -9.0, "g({s}) = {g}");
        assert!((g_of_s(-s).unwrap() - g).abs() < 1e-12 * g.abs());
        let image = finite(f3(c(s, 0.0))).re;
        assert!(
            (g_of_s(image).unwrap() - g).abs() < 1e-9 * g.abs(),
            "s = {s}"
        );
    }
    assert!(matches!(g_of_s(1.0 / SQRT3), Err(Error::Pole(_))));
}

#[test]
fn dual_parameter() {
    assert!((u_dual(-18.0).unwrap() + 18.0).abs() < 1e-14);
    assert!((u_dual(-27.0).unwrap() + 13.5).abs() < 1e-14);
    for u in [-1000.0, -50.0, -19.0, -18.5] {
        let d = u_dual(u).unwrap();
        assert!(d > -18.0 && d < -9.0, "{u} -> {d}");
        assert!((u_dual(d).unwrap() - u).abs() < 1e-10 * u.abs());
    }
    assert!(matches!(u_dual(-9.0), Err(Error::Pole(_))));
}

#[test]
fn pu_roots_at_minus_eighteen() {
    let u = c(-18.0, 0.0);
    let curve = curve_pu(u).unwrap();
    let pts = curve.branch_points();
    assert_eq!(pts.len(), 5);
    for z in &pts[2..] {
        assert_eq!(z.im, 0.0);
        let scale = 1.0 + z.norm().powi(3) + 18.0 * z.norm().powi(2);
        assert!(w9_cubic(u, *z).norm() < 1e-12 * scale, "{z}");
    }
}

#[test]
fn qs_is_shifted_pu() {
    for k in 0..50 {
        let s = 0.01 + 0.55 * k as f64 / 50.0;
        let p = W9Param::new(s).unwrap();
        let mut shifted: Vec<f64> = curve_pu(c(p.u, 0.0))
            .unwrap()
            .branch_points()
            .iter()
            .map(|z| z.re - 1.0)
            .collect();
        shifted.sort_by(f64::total_cmp);
        let mut direct = p.roots().to_vec();
        direct.sort_by(f64::total_cmp);
        for (x, y) in shifted.iter().zip(&direct) {
            assert!(
                (x - y).abs() < 1e-9 * (1.0 + y.abs()),
                "s = {s}: {shifted:?} vs {direct:?}"
            );
        }
    }
}

#[test]
fn covering_map_lands_on_the_base() {
    let base = curve_qs(0.3).unwrap();
    let cover = double_cover(&base).unwrap();
    assert_eq!(cover.genus(), 3);
    let mut r = rng(3);
    for _ in 0..20 {
        let z = c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let w = cover.eval(z).sqrt();
        let (x, y) = cover_to_base(z, w);
        assert!((y * y - base.eval(x)).norm() < 1e-10 * (1.0 + y.norm_sqr()));
    }
}

#[test]
fn shape_extraction() {
    let shape = cover_shape_extract(&reference::zhat1(), 1e-12).unwrap();
    assert!(shape.matrix().max_abs_diff(reference::zhat1().matrix()) < 1e-15);
    let identity = RiemannMatrix::scaled_identity(3, 1.0).unwrap();
    assert!(matches!(
        cover_shape_extract(&identity, 1e-6),
        Err(Error::ShapeMismatch { .. })
    ));
    assert!(matches!(
        cover_shape_extract(&reference::z1(), 1e-6),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn base_from_cover_matches_direct_quadrature() {
    let s = 0.15;
    let base = curve_qs(s).unwrap();
    let direct = period_matrix(
        &base,
        &build_cycles(&base, Layout::RealMCurveGenus2).unwrap(),
        &QuadConfig::default(),
    )
    .unwrap();
    let derived = base_from_cover(&cover_matrix(s)).unwrap();
    assert!(derived.matrix().max_abs_diff(direct.matrix()) < 1e-8);
}

#[test]
fn cover_matrices_have_imaginary_shape() {
    for s in s_grid(8) {
        let zhat = cover_matrix(s);
        let shape = cover_shape_extract(&zhat, 1e-8).unwrap();
        assert!(
            shape.z1.re.abs() < 1e-8 && shape.z13.re.abs() < 1e-8,
            "s = {s}"
        );
    }
}

#[test]
fn membership_along_the_family() {
    let policy = TruncationPolicy::with_tail_tol(1e-14);
    let zhat = cover_matrix(0.2);
    assert!(theta_membership_check(&zhat, &policy, 1e-8).unwrap() < 1e-7);

    let mut shape = cover_shape_extract(&zhat, 1e-8).unwrap();
    shape.z13 += c(0.0, 0.05);
    let off = shape.riemann().unwrap();
    assert!(theta_membership_check(&off, &policy, 1e-8).unwrap() > 1e-3);
}

#[test]
fn classification_examples() {
    let generic = cirre_classify(0.2, 0.5, 0.7, CONDITION_TOL).unwrap();
    assert_eq!(
        (generic.real_group, generic.complex_group, generic.case),
        (GroupLabel::Z2, GroupLabel::Z2, "1c")
    );

    let one = cirre_classify(0.35, 0.5, 0.7, CONDITION_TOL).unwrap();
    assert_eq!(
        (one.real_group, one.complex_group),
        (GroupLabel::D2, GroupLabel::D2)
    );

    let extra = cirre_classify(0.3, 0.5, 0.7, CONDITION_TOL).unwrap();
    assert_eq!(
        (extra.real_group, extra.complex_group, extra.case),
        (GroupLabel::D2, GroupLabel::D4, "2a")
    );

    assert!(cirre_classify(0.5, 0.4, 0.7, CONDITION_TOL).is_err());
}

#[test]
fn family_classification() {
    let (_, fixture) = classify_real_mcurve(
        &W9Param::new(reference::s_three_square()).unwrap().roots(),
        CONDITION_TOL,
    )
    .unwrap();
    assert_eq!(
        (fixture.real_group, fixture.complex_group),
        (GroupLabel::D2, GroupLabel::D4)
    );
    for s in [0.1, 0.45] {
        let (_, report) =
            classify_real_mcurve(&W9Param::new(s).unwrap().roots(), CONDITION_TOL).unwrap();
        assert_eq!(report.complex_group, GroupLabel::Z2, "s = {s}");
    }

    let ids: Vec<_> = w9_involution_conditions(reference::s_three_square(), CONDITION_TOL)
        .unwrap()
        .into_iter()
        .filter(|c| c.holds)
        .map(|c| c.id)
        .collect();
    assert_eq!(ids, ["A", "D"]);
}

#[test]
fn normal_form_of_pu() {
    let pts: Vec<f64> = curve_pu(c(-18.0, 0.0))
        .unwrap()
        .branch_points()
        .iter()
        .map(|z| z.re)
        .collect();
    let from_pu = normalize_branch_points(&pts).unwrap();
    let from_qs =
        normalize_branch_points(&W9Param::new(reference::s_three_square()).unwrap().roots())
            .unwrap();
    for (x, y) in [
        (from_pu.0, from_qs.0),
        (from_pu.1, from_qs.1),
        (from_pu.2, from_qs.2),
    ] {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(from_pu.0 > 0.0 && from_pu.2 < 1.0);
}

#[test]
fn order_four_quartic() {
    let s0 = reference::s_three_square();
    assert!(order4_quartic(s0).abs() < 1e-9);
    assert!(order4_quartic(0.0) < 0.0);
    assert!(order4_quartic(1.0 / SQRT3) > 0.0);
}

#[test]
fn order_four_periods() {
    let z = silhol_order4_period(1.0).unwrap();
    assert!(
        z.matrix()
            .max_abs_diff(RiemannMatrix::scaled_identity(2, 1.0).unwrap().matrix())
            < 1e-15
    );
    let z = silhol_order4_period(2.0).unwrap();
    assert!((z.get(0, 0) - c(0.0, 5.0 / 3.0)).norm() < 1e-15);
    assert!((z.get(0, 1) - c(0.0, -4.0 / 3.0)).norm() < 1e-15);
    let z = silhol_order4_period(0.6).unwrap();
    assert!((z.get(0, 0) - c(0.0, 2.6)).norm() < 1e-14);
    assert!((z.get(0, 1) - c(0.0, 2.4)).norm() < 1e-14);
    // Swapping the two sides of the L gives the same surface.
    for lambda in [1.5, 3.0] {
        let z = silhol_order4_period(lambda).unwrap();
        assert_eq!(z.get(0, 0), z.get(1, 1));
        assert!(z.get(0, 0).im > z.get(0, 1).im.abs());
    }
    assert!(silhol_order4_period(0.5).is_err());
}

/// A real Möbius map applied to the five finite roots and `∞`, returning the
/// five images that stay finite.
fn moved_roots(roots: &[f64], scale: f64, shift: f64, invert_at: Option<usize>) -> Vec<f64> {
    let affine: Vec<f64> = roots.iter().map(|x| scale * x + shift).collect();
    match invert_at {
        None => affine,
        Some(k) => {
            let pole = affine[k];
            let mut out: Vec<f64> = affine
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, x)| 1.0 / (x - pole))
                .collect();
            // ∞ goes to 0.
            out.push(0.0);
            out
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_is_mobius_invariant(
        which in 0usize..3,
        scale in prop_oneof![-3.0..-0.3, 0.3..3.0f64],
        shift in -2.0..2.0f64,
        invert_at in proptest::option::of(0usize..5),
    ) {
        let roots: Vec<f64> = match which {
            0 => W9Param::new(reference::s_three_square()).unwrap().roots().to_vec(),
            1 => vec![0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0],
            _ => W9Param::new(0.1).unwrap().roots().to_vec(),
        };
        let (_, before) = classify_real_mcurve(&roots, 1e-8).unwrap();
        let (_, after) = classify_real_mcurve(&moved_roots(&roots, scale, shift, invert_at), 1e-8).unwrap();
        prop_assert_eq!(before.real_group, after.real_group);
        prop_assert_eq!(before.complex_group, after.complex_group);
    }
}
