//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{agm, c, random_siegel, random_symplectic, random_vector, rng};
use num_complex::Complex64;
use rand::Rng;
use w9_core::geodesic::extract_ty_from_cover;
use w9_core::geodesic::{main_series, solve_y, SolverConfig};
use w9_core::periods::{
    build_cycles, integrate_arc, period_matrix, ArcPath, HyperellipticCurve, Layout,
};
use w9_core::quadrature::QuadConfig;
use w9_core::reference;
use w9_core::siegel::{symplectic_check, RiemannMatrix};
use w9_core::theta::{
    char_transform, modular_magnitude_check, theta_char, theta_integer_characteristic, theta_null,
    Characteristic, Parity, TruncationPolicy,
};
use w9_core::w9::{
    base_from_cover, cirre_classify, cover_shape_extract, curve_qs, double_cover, order4_quartic,
    w9_involution_conditions, GroupLabel, CONDITION_TOL,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome, String> {
    Ok(Outcome { pass, detail })
}

fn ch(s: &str) -> Characteristic {
    s.parse().unwrap()
}

fn fixture_theta() -> Result<Outcome, String> {
    let policy = TruncationPolicy::with_tail_tol(1e-14);
    let z = reference::zhat1();
    let odd_like = theta_null(&ch("111;101"), &z, &policy)
        .map_err(|e| e.to_string())?
        .norm();
    let origin = theta_null(&ch("000;000"), &z, &policy)
        .map_err(|e| e.to_string())?
        .norm();
    outcome(
        odd_like < 1e-10 && origin > 0.5,
        format!("|θ[111;101]| = {odd_like:.2e} (< 1e-10), |θ[000;000]| = {origin:.4} (> 0.5)"),
    )
}

fn geodesic_root() -> Result<Outcome, String> {
    let p = solve_y(1.0, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let expected = RiemannMatrix::from_rows(&[
        vec![c(1.0, 5.0 / 3.0), c(0.0, 4.0 / 3.0)],
        vec![c(0.0, 4.0 / 3.0), c(0.0, 5.0 / 3.0)],
    ])
    .map_err(|e| e.to_string())?;
    let dy = (p.y - 4.0 / 3.0).abs();
    let dz = p.z.matrix().max_abs_diff(expected.matrix());
    outcome(
        dy < 1e-8 && dz < 1e-8,
        format!("|y − 4/3| = {dy:.2e}, max |Z − Z₁| = {dz:.2e} (< 1e-8)"),
    )
}

fn quadrature_fixture() -> Result<Outcome, String> {
    let run = || -> w9_core::Result<(f64, f64)> {
        let quad = QuadConfig::default();
        let base = curve_qs(reference::s_three_square())?;
        let cover = double_cover(&base)?;
        let zhat = period_matrix(&cover, &build_cycles(&cover, Layout::CoverGenus3)?, &quad)?;
        let z = period_matrix(
            &base,
            &build_cycles(&base, Layout::RealMCurveGenus2)?,
            &quad,
        )?;
        Ok((
            zhat.matrix().max_abs_diff(reference::zhat1().matrix()),
            z.matrix().max_abs_diff(reference::z1().matrix()),
        ))
    };
    let (dhat, dz) = run().map_err(|e| e.to_string())?;
    outcome(
        dhat < 1e-6 && dz < 1e-6,
        format!("max |Ẑ − Ẑ₁| = {dhat:.2e}, max |Z − Z₁| = {dz:.2e} (< 1e-6)"),
    )
}

fn sweep() -> Result<Outcome, String> {
    let quad = QuadConfig::default();
    let policy = TruncationPolicy::with_tail_tol(1e-12);
    let mut worst_series: f64 = 0.0;
    let mut worst_base: f64 = 0.0;
    for i in 0..10 {
        let s = 0.05 + 0.45 * (i as f64 + 0.5) / 10.0;
        let run = || -> w9_core::Result<(f64, f64)> {
            let base = curve_qs(s)?;
            let cover = double_cover(&base)?;
            let zhat = period_matrix(&cover, &build_cycles(&cover, Layout::CoverGenus3)?, &quad)?;
            cover_shape_extract(&zhat, 1e-6)?;
            let (t, y) = extract_ty_from_cover(&zhat, 1e-6)?;
            let series = main_series(t, y, &policy)?.norm();
            let direct = period_matrix(
                &base,
                &build_cycles(&base, Layout::RealMCurveGenus2)?,
                &quad,
            )?;
            Ok((
                series,
                base_from_cover(&zhat)?
                    .matrix()
                    .max_abs_diff(direct.matrix()),
            ))
        };
        let (series, base_diff) = run().map_err(|e| format!("s = {s}: {e}"))?;
        worst_series = worst_series.max(series);
        worst_base = worst_base.max(base_diff);
    }
    outcome(
        worst_series < 1e-6 && worst_base < 1e-6,
        format!("10 values of s: max |S(t, y)| = {worst_series:.2e}, max base mismatch = {worst_base:.2e} (< 1e-6)"),
    )
}

fn dot(a: &[i64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| *x as f64 * y).sum()
}

/// Worst residual of the quasi-periodicity, mod-2 and parity identities on one sample.
fn theta_identities(r: &mut impl Rng, g: usize, policy: &TruncationPolicy) -> w9_core::Result<f64> {
    let z = random_siegel(r, g, 0.4);
    let v = random_vector(r, g, 0.5);
    let m: Vec<i64> = (0..g).map(|_| r.random_range(0..2)).collect();
    let n: Vec<i64> = (0..g).map(|_| r.random_range(0..2)).collect();
    let p: Vec<i64> = (0..g).map(|_| r.random_range(-2..=2)).collect();
    let q: Vec<i64> = (0..g).map(|_| r.random_range(-2..=2)).collect();
    let chr = Characteristic::reduced(&m, &n)?;
    let value = theta_char(&chr, &v, &z, policy)?;
    let scale = 1.0 + value.norm();
    let i = c(0.0, 1.0);
    let mq = m.iter().zip(&q).map(|(a, b)| a * b).sum::<i64>() as f64;

    let zp = z
        .matrix()
        .mul_vec(&p.iter().map(|&x| c(x as f64, 0.0)).collect::<Vec<_>>())?;
    let shifted: Vec<Complex64> = (0..g).map(|k| v[k] + zp[k] + q[k] as f64).collect();
    let half_n: Vec<Complex64> = (0..g).map(|k| v[k] + n[k] as f64 / 2.0).collect();
    let factor = (PI * i * dot(&p, &zp) + 2.0 * PI * i * dot(&p, &half_n) - PI * i * mq).exp();
    let quasi = (value - factor * theta_char(&chr, &shifted, &z, policy)?).norm();

    let m2: Vec<i64> = (0..g).map(|k| m[k] + 2 * p[k]).collect();
    let n2: Vec<i64> = (0..g).map(|k| n[k] + 2 * q[k]).collect();
    let lifted = theta_integer_characteristic(&m2, &n2, &v, &z, policy)?.value;
    let mod2 = (lifted - (PI * i * mq).exp() * value).norm();

    let neg: Vec<Complex64> = v.iter().map(|x| -x).collect();
    let sign = if chr.parity() == Parity::Even {
        1.0
    } else {
        -1.0
    };
    let parity = (theta_char(&chr, &neg, &z, policy)? - sign * value).norm();

    Ok(quasi.max(mod2).max(parity) / scale)
}

fn theta_properties() -> Result<Outcome, String> {
    let policy = TruncationPolicy::with_tail_tol(1e-14);
    let mut r = rng(0x7e7a);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        worst = worst.max(theta_identities(&mut r, 1 + k % 3, &policy).map_err(|e| e.to_string())?);
    }
    let z = random_siegel(&mut r, 3, 0.4);
    let mut odd_worst: f64 = 0.0;
    let (mut even, mut odd) = (0, 0);
    for chr in Characteristic::all(3) {
        if chr.parity() == Parity::Even {
            even += 1;
        } else {
            odd += 1;
            odd_worst = odd_worst.max(
                theta_null(&chr, &z, &policy)
                    .map_err(|e| e.to_string())?
                    .norm(),
            );
        }
    }
    outcome(
        worst < 1e-9 && odd_worst < 1e-11 && (even, odd) == (36, 28),
        format!("100 samples: worst identity residual {worst:.2e} (< 1e-9); odd nulls ≤ {odd_worst:.2e} (< 1e-11); census {even}/{odd}"),
    )
}

fn symplectic_suite() -> Result<Outcome, String> {
    let mats = [
        reference::n_matrix(),
        reference::m_geodesic(),
        reference::m2(),
        reference::m3(),
        reference::m4(),
    ];
    let all_symplectic = mats
        .iter()
        .all(|m| symplectic_check(&m.to_rows()).unwrap_or(false));

    let target = ch("111;101");
    let fixed = |m: &w9_core::siegel::SymplecticMatrix, x: &Characteristic| {
        char_transform(m, x).map(|y| y == *x)
    };
    let fixes_target = fixed(&reference::m2(), &target).map_err(|e| e.to_string())?
        && fixed(&reference::m3(), &target).map_err(|e| e.to_string())?;
    let mut m2_forced = true;
    for x in Characteristic::all(3).filter(|x| x.parity() == Parity::Even) {
        let all3 = [reference::m2(), reference::m3(), reference::m4()]
            .iter()
            .map(|m| fixed(m, &x))
            .collect::<w9_core::Result<Vec<bool>>>()
            .map_err(|e| e.to_string())?;
        if all3.iter().all(|&b| b) && x.m()[1] != 1 {
            m2_forced = false;
        }
    }

    let policy = TruncationPolicy::with_tail_tol(1e-14);
    let mut r = rng(0x5e9);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let g = 1 + k % 3;
        let z = random_siegel(&mut r, g, 0.5);
        let v = random_vector(&mut r, g, 0.3);
        let m = random_symplectic(&mut r, g, 2);
        let chr = Characteristic::reduced(
            &(0..g).map(|_| r.random_range(0..2)).collect::<Vec<i64>>(),
            &(0..g).map(|_| r.random_range(0..2)).collect::<Vec<i64>>(),
        )
        .map_err(|e| e.to_string())?;
        worst = worst
            .max(modular_magnitude_check(&m, &chr, &v, &z, &policy).map_err(|e| e.to_string())?);
    }
    outcome(
        all_symplectic && fixes_target && m2_forced && worst < 1e-8,
        format!(
            "symplectic: {all_symplectic}; [111;101] fixed: {fixes_target}; m₂ ≡ 1 forced: {m2_forced}; \
             modular magnitude ≤ {worst:.2e} (< 1e-8)"
        ),
    )
}

fn automorphisms() -> Result<Outcome, String> {
    let report =
        cirre_classify(1.0 / 3.0, 0.5, 2.0 / 3.0, CONDITION_TOL).map_err(|e| e.to_string())?;
    let groups_ok = report.real_group == GroupLabel::D6 && report.complex_group == GroupLabel::G24;
    let holding = |s: f64| -> Result<Vec<&'static str>, String> {
        Ok(w9_involution_conditions(s, CONDITION_TOL)
            .map_err(|e| e.to_string())?
            .iter()
            .filter(|c| c.holds)
            .map(|c| c.id)
            .collect())
    };
    let at_fixture = holding(reference::s_three_square())?;
    let at_01 = holding(0.1)?;
    let at_045 = holding(0.45)?;
    let quartic = order4_quartic(reference::s_three_square()).abs();
    outcome(
        groups_ok && at_fixture == ["A", "D"] && at_01.is_empty() && at_045.is_empty() && quartic < 1e-9,
        format!(
            "(1/3, 1/2, 2/3) → ({:?}, {:?}); conditions at 2−√3: {at_fixture:?}, at 0.1: {at_01:?}, at 0.45: {at_045:?}; \
             quartic {quartic:.2e} (< 1e-9)",
            report.real_group, report.complex_group
        ),
    )
}

fn elliptic_oracle() -> Result<Outcome, String> {
    let run = || -> w9_core::Result<(f64, f64)> {
        let curve = HyperellipticCurve::from_real(&[-1.0, 0.0, 1.0])?;
        let quad = QuadConfig::default();
        let tau = period_matrix(&curve, &build_cycles(&curve, Layout::Elliptic)?, &quad)?.get(0, 0);
        // Both half-periods equal π / AGM(1, √2).
        let oracle = PI / agm(1.0, 2f64.sqrt());
        let left = integrate_arc(
            &curve,
            &ArcPath::segment(c(-1.0, 0.0), c(0.0, 0.0)),
            1,
            1,
            &quad,
        )?
        .norm();
        let right = integrate_arc(
            &curve,
            &ArcPath::segment(c(0.0, 0.0), c(1.0, 0.0)),
            1,
            1,
            &quad,
        )?
        .norm();
        Ok((
            (tau - c(0.0, 1.0)).norm(),
            (left - oracle).abs().max((right - oracle).abs()),
        ))
    };
    let (dtau, dk) = run().map_err(|e| e.to_string())?;
    outcome(
        dtau < 1e-9 && dk < 1e-10,
        format!("|τ − i| = {dtau:.2e} (< 1e-9), AGM mismatch {dk:.2e} (< 1e-10)"),
    )
}

fn series_reality() -> Result<Outcome, String> {
    let policy = TruncationPolicy::with_tail_tol(1e-14);
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let t = 1.0 + 0.5 * i as f64;
        for j in 0..5 {
            // y ranges over (2t/3, 2t/3 + 2].
            let y = 2.0 * t / 3.0 + 0.4 * (j + 1) as f64;
            worst = worst.max(
                main_series(t, y, &policy)
                    .map_err(|e| e.to_string())?
                    .im
                    .abs(),
            );
        }
    }
    outcome(
        worst < 1e-12,
        format!("5×5 grid: max |Im S| = {worst:.2e} (< 1e-12)"),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome, String>, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("theta-null fixture", fixture_theta, Duration::from_secs(1)),
        (
            "geodesic root at t = 1",
            geodesic_root,
            Duration::from_secs(1),
        ),
        (
            "quadrature fixture",
            quadrature_fixture,
            Duration::from_secs(10),
        ),
        (
            "cross-parameterization sweep",
            sweep,
            Duration::from_secs(60),
        ),
        (
            "theta property suite",
            theta_properties,
            Duration::from_secs(20),
        ),
        (
            "symplectic suite",
            symplectic_suite,
            Duration::from_secs(10),
        ),
        ("automorphism suite", automorphisms, Duration::from_secs(1)),
        ("elliptic oracle", elliptic_oracle, Duration::from_secs(1)),
        (
            "reality of the main series",
            series_reality,
            Duration::from_secs(5),
        ),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        let timing = format!("{:.3}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        println!(
            "criterion {}: {} {name}: {detail} [{timing}]",
            k + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
