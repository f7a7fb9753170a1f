mod common;

use common::{c, random_siegel, random_symplectic, random_vector, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;
use w9_core::reference;
use w9_core::siegel::{RiemannMatrix, SymplecticMatrix};
use w9_core::theta::{
    char_pullback, char_transform, modular_magnitude_check, parity, riemann_theta, theta_char,
    theta_integer_characteristic, theta_null, Characteristic, Parity, TruncationPolicy,
};

fn policy() -> TruncationPolicy {
    TruncationPolicy::with_tail_tol(1e-14)
}

fn zeros(g: usize) -> Vec<Complex64> {
    vec![c(0.0, 0.0); g]
}

fn ch(s: &str) -> Characteristic {
    s.parse().unwrap()
}

#[test]
fn genus_one_at_i_matches_direct_sum() {
    let oracle: f64 = (-50i32..=50).map(|k| (-PI * f64::from(k * k)).exp()).sum();
    let z = RiemannMatrix::scaled_identity(1, 1.0).unwrap();
    let v = riemann_theta(&zeros(1), &z, &policy()).unwrap();
    assert!((v - c(oracle, 0.0)).norm() < 1e-14);
    assert!((v.re - 1.086_434_811_213_308).abs() < 1e-14);
}

#[test]
fn genus_three_scaled_identity() {
    let one_dim: f64 = (-3i32..=3)
        .map(|k| (-10.0 * PI * f64::from(k * k)).exp())
        .sum();
    let z = RiemannMatrix::scaled_identity(3, 10.0).unwrap();
    let v = riemann_theta(&zeros(3), &z, &policy()).unwrap();
    assert!((v.re - one_dim.powi(3)).abs() < 1e-15);
    assert!((v.re - (1.0 + 6.0 * (-10.0 * PI).exp())).abs() < 1e-20);
}

#[test]
fn odd_genus_one_vanishes() {
    for scale in [0.5, 1.0, 2.5] {
        let z = RiemannMatrix::scaled_identity(1, scale).unwrap();
        assert!(theta_null(&ch("1;1"), &z, &policy()).unwrap().norm() < 1e-15);
    }
}

#[test]
fn reference_theta_nulls() {
    let zhat = reference::zhat1();
    assert!(theta_null(&ch("111;101"), &zhat, &policy()).unwrap().norm() < 1e-10);
    assert!(theta_null(&ch("000;000"), &zhat, &policy()).unwrap().norm() > 0.5);
}

#[test]
fn parity_census() {
    assert_eq!(parity(&ch("000;000")), Parity::Even);
    assert_eq!(parity(&ch("111;101")), Parity::Even);
    assert_eq!(parity(&ch("1;1")), Parity::Odd);
    let all: Vec<_> = Characteristic::all(3).collect();
    assert_eq!(all.len(), 64);
    assert_eq!(
        all.iter().filter(|c| c.parity() == Parity::Even).count(),
        36
    );
}

#[test]
fn odd_characteristics_vanish_at_origin() {
    let mut r = rng(7);
    let z = random_siegel(&mut r, 3, 0.5);
    for chr in Characteristic::all(3).filter(|c| c.parity() == Parity::Odd) {
        assert!(
            theta_null(&chr, &z, &policy()).unwrap().norm() < 1e-12,
            "{chr}"
        );
    }
}

#[test]
fn characteristic_transport() {
    let target = ch("111;101");
    let id = SymplecticMatrix::identity(3);
    assert_eq!(char_transform(&id, &target).unwrap(), target);
    assert_eq!(char_transform(&reference::m2(), &target).unwrap(), target);
    assert_eq!(char_transform(&reference::m3(), &target).unwrap(), target);
    assert_eq!(char_transform(&reference::m4(), &target).unwrap(), target);

    // Among the even characteristics fixed by the order-2 and order-3 maps,
    // the order-4 map keeps only those with m₂ = 1.
    let fixed_by = |m: &SymplecticMatrix, x: &Characteristic| char_transform(m, x).unwrap() == *x;
    let fixed_23: Vec<_> = Characteristic::all(3)
        .filter(|x| {
            x.parity() == Parity::Even
                && fixed_by(&reference::m2(), x)
                && fixed_by(&reference::m3(), x)
        })
        .collect();
    assert!(fixed_23.iter().any(|x| x.m()[1] == 0));
    for x in fixed_23.iter().filter(|x| fixed_by(&reference::m4(), x)) {
        assert_eq!(x.m()[1], 1, "{x}");
    }
}

#[test]
fn modular_magnitude_examples() {
    let z = reference::zhat1();
    let zero = zeros(3);
    let id = SymplecticMatrix::identity(3);
    assert!(modular_magnitude_check(&id, &ch("011;110"), &zero, &z, &policy()).unwrap() < 1e-14);

    let two_i = RiemannMatrix::scaled_identity(1, 2.0).unwrap();
    let r = modular_magnitude_check(
        &SymplecticMatrix::j(1),
        &ch("0;0"),
        &zeros(1),
        &two_i,
        &policy(),
    )
    .unwrap();
    assert!(r < 1e-10);

    // Independent oracle for that case: θ(0, i/2) = √2 θ(0, 2i).
    let direct = |t: f64| -> f64 {
        (-40i32..=40)
            .map(|k| (-PI * t * f64::from(k * k)).exp())
            .sum()
    };
    assert!((direct(0.5) - 2f64.sqrt() * direct(2.0)).abs() < 1e-14);

    assert!(
        modular_magnitude_check(&reference::m3(), &ch("111;101"), &zero, &z, &policy()).unwrap()
            < 1e-8
    );
}

#[test]
fn truncation_soundness() {
    let mut r = rng(11);
    for g in 1..=3 {
        let z = random_siegel(&mut r, g, 0.3);
        let v = random_vector(&mut r, g, 0.5);
        let coarse = theta_char(
            &ch(&format!("{};{}", "1".repeat(g), "0".repeat(g))),
            &v,
            &z,
            &policy(),
        )
        .unwrap();
        let fine = theta_char(
            &ch(&format!("{};{}", "1".repeat(g), "0".repeat(g))),
            &v,
            &z,
            &TruncationPolicy::with_tail_tol(1e-30),
        )
        .unwrap();
        assert!((coarse - fine).norm() < 10.0 * 1e-14 * (1.0 + fine.norm()));
    }
}

#[test]
fn characteristic_errors() {
    assert!("11;1".parse::<Characteristic>().is_err());
    assert!("12;10".parse::<Characteristic>().is_err());
    assert!(Characteristic::new(vec![1], vec![2]).is_err());
    let z = reference::z1();
    assert!(theta_null(&ch("111;101"), &z, &policy()).is_err());
}

fn random_char(r: &mut impl Rng, g: usize) -> Characteristic {
    Characteristic::new(
        (0..g).map(|_| r.random_range(0..2)).collect(),
        (0..g).map(|_| r.random_range(0..2)).collect(),
    )
    .unwrap()
}

fn dot(a: &[i64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| *x as f64 * y).sum()
}

fn ints(v: &[u8]) -> Vec<i64> {
    v.iter().map(|&x| i64::from(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quasi_periodicity(seed in any::<u64>(), g in 1usize..=3) {
        let mut r = rng(seed);
        let z = random_siegel(&mut r, g, 0.4);
        let v = random_vector(&mut r, g, 0.5);
        let chr = random_char(&mut r, g);
        let p: Vec<i64> = (0..g).map(|_| r.random_range(-2..=2)).collect();
        let q: Vec<i64> = (0..g).map(|_| r.random_range(-2..=2)).collect();
        let (m, n) = (ints(chr.m()), ints(chr.n()));

        let zp = z.matrix().mul_vec(&p.iter().map(|&x| c(x as f64, 0.0)).collect::<Vec<_>>()).unwrap();
        let shifted: Vec<Complex64> = (0..g).map(|i| v[i] + zp[i] + q[i] as f64).collect();
        let half_n: Vec<Complex64> = (0..g).map(|i| v[i] + n[i] as f64 / 2.0).collect();
        let ptzp = dot(&p, &zp);
        let mq: i64 = m.iter().zip(&q).map(|(a, b)| a * b).sum();
        let i = c(0.0, 1.0);
        let factor = (PI * i * ptzp + 2.0 * PI * i * dot(&p, &half_n) - PI * i * mq as f64).exp();

        let lhs = theta_char(&chr, &v, &z, &policy()).unwrap();
        let rhs = factor * theta_char(&chr, &shifted, &z, &policy()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()), "{lhs} vs {rhs}");
    }

    #[test]
    fn reduction_mod_two(seed in any::<u64>(), g in 1usize..=3) {
        let mut r = rng(seed);
        let z = random_siegel(&mut r, g, 0.4);
        let v = random_vector(&mut r, g, 0.5);
        let chr = random_char(&mut r, g);
        let (m, n) = (ints(chr.m()), ints(chr.n()));
        let p: Vec<i64> = (0..g).map(|_| r.random_range(-2..=2)).collect();
        let q: Vec<i64> = (0..g).map(|_| r.random_range(-2..=2)).collect();
        let m2: Vec<i64> = (0..g).map(|k| m[k] + 2 * p[k]).collect();
        let n2: Vec<i64> = (0..g).map(|k| n[k] + 2 * q[k]).collect();
        let mq: i64 = m.iter().zip(&q).map(|(a, b)| a * b).sum();
        let lhs = theta_integer_characteristic(&m2, &n2, &v, &z, &policy()).unwrap().value;
        let rhs = (c(0.0, PI * mq as f64)).exp() * theta_char(&chr, &v, &z, &policy()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn parity_under_negation(seed in any::<u64>(), g in 1usize..=3) {
        let mut r = rng(seed);
        let z = random_siegel(&mut r, g, 0.4);
        let v = random_vector(&mut r, g, 0.5);
        let chr = random_char(&mut r, g);
        let neg: Vec<Complex64> = v.iter().map(|x| -x).collect();
        let sign = if chr.parity() == Parity::Even { 1.0 } else { -1.0 };
        let a = theta_char(&chr, &neg, &z, &policy()).unwrap();
        let b = theta_char(&chr, &v, &z, &policy()).unwrap();
        prop_assert!((a - sign * b).norm() < 1e-10 * (1.0 + b.norm()));
        let plain = riemann_theta(&v, &z, &policy()).unwrap();
        prop_assert!((riemann_theta(&neg, &z, &policy()).unwrap() - plain).norm() < 1e-10 * (1.0 + plain.norm()));
    }

    #[test]
    fn transport_is_an_action(seed in any::<u64>(), g in 1usize..=3) {
        let mut r = rng(seed);
        let m1 = random_symplectic(&mut r, g, 2);
        let m2 = random_symplectic(&mut r, g, 2);
        let chr = random_char(&mut r, g);
        let composed = char_transform(&m1.mul(&m2), &chr).unwrap();
        let stepwise = char_transform(&m1, &char_transform(&m2, &chr).unwrap()).unwrap();
        prop_assert_eq!(&composed, &stepwise);
        prop_assert_eq!(char_pullback(&m1, &char_transform(&m1, &chr).unwrap()).unwrap(), chr);
    }

    #[test]
    fn modular_magnitudes(seed in any::<u64>(), g in 1usize..=3) {
        let mut r = rng(seed);
        let z = random_siegel(&mut r, g, 0.5);
        let v = random_vector(&mut r, g, 0.3);
        let m = random_symplectic(&mut r, g, 2);
        let chr = random_char(&mut r, g);
        let res = modular_magnitude_check(&m, &chr, &v, &z, &policy()).unwrap();
        prop_assert!(res < 1e-8, "residual {res}");
    }
}
