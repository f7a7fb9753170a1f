#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use w9_core::siegel::{RiemannMatrix, SymplecticMatrix};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `X + iY` with `X` uniform in `[-1, 1]`, `Y = BBᵀ/g + floor·I`.
pub fn random_siegel(rng: &mut impl Rng, g: usize, floor: f64) -> RiemannMatrix {
    let b: Vec<f64> = (0..g * g).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut x = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            let v = rng.random_range(-1.0..1.0);
            x[i * g + j] = v;
            x[j * g + i] = v;
        }
    }
    let rows: Vec<Vec<Complex64>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    let bbt: f64 =
                        (0..g).map(|k| b[i * g + k] * b[j * g + k]).sum::<f64>() / g as f64;
                    c(x[i * g + j], bbt + if i == j { floor } else { 0.0 })
                })
                .collect()
        })
        .collect();
    RiemannMatrix::from_rows(&rows).expect("positive definite by construction")
}

pub fn random_vector(rng: &mut impl Rng, g: usize, scale: f64) -> Vec<Complex64> {
    (0..g)
        .map(|_| {
            c(
                rng.random_range(-scale..scale),
                rng.random_range(-scale..scale),
            )
        })
        .collect()
}

fn block(g: usize, a: &[i64], b: &[i64], cc: &[i64], d: &[i64]) -> SymplecticMatrix {
    let n = 2 * g;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i < g, j < g) {
                    (true, true) => a[i * g + j],
                    (true, false) => b[i * g + j - g],
                    (false, true) => cc[(i - g) * g + j],
                    (false, false) => d[(i - g) * g + j - g],
                })
                .collect()
        })
        .collect();
    SymplecticMatrix::from_rows(&rows).expect("generator is symplectic")
}

fn identity(g: usize) -> Vec<i64> {
    (0..g * g).map(|k| i64::from(k % (g + 1) == 0)).collect()
}

/// Random generator: a translation by a symmetric matrix, `J`, or an
/// elementary unimodular change of basis.
fn random_generator(rng: &mut impl Rng, g: usize) -> SymplecticMatrix {
    let id = identity(g);
    let zero = vec![0; g * g];
    match rng.random_range(0..3) {
        0 => {
            let mut s = vec![0; g * g];
            for i in 0..g {
                for j in i..g {
                    let v = rng.random_range(-1..=1);
                    s[i * g + j] = v;
                    s[j * g + i] = v;
                }
            }
            if rng.random_bool(0.5) {
                block(g, &id, &s, &zero, &id)
            } else {
                block(g, &id, &zero, &s, &id)
            }
        }
        1 => SymplecticMatrix::j(g),
        _ => {
            if g == 1 {
                return SymplecticMatrix::j(1);
            }
            let i = rng.random_range(0..g);
            let mut j = rng.random_range(0..g - 1);
            if j >= i {
                j += 1;
            }
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            let mut a = id.clone();
            a[i * g + j] = sign;
            let mut d = id.clone();
            d[j * g + i] = -sign;
            block(g, &a, &zero, &zero, &d)
        }
    }
}

/// Random symplectic matrix with entries bounded by `bound`.
pub fn random_symplectic(rng: &mut impl Rng, g: usize, bound: i64) -> SymplecticMatrix {
    loop {
        let mut m = SymplecticMatrix::identity(g);
        for _ in 0..rng.random_range(1..=4) {
            m = m.mul(&random_generator(rng, g));
        }
        if m.max_abs_entry() <= bound {
            return m;
        }
    }
}

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let (an, bn) = ((a + b) / 2.0, (a * b).sqrt());
        if (an - bn).abs() <= 1e-16 * an {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// `K(k) = π / (2 AGM(1, √(1−k²)))`.
pub fn complete_k(k: f64) -> f64 {
    std::f64::consts::PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt()))
}
