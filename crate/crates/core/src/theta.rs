//! Riemann theta function and order-2 theta characteristics.
//!
//! Characteristics are stored in the integer convention: `m, n ∈ {0,1}^g`
//! stand for the half-integer shifts `m/2, n/2`, so that
//!
//! ```text
//! θ[m;n](z, Z) = Σ_k exp(πi ᵀ(k+m/2) Z (k+m/2) + 2πi ᵀ(k+m/2)(z + n/2)).
//! ```
//!
//! All sums go through [`gaussian_lattice_sum`], which sums
//! `exp(π (ᵀx A x + ᵀb x))` over the shifted lattice `x ∈ ℤ^g + offset`
//! with a rigorous tail bound.
//!
//! # Tail bound
//!
//! Let `S = Re A` (negative definite), `λ` the smallest eigenvalue of `-S`,
//! and `x*` the maximizer of `ᵀx S x + ᵀ(Re b) x`, with maximum value `Φ*`.
//! Every term obeys `|term(x)| ≤ exp(π Φ*) exp(-πλ |x - x*|²)`. The lattice
//! points are summed over the cube `|k - c|∞ ≤ R` around the integer point
//! `c` nearest to `x* - offset`, so every omitted point has
//! `|x - x*|∞ ≥ R + 1/2`. Counting the points on each cube shell gives
//!
//! ```text
//! |error| ≤ exp(π Φ*) · T(R),   T(R) = Σ_{n>R} ((2n+1)^g - (2n-1)^g) exp(-πλ (n - 1/2)²).
//! ```
//!
//! `R` starts from the fixed point of
//! `R = ceil(sqrt(ln((2R+1)^g / tail_tol) / (πλ))) + 2` and is increased
//! until `T(R) < tail_tol`. For the plain theta function `Φ* = ᵀv Y⁻¹ v`
//! with `v = Im z`, `Y = Im Z`, so at `z = 0` the absolute error is below
//! `tail_tol`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::siegel::{
    siegel_action, symmetric_eigenvalues, ComplexMatrix, RiemannMatrix, SymplecticMatrix,
};

/// Truncation settings for lattice sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tail_tol: f64,
    pub max_radius: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-14,
            max_radius: 60,
        }
    }
}

impl TruncationPolicy {
    pub fn with_tail_tol(tail_tol: f64) -> Self {
        Self {
            tail_tol,
            ..Self::default()
        }
    }
}

/// A lattice sum together with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub value: Complex64,
    /// Cube radius actually summed.
    pub radius: usize,
    /// Rigorous bound on the absolute truncation error.
    pub tail_bound: f64,
}

/// Parity of a characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// An order-2 theta characteristic `[m; n]` with `m, n ∈ {0,1}^g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    m: Vec<u8>,
    n: Vec<u8>,
}

impl Characteristic {
    pub fn new(m: Vec<u8>, n: Vec<u8>) -> Result<Self> {
        if m.len() != n.len() || m.is_empty() {
            return Err(Error::Dimension(format!(
                "characteristic rows of lengths {} and {}",
                m.len(),
                n.len()
            )));
        }
        if m.iter().chain(&n).any(|&x| x > 1) {
            return Err(Error::Parameter(
                "characteristic entries must be 0 or 1".into(),
            ));
        }
        Ok(Self { m, n })
    }

    /// Reduces arbitrary integer vectors mod 2.
    pub fn reduced(m: &[i64], n: &[i64]) -> Result<Self> {
        Self::new(
            m.iter().map(|x| x.rem_euclid(2) as u8).collect(),
            n.iter().map(|x| x.rem_euclid(2) as u8).collect(),
        )
    }

    pub fn zero(g: usize) -> Self {
        Self {
            m: vec![0; g],
            n: vec![0; g],
        }
    }

    /// All `2^(2g)` characteristics of genus `g`, in lexicographic order.
    pub fn all(g: usize) -> impl Iterator<Item = Characteristic> {
        (0..1u32 << (2 * g)).map(move |bits| {
            let bit = |i: usize| ((bits >> (2 * g - 1 - i)) & 1) as u8;
            Characteristic {
                m: (0..g).map(bit).collect(),
                n: (g..2 * g).map(bit).collect(),
            }
        })
    }

    pub fn genus(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[u8] {
        &self.m
    }

    pub fn n(&self) -> &[u8] {
        &self.n
    }

    pub fn parity(&self) -> Parity {
        parity(self)
    }

    fn m_int(&self) -> Vec<i64> {
        self.m.iter().map(|&x| i64::from(x)).collect()
    }

    fn n_int(&self) -> Vec<i64> {
        self.n.iter().map(|&x| i64::from(x)).collect()
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.m {
            write!(f, "{x}")?;
        }
        f.write_str(";")?;
        for x in &self.n {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for Characteristic {
    type Err = Error;

    /// Parses `"m1m2m3;n1n2n3"`; whitespace and commas inside a row are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let (top, bottom) = s.split_once(';').ok_or_else(|| {
            Error::Parameter(format!("characteristic '{s}' has no ';' separator"))
        })?;
        let row = |part: &str, name: &str| -> Result<Vec<u8>> {
            part.chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .enumerate()
                .map(|(i, c)| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::Parameter(format!(
                        "characteristic '{s}': {name} row, position {}: expected 0 or 1, found '{other}'",
                        i + 1
                    ))),
                })
                .collect()
        };
        Self::new(row(top, "top")?, row(bottom, "bottom")?)
    }
}

/// Even iff `ᵀm n ≡ 0 (mod 2)`.
pub fn parity(ch: &Characteristic) -> Parity {
    let dot: u32 =
        ch.m.iter()
            .zip(&ch.n)
            .map(|(&a, &b)| u32::from(a & b))
            .sum();
    if dot.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Neumaier's compensated sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

fn shell_tail(g: usize, lambda: f64, radius: usize) -> f64 {
    let gi = g as i32;
    let mut total = 0.0;
    let mut n = radius + 1;
    loop {
        let nf = n as f64;
        let count = (2.0 * nf + 1.0).powi(gi) - (2.0 * nf - 1.0).powi(gi);
        let term = count * (-std::f64::consts::PI * lambda * (nf - 0.5).powi(2)).exp();
        total += term;
        if term <= total * 1e-17 || term == 0.0 || n > radius + 10_000 {
            break;
        }
        n += 1;
    }
    total
}

/// Cube radius for a quadratic form whose smallest eigenvalue is `lambda`.
pub fn truncation_radius(g: usize, lambda: f64, policy: &TruncationPolicy) -> Result<(usize, f64)> {
    if !(lambda > 0.0) || !(policy.tail_tol > 0.0) {
        return Err(Error::Parameter(format!(
            "truncation needs a positive eigenvalue and tolerance (λ = {lambda:e}, tol = {:e})",
            policy.tail_tol
        )));
    }
    let formula = |r: usize| -> usize {
        let lhs = ((2 * r + 1) as f64).powi(g as i32) / policy.tail_tol;
        (lhs.ln() / (std::f64::consts::PI * lambda)).sqrt().ceil() as usize + 2
    };
    let cap = policy.max_radius.max(1) * 4 + 8;
    let mut r = 1;
    for _ in 0..200 {
        let next = formula(r);
        if next == r || next > cap {
            r = next;
            break;
        }
        r = next;
    }
    let mut tail = shell_tail(g, lambda, r);
    while tail >= policy.tail_tol && r <= cap {
        r += 1;
        tail = shell_tail(g, lambda, r);
    }
    if r > policy.max_radius {
        return Err(Error::Truncation {
            required: r,
            max: policy.max_radius,
        });
    }
    Ok((r, tail))
}

fn solve_real(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    // Gaussian elimination with partial pivoting on a tiny dense system.
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))
            .unwrap();
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in (k + 1)..n {
            let f = m[i * n + k] / m[k * n + k];
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] -= m[i * n + j] * x[j];
        }
        x[i] /= m[i * n + i];
    }
    x
}

/// Visits every integer vector `k` with `|k - center|∞ == shell`, in
/// lexicographic order.
fn for_each_in_shell(center: &[i64], shell: i64, mut f: impl FnMut(&[i64])) {
    let g = center.len();
    let mut k: Vec<i64> = center.iter().map(|c| c - shell).collect();
    loop {
        if shell == 0 || k.iter().zip(center).any(|(a, c)| (a - c).abs() == shell) {
            f(&k);
        }
        // Odometer increment.
        let mut i = g;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if k[i] < center[i] + shell {
                k[i] += 1;
                break;
            }
            k[i] = center[i] - shell;
        }
    }
}

/// `Σ_{x ∈ ℤ^g + offset} exp(π (ᵀx A x + ᵀb x))` for a symmetric `A` with
/// negative-definite real part. See the module docs for the tail bound.
pub fn gaussian_lattice_sum(
    a: &ComplexMatrix,
    b: &[Complex64],
    offset: &[f64],
    policy: &TruncationPolicy,
) -> Result<LatticeSum> {
    let g = a.rows();
    if !a.is_square() || b.len() != g || offset.len() != g {
        return Err(Error::Dimension(format!(
            "lattice sum with a {}x{} form, linear term of length {} and offset of length {}",
            a.rows(),
            a.cols(),
            b.len(),
            offset.len()
        )));
    }
    let neg_re: Vec<f64> = a.re().iter().map(|x| -x).collect();
    let eig = symmetric_eigenvalues(&neg_re, g)?;
    let lambda = eig[0];
    if !(lambda > 0.0) {
        return Err(Error::NotSiegel(format!(
            "quadratic form is not definite (smallest eigenvalue {lambda:.3e})"
        )));
    }
    let (radius, tail) = truncation_radius(g, lambda, policy)?;

    // Peak of the real exponent: maximize ᵀx S x + ᵀc x with S = Re A.
    let c_re: Vec<f64> = b.iter().map(|v| v.re).collect();
    let s_inv_c = solve_real(g, &neg_re, &c_re);
    let peak_x: Vec<f64> = s_inv_c.iter().map(|v| 0.5 * v).collect();
    let peak_val: f64 = 0.25 * c_re.iter().zip(&s_inv_c).map(|(c, v)| c * v).sum::<f64>();
    let center: Vec<i64> = peak_x
        .iter()
        .zip(offset)
        .map(|(x, o)| (x - o).round() as i64)
        .collect();

    let pi = std::f64::consts::PI;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    let mut x = vec![0.0; g];
    for shell in 0..=radius as i64 {
        for_each_in_shell(&center, shell, |k| {
            for i in 0..g {
                x[i] = k[i] as f64 + offset[i];
            }
            let mut e = Complex64::new(0.0, 0.0);
            for i in 0..g {
                let mut row = a.get(i, i) * x[i];
                for j in (i + 1)..g {
                    row += (a.get(i, j) + a.get(j, i)) * x[j];
                }
                e += (row + b[i]) * x[i];
            }
            let term = (e * pi).exp();
            re.add(term.re);
            im.add(term.im);
        });
    }
    Ok(LatticeSum {
        value: Complex64::new(re.value(), im.value()),
        radius,
        tail_bound: tail * (pi * peak_val).exp(),
    })
}

fn check_vector(z: &[Complex64], zm: &RiemannMatrix) -> Result<()> {
    if z.len() != zm.genus() {
        return Err(Error::Dimension(format!(
            "argument of length {} for genus {}",
            z.len(),
            zm.genus()
        )));
    }
    Ok(())
}

/// `ϑ(z, Z) = Σ_k exp(πi ᵀk Z k + 2πi ᵀk z)` with truncation data.
pub fn riemann_theta_sum(
    z: &[Complex64],
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<LatticeSum> {
    check_vector(z, zm)?;
    let i = Complex64::new(0.0, 1.0);
    let a = zm.matrix().scale(i);
    let b: Vec<Complex64> = z.iter().map(|v| 2.0 * i * v).collect();
    gaussian_lattice_sum(&a, &b, &vec![0.0; z.len()], policy)
}

/// `ϑ(z, Z)`.
pub fn riemann_theta(
    z: &[Complex64],
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    Ok(riemann_theta_sum(z, zm, policy)?.value)
}

/// `θ[m;n](z, Z)` for arbitrary integer vectors `m, n` (not reduced mod 2).
pub fn theta_integer_characteristic(
    m: &[i64],
    n: &[i64],
    z: &[Complex64],
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<LatticeSum> {
    check_vector(z, zm)?;
    if m.len() != z.len() || n.len() != z.len() {
        return Err(Error::Dimension(
            "characteristic length does not match the genus".into(),
        ));
    }
    let i = Complex64::new(0.0, 1.0);
    let a = zm.matrix().scale(i);
    let b: Vec<Complex64> = z
        .iter()
        .zip(n)
        .map(|(v, &nj)| 2.0 * i * (v + nj as f64 / 2.0))
        .collect();
    let offset: Vec<f64> = m.iter().map(|&mj| mj as f64 / 2.0).collect();
    gaussian_lattice_sum(&a, &b, &offset, policy)
}

/// `θ[ch](z, Z)` with truncation data.
pub fn theta_char_sum(
    ch: &Characteristic,
    z: &[Complex64],
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<LatticeSum> {
    if ch.genus() != zm.genus() {
        return Err(Error::Dimension(format!(
            "genus {} characteristic for genus {}",
            ch.genus(),
            zm.genus()
        )));
    }
    theta_integer_characteristic(&ch.m_int(), &ch.n_int(), z, zm, policy)
}

/// `θ[ch](z, Z)`.
pub fn theta_char(
    ch: &Characteristic,
    z: &[Complex64],
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    Ok(theta_char_sum(ch, z, zm, policy)?.value)
}

/// Theta-null `θ[ch](0, Z)`.
pub fn theta_null(
    ch: &Characteristic,
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    theta_char(ch, &vec![Complex64::new(0.0, 0.0); zm.genus()], zm, policy)
}

fn mat_vec(g: usize, m: &[i64], v: &[i64]) -> Vec<i64> {
    (0..g)
        .map(|i| (0..g).map(|j| m[i * g + j] * v[j]).sum())
        .collect()
}

fn mat_t_vec(g: usize, m: &[i64], v: &[i64]) -> Vec<i64> {
    (0..g)
        .map(|i| (0..g).map(|j| m[j * g + i] * v[j]).sum())
        .collect()
}

/// `diag(X ᵀY)`.
fn diag_of_product_with_transpose(g: usize, x: &[i64], y: &[i64]) -> Vec<i64> {
    (0..g)
        .map(|i| (0..g).map(|k| x[i * g + k] * y[i * g + k]).sum())
        .collect()
}

fn check_char_genus(m: &SymplecticMatrix, ch: &Characteristic) -> Result<()> {
    if m.genus() != ch.genus() {
        return Err(Error::Dimension(format!(
            "Sp({}) acting on a genus {} characteristic",
            2 * m.genus(),
            ch.genus()
        )));
    }
    Ok(())
}

/// Characteristic carried along by `M`: if `θ[ch]` is evaluated at `(z, Z)`,
/// the matching characteristic at `M(z, Z)` is
/// `(δm − γn + diag(γᵀδ), −βm + αn + diag(αᵀβ)) mod 2`.
///
/// This is a left action of `Sp(2g, ℤ)` on characteristics mod 2.
pub fn char_transform(m: &SymplecticMatrix, ch: &Characteristic) -> Result<Characteristic> {
    check_char_genus(m, ch)?;
    let g = ch.genus();
    let (alpha, beta, gamma, delta) = (m.alpha(), m.beta(), m.gamma(), m.delta());
    let (mv, nv) = (ch.m_int(), ch.n_int());
    let p = diag_of_product_with_transpose(g, &gamma, &delta);
    let q = diag_of_product_with_transpose(g, &alpha, &beta);
    let dm = mat_vec(g, &delta, &mv);
    let gn = mat_vec(g, &gamma, &nv);
    let bm = mat_vec(g, &beta, &mv);
    let an = mat_vec(g, &alpha, &nv);
    let m2: Vec<i64> = (0..g).map(|i| dm[i] - gn[i] + p[i]).collect();
    let n2: Vec<i64> = (0..g).map(|i| -bm[i] + an[i] + q[i]).collect();
    Characteristic::reduced(&m2, &n2)
}

/// Inverse of [`char_transform`]: the characteristic at `(z, Z)` whose image
/// at `M(z, Z)` is `ch`, namely `(ᵀα(m − p) + ᵀγ(n − q), ᵀβ(m − p) + ᵀδ(n − q)) mod 2`
/// with `p = diag(γᵀδ)` and `q = diag(αᵀβ)`.
pub fn char_pullback(m: &SymplecticMatrix, ch: &Characteristic) -> Result<Characteristic> {
    check_char_genus(m, ch)?;
    let g = ch.genus();
    let (alpha, beta, gamma, delta) = (m.alpha(), m.beta(), m.gamma(), m.delta());
    let p = diag_of_product_with_transpose(g, &gamma, &delta);
    let q = diag_of_product_with_transpose(g, &alpha, &beta);
    let mp: Vec<i64> = ch.m_int().iter().zip(&p).map(|(a, b)| a - b).collect();
    let nq: Vec<i64> = ch.n_int().iter().zip(&q).map(|(a, b)| a - b).collect();
    let am = mat_t_vec(g, &alpha, &mp);
    let gn = mat_t_vec(g, &gamma, &nq);
    let bm = mat_t_vec(g, &beta, &mp);
    let dn = mat_t_vec(g, &delta, &nq);
    let m2: Vec<i64> = (0..g).map(|i| am[i] + gn[i]).collect();
    let n2: Vec<i64> = (0..g).map(|i| bm[i] + dn[i]).collect();
    Characteristic::reduced(&m2, &n2)
}

/// Magnitude-level check of the modular transformation formula:
///
/// `| |θ[ch'](M(z,Z))| − |det(γZ+δ)|^{1/2} |exp(πi ᵀz (γZ+δ)⁻¹ γ z)| |θ[ch](z,Z)| |`
///
/// with `ch' = char_transform(M, ch)` and
/// `M(z, Z) = (ᵀ(γZ+δ)⁻¹ z, (αZ+β)(γZ+δ)⁻¹)`.
pub fn modular_magnitude_check(
    m: &SymplecticMatrix,
    ch: &Characteristic,
    z: &[Complex64],
    zm: &RiemannMatrix,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let g = zm.genus();
    check_vector(z, zm)?;
    let gamma = ComplexMatrix::from_integers(g, &m.gamma());
    let delta = ComplexMatrix::from_integers(g, &m.delta());
    let cz_d = gamma.mul(zm.matrix())?.add(&delta)?;
    let lu = cz_d.lu()?;
    let inv = lu.inverse();
    let z_new = inv.transpose().mul_vec(z)?;
    let zm_new = siegel_action(m, zm)?;
    let ch_new = char_transform(m, ch)?;

    let lhs = theta_char(&ch_new, &z_new, &zm_new, policy)?.norm();
    let gz = gamma.mul_vec(z)?;
    let inv_gz = inv.mul_vec(&gz)?;
    let quad: Complex64 = z.iter().zip(&inv_gz).map(|(a, b)| a * b).sum();
    let factor = (Complex64::new(0.0, std::f64::consts::PI) * quad)
        .exp()
        .norm()
        * lu.determinant().norm().sqrt();
    let rhs = factor * theta_char(ch, z, zm, policy)?.norm();
    Ok((lhs - rhs).abs())
}
