//! Small dense complex matrices, the Siegel upper half-space and the action
//! of the integral symplectic group on it.
//!
//! Everything here is sized for genus at most 3, so all algorithms are
//! direct: LU with partial pivoting for inversion and closed-form
//! characteristic-polynomial roots for symmetric eigenvalues.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default symmetry tolerance for [`is_riemann_matrix`] and [`RiemannMatrix::new`].
pub const DEFAULT_SYM_TOL: f64 = 1e-10;

/// LU pivots smaller than this fraction of the matrix norm are treated as zero.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

/// Largest genus handled by the closed-form eigenvalue code.
pub const MAX_GENUS: usize = 3;

/// A dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Parameter("matrix entry is not finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// The real integer matrix `m` viewed as a complex matrix.
    pub fn from_integers(n: usize, m: &[i64]) -> Self {
        Self::from_fn(n, n, |i, j| Complex64::new(m[i * n + j] as f64, 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Nested-row copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self.get(i, k) * other.get(k, j))
                .sum()
        }))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum())
            .collect())
    }

    /// Real parts, row-major.
    pub fn re(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.re).collect()
    }

    /// Imaginary parts, row-major.
    pub fn im(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.im).collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |Z_jk - Z_kj|`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// `(Z + Zᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i)) * 0.5
        })
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(self.lu()?.inverse())
    }

    pub fn determinant(&self) -> Result<Complex64> {
        match self.lu() {
            Ok(lu) => Ok(lu.determinant()),
            Err(Error::Singular { .. }) => Ok(Complex64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols) {
            write!(f, "  ")?;
            for c in row {
                write!(f, "{:>+.12}{:+.12}i  ", c.re, c.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU of a {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        // Max row sum norm.
        let norm = (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            min_pivot = min_pivot.min(pivot_abs);
            if norm == 0.0 || pivot_abs <= SINGULAR_PIVOT_RATIO * norm {
                return Err(Error::Singular {
                    pivot_ratio: if norm == 0.0 { 0.0 } else { pivot_abs / norm },
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }
        debug_assert!(n == 0 || min_pivot > 0.0);
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn determinant(&self) -> Complex64 {
        let diag: Complex64 = (0..self.n).map(|i| self.lu[i * self.n + i]).product();
        if self.swaps.is_multiple_of(2) {
            diag
        } else {
            -diag
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        inv
    }
}

/// Eigenvalues of a real symmetric `n x n` matrix (`n <= 3`), ascending.
///
/// Closed-form roots of the characteristic polynomial; the smallest root is
/// recomputed as `det / (product of the others)` when the matrix is positive
/// definite, which keeps it accurate to relative precision even when it is
/// much smaller than the others.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n || n == 0 || n > MAX_GENUS {
        return Err(Error::Dimension(format!(
            "symmetric eigenvalues of size {n} with {} entries",
            a.len()
        )));
    }
    let at = |i: usize, j: usize| 0.5 * (a[i * n + j] + a[j * n + i]);
    let mut eig = match n {
        1 => vec![at(0, 0)],
        2 => {
            let (p, q, r) = (at(0, 0), at(0, 1), at(1, 1));
            let mean = 0.5 * (p + r);
            let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            let hi = mean + rad;
            let det = p * r - q * q;
            let lo = if det > 0.0 && hi > 0.0 {
                det / hi
            } else {
                mean - rad
            };
            vec![lo, hi]
        }
        _ => {
            let p1 = at(0, 1).powi(2) + at(0, 2).powi(2) + at(1, 2).powi(2);
            let q = (at(0, 0) + at(1, 1) + at(2, 2)) / 3.0;
            let p2 =
                (at(0, 0) - q).powi(2) + (at(1, 1) - q).powi(2) + (at(2, 2) - q).powi(2) + 2.0 * p1;
            let mut vals = if p2 == 0.0 {
                vec![q, q, q]
            } else {
                let p = (p2 / 6.0).sqrt();
                let b = |i: usize, j: usize| (at(i, j) - if i == j { q } else { 0.0 }) / p;
                let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
                    - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
                    + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
                let phi = (0.5 * det_b).clamp(-1.0, 1.0).acos() / 3.0;
                let e1 = q + 2.0 * p * phi.cos();
                let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
                let e2 = 3.0 * q - e1 - e3;
                vec![e3, e2, e1]
            };
            vals.sort_by(f64::total_cmp);
            let det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
                - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
                + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
            if det > 0.0 && vals[1] > 0.0 {
                vals[0] = det / (vals[1] * vals[2]);
            }
            vals
        }
    };
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Returns whether `z` is symmetric within `tol` and has a positive-definite
/// imaginary part (all eigenvalues above `tol`).
pub fn is_riemann_matrix(z: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !z.is_square() {
        return Err(Error::Dimension(format!(
            "a {}x{} matrix is not square",
            z.rows, z.cols
        )));
    }
    if z.rows == 0 || z.rows > MAX_GENUS {
        return Err(Error::Dimension(format!(
            "genus {} is not supported",
            z.rows
        )));
    }
    if z.symmetry_residual() > tol {
        return Ok(false);
    }
    let eig = symmetric_eigenvalues(&z.im(), z.rows)?;
    Ok(eig[0] > tol)
}

/// A point of the Siegel upper half-space of genus 1, 2 or 3.
#[derive(Clone, PartialEq)]
pub struct RiemannMatrix {
    z: ComplexMatrix,
}

impl RiemannMatrix {
    /// Validates `z` with symmetry tolerance `sym_tol`.
    pub fn new(z: ComplexMatrix, sym_tol: f64) -> Result<Self> {
        if !is_riemann_matrix(&z, sym_tol)? {
            let sym = z.symmetry_residual();
            let eig = symmetric_eigenvalues(&z.im(), z.rows)?;
            return Err(Error::NotSiegel(format!(
                "symmetry residual {sym:.3e} (tol {sym_tol:.1e}), smallest eigenvalue of Im {:.3e}",
                eig[0]
            )));
        }
        Ok(Self { z })
    }

    /// Validates with the default tolerance.
    pub fn from_matrix(z: ComplexMatrix) -> Result<Self> {
        Self::new(z, DEFAULT_SYM_TOL)
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_rows(rows)?)
    }

    /// `i * scale * I_g`.
    pub fn scaled_identity(g: usize, scale: f64) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::identity(g).scale(Complex64::new(0.0, scale)))
    }

    pub fn genus(&self) -> usize {
        self.z.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.z
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.z
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.z.get(i, j)
    }

    /// Smallest eigenvalue of `Im(Z)`.
    pub fn min_eig_im(&self) -> f64 {
        min_eig_im(self)
    }
}

impl fmt::Debug for RiemannMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RiemannMatrix({:?})", self.z)
    }
}

/// Smallest eigenvalue of the imaginary part.
pub fn min_eig_im(z: &RiemannMatrix) -> f64 {
    symmetric_eigenvalues(&z.z.im(), z.genus()).expect("validated genus")[0]
}

/// The standard form `J = (0, -I; I, 0)` of size `2g`.
pub fn standard_form(g: usize) -> Vec<i64> {
    let n = 2 * g;
    let mut j = vec![0; n * n];
    for i in 0..g {
        j[i * n + g + i] = -1;
        j[(g + i) * n + i] = 1;
    }
    j
}

fn int_mul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut c = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn int_transpose(n: usize, a: &[i64]) -> Vec<i64> {
    let mut t = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Exact test of `ᵀM J M = J` for a square integer matrix given as rows.
pub fn symplectic_check(m: &[Vec<i64>]) -> Result<bool> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(
            "symplectic check needs a square matrix".into(),
        ));
    }
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "symplectic check needs an even dimension, got {n}"
        )));
    }
    let flat = m.concat();
    Ok(is_symplectic_flat(n / 2, &flat))
}

fn is_symplectic_flat(g: usize, m: &[i64]) -> bool {
    let n = 2 * g;
    let j = standard_form(g);
    int_mul(n, &int_mul(n, &int_transpose(n, m), &j), m) == j
}

/// An element of `Sp(2g, Z)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    g: usize,
    m: Vec<i64>,
}

impl SymplecticMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        if !symplectic_check(rows)? {
            return Err(Error::NotSymplectic);
        }
        Ok(Self {
            g: rows.len() / 2,
            m: rows.concat(),
        })
    }

    pub fn identity(g: usize) -> Self {
        let n = 2 * g;
        Self {
            g,
            m: (0..n * n).map(|k| i64::from(k / n == k % n)).collect(),
        }
    }

    /// `J = (0, -I; I, 0)`.
    pub fn j(g: usize) -> Self {
        Self {
            g,
            m: standard_form(g),
        }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.m[i * 2 * self.g + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.m.chunks(2 * self.g).map(<[_]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            g: self.g,
            m: int_transpose(2 * self.g, &self.m),
        }
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.g, other.g, "genus mismatch in symplectic product");
        Self {
            g: self.g,
            m: int_mul(2 * self.g, &self.m, &other.m),
        }
    }

    /// Exact inverse `-J ᵀM J`.
    pub fn inverse(&self) -> Self {
        let n = 2 * self.g;
        let j = standard_form(self.g);
        let inv = int_mul(n, &int_mul(n, &j, &int_transpose(n, &self.m)), &j);
        Self {
            g: self.g,
            m: inv.into_iter().map(|x| -x).collect(),
        }
    }

    /// The `g x g` block at block position (`bi`, `bj`); `(0,0)` is α,
    /// `(0,1)` β, `(1,0)` γ, `(1,1)` δ.
    pub fn block(&self, bi: usize, bj: usize) -> Vec<i64> {
        let g = self.g;
        let mut out = Vec::with_capacity(g * g);
        for i in 0..g {
            for j in 0..g {
                out.push(self.get(bi * g + i, bj * g + j));
            }
        }
        out
    }

    pub fn alpha(&self) -> Vec<i64> {
        self.block(0, 0)
    }
    pub fn beta(&self) -> Vec<i64> {
        self.block(0, 1)
    }
    pub fn gamma(&self) -> Vec<i64> {
        self.block(1, 0)
    }
    pub fn delta(&self) -> Vec<i64> {
        self.block(1, 1)
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.m.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymplecticMatrix{:?}", self.to_rows())
    }
}

/// `(αZ + β)(γZ + δ)⁻¹`.
pub fn siegel_action(m: &SymplecticMatrix, z: &RiemannMatrix) -> Result<RiemannMatrix> {
    let g = z.genus();
    if m.genus() != g {
        return Err(Error::Dimension(format!(
            "Sp({}) acting on genus {g}",
            2 * m.genus()
        )));
    }
    let zm = z.matrix();
    let alpha = ComplexMatrix::from_integers(g, &m.alpha());
    let beta = ComplexMatrix::from_integers(g, &m.beta());
    let gamma = ComplexMatrix::from_integers(g, &m.gamma());
    let delta = ComplexMatrix::from_integers(g, &m.delta());
    let num = alpha.mul(zm)?.add(&beta)?;
    let den = gamma.mul(zm)?.add(&delta)?;
    let w = num.mul(&den.inverse()?)?;
    // The image is symmetric up to rounding that grows with the entry size.
    let tol = DEFAULT_SYM_TOL * w.max_abs().max(1.0) * 1e3;
    let checked = RiemannMatrix::new(w, tol)?;
    Ok(RiemannMatrix {
        z: checked.z.symmetrized(),
    })
}

/// Period matrix in a new basis: `ᵀM(Z)`, where `M` is the base change
/// matrix from the new basis to the old one.
pub fn base_change(z: &RiemannMatrix, m: &SymplecticMatrix) -> Result<RiemannMatrix> {
    siegel_action(&m.transpose(), z)
}
