//! Exact reference data for the three-square L-shaped surface `X₁` and the
//! integral symplectic matrices attached to its automorphisms and bases.

use num_complex::Complex64;

use crate::siegel::{RiemannMatrix, SymplecticMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `s = 2 − √3`, the parameter of `X₁`.
pub fn s_three_square() -> f64 {
    2.0 - 3f64.sqrt()
}

/// Period matrix of the double cover `X̂₁`.
pub fn zhat1() -> RiemannMatrix {
    RiemannMatrix::from_rows(&[
        vec![c(0.0, 4.0 / 3.0), c(0.0, 2.0 / 3.0), c(0.0, 1.0 / 3.0)],
        vec![c(0.0, 2.0 / 3.0), c(0.5, 5.0 / 6.0), c(0.0, 2.0 / 3.0)],
        vec![c(0.0, 1.0 / 3.0), c(0.0, 2.0 / 3.0), c(0.0, 4.0 / 3.0)],
    ])
    .expect("reference matrix is in Siegel space")
}

/// Period matrix of `X₁` in the genus-2 basis.
pub fn z1() -> RiemannMatrix {
    RiemannMatrix::from_rows(&[
        vec![c(1.0, 5.0 / 3.0), c(0.0, 4.0 / 3.0)],
        vec![c(0.0, 4.0 / 3.0), c(0.0, 5.0 / 3.0)],
    ])
    .expect("reference matrix is in Siegel space")
}

fn sp(rows: &[[i64; 6]]) -> SymplecticMatrix {
    SymplecticMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("symplectic")
}

/// Base change from the stretched-surface basis to the genus-2 basis.
pub fn n_matrix() -> SymplecticMatrix {
    SymplecticMatrix::from_rows(&[
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![1, 0, 1, 0],
        vec![0, 0, 0, 1],
    ])
    .expect("symplectic")
}

/// Base change on the cover taking `Ẑₜ` to the matrix `Ẑ'ₜ` with all
/// diagonal entries equal and all off-diagonal entries equal.
pub fn m_geodesic() -> SymplecticMatrix {
    sp(&[
        [0, 0, 1, 0, 0, 0],
        [-1, 1, -1, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 1, 1],
        [1, 0, 1, 0, 1, 0],
        [1, 1, 1, 1, 1, 0],
    ])
}

/// Transposed rational representation of the involution `(z, w) ↦ (−z, w)`.
pub fn m2() -> SymplecticMatrix {
    sp(&[
        [0, 0, -1, 0, 0, 0],
        [0, -1, 0, 0, 0, 0],
        [-1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, -1],
        [0, 0, 0, 0, -1, 0],
        [0, 0, 0, -1, 0, 0],
    ])
}

/// Transposed rational representation of the order-3 automorphism.
pub fn m3() -> SymplecticMatrix {
    sp(&[
        [1, -2, 1, 0, 1, 0],
        [1, -1, 0, 0, 0, -1],
        [1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, -1, -2],
        [0, 0, 0, 1, 1, 1],
    ])
}

/// Transposed rational representation of the order-4 automorphism of `X̂₁`.
pub fn m4() -> SymplecticMatrix {
    sp(&[
        [0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, -1, 0],
        [0, 0, 0, 0, 0, 1],
        [-1, 0, 0, 0, 0, 0],
        [0, 2, 0, 0, -1, 0],
        [0, 0, -1, 0, 0, 0],
    ])
}
