//! Period matrices of the W9 family of genus-2 curves and of their genus-3
//! double covers, Riemann theta functions with characteristics, and the
//! Teichmüller geodesic of the three-square L-shaped surface.
//!
//! The crate is organized bottom-up:
//!
//! * [`siegel`]: complex matrices, the Siegel upper half-space, `Sp(2g, ℤ)`.
//! * [`theta`]: theta functions with order-2 characteristics.
//! * [`quadrature`]: tanh-sinh quadrature with endpoint singularities.
//! * [`periods`]: arc integrals of `x^{k-1} dx / y` and period matrices.
//! * [`w9`]: the curve family, its double covers and automorphism tests.
//! * [`geodesic`]: the scalar theta equation along the geodesic.
//!
//! The guide in `book/` walks through each of these with runnable snippets.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calibration;
pub mod error;
pub mod geodesic;
pub mod periods;
pub mod quadrature;
pub mod reference;
pub mod siegel;
pub mod theta;
pub mod w9;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/siegel.md")]
    mod siegel {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/periods.md")]
    mod periods {}
    #[doc = include_str!("../../../book/src/w9.md")]
    mod w9 {}
    #[doc = include_str!("../../../book/src/geodesic.md")]
    mod geodesic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
