use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular (pivot ratio {pivot_ratio:.3e})")]
    Singular { pivot_ratio: f64 },

    #[error("not in the Siegel upper half-space: {0}")]
    NotSiegel(String),

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("theta truncation needs radius {required}, above the maximum {max}")]
    Truncation { required: usize, max: usize },

    #[error("invalid integration path: {0}")]
    Path(String),

    #[error("quadrature did not converge: last level difference {difference:.3e} > {tol:.3e}")]
    Accuracy { difference: f64, tol: f64 },

    #[error("square-root tracking failed: {0}")]
    Tracking(String),

    #[error("layout mismatch: {0}")]
    Layout(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("degenerate curve: {0}")]
    Degenerate(String),

    #[error("period matrix does not have the cover shape (residual {residual:.3e} > {tol:.3e})")]
    ShapeMismatch { residual: f64, tol: f64 },

    #[error("no sign change of the theta series for y in ({lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("calibration: {0}")]
    Calibration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
