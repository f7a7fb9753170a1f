//! Tanh-sinh (double exponential) quadrature on `[-1, 1]`.
//!
//! The substitution `u = tanh(π/2 · sinh t)` makes integrands with
//! `(1 ∓ u)^{-1/2}` endpoint singularities decay double exponentially in
//! `t`, so the trapezoidal rule in `t` converges without special weights.
//! Nodes carry `1 - u` and `1 + u` computed without cancellation; callers
//! that factor out the endpoint singularities should use those instead of
//! `u` near the ends.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Step size at level 0.
const H0: f64 = 0.5;
/// Half-width of the truncated `t` range.
const T_MAX: f64 = 4.0;
/// Levels always computed before the convergence test is trusted.
const MIN_LEVEL: usize = 3;

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute tolerance on two successive levels.
    pub tol: f64,
    /// Deepest level tried before giving up (`h = 0.5 / 2^level`).
    pub max_level: usize,
    /// Extra levels run after convergence (depth refinement checks).
    pub extra_levels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_level: 12,
            extra_levels: 0,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// Same settings, one level deeper after convergence.
    pub fn deeper(&self) -> Self {
        Self {
            extra_levels: self.extra_levels + 1,
            ..*self
        }
    }
}

/// A quadrature node on `[-1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub u: f64,
    /// `1 - u`, accurate near `u = 1`.
    pub one_minus: f64,
    /// `1 + u`, accurate near `u = -1`.
    pub one_plus: f64,
}

/// Result of a vector-valued quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOutcome {
    pub values: Vec<Complex64>,
    /// Level at which the run stopped.
    pub level: usize,
    /// Difference between the last two levels (max over components).
    pub last_difference: f64,
    pub evaluations: usize,
}

fn node_at(t: f64) -> (Node, f64) {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let s = half_pi * t.sinh();
    let cs = s.cosh();
    let weight = half_pi * t.cosh() / (cs * cs);
    let tail = (-s.abs()).exp() / cs;
    let node = if s >= 0.0 {
        Node {
            u: s.tanh(),
            one_minus: tail,
            one_plus: 2.0 - tail,
        }
    } else {
        Node {
            u: s.tanh(),
            one_minus: 2.0 - tail,
            one_plus: tail,
        }
    };
    (node, weight)
}

/// Integrates the vector-valued `f` over `[-1, 1]`, doubling the number of
/// nodes until two successive levels agree to `cfg.tol` in every component.
pub fn tanh_sinh<F>(dim: usize, cfg: &QuadConfig, mut f: F) -> Result<QuadOutcome>
where
    F: FnMut(Node) -> Result<Vec<Complex64>>,
{
    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut evaluations = 0;
    let mut accumulate =
        |t: f64, total: &mut Vec<Complex64>, evaluations: &mut usize| -> Result<()> {
            let (node, w) = node_at(t);
            if w == 0.0 || node.one_minus <= 0.0 || node.one_plus <= 0.0 {
                return Ok(());
            }
            let vals = f(node)?;
            *evaluations += 1;
            for (acc, v) in total.iter_mut().zip(vals) {
                *acc += v * w;
            }
            Ok(())
        };

    // Level 0: all multiples of H0.
    let n0 = (T_MAX / H0).floor() as i64;
    for j in -n0..=n0 {
        accumulate(j as f64 * H0, &mut total, &mut evaluations)?;
    }
    let mut h = H0;
    let mut previous: Vec<Complex64> = total.iter().map(|v| v * h).collect();
    let mut converged_at: Option<usize> = None;
    let mut last_difference = f64::INFINITY;

    for level in 1..=cfg.max_level + cfg.extra_levels {
        h *= 0.5;
        let n = (T_MAX / h).floor() as i64;
        let mut j = -n + if n % 2 == 0 { 1 } else { 0 };
        while j <= n {
            accumulate(j as f64 * h, &mut total, &mut evaluations)?;
            j += 2;
        }
        let current: Vec<Complex64> = total.iter().map(|v| v * h).collect();
        last_difference = current
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        previous = current;
        if converged_at.is_none() && level >= MIN_LEVEL && last_difference <= cfg.tol {
            converged_at = Some(level);
        }
        if let Some(at) = converged_at {
            if level >= at + cfg.extra_levels {
                return Ok(QuadOutcome {
                    values: previous,
                    level,
                    last_difference,
                    evaluations,
                });
            }
        }
        if converged_at.is_none() && level >= cfg.max_level {
            break;
        }
    }
    Err(Error::Accuracy {
        difference: last_difference,
        tol: cfg.tol,
    })
}
