//! The Teichmüller geodesic through the three-square surface.
//!
//! Along the stretch `diag(1, t)` the cover period matrix keeps the shape
//! `z₁ = iy`, `z₁₃ = i(t − y/2)`, and the curve stays in the family exactly
//! when one theta-null vanishes. After the base change `M` that theta-null
//! becomes the real series
//!
//! ```text
//! S(t, y) = Σ_{k∈ℤ³} exp π[(t/2 − y + i/2) Σ k² + (y − t + i) Σ_{l<m} k_l k_m + (3i/2 − t/2) Σ k]
//! ```
//!
//! whose terms are real because `k(k + 3)` is even. For each `t ≥ 1` the
//! geodesic point is the root `y_t > 2t/3` of `S(t, ·)`, found by a sign scan
//! and bisection.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::reference;
use crate::siegel::{base_change, ComplexMatrix, RiemannMatrix};
use crate::theta::{gaussian_lattice_sum, LatticeSum, TruncationPolicy};
use crate::w9::cover_shape_extract;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Root-finder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Tail tolerance of the series.
    pub series_tol: f64,
    /// Width of the final bracket on `y`.
    pub root_tol: f64,
    /// Step of the sign scan in `y`.
    pub scan_step: f64,
    /// Upper end of the scan; `None` means `5t`.
    pub scan_max: Option<f64>,
    pub max_bisections: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            series_tol: 1e-12,
            root_tol: 1e-10,
            scan_step: 0.05,
            scan_max: None,
            max_bisections: 200,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.series_tol > 0.0
            && self.root_tol > 0.0
            && self.scan_step > 0.0
            && self.scan_max.is_none_or(|m| m > 0.0)
            && self.max_bisections > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "solver settings must be positive: {self:?}"
            )))
        }
    }

    fn policy(&self) -> TruncationPolicy {
        TruncationPolicy::with_tail_tol(self.series_tol)
    }
}

/// Notes attached to a solved point.
#[derive(Debug, Clone, PartialEq)]
pub enum PointFlag {
    /// The scan saw more than one sign change; the extra brackets' midpoints.
    MultipleSignChanges(Vec<f64>),
    /// The scan started near the previous root instead of at `2t/3`.
    WarmStart,
}

impl fmt::Display for PointFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointFlag::MultipleSignChanges(extra) => {
                write!(f, "multiple_sign_changes:{}", extra.len() + 1)?;
                for y in extra {
                    write!(f, "@{y:.6}")?;
                }
                Ok(())
            }
            PointFlag::WarmStart => f.write_str("warm_start"),
        }
    }
}

/// A solved point of the geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPoint {
    pub t: f64,
    pub y: f64,
    pub z: RiemannMatrix,
    pub zhat: RiemannMatrix,
    /// `|S(t, y)|` at the returned root.
    pub residual: f64,
    /// Width of the final bracket.
    pub bracket_width: f64,
    pub flags: Vec<PointFlag>,
}

impl GeodesicPoint {
    pub fn flags_string(&self) -> String {
        self.flags
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn check_domain(t: f64, y: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    if !(y > 2.0 * t / 3.0) || !y.is_finite() {
        return Err(Error::Domain(format!(
            "y = {y} must exceed 2t/3 = {}",
            2.0 * t / 3.0
        )));
    }
    Ok(())
}

/// Cover period matrix `Ẑ_t` at `(t, y)`.
pub fn zhat_of_ty(t: f64, y: f64) -> Result<RiemannMatrix> {
    check_domain(t, y)?;
    let z1 = c(0.0, y);
    let z12 = c(0.0, y / 2.0);
    let z13 = c(0.0, t - y / 2.0);
    let z2 = c(0.5, y - t / 2.0);
    RiemannMatrix::from_rows(&[vec![z1, z12, z13], vec![z12, z2, z12], vec![z13, z12, z1]])
}

/// `Ẑ'_t`: diagonal `1/2 + i(y − t/2)`, off-diagonal `1/2 − (i/2)(y − t)`.
pub fn zhat_prime(t: f64, y: f64) -> Result<RiemannMatrix> {
    check_domain(t, y)?;
    let d = c(0.5, y - t / 2.0);
    let o = c(0.5, -(y - t) / 2.0);
    RiemannMatrix::from_rows(&[vec![d, o, o], vec![o, d, o], vec![o, o, d]])
}

/// `Ẑ'_t` computed as the base change of `Ẑ_t` by `M`.
pub fn zhat_prime_by_base_change(t: f64, y: f64) -> Result<RiemannMatrix> {
    base_change(&zhat_of_ty(t, y)?, &reference::m_geodesic())
}

/// Genus-2 period matrix `Z_t = [[1 + i(2y − t), iy], [iy, i(y/2 + t)]]`.
pub fn z_of_ty(t: f64, y: f64) -> Result<RiemannMatrix> {
    check_domain(t, y)?;
    RiemannMatrix::from_rows(&[
        vec![c(1.0, 2.0 * y - t), c(0.0, y)],
        vec![c(0.0, y), c(0.0, y / 2.0 + t)],
    ])
}

/// The series `S(t, y)` with its truncation data.
pub fn main_series_sum(t: f64, y: f64, policy: &TruncationPolicy) -> Result<LatticeSum> {
    check_domain(t, y)?;
    let diag = c(t / 2.0 - y, 0.5);
    // Σ_{l<m} k_l k_m is ½ ᵀk (J − I) k, so each off-diagonal entry carries half the coefficient.
    let off = c((y - t) / 2.0, 0.5);
    let a = ComplexMatrix::from_fn(3, 3, |i, j| if i == j { diag } else { off });
    let lin = c(-t / 2.0, 1.5);
    gaussian_lattice_sum(&a, &[lin; 3], &[0.0; 3], policy)
}

/// `S(t, y)`.
pub fn main_series(t: f64, y: f64, policy: &TruncationPolicy) -> Result<Complex64> {
    Ok(main_series_sum(t, y, policy)?.value)
}

/// The nonzero factor with `θ[111;000](Ẑ'_t) = exp(π(−3t/8 + 9i/8)) · S(t, y)`.
pub fn series_prefactor(t: f64) -> Complex64 {
    (c(-3.0 * t / 8.0, 9.0 / 8.0) * std::f64::consts::PI).exp()
}

struct Scan {
    brackets: Vec<(f64, f64, f64, f64)>,
}

fn scan(t: f64, from: f64, to: f64, cfg: &SolverConfig, stop_at_first: bool) -> Result<Scan> {
    let policy = cfg.policy();
    let f = |y: f64| -> Result<f64> { Ok(main_series(t, y, &policy)?.re) };
    let mut brackets = Vec::new();
    let mut y0 = from;
    let mut f0 = f(y0)?;
    let n = ((to - from) / cfg.scan_step).ceil().max(1.0) as usize;
    for i in 1..=n {
        let y1 = (from + i as f64 * cfg.scan_step).min(to);
        let f1 = f(y1)?;
        if f0 == 0.0 || f0.signum() != f1.signum() {
            brackets.push((y0, f0, y1, f1));
            if stop_at_first {
                break;
            }
        }
        y0 = y1;
        f0 = f1;
    }
    Ok(Scan { brackets })
}

fn bisect(t: f64, bracket: (f64, f64, f64, f64), cfg: &SolverConfig) -> Result<(f64, f64)> {
    let policy = cfg.policy();
    let (mut lo, mut flo, mut hi, _) = bracket;
    if flo == 0.0 {
        return Ok((lo, 0.0));
    }
    for _ in 0..cfg.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = main_series(t, mid, &policy)?.re;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let width = hi - lo;
    if width > cfg.root_tol {
        return Err(Error::Accuracy {
            difference: width,
            tol: cfg.root_tol,
        });
    }
    Ok((0.5 * (lo + hi), width))
}

fn finish(
    t: f64,
    y: f64,
    width: f64,
    flags: Vec<PointFlag>,
    cfg: &SolverConfig,
) -> Result<GeodesicPoint> {
    let residual = main_series(t, y, &cfg.policy())?.norm();
    Ok(GeodesicPoint {
        t,
        y,
        z: z_of_ty(t, y)?,
        zhat: zhat_of_ty(t, y)?,
        residual,
        bracket_width: width,
        flags,
    })
}

fn solve_in(t: f64, from: f64, cfg: &SolverConfig, warm: bool) -> Result<GeodesicPoint> {
    let to = cfg.scan_max.unwrap_or(5.0 * t);
    if !(to > from) {
        return Err(Error::Bracket { lo: from, hi: to });
    }
    let found = scan(t, from, to, cfg, false)?;
    let Some(&first) = found.brackets.first() else {
        return Err(Error::Bracket { lo: from, hi: to });
    };
    let mut flags = Vec::new();
    if warm {
        flags.push(PointFlag::WarmStart);
    }
    if found.brackets.len() > 1 {
        flags.push(PointFlag::MultipleSignChanges(
            found.brackets[1..]
                .iter()
                .map(|b| 0.5 * (b.0 + b.2))
                .collect(),
        ));
    }
    let (y, width) = bisect(t, first, cfg)?;
    finish(t, y, width, flags, cfg)
}

/// Solves `S(t, y) = 0` for `y > 2t/3`, scanning the whole window.
pub fn solve_y(t: f64, cfg: &SolverConfig) -> Result<GeodesicPoint> {
    cfg.validate()?;
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("t = {t} must be at least 1")));
    }
    solve_in(t, 2.0 * t / 3.0 + cfg.scan_step, cfg, false)
}

/// One point of a trace: a solved point or the error that stopped it.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub result: Result<GeodesicPoint>,
}

/// Solves along `t_start..=t_end` on `steps` equally spaced points.
///
/// Each scan starts a couple of steps below the previous root; every tenth
/// point is scanned from `2t/3` as a drift guard. Failed points keep their
/// error and do not stop the sweep.
pub fn trace(
    t_start: f64,
    t_end: f64,
    steps: usize,
    cfg: &SolverConfig,
) -> Result<Vec<TracePoint>> {
    cfg.validate()?;
    if !(t_start >= 1.0) {
        return Err(Error::Domain(format!(
            "t_start = {t_start} must be at least 1"
        )));
    }
    let single = steps == 1 && t_start == t_end;
    if !single && !(t_start < t_end && steps >= 2) {
        return Err(Error::Parameter(format!(
            "need t_start < t_end and at least 2 steps (or a single point), got {t_start}..{t_end} in {steps}"
        )));
    }
    let mut out = Vec::with_capacity(steps);
    let mut previous: Option<f64> = None;
    for i in 0..steps {
        let t = if single {
            t_start
        } else {
            t_start + (t_end - t_start) * i as f64 / (steps - 1) as f64
        };
        let floor = 2.0 * t / 3.0 + cfg.scan_step;
        let cold = i % 10 == 0 || previous.is_none();
        let result = match previous {
            Some(y_prev) if !cold => {
                let from = (y_prev - 2.0 * cfg.scan_step).max(floor);
                solve_in(t, from, cfg, from > floor).or_else(|_| solve_in(t, floor, cfg, false))
            }
            _ => solve_in(t, floor, cfg, false),
        };
        previous = result.as_ref().ok().map(|p| p.y).or(previous);
        out.push(TracePoint { t, result });
    }
    Ok(out)
}

/// `(t, y)` from a cover matrix of the geodesic shape: `y = Im z₁`,
/// `t = Im z₁₃ + y/2`.
pub fn extract_ty_from_cover(zhat: &RiemannMatrix, tol: f64) -> Result<(f64, f64)> {
    let shape = cover_shape_extract(zhat, tol)?;
    if shape.z1.re.abs() > tol || shape.z13.re.abs() > tol {
        return Err(Error::Domain(format!(
            "z1 = {} and z13 = {} are not purely imaginary within {tol:e}",
            shape.z1, shape.z13
        )));
    }
    let y = shape.z1.im;
    Ok((shape.z13.im + y / 2.0, y))
}
