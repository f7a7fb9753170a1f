//! The W9 family of genus-2 curves, its genus-3 double covers, the shape of
//! their period matrices and the automorphism tests along the real locus.
//!
//! Real M-curves in the family are parametrised by `s ∈ (0, √3/3)` through
//! `y² = x(x + 1)(x − a)(x − b)(x − c)` with `a = s²`, `b = f₃(f₃(s))²`,
//! `c = f₃(s)²`, where `f₃` is the order-3 Möbius map fixing `±i`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::periods::HyperellipticCurve;
use crate::siegel::{ComplexMatrix, RiemannMatrix};
use crate::theta::{theta_null, Characteristic, TruncationPolicy};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Default threshold on `|θ[111;101](Ẑ)|` for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Default residual threshold for conditions on exact parameters.
pub const CONDITION_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A point of the complex projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectivePoint {
    Finite(Complex64),
    Infinity,
}

impl ProjectivePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ProjectivePoint::Finite(z) => Some(z),
            ProjectivePoint::Infinity => None,
        }
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectivePoint::Finite(z) => write!(f, "{z}"),
            ProjectivePoint::Infinity => f.write_str("∞"),
        }
    }
}

/// `f₃(x) = (x + √3)/(−√3 x + 1)`; the pole `x = √3/3` maps to `∞`.
pub fn f3(x: Complex64) -> ProjectivePoint {
    let den = 1.0 - SQRT3 * x;
    if den.norm() <= 1e-15 * (1.0 + x.norm()) {
        ProjectivePoint::Infinity
    } else {
        ProjectivePoint::Finite((x + SQRT3) / den)
    }
}

/// `f₃` on the projective line (`f₃(∞) = −√3/3`).
pub fn f3_point(p: ProjectivePoint) -> ProjectivePoint {
    match p {
        ProjectivePoint::Finite(x) => f3(x),
        ProjectivePoint::Infinity => ProjectivePoint::Finite(c(-1.0 / SQRT3, 0.0)),
    }
}

fn f3_real(x: f64) -> f64 {
    (x + SQRT3) / (1.0 - SQRT3 * x)
}

/// `g(s) = −81(s² + 1)³ / ((3s + √3)²(3s − √3)²)`, the `u` of the curve `Q_s`.
pub fn g_of_s(s: f64) -> Result<f64> {
    // (3s + √3)(3s − √3) = 9s² − 3.
    let den = 9.0 * s * s - 3.0;
    if den.abs() <= 1e-14 * (1.0 + 9.0 * s * s) {
        return Err(Error::Pole(format!("g has a pole at s = {s}")));
    }
    Ok(-81.0 * (s * s + 1.0).powi(3) / (den * den))
}

/// `u ↦ −9u/(u + 9)`, the parameter of the curve isomorphic through `x ↦ x/(x − 1)`.
pub fn u_dual(u: f64) -> Result<f64> {
    if (u + 9.0).abs() <= 1e-14 * (1.0 + u.abs()) {
        return Err(Error::Pole("u_dual has a pole at u = -9".into()));
    }
    Ok(-9.0 * u / (u + 9.0))
}

/// Parameter `s ∈ (0, √3/3)` of a real M-curve in the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W9Param {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub u: f64,
}

impl W9Param {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < SQRT3 / 3.0) {
            return Err(Error::Parameter(format!("s = {s} outside (0, √3/3)")));
        }
        let fs = f3_real(s);
        Ok(Self {
            s,
            a: s * s,
            b: f3_real(fs).powi(2),
            c: fs * fs,
            u: g_of_s(s)?,
        })
    }

    /// `−1, 0, a, b, c`.
    pub fn roots(&self) -> [f64; 5] {
        [-1.0, 0.0, self.a, self.b, self.c]
    }

    /// `(√a, √b, √c)`.
    pub fn cover_roots(&self) -> (f64, f64, f64) {
        (self.a.sqrt(), self.b.sqrt(), self.c.sqrt())
    }
}

/// Monic cubic `x³ + c2 x² + c1 x + c0`: roots by Cardano, Newton-polished.
fn cubic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let plus = -q / 2.0 + disc;
    let minus = -q / 2.0 - disc;
    let big = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };
    let shift = -c2 / 3.0;
    let omega = c(-0.5, SQRT3 / 2.0);
    let mut roots = if big.norm() == 0.0 {
        [shift; 3]
    } else {
        let cr = big.powf(1.0 / 3.0);
        let mut out = [c(0.0, 0.0); 3];
        let mut rot = c(1.0, 0.0);
        for r in &mut out {
            let u = cr * rot;
            *r = u - p / (3.0 * u) + shift;
            rot *= omega;
        }
        out
    };
    for r in &mut roots {
        for _ in 0..4 {
            let f = ((*r + c2) * *r + c1) * *r + c0;
            let df = (3.0 * *r + 2.0 * c2) * *r + c1;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            *r -= step;
            if step.norm() <= 1e-16 * r.norm() {
                break;
            }
        }
    }
    roots
}

/// `x³ + u x² − (8/3) u x + (16/9) u`.
pub fn w9_cubic(u: Complex64, x: Complex64) -> Complex64 {
    ((x + u) * x - 8.0 / 3.0 * u) * x + 16.0 / 9.0 * u
}

/// Roots of the cubic factor of `P_u`.
pub fn w9_cubic_roots(u: Complex64) -> [Complex64; 3] {
    cubic_roots(u, -8.0 / 3.0 * u, 16.0 / 9.0 * u)
}

/// `y² = x(x − 1)(x³ + u x² − (8/3)u x + (16/9)u)`.
pub fn curve_pu(u: Complex64) -> Result<HyperellipticCurve> {
    if u.norm() == 0.0 || (u + 9.0).norm() <= 1e-14 * (1.0 + u.norm()) {
        return Err(Error::Parameter(format!(
            "u = {u} is excluded (u ∉ {{-9, 0}})"
        )));
    }
    let roots = w9_cubic_roots(u);
    let mut pts = vec![c(0.0, 0.0), c(1.0, 0.0)];
    for r in roots {
        // Snap roots of real cubics onto the real axis.
        let r = if u.im == 0.0 && r.im.abs() <= 1e-12 * (1.0 + r.norm()) {
            c(r.re, 0.0)
        } else {
            r
        };
        pts.push(r);
    }
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if (pts[i] - pts[j]).norm() <= 1e-9 * scale {
                return Err(Error::Degenerate(format!(
                    "repeated root near {} for u = {u}",
                    pts[i]
                )));
            }
        }
    }
    HyperellipticCurve::new(pts)
}

/// `y² = x(x + 1)(x − a(s))(x − b(s))(x − c(s))`.
pub fn curve_qs(s: f64) -> Result<HyperellipticCurve> {
    HyperellipticCurve::from_real(&W9Param::new(s)?.roots())
}

/// Genus-3 cover `w² = (z² + 1)(z² − p)(z² − q)(z² − r)` of the genus-2
/// curve with branch points `−1, 0, p, q, r`.
pub fn double_cover(curve: &HyperellipticCurve) -> Result<HyperellipticCurve> {
    let pts = curve.branch_points();
    if pts.len() != 5 {
        return Err(Error::Layout(format!(
            "double cover needs 5 finite branch points, got {}",
            pts.len()
        )));
    }
    let tol = 1e-12;
    let is = |z: Complex64, v: f64| (z - c(v, 0.0)).norm() <= tol;
    if !pts.iter().any(|&z| is(z, -1.0)) || !pts.iter().any(|&z| is(z, 0.0)) {
        return Err(Error::Layout(
            "double cover needs −1 and 0 among the branch points".into(),
        ));
    }
    let mut out = vec![c(0.0, 1.0), c(0.0, -1.0)];
    for &z in pts.iter().filter(|&&z| !is(z, -1.0) && !is(z, 0.0)) {
        let r = z.sqrt();
        out.push(r);
        out.push(-r);
    }
    HyperellipticCurve::new(out)
}

/// The covering map `(z, w) ↦ (z², z w)`.
pub fn cover_to_base(z: Complex64, w: Complex64) -> (Complex64, Complex64) {
    (z * z, z * w)
}

/// Free parameters of a cover period matrix of the W9 shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverShape {
    pub z1: Complex64,
    pub z13: Complex64,
}

impl CoverShape {
    pub fn z12(&self) -> Complex64 {
        self.z1 / 2.0
    }

    /// Middle diagonal entry `1/2 + (3/4) z₁ − (1/2) z₁₃`.
    pub fn z2(&self) -> Complex64 {
        c(0.5, 0.0) + 0.75 * self.z1 - 0.5 * self.z13
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let (z1, z12, z13, z2) = (self.z1, self.z12(), self.z13, self.z2());
        ComplexMatrix::from_rows(&[vec![z1, z12, z13], vec![z12, z2, z12], vec![z13, z12, z1]])
            .expect("3x3 from finite entries")
    }

    pub fn riemann(&self) -> Result<RiemannMatrix> {
        RiemannMatrix::from_matrix(self.matrix())
    }
}

/// Reads `(z₁, z₁₃)` from `Ẑ`, failing unless `Ẑ` has the W9 cover shape
/// within `tol`.
pub fn cover_shape_extract(zhat: &RiemannMatrix, tol: f64) -> Result<CoverShape> {
    if zhat.genus() != 3 {
        return Err(Error::Dimension(format!(
            "cover shape needs genus 3, got {}",
            zhat.genus()
        )));
    }
    let shape = CoverShape {
        z1: (zhat.get(0, 0) + zhat.get(2, 2)) / 2.0,
        z13: (zhat.get(0, 2) + zhat.get(2, 0)) / 2.0,
    };
    let residual = shape.matrix().max_abs_diff(zhat.matrix());
    if residual > tol {
        return Err(Error::ShapeMismatch { residual, tol });
    }
    Ok(shape)
}

/// `Z = [[2z₂, 2z₁₂], [2z₁₂, z₁ + z₁₃]]` read from a cover matrix.
pub fn base_from_cover(zhat: &RiemannMatrix) -> Result<RiemannMatrix> {
    if zhat.genus() != 3 {
        return Err(Error::Dimension(format!(
            "base_from_cover needs genus 3, got {}",
            zhat.genus()
        )));
    }
    let z2 = zhat.get(1, 1);
    let z12 = zhat.get(0, 1);
    let z1 = zhat.get(0, 0);
    let z13 = zhat.get(0, 2);
    RiemannMatrix::from_rows(&[vec![2.0 * z2, 2.0 * z12], vec![2.0 * z12, z1 + z13]])
        .map_err(|e| Error::NotSiegel(format!("base matrix from cover: {e}")))
}

/// `|θ[111;101](Ẑ)|` after checking the cover shape with `shape_tol`.
pub fn theta_membership_check(
    zhat: &RiemannMatrix,
    policy: &TruncationPolicy,
    shape_tol: f64,
) -> Result<f64> {
    cover_shape_extract(zhat, shape_tol)?;
    Ok(theta_null(&membership_characteristic(), zhat, policy)?.norm())
}

/// The even characteristic `[111;101]` that vanishes on the family.
pub fn membership_characteristic() -> Characteristic {
    Characteristic::new(vec![1, 1, 1], vec![1, 0, 1]).expect("valid characteristic")
}

/// Automorphism group labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupLabel {
    Z2,
    D2,
    D4,
    D6,
    /// Order 24, `⟨r, s | r⁴, s⁶, (rs)², (r⁻¹s)²⟩`.
    G24,
}

impl GroupLabel {
    pub fn order(self) -> usize {
        match self {
            GroupLabel::Z2 => 2,
            GroupLabel::D2 => 4,
            GroupLabel::D4 => 8,
            GroupLabel::D6 => 12,
            GroupLabel::G24 => 24,
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupLabel::Z2 => "Z2",
            GroupLabel::D2 => "D2",
            GroupLabel::D4 => "D4",
            GroupLabel::D6 => "D6",
            GroupLabel::G24 => "G24",
        })
    }
}

/// A named equation with its absolute residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResidual {
    pub id: &'static str,
    pub equation: &'static str,
    pub residual: f64,
    pub holds: bool,
}

/// Real and complex automorphism groups of `y² = x(x−a)(x−b)(x−c)(x−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismReport {
    pub real_group: GroupLabel,
    pub complex_group: GroupLabel,
    /// Case of the classification: `1a`, `1b`, `1c`, `2a`, `2b` or `2c`.
    pub case: &'static str,
    pub conditions: Vec<ConditionResidual>,
}

/// Classification of real M-curves in the normal form `0 < a < b < c < 1`.
pub fn cirre_classify(a: f64, b: f64, c: f64, tol: f64) -> Result<AutomorphismReport> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if !(0.0 < a && a < b && b < c && c < 1.0) {
        return Err(Error::Parameter(format!(
            "need 0 < a < b < c < 1, got ({a}, {b}, {c})"
        )));
    }
    let eqs: [(&'static str, &'static str, f64); 4] = [
        ("C1", "a = bc", a - b * c),
        ("C2", "a = (b - c)/(c - 1)", a - (b - c) / (c - 1.0)),
        ("C3", "a = 1 + c - c/b", a - (1.0 + c - c / b)),
        ("C4", "a = b(c - 1)/(b - 1)", a - b * (c - 1.0) / (b - 1.0)),
    ];
    let conditions: Vec<ConditionResidual> = eqs
        .iter()
        .map(|&(id, equation, r)| ConditionResidual {
            id,
            equation,
            residual: r.abs(),
            holds: r.abs() < tol,
        })
        .collect();
    let coincidences = conditions[..3].iter().filter(|c| c.holds).count();
    let extra_real = !conditions[3].holds;
    let (real_group, complex_group, case) = match (extra_real, coincidences) {
        (true, 0) => (GroupLabel::Z2, GroupLabel::Z2, "1c"),
        (true, 1) => (GroupLabel::D2, GroupLabel::D2, "1a"),
        (true, _) => (GroupLabel::D6, GroupLabel::D6, "1b"),
        (false, 0) => (GroupLabel::Z2, GroupLabel::D2, "2c"),
        (false, 1) => (GroupLabel::D2, GroupLabel::D4, "2a"),
        (false, _) => (GroupLabel::D6, GroupLabel::G24, "2b"),
    };
    Ok(AutomorphismReport {
        real_group,
        complex_group,
        case,
        conditions,
    })
}

/// Affine normal form: the smallest of five distinct real roots goes to 0,
/// the largest to 1, and the middle three (sorted) are returned.
pub fn normalize_branch_points(roots: &[f64]) -> Result<(f64, f64, f64)> {
    let mut xs: Vec<f64> = roots.to_vec();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("roots must be finite".into()));
    }
    xs.sort_by(f64::total_cmp);
    let scale = xs.iter().map(|x| x.abs()).fold(1.0, f64::max);
    xs.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * scale);
    if xs.len() != 5 || roots.len() != 5 {
        return Err(Error::Parameter(format!(
            "need 5 distinct real roots, got {} distinct of {}",
            xs.len(),
            roots.len()
        )));
    }
    let (lo, hi) = (xs[0], xs[4]);
    let map = |x: f64| (x - lo) / (hi - lo);
    Ok((map(xs[1]), map(xs[2]), map(xs[3])))
}

/// All normal forms `(a, b, c)` of a real M-curve with five finite real
/// branch points and one at infinity: for each of the 12 ways of walking the
/// six points around the real projective line, the real Möbius map sending the
/// first, fifth and sixth point to `0, 1, ∞`.
pub fn normal_forms(roots: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    normalize_branch_points(roots)?;
    let mut pts: Vec<Option<f64>> = roots.iter().copied().map(Some).collect();
    pts.sort_by(|x, y| x.unwrap().total_cmp(&y.unwrap()));
    pts.push(None);
    // Differences with the point at infinity drop out of the cross-ratio.
    let diff = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => x - y,
        _ => 1.0,
    };
    let mut out = Vec::with_capacity(12);
    for start in 0..6 {
        for step in [1, 5] {
            let q: Vec<Option<f64>> = (0..6).map(|j| pts[(start + step * j) % 6]).collect();
            let phi = |x: Option<f64>| {
                diff(x, q[0]) * diff(q[4], q[5]) / (diff(x, q[5]) * diff(q[4], q[0]))
            };
            out.push((phi(q[1]), phi(q[2]), phi(q[3])));
        }
    }
    Ok(out)
}

/// Classification that does not depend on how the branch points are labelled:
/// the normal form with the largest complex automorphism group wins. Returns
/// that normal form with its report.
pub fn classify_real_mcurve(
    roots: &[f64],
    tol: f64,
) -> Result<((f64, f64, f64), AutomorphismReport)> {
    let mut best: Option<((f64, f64, f64), AutomorphismReport)> = None;
    for abc in normal_forms(roots)? {
        let report = cirre_classify(abc.0, abc.1, abc.2, tol)?;
        let key = |r: &AutomorphismReport| (r.complex_group.order(), r.real_group.order());
        if best.as_ref().is_none_or(|(_, r)| key(&report) > key(r)) {
            best = Some((abc, report));
        }
    }
    Ok(best.expect("twelve normal forms"))
}

/// Residuals of the four involution conditions along the family at `s`.
/// Labels `A`–`D` follow the four candidate Möbius involutions.
pub fn w9_involution_conditions(s: f64, tol: f64) -> Result<Vec<ConditionResidual>> {
    let p = W9Param::new(s)?;
    let (a, b, c) = (p.a, p.b, p.c);
    let eqs: [(&'static str, &'static str, f64); 4] = [
        ("A", "a = b - 1 + b/c", a - (b - 1.0 + b / c)),
        ("B", "a = bc/(1 + b + c)", a - b * c / (1.0 + b + c)),
        ("C", "a = (c - b)/(1 + b)", a - (c - b) / (1.0 + b)),
        ("D", "a = b/(1 - b + c)", a - b / (1.0 - b + c)),
    ];
    Ok(eqs
        .iter()
        .map(|&(id, equation, r)| ConditionResidual {
            id,
            equation,
            residual: r.abs(),
            holds: r.abs() < tol,
        })
        .collect())
}

/// `3x⁴ + 8√3x³ + 18x² + 16√3x − 9`, whose root in `(0, √3/3)` is `2 − √3`.
pub fn order4_quartic(x: f64) -> f64 {
    (((3.0 * x + 8.0 * SQRT3) * x + 18.0) * x + 16.0 * SQRT3) * x - 9.0
}

/// Period matrix of the L-shaped surface with an order-4 automorphism and
/// side parameter `λ`.
pub fn silhol_order4_period(lambda: f64) -> Result<RiemannMatrix> {
    let den = 2.0 * lambda - 1.0;
    if !(den > 0.0) {
        return Err(Error::Parameter(format!("λ = {lambda} must exceed 1/2")));
    }
    let diag = (2.0 * lambda * lambda - 2.0 * lambda + 1.0) / den;
    let off = -2.0 * lambda * (lambda - 1.0) / den;
    RiemannMatrix::from_rows(&[
        vec![c(0.0, diag), c(0.0, off)],
        vec![c(0.0, off), c(0.0, diag)],
    ])
}
