//! Period matrices of hyperelliptic curves `y² = ∏ (x − x_j)` from arc
//! integrals of `x^{k−1} dx / y`.
//!
//! The branch points are ordered `x_1, …, x_{2g+2}` (with `x_{2g+2} = ∞`
//! when there is an odd number of finite points) and joined by arcs
//! `ε_j = [x_j, x_{j+1}]`. The lift `δ_j` of `ε_j` is a closed cycle whose
//! period is twice the arc integral; that common factor cancels in `AB⁻¹`
//! and is never applied. A [`CyclePlan`] expresses a symplectic basis as
//! integer combinations of the `δ_j`, eliminating arcs through infinity with
//! the relations `Σ δ_even = 0` and `Σ δ_odd = 0`.
//!
//! Arcs are piecewise linear. On each piece the endpoint factors
//! `(z − x_j)^{1/2}` are split off analytically so the tanh-sinh rule sees
//! the `(1 ∓ u)^{-1/2}` singularities with cancellation-free complements.

use std::fmt;

use num_complex::Complex64;

use crate::calibration::{CalibrationTable, LayoutSigns};
use crate::error::{Error, Result};
use crate::quadrature::{tanh_sinh, Node, QuadConfig};
use crate::siegel::{ComplexMatrix, RiemannMatrix};

/// Minimum pairwise distance between branch points.
pub const MIN_BRANCH_SEPARATION: f64 = 1e-12;
/// Arc clearance as a fraction of the minimum pairwise branch distance.
pub const CLEARANCE_FRACTION: f64 = 1e-3;
/// `|√P|` below this at a tracking node makes the continuation ambiguous.
pub const TRACKING_FLOOR: f64 = 1e-13;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A hyperelliptic curve given by its finite branch points.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperellipticCurve {
    branch_points: Vec<Complex64>,
    genus: usize,
}

impl HyperellipticCurve {
    pub fn new(branch_points: Vec<Complex64>) -> Result<Self> {
        if branch_points.len() < 3 {
            return Err(Error::Parameter(format!(
                "{} branch points do not define a curve",
                branch_points.len()
            )));
        }
        if branch_points
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Parameter("branch point is not finite".into()));
        }
        let curve = Self {
            genus: (branch_points.len() - 1) / 2,
            branch_points,
        };
        let sep = curve.min_pairwise_distance();
        if sep <= MIN_BRANCH_SEPARATION {
            return Err(Error::Degenerate(format!(
                "branch points closer than {sep:.3e}"
            )));
        }
        Ok(curve)
    }

    /// Curve with real branch points.
    pub fn from_real(points: &[f64]) -> Result<Self> {
        Self::new(points.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    /// Whether `∞` is a branch point (odd number of finite ones).
    pub fn branched_at_infinity(&self) -> bool {
        self.branch_points.len() % 2 == 1
    }

    /// `P(x) = ∏ (x − x_j)`.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.branch_points.iter().map(|r| x - r).product()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let pts = &self.branch_points;
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.min((pts[i] - pts[j]).norm());
            }
        }
        best
    }

    pub fn clearance(&self) -> f64 {
        CLEARANCE_FRACTION * self.min_pairwise_distance()
    }

    fn index_of(&self, z: Complex64) -> Option<usize> {
        let tol = 1e-3 * self.min_pairwise_distance();
        self.branch_points
            .iter()
            .position(|b| (b - z).norm() <= tol)
    }
}

/// A piecewise-linear path between two branch points.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPath {
    nodes: Vec<Complex64>,
}

/// One linear piece with the continuity sign linking it to the previous one.
#[derive(Debug, Clone, Copy)]
struct Piece {
    p: Complex64,
    q: Complex64,
    p_branch: Option<usize>,
    q_branch: Option<usize>,
    sign: f64,
}

impl ArcPath {
    /// A polyline through `nodes`; the first and last must be branch points.
    pub fn new(nodes: Vec<Complex64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Path("a path needs at least two nodes".into()));
        }
        Ok(Self { nodes })
    }

    pub fn segment(from: Complex64, to: Complex64) -> Self {
        Self {
            nodes: vec![from, to],
        }
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn start(&self) -> Complex64 {
        self.nodes[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.nodes.last().expect("non-empty")
    }

    pub fn reversed(&self) -> Self {
        Self {
            nodes: self.nodes.iter().rev().copied().collect(),
        }
    }

    /// Checks the endpoint and clearance rules against `curve`.
    pub fn validate(&self, curve: &HyperellipticCurve) -> Result<(usize, usize)> {
        let start = curve.index_of(self.start()).ok_or_else(|| {
            Error::Path(format!(
                "path starts at {}, not a branch point",
                self.start()
            ))
        })?;
        let end = curve.index_of(self.end()).ok_or_else(|| {
            Error::Path(format!("path ends at {}, not a branch point", self.end()))
        })?;
        if start == end {
            return Err(Error::Path(
                "path starts and ends at the same branch point".into(),
            ));
        }
        let clearance = curve.clearance();
        for w in self.nodes.windows(2) {
            if (w[1] - w[0]).norm() == 0.0 {
                return Err(Error::Path("repeated path node".into()));
            }
        }
        for interior in &self.nodes[1..self.nodes.len() - 1] {
            if let Some(j) = curve
                .branch_points
                .iter()
                .position(|b| (b - interior).norm() < clearance)
            {
                return Err(Error::Path(format!(
                    "interior node {interior} within clearance of branch point {j}"
                )));
            }
        }
        for (j, b) in curve.branch_points.iter().enumerate() {
            if j == start || j == end {
                continue;
            }
            for w in self.nodes.windows(2) {
                let d = distance_to_segment(*b, w[0], w[1]);
                if d < clearance {
                    return Err(Error::Path(format!(
                        "path passes at distance {d:.3e} from branch point {} (clearance {clearance:.3e})",
                        b
                    )));
                }
            }
        }
        // The path must not touch its own endpoints again.
        for (w_idx, w) in self.nodes.windows(2).enumerate() {
            let last = w_idx + 2 == self.nodes.len();
            if w_idx > 0 && distance_to_segment(curve.branch_points[start], w[0], w[1]) < clearance
            {
                return Err(Error::Path("path returns to its start point".into()));
            }
            if !last && distance_to_segment(curve.branch_points[end], w[0], w[1]) < clearance {
                return Err(Error::Path("path touches its end point early".into()));
            }
        }
        Ok((start, end))
    }

    fn pieces(&self, curve: &HyperellipticCurve) -> Result<Vec<Piece>> {
        let (start, end) = self.validate(curve)?;
        let n = self.nodes.len();
        let mut pieces: Vec<Piece> = self
            .nodes
            .windows(2)
            .enumerate()
            .map(|(i, w)| Piece {
                p: w[0],
                q: w[1],
                p_branch: (i == 0).then_some(start),
                q_branch: (i + 2 == n).then_some(end),
                sign: 1.0,
            })
            .collect();
        // Match the raw branches at shared interior nodes.
        for i in 1..pieces.len() {
            let left = raw_sqrt(curve, &pieces[i - 1], node_at_end(1.0)).1;
            let right = raw_sqrt(curve, &pieces[i], node_at_end(-1.0)).1;
            if right.norm() < TRACKING_FLOOR {
                return Err(Error::Tracking(
                    "vanishing square root at a path node".into(),
                ));
            }
            pieces[i].sign = if (left - right).norm() <= (left + right).norm() {
                1.0
            } else {
                -1.0
            };
        }
        Ok(pieces)
    }
}

fn distance_to_segment(x: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let t = ((x - p) * d.conj()).re / d.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (p + d * t - x).norm()
}

fn node_at_end(u: f64) -> Node {
    Node {
        u,
        one_minus: 1.0 - u,
        one_plus: 1.0 + u,
    }
}

/// Point of a piece at parameter `u` and the raw continuous branch of `√P`
/// there (before the piece continuity sign is applied).
fn raw_sqrt(curve: &HyperellipticCurve, piece: &Piece, node: Node) -> (Complex64, Complex64) {
    let h = (piece.q - piece.p) * 0.5;
    let mid = (piece.p + piece.q) * 0.5;
    let z = if node.u >= 0.0 {
        piece.q - h * node.one_minus
    } else {
        piece.p + h * node.one_plus
    };
    let mut w = c(piece.sign, 0.0);
    for (j, x) in curve.branch_points.iter().enumerate() {
        if Some(j) == piece.p_branch {
            w *= h.sqrt() * node.one_plus.sqrt();
        } else if Some(j) == piece.q_branch {
            // (p − q)/2 rather than −h: negation would turn +0i into −0i.
            w *= ((piece.p - piece.q) * 0.5).sqrt() * node.one_minus.sqrt();
        } else {
            let anchor = mid - x;
            w *= anchor.sqrt() * ((z - x) / anchor).sqrt();
        }
    }
    (z, w)
}

/// Integrals of `x^{k−1} dx / √P`, `k = 1..=g`, along `path` with the raw
/// branch multiplied by `branch_sign`.
pub fn integrate_arc_all(
    curve: &HyperellipticCurve,
    path: &ArcPath,
    branch_sign: i8,
    quad: &QuadConfig,
) -> Result<ArcIntegral> {
    let g = curve.genus();
    let pieces = path.pieces(curve)?;
    let mut values = vec![c(0.0, 0.0); g];
    let mut level = 0;
    let mut evaluations = 0;
    for piece in &pieces {
        let h = (piece.q - piece.p) * 0.5;
        let out = tanh_sinh(g, quad, |node| {
            let (z, w) = raw_sqrt(curve, piece, node);
            let base = h / w;
            let mut powers = Vec::with_capacity(g);
            let mut zk = c(1.0, 0.0);
            for _ in 0..g {
                powers.push(base * zk);
                zk *= z;
            }
            Ok(powers)
        })?;
        level = level.max(out.level);
        evaluations += out.evaluations;
        for (acc, v) in values.iter_mut().zip(out.values) {
            *acc += v;
        }
    }
    let s = f64::from(branch_sign.signum());
    Ok(ArcIntegral {
        values: values.into_iter().map(|v| v * s).collect(),
        level,
        evaluations,
    })
}

/// Arc integrals for every holomorphic differential, with quadrature stats.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcIntegral {
    /// `values[k-1] = ∫ x^{k−1} dx / √P`.
    pub values: Vec<Complex64>,
    pub level: usize,
    pub evaluations: usize,
}

/// `∫ x^{k−1} dx / √P` along `path` (`k` is 1-based).
pub fn integrate_arc(
    curve: &HyperellipticCurve,
    path: &ArcPath,
    k: usize,
    branch_sign: i8,
    quad: &QuadConfig,
) -> Result<Complex64> {
    if k == 0 || k > curve.genus() {
        return Err(Error::Parameter(format!(
            "differential index {k} outside 1..={}",
            curve.genus()
        )));
    }
    Ok(integrate_arc_all(curve, path, branch_sign, quad)?.values[k - 1])
}

/// Which arc fixes the determination of `√P`, and its sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqrtConvention {
    /// Index into the arc chain.
    pub reference_arc: usize,
    /// `+1`: `√P` is real positive (or, on a purely imaginary arc, has
    /// positive imaginary part) at the midpoint of the reference arc.
    pub sign: i8,
}

/// Value of the branch-adjusted `√P` at the middle of an arc.
fn arc_midpoint_value(curve: &HyperellipticCurve, path: &ArcPath) -> Result<Complex64> {
    let pieces = path.pieces(curve)?;
    let piece = &pieces[pieces.len() / 2];
    let node = if pieces.len() % 2 == 1 {
        node_at_end(0.0)
    } else {
        node_at_end(-1.0)
    };
    Ok(raw_sqrt(curve, piece, node).1)
}

fn real_positive_sign(w: Complex64) -> i8 {
    if w.re.abs() > 1e-9 * w.norm() {
        if w.re > 0.0 {
            1
        } else {
            -1
        }
    } else if w.im > 0.0 {
        1
    } else {
        -1
    }
}

/// Relative sign between the raw branches of two consecutive arcs sharing
/// an endpoint, obtained by continuing `√P` along a small circle around the
/// shared branch point, passing on the left of the chain (clockwise from
/// the incoming arc to the outgoing one).
fn continuation_sign(
    curve: &HyperellipticCurve,
    incoming: &ArcPath,
    outgoing: &ArcPath,
) -> Result<f64> {
    let x = incoming.end();
    if (outgoing.start() - x).norm() > 1e-12 * (1.0 + x.norm()) {
        return Err(Error::Tracking(format!(
            "arcs do not share an endpoint ({} vs {})",
            x,
            outgoing.start()
        )));
    }
    let in_pieces = incoming.pieces(curve)?;
    let out_pieces = outgoing.pieces(curve)?;
    let last = *in_pieces.last().expect("non-empty");
    let first = out_pieces[0];
    let len_in = (last.q - last.p).norm();
    let len_out = (first.q - first.p).norm();
    let r = (0.1 * curve.min_pairwise_distance())
        .min(0.25 * len_in)
        .min(0.25 * len_out);

    // Point on the incoming arc at distance r before x, and on the outgoing one after.
    let a_node = Node {
        u: 1.0 - 2.0 * r / len_in,
        one_minus: 2.0 * r / len_in,
        one_plus: 2.0 - 2.0 * r / len_in,
    };
    let b_node = Node {
        u: -1.0 + 2.0 * r / len_out,
        one_minus: 2.0 - 2.0 * r / len_out,
        one_plus: 2.0 * r / len_out,
    };
    let (za, wa) = raw_sqrt(curve, &last, a_node);
    let (zb, wb) = raw_sqrt(curve, &first, b_node);

    let theta_a = (za - x).arg();
    let theta_b = (zb - x).arg();
    let mut sweep = (theta_a - theta_b).rem_euclid(2.0 * std::f64::consts::PI);
    if sweep == 0.0 {
        sweep = 2.0 * std::f64::consts::PI;
    }
    const STEPS: usize = 512;
    let mut tracked = wa;
    for step in 1..=STEPS {
        let theta = theta_a - sweep * step as f64 / STEPS as f64;
        let z = x + Complex64::from_polar(r, theta);
        let cand = curve.eval(z).sqrt();
        if cand.norm() < TRACKING_FLOOR {
            return Err(Error::Tracking(format!(
                "|√P| = {:.3e} at {z}",
                cand.norm()
            )));
        }
        tracked = if (cand - tracked).norm() <= (cand + tracked).norm() {
            cand
        } else {
            -cand
        };
    }
    let same = (tracked - wb).norm();
    let opposite = (tracked + wb).norm();
    if same.min(opposite) > 1e-6 * wb.norm() {
        return Err(Error::Tracking(format!(
            "continuation around {x} ended off both branches"
        )));
    }
    Ok(if same <= opposite { 1.0 } else { -1.0 })
}

/// Branch signs for a chain of consecutive arcs: the determination is fixed
/// on the reference arc and extended to its neighbours by continuity around
/// the shared branch points.
pub fn sqrt_determination(
    curve: &HyperellipticCurve,
    chain: &[ArcPath],
    convention: SqrtConvention,
) -> Result<Vec<i8>> {
    let n = chain.len();
    if convention.reference_arc >= n {
        return Err(Error::Tracking(format!(
            "reference arc {} outside a chain of {n}",
            convention.reference_arc
        )));
    }
    let mut signs = vec![0i8; n];
    let mid = arc_midpoint_value(curve, &chain[convention.reference_arc])?;
    if mid.norm() < TRACKING_FLOOR {
        return Err(Error::Tracking("vanishing √P on the reference arc".into()));
    }
    signs[convention.reference_arc] = real_positive_sign(mid) * convention.sign.signum();
    for j in convention.reference_arc..n - 1 {
        let rho = continuation_sign(curve, &chain[j], &chain[j + 1])?;
        signs[j + 1] = signs[j] * rho as i8;
    }
    for j in (0..convention.reference_arc).rev() {
        let rho = continuation_sign(curve, &chain[j], &chain[j + 1])?;
        signs[j] = signs[j + 1] * rho as i8;
    }
    Ok(signs)
}

/// Branch-adjusted `√P` at the midpoint of arc `path` (exposed for checks).
pub fn sqrt_at_midpoint(
    curve: &HyperellipticCurve,
    path: &ArcPath,
    branch_sign: i8,
) -> Result<Complex64> {
    Ok(arc_midpoint_value(curve, path)? * f64::from(branch_sign.signum()))
}

/// Branch-adjusted `√P` at parameter `u ∈ (-1, 1)` of a single-segment arc.
pub fn sqrt_on_arc(
    curve: &HyperellipticCurve,
    path: &ArcPath,
    branch_sign: i8,
    u: f64,
) -> Result<(Complex64, Complex64)> {
    let pieces = path.pieces(curve)?;
    if pieces.len() != 1 {
        return Err(Error::Path("sqrt_on_arc expects a straight segment".into()));
    }
    let (z, w) = raw_sqrt(curve, &pieces[0], node_at_end(u));
    Ok((z, w * f64::from(branch_sign.signum())))
}

/// Supported branch-point layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// Five real branch points `x_1 < … < x_5`, `x_6 = ∞`.
    RealMCurveGenus2,
    /// `±a, ±b, ±c, ±i` with `0 < a < b < c`, ordered `−c, −b, −a, i, −i, a, b, c`.
    CoverGenus3,
    /// Three real branch points `x_1 < x_2 < x_3`, `x_4 = ∞`.
    Elliptic,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::RealMCurveGenus2 => "real_mcurve_genus2",
            Layout::CoverGenus3 => "cover_genus3",
            Layout::Elliptic => "elliptic",
        }
    }

    pub fn genus(self) -> usize {
        match self {
            Layout::RealMCurveGenus2 => 2,
            Layout::CoverGenus3 => 3,
            Layout::Elliptic => 1,
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cycles and symplectic basis for a curve in one of the supported layouts.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclePlan {
    pub layout: Layout,
    /// Ordered branch points `x_1, …` (finite ones).
    pub ordered_points: Vec<Complex64>,
    /// Finite arcs `ε_1, …, ε_r` in chain order (`ε_j` joins `x_j` to `x_{j+1}`).
    pub arcs: Vec<ArcPath>,
    /// 1-based labels of the arcs through `∞` (never integrated).
    pub arcs_through_infinity: Vec<usize>,
    /// Total number of cycles `δ_1 … δ_{2g+2}`.
    pub cycle_count: usize,
    /// Orientation sign of each finite arc's cycle (calibrated).
    pub orientation_signs: Vec<i8>,
    /// Convention fixing `√P`.
    pub convention: SqrtConvention,
    /// `α_1..α_g, β_1..β_g` as integer combinations of `δ_1..δ_{2g+2}`.
    pub basis_rows: Vec<Vec<i64>>,
}

impl CyclePlan {
    pub fn genus(&self) -> usize {
        self.basis_rows.len() / 2
    }

    /// Basis rows with the arcs through infinity eliminated.
    pub fn reduced_rows(&self) -> Vec<Vec<i64>> {
        self.basis_rows
            .iter()
            .map(|row| reduce_row(row, &self.arcs_through_infinity))
            .collect()
    }

    /// Intersection matrix of the basis computed from `(δ_j · δ_{j+1}) = 1`.
    pub fn intersection_matrix(&self, rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = self.cycle_count;
        let pair = |i: usize, j: usize| -> i64 {
            if (i + 1) % n == j {
                1
            } else if (j + 1) % n == i {
                -1
            } else {
                0
            }
        };
        rows.iter()
            .map(|a| {
                rows.iter()
                    .map(|b| {
                        let mut s = 0;
                        for i in 0..n {
                            for j in 0..n {
                                s += a[i] * b[j] * pair(i, j);
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether both raw and reduced rows have intersection matrix `(0, −I; I, 0)`.
    pub fn is_symplectic(&self) -> bool {
        let g = self.genus();
        let j: Vec<Vec<i64>> = (0..2 * g)
            .map(|r| {
                (0..2 * g)
                    .map(|col| {
                        if r < g && col == r + g {
                            -1
                        } else if r >= g && col + g == r {
                            1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        self.intersection_matrix(&self.basis_rows) == j
            && self.intersection_matrix(&self.reduced_rows()) == j
    }
}

/// Removes arcs through infinity using `Σ δ_even = 0`, `Σ δ_odd = 0`.
fn reduce_row(row: &[i64], infinite: &[usize]) -> Vec<i64> {
    let n = row.len();
    let mut out = row.to_vec();
    for &label in infinite {
        let coeff = out[label - 1];
        if coeff == 0 {
            continue;
        }
        for j in 1..=n {
            if j % 2 == label % 2 {
                out[j - 1] -= coeff;
            }
        }
    }
    out
}

fn unit_row(n: usize, entries: &[(usize, i64)]) -> Vec<i64> {
    let mut r = vec![0; n];
    for &(label, v) in entries {
        r[label - 1] += v;
    }
    r
}

fn real_sorted(curve: &HyperellipticCurve, count: usize, layout: Layout) -> Result<Vec<f64>> {
    let pts = curve.branch_points();
    if pts.len() != count {
        return Err(Error::Layout(format!(
            "{layout} needs {count} branch points, got {}",
            pts.len()
        )));
    }
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if pts.iter().any(|z| z.im.abs() > 1e-12 * scale) {
        return Err(Error::Layout(format!("{layout} needs real branch points")));
    }
    let mut xs: Vec<f64> = pts.iter().map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// Builds arcs, basis rows and orientation signs for `layout` using the
/// shipped calibration table.
pub fn build_cycles(curve: &HyperellipticCurve, layout: Layout) -> Result<CyclePlan> {
    build_cycles_with(curve, layout, CalibrationTable::shipped()?.signs(layout))
}

/// As [`build_cycles`] with explicit orientation signs.
pub fn build_cycles_with(
    curve: &HyperellipticCurve,
    layout: Layout,
    signs: &LayoutSigns,
) -> Result<CyclePlan> {
    let (ordered, infinite, cycle_count, basis_rows): (
        Vec<Complex64>,
        Vec<usize>,
        usize,
        Vec<Vec<i64>>,
    ) = match layout {
        Layout::RealMCurveGenus2 => {
            let xs = real_sorted(curve, 5, layout)?;
            // α₁ = δ₁ − δ₆, α₂ = δ₄, β₁ = δ₁, β₂ = δ₃.
            let rows = vec![
                unit_row(6, &[(1, 1), (6, -1)]),
                unit_row(6, &[(4, 1)]),
                unit_row(6, &[(1, 1)]),
                unit_row(6, &[(3, 1)]),
            ];
            (xs.iter().map(|&x| c(x, 0.0)).collect(), vec![5, 6], 6, rows)
        }
        Layout::Elliptic => {
            let xs = real_sorted(curve, 3, layout)?;
            // α₁ = −δ₄, β₁ = δ₁.
            let rows = vec![unit_row(4, &[(4, -1)]), unit_row(4, &[(1, 1)])];
            (xs.iter().map(|&x| c(x, 0.0)).collect(), vec![3, 4], 4, rows)
        }
        Layout::CoverGenus3 => {
            let (a, b, cc) = cover_roots(curve)?;
            let ordered = vec![
                c(-cc, 0.0),
                c(-b, 0.0),
                c(-a, 0.0),
                c(0.0, 1.0),
                c(0.0, -1.0),
                c(a, 0.0),
                c(b, 0.0),
                c(cc, 0.0),
            ];
            // α̂₂ = γ₁ + γ₃ − γ₄. With straight arcs, γ₁ + γ₃ + γ₄ is α̂₂ − 2β̂₂
            // and shifts the middle diagonal entry of Ẑ by −2.
            let rows = vec![
                unit_row(8, &[(1, 1)]),
                unit_row(8, &[(1, 1), (3, 1), (4, -1)]),
                unit_row(8, &[(7, 1)]),
                unit_row(8, &[(2, -1)]),
                unit_row(8, &[(4, -1)]),
                unit_row(8, &[(6, 1)]),
            ];
            (ordered, vec![8], 8, rows)
        }
    };
    let finite_arcs = cycle_count - infinite.len();
    if signs.signs.len() != finite_arcs {
        return Err(Error::Calibration(format!(
            "{layout}: {} orientation signs for {finite_arcs} arcs",
            signs.signs.len()
        )));
    }
    let arcs: Vec<ArcPath> = (0..finite_arcs)
        .map(|j| ArcPath::segment(ordered[j], ordered[j + 1]))
        .collect();
    for arc in &arcs {
        arc.validate(curve)?;
    }
    Ok(CyclePlan {
        layout,
        ordered_points: ordered,
        arcs,
        arcs_through_infinity: infinite,
        cycle_count,
        orientation_signs: signs.signs.clone(),
        convention: SqrtConvention {
            reference_arc: signs.reference_arc - 1,
            sign: 1,
        },
        basis_rows,
    })
}

/// `(a, b, c)` for a curve with branch points `±a, ±b, ±c, ±i`.
pub fn cover_roots(curve: &HyperellipticCurve) -> Result<(f64, f64, f64)> {
    let pts = curve.branch_points();
    if pts.len() != 8 {
        return Err(Error::Layout(format!(
            "cover_genus3 needs 8 branch points, got {}",
            pts.len()
        )));
    }
    let tol = 1e-12 * pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let has = |z: Complex64| pts.iter().any(|p| (p - z).norm() <= tol);
    if !has(c(0.0, 1.0)) || !has(c(0.0, -1.0)) {
        return Err(Error::Layout(
            "cover_genus3 needs ±i among the branch points".into(),
        ));
    }
    let mut reals: Vec<f64> = pts
        .iter()
        .filter(|p| (*p - c(0.0, 1.0)).norm() > tol && (*p - c(0.0, -1.0)).norm() > tol)
        .map(|p| {
            if p.im.abs() <= tol {
                Ok(p.re)
            } else {
                Err(Error::Layout(format!("non-real branch point {p}")))
            }
        })
        .collect::<Result<_>>()?;
    reals.sort_by(f64::total_cmp);
    let pos: Vec<f64> = reals.iter().copied().filter(|x| *x > 0.0).collect();
    if pos.len() != 3 || !pos.iter().all(|&x| has(c(-x, 0.0))) {
        return Err(Error::Layout(
            "cover_genus3 needs real branch points ±a, ±b, ±c".into(),
        ));
    }
    Ok((pos[0], pos[1], pos[2]))
}

/// The period pair `(A, B)` with `A_jk = ∫_{α_j} ω_k`, `B_jk = ∫_{β_j} ω_k`
/// (up to the common factor 2).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPair {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// Deepest quadrature level used by any arc.
    pub quad_level: usize,
}

impl PeriodPair {
    /// `A B⁻¹` without validation.
    pub fn ratio(&self) -> Result<ComplexMatrix> {
        self.a.mul(&self.b.inverse()?)
    }
}

/// Signed arc integrals (orientation × determination) of every finite arc
/// that the basis uses; `None` for arcs that do not appear.
pub fn signed_arc_integrals(
    curve: &HyperellipticCurve,
    plan: &CyclePlan,
    quad: &QuadConfig,
) -> Result<(Vec<Option<Vec<Complex64>>>, usize)> {
    let branch = sqrt_determination(curve, &plan.arcs, plan.convention)?;
    let reduced = plan.reduced_rows();
    let mut level = 0;
    let mut out = Vec::with_capacity(plan.arcs.len());
    for (j, arc) in plan.arcs.iter().enumerate() {
        if reduced.iter().all(|row| row[j] == 0) {
            out.push(None);
            continue;
        }
        let integral = integrate_arc_all(curve, arc, branch[j] * plan.orientation_signs[j], quad)?;
        level = level.max(integral.level);
        out.push(Some(integral.values));
    }
    Ok((out, level))
}

/// Assembles `A` and `B` from signed arc integrals.
pub fn assemble(
    plan: &CyclePlan,
    arcs: &[Option<Vec<Complex64>>],
    quad_level: usize,
) -> Result<PeriodPair> {
    let g = plan.genus();
    let reduced = plan.reduced_rows();
    let entry = |row: &[i64], k: usize| -> Result<Complex64> {
        let mut s = c(0.0, 0.0);
        for (j, &coeff) in row.iter().enumerate().take(arcs.len()) {
            if coeff != 0 {
                let vals = arcs[j].as_ref().ok_or_else(|| {
                    Error::Layout(format!("arc {} used but not integrated", j + 1))
                })?;
                s += vals[k] * coeff as f64;
            }
        }
        Ok(s)
    };
    let mut a = ComplexMatrix::zeros(g, g);
    let mut b = ComplexMatrix::zeros(g, g);
    for j in 0..g {
        for k in 0..g {
            a.set(j, k, entry(&reduced[j], k)?);
            b.set(j, k, entry(&reduced[g + j], k)?);
        }
    }
    Ok(PeriodPair { a, b, quad_level })
}

/// `A` and `B` for `curve` in the basis of `plan`.
pub fn period_matrices(
    curve: &HyperellipticCurve,
    plan: &CyclePlan,
    quad: &QuadConfig,
) -> Result<PeriodPair> {
    if plan.genus() != curve.genus() {
        return Err(Error::Layout(format!(
            "genus {} plan for a genus {} curve",
            plan.genus(),
            curve.genus()
        )));
    }
    let (arcs, level) = signed_arc_integrals(curve, plan, quad)?;
    assemble(plan, &arcs, level)
}

/// `Z = A B⁻¹`, validated in the Siegel space at the quadrature tolerance.
pub fn period_matrix(
    curve: &HyperellipticCurve,
    plan: &CyclePlan,
    quad: &QuadConfig,
) -> Result<RiemannMatrix> {
    let z = period_matrices(curve, plan, quad)?.ratio()?;
    let tol = (100.0 * quad.tol).max(1e-10) * z.max_abs().max(1.0);
    RiemannMatrix::new(z, tol)
}
