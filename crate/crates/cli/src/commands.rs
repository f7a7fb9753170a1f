//! The subcommands. Each returns its rendered output and whether every check
//! it ran passed.

use std::fmt::Write as _;

use anyhow::anyhow;
use num_complex::Complex64;
use serde::Serialize;
use w9_core::calibration::{CalibrationTable, CALIBRATION_SHA256};
use w9_core::geodesic::{self, SolverConfig};
use w9_core::periods::{self, HyperellipticCurve, Layout};
use w9_core::quadrature::QuadConfig;
use w9_core::siegel::{ComplexMatrix, RiemannMatrix};
use w9_core::theta::{self, Characteristic, TruncationPolicy};
use w9_core::w9::{self, W9Param};

use crate::config::{Format, RunConfig};
use crate::expr;
use crate::io::{complex_list, csv_field, matrix_csv_rows, matrix_json, num, JsonComplex};

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<w9_core::Error> for CliError {
    fn from(e: w9_core::Error) -> Self {
        match e {
            w9_core::Error::Parameter(_) | w9_core::Error::Layout(_) => CliError::Usage(e.into()),
            _ => CliError::Numerical(e.into()),
        }
    }
}

fn usage(e: anyhow::Error) -> CliError {
    CliError::Usage(e)
}

pub type CmdResult = std::result::Result<Output, CliError>;

pub struct Output {
    pub text: String,
    pub ok: bool,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Metadata {
    tool_version: &'static str,
    quad_tol: f64,
    series_tol: f64,
    root_tol: f64,
    membership_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quad_level: Option<usize>,
    calibration_version: u32,
    calibration_sha256: &'static str,
}

fn metadata(cfg: &RunConfig, quad_level: Option<usize>) -> std::result::Result<Metadata, CliError> {
    let table = CalibrationTable::shipped()?;
    Ok(Metadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        quad_tol: cfg.quad_tol,
        series_tol: cfg.series_tol,
        root_tol: cfg.root_tol,
        membership_tol: cfg.membership_tol,
        quad_level,
        calibration_version: table.version,
        calibration_sha256: CALIBRATION_SHA256,
    })
}

fn solver(cfg: &RunConfig) -> SolverConfig {
    SolverConfig {
        series_tol: cfg.series_tol,
        root_tol: cfg.root_tol,
        ..SolverConfig::default()
    }
}

/// Tail tolerance for theta sums: at least as tight as the membership test needs.
fn theta_policy(cfg: &RunConfig) -> TruncationPolicy {
    TruncationPolicy::with_tail_tol(cfg.series_tol.min(cfg.membership_tol * 1e-2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Basis {
    #[value(name = "genus2_w9")]
    Genus2W9,
    #[value(name = "cover")]
    Cover,
    #[value(name = "elliptic")]
    Elliptic,
}

impl Basis {
    fn name(self) -> &'static str {
        match self {
            Basis::Genus2W9 => "genus2_w9",
            Basis::Cover => "cover",
            Basis::Elliptic => "elliptic",
        }
    }
}

pub enum CurveSpec {
    Roots(String),
    S(String),
    U(String),
    Lambda(String),
}

#[derive(Serialize)]
struct PeriodsOut {
    command: &'static str,
    basis: &'static str,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    branch_points: Option<Vec<JsonComplex>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zhat: Option<Vec<Vec<JsonComplex>>>,
    z: Vec<Vec<JsonComplex>>,
    metadata: Metadata,
}

/// Shifts `{0, 1, r₁, r₂, r₃}` by `−1` into the `{−1, 0, …}` form the cover needs.
fn shifted_pu(u: Complex64) -> std::result::Result<HyperellipticCurve, CliError> {
    let base = w9::curve_pu(u)?;
    let shifted: Vec<Complex64> = base.branch_points().iter().map(|z| z - 1.0).collect();
    Ok(HyperellipticCurve::new(shifted)?)
}

fn base_curve(
    spec: &CurveSpec,
    basis: Basis,
) -> std::result::Result<(HyperellipticCurve, String), CliError> {
    match spec {
        CurveSpec::Roots(list) => {
            let roots = expr::eval_list(list).map_err(usage)?;
            let allowed: &[usize] = match basis {
                Basis::Elliptic => &[3],
                Basis::Genus2W9 => &[5],
                Basis::Cover => &[5, 8],
            };
            if !allowed.contains(&roots.len()) {
                return Err(usage(anyhow!(
                    "basis {} needs {} roots, got {}",
                    basis.name(),
                    allowed
                        .iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(" or "),
                    roots.len()
                )));
            }
            Ok((HyperellipticCurve::new(roots)?, format!("roots {list}")))
        }
        CurveSpec::S(text) => {
            let s = expr::eval_real(text).map_err(usage)?;
            Ok((w9::curve_qs(s)?, format!("s = {s}")))
        }
        CurveSpec::U(text) => {
            let u = expr::eval(text).map_err(usage)?;
            let curve = if basis == Basis::Cover {
                shifted_pu(u)?
            } else {
                w9::curve_pu(u)?
            };
            Ok((curve, format!("u = {u}")))
        }
        CurveSpec::Lambda(_) => unreachable!("handled by the caller"),
    }
}

fn quadrature_matrix(
    curve: &HyperellipticCurve,
    layout: Layout,
    quad: &QuadConfig,
) -> std::result::Result<(RiemannMatrix, usize), CliError> {
    let plan = periods::build_cycles(curve, layout)?;
    let pair = periods::period_matrices(curve, &plan, quad)?;
    let z = pair.ratio()?;
    let tol = (100.0 * quad.tol).max(1e-10) * z.max_abs().max(1.0);
    Ok((RiemannMatrix::new(z, tol)?, pair.quad_level))
}

pub fn periods(cfg: &RunConfig, spec: CurveSpec, basis: Basis) -> CmdResult {
    let quad = QuadConfig::with_tol(cfg.quad_tol);
    let out = if let CurveSpec::Lambda(text) = &spec {
        if basis != Basis::Genus2W9 {
            return Err(usage(anyhow!(
                "--lambda gives a genus-2 matrix; use --basis genus2_w9"
            )));
        }
        let lambda = expr::eval_real(text).map_err(usage)?;
        let z = w9::silhol_order4_period(lambda)?;
        PeriodsOut {
            command: "periods",
            basis: basis.name(),
            source: format!("lambda = {lambda} (closed form)"),
            branch_points: None,
            zhat: None,
            z: matrix_json(z.matrix()),
            metadata: metadata(cfg, None)?,
        }
    } else {
        if basis == Basis::Elliptic && !matches!(spec, CurveSpec::Roots(_)) {
            return Err(usage(anyhow!(
                "the elliptic basis takes --roots with three roots"
            )));
        }
        let (base, source) = base_curve(&spec, basis)?;
        match basis {
            Basis::Cover => {
                let cover = if base.genus() == 3 {
                    base
                } else {
                    w9::double_cover(&base)?
                };
                let (zhat, level) = quadrature_matrix(&cover, Layout::CoverGenus3, &quad)?;
                let z = w9::base_from_cover(&zhat)?;
                PeriodsOut {
                    command: "periods",
                    basis: basis.name(),
                    source,
                    branch_points: Some(complex_list(cover.branch_points())),
                    zhat: Some(matrix_json(zhat.matrix())),
                    z: matrix_json(z.matrix()),
                    metadata: metadata(cfg, Some(level))?,
                }
            }
            Basis::Genus2W9 | Basis::Elliptic => {
                let layout = if basis == Basis::Elliptic {
                    Layout::Elliptic
                } else {
                    Layout::RealMCurveGenus2
                };
                let (z, level) = quadrature_matrix(&base, layout, &quad)?;
                PeriodsOut {
                    command: "periods",
                    basis: basis.name(),
                    source,
                    branch_points: Some(complex_list(base.branch_points())),
                    zhat: None,
                    z: matrix_json(z.matrix()),
                    metadata: metadata(cfg, Some(level))?,
                }
            }
        }
    };
    let text = match cfg.format {
        Format::Json => json(&out),
        Format::Csv => {
            let mut s = String::from("matrix,row,col,re,im\n");
            let to_matrix = |rows: &Vec<Vec<JsonComplex>>| {
                let rows: Vec<Vec<Complex64>> = rows
                    .iter()
                    .map(|r| r.iter().map(|z| Complex64::new(z.re, z.im)).collect())
                    .collect();
                ComplexMatrix::from_rows(&rows).expect("square output")
            };
            if let Some(zhat) = &out.zhat {
                matrix_csv_rows("zhat", &to_matrix(zhat), &mut s);
            }
            matrix_csv_rows("z", &to_matrix(&out.z), &mut s);
            s
        }
    };
    Ok(Output { text, ok: true })
}

#[derive(Serialize)]
struct ThetaOut {
    command: &'static str,
    characteristic: String,
    genus: usize,
    parity: String,
    value: JsonComplex,
    abs: f64,
    radius: usize,
    tail_bound: f64,
    metadata: Metadata,
}

pub fn theta(
    cfg: &RunConfig,
    char_text: &str,
    matrix_arg: &str,
    genus: Option<usize>,
) -> CmdResult {
    let ch: Characteristic = char_text
        .parse()
        .map_err(|e: w9_core::Error| usage(anyhow!("--char: {e}")))?;
    if let Some(g) = genus {
        if g != ch.genus() {
            return Err(usage(anyhow!(
                "--g {g} but the characteristic has genus {}",
                ch.genus()
            )));
        }
    }
    let m = crate::io::read_matrix_arg(matrix_arg, Some(ch.genus()))
        .map_err(|e| usage(e.context("--matrix")))?;
    if m.rows() != ch.genus() {
        return Err(usage(anyhow!(
            "--matrix is {}x{} but the characteristic has genus {}",
            m.rows(),
            m.cols(),
            ch.genus()
        )));
    }
    let zm = RiemannMatrix::from_matrix(m).map_err(|e| usage(anyhow!("--matrix: {e}")))?;
    let zero = vec![Complex64::new(0.0, 0.0); zm.genus()];
    let sum = theta::theta_char_sum(&ch, &zero, &zm, &theta_policy(cfg))?;
    let out = ThetaOut {
        command: "theta",
        characteristic: ch.to_string(),
        genus: zm.genus(),
        parity: ch.parity().to_string(),
        value: sum.value.into(),
        abs: sum.value.norm(),
        radius: sum.radius,
        tail_bound: sum.tail_bound,
        metadata: metadata(cfg, None)?,
    };
    let text = match cfg.format {
        Format::Json => json(&out),
        Format::Csv => format!(
            "characteristic,parity,re,im,abs,radius,tail_bound\n{},{},{},{},{},{},{}\n",
            csv_field(&out.characteristic),
            out.parity,
            num(out.value.re),
            num(out.value.im),
            num(out.abs),
            out.radius,
            num(out.tail_bound)
        ),
    };
    Ok(Output { text, ok: true })
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<Vec<JsonComplex>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct TraceOut {
    command: &'static str,
    points: Vec<TraceRow>,
    failures: usize,
    metadata: Metadata,
}

pub const TRACE_CSV_HEADER: &str = "t,y,re_z11,im_z11,re_z12,im_z12,re_z22,im_z22,residual,flags";

pub fn trace(cfg: &RunConfig, from: &str, to: &str, steps: usize) -> CmdResult {
    let t0 = expr::eval_real(from).map_err(|e| usage(e.context("--from")))?;
    let t1 = expr::eval_real(to).map_err(|e| usage(e.context("--to")))?;
    let points = geodesic::trace(t0, t1, steps, &solver(cfg)).map_err(|e| usage(e.into()))?;
    let failures = points.iter().filter(|p| p.result.is_err()).count();
    let text = match cfg.format {
        Format::Json => {
            let rows = points
                .iter()
                .map(|p| match &p.result {
                    Ok(pt) => TraceRow {
                        t: p.t,
                        y: Some(pt.y),
                        z: Some(matrix_json(pt.z.matrix())),
                        residual: Some(pt.residual),
                        flags: pt.flags.iter().map(|f| f.to_string()).collect(),
                        error: None,
                    },
                    Err(e) => TraceRow {
                        t: p.t,
                        y: None,
                        z: None,
                        residual: None,
                        flags: vec!["error".into()],
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            json(&TraceOut {
                command: "trace",
                points: rows,
                failures,
                metadata: metadata(cfg, None)?,
            })
        }
        Format::Csv => {
            let mut s = format!("{TRACE_CSV_HEADER}\n");
            for p in &points {
                match &p.result {
                    Ok(pt) => {
                        let (a, b, d) = (pt.z.get(0, 0), pt.z.get(0, 1), pt.z.get(1, 1));
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},{},{},{},{}",
                            num(p.t),
                            num(pt.y),
                            num(a.re),
                            num(a.im),
                            num(b.re),
                            num(b.im),
                            num(d.re),
                            num(d.im),
                            num(pt.residual),
                            csv_field(&pt.flags_string())
                        );
                    }
                    Err(e) => {
                        let _ = writeln!(
                            s,
                            "{},,,,,,,,,{}",
                            num(p.t),
                            csv_field(&format!("error: {e}"))
                        );
                    }
                }
            }
            s
        }
    };
    Ok(Output {
        text,
        ok: failures == 0,
    })
}

/// Threshold for the residual checks of `verify`.
const VERIFY_TOL: f64 = 1e-6;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    residual: f64,
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyCase {
    s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyOut {
    command: &'static str,
    cases: Vec<VerifyCase>,
    pass: bool,
    metadata: Metadata,
}

fn check(name: &'static str, residual: f64, threshold: f64) -> Check {
    Check {
        name,
        residual,
        threshold,
        pass: residual < threshold,
    }
}

fn verify_one(cfg: &RunConfig, s: f64) -> VerifyCase {
    let mut case = VerifyCase {
        s,
        t: None,
        y: None,
        checks: Vec::new(),
        error: None,
        pass: false,
    };
    let result = (|| -> w9_core::Result<()> {
        let quad = QuadConfig::with_tol(cfg.quad_tol);
        let base = w9::curve_qs(s)?;
        let cover = w9::double_cover(&base)?;
        let plan = periods::build_cycles(&cover, Layout::CoverGenus3)?;
        let zhat = periods::period_matrix(&cover, &plan, &quad)?;

        let shape = w9::cover_shape_extract(&zhat, f64::INFINITY)?;
        case.checks.push(check(
            "cover_shape",
            shape.matrix().max_abs_diff(zhat.matrix()),
            VERIFY_TOL,
        ));

        let policy = theta_policy(cfg);
        let membership =
            theta::theta_null(&w9::membership_characteristic(), &zhat, &policy)?.norm();
        case.checks
            .push(check("theta_membership", membership, cfg.membership_tol));

        let (t, y) = geodesic::extract_ty_from_cover(&zhat, VERIFY_TOL)?;
        case.t = Some(t);
        case.y = Some(y);
        let series =
            geodesic::main_series(t, y, &TruncationPolicy::with_tail_tol(cfg.series_tol))?.norm();
        case.checks.push(check("main_series", series, VERIFY_TOL));

        let from_cover = w9::base_from_cover(&zhat)?;
        let base_plan = periods::build_cycles(&base, Layout::RealMCurveGenus2)?;
        let direct = periods::period_matrix(&base, &base_plan, &quad)?;
        case.checks.push(check(
            "base_vs_direct",
            from_cover.matrix().max_abs_diff(direct.matrix()),
            VERIFY_TOL,
        ));
        Ok(())
    })();
    if let Err(e) = result {
        case.error = Some(e.to_string());
    }
    case.pass = case.error.is_none() && case.checks.iter().all(|c| c.pass);
    case
}

pub enum VerifyTarget {
    S(String),
    Grid(usize),
}

/// `n` values of `s` at cell midpoints of `(0.05, 0.5)`.
pub fn verify_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.05 + 0.45 * (i as f64 + 0.5) / n as f64)
        .collect()
}

pub fn verify(cfg: &RunConfig, target: VerifyTarget) -> CmdResult {
    CalibrationTable::shipped()
        .map_err(|e| CliError::Numerical(anyhow!("refusing to verify: {e}")))?;
    let values = match target {
        VerifyTarget::S(text) => {
            let s = expr::eval_real(&text).map_err(usage)?;
            W9Param::new(s)?;
            vec![s]
        }
        VerifyTarget::Grid(0) => return Err(usage(anyhow!("--grid needs at least one point"))),
        VerifyTarget::Grid(n) => verify_grid(n),
    };
    let cases: Vec<VerifyCase> = values.iter().map(|&s| verify_one(cfg, s)).collect();
    let pass = cases.iter().all(|c| c.pass);
    let text = match cfg.format {
        Format::Json => json(&VerifyOut {
            command: "verify",
            cases,
            pass,
            metadata: metadata(cfg, None)?,
        }),
        Format::Csv => {
            let mut s = String::from("s,t,y,check,residual,threshold,pass\n");
            let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
            for case in &cases {
                for c in &case.checks {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        num(case.s),
                        opt(case.t),
                        opt(case.y),
                        c.name,
                        num(c.residual),
                        num(c.threshold),
                        c.pass
                    );
                }
                if let Some(e) = &case.error {
                    let _ = writeln!(
                        s,
                        "{},{},{},error,,,false,{}",
                        num(case.s),
                        opt(case.t),
                        opt(case.y),
                        csv_field(e)
                    );
                }
            }
            s
        }
    };
    Ok(Output { text, ok: pass })
}

#[derive(Serialize)]
struct ConditionOut {
    id: &'static str,
    equation: &'static str,
    residual: f64,
    holds: bool,
}

impl From<&w9::ConditionResidual> for ConditionOut {
    fn from(c: &w9::ConditionResidual) -> Self {
        Self {
            id: c.id,
            equation: c.equation,
            residual: c.residual,
            holds: c.holds,
        }
    }
}

#[derive(Serialize)]
struct ClassifyOut {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    normalized: [f64; 3],
    real_group: String,
    complex_group: String,
    case: &'static str,
    conditions: Vec<ConditionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    involution_conditions: Option<Vec<ConditionOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    satisfied: Option<Vec<&'static str>>,
}

pub enum ClassifyTarget {
    Abc(String),
    S(String),
}

pub fn classify(cfg: &RunConfig, target: ClassifyTarget, tol: f64) -> CmdResult {
    if !(tol > 0.0) {
        return Err(usage(anyhow!("--cond-tol must be positive")));
    }
    let (s, (a, b, c), report, involutions) = match target {
        ClassifyTarget::Abc(text) => {
            let v: Vec<f64> = text
                .split(',')
                .map(|p| expr::eval_real(p.trim()))
                .collect::<anyhow::Result<_>>()
                .map_err(|e| usage(e.context("--abc")))?;
            if v.len() != 3 {
                return Err(usage(anyhow!("--abc needs three values, got {}", v.len())));
            }
            let report = w9::cirre_classify(v[0], v[1], v[2], tol)?;
            (None, (v[0], v[1], v[2]), report, None)
        }
        ClassifyTarget::S(text) => {
            let s = expr::eval_real(&text).map_err(usage)?;
            let p = W9Param::new(s)?;
            let conds = w9::w9_involution_conditions(s, tol)?;
            let (abc, report) = w9::classify_real_mcurve(&p.roots(), tol)?;
            (Some(s), abc, report, Some(conds))
        }
    };
    let out = ClassifyOut {
        command: "classify",
        s,
        normalized: [a, b, c],
        real_group: report.real_group.to_string(),
        complex_group: report.complex_group.to_string(),
        case: report.case,
        conditions: report.conditions.iter().map(ConditionOut::from).collect(),
        satisfied: involutions
            .as_ref()
            .map(|v| v.iter().filter(|c| c.holds).map(|c| c.id).collect()),
        involution_conditions: involutions.map(|v| v.iter().map(ConditionOut::from).collect()),
    };
    let text = match cfg.format {
        Format::Json => json(&out),
        Format::Csv => {
            let mut s = String::from("item,value,residual,holds\n");
            let _ = writeln!(s, "real_group,{},,", out.real_group);
            let _ = writeln!(s, "complex_group,{},,", out.complex_group);
            let _ = writeln!(s, "case,{},,", out.case);
            for c in out
                .conditions
                .iter()
                .chain(out.involution_conditions.iter().flatten())
            {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    c.id,
                    csv_field(c.equation),
                    num(c.residual),
                    c.holds
                );
            }
            s
        }
    };
    Ok(Output { text, ok: true })
}
