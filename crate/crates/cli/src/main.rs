//! `w9`: period matrices, theta values and the geodesic trace from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod expr;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use commands::{Basis, ClassifyTarget, CliError, CurveSpec, VerifyTarget};
use config::{Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "w9",
    version,
    about = "Period matrices and theta functions along the W9 family"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Tail tolerance of theta and series sums.
    #[arg(long, global = true)]
    series_tol: Option<f64>,
    /// Final bracket width of the geodesic root finder.
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    /// Threshold on |θ[111;101]| for the membership check.
    #[arg(long, global = true)]
    membership_tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` settings using the flag names; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Period matrix of a curve.
    #[command(group(ArgGroup::new("curve").required(true).args(["roots", "s", "u", "lambda"])))]
    Periods {
        /// Comma-separated branch points (expressions, `i` allowed).
        #[arg(long, allow_hyphen_values = true)]
        roots: Option<String>,
        /// Family parameter in (0, √3/3).
        #[arg(long = "s", allow_hyphen_values = true)]
        s: Option<String>,
        /// Parameter of y² = x(x−1)(x³ + ux² − 8u/3·x + 16u/9).
        #[arg(long = "u", allow_hyphen_values = true)]
        u: Option<String>,
        /// Side parameter of the order-4 L-shaped surface (closed form).
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, value_enum)]
        basis: Basis,
    },
    /// Theta constant θ[m;n](0, Z).
    Theta {
        /// Characteristic as `m1m2..;n1n2..`.
        #[arg(long = "char")]
        characteristic: String,
        /// Matrix: JSON file, inline JSON, or `[[a,b],[c,d]]` with expressions.
        #[arg(long)]
        matrix: String,
        /// Expected genus.
        #[arg(long = "g")]
        g: Option<usize>,
    },
    /// Solve the geodesic equation along a range of t.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        steps: usize,
    },
    /// End-to-end check of the family at one s or on a grid.
    #[command(group(ArgGroup::new("target").required(true).args(["s", "grid"])))]
    Verify {
        #[arg(long = "s", allow_hyphen_values = true)]
        s: Option<String>,
        /// Number of s values at cell midpoints of (0.05, 0.5).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Automorphism groups of a real M-curve.
    #[command(group(ArgGroup::new("target").required(true).args(["abc", "s"])))]
    Classify {
        /// Normalized branch points `a,b,c` with 0 < a < b < c < 1.
        #[arg(long, allow_hyphen_values = true)]
        abc: Option<String>,
        #[arg(long = "s", allow_hyphen_values = true)]
        s: Option<String>,
        /// Tolerance on the coincidence conditions.
        #[arg(long, default_value_t = w9_core::w9::CONDITION_TOL)]
        cond_tol: f64,
    },
}

fn run_config(global: &GlobalArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &global.config {
        cfg.apply_file(path)?;
    }
    let tols = [
        ("quad-tol", global.quad_tol),
        ("series-tol", global.series_tol),
        ("root-tol", global.root_tol),
        ("membership-tol", global.membership_tol),
    ];
    for (key, value) in tols {
        if let Some(v) = value {
            cfg.set(key, &v.to_string())?;
        }
    }
    if let Some(f) = global.format {
        cfg.format = f;
    }
    if let Some(out) = &global.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn dispatch(cfg: &RunConfig, command: Command) -> commands::CmdResult {
    match command {
        Command::Periods {
            roots,
            s,
            u,
            lambda,
            basis,
        } => {
            let spec = match (roots, s, u, lambda) {
                (Some(r), None, None, None) => CurveSpec::Roots(r),
                (None, Some(s), None, None) => CurveSpec::S(s),
                (None, None, Some(u), None) => CurveSpec::U(u),
                (None, None, None, Some(l)) => CurveSpec::Lambda(l),
                _ => {
                    return Err(CliError::Usage(anyhow::anyhow!(
                        "give exactly one of --roots, --s, --u, --lambda"
                    )))
                }
            };
            commands::periods(cfg, spec, basis)
        }
        Command::Theta {
            characteristic,
            matrix,
            g,
        } => commands::theta(cfg, &characteristic, &matrix, g),
        Command::Trace { from, to, steps } => commands::trace(cfg, &from, &to, steps),
        Command::Verify { s, grid } => {
            let target = match (s, grid) {
                (Some(s), None) => VerifyTarget::S(s),
                (None, Some(n)) => VerifyTarget::Grid(n),
                _ => {
                    return Err(CliError::Usage(anyhow::anyhow!(
                        "give exactly one of --s, --grid"
                    )))
                }
            };
            commands::verify(cfg, target)
        }
        Command::Classify { abc, s, cond_tol } => {
            let target = match (abc, s) {
                (Some(abc), None) => ClassifyTarget::Abc(abc),
                (None, Some(s)) => ClassifyTarget::S(s),
                _ => {
                    return Err(CliError::Usage(anyhow::anyhow!(
                        "give exactly one of --abc, --s"
                    )))
                }
            };
            commands::classify(cfg, target, cond_tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = match run_config(&cli.global) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let output = match dispatch(&cfg, cli.command) {
        Ok(output) => output,
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| format!("writing {}: {e}", path.display())),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if output.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("one or more checks failed");
        ExitCode::from(2)
    }
}
