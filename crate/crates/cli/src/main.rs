//! Command-line surface for the asymptotic evaluators: regime
//! classification, pointwise and grid evaluation of y(x, t), modulation
//! trace export, the Hastings-McLeod table, and the verification suite.

mod records;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pi2_core::algebraic::{classify, y_algebraic};
use pi2_core::critical::{
    solve_hastings_mcleod, xi_from_x_pii, xi_from_x_soliton, y_edge_pii, y_edge_soliton,
    HMProfile, SolitonEdgeParams,
};
use pi2_core::elliptic::y_elliptic;
use pi2_core::modulation::{continuation_sweep, residuals};
use pi2_core::types::{RegimeLabel, ScalePoint, DEFAULT_EDGE_WIDTH};
use pi2_core::verify::{run_all, Tolerances};
use rayon::prelude::*;
use records::{Field, Table};
use std::io::Write;
use std::sync::OnceLock;

#[derive(Parser)]
#[command(
    name = "pi2",
    version,
    about = "Asymptotic evaluation of the pole-free Painleve-I2 solution y(x, t)",
    long_about = "Evaluates the pole-free solution of the second Painleve-I hierarchy equation \
                  in its four asymptotic regimes (algebraic, elliptic, Painleve-II edge, soliton \
                  edge), exports modulation traces and the Hastings-McLeod table, and runs the \
                  internal verification suite."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Range of the self-similar coordinate s as a:b:n
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    s_range: Option<String>,

    /// Range of t as a:b:n (t = 0 points produce per-record errors)
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    t_range: Option<String>,

    /// Range of x as a:b:n (mutually exclusive with --s-range)
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    x_range: Option<String>,

    /// Half-width in s of the critical-edge bands
    #[arg(long, default_value_t = DEFAULT_EDGE_WIDTH)]
    edge_width: f64,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Output path (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<std::path::PathBuf>,

    /// Reserved for future randomized verification; accepted and ignored
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify grid points into asymptotic regimes
    Classify {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate y(x, t) on a grid, dispatching by regime
    Eval {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Same as eval, computed in parallel (identical output bytes)
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export a continuation trace of the modulation system over s
    Modulation {
        /// Range of s as a:b:n (defaults to the full admissible interval)
        #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
        s_range: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve and export the Hastings-McLeod profile q(xi)
    HmTable {
        /// Grid as a:b:n (defaults to -12:10:400)
        #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
        x_range: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification suite and emit a JSON report
    Verify {
        /// Run a single named check
        #[arg(long, value_name = "CHECK")]
        only: Option<String>,
        /// Override a check tolerance as NAME=VALUE (repeatable)
        #[arg(long, value_name = "NAME=VALUE")]
        tol: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Parses "a:b:n" into n >= 1 evenly spaced values over [a, b].
fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("range must be A:B:N, got '{text}'");
    }
    let a: f64 = parts[0].parse().context("bad range start")?;
    let b: f64 = parts[1].parse().context("bad range end")?;
    let n: usize = parts[2].parse().context("bad range count")?;
    if n == 0 {
        bail!("range count must be at least 1");
    }
    if !(a.is_finite() && b.is_finite()) {
        bail!("range endpoints must be finite");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

/// The evaluation grid: (x, t) pairs in t-major order. Either x is given
/// directly or derived per-t from s via x = s |t|^{3/2}.
fn build_grid(grid: &GridArgs) -> Result<Vec<(f64, f64)>> {
    let ts = parse_range(
        grid.t_range
            .as_deref()
            .context("--t-range is required for grid commands")?,
    )?;
    let points = match (&grid.s_range, &grid.x_range) {
        (Some(_), Some(_)) => bail!("--s-range and --x-range are mutually exclusive"),
        (Some(s), None) => {
            let ss = parse_range(s)?;
            ts.iter()
                .flat_map(|&t| {
                    ss.iter()
                        .map(move |&s| (s * t.abs().powf(1.5), t))
                        .collect::<Vec<_>>()
                })
                .collect()
        }
        (None, Some(x)) => {
            let xs = parse_range(x)?;
            ts.iter()
                .flat_map(|&t| xs.iter().map(move |&x| (x, t)).collect::<Vec<_>>())
                .collect()
        }
        (None, None) => bail!("one of --s-range or --x-range is required"),
    };
    Ok(points)
}

const CLASSIFY_COLUMNS: &[&str] = &["x", "t", "s", "regime", "error"];

fn classify_row(x: f64, t: f64, edge_width: f64) -> Vec<Field> {
    match ScalePoint::from_xt(x, t).and_then(|p| classify(&p, edge_width).map(|r| (p, r))) {
        Ok((p, regime)) => vec![
            Field::Num(x),
            Field::Num(t),
            Field::Num(p.s),
            Field::Text(regime.as_str().to_string()),
            Field::Empty,
        ],
        Err(e) => vec![
            Field::Num(x),
            Field::Num(t),
            Field::Empty,
            Field::Empty,
            Field::Text(e.to_string()),
        ],
    }
}

const EVAL_COLUMNS: &[&str] = &[
    "x",
    "t",
    "s",
    "regime",
    "leading",
    "correction",
    "value",
    "error_order",
    "error",
];

fn hm_profile() -> Result<&'static HMProfile, pi2_core::Error> {
    static HM: OnceLock<std::result::Result<HMProfile, pi2_core::Error>> = OnceLock::new();
    HM.get_or_init(|| solve_hastings_mcleod(-12.0, 10.0, 400))
        .as_ref()
        .map_err(Clone::clone)
}

fn eval_row(x: f64, t: f64, edge_width: f64) -> Vec<Field> {
    let evaluated = ScalePoint::from_xt(x, t)
        .and_then(|p| classify(&p, edge_width).map(|r| (p, r)))
        .and_then(|(p, regime)| {
            let exp = match regime {
                RegimeLabel::AlgebraicNegT | RegimeLabel::AlgebraicPosT => y_algebraic(&p)?,
                RegimeLabel::Elliptic => y_elliptic(&p)?,
                RegimeLabel::EdgePII => {
                    let xi = xi_from_x_pii(x, t);
                    y_edge_pii(xi, t, hm_profile()?)?
                }
                RegimeLabel::EdgeSoliton => {
                    let xi = xi_from_x_soliton(x, t);
                    y_edge_soliton(xi, t, &SolitonEdgeParams::default())?.expansion
                }
            };
            Ok((p, exp))
        });
    match evaluated {
        Ok((p, exp)) => vec![
            Field::Num(x),
            Field::Num(t),
            Field::Num(p.s),
            Field::Text(exp.regime.as_str().to_string()),
            Field::Num(exp.leading),
            Field::Num(exp.correction),
            Field::Num(exp.value),
            Field::Text(exp.error_order.as_str().to_string()),
            Field::Empty,
        ],
        Err(e) => {
            let s = if t != 0.0 {
                Field::Num(x * t.abs().powf(-1.5))
            } else {
                Field::Empty
            };
            vec![
                Field::Num(x),
                Field::Num(t),
                s,
                Field::Empty,
                Field::Empty,
                Field::Empty,
                Field::Empty,
                Field::Empty,
                Field::Text(e.to_string()),
            ]
        }
    }
}

fn echo_grid(grid: &GridArgs, subcommand: &str) -> Vec<(&'static str, String)> {
    let quote = |o: &Option<String>| match o {
        Some(v) => format!("\"{}\"", records::json_escape(v)),
        None => "null".to_string(),
    };
    vec![
        ("subcommand", format!("\"{subcommand}\"")),
        ("s_range", quote(&grid.s_range)),
        ("t_range", quote(&grid.t_range)),
        ("x_range", quote(&grid.x_range)),
        ("edge_width", records::fmt_f64(grid.edge_width)),
    ]
}

fn emit(table: &Table, output: &OutputArgs, config_echo: &[(&str, String)]) -> Result<()> {
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(config_echo),
    };
    match &output.out {
        Some(path) => std::fs::write(path, text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify { grid, output } => {
            let points = build_grid(&grid)?;
            let rows = points
                .iter()
                .map(|&(x, t)| classify_row(x, t, grid.edge_width))
                .collect();
            let table = Table {
                columns: CLASSIFY_COLUMNS,
                rows,
            };
            emit(&table, &output, &echo_grid(&grid, "classify"))
        }
        Command::Eval { grid, output } => {
            let points = build_grid(&grid)?;
            let rows = points
                .iter()
                .map(|&(x, t)| eval_row(x, t, grid.edge_width))
                .collect();
            let table = Table {
                columns: EVAL_COLUMNS,
                rows,
            };
            emit(&table, &output, &echo_grid(&grid, "eval"))
        }
        Command::Sweep { grid, output } => {
            let points = build_grid(&grid)?;
            // evaluated concurrently; indexed collection restores grid order
            // before emission, so the bytes match `eval` exactly
            let rows: Vec<Vec<Field>> = points
                .par_iter()
                .map(|&(x, t)| eval_row(x, t, grid.edge_width))
                .collect();
            let table = Table {
                columns: EVAL_COLUMNS,
                rows,
            };
            emit(&table, &output, &echo_grid(&grid, "sweep"))
        }
        Command::Modulation { s_range, output } => {
            let spec = s_range
                .clone()
                .unwrap_or_else(|| format!("{}:{}:50", pi2_core::S_LEFT, pi2_core::S_RIGHT));
            let parts = parse_range(&spec)?;
            let (s_from, s_to, n) = (parts[0], *parts.last().unwrap(), parts.len());
            let trace = continuation_sweep(s_from, s_to, n)?;
            let mut rows = Vec::with_capacity(trace.points.len());
            for p in &trace.points {
                let (r1, r2, r3) = residuals(p)?;
                rows.push(vec![
                    Field::Num(p.s),
                    Field::Num(p.beta3),
                    Field::Num(p.alpha()),
                    Field::Num(p.beta2),
                    Field::Num(p.beta1),
                    Field::Num(r1),
                    Field::Num(r2),
                    Field::Num(r3),
                ]);
            }
            let table = Table {
                columns: &["s", "beta3", "alpha", "beta2", "beta1", "r1", "r2", "r3"],
                rows,
            };
            let echo = vec![
                ("subcommand", "\"modulation\"".to_string()),
                (
                    "s_range",
                    format!("\"{}\"", records::json_escape(&spec)),
                ),
            ];
            emit(&table, &output, &echo)
        }
        Command::HmTable { x_range, output } => {
            let spec = x_range.clone().unwrap_or_else(|| "-12:10:400".to_string());
            let parts = parse_range(&spec)?;
            let (lo, hi, n) = (parts[0], *parts.last().unwrap(), parts.len());
            let hm = solve_hastings_mcleod(lo, hi, n)?;
            let rows = hm
                .grid()
                .iter()
                .zip(hm.values())
                .map(|(&xi, &q)| vec![Field::Num(xi), Field::Num(q)])
                .collect();
            let table = Table {
                columns: &["xi", "q"],
                rows,
            };
            let echo = vec![
                ("subcommand", "\"hm-table\"".to_string()),
                ("x_range", format!("\"{}\"", records::json_escape(&spec))),
            ];
            emit(&table, &output, &echo)
        }
        Command::Verify { only, tol, output } => {
            let mut tols = Tolerances::new();
            for spec in &tol {
                let Some((name, value)) = spec.split_once('=') else {
                    bail!("--tol expects NAME=VALUE, got '{spec}'");
                };
                let value: f64 = value.parse().context("bad tolerance value")?;
                tols.set(name, value).map_err(|e| anyhow::anyhow!("{e}"))?;
            }
            let results = run_all(only.as_deref(), &tols)?;
            for r in &results {
                let cmp = if r.greater_is_better { ">=" } else { "<=" };
                eprintln!(
                    "{}: {} (measured {:.6e} {} {:.6e})",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.measured,
                    cmp,
                    r.tolerance
                );
            }
            let report = serde_json::json!({
                "meta": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "schema_version": 1,
                    "config": {
                        "subcommand": "verify",
                        "only": only,
                        "tol_overrides": tol,
                    },
                },
                "records": results,
            });
            let text = serde_json::to_string_pretty(&report)? + "\n";
            match &output.out {
                Some(path) => std::fs::write(path, text.as_bytes())
                    .with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            if results.iter().any(|r| !r.passed) {
                std::process::exit(1);
            }
            Ok(())
        }
    }
}
