//! Command-line front end: reproduces the convergence tables and figures,
//! manages the weight cache, and emits CSV (canonical) plus SVG (derived)
//! artifacts.
//!
//! Subcommands: `solve`, `table`, `figure`, `weights`, `singularities`.
//! Flags override an optional TOML config file, which overrides defaults;
//! the effective configuration is echoed into every output directory.
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use crate::analysis::{self, reference_relaxation, scan_singularities, RelaxationSpec, SearchBox};
use crate::error::{Result, VofracError};
use crate::laplace_inversion::ContourSpec;
use crate::plot::{line_chart, Series};
use crate::solver::{self, eoc, preset_problem, Preset, StepSolverOptions};
use crate::transition::ExponentialTransition;
use crate::weights::{compute_weights, WeightTable, DEFAULT_SAFETY, DEFAULT_TAU};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable selecting the weight-cache directory.
pub const CACHE_DIR_ENV: &str = "VOFRAC_CACHE_DIR";

// ---------------------------------------------------------------------------
// Table drivers (also the programmatic API used by the integration tests)
// ---------------------------------------------------------------------------

/// One error/EOC column of a convergence table.
#[derive(Debug, Clone)]
pub struct TableColumn {
    pub label: String,
    pub errors: Vec<f64>,
    /// `eocs[i] = log₂(errors[i]/errors[i+1])`.
    pub eocs: Vec<f64>,
}

/// An h-ladder convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub hs: Vec<f64>,
    pub columns: Vec<TableColumn>,
}

fn eoc_column(label: String, errors: Vec<f64>) -> Result<TableColumn> {
    let eocs = errors
        .windows(2)
        .map(|w| eoc(w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(TableColumn {
        label,
        errors,
        eocs,
    })
}

/// Relaxation convergence study: errors at `T = 4` against the
/// Laplace-inversion reference, `h = 2^{−2}..2^{−7}`, for the three
/// standard parameter sets.
pub fn table1() -> Result<ConvergenceTable> {
    let sets = [
        (0.6, 0.8, 2.0, 1.0),
        (0.5, 0.9, 1.0, 2.0),
        (0.9, 0.6, 1.0, 0.5),
    ];
    let t_end = 4.0;
    let hs: Vec<f64> = (2..=7).map(|p| 2.0_f64.powi(-p)).collect();
    let opts = StepSolverOptions::default();
    let contour = ContourSpec::default_parabolic(t_end, t_end)?;
    let mut columns = Vec::new();
    for &(a1, a2, c, lam) in &sets {
        let tr = ExponentialTransition::new(a1, a2, c)?;
        let spec = RelaxationSpec::new(tr, lam, 1.0)?;
        let y_ref = reference_relaxation(&spec, &[t_end], &contour)?[0];
        let problem = preset_problem(Preset::Relaxation { lam }, tr, vec![1.0], t_end)?;
        let errors = hs
            .iter()
            .map(|&h| {
                let y = solver::solve_gl(&problem, h, &opts)?;
                Ok((y.final_state()[0] - y_ref).abs())
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(eoc_column(
            format!("a1={a1} a2={a2} c={c} lambda={lam}"),
            errors,
        )?);
    }
    Ok(ConvergenceTable { hs, columns })
}

/// Initial value used by the nonlinear convergence study.
pub const TABLE2_Y0: f64 = 0.85;

/// Nonlinear (`f = 1 − 3y²`) convergence study: errors at `T = 2` against
/// a self-reference at `h = 2^{−10}`, ladder `h = 2^{−2}..2^{−7}`.
pub fn table2() -> Result<ConvergenceTable> {
    let sets = [(0.6, 0.8, 2.0), (0.5, 0.9, 1.0), (0.9, 0.6, 1.0)];
    let t_end = 2.0;
    let hs: Vec<f64> = (2..=7).map(|p| 2.0_f64.powi(-p)).collect();
    let opts = StepSolverOptions::default();
    let mut columns = Vec::new();
    for &(a1, a2, c) in &sets {
        let tr = ExponentialTransition::new(a1, a2, c)?;
        let problem = preset_problem(Preset::Nonlinear13y2, tr, vec![TABLE2_Y0], t_end)?;
        let y_ref = solver::solve_gl(&problem, 2.0_f64.powi(-10), &opts)?.final_state()[0];
        let errors = hs
            .iter()
            .map(|&h| {
                let y = solver::solve_gl(&problem, h, &opts)?;
                Ok((y.final_state()[0] - y_ref).abs())
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(eoc_column(format!("a1={a1} a2={a2} c={c}"), errors)?);
    }
    Ok(ConvergenceTable { hs, columns })
}

/// Brusselator initial state used by the convergence study (the
/// limit-cycle figure's initial point).
pub const TABLE3_V0: [f64; 2] = [0.9, 2.1];
/// Transition rate used by the Brusselator study.
pub const TABLE3_C: f64 = 2.0;

/// Brusselator convergence study: Euclidean errors at `T = 16` against a
/// self-reference at `h = 2^{−10}`, ladder `h = 2^{−4}..2^{−8}`,
/// `a = 1`, four (α₁, α₂, μ) sets.
pub fn table3() -> Result<ConvergenceTable> {
    let sets = [
        (0.6, 0.8, 4.0),
        (0.6, 0.8, 2.0),
        (0.8, 0.6, 4.0),
        (0.8, 0.6, 2.0),
    ];
    let t_end = 16.0;
    let hs: Vec<f64> = (4..=8).map(|p| 2.0_f64.powi(-p)).collect();
    let opts = StepSolverOptions::default();
    let mut columns = Vec::new();
    for &(a1, a2, mu) in &sets {
        let tr = ExponentialTransition::new(a1, a2, TABLE3_C)?;
        let problem = preset_problem(
            Preset::Brusselator { a: 1.0, mu },
            tr,
            TABLE3_V0.to_vec(),
            t_end,
        )?;
        let v_ref = solver::solve_gl(&problem, 2.0_f64.powi(-10), &opts)?;
        let v_ref = v_ref.final_state().to_vec();
        let errors = hs
            .iter()
            .map(|&h| {
                let v = solver::solve_gl(&problem, h, &opts)?;
                let v = v.final_state();
                Ok(((v[0] - v_ref[0]).powi(2) + (v[1] - v_ref[1]).powi(2)).sqrt())
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(eoc_column(format!("a1={a1} a2={a2} mu={mu}"), errors)?);
    }
    Ok(ConvergenceTable { hs, columns })
}

/// Render a convergence table as CSV (`h`, then `error`/`eoc` pairs per
/// column; the first row has empty EOC cells).
pub fn table_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("h");
    for col in &table.columns {
        let _ = write!(out, ",error[{}],eoc[{}]", col.label, col.label);
    }
    out.push('\n');
    for (i, &h) in table.hs.iter().enumerate() {
        let _ = write!(out, "{h}");
        for col in &table.columns {
            if i == 0 {
                let _ = write!(out, ",{},", col.errors[i]);
            } else {
                let _ = write!(out, ",{},{}", col.errors[i], col.eocs[i - 1]);
            }
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Command-line definition
// ---------------------------------------------------------------------------

/// Variable-order fractional calculus toolkit.
#[derive(Debug, Parser)]
#[command(name = "vofrac", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config file; explicit flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default "out").
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a preset problem and write the trajectory CSV (optionally SVG).
    Solve(SolveArgs),
    /// Reproduce a convergence table (table1 | table2 | table3).
    Table(TableArgs),
    /// Reproduce a figure (fig1..fig6).
    Figure(FigureArgs),
    /// Compute, certify and cache a weight table.
    Weights(WeightsArgs),
    /// Scan the singularities of the relaxation transform over a λ sweep.
    Singularities(SingularitiesArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Preset: relaxation | nonlinear13y2 | brusselator.
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Relaxation rate λ.
    #[arg(long = "lambda")]
    pub lambda: Option<f64>,
    /// Brusselator parameter a.
    #[arg(long)]
    pub a: Option<f64>,
    /// Brusselator parameter μ.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Initial state, comma-separated.
    #[arg(long)]
    pub y0: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    /// Also render an SVG line plot.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// table1 | table2 | table3.
    pub which: String,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig1 | fig2 | fig3 | fig4 | fig5 | fig6.
    pub which: String,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub fs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SingularitiesArgs {
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub lam_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub lam_max: f64,
    /// Multiplicative λ step.
    #[arg(long, default_value_t = 1.2)]
    pub ratio: f64,
}

/// Optional config-file values; explicit CLI flags win.
#[derive(Debug, Default, Clone, Deserialize)]
pub struct FileConfig {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    pub a: Option<f64>,
    pub mu: Option<f64>,
    pub y0: Option<Vec<f64>>,
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    pub tau: Option<f64>,
    pub fs: Option<f64>,
    pub out: Option<PathBuf>,
}

/// The fully resolved configuration echoed into the output directory.
#[derive(Debug, Serialize)]
struct EffectiveConfig<'a> {
    command: &'a str,
    parameters: toml::value::Table,
}

const DEFAULT_A1: f64 = 0.6;
const DEFAULT_A2: f64 = 0.8;
const DEFAULT_C: f64 = 2.0;
const DEFAULT_LAMBDA: f64 = 1.0;

/// Execute a parsed command line.  Returns the list of files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let file_cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<FileConfig>(&text).map_err(|e| {
                VofracError::InvalidArgument(format!("config file {}: {e}", path.display()))
            })?
        }
        None => FileConfig::default(),
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| file_cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)?;
    match &cli.command {
        Command::Solve(args) => cmd_solve(args, &file_cfg, &out_dir),
        Command::Table(args) => cmd_table(args, &out_dir),
        Command::Figure(args) => cmd_figure(args, &out_dir),
        Command::Weights(args) => cmd_weights(args, &file_cfg, &out_dir),
        Command::Singularities(args) => cmd_singularities(args, &file_cfg, &out_dir),
    }
}

/// Map an error to the process exit code contract.
pub fn exit_code(err: &VofracError) -> i32 {
    match err {
        VofracError::InvalidArgument(_)
        | VofracError::UnknownPreset(_)
        | VofracError::Pole(_)
        | VofracError::BranchCut(_) => 2,
        VofracError::InfeasiblePlan(_) | VofracError::Numerical(_) | VofracError::Io(_) => 3,
    }
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

fn cmd_solve(args: &SolveArgs, cfg: &FileConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let a1 = args.a1.or(cfg.a1).unwrap_or(DEFAULT_A1);
    let a2 = args.a2.or(cfg.a2).unwrap_or(DEFAULT_A2);
    let c = args.c.or(cfg.c).unwrap_or(DEFAULT_C);
    let lambda = args.lambda.or(cfg.lambda).unwrap_or(DEFAULT_LAMBDA);
    let a = args.a.or(cfg.a).unwrap_or(1.0);
    let mu = args.mu.or(cfg.mu).unwrap_or(4.0);
    let h = args.h.or(cfg.h).unwrap_or(2.0_f64.powi(-5));
    let t_end = args.t_end.or(cfg.t_end).unwrap_or(4.0);
    let tr = ExponentialTransition::new(a1, a2, c)?;
    let preset = solver::preset_by_name(&args.preset, lambda, a, mu)?;
    let y0 = match (&args.y0, &cfg.y0) {
        (Some(text), _) => text
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    VofracError::InvalidArgument(format!("bad y0 component: {tok}"))
                })
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(v)) => v.clone(),
        (None, None) => match preset {
            Preset::Brusselator { .. } => TABLE3_V0.to_vec(),
            Preset::Nonlinear13y2 => vec![TABLE2_Y0],
            Preset::Relaxation { .. } => vec![1.0],
        },
    };
    let problem = preset_problem(preset, tr, y0, t_end)?;
    let traj = solver::solve_gl(&problem, h, &StepSolverOptions::default())?;

    let mut csv = String::from("t");
    for k in 1..=problem.dim() {
        let _ = write!(csv, ",y{k}");
    }
    csv.push('\n');
    for (t, y) in traj.ts.iter().zip(&traj.ys) {
        let _ = write!(csv, "{t}");
        for v in y {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    let mut written = vec![write_atomic(&out_dir.join("solve.csv"), csv.as_bytes())?];
    if args.svg {
        let series_data: Vec<Vec<(f64, f64)>> = (0..problem.dim())
            .map(|k| traj.ts.iter().zip(&traj.ys).map(|(&t, y)| (t, y[k])).collect())
            .collect();
        let labels: Vec<String> = (1..=problem.dim()).map(|k| format!("y{k}")).collect();
        let series: Vec<Series<'_>> = series_data
            .iter()
            .zip(&labels)
            .map(|(pts, label)| Series {
                label,
                points: pts,
            })
            .collect();
        let svg = line_chart(&problem.label, "t", "y", &series);
        written.push(write_atomic(&out_dir.join("solve.svg"), svg.as_bytes())?);
    }
    written.push(echo_config(
        out_dir,
        "solve",
        &[
            ("preset", toml::Value::String(args.preset.clone())),
            ("a1", a1.into()),
            ("a2", a2.into()),
            ("c", c.into()),
            ("lambda", lambda.into()),
            ("a", a.into()),
            ("mu", mu.into()),
            ("h", h.into()),
            ("T", t_end.into()),
            (
                "y0",
                toml::Value::Array(problem.y0.iter().map(|&v| v.into()).collect()),
            ),
        ],
    )?);
    Ok(written)
}

fn cmd_table(args: &TableArgs, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let (table, meta): (ConvergenceTable, Vec<(&str, toml::Value)>) = match args.which.as_str() {
        "table1" => (
            table1()?,
            vec![
                ("T", 4.0.into()),
                ("reference", "laplace-inversion".into()),
            ],
        ),
        "table2" => (
            table2()?,
            vec![
                ("T", 2.0.into()),
                ("y0", TABLE2_Y0.into()),
                ("reference", "self, h = 2^-10 (same scheme)".into()),
            ],
        ),
        "table3" => (
            table3()?,
            vec![
                ("T", 16.0.into()),
                ("c", TABLE3_C.into()),
                (
                    "v0",
                    toml::Value::Array(TABLE3_V0.iter().map(|&v| v.into()).collect()),
                ),
                ("norm", "euclidean at T".into()),
                // The reference resolution is assumed equal to the scalar
                // nonlinear study's; recorded here for provenance.
                ("reference", "self, h = 2^-10 (same scheme, assumed)".into()),
            ],
        ),
        other => {
            return Err(VofracError::InvalidArgument(format!(
                "unknown table: {other} (expected table1|table2|table3)"
            )))
        }
    };
    let csv = table_csv(&table);
    let written = vec![
        write_atomic(&out_dir.join(format!("{}.csv", args.which)), csv.as_bytes())?,
        echo_config(out_dir, &args.which, &meta)?,
    ];
    Ok(written)
}

fn cmd_figure(args: &FigureArgs, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let opts = StepSolverOptions::default();
    match args.which.as_str() {
        // Kernel ratios VO/CO at small and large times.
        "fig1" => {
            let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
            let small: Vec<f64> = log_grid(1e-3, 1.0, 60);
            let large: Vec<f64> = log_grid(1.0, 1e3, 60);
            let ratios = analysis::kernel_ratio_study(&tr, &small, &large)?;
            let mut csv = String::from("t_small,psi_over_co_alpha1,phi_over_co_alpha1,t_large,psi_over_co_alpha2,phi_over_co_alpha2\n");
            for i in 0..small.len() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    small[i],
                    ratios.psi_small[i],
                    ratios.phi_small[i],
                    large[i],
                    ratios.psi_large[i],
                    ratios.phi_large[i]
                );
            }
            written.push(write_atomic(&out_dir.join("fig1.csv"), csv.as_bytes())?);
            let ps: Vec<(f64, f64)> = small
                .iter()
                .map(|t| t.log10())
                .zip(ratios.psi_small.iter().copied())
                .collect();
            let pl: Vec<(f64, f64)> = large
                .iter()
                .map(|t| t.log10())
                .zip(ratios.psi_large.iter().copied())
                .collect();
            let fs: Vec<(f64, f64)> = small
                .iter()
                .map(|t| t.log10())
                .zip(ratios.phi_small.iter().copied())
                .collect();
            let fl: Vec<(f64, f64)> = large
                .iter()
                .map(|t| t.log10())
                .zip(ratios.phi_large.iter().copied())
                .collect();
            let svg = line_chart(
                "Kernel ratios VO/CO",
                "log10 t",
                "ratio",
                &[
                    Series { label: "psi vs alpha1 (small t)", points: &ps },
                    Series { label: "psi vs alpha2 (large t)", points: &pl },
                    Series { label: "phi vs alpha1 (small t)", points: &fs },
                    Series { label: "phi vs alpha2 (large t)", points: &fl },
                ],
            );
            written.push(write_atomic(&out_dir.join("fig1.svg"), svg.as_bytes())?);
        }
        // Differences between VO relaxation and the two CO curves.
        "fig2" => {
            let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
            let spec = RelaxationSpec::new(tr, 1.0, 1.0)?;
            let ts = log_grid(1e-3, 50.0, 120);
            let diffs = analysis::relaxation_difference_study(&spec, &ts)?;
            let mut csv = String::from("t,y_vo_minus_alpha1,y_vo_minus_alpha2\n");
            for i in 0..ts.len() {
                let _ = writeln!(csv, "{},{},{}", ts[i], diffs.vs_alpha1[i], diffs.vs_alpha2[i]);
            }
            written.push(write_atomic(&out_dir.join("fig2.csv"), csv.as_bytes())?);
            let d1: Vec<(f64, f64)> = ts
                .iter()
                .map(|t| t.log10())
                .zip(diffs.vs_alpha1.iter().copied())
                .collect();
            let d2: Vec<(f64, f64)> = ts
                .iter()
                .map(|t| t.log10())
                .zip(diffs.vs_alpha2.iter().copied())
                .collect();
            let svg = line_chart(
                "VO relaxation minus CO relaxation",
                "log10 t",
                "difference",
                &[
                    Series { label: "vs alpha1", points: &d1 },
                    Series { label: "vs alpha2", points: &d2 },
                ],
            );
            written.push(write_atomic(&out_dir.join("fig2.svg"), svg.as_bytes())?);
        }
        // Singularity loci of H(s) as λ sweeps.
        "fig3" => {
            let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
            let scan = scan_singularities(&tr, 0.01, 5.0, 1.2, &SearchBox::default())?;
            let mut csv = String::from("lambda,re,im,residual\n");
            let mut locus = Vec::new();
            for (lam, roots) in scan.lambda_grid.iter().zip(&scan.found) {
                for r in roots {
                    let _ = writeln!(csv, "{lam},{},{},{}", r.s.re, r.s.im, r.residual);
                    if r.s.im > 0.0 {
                        locus.push((r.s.re, r.s.im));
                    }
                }
            }
            written.push(write_atomic(&out_dir.join("fig3.csv"), csv.as_bytes())?);
            let svg = line_chart(
                "Singularities of H(s), lambda in [0.01, 5]",
                "Re s",
                "Im s",
                &[Series { label: "upper-half locus", points: &locus }],
            );
            written.push(write_atomic(&out_dir.join("fig3.svg"), svg.as_bytes())?);
        }
        // VO relaxation solution vs the two CO relaxation curves.
        "fig4" => {
            let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
            let lam = 1.0;
            let t_end = 10.0;
            let problem = preset_problem(Preset::Relaxation { lam }, tr, vec![1.0], t_end)?;
            let traj = solver::solve_gl(&problem, 2.0_f64.powi(-6), &opts)?;
            let co1 = solver::solve_co_gl(0.6, &problem, 2.0_f64.powi(-6), &opts)?;
            let co2 = solver::solve_co_gl(0.8, &problem, 2.0_f64.powi(-6), &opts)?;
            written.extend(write_comparison_csv_svg(
                out_dir, "fig4", "VO relaxation vs CO", &traj, &co1, &co2,
            )?);
        }
        // Scalar nonlinear problem, VO vs CO.
        "fig5" => {
            let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
            let t_end = 5.0;
            let problem = preset_problem(Preset::Nonlinear13y2, tr, vec![TABLE2_Y0], t_end)?;
            let traj = solver::solve_gl(&problem, 2.0_f64.powi(-6), &opts)?;
            let co1 = solver::solve_co_gl(0.6, &problem, 2.0_f64.powi(-6), &opts)?;
            let co2 = solver::solve_co_gl(0.8, &problem, 2.0_f64.powi(-6), &opts)?;
            written.extend(write_comparison_csv_svg(
                out_dir, "fig5", "VO nonlinear vs CO", &traj, &co1, &co2,
            )?);
        }
        // Brusselator phase planes: limit-cycle and stable regimes, with
        // both CO comparators overlaid.
        "fig6" => {
            for (tag, mu, v0, t_end) in [
                ("limit_cycle", 4.0, [0.9, 2.1], 120.0),
                ("stable", 2.0, [0.5, 2.5], 50.0),
            ] {
                let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
                let problem = preset_problem(
                    Preset::Brusselator { a: 1.0, mu },
                    tr,
                    v0.to_vec(),
                    t_end,
                )?;
                let h = 2.0_f64.powi(-5);
                let vo = solver::solve_gl(&problem, h, &opts)?;
                let co1 = solver::solve_co_gl(0.6, &problem, h, &opts)?;
                let co2 = solver::solve_co_gl(0.8, &problem, h, &opts)?;
                let mut csv =
                    String::from("t,x_vo,y_vo,x_co_alpha1,y_co_alpha1,x_co_alpha2,y_co_alpha2\n");
                for i in 0..vo.ts.len() {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{}",
                        vo.ts[i],
                        vo.ys[i][0],
                        vo.ys[i][1],
                        co1.ys[i][0],
                        co1.ys[i][1],
                        co2.ys[i][0],
                        co2.ys[i][1]
                    );
                }
                written.push(write_atomic(
                    &out_dir.join(format!("fig6_{tag}.csv")),
                    csv.as_bytes(),
                )?);
                let phase =
                    |t: &solver::Trajectory| t.ys.iter().map(|y| (y[0], y[1])).collect::<Vec<_>>();
                let (pv, p1, p2) = (phase(&vo), phase(&co1), phase(&co2));
                let svg = line_chart(
                    &format!("Brusselator phase plane ({tag}, mu={mu})"),
                    "x",
                    "y",
                    &[
                        Series { label: "VO", points: &pv },
                        Series { label: "CO alpha1", points: &p1 },
                        Series { label: "CO alpha2", points: &p2 },
                    ],
                );
                written.push(write_atomic(
                    &out_dir.join(format!("fig6_{tag}.svg")),
                    svg.as_bytes(),
                )?);
            }
        }
        other => {
            return Err(VofracError::InvalidArgument(format!(
                "unknown figure: {other} (expected fig1..fig6)"
            )))
        }
    }
    written.push(echo_config(out_dir, &args.which, &[])?);
    Ok(written)
}

fn cmd_weights(args: &WeightsArgs, cfg: &FileConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let a1 = args.a1.or(cfg.a1).unwrap_or(DEFAULT_A1);
    let a2 = args.a2.or(cfg.a2).unwrap_or(DEFAULT_A2);
    let c = args.c.or(cfg.c).unwrap_or(DEFAULT_C);
    let h = args.h.or(cfg.h).unwrap_or(2.0_f64.powi(-6));
    let n = args.n.unwrap_or(256);
    let tau = args.tau.or(cfg.tau).unwrap_or(DEFAULT_TAU);
    let fs = args.fs.or(cfg.fs).unwrap_or(DEFAULT_SAFETY);
    let tr = ExponentialTransition::new(a1, a2, c)?;

    let cache_dir = cache_dir(out_dir);
    std::fs::create_dir_all(&cache_dir)?;
    let key = format!(
        "w_{:016x}_{:016x}_{:016x}_{:016x}_{n}_{:016x}.bin",
        a1.to_bits(),
        a2.to_bits(),
        c.to_bits(),
        h.to_bits(),
        tau.to_bits()
    );
    let cache_path = cache_dir.join(&key);
    let (table, cache_hit) = if cache_path.is_file() {
        let file = std::fs::File::open(&cache_path)?;
        (WeightTable::load(std::io::BufReader::new(file))?, true)
    } else {
        let table = compute_weights(&tr, h, n, tau, fs)?;
        let mut buf = Vec::new();
        table.dump(&mut buf)?;
        write_atomic(&cache_path, &buf)?;
        (table, false)
    };
    let plan = table.plan();
    println!(
        "plan: r = {}, rho = {}, L = {}, max certified bound = {:e}{}",
        plan.r,
        plan.rho,
        plan.l,
        plan.error_bound_at(plan.n),
        if cache_hit {
            format!(" (cache hit, checksum {:016x})", table.checksum())
        } else {
            String::new()
        }
    );
    let mut csv = String::from("n,omega,certified_bound\n");
    for (idx, &w) in table.omegas().iter().enumerate() {
        let _ = writeln!(csv, "{idx},{w},{}", plan.error_bound_at(idx));
    }
    let written = vec![
        write_atomic(&out_dir.join("weights.csv"), csv.as_bytes())?,
        echo_config(
            out_dir,
            "weights",
            &[
                ("a1", a1.into()),
                ("a2", a2.into()),
                ("c", c.into()),
                ("h", h.into()),
                ("N", (n as i64).into()),
                ("tau", tau.into()),
                ("fs", fs.into()),
                ("r", plan.r.into()),
                ("rho", plan.rho.into()),
                ("L", (plan.l as i64).into()),
                ("cache_hit", cache_hit.into()),
            ],
        )?,
    ];
    Ok(written)
}

fn cmd_singularities(
    args: &SingularitiesArgs,
    cfg: &FileConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let a1 = args.a1.or(cfg.a1).unwrap_or(DEFAULT_A1);
    let a2 = args.a2.or(cfg.a2).unwrap_or(DEFAULT_A2);
    let c = args.c.or(cfg.c).unwrap_or(DEFAULT_C);
    let tr = ExponentialTransition::new(a1, a2, c)?;
    let scan = scan_singularities(&tr, args.lam_min, args.lam_max, args.ratio, &SearchBox::default())?;
    let mut csv = String::from("lambda,re,im,residual\n");
    for (lam, roots) in scan.lambda_grid.iter().zip(&scan.found) {
        for r in roots {
            let _ = writeln!(csv, "{lam},{},{},{}", r.s.re, r.s.im, r.residual);
        }
    }
    let written = vec![
        write_atomic(&out_dir.join("singularities.csv"), csv.as_bytes())?,
        echo_config(
            out_dir,
            "singularities",
            &[
                ("a1", a1.into()),
                ("a2", a2.into()),
                ("c", c.into()),
                ("lam_min", args.lam_min.into()),
                ("lam_max", args.lam_max.into()),
                ("ratio", args.ratio.into()),
            ],
        )?,
    ];
    Ok(written)
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

fn cache_dir(out_dir: &Path) -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| out_dir.join("cache"))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Write `bytes` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<PathBuf> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default(),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(path.to_path_buf())
}

fn echo_config(out_dir: &Path, command: &str, params: &[(&str, toml::Value)]) -> Result<PathBuf> {
    let mut table = toml::value::Table::new();
    for (k, v) in params {
        table.insert((*k).to_string(), v.clone());
    }
    let cfg = EffectiveConfig {
        command,
        parameters: table,
    };
    let text = toml::to_string_pretty(&cfg)
        .map_err(|e| VofracError::InvalidArgument(format!("config serialization: {e}")))?;
    write_atomic(&out_dir.join("effective_config.toml"), text.as_bytes())
}

fn write_comparison_csv_svg(
    out_dir: &Path,
    name: &str,
    title: &str,
    vo: &solver::Trajectory,
    co1: &solver::Trajectory,
    co2: &solver::Trajectory,
) -> Result<Vec<PathBuf>> {
    let mut csv = String::from("t,y_vo,y_co_alpha1,y_co_alpha2\n");
    for i in 0..vo.ts.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            vo.ts[i], vo.ys[i][0], co1.ys[i][0], co2.ys[i][0]
        );
    }
    let curve = |t: &solver::Trajectory| {
        t.ts.iter()
            .zip(&t.ys)
            .map(|(&x, y)| (x, y[0]))
            .collect::<Vec<_>>()
    };
    let (cv, c1, c2) = (curve(vo), curve(co1), curve(co2));
    let svg = line_chart(
        title,
        "t",
        "y",
        &[
            Series { label: "VO", points: &cv },
            Series { label: "CO alpha1", points: &c1 },
            Series { label: "CO alpha2", points: &c2 },
        ],
    );
    Ok(vec![
        write_atomic(&out_dir.join(format!("{name}.csv")), csv.as_bytes())?,
        write_atomic(&out_dir.join(format!("{name}.svg")), svg.as_bytes())?,
    ])
}
