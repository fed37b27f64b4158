//! Command-line front end.
//!
//! Exit codes: 0 success; 1 malformed input, bad arguments or IO; 2 the
//! action has dimension p = 0; 3 a resource budget would be exceeded;
//! 4 dataset and model digests differ; 5 `verdict` disagrees with the
//! classified branch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::action::{classify, classify_action, Classification};
use crate::analysis::{build_report, compare_levels, median, Tolerances};
use crate::error::{Error, Result};
use crate::lattice::{covering_constant_search, verify_covering};
use crate::model::{parse_action_spec, parse_field_model, presets, FieldModel};
use crate::simulator::{
    bt_alpha_exact_indicator, bt_alpha_numeric, partial_maxima, GridSpec, MaximaDataset, Method,
    SimulationOptions, DEFAULT_BT_BUDGET, DEFAULT_POINT_BUDGET,
};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_ZERO_DIMENSION: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_DIGEST: u8 = 4;
pub const EXIT_VERDICT_MISMATCH: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "stable-field-lab",
    version,
    about = "Dimension, conservativity and maxima growth of stationary SaS fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group-theoretic dimension, torsion profile and conservativity.
    Dim(DimArgs),
    /// Simulate partial maxima over a t-ladder and write a dataset CSV.
    Simulate(SimulateArgs),
    /// Scaling regression and Frechet fit of a dataset against its model.
    Verdict(VerdictArgs),
    /// Tabulate the scale function b(T).
    Bt(BtArgs),
    /// Bounded search for the covering constant of the level-0 decomposition.
    Covering(CoveringArgs),
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Model JSON file, or one of the bundled names (example3, nadkarni, nadkarni_alt_gamma0).
    #[arg(long)]
    pub model: String,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Print the classification as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Dataset CSV to write; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub t_ladder: Vec<f64>,
    /// Skeleton level n of the grid 2^{-n} Gamma_0.
    #[arg(long, default_value_t = 2)]
    pub level: u32,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "cell")]
    pub method: Method,
    /// Largest number of grid points to visit.
    #[arg(long, env = "STABLE_FIELD_LAB_BUDGET", default_value_t = DEFAULT_POINT_BUDGET)]
    pub budget: u128,
    /// Also simulate at level n+1 and print how the medians move.
    #[arg(long)]
    pub refine_check: bool,
}

#[derive(Debug, Args)]
pub struct VerdictArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub dataset: PathBuf,
    /// Report JSON to write; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.15)]
    pub slope_tol: f64,
    #[arg(long, default_value_t = 0.15)]
    pub ks_threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    pub ks_rise: f64,
    #[arg(long, default_value_t = 3.0)]
    pub median_ratio: f64,
}

#[derive(Debug, Args)]
pub struct BtArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
    pub t_ladder: Vec<f64>,
    /// CSV to write; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Integration mesh of the numeric path.
    #[arg(long, default_value_t = 0.01)]
    pub mesh: f64,
    /// Skeleton level m of the supremum in the numeric path.
    #[arg(long, default_value_t = 3)]
    pub level: u32,
    /// Force the numeric path.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, env = "STABLE_FIELD_LAB_BUDGET", default_value_t = DEFAULT_BT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args)]
pub struct CoveringArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Largest cube half-width n probed.
    #[arg(long, default_value_t = 2)]
    pub n: u64,
    /// Largest dyadic level m probed.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 8)]
    pub max_bound: u64,
    /// Check this single M at (n, m) instead of searching.
    #[arg(long)]
    pub bound: Option<u64>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ZeroDimension => EXIT_ZERO_DIMENSION,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::DigestMismatch { .. } => EXIT_DIGEST,
        _ => EXIT_INPUT,
    }
}

fn read_model_text(arg: &ModelArg) -> Result<String> {
    let path = Path::new(&arg.model);
    if !path.exists() {
        let bundled = match arg.model.as_str() {
            "example3" => Some(presets::EXAMPLE3_JSON),
            "nadkarni" => Some(presets::NADKARNI_JSON),
            "nadkarni_alt_gamma0" => Some(presets::NADKARNI_ALT_GAMMA0_JSON),
            _ => None,
        };
        if let Some(text) = bundled {
            return Ok(text.to_string());
        }
    }
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_model(arg: &ModelArg) -> Result<FieldModel> {
    parse_field_model(&read_model_text(arg)?)
}

fn exponent_label(p: usize) -> String {
    format!("{p}/alpha")
}

fn print_classification(c: &Classification, out: &mut impl Write) -> std::io::Result<()> {
    let branch = c.branch().label();
    writeln!(out, "p={} {branch} exponent={}", c.p, exponent_label(c.p))?;
    if let (Some(a), Some(e)) = (c.alpha, c.predicted_exponent) {
        writeln!(out, "alpha={a} predicted_exponent={e:.6}")?;
    }
    for (i, t) in c.torsion_profile.iter().enumerate() {
        let t = if t.is_empty() {
            "trivial".to_string()
        } else {
            t.iter()
                .map(|x| format!("Z/{x}"))
                .collect::<Vec<_>>()
                .join(" x ")
        };
        writeln!(out, "torsion level {i}: {t}")?;
    }
    let q = &c.dimension.level(0).quotient;
    let cols = |m: &crate::lattice::IntegerMatrix| {
        m.columns()
            .iter()
            .map(|col| {
                format!(
                    "[{}]",
                    col.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(
        out,
        "free lift basis (level 0): {}",
        cols(&q.free_lift_basis)
    )?;
    writeln!(out, "kernel basis (level 0): {}", cols(&q.kernel_basis))?;
    let r = &c.conservativity;
    writeln!(
        out,
        "conservative={} injective={} discrete={} image_rank_z={} image_rank_r={}",
        r.conservative, r.injective, r.discrete, r.image_z_rank, r.image_real_rank
    )
}

fn cmd_dim(args: &DimArgs) -> Result<u8> {
    let text = read_model_text(&args.model)?;
    let spec = parse_action_spec(&text)?;
    let c = match parse_field_model(&text) {
        Ok(m) => classify(&spec, m.alpha)?,
        Err(_) => classify_action(&spec)?,
    };
    let mut out = std::io::stdout().lock();
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&c.to_json_value())?)?;
    } else {
        print_classification(&c, &mut out)?;
    }
    Ok(0)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8> {
    let model = load_model(&args.model)?;
    classify(&model.spec, model.alpha)?;
    let grid = GridSpec::new(args.t_ladder.clone(), args.level, args.reps, args.seed)?;
    let opts = SimulationOptions {
        method: args.method,
        point_budget: args.budget,
        ..SimulationOptions::default()
    };
    let ds = partial_maxima(&model, &grid, &opts)?;
    ds.write(&args.out)?;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "wrote {} rows to {} ({} distinct offsets, method {})",
        ds.replications() * grid.t_ladder.len(),
        args.out.display(),
        ds.meta.distinct_offsets,
        ds.meta.method
    )?;
    for (j, t) in grid.t_ladder.iter().enumerate() {
        writeln!(out, "t={t} median M_t={:.6}", median(&ds.column(j)))?;
    }
    if args.refine_check {
        let fine_grid = GridSpec::new(args.t_ladder.clone(), args.level + 1, args.reps, args.seed)?;
        let fine = partial_maxima(&model, &fine_grid, &opts)?;
        let c = compare_levels(&ds, &fine)?;
        writeln!(
            out,
            "refinement check, level {} -> {}:",
            c.level, c.refined_level
        )?;
        for (j, t) in c.t.iter().enumerate() {
            writeln!(
                out,
                "t={t} median {:.6} -> {:.6} ({:+.2}%)",
                c.medians[j],
                c.refined_medians[j],
                100.0 * c.relative_change[j]
            )?;
        }
    }
    Ok(0)
}

fn cmd_verdict(args: &VerdictArgs) -> Result<u8> {
    let model = load_model(&args.model)?;
    let ds = MaximaDataset::read(&args.dataset)?;
    let tol = Tolerances {
        slope: args.slope_tol,
        median_ratio: args.median_ratio,
        ks_threshold: args.ks_threshold,
        ks_rise: args.ks_rise,
    };
    let report = build_report(&ds, &model, &tol)?;
    let json = report.to_json();
    let mut out = std::io::stdout().lock();
    match &args.out {
        Some(path) => {
            fs::write(path, &json)?;
            writeln!(
                out,
                "verdict={} expected={} slope={:.4} predicted={:.4}",
                report.verdict.as_str(),
                report.expected.label(),
                report.slope,
                report.predicted
            )?;
        }
        None => out.write_all(json.as_bytes())?,
    }
    Ok(if report.matches {
        0
    } else {
        EXIT_VERDICT_MISMATCH
    })
}

fn cmd_bt(args: &BtArgs) -> Result<u8> {
    let model = load_model(&args.model)?;
    let c = classify(&model.spec, model.alpha)?;
    let alpha = model.alpha;
    let p = c.p as f64;
    let exact = !args.numeric && model.spec.translation_dim() == 1 && model.kernel.len() == 1;
    let mut csv = String::from("T,b_T,b_T_alpha,scaled,scaled_alpha\n");
    let mut last = None;
    for &t in &args.t_ladder {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parameter(format!(
                "T values must be positive, got {t}"
            )));
        }
        let b_alpha = if exact {
            bt_alpha_exact_indicator(&model, t)?
        } else {
            bt_alpha_numeric(&model, t, args.mesh, args.level, args.budget)?
        };
        let b = b_alpha.powf(1.0 / alpha);
        let scaled = t.powf(-p / alpha) * b;
        let scaled_alpha = b_alpha / t.powf(p);
        csv.push_str(&format!("{t},{b},{b_alpha},{scaled},{scaled_alpha}\n"));
        last = Some((scaled, scaled_alpha));
    }
    let mut note = String::new();
    if let (Some((s, sa)), true) = (last, args.t_ladder.len() > 1) {
        note = format!(
            "apparent limit ({} path): T^(-p/alpha) b(T) -> {s:.6}, T^(-p) b(T)^alpha -> {sa:.6}",
            if exact { "exact" } else { "numeric" }
        );
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &csv)?;
            if !note.is_empty() {
                println!("{note}");
            }
        }
        None => {
            print!("{csv}");
            if !note.is_empty() {
                eprintln!("{note}");
            }
        }
    }
    Ok(0)
}

fn cmd_covering(args: &CoveringArgs) -> Result<u8> {
    let text = read_model_text(&args.model)?;
    let spec = parse_action_spec(&text)?;
    let c = classify_action(&spec)?;
    let q = &c.dimension.level(0).quotient;
    let u = q.free_lift_basis.columns();
    let v = q.kernel_basis.columns();
    match args.bound {
        Some(bound) => {
            let ok = verify_covering(bound, &u, &v, args.n, args.m)?;
            println!(
                "M={bound} n={} m={}: {}",
                args.n,
                args.m,
                if ok { "covers" } else { "does not cover" }
            );
        }
        None => match covering_constant_search(&u, &v, args.n, args.m, args.max_bound)? {
            Some(m) => println!("M={m} (n <= {}, m <= {})", args.n, args.m),
            None => println!(
                "no M <= {} found (n <= {}, m <= {})",
                args.max_bound, args.n, args.m
            ),
        },
    }
    Ok(0)
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Dim(a) => cmd_dim(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verdict(a) => cmd_verdict(a),
        Command::Bt(a) => cmd_bt(a),
        Command::Covering(a) => cmd_covering(a),
    }
}

/// Parses `std::env::args`, runs, and maps errors onto exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
