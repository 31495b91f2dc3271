//! `gptc`: GPTs, geometric factors and corner detection from the command line.

mod commands;
mod output;
mod repro;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gpt_corners::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "gptc",
    version,
    about = "Generalized polarization tensors, geometric factors and corner detection"
)]
struct Cli {
    /// Worker threads for assembly and the dense solve. 1 gives byte-identical output across runs.
    #[arg(long, global = true, env = "GPTC_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Domain JSON to GPT and γ tables.
    Gpts(GptsArgs),
    /// γ table to σ, b, μ and consistency diagnostics.
    Factors(FactorsArgs),
    /// Factors table to Θ_m samples, the truncated boundary image and a corner report.
    Reconstruct(ReconstructArgs),
    /// σ table to a smooth/cornered verdict.
    Classify(ClassifyArgs),
    /// Schwarz–Christoffel ground truth for polygons.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Regenerate a table or figure data set with pinned settings.
    Repro(ReproArgs),
}

#[derive(Args, Debug)]
struct GptsArgs {
    /// Domain description, e.g. {"curve": "ellipse", "params": [2, 1]}.
    domain: PathBuf,
    /// Highest GPT order N.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    order: u32,
    /// Base panels per piece [default: 8 on cornered curves, 24 on smooth ones].
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    panels: Option<u32>,
    /// Dyadic refinement levels at each corner.
    #[arg(long, default_value_t = gpt_corners::pipeline::DEFAULT_DEPTH as u32, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
}

#[derive(Args, Debug)]
struct FactorsArgs {
    /// γ table written by `gpts`.
    gamma: PathBuf,
    /// Number of geometric factors K [default: all the table supports].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    order: Option<u32>,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    /// Factors table written by `factors`.
    factors: PathBuf,
    /// Partial-sum order m [default: every σ in the table].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    order: Option<u32>,
    /// Uniform grid size on [0, 1); must be at least 8m.
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u32).range(1..))]
    grid: u32,
    /// Peak threshold in robust standard deviations.
    #[arg(long, default_value_t = 3.0)]
    tau: f64,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Factors table or σ table.
    sigma: PathBuf,
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Exact σ_k and b_k of a polygon and samples of its boundary trace.
    Sc(ScArgs),
    /// σ̃_{n,k} of inscribed polygons against the exact σ_k.
    Approx(ApproxArgs),
}

#[derive(Args, Debug)]
struct ScArgs {
    /// {"vertices": [[x, y], ...], "pre_vertices": [[x, y], ...]}; pre-vertices may be
    /// omitted for regular polygons centred at the origin.
    polygon: PathBuf,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    order: u32,
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    trace_samples: u32,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    polygon: PathBuf,
    /// Polygon sizes.
    #[arg(long, value_delimiter = ',', default_value = "48,96,192,384,768")]
    n: Vec<u32>,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    order: u32,
}

#[derive(Args, Debug)]
struct ReproArgs {
    target: ReproTarget,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReproTarget {
    Table1,
    Table2,
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

/// Exit code and JSON payload for a failure.
fn report_error(e: &Error) -> ExitCode {
    let (code, kind) = classify_error(e);
    let payload = serde_json::json!({
        "error": kind,
        "message": e.to_string(),
        "exit_code": code,
    });
    eprintln!("{payload}");
    ExitCode::from(code)
}

fn classify_error(e: &Error) -> (u8, &'static str) {
    let kind = match e {
        Error::InvalidCurve(_) => "invalid-curve",
        Error::InvalidParameter(_) => "invalid-parameter",
        Error::LengthMismatch { .. } => "length-mismatch",
        Error::NonZeroMean { .. } => "non-zero-mean",
        Error::SingularSystem { .. } => "singular-system",
        Error::Residual { .. } => "residual",
        Error::TargetTooClose { .. } => "target-too-close",
        Error::InsufficientOrder(_) => "insufficient-order",
        Error::Inconsistent(_) => "inconsistent",
        Error::NotSimple(_) => "not-simple",
        Error::Parse(_) | Error::Json(_) => "parse",
        Error::Io(_) => "io",
    };
    (if e.is_input_error() { 2 } else { 1 }, kind)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let payload = serde_json::json!({
                "error": "usage",
                "message": e.to_string().trim_end(),
                "exit_code": 2,
            });
            eprintln!("{payload}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        gpt_corners::pipeline::configure_threads(n as usize);
    }
    let out = output::OutDir::new(cli.out);
    let result = match cli.command {
        Command::Gpts(a) => commands::gpts(&out, &a),
        Command::Factors(a) => commands::factors(&out, &a),
        Command::Reconstruct(a) => commands::reconstruct(&out, &a),
        Command::Classify(a) => commands::classify(&out, &a),
        Command::Oracle(OracleCommand::Sc(a)) => commands::oracle_sc(&out, &a),
        Command::Oracle(OracleCommand::Approx(a)) => commands::oracle_approx(&out, &a),
        Command::Repro(a) => repro::run(&out, a.target),
    };
    match result.and_then(|()| out.finish()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
