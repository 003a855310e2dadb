//! Batch front door for the qcorr toolkit: ingest state files, run the
//! verification suites, audit GHZ optimality and tabulate partition counts.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
//! 3 invalid input state, 4 audit failure.

mod output;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use output::{render_analyze, render_audit, render_partitions, OutputFormat};
use qcorr::ghz_audit::audit_simultaneous_optimality;
use qcorr::partitions::{hardy_ramanujan_estimate, integer_partitions, MAX_INTEGER_PARTITION_N};
use qcorr::StateSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaseArg {
    /// Base-2 logarithms (bits).
    #[value(name = "2")]
    Two,
    /// Natural logarithms (nats).
    E,
}

impl BaseArg {
    fn value(self) -> f64 {
        match self {
            BaseArg::Two => 2.0,
            BaseArg::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Multipartite correlation analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Logarithm base for entropies.
    #[arg(long, global = true, value_enum, default_value = "2")]
    base: BaseArg,

    /// Master seed for every sampled ensemble.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Trials per sampled check.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,

    /// Absolute slack tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Output format (defaults per command).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze one state file: entropies, correlation index, verdicts.
    Analyze {
        /// Path to a state spec JSON file.
        input: PathBuf,
    },
    /// Run the seeded verification suites for the entropy inequalities.
    Verify,
    /// Audit simultaneous pairwise optimality for n qubits.
    GhzAudit {
        /// Number of qubits (2..=8).
        #[arg(long)]
        n: usize,
        /// Projected-ascent starts.
        #[arg(long, default_value_t = 5)]
        starts: usize,
    },
    /// Tabulate exact and asymptotic integer partition counts.
    Partitions {
        /// Largest n to tabulate (<= 60).
        #[arg(long)]
        n_max: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = cli.base.value();
    let tol = cli.tol;
    if tol.is_nan() || tol <= 0.0 {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }

    let result: Result<(String, u8), (String, u8)> = match &cli.command {
        Command::Analyze { input } => run_analyze(input, base, tol, cli.format),
        Command::Verify => run_verify(cli.seed, cli.trials, tol, base, cli.format),
        Command::GhzAudit { n, starts } => {
            run_ghz_audit(*n, cli.trials, *starts, cli.seed, cli.format)
        }
        Command::Partitions { n_max } => run_partitions(*n_max, cli.format),
    };

    match result {
        Ok((report, code)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &report) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{report}");
            }
            ExitCode::from(code)
        }
        Err((message, code)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn run_analyze(
    input: &PathBuf,
    base: f64,
    tol: f64,
    format: Option<OutputFormat>,
) -> Result<(String, u8), (String, u8)> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| (format!("cannot read {}: {e}", input.display()), 2))?;
    let spec: StateSpec =
        serde_json::from_str(&text).map_err(|e| (format!("cannot parse state spec: {e}"), 2))?;
    let label = spec.label.clone();
    let dims = spec.dims.clone();
    let state = spec
        .into_state()
        .map_err(|e| (format!("invalid state: {e}"), 3))?;

    let report = qcorr::correlation::analyze(&state, base, tol)
        .map_err(|e| (format!("analysis failed: {e}"), 3))?;
    let lambda = if state.n_subsystems() == 3 {
        Some(
            qcorr::correlation::lambda_parameter(&state, base)
                .map_err(|e| (format!("analysis failed: {e}"), 3))?,
        )
    } else {
        None
    };
    let profile = if state.n_subsystems() >= 2 {
        Some(
            qcorr::correlation::pairwise_expansion(&state, base)
                .map_err(|e| (format!("analysis failed: {e}"), 3))?,
        )
    } else {
        None
    };
    let margin = qcorr::correlation::nonclassical_margin(&state, base)
        .map_err(|e| (format!("analysis failed: {e}"), 3))?;
    let nonclassical = margin > tol;

    let format = format.unwrap_or(OutputFormat::Json);
    Ok((
        render_analyze(
            &label,
            &dims,
            &report,
            lambda,
            profile.as_deref(),
            margin,
            nonclassical,
            tol,
            format,
        ),
        0,
    ))
}

fn run_verify(
    seed: u64,
    trials: usize,
    tol: f64,
    base: f64,
    format: Option<OutputFormat>,
) -> Result<(String, u8), (String, u8)> {
    if trials == 0 {
        return Err(("--trials must be at least 1".into(), 2));
    }
    let suite = verify::run_suite(seed, trials, tol, base)
        .map_err(|e| (format!("verification run failed: {e}"), 1))?;
    let all_pass = suite.all_pass;
    let format = format.unwrap_or(OutputFormat::Text);
    let rendered = verify::render(&suite, format);
    Ok((rendered, if all_pass { 0 } else { 1 }))
}

fn run_ghz_audit(
    n: usize,
    trials: usize,
    starts: usize,
    seed: u64,
    format: Option<OutputFormat>,
) -> Result<(String, u8), (String, u8)> {
    if !(2..=8).contains(&n) {
        return Err((format!("--n must be in 2..=8, got {n}"), 2));
    }
    let result = audit_simultaneous_optimality(n, trials, starts, seed)
        .map_err(|e| (format!("audit failed to run: {e}"), 4))?;
    let code = if result.ghz_form { 0 } else { 4 };
    let format = format.unwrap_or(OutputFormat::Json);
    Ok((render_audit(&result, format), code))
}

fn run_partitions(
    n_max: usize,
    format: Option<OutputFormat>,
) -> Result<(String, u8), (String, u8)> {
    if !(1..=MAX_INTEGER_PARTITION_N).contains(&n_max) {
        return Err((
            format!("--n-max must be in 1..={MAX_INTEGER_PARTITION_N}, got {n_max}"),
            2,
        ));
    }
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let exact = integer_partitions(n)
            .map_err(|e| (e.to_string(), 2))?
            .count() as u64;
        let estimate = hardy_ramanujan_estimate(n);
        rows.push((n, exact, estimate, estimate / exact as f64));
    }
    let format = format.unwrap_or(OutputFormat::Csv);
    Ok((render_partitions(&rows, format), 0))
}
