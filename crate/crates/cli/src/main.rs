//! `ratsdp solve <instance.json>`: exact two-phase interior point solve.
//!
//! Exit codes: 0 success, 2 parse or validation failure, 3 invariant or
//! verification failure, 4 iteration budget exhausted. Errors are reported
//! on stderr as `error[<category>]: <message>`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ratsdp::exact::{format_rational, to_f64};
use ratsdp::io::{parse_instance, parse_solution, solution_to_json, trace_to_json_lines, verify_solution};
use ratsdp::model::SdpProblem;
use ratsdp::solver::{solve, SolveError, SolveOptions};

#[derive(Parser)]
#[command(name = "ratsdp", version, about = "Exact rational short-step SDP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance, or re-check a stored solution with --verify-only.
    Solve {
        instance: PathBuf,
        /// Solution file to write (or to read with --verify-only).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-iteration records, one JSON object per line.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Per-phase iteration cap.
        #[arg(long, value_name = "N")]
        max_iters: Option<u64>,
        /// Stop after phase one and emit its terminal iterate.
        #[arg(long)]
        phase1_only: bool,
        /// Verify the solution file given by --out against the instance.
        #[arg(long, requires = "out")]
        verify_only: bool,
    },
}

struct Failure {
    code: u8,
    category: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, category: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            category,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(2, "io", format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(3, "io", format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SdpProblem, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::new(2, "parse", format!("{}: {e}", path.display())))
}

fn solve_failure(e: SolveError) -> Failure {
    match e {
        SolveError::IterationBudget { .. } => Failure::new(4, "budget", e.to_string()),
        SolveError::Model(_) => Failure::new(2, "validation", e.to_string()),
        _ => Failure::new(3, "invariant", e.to_string()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let Command::Solve {
        instance,
        out,
        trace,
        max_iters,
        phase1_only,
        verify_only,
    } = cli.command;
    let problem = load(&instance)?;

    if verify_only {
        let path = out.expect("clap enforces --out");
        let stored = parse_solution(&read(&path)?, problem.n())
            .map_err(|e| Failure::new(2, "parse", format!("{}: {e}", path.display())))?;
        verify_solution(&problem, &stored).map_err(|e| Failure::new(3, "verification", e.to_string()))?;
        println!("verified: objective {}", format_rational(&stored.objective));
        return Ok(());
    }

    let options = SolveOptions {
        max_iters,
        rounding: true,
        phase1_only,
    };
    let solution = solve(&problem, &options).map_err(solve_failure)?;
    let doc = solution_to_json(&problem, &solution, false);
    match &out {
        Some(path) => write(path, &(doc + "\n"))?,
        None => println!("{doc}"),
    }
    if let Some(path) = &trace {
        write(path, &trace_to_json_lines(&solution.trace))?;
    }
    let (k1, k2) = solution.iterations();
    eprintln!(
        "objective {} (~{:.9}), gap bound ~{:.3e}, iterations {k1} + {k2}",
        format_rational(&solution.objective),
        to_f64(&solution.objective),
        to_f64(&solution.gap_bound)
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.category, f.message);
            ExitCode::from(f.code)
        }
    }
}
