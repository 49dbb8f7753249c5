use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dyneq::bounds::BoundMode;
use dyneq::cli::{self, EXIT_FAIL, EXIT_INPUT};
use dyneq::config::{parse_problem, ProblemConfig};
use dyneq::table::Format;

#[derive(Parser)]
#[command(name = "dyneq", version, about = "Second-order linear dynamic equations on time scales")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Const,
    Var,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the initial value problem and print the result table.
    Solve {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the residual, Wronskian, equivalence and growth checks.
    Verify { config: PathBuf },
    /// Build the particular solution every applicable way and compare.
    Compare { config: PathBuf },
    /// Check the exponential growth bound for the homogeneous solution.
    Bound {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "var")]
        mode: Mode,
    },
}

fn load(path: &PathBuf) -> Result<ProblemConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_problem(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(args: Args) -> Result<i32, String> {
    match args.cmd {
        Cmd::Solve { config, format, out } => {
            let cfg = load(&config)?;
            let table = cli::cmd_solve(&cfg).map_err(|e| e.to_string())?;
            let fmt = match format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            };
            let text = table.emit(fmt);
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Verify { config } => {
            let cfg = load(&config)?;
            let report = cli::cmd_verify(&cfg).map_err(|e| e.to_string())?;
            print!("{}", report.render());
            Ok(if report.passed() { 0 } else { EXIT_FAIL })
        }
        Cmd::Compare { config } => {
            let cfg = load(&config)?;
            let report = cli::cmd_compare(&cfg).map_err(|e| e.to_string())?;
            print!("{}", report.render());
            Ok(if report.passed() { 0 } else { EXIT_FAIL })
        }
        Cmd::Bound { config, mode } => {
            let cfg = load(&config)?;
            let mode = match mode {
                Mode::Const => BoundMode::ConstCoeff,
                Mode::Var => BoundMode::VarCoeff { p1: None, q1: None },
            };
            let report = cli::cmd_bound(&cfg, mode).map_err(|e| e.to_string())?;
            let ts = cfg.timescale().map_err(|e| e.to_string())?;
            print!("{}", cli::render_bound(&report, ts.points()));
            Ok(if report.all_pass() { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
