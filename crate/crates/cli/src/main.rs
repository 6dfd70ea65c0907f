//! `cstar-fusion`: batch runner for frame scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod report;
mod resolve;
mod run;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scenario::{line_col, CommandName, Scenario};

const EXAMPLES: [(&str, &str); 4] = [
    (
        "example1_blocks.toml",
        include_str!("../examples_data/example1_blocks.toml"),
    ),
    (
        "example2_quaternion.toml",
        include_str!("../examples_data/example2_quaternion.toml"),
    ),
    (
        "angle_counterexample.toml",
        include_str!("../examples_data/angle_counterexample.toml"),
    ),
    (
        "perturbation_demo.toml",
        include_str!("../examples_data/perturbation_demo.toml"),
    ),
];

#[derive(Parser)]
#[command(
    name = "cstar-fusion",
    version,
    about = "Run *-fusion frame scenarios and write JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the commands of a scenario file.
    Run {
        scenario: PathBuf,
        /// Run only commands of this kind.
        #[arg(long)]
        only: Option<CommandName>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the bundled scenarios into a directory.
    Examples {
        #[arg(long, default_value = ".")]
        dir: PathBuf,
        /// Overwrite existing files.
        #[arg(long)]
        force: bool,
    },
}

/// Failures that stop a run before any command executes.
enum Fatal {
    Io(String),
    Parse(String),
    Validation(String),
}

fn load(path: &Path, seed: Option<u64>) -> Result<resolve::Context, Fatal> {
    let src = fs::read_to_string(path).map_err(|e| Fatal::Io(format!("{}: {e}", path.display())))?;
    let scenario: Scenario = toml::from_str(&src).map_err(|e| {
        let at = e.span().map(|s| {
            let (line, col) = line_col(&src, s.start);
            format!("line {line}, column {col}")
        });
        Fatal::Parse(format!(
            "{}{}: {}",
            path.display(),
            at.map(|a| format!(" at {a}")).unwrap_or_default(),
            e.message()
        ))
    })?;
    resolve::resolve(scenario, seed).map_err(|e| Fatal::Validation(format!("{} at {e}", path.display())))
}

fn run(path: &Path, only: Option<CommandName>, out: Option<&Path>, seed: Option<u64>) -> ExitCode {
    let ctx = match load(path, seed) {
        Ok(c) => c,
        Err(f) => {
            let (kind, msg) = match f {
                Fatal::Io(m) => ("IoError", m),
                Fatal::Parse(m) => ("ParseError", m),
                Fatal::Validation(m) => ("ValidationError", m),
            };
            eprintln!("{kind}: {msg}");
            return ExitCode::from(2);
        }
    };
    let (doc, errored) = run::run(&ctx, only);
    let text = report::to_string(&doc);
    match out {
        Some(p) => {
            if let Err(e) = fs::write(p, text) {
                eprintln!("IoError: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if errored {
        eprintln!("one or more commands failed; see the report");
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn examples(dir: &Path, force: bool) -> ExitCode {
    if let Err(e) = fs::create_dir_all(dir) {
        eprintln!("IoError: {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for (name, body) in EXAMPLES {
        let path = dir.join(name);
        if path.exists() && !force {
            eprintln!("skipping {} (exists; pass --force to overwrite)", path.display());
            continue;
        }
        if let Err(e) = fs::write(&path, body) {
            eprintln!("IoError: {}: {e}", path.display());
            return ExitCode::from(2);
        }
        println!("wrote {}", path.display());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenario,
            only,
            out,
            seed,
        } => run(&scenario, only, out.as_deref(), seed),
        Command::Examples { dir, force } => examples(&dir, force),
    }
}
