//! `phasekick`: command-line driver for the kickback, QPE, resource,
//! Heisenberg and order-finding experiments.
//!
//! Exit codes: 0 success, 1 the run completed but reports a failure (or hit
//! a numerical error), 2 invalid usage.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{Failure, Output};

#[derive(Parser, Debug)]
#[command(name = "phasekick", version, about = "Uncontrolled phase kickback experiments")]
struct Cli {
    /// Print the full run record as JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled quantities (echoed in every record).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-ancilla kickback on a diagonal one-qubit U.
    Kickback(commands::KickbackArgs),
    /// m-bit phase estimation on a diagonal U.
    Qpe(commands::QpeArgs),
    /// Two-qubit gate cost table, standard vs uncontrolled QPE.
    Resources(commands::ResourcesArgs),
    /// Ground-state energy of the Heisenberg chain.
    Heisenberg(commands::HeisenbergArgs),
    /// Order finding with an uncontrolled first phase bit.
    Shor(commands::ShorArgs),
}

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    parameters: &'a serde_json::Value,
    seed: u64,
    results: &'a serde_json::Value,
    /// Seconds spent in the command, excluding output.
    wall_time: f64,
    version: &'static str,
}

fn run(cli: &Cli) -> Result<(&'static str, Output), Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::Kickback(a) => Ok(("kickback", commands::kickback(a)?)),
        Command::Qpe(a) => Ok(("qpe", commands::qpe(a)?)),
        Command::Resources(a) => Ok(("resources", commands::resources(a)?)),
        Command::Heisenberg(a) => Ok(("heisenberg", commands::heisenberg(a)?)),
        Command::Shor(a) => Ok(("shor", commands::shor(a, seed)?)),
    }
}

fn write_outputs(dir: &PathBuf, command: &str, record: &str, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{command}.json")), record)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (command, out) = match run(&cli) {
        Ok(x) => x,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let record = RunRecord {
        command,
        parameters: &out.parameters,
        seed: cli.seed,
        results: &out.results,
        wall_time: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let json = serde_json::to_string_pretty(&record).expect("run records serialize");
    if cli.json {
        println!("{json}");
    } else if let Some(csv) = &out.stdout_csv {
        print!("{csv}");
    } else {
        println!("{}", out.text.trim_end());
        println!("seed: {}", cli.seed);
    }
    if let Some(dir) = std::env::var_os("PHASEKICK_OUT_DIR") {
        if let Err(e) = write_outputs(&PathBuf::from(dir), command, &json, &out.files) {
            eprintln!("error: cannot write outputs: {e}");
            return ExitCode::from(1);
        }
    }
    if out.declared_failure {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
