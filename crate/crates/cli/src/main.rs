use clap::{Parser, Subcommand};
use dyntd_cli::{bench, replay, stress, write_csv, write_obstructions, Mode, StressConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dyntd", version, about = "Dynamic treedepth, long path and long cycle driver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an update script; each `query` prints the current answer.
    Replay {
        #[arg(long)]
        script: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Path)]
        mode: Mode,
        /// Path length or cycle length in vertices; the depth budget in td mode.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Vertex count; defaults to one past the largest vertex in the script.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Random updates checked against brute-force oracles after every step.
    Stress {
        #[arg(long, value_enum, default_value_t = Mode::Path)]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the reproduction script on a mismatch (default stderr).
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Update latency at several graph sizes, as CSV.
    Bench {
        #[arg(long, value_enum, default_value_t = Mode::Path)]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Comma separated or repeated.
        #[arg(long, value_delimiter = ',', default_values_t = [1000, 10000, 100000])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20000)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// List minimal obstructions for small treedepth as edge lists.
    Obstructions {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

fn run(cli: Cli) -> Result<ExitCode, dyntd_cli::CliError> {
    let mut out = std::io::stdout().lock();
    match cli.cmd {
        Cmd::Replay { script, mode, k, n } => {
            let text = std::fs::read_to_string(&script)?;
            let rep = replay(&text, mode, n, k, &mut out, &mut std::io::stderr())?;
            Ok(if rep.mismatches.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Stress { mode, k, n, ops, seed, script } => {
            let rep = stress(&StressConfig { mode, n, k, ops, seed, inject: None })?;
            use std::io::Write;
            writeln!(out, "{}", rep.summary())?;
            if let Some(d) = &rep.detail {
                eprintln!("{d}");
            }
            if let Some(r) = &rep.repro {
                match script {
                    Some(p) => std::fs::write(p, r)?,
                    None => eprint!("{r}"),
                }
            }
            Ok(if rep.mismatches == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Bench { mode, k, n, ops, seed, csv } => {
            let rows = bench(mode, &n, k, ops, seed)?;
            match csv {
                Some(p) => write_csv(&rows, &mut std::fs::File::create(p)?)?,
                None => write_csv(&rows, &mut out)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Obstructions { d, max_n } => {
            write_obstructions(d, max_n, &mut out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
