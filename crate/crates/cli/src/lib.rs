//! Drivers behind the `dyntd` binary: script replay, randomized stress
//! against the brute-force oracles, update-time benchmarks and obstruction
//! listing.

mod bench;
mod script;
mod session;
mod stress;

pub use bench::{bench, write_csv, BenchRow, CSV_HEADER};
pub use script::{parse_script, render_script, Line, Op};
pub use session::{Answer, Applied, Mode, Session};
pub use stress::{stress, StressConfig, StressReport};

use dyntd::dynamic::DynError;
use dyntd::graph::GraphError;
use dyntd::obstructions::{self, ObstructionError};
use dyntd::oracle::OracleError;
use dyntd::partition::PartitionError;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}


/// Outcome of a replayed script.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReplayReport {
    pub queries: usize,
    pub warnings: usize,
    /// Line numbers whose `# expect` did not match.
    pub mismatches: Vec<usize>,
}

/// Runs `text` as a script. Query answers go to `out`, warnings and
/// mismatches to `err`. Without `n` the vertex range is one past the largest
/// vertex mentioned.
pub fn replay(
    text: &str,
    mode: Mode,
    n: Option<usize>,
    k: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<ReplayReport, CliError> {
    let lines = parse_script(text)?;
    let n = n.unwrap_or_else(|| {
        lines
            .iter()
            .filter_map(|l| match l.op {
                Op::Add(u, v) | Op::Del(u, v) => Some(u.max(v) as usize + 1),
                Op::Query(_) => None,
            })
            .max()
            .unwrap_or(0)
    });
    let mut s = Session::new(mode, n, k)?;
    let mut rep = ReplayReport::default();
    for l in &lines {
        let at = |e: CliError| match e {
            CliError::Graph(g) => CliError::Parse { line: l.no, msg: g.to_string() },
            e => e,
        };
        match l.op {
            Op::Add(u, v) => match s.add(u, v).map_err(at)? {
                Applied::Done => {}
                Applied::Skipped => {
                    rep.warnings += 1;
                    writeln!(err, "line {}: warning: edge {u} {v} already present", l.no)?;
                }
                Applied::Rejected => {
                    writeln!(err, "line {}: add {u} {v} rejected, treedepth would exceed {k}", l.no)?;
                }
            },
            Op::Del(u, v) => {
                if s.del(u, v).map_err(at)? == Applied::Skipped {
                    rep.warnings += 1;
                    writeln!(err, "line {}: warning: edge {u} {v} absent", l.no)?;
                }
            }
            Op::Query(want) => {
                rep.queries += 1;
                let got = s.answer();
                writeln!(out, "{got}")?;
                if let Some(want) = want {
                    if want != got {
                        rep.mismatches.push(l.no);
                        writeln!(err, "line {}: expected {want}, got {got}", l.no)?;
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Writes every minimal obstruction for treedepth `d` on at most `max_n`
/// vertices as an edge list, one block per graph. Returns the count.
pub fn write_obstructions(d: u32, max_n: usize, w: &mut dyn Write) -> Result<usize, CliError> {
    let obs = obstructions::enumerate_min_obstructions(d, max_n)?;
    for (i, g) in obs.iter().enumerate() {
        writeln!(w, "# obstruction {i}: n={} m={}", g.n(), g.m())?;
        for (a, b) in g.edges() {
            writeln!(w, "{a} {b}")?;
        }
        writeln!(w)?;
    }
    Ok(obs.len())
}
