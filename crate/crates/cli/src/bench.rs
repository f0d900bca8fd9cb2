use crate::session::Mode;
use crate::CliError;
use dyntd::cycle::LongCycle;
use dyntd::dynamic::TdStructure;
use dyntd::graph::Graph;
use dyntd::oracle::{has_cycle_at_least_bf, treedepth_at_most_bf};
use dyntd::postpone::LongPath;
use dyntd::Vid;
use indexmap::IndexSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::Instant;

pub const CSV_HEADER: &str = "n,mode,median_update_ns,p99_update_ns";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub mode: Mode,
    pub median_ns: u64,
    pub p99_ns: u64,
}

enum Subject {
    Path(LongPath),
    Cycle(LongCycle),
    Td(TdStructure),
}

impl Subject {
    /// Returns whether the edge is now present.
    fn insert(&mut self, u: Vid, v: Vid) -> Result<bool, CliError> {
        Ok(match self {
            Subject::Path(p) => p.insert(u, v).map(|_| true)?,
            Subject::Cycle(c) => c.insert(u, v).map(|_| true)?,
            Subject::Td(t) => t.insert(u, v)? == dyntd::dynamic::Outcome::Accepted,
        })
    }

    fn remove(&mut self, u: Vid, v: Vid) -> Result<(), CliError> {
        match self {
            Subject::Path(p) => p.remove(u, v)?,
            Subject::Cycle(c) => c.remove(u, v)?,
            Subject::Td(t) => t.remove(u, v)?,
        }
        Ok(())
    }
}

/// Vertices are grouped into blocks of this size; benchmark edges stay inside a block.
const BLOCK: usize = 8;
/// Attempts at finding an admissible insertion before falling back to a deletion.
const TRIES: usize = 64;

/// Edges confined to small vertex blocks, each block kept within the inner
/// structure's budget, so the queue stays empty and every timed update
/// reaches the inner structure. Local statistics do not depend on `n`.
struct Workload {
    mode: Mode,
    k: usize,
    n: usize,
    blocks: Vec<Graph>,
    edges: IndexSet<(Vid, Vid)>,
}

impl Workload {
    fn new(mode: Mode, n: usize, k: usize) -> Self {
        let blocks = (0..n.div_ceil(BLOCK)).map(|b| Graph::new(BLOCK.min(n - b * BLOCK))).collect();
        Workload { mode, k, n, blocks, edges: IndexSet::new() }
    }

    fn admissible(&self, h: &Graph) -> bool {
        match self.mode {
            Mode::Path => treedepth_at_most_bf(h, (self.k as u32).saturating_sub(1).max(1)).unwrap(),
            Mode::Td => treedepth_at_most_bf(h, self.k as u32).unwrap(),
            Mode::Cycle => !has_cycle_at_least_bf(h, self.k.max(3)),
        }
    }

    /// A random absent pair inside one block whose insertion keeps the block admissible.
    fn insertion(&self, rng: &mut ChaCha8Rng) -> Option<(Vid, Vid)> {
        for _ in 0..TRIES {
            let b = rng.gen_range(0..self.blocks.len());
            let g = &self.blocks[b];
            if g.n() < 2 {
                continue;
            }
            let x = rng.gen_range(0..g.n() as Vid);
            let y = rng.gen_range(0..g.n() as Vid);
            if x == y || g.has_edge(x, y) {
                continue;
            }
            let mut h = g.clone();
            h.add_edge(x, y).unwrap();
            if self.admissible(&h) {
                let base = (b * BLOCK) as Vid;
                return Some((base + x.min(y), base + x.max(y)));
            }
        }
        None
    }

    fn toggle(&mut self, a: Vid, b: Vid, on: bool) {
        let blk = a as usize / BLOCK;
        let base = (blk * BLOCK) as Vid;
        let g = &mut self.blocks[blk];
        if on {
            g.add_edge(a - base, b - base).unwrap();
            self.edges.insert((a, b));
        } else {
            g.remove_edge(a - base, b - base).unwrap();
            self.edges.swap_remove(&(a, b));
        }
    }

    /// Deletes with probability `m / (m + n / 4)`, so the edge count hovers
    /// around `n / 4`.
    fn next(&self, rng: &mut ChaCha8Rng) -> Option<(bool, Vid, Vid)> {
        let m = self.edges.len();
        if m == 0 || !rng.gen_bool(m as f64 / (m + self.n / 4) as f64) {
            if let Some((a, b)) = self.insertion(rng) {
                return Some((true, a, b));
            }
        }
        if m == 0 {
            return None;
        }
        let (a, b) = self.edges[rng.gen_range(0..m)];
        Some((false, a, b))
    }
}

/// Per-update latency at each `n`. The workload first inserts about
/// `n / 4` block-local edges untimed, then times `ops` further updates
/// drawn the same way.
pub fn bench(mode: Mode, ns: &[usize], k: usize, ops: usize, seed: u64) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        let mut s = match mode {
            Mode::Path => Subject::Path(LongPath::new(n, k)?),
            Mode::Cycle => Subject::Cycle(LongCycle::new(n, k)?),
            Mode::Td => Subject::Td(TdStructure::new(n, k as u32)?),
        };
        let mut w = Workload::new(mode, n, k);
        for _ in 0..n / 4 {
            let Some((a, b)) = w.insertion(&mut rng) else { break };
            if s.insert(a, b)? {
                w.toggle(a, b, true);
            }
        }
        let mut times = Vec::with_capacity(ops);
        for _ in 0..ops {
            let Some((ins, a, b)) = w.next(&mut rng) else { break };
            let t = Instant::now();
            let kept = if ins { s.insert(a, b)? } else { s.remove(a, b).map(|_| false)? };
            times.push(t.elapsed().as_nanos() as u64);
            if ins && kept {
                w.toggle(a, b, true);
            } else if !ins {
                w.toggle(a, b, false);
            }
        }
        times.sort_unstable();
        let at = |q: f64| {
            let i = ((times.len() as f64 * q) as usize).min(times.len().saturating_sub(1));
            times.get(i).copied().unwrap_or(0)
        };
        rows.push(BenchRow { n, mode, median_ns: at(0.5), p99_ns: at(0.99) });
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, r.mode, r.median_ns, r.p99_ns)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let rows = bench(Mode::Path, &[50, 200], 4, 300, 1).unwrap();
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,mode,median_update_ns,p99_update_ns");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("50,path,"));
        for r in &rows {
            assert!(r.median_ns <= r.p99_ns);
        }
        for mode in [Mode::Cycle, Mode::Td] {
            assert_eq!(bench(mode, &[60], 3, 200, 2).unwrap().len(), 1);
        }
    }
}
