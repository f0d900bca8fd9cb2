use crate::CliError;
use dyntd::cycle::LongCycle;
use dyntd::dynamic::{Outcome, TdStructure};
use dyntd::graph::{Graph, GraphError};
use dyntd::oracle::{has_cycle_at_least_bf, has_k_path_bf, treedepth_bf};
use dyntd::postpone::LongPath;
use dyntd::Vid;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Detect a simple path on k vertices.
    Path,
    /// Detect a cycle on at least k vertices.
    Cycle,
    /// Maintain an optimal elimination forest under the budget k.
    Td,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Path => "path",
            Mode::Cycle => "cycle",
            Mode::Td => "td",
        })
    }
}

/// What a `query` prints: membership for the detection modes, forest
/// height for `td`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Bool(bool),
    Height(u32),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Bool(b) => write!(f, "{b}"),
            Answer::Height(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Answer {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "true" => Ok(Answer::Bool(true)),
            "false" => Ok(Answer::Bool(false)),
            _ => s.parse().map(Answer::Height).map_err(|_| ()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applied {
    Done,
    /// Adding a present edge or deleting an absent one.
    Skipped,
    /// The `td` structure refused the edge.
    Rejected,
}

enum Inner {
    Path(LongPath),
    Cycle(LongCycle),
    Td(TdStructure),
}

/// One structure under test plus a shadow copy of its graph, which is
/// what the oracles read.
pub struct Session {
    mode: Mode,
    k: usize,
    inner: Inner,
    shadow: Graph,
}

impl Session {
    pub fn new(mode: Mode, n: usize, k: usize) -> Result<Self, CliError> {
        let inner = match mode {
            Mode::Path => Inner::Path(LongPath::new(n, k)?),
            Mode::Cycle => Inner::Cycle(LongCycle::new(n, k)?),
            Mode::Td => Inner::Td(TdStructure::new(n, k as u32)?),
        };
        Ok(Session { mode, k, inner, shadow: Graph::new(n) })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The edges the structure currently holds.
    pub fn graph(&self) -> &Graph {
        &self.shadow
    }

    pub fn td(&self) -> Option<&TdStructure> {
        match &self.inner {
            Inner::Td(t) => Some(t),
            _ => None,
        }
    }

    pub fn cycle(&self) -> Option<&LongCycle> {
        match &self.inner {
            Inner::Cycle(c) => Some(c),
            _ => None,
        }
    }

    pub fn path(&self) -> Option<&LongPath> {
        match &self.inner {
            Inner::Path(p) => Some(p),
            _ => None,
        }
    }

    fn check(&self, u: Vid, v: Vid) -> Result<(), GraphError> {
        for x in [u, v] {
            if x as usize >= self.shadow.n() {
                return Err(GraphError::OutOfRange { v: x, n: self.shadow.n() });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn add(&mut self, u: Vid, v: Vid) -> Result<Applied, CliError> {
        self.check(u, v)?;
        if self.shadow.has_edge(u, v) {
            return Ok(Applied::Skipped);
        }
        match &mut self.inner {
            Inner::Path(p) => p.insert(u, v)?,
            Inner::Cycle(c) => c.insert(u, v)?,
            Inner::Td(t) => {
                if t.insert(u, v)? == Outcome::Rejected {
                    return Ok(Applied::Rejected);
                }
            }
        }
        self.shadow.add_edge(u, v)?;
        Ok(Applied::Done)
    }

    pub fn del(&mut self, u: Vid, v: Vid) -> Result<Applied, CliError> {
        self.check(u, v)?;
        if !self.shadow.has_edge(u, v) {
            return Ok(Applied::Skipped);
        }
        match &mut self.inner {
            Inner::Path(p) => p.remove(u, v)?,
            Inner::Cycle(c) => c.remove(u, v)?,
            Inner::Td(t) => t.remove(u, v)?,
        }
        self.shadow.remove_edge(u, v)?;
        Ok(Applied::Done)
    }

    /// The structure's own answer.
    pub fn answer(&self) -> Answer {
        match &self.inner {
            Inner::Path(p) => Answer::Bool(p.contains()),
            Inner::Cycle(c) => Answer::Bool(c.contains()),
            Inner::Td(t) => Answer::Height(t.height()),
        }
    }

    /// The oracle's answer on the shadow graph.
    pub fn expected(&self) -> Result<Answer, CliError> {
        Ok(match self.mode {
            Mode::Path => Answer::Bool(has_k_path_bf(&self.shadow, self.k)),
            Mode::Cycle => Answer::Bool(has_cycle_at_least_bf(&self.shadow, self.k)),
            // Isolated vertices still form trees of height 1.
            Mode::Td => Answer::Height(treedepth_bf(&self.shadow)?.max((self.shadow.n() > 0) as u32)),
        })
    }
}
