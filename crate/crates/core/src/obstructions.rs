//! Minimal obstructions for treedepth: graphs of treedepth above `d` all of
//! whose proper induced subgraphs have treedepth at most `d`.

use crate::graph::{Graph, GraphError, Vid};
use crate::oracle::{self, OracleError};
use crate::solver::{self, SolverError};
use rustc_hash::FxHashSet;
use thiserror::Error;

/// Largest vertex count handled by the canonical form and the enumeration.
pub const MAX_CANON: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("enumeration supports d <= 2 and max_n <= 10, got d = {d}, max_n = {max_n}")]
    Cap { d: u32, max_n: usize },
    #[error("canonical form supports at most {MAX_CANON} vertices, got {0}")]
    TooLarge(usize),
}

/// Whether `g` has treedepth above `d` while every `g - v` has treedepth at
/// most `d`. Uses the brute-force oracle.
pub fn is_minimal_obstruction(g: &Graph, d: u32) -> Result<bool, ObstructionError> {
    if oracle::treedepth_at_most_bf(g, d)? {
        return Ok(false);
    }
    for v in 0..g.n() as Vid {
        let rest: Vec<Vid> = (0..g.n() as Vid).filter(|&w| w != v).collect();
        if !oracle::treedepth_at_most_bf(&g.induced(&rest), d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Upper bound on the vertex count of a minimal obstruction for treedepth
/// `d`, as a geometric sum of core sizes. `None` on overflow.
pub fn obstruction_vertex_bound(d: u32) -> Option<u128> {
    let e = d as u128 + 1;
    let r = e.checked_mul(e.checked_mul(e)?.checked_add(1)?)?;
    let num = r.checked_pow(d + 1)?.checked_sub(1)?;
    e.checked_mul(num / (r - 1))
}

/// Upper-triangle adjacency bits, column by column, of `g` under `order`
/// (position `i` holds vertex `order[i]`).
fn bits(g: &Graph, order: &[Vid]) -> u64 {
    let mut out = 0u64;
    let mut at = 0;
    for j in 1..order.len() {
        for i in 0..j {
            if g.has_edge(order[i], order[j]) {
                out |= 1 << at;
            }
            at += 1;
        }
    }
    out.reverse_bits()
}

/// Colour refinement: splits cells by neighbour counts into the other
/// cells until stable. Cells keep their relative order, so the result is
/// isomorphism invariant.
fn refine(g: &Graph, mut cells: Vec<Vec<Vid>>) -> Vec<Vec<Vid>> {
    loop {
        let n = g.n();
        let mut cell_of = vec![0usize; n];
        for (c, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v as usize] = c;
            }
        }
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let sig = |v: Vid| {
                let mut s = vec![0u32; cells.len()];
                for &w in g.neighbors(v) {
                    s[cell_of[w as usize]] += 1;
                }
                s
            };
            let mut keyed: Vec<(Vec<u32>, Vid)> = cell.iter().map(|&v| (sig(v), v)).collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|x| x.1).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

/// `u` and `w` have the same neighbours apart from each other, so swapping
/// them is an automorphism.
fn twins(g: &Graph, u: Vid, w: Vid) -> bool {
    let a = g.neighbors(u).iter().filter(|&&x| x != w);
    let b = g.neighbors(w).iter().filter(|&&x| x != u);
    a.eq(b)
}

fn search(g: &Graph, cells: Vec<Vec<Vid>>, best: &mut Option<u64>) {
    let cells = refine(g, cells);
    let Some(pos) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<Vid> = cells.iter().map(|c| c[0]).collect();
        let b = bits(g, &order);
        if best.is_none_or(|x| b < x) {
            *best = Some(b);
        }
        return;
    };
    let cell = &cells[pos];
    let mut tried: Vec<Vid> = Vec::new();
    for &v in cell {
        if tried.iter().any(|&t| twins(g, t, v)) {
            continue;
        }
        tried.push(v);
        let mut next = cells[..pos].to_vec();
        next.push(vec![v]);
        next.push(cell.iter().copied().filter(|&w| w != v).collect());
        next.extend(cells[pos + 1..].iter().cloned());
        search(g, next, best);
    }
}

/// Canonical form of a graph with at most [`MAX_CANON`] vertices: equal for
/// two graphs exactly when they are isomorphic.
///
/// The minimum adjacency bitstring over the orderings reached by
/// individualisation and colour refinement, skipping twins.
pub fn canonical_form(g: &Graph) -> Result<(usize, u64), ObstructionError> {
    let n = g.n();
    if n > MAX_CANON {
        return Err(ObstructionError::TooLarge(n));
    }
    let mut best = None;
    let start = if n == 0 { Vec::new() } else { vec![(0..n as Vid).collect()] };
    search(g, start, &mut best);
    Ok((n, best.unwrap_or(0)))
}

/// The graph a canonical form stands for.
pub fn from_canonical((n, code): (usize, u64)) -> Graph {
    let code = code.reverse_bits();
    let mut g = Graph::new(n);
    let mut at = 0;
    for j in 1..n {
        for i in 0..j {
            if code >> at & 1 == 1 {
                g.add_edge(i as Vid, j as Vid).unwrap();
            }
            at += 1;
        }
    }
    g
}

/// All minimal obstructions for treedepth `d` on at most `max_n` vertices,
/// one per isomorphism class, in canonical labelling, ordered by vertex
/// count and then canonical code.
///
/// Removing any vertex from a minimal obstruction leaves a graph of
/// treedepth at most `d`, so every obstruction on `n` vertices arises from
/// such a graph on `n - 1` vertices plus one new vertex. Those graphs are
/// themselves grown one vertex at a time, since treedepth is monotone under
/// taking induced subgraphs.
pub fn enumerate_min_obstructions(d: u32, max_n: usize) -> Result<Vec<Graph>, ObstructionError> {
    if d > 2 || max_n > 10 {
        return Err(ObstructionError::Cap { d, max_n });
    }
    let mut level: Vec<(usize, u64)> = vec![(0, 0)];
    let mut found: Vec<(usize, u64)> = Vec::new();
    for n in 1..=max_n {
        let mut next: FxHashSet<(usize, u64)> = FxHashSet::default();
        let mut obs: FxHashSet<(usize, u64)> = FxHashSet::default();
        for &code in &level {
            let h = from_canonical(code);
            for mask in 0u32..1 << (n - 1) {
                let mut g = Graph::new(n);
                for (a, b) in h.edges() {
                    g.add_edge(a, b)?;
                }
                for w in 0..n - 1 {
                    if mask >> w & 1 == 1 {
                        g.add_edge(w as Vid, (n - 1) as Vid)?;
                    }
                }
                if solver::treedepth(&g)? <= d {
                    next.insert(canonical_form(&g)?);
                } else if minimal_by_solver(&g, d)? {
                    obs.insert(canonical_form(&g)?);
                }
            }
        }
        let mut obs: Vec<_> = obs.into_iter().collect();
        obs.sort_unstable();
        found.extend(obs);
        level = next.into_iter().collect();
        level.sort_unstable();
    }
    Ok(found.into_iter().map(from_canonical).collect())
}

fn minimal_by_solver(g: &Graph, d: u32) -> Result<bool, ObstructionError> {
    for v in 0..g.n() as Vid {
        let rest: Vec<Vid> = (0..g.n() as Vid).filter(|&w| w != v).collect();
        if solver::treedepth(&g.induced(&rest))? > d {
            return Ok(false);
        }
    }
    Ok(true)
}
