//! Brute-force reference implementations.
//!
//! Nothing in here is used by the dynamic structures; tests compare the
//! structures against these functions.

use crate::graph::{Graph, Vid};
use rustc_hash::FxHashMap;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("component with {0} vertices exceeds the oracle cap of 64")]
    TooLarge(usize),
    #[error("fragment with {0} vertices exceeds the cap of 8")]
    FragmentTooLarge(usize),
}

/// Boundary marker standing for the path start.
pub const SRC: Vid = u32::MAX - 1;
/// Boundary marker standing for the path end.
pub const SNK: Vid = u32::MAX;
/// Length index meaning "at least k".
pub const LONG: u32 = u32::MAX;

/// Bitmask treedepth over at most 64 vertices.
struct MaskTd {
    adj: Vec<u64>,
    exact: FxHashMap<u64, u32>,
    lower: FxHashMap<u64, u32>,
}

impl MaskTd {
    fn new(adj: Vec<u64>) -> Self {
        MaskTd {
            adj,
            exact: FxHashMap::default(),
            lower: FxHashMap::default(),
        }
    }

    fn split(&self, s: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut rest = s;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & rest & !comp;
                comp |= new;
                frontier |= new;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    /// `min(td(s), cap + 1)`.
    fn solve(&mut self, s: u64, cap: u32) -> u32 {
        if s == 0 {
            return 0;
        }
        if let Some(&t) = self.exact.get(&s) {
            return t.min(cap + 1);
        }
        if let Some(&lb) = self.lower.get(&s) {
            if lb > cap {
                return cap + 1;
            }
        }
        let comps = self.split(s);
        let best = if comps.len() > 1 {
            let mut worst = 0;
            for c in comps {
                worst = worst.max(self.solve(c, cap));
                if worst > cap {
                    break;
                }
            }
            worst
        } else if s.count_ones() == 1 {
            1
        } else {
            let mut best = cap + 1;
            let mut rest = s;
            while rest != 0 && best >= 2 {
                let v = rest.trailing_zeros();
                rest &= rest - 1;
                let t = self.solve(s & !(1u64 << v), best - 2);
                if t + 1 < best {
                    best = t + 1;
                }
            }
            best
        };
        if best <= cap {
            self.exact.insert(s, best);
        } else {
            let e = self.lower.entry(s).or_insert(0);
            *e = (*e).max(cap + 1);
        }
        best.min(cap + 1)
    }

    fn exact(&mut self, s: u64) -> u32 {
        let mut c = 1;
        loop {
            let t = self.solve(s, c);
            if t <= c {
                return t;
            }
            c += 1;
        }
    }
}

/// Exact treedepth of vertex subsets of one graph, sharing one memo across
/// queries when the graph has at most 64 vertices.
pub struct SubsetTd {
    graph: Graph,
    shared: Option<MaskTd>,
}

impl SubsetTd {
    pub fn new(g: &Graph) -> Self {
        let shared = (g.n() <= 64).then(|| {
            MaskTd::new(
                (0..g.n() as Vid)
                    .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
                    .collect(),
            )
        });
        SubsetTd {
            graph: g.clone(),
            shared,
        }
    }

    /// `min(td(G[verts]), cap + 1)`, or `None` when a component of the
    /// subset is larger than 64 vertices.
    pub fn treedepth_capped(&mut self, verts: &[Vid], cap: u32) -> Option<u32> {
        match &mut self.shared {
            Some(m) => {
                let s = verts.iter().fold(0u64, |s, &v| s | 1 << v);
                Some(m.solve(s, cap))
            }
            None => {
                let h = self.graph.induced(verts);
                let mut worst = 0;
                for comp in h.components() {
                    let mut m = local_mask(&h, &comp)?;
                    let full = full_mask(comp.len());
                    worst = worst.max(m.solve(full, cap));
                }
                Some(worst.min(cap + 1))
            }
        }
    }

    /// Exact `td(G[verts])`.
    pub fn treedepth(&mut self, verts: &[Vid]) -> Option<u32> {
        match &mut self.shared {
            Some(m) => {
                let s = verts.iter().fold(0u64, |s, &v| s | 1 << v);
                Some(m.split(s).into_iter().map(|c| m.exact(c)).max().unwrap_or(0))
            }
            None => {
                let h = self.graph.induced(verts);
                treedepth_bf(&h).ok()
            }
        }
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn local_mask(g: &Graph, comp: &[Vid]) -> Option<MaskTd> {
    if comp.len() > 64 {
        return None;
    }
    let pos: FxHashMap<Vid, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Some(MaskTd::new(
        comp.iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|w| pos.get(w))
                    .fold(0u64, |m, &j| m | 1 << j)
            })
            .collect(),
    ))
}

/// Exact treedepth, component by component.
pub fn treedepth_bf(g: &Graph) -> Result<u32, OracleError> {
    let mut worst = 0;
    for comp in g.components() {
        let mut m = local_mask(g, &comp).ok_or(OracleError::TooLarge(comp.len()))?;
        worst = worst.max(m.exact(full_mask(comp.len())));
    }
    Ok(worst)
}

/// Whether `td(g) <= cap`.
pub fn treedepth_at_most_bf(g: &Graph, cap: u32) -> Result<bool, OracleError> {
    for comp in g.components() {
        let mut m = local_mask(g, &comp).ok_or(OracleError::TooLarge(comp.len()))?;
        if m.solve(full_mask(comp.len()), cap) > cap {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `g` has a simple path on `k` vertices.
pub fn has_k_path_bf(g: &Graph, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    let n = g.n();
    let mut used = vec![false; n];
    fn go(g: &Graph, v: Vid, left: usize, used: &mut [bool]) -> bool {
        if left == 0 {
            return true;
        }
        for &w in g.neighbors(v) {
            if !used[w as usize] {
                used[w as usize] = true;
                let ok = go(g, w, left - 1, used);
                used[w as usize] = false;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    for s in 0..n {
        used[s] = true;
        let ok = go(g, s as Vid, k - 1, &mut used);
        used[s] = false;
        if ok {
            return true;
        }
    }
    false
}

/// Vertex count of a longest simple cycle, 0 for forests.
pub fn longest_cycle_bf(g: &Graph) -> usize {
    let mut best = 0;
    cycles_from_blocks(g, &mut |len| {
        best = best.max(len);
        false
    });
    best
}

/// Whether some simple cycle has at least `k` vertices.
pub fn has_cycle_at_least_bf(g: &Graph, k: usize) -> bool {
    let mut found = false;
    cycles_from_blocks(g, &mut |len| {
        if len >= k {
            found = true;
        }
        found
    });
    found
}

/// Enumerates cycle lengths inside each block; `visit` returns true to stop.
fn cycles_from_blocks(g: &Graph, visit: &mut dyn FnMut(usize) -> bool) {
    for block in biconnected_components_bf(g) {
        if block.len() < 3 {
            continue;
        }
        let mut verts: Vec<Vid> = block.iter().flat_map(|&(a, b)| [a, b]).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut h = Graph::new(g.n());
        for &(a, b) in &block {
            h.add_edge(a, b).unwrap();
        }
        let mut on = vec![false; g.n()];
        for &s in &verts {
            on[s as usize] = true;
            if cycle_walk(&h, s, s, 1, &mut on, visit) {
                return;
            }
            on[s as usize] = false;
        }
    }
}

fn cycle_walk(
    h: &Graph,
    start: Vid,
    v: Vid,
    len: usize,
    on: &mut [bool],
    visit: &mut dyn FnMut(usize) -> bool,
) -> bool {
    for &w in h.neighbors(v) {
        if w == start && len >= 3 {
            if visit(len) {
                return true;
            }
        } else if w > start && !on[w as usize] {
            on[w as usize] = true;
            let stop = cycle_walk(h, start, w, len + 1, on, visit);
            on[w as usize] = false;
            if stop {
                return true;
            }
        }
    }
    false
}

/// Some simple `u`-`v` path on exactly `i` vertices.
pub fn exact_path_bf(g: &Graph, u: Vid, v: Vid, i: usize) -> Option<Vec<Vid>> {
    if i == 0 {
        return None;
    }
    if u == v {
        return (i == 1).then(|| vec![u]);
    }
    let mut path = vec![u];
    let mut on = vec![false; g.n()];
    on[u as usize] = true;
    fn go(g: &Graph, v: Vid, i: usize, path: &mut Vec<Vid>, on: &mut [bool]) -> bool {
        let last = *path.last().unwrap();
        if path.len() == i {
            return last == v;
        }
        if last == v {
            return false;
        }
        for &w in g.neighbors(last) {
            if !on[w as usize] {
                on[w as usize] = true;
                path.push(w);
                if go(g, v, i, path, on) {
                    return true;
                }
                path.pop();
                on[w as usize] = false;
            }
        }
        false
    }
    go(g, v, i, &mut path, &mut on).then_some(path)
}

/// Whether some simple `u`-`v` path has at least `k` vertices.
pub fn long_path_between_bf(g: &Graph, u: Vid, v: Vid, k: usize) -> bool {
    if u == v {
        return k <= 1;
    }
    let mut on = vec![false; g.n()];
    on[u as usize] = true;
    fn go(g: &Graph, x: Vid, v: Vid, len: usize, k: usize, on: &mut [bool]) -> bool {
        for &w in g.neighbors(x) {
            if w == v {
                if len + 1 >= k {
                    return true;
                }
            } else if !on[w as usize] {
                on[w as usize] = true;
                let ok = go(g, w, v, len + 1, k, on);
                on[w as usize] = false;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    go(g, u, v, 1, k, &mut on)
}

/// Edge classes of the biconnected components, by a lowpoint DFS.
/// Classes are sorted and ordered by smallest edge.
pub fn biconnected_components_bf(g: &Graph) -> Vec<Vec<(Vid, Vid)>> {
    struct St<'a> {
        g: &'a Graph,
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(Vid, Vid)>,
        out: Vec<Vec<(Vid, Vid)>>,
    }
    fn dfs(st: &mut St, v: Vid, parent: Option<Vid>) {
        st.time += 1;
        st.disc[v as usize] = st.time;
        st.low[v as usize] = st.time;
        for &w in st.g.neighbors(v) {
            if Some(w) == parent {
                continue;
            }
            if st.disc[w as usize] == 0 {
                st.stack.push((v, w));
                dfs(st, w, Some(v));
                st.low[v as usize] = st.low[v as usize].min(st.low[w as usize]);
                if st.low[w as usize] >= st.disc[v as usize] {
                    let mut comp = Vec::new();
                    while let Some(e) = st.stack.pop() {
                        let done = e == (v, w);
                        comp.push(if e.0 < e.1 { e } else { (e.1, e.0) });
                        if done {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    st.out.push(comp);
                }
            } else if st.disc[w as usize] < st.disc[v as usize] {
                st.stack.push((v, w));
                st.low[v as usize] = st.low[v as usize].min(st.disc[w as usize]);
            }
        }
    }
    let n = g.n();
    let mut st = St {
        g,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if st.disc[v] == 0 {
            dfs(&mut st, v as Vid, None);
        }
    }
    let mut out = st.out;
    out.sort();
    out
}

/// A graph fragment with a boundary.
#[derive(Debug, Clone)]
pub struct BoundariedGraph {
    pub vertices: Vec<Vid>,
    pub edges: Vec<(Vid, Vid)>,
    pub boundary: Vec<Vid>,
}

/// Configuration as `(sorted canonical edge list, length index)`; the edge
/// list uses [`SRC`] and [`SNK`] for the two markers and the index
/// [`LONG`] for "at least k".
pub type RawConf = (Vec<(Vid, Vid)>, u32);

/// All configurations realized by `bg` for the k-path property, found by
/// trying every linear forest on the boundary plus markers and searching
/// for a family of paths in the fragment that matches it.
pub fn conf_bf(bg: &BoundariedGraph, k: usize) -> Result<BTreeSet<RawConf>, OracleError> {
    if bg.vertices.len() > 8 {
        return Err(OracleError::FragmentTooLarge(bg.vertices.len()));
    }
    let mut g_adj: FxHashMap<Vid, Vec<Vid>> = bg.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in &bg.edges {
        g_adj.get_mut(&a).unwrap().push(b);
        g_adj.get_mut(&b).unwrap().push(a);
    }
    let mut nodes: Vec<Vid> = bg.boundary.clone();
    nodes.sort_unstable();
    nodes.push(SRC);
    nodes.push(SNK);
    let mut pairs = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            pairs.push((nodes[i], nodes[j]));
        }
    }
    let mut out = BTreeSet::new();
    let mut chosen = Vec::new();
    forests(&pairs, 0, &mut chosen, &mut |h: &[(Vid, Vid)]| {
        if h.is_empty() {
            out.insert((Vec::new(), 0));
            return;
        }
        let mut totals = BTreeSet::new();
        let mut used: Vec<Vid> = Vec::new();
        realize(bg, &g_adj, h, 0, 0, k, &mut used, &mut totals);
        for t in totals {
            out.insert((h.to_vec(), t));
        }
    });
    Ok(out)
}

type EdgeSink<'a> = &'a mut dyn FnMut(&[(Vid, Vid)]);

fn forests(pairs: &[(Vid, Vid)], i: usize, chosen: &mut Vec<(Vid, Vid)>, emit: EdgeSink<'_>) {
    if i == pairs.len() {
        emit(chosen);
        return;
    }
    forests(pairs, i + 1, chosen, emit);
    let (a, b) = pairs[i];
    chosen.push((a, b));
    if linear_forest(chosen) {
        forests(pairs, i + 1, chosen, emit);
    }
    chosen.pop();
}

fn linear_forest(edges: &[(Vid, Vid)]) -> bool {
    let mut deg: FxHashMap<Vid, usize> = FxHashMap::default();
    for &(a, b) in edges {
        *deg.entry(a).or_default() += 1;
        *deg.entry(b).or_default() += 1;
    }
    for (&v, &d) in &deg {
        let cap = if v == SRC || v == SNK { 1 } else { 2 };
        if d > cap {
            return false;
        }
    }
    // Acyclic: walk components by repeated relaxation.
    let mut comp: FxHashMap<Vid, Vid> = deg.keys().map(|&v| (v, v)).collect();
    fn root(c: &FxHashMap<Vid, Vid>, mut v: Vid) -> Vid {
        while c[&v] != v {
            v = c[&v];
        }
        v
    }
    for &(a, b) in edges {
        let (ra, rb) = (root(&comp, a), root(&comp, b));
        if ra == rb {
            return false;
        }
        comp.insert(ra, rb);
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn realize(
    bg: &BoundariedGraph,
    adj: &FxHashMap<Vid, Vec<Vid>>,
    h: &[(Vid, Vid)],
    idx: usize,
    total: usize,
    k: usize,
    used: &mut Vec<Vid>,
    totals: &mut BTreeSet<u32>,
) {
    if idx == h.len() {
        totals.insert(if total >= k { LONG } else { total as u32 });
        return;
    }
    let (a, b) = h[idx];
    let in_x = |v: Vid| bg.boundary.contains(&v);
    let starts: Vec<Vid> = if in_x(a) {
        vec![a]
    } else {
        bg.vertices
            .iter()
            .copied()
            .filter(|&v| !in_x(v) && !used.contains(&v))
            .collect()
    };
    for s in starts {
        if !in_x(s) {
            used.push(s);
        }
        let mut path = vec![s];
        extend_path(bg, adj, h, idx, total, k, b, &mut path, used, totals);
        if !in_x(s) {
            used.pop();
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_path(
    bg: &BoundariedGraph,
    adj: &FxHashMap<Vid, Vec<Vid>>,
    h: &[(Vid, Vid)],
    idx: usize,
    total: usize,
    k: usize,
    target: Vid,
    path: &mut Vec<Vid>,
    used: &mut Vec<Vid>,
    totals: &mut BTreeSet<u32>,
) {
    let in_x = |v: Vid| bg.boundary.contains(&v);
    let last = *path.last().unwrap();
    let len = path.len() - 1;
    // The path may stop here if its end matches the second endpoint of the edge.
    let may_stop = if in_x(target) {
        last == target && len >= 1
    } else {
        !in_x(last) || (path.len() == 1)
    };
    if may_stop {
        realize(bg, adj, h, idx + 1, total + len, k, used, totals);
    }
    if in_x(last) && path.len() > 1 {
        return;
    }
    for &w in &adj[&last] {
        if path.contains(&w) {
            continue;
        }
        if in_x(w) {
            if w == target {
                path.push(w);
                extend_path(bg, adj, h, idx, total, k, target, path, used, totals);
                path.pop();
            }
        } else if !used.contains(&w) {
            used.push(w);
            path.push(w);
            extend_path(bg, adj, h, idx, total, k, target, path, used, totals);
            path.pop();
            used.pop();
        }
    }
}
