//! A dynamic nice partition: the edge set split into connected unions of
//! biconnected components, one k-path mug forest per part.
//!
//! All parts live in one [`Store`]; a part is a top. Every vertex has one
//! record (local copy) per part containing it, while keys stay global. The
//! edge dictionary maps each edge to the record of its deeper endpoint, which
//! is enough to reach the part (walk to the root) and either endpoint (walk
//! up until the global id matches).

use crate::dynamic::Outcome;
use crate::graph::{blocks, edge_key, EdgeDict, Graph, GraphError, Vid};
use crate::paths::{exact_in, local_core, long_in};
use crate::scheme::{KPath, SchemeError};
use crate::solver::{self, SolverConfig, SolverError};
use crate::store::{LocalForest, RecId, Store, TopId};
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("edge ({0}, {1}) already present")]
    EdgePresent(Vid, Vid),
    #[error("edge ({0}, {1}) absent")]
    EdgeAbsent(Vid, Vid),
    #[error("vertices {0} and {1} are already connected")]
    Connected(Vid, Vid),
    #[error("edge ({0}, {1}) is a bridge")]
    Bridge(Vid, Vid),
    #[error("part of edge ({0}, {1}) has more than one edge")]
    NotSingleEdge(Vid, Vid),
    #[error("edges lie in different parts")]
    DifferentParts,
    #[error("edges lie in the same part")]
    SamePart,
    #[error("edges do not share exactly one endpoint")]
    NoCommonEndpoint,
    #[error("edge does not contain vertex {0}")]
    NotIncident(Vid),
    #[error("part does not split into exactly two blocks at the shared vertex")]
    NotTwoBlocks,
    #[error("a transaction is already open")]
    Nested,
}

type Edge = (Vid, Vid);

/// One part as seen from outside: its edges and its elimination tree on
/// global ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartView {
    pub edges: Vec<Edge>,
    pub parent: Vec<(Vid, Option<Vid>)>,
}

#[derive(Debug, Clone)]
pub struct NicePartition {
    n: usize,
    store: Store<KPath>,
    lower: EdgeDict<RecId>,
    graph: Graph,
    undo: Option<Vec<(Edge, Option<RecId>)>>,
    cfg: SolverConfig,
}

fn common(e: Edge, f: Edge) -> Result<(Vid, Vid, Vid), PartitionError> {
    let (a, b) = e;
    let (c, d) = f;
    if edge_key(a, b) == edge_key(c, d) {
        return Err(PartitionError::NoCommonEndpoint);
    }
    for (v, x) in [(a, b), (b, a)] {
        if v == c {
            return Ok((v, x, d));
        }
        if v == d {
            return Ok((v, x, c));
        }
    }
    Err(PartitionError::NoCommonEndpoint)
}

impl NicePartition {
    /// Empty partition on `n` vertices with treedepth budget `d` per part,
    /// answering path queries for `k` vertices.
    pub fn new(n: usize, d: u32, k: usize) -> Result<Self, PartitionError> {
        Ok(NicePartition {
            n,
            store: Store::new(KPath::new(k)?, d),
            lower: EdgeDict::new(),
            graph: Graph::new(n),
            undo: None,
            cfg: SolverConfig {
                vertex_cap: solver::MAX_VERTICES,
                ..SolverConfig::default()
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.store.d
    }

    pub fn k(&self) -> usize {
        self.store.scheme.k()
    }

    /// All edges of all parts.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    // ---- transactions ----

    /// Starts recording changes so that [`Self::rollback`] can undo them.
    pub fn begin(&mut self) -> Result<(), PartitionError> {
        if self.undo.is_some() {
            return Err(PartitionError::Nested);
        }
        self.store.begin();
        self.undo = Some(Vec::new());
        Ok(())
    }

    pub fn commit(&mut self) {
        self.store.commit();
        self.undo = None;
    }

    pub fn rollback(&mut self) {
        self.store.rollback();
        if let Some(log) = self.undo.take() {
            for ((u, v), old) in log.into_iter().rev() {
                self.put(u, v, old);
            }
        }
    }

    fn put(&mut self, u: Vid, v: Vid, val: Option<RecId>) {
        match val {
            Some(r) => {
                self.lower.insert(u, v, r);
                self.graph.add_edge(u, v).expect("valid edge");
            }
            None => {
                self.lower.remove(u, v);
                self.graph.remove_edge(u, v).expect("valid edge");
            }
        }
    }

    fn set_lower(&mut self, u: Vid, v: Vid, val: Option<RecId>) {
        if let Some(log) = self.undo.as_mut() {
            log.push((edge_key(u, v), self.lower.get(u, v).copied()));
        }
        self.put(u, v, val);
    }

    // ---- lookups ----

    fn check(&self, v: Vid) -> Result<(), PartitionError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::OutOfRange { v, n: self.n }.into())
        }
    }

    fn lookup(&self, (u, v): Edge) -> Result<RecId, PartitionError> {
        self.check(u)?;
        self.check(v)?;
        self.lower.get(u, v).copied().ok_or(PartitionError::EdgeAbsent(u, v))
    }

    /// The part containing an edge.
    fn find(&self, e: Edge) -> Result<TopId, PartitionError> {
        Ok(self.store.top_of(self.lookup(e)?))
    }

    /// The copy of `u` in the part containing `e`.
    fn retrieve(&self, u: Vid, e: Edge) -> Result<RecId, PartitionError> {
        if e.0 != u && e.1 != u {
            return Err(PartitionError::NotIncident(u));
        }
        let mut x = self.lookup(e)?;
        while self.store.glo(x) != u {
            x = self.store.parent(x).expect("upper endpoint is an ancestor");
        }
        Ok(x)
    }

    pub fn edge(&self, u: Vid, v: Vid) -> bool {
        self.lower.contains(u, v)
    }

    /// Whether the part containing `uv` is that edge alone.
    pub fn bridge(&self, u: Vid, v: Vid) -> Result<bool, PartitionError> {
        let top = self.find((u, v))?;
        let bot = &self.store.tops[top as usize].bot;
        // A two-vertex tree is a root with one leaf child.
        let root = self.store.root(self.lookup((u, v))?);
        Ok(bot.len() == 1 && self.store.records(top).len() == 2 && self.store.recs[root as usize].height == 2)
    }

    pub fn same(&self, e: Edge, f: Edge) -> Result<bool, PartitionError> {
        Ok(self.find(e)? == self.find(f)?)
    }

    // ---- creating and destroying single-edge parts ----

    /// Adds `uv` as a new part; `u` and `v` must be in different components.
    pub fn new_part(&mut self, u: Vid, v: Vid) -> Result<(), PartitionError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        if self.graph.reachable_avoiding(u, v, &[]) {
            return Err(PartitionError::Connected(u, v));
        }
        let top = self.store.add_top();
        self.store.tops[top as usize].partial = true;
        let (a, b) = (self.store.add_rec(u), self.store.add_rec(v));
        let lf = LocalForest {
            recs: vec![a, b],
            parent: vec![None, Some(0)],
            graph: Graph::from_edges(2, &[(0, 1)]),
        };
        self.store.extend(top, &lf).expect("fresh part");
        self.set_lower(u, v, Some(b));
        Ok(())
    }

    /// Removes a part consisting of the single edge `uv`.
    pub fn destroy(&mut self, u: Vid, v: Vid) -> Result<(), PartitionError> {
        if !self.bridge(u, v)? {
            return Err(PartitionError::NotSingleEdge(u, v));
        }
        let top = self.find((u, v))?;
        let recs = self.store.records(top);
        self.store.trim(top, &recs);
        for r in recs {
            self.store.free_rec(r);
        }
        self.store.free_top(top);
        self.set_lower(u, v, None);
        Ok(())
    }

    // ---- core surgery ----

    /// Replaces the trimmed core of `top` with fresh records solving `hk`
    /// (vertices are the global ids `glo`), then refreshes the edge
    /// dictionary inside the core.
    fn install(&mut self, top: TopId, glo: &[Vid], hk: Graph, parent: Vec<Option<usize>>) {
        let recs: Vec<RecId> = glo.iter().map(|&g| self.store.add_rec(g)).collect();
        let depth: Vec<usize> = (0..recs.len())
            .map(|mut i| {
                let mut d = 0;
                while let Some(p) = parent[i] {
                    i = p;
                    d += 1;
                }
                d
            })
            .collect();
        let edges = hk.edges();
        let lf = LocalForest { recs: recs.clone(), parent, graph: hk };
        self.store.extend(top, &lf).expect("cores are attachable");
        for (a, b) in edges {
            let low = if depth[a as usize] > depth[b as usize] { a } else { b };
            self.set_lower(glo[a as usize], glo[b as usize], Some(recs[low as usize]));
        }
    }

    fn trim_and_free(&mut self, top: TopId, k: &[RecId]) {
        self.store.trim(top, k);
        for &r in k {
            self.store.free_rec(r);
        }
    }

    fn solve(&self, hk: &Graph) -> Result<Option<Vec<Option<usize>>>, PartitionError> {
        Ok(solver::solve_capped(hk, self.store.d, &self.cfg)?
            .map(|f| (0..hk.n() as Vid).map(|i| f.parent(i).map(|p| p as usize)).collect()))
    }

    /// Edge-dictionary copy of `G[K]` on the given global ids.
    fn copy(&self, glo: &[Vid]) -> Graph {
        let mut h = Graph::new(glo.len());
        for i in 0..glo.len() {
            for j in i + 1..glo.len() {
                if self.lower.contains(glo[i], glo[j]) {
                    h.add_edge(i as Vid, j as Vid).expect("distinct");
                }
            }
        }
        h
    }

    fn glo_sorted(&self, k: &[RecId]) -> Vec<Vid> {
        let mut g: Vec<Vid> = k.iter().map(|&r| self.store.glo(r)).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// Re-solves the core of one part around `a`, `b` after toggling the
    /// edge between them.
    fn edit(&mut self, top: TopId, a: RecId, b: RecId, q: usize, add: bool) -> Result<Outcome, PartitionError> {
        let k = self.store.core(top, &[a, b], q);
        let glo = self.glo_sorted(&k);
        let mut hk = self.copy(&glo);
        let pa = glo.binary_search(&self.store.glo(a)).unwrap() as Vid;
        let pb = glo.binary_search(&self.store.glo(b)).unwrap() as Vid;
        if add {
            hk.add_edge(pa, pb)?;
        } else {
            hk.remove_edge(pa, pb)?;
        }
        let Some(parent) = self.solve(&hk)? else {
            return Ok(Outcome::Rejected);
        };
        if !add {
            self.set_lower(glo[pa as usize], glo[pb as usize], None);
        }
        self.trim_and_free(top, &k);
        self.install(top, &glo, hk, parent);
        Ok(Outcome::Accepted)
    }

    /// Inserts `uv` into the part containing both `ux` and `vy`. Rejected
    /// (and nothing changes) if that part's treedepth would exceed `d`.
    pub fn np_insert(&mut self, u: Vid, v: Vid, ux: Edge, vy: Edge) -> Result<Outcome, PartitionError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        if self.edge(u, v) {
            return Err(PartitionError::EdgePresent(u, v));
        }
        let top = self.find(ux)?;
        if self.find(vy)? != top {
            return Err(PartitionError::DifferentParts);
        }
        let a = self.retrieve(u, ux)?;
        let b = self.retrieve(v, vy)?;
        let q = self.store.d as usize + 1;
        self.edit(top, a, b, q, true)
    }

    /// Removes a non-bridge edge from its part.
    pub fn np_remove(&mut self, u: Vid, v: Vid) -> Result<(), PartitionError> {
        if self.bridge(u, v)? {
            return Err(PartitionError::Bridge(u, v));
        }
        let top = self.find((u, v))?;
        let a = self.retrieve(u, (u, v))?;
        let b = self.retrieve(v, (u, v))?;
        let q = self.store.d as usize + 2;
        let out = self.edit(top, a, b, q, false)?;
        debug_assert_eq!(out, Outcome::Accepted);
        Ok(())
    }

    /// Merges the part of `vx` with the biconnected part of `vy`. Rejected
    /// (and nothing changes) if the union's treedepth exceeds `d`.
    pub fn merge(&mut self, vx: Edge, vy: Edge) -> Result<Outcome, PartitionError> {
        let (v, x, y) = common(vx, vy)?;
        let (ti, tj) = (self.find(vx)?, self.find(vy)?);
        if ti == tj {
            return Err(PartitionError::SamePart);
        }
        let (vi, xi) = (self.retrieve(v, vx)?, self.retrieve(x, vx)?);
        let (vj, yj) = (self.retrieve(v, vy)?, self.retrieve(y, vy)?);
        let q = self.store.d as usize + 1;
        let ki = self.store.core(ti, &[vi, xi], q);
        let kj = self.store.core(tj, &[vj, yj], q);
        let mut all = ki.clone();
        all.extend(&kj);
        let glo = self.glo_sorted(&all);
        let hk = self.copy(&glo);
        let Some(parent) = self.solve(&hk)? else {
            return Ok(Outcome::Rejected);
        };
        self.trim_and_free(ti, &ki);
        self.trim_and_free(tj, &kj);
        let apps = std::mem::take(&mut self.store.top_mut(tj).apps);
        debug_assert!({
            let mut keys = FxHashSet::default();
            let ai = &self.store.tops[ti as usize].apps;
            ai.iter()
                .chain(&apps)
                .all(|&b| keys.insert((self.store.buckets[b as usize].x.clone(), self.store.buckets[b as usize].i)))
        });
        for &b in &apps {
            self.store.bucket_mut(b).top = ti;
        }
        self.store.top_mut(ti).apps.extend(apps);
        self.store.free_top(tj);
        self.install(ti, &glo, hk, parent);
        Ok(Outcome::Accepted)
    }

    /// Splits a part at the cut-vertex shared by `vx` and `vy` into the two
    /// blocks containing them. The part must consist of exactly these two
    /// blocks.
    pub fn split(&mut self, vx: Edge, vy: Edge) -> Result<(), PartitionError> {
        let (v, x, y) = common(vx, vy)?;
        let top = self.find(vx)?;
        if self.find(vy)? != top {
            return Err(PartitionError::DifferentParts);
        }
        let vh = self.retrieve(v, vx)?;
        let xh = self.retrieve(x, vx)?;
        let yh = self.retrieve(y, vy)?;
        let q = self.store.d as usize + 2;
        let k = self.store.core(top, &[vh, xh, yh], q);
        let glo = self.glo_sorted(&k);
        let hk = self.copy(&glo);
        let pos = |g: Vid| glo.binary_search(&g).unwrap() as Vid;
        let bl = blocks(&hk);
        if bl.len() != 2 {
            return Err(PartitionError::NotTwoBlocks);
        }
        let side_i = bl
            .iter()
            .position(|c| c.contains(&edge_key(pos(v), pos(x))))
            .expect("edge in core");
        if bl[1 - side_i].binary_search(&edge_key(pos(v), pos(y))).is_err() {
            return Err(PartitionError::NotTwoBlocks);
        }
        let verts = |c: &Vec<Edge>| {
            let mut s: Vec<Vid> = c.iter().flat_map(|&(a, b)| [glo[a as usize], glo[b as usize]]).collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let gi = verts(&bl[side_i]);
        let gj = verts(&bl[1 - side_i]);
        let (hi, hj) = (self.copy(&gi), self.copy(&gj));
        let pi = self.solve(&hi)?.expect("blocks of a part fit in the budget");
        let pj = self.solve(&hj)?.expect("blocks of a part fit in the budget");
        self.trim_and_free(top, &k);
        let tj = self.store.add_top();
        self.store.tops[tj as usize].partial = true;
        let apps = std::mem::take(&mut self.store.top_mut(top).apps);
        let (mut to_i, mut to_j) = (Vec::new(), Vec::new());
        for b in apps {
            let x = &self.store.buckets[b as usize].x;
            if x.iter().any(|&g| g != v && gi.binary_search(&g).is_ok()) {
                to_i.push(b);
            } else {
                to_j.push(b);
            }
        }
        for &b in &to_j {
            self.store.bucket_mut(b).top = tj;
        }
        self.store.top_mut(top).apps = to_i;
        self.store.top_mut(tj).apps = to_j;
        self.install(top, &gi, hi, pi);
        self.install(tj, &gj, hj, pj);
        Ok(())
    }

    /// Whether `x` and `y` are disconnected in the part minus `v`, where
    /// `v` is the shared endpoint of `vx` and `vy`.
    pub fn articul(&self, vx: Edge, vy: Edge) -> Result<bool, PartitionError> {
        let (v, x, y) = common(vx, vy)?;
        let top = self.find(vx)?;
        if self.find(vy)? != top {
            return Err(PartitionError::DifferentParts);
        }
        let recs = [self.retrieve(v, vx)?, self.retrieve(x, vx)?, self.retrieve(y, vy)?];
        let k = self.store.core(top, &recs, 2);
        let glo = self.glo_sorted(&k);
        let hk = self.copy(&glo);
        let pos = |g: Vid| glo.binary_search(&g).unwrap() as Vid;
        Ok(!hk.reachable_avoiding(pos(x), pos(y), &[pos(v)]))
    }

    fn endpoints(&self, u: Vid, v: Vid, ux: Edge, vy: Edge) -> Result<(TopId, RecId, RecId), PartitionError> {
        let top = self.find(ux)?;
        if self.find(vy)? != top {
            return Err(PartitionError::DifferentParts);
        }
        Ok((top, self.retrieve(u, ux)?, self.retrieve(v, vy)?))
    }

    /// Whether the part containing `ux` and `vy` has a simple `u`-`v` path
    /// on at least `k` vertices.
    pub fn pathlb(&self, u: Vid, v: Vid, ux: Edge, vy: Edge) -> Result<bool, PartitionError> {
        let (top, a, b) = self.endpoints(u, v, ux, vy)?;
        let (_, g, pa, pb) = local_core(&self.store, top, a, b).expect("one tree per part");
        Ok(long_in(&g, pa, pb, self.k()))
    }

    /// A simple `u`-`v` path on exactly `i` vertices inside the part
    /// containing `ux` and `vy`.
    pub fn pathub(&self, i: usize, u: Vid, v: Vid, ux: Edge, vy: Edge) -> Result<Option<Vec<Vid>>, PartitionError> {
        let (top, a, b) = self.endpoints(u, v, ux, vy)?;
        let (recs, g, pa, pb) = local_core(&self.store, top, a, b).expect("one tree per part");
        Ok(exact_in(&g, pa, pb, i).map(|p| p.into_iter().map(|x| self.store.glo(recs[x as usize])).collect()))
    }

    // ---- inspection ----

    /// Every part, ordered by smallest edge.
    pub fn parts(&self) -> Vec<PartView> {
        let mut by_top: FxHashMap<TopId, Vec<Edge>> = FxHashMap::default();
        for (&(u, v), &r) in self.lower.iter() {
            by_top.entry(self.store.top_of(r)).or_default().push((u, v));
        }
        let mut out: Vec<PartView> = by_top
            .into_iter()
            .map(|(top, mut edges)| {
                edges.sort_unstable();
                let mut parent: Vec<(Vid, Option<Vid>)> = self
                    .store
                    .parents(top)
                    .into_iter()
                    .map(|(r, p)| (self.store.glo(r), p.map(|p| self.store.glo(p))))
                    .collect();
                parent.sort_unstable();
                PartView { edges, parent }
            })
            .collect();
        out.sort_by(|a, b| a.edges.cmp(&b.edges));
        out
    }

    /// Number of live parts.
    pub fn part_count(&self) -> usize {
        self.store.tops.iter().filter(|t| t.alive).count()
    }

    /// Checks that every dictionary entry names the deeper endpoint and that
    /// every part carries one tree with one copy per vertex.
    pub fn check_dictionary(&self) -> bool {
        let tops: FxHashSet<TopId> = self.lower.iter().map(|(_, &r)| self.store.top_of(r)).collect();
        if tops.len() != self.part_count() {
            return false;
        }
        for (&(u, v), &r) in self.lower.iter() {
            let g = self.store.glo(r);
            if g != u && g != v {
                return false;
            }
            let other = if g == u { v } else { u };
            if !self.store.ancestors(r).iter().skip(1).any(|&a| self.store.glo(a) == other) {
                return false;
            }
        }
        tops.iter().all(|&t| {
            let recs = self.store.records(t);
            let glo: FxHashSet<Vid> = recs.iter().map(|&r| self.store.glo(r)).collect();
            self.store.tops[t as usize].bot.len() == 1 && glo.len() == recs.len()
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::forest::{is_recursively_optimal, ElimForest};
    use crate::oracle::{biconnected_components_bf, exact_path_bf, long_path_between_bf};

    /// The part's graph and forest on local ids `0..`.
    pub(crate) fn local(p: &PartView) -> (Vec<Vid>, Graph, ElimForest) {
        let verts: Vec<Vid> = p.parent.iter().map(|&(v, _)| v).collect();
        let pos = |g: Vid| verts.binary_search(&g).unwrap() as Vid;
        let edges: Vec<Edge> = p.edges.iter().map(|&(a, b)| (pos(a), pos(b))).collect();
        let g = Graph::from_edges(verts.len(), &edges);
        let f = ElimForest::from_parents(p.parent.iter().map(|&(_, q)| q.map(pos)).collect()).unwrap();
        (verts, g, f)
    }

    pub(crate) fn check_parts(np: &NicePartition) {
        assert!(np.check_dictionary());
        for p in np.parts() {
            let (_, g, f) = local(&p);
            assert!(is_recursively_optimal(&g, &f), "{p:?}");
            assert!(f.height() <= np.d());
            assert_eq!(f.roots().len(), 1);
        }
    }

    fn triangle(np: &mut NicePartition, a: Vid, b: Vid, c: Vid) {
        np.new_part(a, b).unwrap();
        np.new_part(b, c).unwrap();
        assert_eq!(np.merge((a, b), (b, c)).unwrap(), Outcome::Accepted);
        assert_eq!(np.np_insert(a, c, (a, b), (b, c)).unwrap(), Outcome::Accepted);
    }

    #[test]
    fn single_edges() {
        let mut np = NicePartition::new(4, 3, 3).unwrap();
        np.new_part(0, 1).unwrap();
        assert!(np.edge(0, 1) && np.edge(1, 0));
        assert!(np.bridge(0, 1).unwrap());
        np.new_part(2, 3).unwrap();
        assert!(!np.same((0, 1), (2, 3)).unwrap());
        assert_eq!(np.new_part(1, 0), Err(PartitionError::Connected(1, 0)));
        np.new_part(1, 2).unwrap();
        assert_eq!(np.new_part(0, 3), Err(PartitionError::Connected(0, 3)));
        np.destroy(1, 2).unwrap();
        np.destroy(2, 3).unwrap();
        assert_eq!(np.part_count(), 1);
        np.destroy(0, 1).unwrap();
        assert_eq!(np.part_count(), 0);
        assert!(np.parts().is_empty());
        check_parts(&np);
    }

    #[test]
    fn triangle_part() {
        let mut np = NicePartition::new(3, 3, 3).unwrap();
        triangle(&mut np, 0, 1, 2);
        assert_eq!(np.part_count(), 1);
        assert!(np.same((0, 1), (0, 2)).unwrap());
        assert!(!np.bridge(0, 1).unwrap());
        assert_eq!(np.destroy(0, 2), Err(PartitionError::NotSingleEdge(0, 2)));
        assert!(!np.articul((1, 0), (1, 2)).unwrap());
        assert!(np.pathlb(0, 1, (0, 2), (1, 2)).unwrap());
        assert_eq!(np.pathub(2, 0, 1, (0, 1), (0, 1)).unwrap(), Some(vec![0, 1]));
        assert_eq!(np.pathub(3, 0, 1, (0, 1), (0, 1)).unwrap(), Some(vec![0, 2, 1]));
        check_parts(&np);
        np.np_remove(0, 2).unwrap();
        assert_eq!(np.np_remove(0, 2), Err(PartitionError::EdgeAbsent(0, 2)));
        check_parts(&np);
    }

    #[test]
    fn bowtie_merge_and_split() {
        let mut np = NicePartition::new(5, 3, 5).unwrap();
        triangle(&mut np, 0, 1, 2);
        triangle(&mut np, 2, 3, 4);
        let before = np.parts();
        assert_eq!(before.len(), 2);
        assert_eq!(np.merge((2, 0), (2, 3)).unwrap(), Outcome::Accepted);
        assert_eq!(np.part_count(), 1);
        check_parts(&np);
        assert!(np.same((0, 1), (3, 4)).unwrap());
        assert!(np.articul((2, 0), (2, 3)).unwrap());
        assert!(!np.articul((2, 0), (2, 1)).unwrap());
        assert!(np.pathlb(0, 4, (0, 1), (3, 4)).unwrap());
        assert!(long_path_between_bf(np.graph(), 0, 4, 5));
        np.split((2, 0), (2, 3)).unwrap();
        check_parts(&np);
        assert_eq!(np.parts().iter().map(|p| p.edges.clone()).collect::<Vec<_>>(), before.iter().map(|p| p.edges.clone()).collect::<Vec<_>>());
        assert!(!np.same((0, 1), (3, 4)).unwrap());
        assert_eq!(np.parts().iter().map(|p| p.edges.clone()).collect::<Vec<_>>(), biconnected_components_bf(np.graph()));
    }

    #[test]
    fn merge_over_budget_changes_nothing() {
        // A K4 with a pendant edge: td 4 fits d = 4, but a second K4 on
        // the pendant end is fine too (the shared vertex splits them).
        let mut np = NicePartition::new(8, 4, 3).unwrap();
        let build = |np: &mut NicePartition, [a, b, c, w]: [Vid; 4]| {
            triangle(np, a, b, c);
            np.new_part(c, w).unwrap();
            assert_eq!(np.merge((c, a), (c, w)).unwrap(), Outcome::Accepted);
            assert_eq!(np.np_insert(a, w, (a, b), (c, w)).unwrap(), Outcome::Accepted);
            assert_eq!(np.np_insert(b, w, (a, b), (c, w)).unwrap(), Outcome::Accepted);
        };
        build(&mut np, [0, 1, 2, 3]);
        build(&mut np, [4, 5, 6, 3]);
        assert_eq!(np.merge((3, 0), (3, 4)).unwrap(), Outcome::Accepted);
        check_parts(&np);
        // P3 plus a pendant edge is P4, of treedepth 3 > 2.
        let mut np = NicePartition::new(4, 2, 3).unwrap();
        np.new_part(0, 1).unwrap();
        np.new_part(1, 2).unwrap();
        np.new_part(2, 3).unwrap();
        assert_eq!(np.merge((0, 1), (1, 2)).unwrap(), Outcome::Accepted);
        let before = np.parts();
        assert_eq!(np.merge((1, 2), (2, 3)).unwrap(), Outcome::Rejected);
        assert_eq!(np.parts(), before);
        // Completing K4 inside one part exceeds d = 3.
        let mut small = NicePartition::new(4, 3, 3).unwrap();
        triangle(&mut small, 0, 1, 2);
        small.new_part(2, 3).unwrap();
        small.merge((1, 2), (2, 3)).unwrap();
        assert_eq!(small.np_insert(0, 3, (0, 1), (2, 3)).unwrap(), Outcome::Accepted);
        let snap = small.parts();
        assert_eq!(small.np_insert(1, 3, (0, 1), (2, 3)).unwrap(), Outcome::Rejected);
        assert_eq!(small.parts(), snap);
    }

    #[test]
    fn rollback_restores_parts() {
        let mut np = NicePartition::new(5, 3, 5).unwrap();
        triangle(&mut np, 0, 1, 2);
        np.new_part(2, 3).unwrap();
        np.new_part(3, 4).unwrap();
        let before = np.parts();
        np.begin().unwrap();
        np.merge((1, 2), (2, 3)).unwrap();
        np.merge((2, 3), (3, 4)).unwrap();
        np.np_insert(0, 4, (0, 1), (3, 4)).unwrap();
        assert_eq!(np.part_count(), 1);
        np.rollback();
        assert_eq!(np.parts(), before);
        check_parts(&np);
        // The structure keeps working after a rollback.
        np.begin().unwrap();
        np.merge((1, 2), (2, 3)).unwrap();
        np.commit();
        check_parts(&np);
    }

    #[test]
    fn cycle_part_queries() {
        let mut np = NicePartition::new(5, 4, 5).unwrap();
        for i in 0..4 {
            np.new_part(i, i + 1).unwrap();
        }
        for i in 0..3 {
            np.merge((i, i + 1), (i + 1, i + 2)).unwrap();
        }
        np.np_insert(4, 0, (3, 4), (0, 1)).unwrap();
        check_parts(&np);
        let g = np.graph().clone();
        for u in 0..5 {
            for v in 0..5 {
                if u == v {
                    continue;
                }
                let eu = *g.neighbors(u).first().map(|&w| (u, w)).as_ref().unwrap();
                let ev = (v, g.neighbors(v)[0]);
                assert_eq!(np.pathlb(u, v, eu, ev).unwrap(), long_path_between_bf(&g, u, v, 5));
                for i in 1..=5 {
                    assert_eq!(np.pathub(i, u, v, eu, ev).unwrap().is_some(), exact_path_bf(&g, u, v, i).is_some());
                }
            }
        }
        assert!(np.pathlb(0, 1, (0, 1), (0, 1)).unwrap());
    }
}
