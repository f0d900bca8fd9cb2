//! Treedepth under edge updates.
//!
//! Every update extracts a small core around the changed edge, re-solves the
//! core statically and splices the result back; the rest of the forest is
//! only touched through bucket renaming.

use crate::cores::CorePrefix;
use crate::forest::ElimForest;
use crate::graph::{Graph, GraphError, Vid};
use crate::scheme::{KPath, NoScheme, Scheme, SchemeError};
use crate::solver::{self, SolverConfig, SolverError};
use crate::store::{ExtendError, LocalForest, Store, TopId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
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
    #[error("operation needs a full structure, but it is partial")]
    Partial,
    #[error("operation needs a partial structure, but it is full")]
    Full,
    #[error("set is not a prefix of the encoded forest")]
    NotPrefix,
    #[error("residual forest is not attachable to the given core forest")]
    NotAttachable,
    #[error("height budget must be positive")]
    ZeroBudget,
}

/// Result of an insertion attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    /// The graph with the new edge has treedepth above the budget; nothing changed.
    Rejected,
}

/// A recursively optimal elimination forest of a dynamic graph, of height at
/// most `d`, optionally carrying configuration sets of a scheme.
#[derive(Debug, Clone)]
pub struct TdStructure<S: Scheme = NoScheme> {
    graph: Graph,
    store: Store<S>,
    top: TopId,
    cfg: SolverConfig,
}

/// The structure tracking the k-path scheme.
pub type MugStructure = TdStructure<KPath>;

impl TdStructure<NoScheme> {
    pub fn new(n: usize, d: u32) -> Result<Self, DynError> {
        Self::with_scheme(n, d, NoScheme)
    }
}

impl MugStructure {
    /// Structure for the k-path scheme with budget `d`.
    pub fn kpath(n: usize, d: u32, k: usize) -> Result<Self, DynError> {
        Self::with_scheme(n, d, KPath::new(k)?)
    }
}

impl<S: Scheme> TdStructure<S> {
    pub fn with_scheme(n: usize, d: u32, scheme: S) -> Result<Self, DynError> {
        if d == 0 {
            return Err(DynError::ZeroBudget);
        }
        let mut store = Store::new(scheme, d);
        let top = store.add_top();
        for v in 0..n as Vid {
            let r = store.add_rec(v);
            store.attach_leaf(r, top);
        }
        store.refresh_member(top);
        store.clear_touched();
        Ok(TdStructure {
            graph: Graph::new(n),
            store,
            top,
            cfg: SolverConfig {
                vertex_cap: solver::MAX_VERTICES,
                ..SolverConfig::default()
            },
        })
    }

    /// Builds the structure encoding `(g, f)`. `f` must be an elimination
    /// forest of `g` of height at most `d`.
    pub fn from_forest(g: &Graph, f: &ElimForest, d: u32, scheme: S) -> Result<Self, DynError> {
        if d == 0 {
            return Err(DynError::ZeroBudget);
        }
        let mut store = Store::new(scheme, d);
        let top = store.add_top();
        for v in 0..g.n() as Vid {
            store.add_rec(v);
        }
        store.tops[top as usize].partial = true;
        let recs: Vec<Vid> = (0..g.n() as Vid).collect();
        let parent = recs.iter().map(|&v| f.parent(v).map(|p| p as usize)).collect();
        store
            .extend(top, &LocalForest { recs, parent, graph: g.clone() })
            .map_err(|_| DynError::NotAttachable)?;
        store.clear_touched();
        Ok(TdStructure {
            graph: g.clone(),
            store,
            top,
            cfg: SolverConfig {
                vertex_cap: solver::MAX_VERTICES,
                ..SolverConfig::default()
            },
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn d(&self) -> u32 {
        self.store.d
    }

    /// The encoded graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn has_edge(&self, u: Vid, v: Vid) -> bool {
        self.graph.has_edge(u, v)
    }

    pub fn is_partial(&self) -> bool {
        self.store.tops[self.top as usize].partial
    }

    fn full(&self) -> Result<(), DynError> {
        if self.is_partial() {
            Err(DynError::Partial)
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, u: Vid, v: Vid) -> Result<(), DynError> {
        for x in [u, v] {
            if x as usize >= self.n() {
                return Err(GraphError::OutOfRange { v: x, n: self.n() }.into());
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        Ok(())
    }

    /// A `q`-core containing `anc(l)`.
    pub fn core(&self, l: &[Vid], q: usize) -> Result<CorePrefix, DynError> {
        self.full()?;
        let k = self.store.core(self.top, l, q);
        Ok(CorePrefix::new(&self.export_forest()?, k))
    }

    /// Solves `G[K]` (plus or minus one edge) and, if it fits in the budget,
    /// splices the new core forest in.
    fn update(&mut self, u: Vid, v: Vid, q: usize, add: bool) -> Result<Outcome, DynError> {
        self.store.clear_touched();
        let k = self.store.core(self.top, &[u, v], q);
        let (recs, mut hk) = self.store.induced(&k);
        let pu = recs.iter().position(|&r| r == u).expect("u in core") as Vid;
        let pv = recs.iter().position(|&r| r == v).expect("v in core") as Vid;
        if add {
            hk.add_edge(pu, pv)?;
        } else {
            hk.remove_edge(pu, pv)?;
        }
        let Some(fk) = solver::solve_capped(&hk, self.store.d, &self.cfg)? else {
            return Ok(Outcome::Rejected);
        };
        if fk.height() > self.store.d {
            return Ok(Outcome::Rejected);
        }
        if add {
            self.graph.add_edge(u, v)?;
        } else {
            self.graph.remove_edge(u, v)?;
        }
        self.store.trim(self.top, &k);
        let parent = (0..recs.len() as Vid)
            .map(|i| fk.parent(i).map(|p| p as usize))
            .collect();
        self.store
            .extend(self.top, &LocalForest { recs, parent, graph: hk })
            .expect("cores are attachable");
        Ok(Outcome::Accepted)
    }

    /// Inserts `uv` unless that pushes treedepth above `d`.
    pub fn insert(&mut self, u: Vid, v: Vid) -> Result<Outcome, DynError> {
        self.full()?;
        self.check_pair(u, v)?;
        if self.graph.has_edge(u, v) {
            return Err(DynError::EdgePresent(u, v));
        }
        let q = self.store.d as usize + 1;
        self.update(u, v, q, true)
    }

    pub fn remove(&mut self, u: Vid, v: Vid) -> Result<(), DynError> {
        self.full()?;
        self.check_pair(u, v)?;
        if !self.graph.has_edge(u, v) {
            return Err(DynError::EdgeAbsent(u, v));
        }
        let q = self.store.d as usize + 2;
        self.update(u, v, q, false).map(|_| ())
    }

    /// Enters partial mode by removing the prefix `k`.
    pub fn trim(&mut self, k: &CorePrefix) -> Result<(), DynError> {
        self.full()?;
        let f = self.export_forest()?;
        if !crate::cores::is_prefix(&f, &k.members) {
            return Err(DynError::NotPrefix);
        }
        self.store.clear_touched();
        self.store.trim(self.top, &k.members);
        Ok(())
    }

    /// Leaves partial mode. `hk` holds the edges inside `K` of the new graph,
    /// `fk` is an elimination forest over exactly the trimmed set.
    pub fn extend(&mut self, hk: &Graph, fk: &ElimForest) -> Result<(), DynError> {
        if !self.is_partial() {
            return Err(DynError::Full);
        }
        let recs = fk.vertices();
        let pos: rustc_hash::FxHashMap<Vid, usize> =
            recs.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let parent = recs.iter().map(|&r| fk.parent(r).map(|p| pos[&p])).collect();
        let local = hk.induced(&recs);
        // The graph mirror follows the edges inside K.
        for (a, b) in self.graph.edges() {
            if pos.contains_key(&a) && pos.contains_key(&b) {
                self.graph.remove_edge(a, b)?;
            }
        }
        for (a, b) in local.edges() {
            self.graph.add_edge(recs[a as usize], recs[b as usize])?;
        }
        self.store
            .extend(self.top, &LocalForest { recs, parent, graph: local })
            .map_err(|ExtendError::NotAttachable(_)| DynError::NotAttachable)
    }

    pub fn export_forest(&self) -> Result<ElimForest, DynError> {
        self.full()?;
        let mut f = ElimForest::new(self.n());
        for (r, p) in self.store.parents(self.top) {
            f.set_parent(r, p).expect("records are vertices");
        }
        Ok(f)
    }

    /// Whether `u` and `v` lie in the same tree.
    pub fn connected(&self, u: Vid, v: Vid) -> bool {
        self.store.root(u) == self.store.root(v)
    }

    /// Height of the encoded forest, which is the treedepth of the graph.
    pub fn height(&self) -> u32 {
        self.store.height(self.top)
    }

    /// Records written by the last update.
    pub fn touched(&self) -> &[Vid] {
        &self.store.touched
    }

    /// Recomputes every record key from scratch and compares with the stored
    /// bucket placement.
    pub fn check_buckets(&self) -> bool {
        let Ok(f) = self.export_forest() else {
            return false;
        };
        let sreach = f.sreach(&self.graph);
        let neiup = f.neiup(&self.graph);
        let heights = f.subtree_heights();
        (0..self.n() as Vid).all(|v| {
            let rec = &self.store.recs[v as usize];
            let b = &self.store.buckets[rec.bucket as usize];
            rec.sreach == sreach[v as usize]
                && rec.neiup == neiup[v as usize]
                && rec.height == heights[v as usize]
                && b.x == rec.sreach
                && b.i == rec.height
                && b.owner == f.parent(v)
        })
    }

    pub(crate) fn store(&self) -> &Store<S> {
        &self.store
    }

    pub(crate) fn top(&self) -> TopId {
        self.top
    }
}

impl MugStructure {
    pub fn k(&self) -> usize {
        self.store.scheme.k()
    }

    /// Whether the graph has a simple path on `k` vertices.
    pub fn member(&self) -> bool {
        self.store.tops[self.top as usize].member
    }

    /// The configuration set stored for vertex `v` (over `SReach(v)`).
    pub fn conf_of(&self, v: Vid) -> Option<&crate::scheme::ConfSet<crate::scheme::PathConf>> {
        self.store.recs.get(v as usize)?.conf.as_ref()
    }

    /// Vertices of the mugs in `v`'s children buckets, as `(config, members)`.
    pub fn mug_members(&self, v: Vid) -> Vec<(crate::scheme::PathConf, Vec<Vid>)> {
        let rec = &self.store.recs[v as usize];
        let mut out = Vec::new();
        for &b in rec.kids.values() {
            for (c, m) in &self.store.buckets[b as usize].mugs {
                out.push((c.clone(), m.iter().copied().collect()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{is_recursively_optimal, restrict_forest, validate_elim_forest};
    use crate::oracle::{has_k_path_bf, treedepth_bf};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fresh_structure() {
        let s = TdStructure::new(0, 3).unwrap();
        assert_eq!(s.height(), 0);
        let s = TdStructure::new(5, 2).unwrap();
        let f = s.export_forest().unwrap();
        assert_eq!(f.roots().len(), 5);
        assert_eq!(s.height(), 1);
        assert!(!s.connected(0, 1));
        assert!(s.connected(3, 3));
        assert_eq!(f, s.export_forest().unwrap());
        assert!(matches!(TdStructure::new(3, 0), Err(DynError::ZeroBudget)));
    }

    #[test]
    fn triangle_under_two_and_three() {
        let mut s = TdStructure::new(3, 2).unwrap();
        assert_eq!(s.insert(0, 1).unwrap(), Outcome::Accepted);
        assert_eq!(s.insert(1, 2).unwrap(), Outcome::Accepted);
        assert_eq!(s.height(), 2);
        assert!(s.connected(0, 2));
        let before = s.export_forest().unwrap();
        assert_eq!(s.insert(0, 2).unwrap(), Outcome::Rejected);
        assert_eq!(s.export_forest().unwrap(), before);
        assert_eq!(s.height(), 2);
        assert!(!s.has_edge(0, 2));

        let mut s = TdStructure::new(3, 3).unwrap();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(s.insert(a, b).unwrap(), Outcome::Accepted);
        }
        assert_eq!(s.height(), 3);
        assert!(is_recursively_optimal(s.graph(), &s.export_forest().unwrap()));
        s.remove(0, 1).unwrap();
        assert_eq!(s.height(), 2);
        s.remove(1, 2).unwrap();
        s.remove(0, 2).unwrap();
        assert_eq!(s.height(), 1);
    }

    #[test]
    fn typed_errors() {
        let mut s = TdStructure::new(3, 2).unwrap();
        s.insert(0, 1).unwrap();
        assert_eq!(s.insert(1, 0), Err(DynError::EdgePresent(1, 0)));
        assert_eq!(s.remove(1, 2), Err(DynError::EdgeAbsent(1, 2)));
        assert!(matches!(s.insert(1, 1), Err(DynError::Graph(GraphError::SelfLoop(1)))));
        assert!(matches!(s.insert(1, 9), Err(DynError::Graph(GraphError::OutOfRange { .. }))));
        let k = s.core(&[0], 3).unwrap();
        s.trim(&k).unwrap();
        assert_eq!(s.insert(1, 2), Err(DynError::Partial));
        assert!(matches!(s.export_forest(), Err(DynError::Partial)));
    }

    #[test]
    fn star_trim_puts_leaves_on_one_bucket() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let f = ElimForest::from_parents(vec![None, Some(0), Some(0), Some(0), Some(0)]).unwrap();
        let mut s = TdStructure::from_forest(&g, &f, 3, NoScheme).unwrap();
        let k = CorePrefix::new(&f, vec![0]);
        s.trim(&k).unwrap();
        let top = &s.store.tops[s.top as usize];
        assert_eq!(top.apps.len(), 1);
        let b = &s.store.buckets[top.apps[0] as usize];
        assert_eq!(b.owner, None);
        assert_eq!(b.members.len(), 4);
        let fk = restrict_forest(&f, &[0]);
        s.extend(&g, &fk).unwrap();
        assert_eq!(s.export_forest().unwrap(), f);
    }

    #[test]
    fn kpath_edge_by_edge() {
        for k in 3..7usize {
            let mut m = MugStructure::kpath(k, k as u32 - 1, k).unwrap();
            assert!(!m.member());
            for v in 1..k as Vid {
                assert_eq!(m.insert(v - 1, v).unwrap(), Outcome::Accepted);
                assert_eq!(m.member(), v as usize == k - 1, "k={k} v={v}");
            }
            m.remove(0, 1).unwrap();
            assert!(!m.member());
        }
        // td(P2) = 2 exceeds the budget d = k - 1 = 1.
        let mut m = MugStructure::kpath(2, 1, 2).unwrap();
        assert_eq!(m.insert(0, 1).unwrap(), Outcome::Rejected);
        let m = MugStructure::kpath(2, 1, 1).unwrap();
        assert!(m.member());
        let m = MugStructure::kpath(0, 1, 1).unwrap();
        assert!(!m.member());
    }

    fn session(seed: u64, n: usize, d: u32, ops: usize, k: Option<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut plain = TdStructure::new(n, d).unwrap();
        let mut mug = k.map(|k| MugStructure::kpath(n, d, k).unwrap());
        let mut shadow = Graph::new(n);
        for _ in 0..ops {
            let a = rng.gen_range(0..n as Vid);
            let b = rng.gen_range(0..n as Vid);
            if a == b {
                continue;
            }
            if shadow.has_edge(a, b) {
                plain.remove(a, b).unwrap();
                if let Some(m) = mug.as_mut() {
                    m.remove(a, b).unwrap();
                }
                shadow.remove_edge(a, b).unwrap();
            } else {
                let before = plain.export_forest().unwrap();
                let out = plain.insert(a, b).unwrap();
                if let Some(m) = mug.as_mut() {
                    assert_eq!(m.insert(a, b).unwrap(), out);
                }
                let mut with = shadow.clone();
                with.add_edge(a, b).unwrap();
                let td = treedepth_bf(&with).unwrap();
                match out {
                    Outcome::Accepted => shadow = with,
                    Outcome::Rejected => {
                        assert!(td > d);
                        assert_eq!(plain.export_forest().unwrap(), before);
                    }
                }
            }
            let f = plain.export_forest().unwrap();
            assert!(validate_elim_forest(&shadow, &f));
            assert!(is_recursively_optimal(&shadow, &f));
            assert_eq!(plain.height(), treedepth_bf(&shadow).unwrap().max(if n > 0 { 1 } else { 0 }));
            assert!(plain.check_buckets());
            if let (Some(m), Some(k)) = (mug.as_ref(), k) {
                assert_eq!(m.member(), has_k_path_bf(&shadow, k));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_sessions(seed in any::<u64>(), n in 2usize..12, d in 1u32..5) {
            session(seed, n, d, 150, None);
        }

        #[test]
        fn random_mug_sessions(seed in any::<u64>(), n in 2usize..10, k in 2usize..6) {
            session(seed, n, k as u32 - 1, 120, Some(k));
        }

        #[test]
        fn trim_extend_round_trip(seed in any::<u64>(), n in 1usize..14, q in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = Graph::new(n);
            for a in 0..n as Vid {
                for b in a + 1..n as Vid {
                    if rng.gen_bool(0.25) {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            let f = crate::solver::static_elim_forest(&g).unwrap();
            let mut s = TdStructure::from_forest(&g, &f, f.height().max(1), NoScheme).unwrap();
            prop_assert!(s.check_buckets());
            let l = [rng.gen_range(0..n as Vid)];
            let k = s.core(&l, q).unwrap();
            prop_assert!(crate::cores::verify_qcore(&g, &f, &k, q));
            s.trim(&k).unwrap();
            prop_assert!(s.touched().iter().all(|v| k.contains(*v)));
            s.extend(&g, &restrict_forest(&f, &k.members)).unwrap();
            prop_assert_eq!(s.export_forest().unwrap(), f);
            prop_assert!(s.check_buckets());
        }
    }
}
