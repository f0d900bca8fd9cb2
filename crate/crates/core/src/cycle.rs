//! Fully dynamic detection of a simple cycle on at least `k` vertices.
//!
//! The inner detector keeps a spanning forest of the graph and a nice
//! partition into biconnected components with treedepth budget `k²`. It
//! refuses any insertion that would close a long cycle; the postponing
//! wrapper turns refusals into a strong answer.

use crate::dynamic::{DynError, Outcome};
use crate::graph::{edge_key, GraphError, Vid};
use crate::linkcut::DynForest;
use crate::partition::{NicePartition, PartitionError};
use crate::postpone::{Postponed, WeakMembership};

/// Maintains a graph with no simple cycle on `k` or more vertices.
#[derive(Debug, Clone)]
pub struct CycleDetector {
    k: usize,
    forest: DynForest,
    np: NicePartition,
}

impl CycleDetector {
    /// Simple cycles have at least three vertices, so any `k < 3` behaves
    /// like `k = 3`.
    pub fn new(n: usize, k: usize) -> Result<Self, PartitionError> {
        let k = k.max(3);
        let d = (k * k) as u32;
        Ok(CycleDetector {
            k,
            forest: DynForest::new(n),
            np: NicePartition::new(n, d, k)?,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn partition(&self) -> &NicePartition {
        &self.np
    }

    pub fn forest(&self) -> &DynForest {
        &self.forest
    }

    pub fn has_edge(&self, u: Vid, v: Vid) -> bool {
        self.np.edge(u, v)
    }

    /// Adds `uv` unless it closes a cycle on at least `k` vertices; a
    /// refusal leaves everything unchanged.
    pub fn insert(&mut self, u: Vid, v: Vid) -> Result<Outcome, PartitionError> {
        if self.np.edge(u, v) {
            return Ok(Outcome::Accepted);
        }
        let p = match self.forest.pathlen(u, v).map_err(|_| GraphError::OutOfRange {
            v: u.max(v),
            n: self.np.n(),
        })? {
            None => {
                self.np.new_part(u, v)?;
                self.forest.link(u, v).expect("checked range");
                return Ok(Outcome::Accepted);
            }
            Some(0) => return Err(GraphError::SelfLoop(u).into()),
            Some(p) => p,
        };
        // p tree edges plus uv close a cycle on p + 1 vertices.
        if p + 1 >= self.k {
            return Ok(Outcome::Rejected);
        }
        let pi = self.forest.path(u, v).expect("checked range").expect("connected");
        self.np.begin()?;
        match self.close(u, v, &pi) {
            Ok(Outcome::Accepted) => {
                self.np.commit();
                Ok(Outcome::Accepted)
            }
            Ok(Outcome::Rejected) => {
                self.np.rollback();
                Ok(Outcome::Rejected)
            }
            Err(e) => {
                self.np.rollback();
                Err(e)
            }
        }
    }

    fn close(&mut self, u: Vid, v: Vid, pi: &[(Vid, Vid)]) -> Result<Outcome, PartitionError> {
        for w in pi.windows(2) {
            if !self.np.same(w[0], w[1])? && self.np.merge(w[0], w[1])? == Outcome::Rejected {
                return Ok(Outcome::Rejected);
            }
        }
        let (first, last) = (pi[0], pi[pi.len() - 1]);
        if self.np.pathlb(u, v, first, last)? {
            return Ok(Outcome::Rejected);
        }
        self.np.np_insert(u, v, first, last)
    }

    /// Removes `uv`; removing an absent edge does nothing.
    pub fn remove(&mut self, u: Vid, v: Vid) -> Result<(), PartitionError> {
        if !self.np.edge(u, v) {
            return Ok(());
        }
        if self.np.bridge(u, v)? {
            self.np.destroy(u, v)?;
            self.forest.cut(u, v).expect("bridges are forest edges");
            return Ok(());
        }
        let path = (3..self.k)
            .find_map(|p| self.np.pathub(p, u, v, (u, v), (u, v)).transpose())
            .transpose()?
            .expect("a non-bridge edge lies on a short cycle");
        let pi: Vec<(Vid, Vid)> = path.windows(2).map(|w| (w[0], w[1])).collect();
        self.np.np_remove(u, v)?;
        if self.forest.has_edge(u, v) {
            self.forest.cut(u, v).expect("forest edge");
            for &(a, b) in &pi {
                if self.forest.link(a, b).expect("in range") {
                    break;
                }
            }
        }
        let last = pi[pi.len() - 1];
        for w in pi.windows(2) {
            if !self.np.articul(w[0], w[1])? {
                continue;
            }
            let y = w[0].1;
            let temp = !self.np.edge(y, v);
            if temp {
                let out = self.np.np_insert(y, v, w[0], last)?;
                debug_assert_eq!(out, Outcome::Accepted, "a minor of a block fits the budget");
            }
            self.np.split(w[0], w[1])?;
            if temp {
                self.np.np_remove(y, v)?;
            }
        }
        Ok(())
    }
}

impl WeakMembership for CycleDetector {
    type Elem = (Vid, Vid);

    fn try_insert(&mut self, &(u, v): &(Vid, Vid)) -> bool {
        self.insert(u, v).expect("valid edge") == Outcome::Accepted
    }

    fn remove(&mut self, &(u, v): &(Vid, Vid)) {
        CycleDetector::remove(self, u, v).expect("valid edge")
    }

    fn verdict(&self) -> bool {
        true
    }
}

/// Fully dynamic detection of a simple cycle on at least `k` vertices.
pub struct LongCycle {
    wrap: Postponed<CycleDetector>,
    n: usize,
}

impl LongCycle {
    pub fn new(n: usize, k: usize) -> Result<Self, PartitionError> {
        Ok(LongCycle {
            wrap: Postponed::new(CycleDetector::new(n, k)?),
            n,
        })
    }

    fn check(&self, u: Vid, v: Vid) -> Result<(Vid, Vid), DynError> {
        for x in [u, v] {
            if x as usize >= self.n {
                return Err(GraphError::OutOfRange { v: x, n: self.n }.into());
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        Ok(edge_key(u, v))
    }

    pub fn insert(&mut self, u: Vid, v: Vid) -> Result<(), DynError> {
        let e = self.check(u, v)?;
        self.wrap.insert(e);
        Ok(())
    }

    pub fn remove(&mut self, u: Vid, v: Vid) -> Result<(), DynError> {
        let e = self.check(u, v)?;
        self.wrap.remove(&e);
        Ok(())
    }

    pub fn has_edge(&self, u: Vid, v: Vid) -> bool {
        self.wrap.contains(&edge_key(u, v))
    }

    /// Whether the graph has a simple cycle on at least `k` vertices.
    pub fn contains(&self) -> bool {
        self.wrap.queue_len() > 0
    }

    pub fn wrapper(&self) -> &Postponed<CycleDetector> {
        &self.wrap
    }

    pub fn enable_probe(&mut self) {
        self.wrap.enable_probe();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::oracle::{biconnected_components_bf, has_cycle_at_least_bf};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn parts_edges(np: &NicePartition) -> Vec<Vec<(Vid, Vid)>> {
        np.parts().into_iter().map(|p| p.edges).collect()
    }

    /// Components of the forest agree with components of the inner graph,
    /// and the forest only uses graph edges.
    fn forest_spans(c: &CycleDetector) -> bool {
        let g = c.partition().graph();
        let mut f = c.forest().clone();
        let comps = g.components();
        let mut id = vec![0; g.n()];
        for (i, comp) in comps.iter().enumerate() {
            for &v in comp {
                id[v as usize] = i;
            }
        }
        let edges: Vec<_> = c.forest().edges().copied().collect();
        edges.iter().all(|&(a, b)| g.has_edge(a, b))
            && edges.len() + comps.len() == g.n()
            && (0..g.n() as Vid).all(|v| {
                let r = comps[id[v as usize]][0];
                f.connected(v, r).unwrap()
            })
    }

    #[test]
    fn examples() {
        let mut c = CycleDetector::new(4, 4).unwrap();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(c.insert(a, b).unwrap(), Outcome::Accepted);
        }
        assert_eq!(c.partition().part_count(), 1);
        let mut c = CycleDetector::new(3, 3).unwrap();
        c.insert(0, 1).unwrap();
        c.insert(1, 2).unwrap();
        assert!(c.partition().bridge(0, 1).unwrap());
        assert_eq!(c.insert(0, 2).unwrap(), Outcome::Rejected);
        assert_eq!(parts_edges(c.partition()), vec![vec![(0, 1)], vec![(1, 2)]]);

        let mut lc = LongCycle::new(4, 4).unwrap();
        lc.enable_probe();
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            lc.insert(a, b).unwrap();
            assert!(!lc.contains());
        }
        lc.insert(3, 0).unwrap();
        assert!(lc.contains());
        lc.remove(3, 0).unwrap();
        assert!(!lc.contains());
    }

    #[test]
    fn bowtie_removal_splits() {
        let mut c = CycleDetector::new(5, 5).unwrap();
        for (a, b) in [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)] {
            assert_eq!(c.insert(a, b).unwrap(), Outcome::Accepted);
        }
        assert_eq!(c.partition().part_count(), 2);
        c.remove(0, 1).unwrap();
        assert_eq!(parts_edges(c.partition()), biconnected_components_bf(c.partition().graph()));
        assert_eq!(c.partition().part_count(), 3);
        assert!(forest_spans(&c));
    }

    /// Random toggles whose edge count hovers around `n`, where long
    /// cycles keep appearing and disappearing.
    fn session(seed: u64, n: usize, k: usize, ops: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lc = LongCycle::new(n, k).unwrap();
        let mut g = Graph::new(n);
        let mut flips = 0;
        let mut last = false;
        for step in 0..ops {
            let m = g.m();
            if m > 0 && rng.gen_bool(m as f64 / (m + n) as f64) {
                let edges = g.edges();
                let (a, b) = edges[rng.gen_range(0..edges.len())];
                lc.remove(a, b).unwrap();
                g.remove_edge(a, b).unwrap();
            } else {
                let a = rng.gen_range(0..n as Vid);
                let b = rng.gen_range(0..n as Vid);
                if a == b || g.has_edge(a, b) {
                    continue;
                }
                lc.insert(a, b).unwrap();
                g.add_edge(a, b).unwrap();
            }
            let now = lc.contains();
            assert_eq!(now, has_cycle_at_least_bf(&g, k));
            flips += (now != last) as usize;
            last = now;
            let inner = lc.wrapper().inner();
            assert!(!has_cycle_at_least_bf(inner.partition().graph(), k.max(3)));
            assert_eq!(parts_edges(inner.partition()), biconnected_components_bf(inner.partition().graph()));
            assert!(inner.partition().check_dictionary());
            assert!(forest_spans(inner));
            if step % 25 == 0 {
                crate::partition::tests::check_parts(inner.partition());
            }
        }
        let w = lc.wrapper();
        assert!(w.inner_ops() <= 3 * w.outer_ops());
        if ops >= 1000 {
            assert!(flips > 10, "workload never toggled the answer");
        }
    }

    #[test]
    fn longer_sessions() {
        for (seed, n, k) in [(1, 14, 4), (2, 16, 5), (3, 20, 5), (4, 12, 3)] {
            session(seed, n, k, 1500);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn long_cycle_matches_oracle(seed in any::<u64>(), n in 2usize..10, k in 2usize..6) {
            session(seed, n, k, 150);
        }
    }
}
