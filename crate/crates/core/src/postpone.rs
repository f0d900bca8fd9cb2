//! Postponed insertions over a structure that only weakly supports
//! membership in a downward-closed family, and the Long Path detector.

use crate::dynamic::{DynError, MugStructure, Outcome};
use crate::graph::{edge_key, GraphError, Vid};
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::hash::Hash;

/// A structure maintaining a set that may refuse insertions which would
/// leave the family. A refusal leaves the state unchanged.
pub trait WeakMembership {
    type Elem: Clone + Eq + Hash;

    /// Tries to add `x`; `false` means refused.
    fn try_insert(&mut self, x: &Self::Elem) -> bool;
    fn remove(&mut self, x: &Self::Elem);
    /// Family verdict for the current inner set.
    fn verdict(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Inner,
    Queued(u64),
}

type Probe<W> = fn(&W, &<W as WeakMembership>::Elem) -> bool;

/// Strong membership on top of a [`WeakMembership`] structure.
///
/// Elements the inner structure refuses wait in a FIFO. While the queue is
/// nonempty its front, together with the inner set, already leaves the
/// family, so the whole set does too.
pub struct Postponed<W: WeakMembership> {
    inner: W,
    queue: BTreeMap<u64, W::Elem>,
    locator: FxHashMap<W::Elem, Loc>,
    next: u64,
    inner_ops: u64,
    outer_ops: u64,
    probe: Option<Probe<W>>,
}

impl<W: WeakMembership> Postponed<W> {
    pub fn new(inner: W) -> Self {
        Postponed {
            inner,
            queue: BTreeMap::new(),
            locator: FxHashMap::default(),
            next: 0,
            inner_ops: 0,
            outer_ops: 0,
            probe: None,
        }
    }

    pub fn inner(&self) -> &W {
        &self.inner
    }

    pub fn contains(&self, x: &W::Elem) -> bool {
        self.locator.contains_key(x)
    }

    pub fn len(&self) -> usize {
        self.locator.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locator.is_empty()
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Queued elements, front first.
    pub fn queued(&self) -> impl Iterator<Item = &W::Elem> {
        self.queue.values()
    }

    /// Calls made on the inner structure so far.
    pub fn inner_ops(&self) -> u64 {
        self.inner_ops
    }

    /// Public insertions and removals so far.
    pub fn outer_ops(&self) -> u64 {
        self.outer_ops
    }

    pub fn insert(&mut self, x: W::Elem) {
        self.outer_ops += 1;
        if self.locator.contains_key(&x) {
            return;
        }
        if self.queue.is_empty() {
            self.inner_ops += 1;
            if self.inner.try_insert(&x) {
                self.locator.insert(x, Loc::Inner);
                self.check_star();
                return;
            }
        }
        self.enqueue(x);
        self.check_star();
    }

    pub fn remove(&mut self, x: &W::Elem) {
        self.outer_ops += 1;
        match self.locator.remove(x) {
            None => {}
            Some(Loc::Inner) => {
                self.inner_ops += 1;
                self.inner.remove(x);
                self.flush();
            }
            Some(Loc::Queued(t)) => {
                let front = self.queue.keys().next() == Some(&t);
                self.queue.remove(&t);
                if front {
                    self.flush();
                }
            }
        }
        self.check_star();
    }

    /// Family membership of the whole maintained set.
    pub fn member(&self) -> bool {
        self.queue.is_empty() && self.inner.verdict()
    }

    fn enqueue(&mut self, x: W::Elem) {
        let t = self.next;
        self.next += 1;
        self.queue.insert(t, x.clone());
        self.locator.insert(x, Loc::Queued(t));
    }

    fn flush(&mut self) {
        while let Some(entry) = self.queue.first_entry() {
            self.inner_ops += 1;
            if !self.inner.try_insert(entry.get()) {
                break;
            }
            let x = entry.remove();
            self.locator.insert(x, Loc::Inner);
        }
    }

    fn check_star(&self) {
        if let Some(p) = self.probe {
            assert!(self.star_with(p), "queue front is insertable");
        }
    }

    fn star_with(&self, p: Probe<W>) -> bool {
        match self.queue.values().next() {
            None => true,
            Some(x) => !p(&self.inner, x),
        }
    }
}

impl<W: WeakMembership + Clone> Postponed<W> {
    /// Whether the queue front is refused by the inner structure, checked on
    /// a copy.
    pub fn star_holds(&self) -> bool {
        self.star_with(Self::probe_clone)
    }

    /// Asserts [`Self::star_holds`] after every operation. Costs a deep copy
    /// per operation.
    pub fn enable_probe(&mut self) {
        self.probe = Some(Self::probe_clone);
    }

    fn probe_clone(w: &W, x: &W::Elem) -> bool {
        w.clone().try_insert(x)
    }
}

impl WeakMembership for MugStructure {
    type Elem = (Vid, Vid);

    fn try_insert(&mut self, &(u, v): &(Vid, Vid)) -> bool {
        self.insert(u, v).expect("valid edge") == Outcome::Accepted
    }

    fn remove(&mut self, &(u, v): &(Vid, Vid)) {
        MugStructure::remove(self, u, v).expect("present edge")
    }

    fn verdict(&self) -> bool {
        true
    }
}

/// Fully dynamic detection of a simple path on `k` vertices.
///
/// The inner structure keeps treedepth below `k`; an edge it refuses certifies
/// a long path because every graph without a `k`-vertex path has treedepth
/// below `k`.
pub struct LongPath {
    wrap: Postponed<MugStructure>,
    n: usize,
}

impl LongPath {
    pub fn new(n: usize, k: usize) -> Result<Self, DynError> {
        if k == 0 {
            return Err(DynError::ZeroBudget);
        }
        // For k = 1 any vertex is a path already; d = 1 keeps the inner
        // structure nonempty.
        let inner = MugStructure::kpath(n, (k as u32 - 1).max(1), k)?;
        Ok(LongPath {
            wrap: Postponed::new(inner),
            n,
        })
    }

    pub fn k(&self) -> usize {
        self.wrap.inner.k()
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

    /// Adds `uv`; adding a present edge does nothing.
    pub fn insert(&mut self, u: Vid, v: Vid) -> Result<(), DynError> {
        let e = self.check(u, v)?;
        self.wrap.insert(e);
        Ok(())
    }

    /// Removes `uv`; removing an absent edge does nothing.
    pub fn remove(&mut self, u: Vid, v: Vid) -> Result<(), DynError> {
        let e = self.check(u, v)?;
        self.wrap.remove(&e);
        Ok(())
    }

    pub fn has_edge(&self, u: Vid, v: Vid) -> bool {
        self.wrap.contains(&edge_key(u, v))
    }

    /// Whether the graph has a simple path on `k` vertices.
    pub fn contains(&self) -> bool {
        self.wrap.queue_len() > 0 || self.wrap.inner.member()
    }

    pub fn wrapper(&self) -> &Postponed<MugStructure> {
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
    use crate::oracle::has_k_path_bf;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    /// Sets of integers with total below a cap; downward closed.
    #[derive(Clone, Default)]
    struct Budget {
        cap: u32,
        set: BTreeSet<u32>,
    }

    impl WeakMembership for Budget {
        type Elem = u32;
        fn try_insert(&mut self, x: &u32) -> bool {
            if self.set.iter().sum::<u32>() + x >= self.cap {
                return false;
            }
            self.set.insert(*x);
            true
        }
        fn remove(&mut self, x: &u32) {
            self.set.remove(x);
        }
        fn verdict(&self) -> bool {
            true
        }
    }

    fn budget(cap: u32) -> Postponed<Budget> {
        let mut w = Postponed::new(Budget {
            cap,
            set: BTreeSet::new(),
        });
        w.enable_probe();
        w
    }

    #[test]
    fn generic_wrapper_semantics() {
        let mut w = budget(10);
        assert!(w.member());
        w.insert(4);
        assert!(w.member());
        w.insert(7);
        assert!(!w.member());
        assert_eq!(w.queue_len(), 1);
        // Appended regardless of whether it would fit.
        w.insert(1);
        assert_eq!(w.queued().copied().collect::<Vec<_>>(), vec![7, 1]);
        w.remove(&1);
        assert_eq!(w.queue_len(), 1);
        w.remove(&99);
        assert_eq!(w.len(), 2);
        w.remove(&4);
        assert!(w.member());
        assert_eq!(w.queue_len(), 0);
        assert!(w.inner().set.contains(&7));
    }

    #[test]
    fn flush_stops_at_first_refusal() {
        let mut w = budget(10);
        w.insert(9);
        w.insert(5);
        w.insert(1);
        w.insert(3);
        w.remove(&9);
        assert_eq!(w.inner().set, BTreeSet::from([1, 3, 5]));
        assert!(w.member());
    }

    #[test]
    fn long_path_examples() {
        let mut lp = LongPath::new(3, 3).unwrap();
        lp.enable_probe();
        assert!(!lp.contains());
        lp.insert(0, 1).unwrap();
        lp.insert(1, 2).unwrap();
        assert!(lp.contains());
        lp.insert(0, 2).unwrap();
        assert_eq!(lp.wrapper().queue_len(), 1);
        assert!(lp.contains());
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            lp.remove(u, v).unwrap();
        }
        assert!(!lp.contains());
        assert_eq!(lp.wrapper().queue_len(), 0);
        assert!(lp.insert(0, 0).is_err());
        assert!(lp.remove(0, 3).is_err());
    }

    fn session(seed: u64, n: usize, k: usize, ops: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lp = LongPath::new(n, k).unwrap();
        lp.enable_probe();
        let mut g = Graph::new(n);
        for _ in 0..ops {
            let a = rng.gen_range(0..n as Vid);
            let b = rng.gen_range(0..n as Vid);
            if a == b {
                continue;
            }
            if g.has_edge(a, b) && rng.gen_bool(0.6) {
                lp.remove(a, b).unwrap();
                g.remove_edge(a, b).unwrap();
            } else {
                lp.insert(a, b).unwrap();
                g.add_edge(a, b).unwrap();
            }
            assert_eq!(lp.contains(), has_k_path_bf(&g, k));
        }
        let w = lp.wrapper();
        assert!(w.inner_ops() <= 3 * w.outer_ops());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn long_path_matches_oracle(seed in any::<u64>(), n in 2usize..10, k in 1usize..6) {
            session(seed, n, k, 120);
        }

        #[test]
        fn wrapper_keeps_star(ops in proptest::collection::vec((any::<bool>(), 1u32..8), 0..60)) {
            let mut w = budget(12);
            let mut all = BTreeSet::new();
            for (add, x) in ops {
                if add { w.insert(x); all.insert(x); } else { w.remove(&x); all.remove(&x); }
                prop_assert_eq!(w.member(), all.iter().sum::<u32>() < 12);
                prop_assert!(w.inner_ops() <= 3 * w.outer_ops());
            }
        }
    }
}
