//! Arena shared by the treedepth structure, the mug structure and the nice
//! partition.
//!
//! A record is one vertex copy. Its parent is not stored on the record: it is
//! the owner of the bucket the record sits in, so renaming a bucket moves all
//! of its members at once. Keys (`SReach`, `NeiUp`, bucket sets) hold global
//! vertex ids; in a nice partition several records can share a global id.

use crate::cores::{is_subset, small_subsets};
use crate::graph::{Graph, Vid};
use crate::scheme::{ConfSet, Scheme};
use indexmap::{IndexMap, IndexSet};
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};

pub(crate) type RecId = u32;
pub(crate) type BId = u32;
pub(crate) type TopId = u32;
pub(crate) const NIL: u32 = u32::MAX;

pub(crate) type Key = (Vec<Vid>, u32);
pub(crate) type KidMap = IndexMap<Key, BId, FxBuildHasher>;
pub(crate) type List = IndexSet<RecId, FxBuildHasher>;

#[derive(Debug, Clone)]
pub(crate) struct Rec<C> {
    pub glo: Vid,
    pub bucket: BId,
    pub sreach: Vec<Vid>,
    pub neiup: Vec<Vid>,
    pub height: u32,
    pub kids: KidMap,
    pub conf: Option<ConfSet<C>>,
    pub alive: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Bucket<C> {
    /// `None` is the artificial root.
    pub owner: Option<RecId>,
    pub top: TopId,
    pub x: Vec<Vid>,
    pub i: u32,
    pub members: List,
    pub mugs: FxHashMap<C, List>,
    pub alive: bool,
}

/// One encoded forest: a whole structure, or one part of a partition.
#[derive(Debug, Clone, Default)]
pub(crate) struct Top {
    /// Buckets owned by the artificial root, in full mode.
    pub bot: KidMap,
    /// Renamed buckets waiting for reattachment, in partial mode.
    pub apps: Vec<BId>,
    pub partial: bool,
    pub member: bool,
    pub alive: bool,
}

#[derive(Debug, Clone)]
struct Journal<C> {
    lens: (usize, usize, usize),
    recs: FxHashMap<RecId, Rec<C>>,
    buckets: FxHashMap<BId, Bucket<C>>,
    tops: FxHashMap<TopId, Top>,
    free_recs: Vec<RecId>,
    free_buckets: Vec<BId>,
    free_tops: Vec<TopId>,
}

/// A forest on local record ids, handed to [`Store::extend`].
#[derive(Debug, Clone)]
pub(crate) struct LocalForest {
    pub recs: Vec<RecId>,
    pub parent: Vec<Option<usize>>,
    pub graph: Graph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ExtendError {
    /// A bucket key mentions a vertex missing from the core or is not straight.
    NotAttachable(Vec<Vid>),
}

#[derive(Debug, Clone)]
pub(crate) struct Store<S: Scheme> {
    pub scheme: S,
    pub d: u32,
    pub recs: Vec<Rec<S::Config>>,
    pub buckets: Vec<Bucket<S::Config>>,
    pub tops: Vec<Top>,
    free_recs: Vec<RecId>,
    free_buckets: Vec<BId>,
    free_tops: Vec<TopId>,
    journal: Option<Box<Journal<S::Config>>>,
    /// Records written since the last [`Store::clear_touched`].
    pub touched: Vec<RecId>,
}

impl<S: Scheme> Store<S> {
    pub fn new(scheme: S, d: u32) -> Self {
        Store {
            scheme,
            d,
            recs: Vec::new(),
            buckets: Vec::new(),
            tops: Vec::new(),
            free_recs: Vec::new(),
            free_buckets: Vec::new(),
            free_tops: Vec::new(),
            journal: None,
            touched: Vec::new(),
        }
    }

    // ---- journalled access ----

    pub fn begin(&mut self) {
        debug_assert!(self.journal.is_none());
        self.journal = Some(Box::new(Journal {
            lens: (self.recs.len(), self.buckets.len(), self.tops.len()),
            recs: FxHashMap::default(),
            buckets: FxHashMap::default(),
            tops: FxHashMap::default(),
            free_recs: Vec::new(),
            free_buckets: Vec::new(),
            free_tops: Vec::new(),
        }));
    }

    pub fn commit(&mut self) {
        if let Some(j) = self.journal.take() {
            self.free_recs.extend(j.free_recs);
            self.free_buckets.extend(j.free_buckets);
            self.free_tops.extend(j.free_tops);
        }
    }

    pub fn rollback(&mut self) {
        let Some(j) = self.journal.take() else { return };
        self.recs.truncate(j.lens.0);
        self.buckets.truncate(j.lens.1);
        self.tops.truncate(j.lens.2);
        for (id, r) in j.recs {
            self.recs[id as usize] = r;
        }
        for (id, b) in j.buckets {
            self.buckets[id as usize] = b;
        }
        for (id, t) in j.tops {
            self.tops[id as usize] = t;
        }
    }

    pub fn rec_mut(&mut self, r: RecId) -> &mut Rec<S::Config> {
        self.touched.push(r);
        if let Some(j) = self.journal.as_mut() {
            if (r as usize) < j.lens.0 && !j.recs.contains_key(&r) {
                j.recs.insert(r, self.recs[r as usize].clone());
            }
        }
        &mut self.recs[r as usize]
    }

    pub fn bucket_mut(&mut self, b: BId) -> &mut Bucket<S::Config> {
        if let Some(j) = self.journal.as_mut() {
            if (b as usize) < j.lens.1 && !j.buckets.contains_key(&b) {
                j.buckets.insert(b, self.buckets[b as usize].clone());
            }
        }
        &mut self.buckets[b as usize]
    }

    pub fn top_mut(&mut self, t: TopId) -> &mut Top {
        if let Some(j) = self.journal.as_mut() {
            if (t as usize) < j.lens.2 && !j.tops.contains_key(&t) {
                j.tops.insert(t, self.tops[t as usize].clone());
            }
        }
        &mut self.tops[t as usize]
    }

    pub fn clear_touched(&mut self) {
        self.touched.clear();
    }

    // ---- allocation ----

    pub fn add_top(&mut self) -> TopId {
        let t = Top {
            alive: true,
            ..Top::default()
        };
        if self.journal.is_none() {
            if let Some(id) = self.free_tops.pop() {
                self.tops[id as usize] = t;
                return id;
            }
        }
        self.tops.push(t);
        (self.tops.len() - 1) as TopId
    }

    pub fn free_top(&mut self, t: TopId) {
        *self.top_mut(t) = Top::default();
        match self.journal.as_mut() {
            Some(j) => j.free_tops.push(t),
            None => self.free_tops.push(t),
        }
    }

    /// A detached record (no bucket). Use [`Store::attach_leaf`] or
    /// [`Store::extend`] to place it.
    pub fn add_rec(&mut self, glo: Vid) -> RecId {
        let r = Rec {
            glo,
            bucket: NIL,
            sreach: Vec::new(),
            neiup: Vec::new(),
            height: 1,
            kids: KidMap::default(),
            conf: None,
            alive: true,
        };
        if self.journal.is_none() {
            if let Some(id) = self.free_recs.pop() {
                self.recs[id as usize] = r;
                return id;
            }
        }
        self.recs.push(r);
        let id = (self.recs.len() - 1) as RecId;
        self.touched.push(id);
        id
    }

    pub fn free_rec(&mut self, r: RecId) {
        debug_assert_eq!(self.recs[r as usize].bucket, NIL);
        let rec = self.rec_mut(r);
        rec.alive = false;
        rec.kids.clear();
        rec.conf = None;
        match self.journal.as_mut() {
            Some(j) => j.free_recs.push(r),
            None => self.free_recs.push(r),
        }
    }

    fn new_bucket(&mut self, owner: Option<RecId>, top: TopId, x: Vec<Vid>, i: u32) -> BId {
        let b = Bucket {
            owner,
            top,
            x,
            i,
            members: List::default(),
            mugs: FxHashMap::default(),
            alive: true,
        };
        if self.journal.is_none() {
            if let Some(id) = self.free_buckets.pop() {
                self.buckets[id as usize] = b;
                return id;
            }
        }
        self.buckets.push(b);
        (self.buckets.len() - 1) as BId
    }

    fn free_bucket(&mut self, b: BId) {
        let bk = self.bucket_mut(b);
        bk.alive = false;
        bk.members.clear();
        bk.mugs.clear();
        match self.journal.as_mut() {
            Some(j) => j.free_buckets.push(b),
            None => self.free_buckets.push(b),
        }
    }

    // ---- navigation ----

    pub fn parent(&self, r: RecId) -> Option<RecId> {
        let b = self.recs[r as usize].bucket;
        debug_assert_ne!(b, NIL);
        self.buckets[b as usize].owner
    }

    pub fn root(&self, mut r: RecId) -> RecId {
        while let Some(p) = self.parent(r) {
            r = p;
        }
        r
    }

    /// The top a placed record belongs to.
    pub fn top_of(&self, r: RecId) -> TopId {
        let root = self.root(r);
        self.buckets[self.recs[root as usize].bucket as usize].top
    }

    /// `r` and its ancestors, bottom-up.
    pub fn ancestors(&self, r: RecId) -> Vec<RecId> {
        let mut out = vec![r];
        let mut x = r;
        while let Some(p) = self.parent(x) {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn glo(&self, r: RecId) -> Vid {
        self.recs[r as usize].glo
    }

    fn kids_of(&self, owner: Option<RecId>, top: TopId) -> &KidMap {
        match owner {
            Some(u) => &self.recs[u as usize].kids,
            None => &self.tops[top as usize].bot,
        }
    }

    /// Children of a record (or the roots of a top).
    pub fn children(&self, owner: Option<RecId>, top: TopId) -> Vec<RecId> {
        self.kids_of(owner, top)
            .values()
            .flat_map(|&b| self.buckets[b as usize].members.iter().copied())
            .collect()
    }

    /// Height of the tallest tree of a top.
    pub fn height(&self, top: TopId) -> u32 {
        self.tops[top as usize].bot.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Every record of a top, parents before children.
    pub fn records(&self, top: TopId) -> Vec<RecId> {
        let mut out = self.children(None, top);
        let mut i = 0;
        while i < out.len() {
            let r = out[i];
            out.extend(self.children(Some(r), top));
            i += 1;
        }
        out
    }

    // ---- bucket membership ----

    fn kids_mut(&mut self, owner: Option<RecId>, top: TopId) -> &mut KidMap {
        match owner {
            Some(u) => &mut self.rec_mut(u).kids,
            None => &mut self.top_mut(top).bot,
        }
    }

    /// Puts a record with up-to-date key fields and conf under `owner`.
    pub fn attach(&mut self, r: RecId, owner: Option<RecId>, top: TopId) {
        let rec = &self.recs[r as usize];
        let key = (rec.sreach.clone(), rec.height);
        let existing = self.kids_of(owner, top).get(&key).copied();
        let b = match existing {
            Some(b) => b,
            None => {
                let b = self.new_bucket(owner, top, key.0.clone(), key.1);
                self.kids_mut(owner, top).insert(key, b);
                b
            }
        };
        let confs: Vec<S::Config> = if S::TRACKED {
            self.recs[r as usize]
                .conf
                .as_ref()
                .map(|c| c.confs.clone())
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        let bk = self.bucket_mut(b);
        bk.members.insert(r);
        for c in confs {
            bk.mugs.entry(c).or_default().insert(r);
        }
        self.rec_mut(r).bucket = b;
    }

    /// Takes a record out of its bucket, deleting the bucket if it empties.
    pub fn detach(&mut self, r: RecId) {
        let b = self.recs[r as usize].bucket;
        if b == NIL {
            return;
        }
        let confs: Vec<S::Config> = if S::TRACKED {
            self.recs[r as usize]
                .conf
                .as_ref()
                .map(|c| c.confs.clone())
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        let bk = self.bucket_mut(b);
        bk.members.swap_remove(&r);
        for c in confs {
            if let Some(m) = bk.mugs.get_mut(&c) {
                m.swap_remove(&r);
                if m.is_empty() {
                    bk.mugs.remove(&c);
                }
            }
        }
        if bk.members.is_empty() {
            let (owner, top, key) = (bk.owner, bk.top, (bk.x.clone(), bk.i));
            self.kids_mut(owner, top).swap_remove(&key);
            self.free_bucket(b);
        }
        self.rec_mut(r).bucket = NIL;
    }

    // ---- scheme ----

    /// Folds a multiset of conf sets, keeping each distinct set at most
    /// `cap` times (further copies cannot change the result).
    fn fold(&self, start: ConfSet<S::Config>, sets: Vec<&ConfSet<S::Config>>, cap: usize) -> ConfSet<S::Config> {
        let mut count: FxHashMap<&ConfSet<S::Config>, usize> = FxHashMap::default();
        let mut acc = start;
        for c in sets {
            let e = count.entry(c).or_default();
            if *e < cap {
                *e += 1;
                acc = self.scheme.union(&acc, c);
            }
        }
        acc
    }

    /// First `tau` members of every mug in the given buckets, as a set.
    fn representatives(&self, buckets: impl Iterator<Item = BId>, tau: usize) -> Vec<RecId> {
        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        for b in buckets {
            for mug in self.buckets[b as usize].mugs.values() {
                for &w in mug.iter().take(tau) {
                    if seen.insert(w) {
                        out.push(w);
                    }
                }
            }
        }
        out
    }

    /// `conf` of `G_u` over `SReach(u)`, from its key fields and its
    /// children's mugs.
    fn compute_conf(&self, u: RecId) -> ConfSet<S::Config> {
        let rec = &self.recs[u as usize];
        let g = rec.glo;
        let xsize = rec.sreach.len() + 1;
        let mut acc = self.scheme.base(&[g], false);
        for &a in &rec.neiup {
            acc = self.scheme.union(&acc, &self.scheme.base(&[g, a], true));
        }
        let w = self.representatives(rec.kids.values().copied(), self.scheme.tau(xsize));
        let sets: Vec<&ConfSet<S::Config>> = w
            .iter()
            .map(|&w| self.recs[w as usize].conf.as_ref().expect("placed records carry conf"))
            .collect();
        let acc = self.fold(acc, sets, xsize + 1);
        self.scheme.forget(&acc, g).expect("own vertex is on the boundary")
    }

    /// `conf` of the whole encoded graph of a top.
    pub fn top_conf(&self, top: TopId) -> ConfSet<S::Config> {
        let t = &self.tops[top as usize];
        let w = self.representatives(t.bot.values().copied(), self.scheme.tau(0));
        let sets = w
            .iter()
            .map(|&w| self.recs[w as usize].conf.as_ref().expect("placed records carry conf"))
            .collect();
        self.fold(self.scheme.empty(), sets, 1)
    }

    pub fn refresh_member(&mut self, top: TopId) {
        if S::TRACKED {
            let m = self.scheme.is_final(&self.top_conf(top));
            self.top_mut(top).member = m;
        }
    }

    /// Places a fresh record as an isolated root.
    pub fn attach_leaf(&mut self, r: RecId, top: TopId) {
        if S::TRACKED {
            let g = self.recs[r as usize].glo;
            let c = self
                .scheme
                .forget(&self.scheme.base(&[g], false), g)
                .expect("own vertex");
            self.rec_mut(r).conf = Some(c);
        }
        self.attach(r, None, top);
    }

    // ---- core extraction ----

    /// A `q`-core of the top containing the records of `l`, in post-order
    /// (children before parents).
    pub fn core(&self, top: TopId, l: &[RecId], q: usize) -> Vec<RecId> {
        let mut forced: FxHashSet<RecId> = FxHashSet::default();
        for &v in l {
            for a in self.ancestors(v) {
                forced.insert(a);
            }
        }
        let mut out = Vec::new();
        self.rec_core(top, None, &forced, q, &mut out);
        out
    }

    fn rec_core(
        &self,
        top: TopId,
        u: Option<RecId>,
        forced: &FxHashSet<RecId>,
        q: usize,
        out: &mut Vec<RecId>,
    ) {
        let mut r: Vec<RecId> = forced
            .iter()
            .copied()
            .filter(|&w| self.parent(w) == u && self.buckets[self.recs[w as usize].bucket as usize].top == top)
            .collect();
        r.sort_unstable();
        let scope: Vec<Vid> = match u {
            Some(u) => {
                let rec = &self.recs[u as usize];
                let mut s = rec.sreach.clone();
                s.push(rec.glo);
                s.sort_unstable();
                s
            }
            None => Vec::new(),
        };
        let mut kids: Vec<(&Key, BId)> = self.kids_of(u, top).iter().map(|(k, &b)| (k, b)).collect();
        kids.sort_by_key(|(k, _)| std::cmp::Reverse(k.1));
        let mut seen: FxHashSet<RecId> = r.iter().copied().collect();
        for x in small_subsets(&scope) {
            let mut c = q;
            'scan: for &(key, b) in &kids {
                if !is_subset(&x, &key.0) {
                    continue;
                }
                for &w in &self.buckets[b as usize].members {
                    if seen.insert(w) {
                        r.push(w);
                    }
                    c -= 1;
                    if c == 0 {
                        break 'scan;
                    }
                }
            }
        }
        for w in r {
            self.rec_core(top, Some(w), forced, q, out);
        }
        if let Some(u) = u {
            out.push(u);
        }
    }

    /// `G[K]` on `K` ordered by global id; returns the ordered records.
    pub fn induced(&self, k: &[RecId]) -> (Vec<RecId>, Graph) {
        let mut recs = k.to_vec();
        recs.sort_by_key(|&r| self.recs[r as usize].glo);
        let pos: FxHashMap<RecId, usize> = recs.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut g = Graph::new(recs.len());
        for (i, &w) in recs.iter().enumerate() {
            let nu = &self.recs[w as usize].neiup;
            if nu.is_empty() {
                continue;
            }
            let mut x = self.parent(w);
            while let Some(a) = x {
                if nu.binary_search(&self.recs[a as usize].glo).is_ok() {
                    g.add_edge(i as Vid, pos[&a] as Vid).expect("core is ancestor-closed");
                }
                x = self.parent(a);
            }
        }
        (recs, g)
    }

    // ---- trim and extend ----

    /// Removes the prefix `k` from a top, leaving its residual buckets on
    /// `apps`.
    pub fn trim(&mut self, top: TopId, k: &[RecId]) {
        for &w in k {
            self.detach(w);
        }
        let mut apps = Vec::new();
        for &u in k {
            let kids = std::mem::take(&mut self.rec_mut(u).kids);
            apps.extend(kids.into_values());
        }
        let bot = std::mem::take(&mut self.top_mut(top).bot);
        apps.extend(bot.into_values());
        for &b in &apps {
            let bk = self.bucket_mut(b);
            bk.owner = None;
            bk.top = top;
        }
        for &w in k {
            self.rec_mut(w).conf = None;
        }
        let t = self.top_mut(top);
        t.apps.extend(apps);
        t.partial = true;
    }

    /// Reattaches `apps` below the new forest on the core and rebuilds the
    /// core records bottom-up.
    pub fn extend(&mut self, top: TopId, f: &LocalForest) -> Result<(), ExtendError> {
        let n = f.recs.len();
        let mut depth = vec![u32::MAX; n];
        fn dep(i: usize, p: &[Option<usize>], depth: &mut [u32]) -> u32 {
            if depth[i] == u32::MAX {
                depth[i] = match p[i] {
                    None => 0,
                    Some(q) => dep(q, p, depth) + 1,
                };
            }
            depth[i]
        }
        for i in 0..n {
            dep(i, &f.parent, &mut depth);
        }
        let local: FxHashMap<Vid, usize> = f
            .recs
            .iter()
            .enumerate()
            .map(|(i, &r)| (self.recs[r as usize].glo, i))
            .collect();
        let is_anc = |a: usize, mut b: usize| loop {
            if a == b {
                return true;
            }
            match f.parent[b] {
                Some(p) => b = p,
                None => return false,
            }
        };
        let apps = std::mem::take(&mut self.top_mut(top).apps);
        for b in apps {
            let (x, i) = {
                let bk = &self.buckets[b as usize];
                (bk.x.clone(), bk.i)
            };
            let owner = if x.is_empty() {
                None
            } else {
                let mut locs = Vec::with_capacity(x.len());
                for g in &x {
                    match local.get(g) {
                        Some(&l) => locs.push(l),
                        None => return Err(ExtendError::NotAttachable(x)),
                    }
                }
                let &m = locs.iter().max_by_key(|&&l| depth[l]).unwrap();
                if !locs.iter().all(|&l| is_anc(l, m)) {
                    return Err(ExtendError::NotAttachable(x));
                }
                Some(f.recs[m])
            };
            self.bucket_mut(b).owner = owner;
            let prev = self.kids_mut(owner, top).insert((x, i), b);
            debug_assert!(prev.is_none(), "renamed buckets never collide");
        }
        // Children before parents.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(depth[i]));
        for i in order {
            let r = f.recs[i];
            let g = self.recs[r as usize].glo;
            let mut neiup = Vec::new();
            let mut a = f.parent[i];
            while let Some(p) = a {
                if f.graph.has_edge(i as Vid, p as Vid) {
                    neiup.push(self.recs[f.recs[p] as usize].glo);
                }
                a = f.parent[p];
            }
            neiup.sort_unstable();
            let rec = &self.recs[r as usize];
            let mut sreach = neiup.clone();
            let mut height = 1;
            for key in rec.kids.keys() {
                sreach.extend(key.0.iter().copied().filter(|&v| v != g));
                height = height.max(key.1 + 1);
            }
            sreach.sort_unstable();
            sreach.dedup();
            let rm = self.rec_mut(r);
            rm.neiup = neiup;
            rm.sreach = sreach;
            rm.height = height;
            if S::TRACKED {
                let c = self.compute_conf(r);
                self.rec_mut(r).conf = Some(c);
            }
            self.attach(r, f.parent[i].map(|p| f.recs[p]), top);
        }
        self.top_mut(top).partial = false;
        self.refresh_member(top);
        Ok(())
    }

    /// Parent pointers of a top as `(record, parent record)`.
    pub fn parents(&self, top: TopId) -> Vec<(RecId, Option<RecId>)> {
        self.records(top)
            .into_iter()
            .map(|r| (r, self.parent(r)))
            .collect()
    }
}
