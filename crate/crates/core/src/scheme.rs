//! Configuration schemes and the k-path scheme.
//!
//! A configuration for the k-path scheme is a linear forest on the boundary
//! plus two markers `s` and `t`, together with a length index. The forest
//! says how a partial path family threads through the boundary; the index
//! counts its edges, saturating at `k`.

use crate::graph::Vid;
use smallvec::SmallVec;
use std::fmt::Debug;
use std::hash::Hash;
use thiserror::Error;

/// Marker for the start of the path.
pub const S: Vid = u32::MAX - 1;
/// Marker for the end of the path.
pub const T: Vid = u32::MAX;
/// Length index meaning "at least k edges".
pub const INF: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("vertex {0} is not on the boundary")]
    NotInBoundary(Vid),
    #[error("k = {0} is out of range")]
    BadK(usize),
}

/// A set of configurations over a boundary. Both vectors are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfSet<C> {
    pub boundary: Vec<Vid>,
    pub confs: Vec<C>,
}

impl<C: Ord> ConfSet<C> {
    pub fn new(mut boundary: Vec<Vid>, mut confs: Vec<C>) -> Self {
        boundary.sort_unstable();
        boundary.dedup();
        confs.sort_unstable();
        confs.dedup();
        ConfSet { boundary, confs }
    }

    pub fn len(&self) -> usize {
        self.confs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.confs.is_empty()
    }

    pub fn contains(&self, c: &C) -> bool {
        self.confs.binary_search(c).is_ok()
    }
}

/// A configuration scheme that the dynamic structures can maintain.
pub trait Scheme: Clone + Debug {
    type Config: Clone + Eq + Hash + Ord + Debug;

    /// `false` for the trivial scheme; the store then skips all mug work.
    const TRACKED: bool;

    fn tau(&self, x: usize) -> usize;
    fn zeta(&self, x: usize) -> u128;
    /// `conf` of a graph on `verts` (one or two vertices, all on the boundary).
    fn base(&self, verts: &[Vid], edge: bool) -> ConfSet<Self::Config>;
    fn forget(
        &self,
        c: &ConfSet<Self::Config>,
        x: Vid,
    ) -> Result<ConfSet<Self::Config>, SchemeError>;
    fn union(&self, a: &ConfSet<Self::Config>, b: &ConfSet<Self::Config>) -> ConfSet<Self::Config>;
    /// Configurations realized by the empty graph over `∅`.
    fn empty(&self) -> ConfSet<Self::Config>;
    /// Whether a set over `∅` contains a final configuration.
    fn is_final(&self, c: &ConfSet<Self::Config>) -> bool;
}

/// The scheme with no configurations; used by the plain treedepth structure.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoScheme;

impl Scheme for NoScheme {
    type Config = ();
    const TRACKED: bool = false;

    fn tau(&self, _: usize) -> usize {
        0
    }
    fn zeta(&self, _: usize) -> u128 {
        0
    }
    fn base(&self, verts: &[Vid], _: bool) -> ConfSet<()> {
        ConfSet::new(verts.to_vec(), Vec::new())
    }
    fn forget(&self, c: &ConfSet<()>, x: Vid) -> Result<ConfSet<()>, SchemeError> {
        let mut b = c.boundary.clone();
        let pos = b.binary_search(&x).map_err(|_| SchemeError::NotInBoundary(x))?;
        b.remove(pos);
        Ok(ConfSet::new(b, Vec::new()))
    }
    fn union(&self, a: &ConfSet<()>, b: &ConfSet<()>) -> ConfSet<()> {
        ConfSet::new([a.boundary.as_slice(), &b.boundary].concat(), Vec::new())
    }
    fn empty(&self) -> ConfSet<()> {
        ConfSet::new(Vec::new(), Vec::new())
    }
    fn is_final(&self, _: &ConfSet<()>) -> bool {
        false
    }
}

/// Edges of a configuration, each as `(min, max)`, sorted.
pub type Edges = SmallVec<[(Vid, Vid); 4]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathConf {
    pub edges: Edges,
    /// `0..k` or [`INF`].
    pub idx: u8,
}

impl PathConf {
    pub fn new(mut edges: Vec<(Vid, Vid)>, idx: u8) -> Self {
        for e in &mut edges {
            *e = crate::graph::edge_key(e.0, e.1);
        }
        edges.sort_unstable();
        PathConf {
            edges: edges.into_iter().collect(),
            idx,
        }
    }

    fn degree(&self, x: Vid) -> usize {
        self.edges.iter().filter(|e| e.0 == x || e.1 == x).count()
    }
}

/// The k-path scheme: a graph is final iff it has a simple path on `k` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KPath {
    k: u8,
}

impl KPath {
    pub fn new(k: usize) -> Result<Self, SchemeError> {
        if k == 0 || k >= INF as usize {
            return Err(SchemeError::BadK(k));
        }
        Ok(KPath { k: k as u8 })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    fn add(&self, a: u8, b: u8) -> u8 {
        if a == INF || b == INF || a as usize + b as usize >= self.k as usize {
            INF
        } else {
            a + b
        }
    }

    /// The configuration `(st, k-1)` that certifies a k-path.
    pub fn final_conf(&self) -> PathConf {
        PathConf::new(vec![(S, T)], self.k - 1)
    }

    /// Every configuration over `x`: all linear forests on `x ∪ {s,t}` with
    /// marker degree at most one, edgeless ones only with index 0.
    pub fn enumerate_configs(&self, x: &[Vid]) -> Vec<PathConf> {
        let mut nodes = x.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        nodes.push(S);
        nodes.push(T);
        let mut pairs = Vec::new();
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                pairs.push((nodes[i], nodes[j]));
            }
        }
        let mut out = Vec::new();
        let mut chosen: Vec<(Vid, Vid)> = Vec::new();
        self.forests(&pairs, 0, &mut chosen, &mut out);
        out.sort_unstable();
        out
    }

    fn forests(
        &self,
        pairs: &[(Vid, Vid)],
        i: usize,
        chosen: &mut Vec<(Vid, Vid)>,
        out: &mut Vec<PathConf>,
    ) {
        if i == pairs.len() {
            if chosen.is_empty() {
                out.push(PathConf::new(Vec::new(), 0));
            } else {
                for idx in (0..self.k).chain([INF]) {
                    out.push(PathConf::new(chosen.clone(), idx));
                }
            }
            return;
        }
        self.forests(pairs, i + 1, chosen, out);
        chosen.push(pairs[i]);
        if is_linear_forest(chosen) {
            self.forests(pairs, i + 1, chosen, out);
        }
        chosen.pop();
    }

    /// Combines two configurations if their edge sets are disjoint and the
    /// union is still a valid forest.
    fn merge(&self, a: &PathConf, b: &PathConf) -> Option<PathConf> {
        let mut edges: Edges = SmallVec::with_capacity(a.edges.len() + b.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < a.edges.len() || j < b.edges.len() {
            if j == b.edges.len() || (i < a.edges.len() && a.edges[i] < b.edges[j]) {
                edges.push(a.edges[i]);
                i += 1;
            } else if i == a.edges.len() || b.edges[j] < a.edges[i] {
                edges.push(b.edges[j]);
                j += 1;
            } else {
                return None;
            }
        }
        if !is_linear_forest(&edges) {
            return None;
        }
        Some(PathConf {
            edges,
            idx: self.add(a.idx, b.idx),
        })
    }
}

/// Acyclic, max degree 2, markers of degree at most 1.
fn is_linear_forest(edges: &[(Vid, Vid)]) -> bool {
    let mut verts: SmallVec<[Vid; 12]> = SmallVec::new();
    for &(a, b) in edges {
        verts.push(a);
        verts.push(b);
    }
    verts.sort_unstable();
    let mut deg: SmallVec<[(Vid, u8); 12]> = SmallVec::new();
    for v in verts {
        match deg.last_mut() {
            Some((w, c)) if *w == v => *c += 1,
            _ => deg.push((v, 1)),
        }
    }
    if deg
        .iter()
        .any(|&(v, c)| c > if v == S || v == T { 1 } else { 2 })
    {
        return false;
    }
    // Union-find over positions in `deg`.
    let mut parent: SmallVec<[usize; 12]> = (0..deg.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let pos = |v: Vid| deg.binary_search_by_key(&v, |e| e.0).unwrap();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, pos(a)), find(&mut parent, pos(b)));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

impl Scheme for KPath {
    type Config = PathConf;
    const TRACKED: bool = true;

    fn tau(&self, x: usize) -> usize {
        x + 2
    }

    fn zeta(&self, x: usize) -> u128 {
        let fact: u128 = (1..=x as u128).product();
        (self.k as u128 + 1) * (1u128 << (x + 1)) * fact
    }

    fn base(&self, verts: &[Vid], edge: bool) -> ConfSet<PathConf> {
        let mut allowed: Vec<((Vid, Vid), u8)> = Vec::new();
        for &x in verts {
            allowed.push(((x, S), 0));
            allowed.push(((x, T), 0));
        }
        if verts.len() == 2 && edge {
            allowed.push((crate::graph::edge_key(verts[0], verts[1]), 1));
        }
        let mut confs = Vec::new();
        for mask in 0u32..(1 << allowed.len()) {
            let chosen: Vec<_> = (0..allowed.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| allowed[i])
                .collect();
            let edges: Vec<(Vid, Vid)> = chosen.iter().map(|c| c.0).collect();
            if !is_linear_forest(&edges) {
                continue;
            }
            let len = chosen.iter().map(|c| c.1).fold(0, |a, b| self.add(a, b));
            confs.push(PathConf::new(edges, len));
        }
        ConfSet::new(verts.to_vec(), confs)
    }

    fn forget(&self, c: &ConfSet<PathConf>, x: Vid) -> Result<ConfSet<PathConf>, SchemeError> {
        let mut boundary = c.boundary.clone();
        let pos = boundary
            .binary_search(&x)
            .map_err(|_| SchemeError::NotInBoundary(x))?;
        boundary.remove(pos);
        let mut confs = Vec::with_capacity(c.confs.len());
        for conf in &c.confs {
            match conf.degree(x) {
                0 => confs.push(conf.clone()),
                2 => {
                    let mut ends = Vec::with_capacity(2);
                    let mut edges: Vec<(Vid, Vid)> = Vec::with_capacity(conf.edges.len());
                    for &(a, b) in &conf.edges {
                        if a == x {
                            ends.push(b);
                        } else if b == x {
                            ends.push(a);
                        } else {
                            edges.push((a, b));
                        }
                    }
                    edges.push((ends[0], ends[1]));
                    confs.push(PathConf::new(edges, conf.idx));
                }
                _ => {}
            }
        }
        Ok(ConfSet::new(boundary, confs))
    }

    fn union(&self, a: &ConfSet<PathConf>, b: &ConfSet<PathConf>) -> ConfSet<PathConf> {
        let boundary = [a.boundary.as_slice(), &b.boundary].concat();
        let mut confs = Vec::with_capacity(a.confs.len() + b.confs.len());
        confs.extend(a.confs.iter().cloned());
        confs.extend(b.confs.iter().cloned());
        for ca in &a.confs {
            if ca.edges.is_empty() {
                continue;
            }
            for cb in &b.confs {
                if cb.edges.is_empty() {
                    continue;
                }
                if let Some(m) = self.merge(ca, cb) {
                    confs.push(m);
                }
            }
        }
        ConfSet::new(boundary, confs)
    }

    fn empty(&self) -> ConfSet<PathConf> {
        ConfSet::new(Vec::new(), vec![PathConf::new(Vec::new(), 0)])
    }

    fn is_final(&self, c: &ConfSet<PathConf>) -> bool {
        c.contains(&self.final_conf())
    }
}
