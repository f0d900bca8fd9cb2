//! Undirected simple graphs over a fixed vertex range `0..n`.

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Vertex identifier.
pub type Vid = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {v} out of range (n = {n})")]
    OutOfRange { v: Vid, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vid),
}

/// Canonical key of an unordered pair.
#[inline]
pub fn edge_key(u: Vid, v: Vid) -> (Vid, Vid) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Dictionary keyed by unordered vertex pairs.
#[derive(Debug, Clone)]
pub struct EdgeDict<V> {
    map: FxHashMap<(Vid, Vid), V>,
}

impl<V> Default for EdgeDict<V> {
    fn default() -> Self {
        EdgeDict {
            map: FxHashMap::default(),
        }
    }
}

impl<V> EdgeDict<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, u: Vid, v: Vid) -> Option<&V> {
        self.map.get(&edge_key(u, v))
    }

    pub fn get_mut(&mut self, u: Vid, v: Vid) -> Option<&mut V> {
        self.map.get_mut(&edge_key(u, v))
    }

    pub fn insert(&mut self, u: Vid, v: Vid, val: V) -> Option<V> {
        self.map.insert(edge_key(u, v), val)
    }

    pub fn remove(&mut self, u: Vid, v: Vid) -> Option<V> {
        self.map.remove(&edge_key(u, v))
    }

    pub fn contains(&self, u: Vid, v: Vid) -> bool {
        self.map.contains_key(&edge_key(u, v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vid, Vid), &V)> {
        self.map.iter()
    }
}

/// Mutable simple graph. Adjacency lists are kept sorted.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    adj: Vec<Vec<Vid>>,
    dict: EdgeDict<()>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            dict: EdgeDict::new(),
        }
    }

    /// Builds a graph from an edge list; panics on invalid edges.
    pub fn from_edges(n: usize, edges: &[(Vid, Vid)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v).expect("invalid edge");
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.dict.len()
    }

    fn check(&self, v: Vid) -> Result<(), GraphError> {
        if (v as usize) < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::OutOfRange { v, n: self.n() })
        }
    }

    /// Adds `uv`. Returns whether the edge was new.
    pub fn add_edge(&mut self, u: Vid, v: Vid) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.dict.contains(u, v) {
            return Ok(false);
        }
        self.dict.insert(u, v, ());
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a as usize];
            let pos = list.binary_search(&b).unwrap_err();
            list.insert(pos, b);
        }
        Ok(true)
    }

    /// Removes `uv`. Returns whether the edge was present.
    pub fn remove_edge(&mut self, u: Vid, v: Vid) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if self.dict.remove(u, v).is_none() {
            return Ok(false);
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a as usize];
            let pos = list.binary_search(&b).unwrap();
            list.remove(pos);
        }
        Ok(true)
    }

    /// Out-of-range endpoints simply yield `false`.
    pub fn has_edge(&self, u: Vid, v: Vid) -> bool {
        self.dict.contains(u, v)
    }

    pub fn neighbors(&self, v: Vid) -> &[Vid] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vid) -> usize {
        self.adj[v as usize].len()
    }

    /// All edges as sorted `(min, max)` pairs.
    pub fn edges(&self) -> Vec<(Vid, Vid)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if (u as Vid) < v {
                    out.push((u as Vid, v));
                }
            }
        }
        out
    }

    /// Subgraph induced by `verts`, relabelled to `0..verts.len()` in the given order.
    pub fn induced(&self, verts: &[Vid]) -> Graph {
        let mut pos = FxHashMap::default();
        for (i, &v) in verts.iter().enumerate() {
            pos.insert(v, i as Vid);
        }
        let mut h = Graph::new(verts.len());
        for (i, &v) in verts.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = pos.get(w) {
                    if (i as Vid) < j {
                        h.add_edge(i as Vid, j).unwrap();
                    }
                }
            }
        }
        h
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vid>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s as Vid];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether `u` and `v` are joined by a path avoiding every vertex in `banned`.
    pub fn reachable_avoiding(&self, u: Vid, v: Vid, banned: &[Vid]) -> bool {
        if banned.contains(&u) || banned.contains(&v) {
            return false;
        }
        let mut seen = vec![false; self.n()];
        for &b in banned {
            seen[b as usize] = true;
        }
        seen[u as usize] = true;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if x == v {
                return true;
            }
            for &y in self.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        false
    }
}

/// Splits the edge set into biconnected components.
///
/// Every non-tree edge of a BFS forest closes a fundamental cycle; edges on
/// overlapping fundamental cycles are unioned. Classes are sorted and ordered
/// by their smallest edge.
pub fn blocks(g: &Graph) -> Vec<Vec<(Vid, Vid)>> {
    let n = g.n();
    let mut parent = vec![u32::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s as Vid]);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    parent[y as usize] = x;
                    depth[y as usize] = depth[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    // Tree edge (parent[v], v) is identified by v; non-tree edges get ids from n upward.
    let edges = g.edges();
    let mut uf = UnionFind::new(n + edges.len());
    let mut id_of = FxHashMap::default();
    let mut next = n;
    for &(a, b) in &edges {
        let tree = parent[a as usize] == b || parent[b as usize] == a;
        let id = if tree {
            if parent[b as usize] == a {
                b as usize
            } else {
                a as usize
            }
        } else {
            next += 1;
            next - 1
        };
        id_of.insert((a, b), id);
        if !tree {
            let (mut x, mut y) = (a, b);
            while x != y {
                if depth[x as usize] < depth[y as usize] {
                    std::mem::swap(&mut x, &mut y);
                }
                uf.union(id, x as usize);
                x = parent[x as usize];
            }
        }
    }
    let mut classes: FxHashMap<usize, Vec<(Vid, Vid)>> = FxHashMap::default();
    for &(a, b) in &edges {
        let r = uf.find(id_of[&(a, b)]);
        classes.entry(r).or_default().push((a, b));
    }
    let mut out: Vec<Vec<(Vid, Vid)>> = classes.into_values().collect();
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_is_idempotent() {
        let mut g = Graph::new(2);
        assert!(g.add_edge(0, 1).unwrap());
        assert!(!g.add_edge(0, 1).unwrap());
        assert_eq!(g.m(), 1);
        assert!(g.has_edge(1, 0));
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(0, 0), Err(GraphError::SelfLoop(0)));
        assert!(matches!(g.add_edge(0, 7), Err(GraphError::OutOfRange { v: 7, .. })));
        assert!(matches!(g.remove_edge(9, 0), Err(GraphError::OutOfRange { .. })));
    }

    #[test]
    fn remove_edge_updates_neighbors() {
        let mut g = Graph::new(4);
        g.add_edge(2, 3).unwrap();
        assert!(g.has_edge(3, 2));
        g.add_edge(0, 1).unwrap();
        assert!(g.remove_edge(0, 1).unwrap());
        assert!(!g.remove_edge(0, 1).unwrap());
        assert!(!g.neighbors(0).contains(&1));
        assert!(!g.has_edge(0, 1));
    }

    #[test]
    fn blocks_of_bowtie_and_path() {
        let bowtie = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        let b = blocks(&bowtie);
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|c| c.len() == 3));
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(blocks(&p3), vec![vec![(0, 1)], vec![(1, 2)]]);
    }
}
