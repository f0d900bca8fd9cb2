//! Dynamic unrooted forest with link, cut and tree-path queries.
//!
//! Link-cut trees over splay trees with lazy reversal; each splay node keeps
//! the size of its subtree so the length of an exposed path is one lookup.

use crate::graph::{edge_key, Vid};
use rustc_hash::FxHashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("vertex {v} out of range (n = {n})")]
    OutOfRange { v: Vid, n: usize },
    #[error("edge ({0}, {1}) is not in the forest")]
    EdgeAbsent(Vid, Vid),
}

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    ch: [u32; 2],
    // Splay parent or path-parent pointer.
    par: u32,
    size: u32,
    rev: bool,
}

#[derive(Debug, Clone)]
pub struct DynForest {
    t: Vec<Node>,
    edges: FxHashSet<(Vid, Vid)>,
}

impl DynForest {
    pub fn new(n: usize) -> Self {
        DynForest {
            t: vec![
                Node {
                    ch: [NIL, NIL],
                    par: NIL,
                    size: 1,
                    rev: false,
                };
                n
            ],
            edges: FxHashSet::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Number of forest edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: Vid, v: Vid) -> bool {
        self.edges.contains(&edge_key(u, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = &(Vid, Vid)> {
        self.edges.iter()
    }

    fn check(&self, v: Vid) -> Result<usize, ForestError> {
        if (v as usize) < self.t.len() {
            Ok(v as usize)
        } else {
            Err(ForestError::OutOfRange { v, n: self.n() })
        }
    }

    fn is_root(&self, x: usize) -> bool {
        let p = self.t[x].par;
        p == NIL || (self.t[p as usize].ch[0] != x as u32 && self.t[p as usize].ch[1] != x as u32)
    }

    fn size(&self, x: u32) -> u32 {
        if x == NIL {
            0
        } else {
            self.t[x as usize].size
        }
    }

    fn pull(&mut self, x: usize) {
        let [a, b] = self.t[x].ch;
        self.t[x].size = 1 + self.size(a) + self.size(b);
    }

    fn push(&mut self, x: usize) {
        if self.t[x].rev {
            self.t[x].rev = false;
            self.t[x].ch.swap(0, 1);
            for c in self.t[x].ch {
                if c != NIL {
                    self.t[c as usize].rev ^= true;
                }
            }
        }
    }

    fn rotate(&mut self, x: usize) {
        let p = self.t[x].par as usize;
        let g = self.t[p].par;
        let dir = (self.t[p].ch[1] == x as u32) as usize;
        let b = self.t[x].ch[1 - dir];
        if !self.is_root(p) {
            let gi = g as usize;
            let side = (self.t[gi].ch[1] == p as u32) as usize;
            self.t[gi].ch[side] = x as u32;
        }
        self.t[x].par = g;
        self.t[x].ch[1 - dir] = p as u32;
        self.t[p].par = x as u32;
        self.t[p].ch[dir] = b;
        if b != NIL {
            self.t[b as usize].par = p as u32;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: usize) {
        let mut stack = vec![x];
        let mut y = x;
        while !self.is_root(y) {
            y = self.t[y].par as usize;
            stack.push(y);
        }
        while let Some(z) = stack.pop() {
            self.push(z);
        }
        while !self.is_root(x) {
            let p = self.t[x].par as usize;
            if !self.is_root(p) {
                let g = self.t[p].par as usize;
                let zigzig = (self.t[g].ch[1] == p as u32) == (self.t[p].ch[1] == x as u32);
                self.rotate(if zigzig { p } else { x });
            }
            self.rotate(x);
        }
    }

    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x as u32;
        while y != NIL {
            let yi = y as usize;
            self.splay(yi);
            self.t[yi].ch[1] = last;
            self.pull(yi);
            last = y;
            y = self.t[yi].par;
        }
        self.splay(x);
    }

    fn evert(&mut self, x: usize) {
        self.access(x);
        self.t[x].rev ^= true;
        self.push(x);
    }

    fn find_root(&mut self, x: usize) -> usize {
        self.access(x);
        let mut y = x;
        loop {
            self.push(y);
            match self.t[y].ch[0] {
                NIL => break,
                c => y = c as usize,
            }
        }
        self.splay(y);
        y
    }

    /// Whether `u` and `v` lie in the same tree.
    pub fn connected(&mut self, u: Vid, v: Vid) -> Result<bool, ForestError> {
        let (a, b) = (self.check(u)?, self.check(v)?);
        Ok(a == b || self.find_root(a) == self.find_root(b))
    }

    /// Adds the edge `uv` unless `u` and `v` are already connected.
    pub fn link(&mut self, u: Vid, v: Vid) -> Result<bool, ForestError> {
        if self.connected(u, v)? {
            return Ok(false);
        }
        let (a, b) = (u as usize, v as usize);
        self.evert(a);
        self.t[a].par = b as u32;
        self.edges.insert(edge_key(u, v));
        Ok(true)
    }

    pub fn cut(&mut self, u: Vid, v: Vid) -> Result<(), ForestError> {
        let (a, b) = (self.check(u)?, self.check(v)?);
        if !self.edges.remove(&edge_key(u, v)) {
            return Err(ForestError::EdgeAbsent(u, v));
        }
        self.evert(a);
        self.access(b);
        // The exposed path is exactly a-b with a on the left.
        debug_assert_eq!(self.t[b].ch[0], a as u32);
        self.t[b].ch[0] = NIL;
        self.t[a].par = NIL;
        self.pull(b);
        Ok(())
    }

    /// Edge count of the tree path from `u` to `v`, `None` if disconnected.
    pub fn pathlen(&mut self, u: Vid, v: Vid) -> Result<Option<usize>, ForestError> {
        if !self.connected(u, v)? {
            return Ok(None);
        }
        let (a, b) = (u as usize, v as usize);
        self.evert(a);
        self.access(b);
        Ok(Some(self.t[b].size as usize - 1))
    }

    /// The tree path from `u` to `v` as consecutive edges.
    pub fn path(&mut self, u: Vid, v: Vid) -> Result<Option<Vec<(Vid, Vid)>>, ForestError> {
        if !self.connected(u, v)? {
            return Ok(None);
        }
        let (a, b) = (u as usize, v as usize);
        self.evert(a);
        self.access(b);
        let mut verts = Vec::with_capacity(self.t[b].size as usize);
        let mut stack = Vec::new();
        let mut x = b as u32;
        loop {
            while x != NIL {
                self.push(x as usize);
                stack.push(x);
                x = self.t[x as usize].ch[0];
            }
            let Some(y) = stack.pop() else { break };
            verts.push(y);
            x = self.t[y as usize].ch[1];
        }
        Ok(Some(verts.windows(2).map(|w| (w[0], w[1])).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    fn bfs_path(g: &Graph, u: Vid, v: Vid) -> Option<Vec<(Vid, Vid)>> {
        let mut prev = vec![u32::MAX; g.n()];
        prev[u as usize] = u;
        let mut q = VecDeque::from([u]);
        while let Some(x) = q.pop_front() {
            for &y in g.neighbors(x) {
                if prev[y as usize] == u32::MAX {
                    prev[y as usize] = x;
                    q.push_back(y);
                }
            }
        }
        if prev[v as usize] == u32::MAX {
            return None;
        }
        let mut out = Vec::new();
        let mut x = v;
        while x != u {
            out.push((prev[x as usize], x));
            x = prev[x as usize];
        }
        out.reverse();
        Some(out)
    }

    #[test]
    fn small_examples() {
        let mut f = DynForest::new(5);
        assert_eq!(f.pathlen(2, 2).unwrap(), Some(0));
        assert_eq!(f.pathlen(0, 1).unwrap(), None);
        assert!(f.link(1, 2).unwrap());
        assert!(f.link(2, 3).unwrap());
        assert!(!f.link(1, 3).unwrap());
        assert_eq!(f.path(1, 3).unwrap(), Some(vec![(1, 2), (2, 3)]));
        assert_eq!(f.path(1, 2).unwrap(), Some(vec![(1, 2)]));
        assert!(f.link(3, 4).unwrap());
        assert_eq!(f.pathlen(1, 4).unwrap(), Some(3));
        f.cut(2, 3).unwrap();
        assert_eq!(f.pathlen(1, 4).unwrap(), None);
        assert!(f.link(2, 3).unwrap());
        assert_eq!(f.cut(0, 1), Err(ForestError::EdgeAbsent(0, 1)));
        assert!(f.link(9, 0).is_err());
    }

    fn mirror(seed: u64, n: usize, ops: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = DynForest::new(n);
        let mut g = Graph::new(n);
        let mut edges: Vec<(Vid, Vid)> = Vec::new();
        for _ in 0..ops {
            let a = rng.gen_range(0..n as Vid);
            let b = rng.gen_range(0..n as Vid);
            match rng.gen_range(0..4) {
                0 | 1 => {
                    let want = a != b && bfs_path(&g, a, b).is_none();
                    assert_eq!(f.link(a, b).unwrap(), want);
                    if want {
                        g.add_edge(a, b).unwrap();
                        edges.push((a, b));
                    }
                }
                2 if !edges.is_empty() => {
                    let (x, y) = edges.swap_remove(rng.gen_range(0..edges.len()));
                    f.cut(x, y).unwrap();
                    g.remove_edge(x, y).unwrap();
                }
                _ => {
                    let want = bfs_path(&g, a, b);
                    assert_eq!(f.pathlen(a, b).unwrap(), want.as_ref().map(|p| p.len()));
                    assert_eq!(f.path(a, b).unwrap(), want);
                    assert_eq!(f.connected(a, b).unwrap(), want.is_some());
                }
            }
        }
        assert_eq!(f.m(), g.m());
    }

    #[test]
    fn mirrors_naive_forest() {
        mirror(1, 8, 20_000);
        mirror(2, 60, 50_000);
        mirror(3, 400, 30_000);
    }
}
