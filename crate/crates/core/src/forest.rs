//! Plain rooted forests and elimination-forest checks.

use crate::graph::{Graph, Vid};
use crate::oracle;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("vertex {0} out of range")]
    OutOfRange(Vid),
    #[error("vertex {0} is not part of the forest")]
    Absent(Vid),
    #[error("parent pointers contain a cycle through {0}")]
    Cycle(Vid),
}

/// Rooted forest over a subset of `0..n`.
///
/// Vertices outside the subset are "absent"; they have no parent and are
/// skipped by every query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimForest {
    parent: Vec<Option<Vid>>,
    present: Vec<bool>,
}

impl ElimForest {
    /// All of `0..n` as roots.
    pub fn new(n: usize) -> Self {
        ElimForest {
            parent: vec![None; n],
            present: vec![true; n],
        }
    }

    /// Only `verts` present, all of them roots.
    pub fn over(n: usize, verts: &[Vid]) -> Self {
        let mut present = vec![false; n];
        for &v in verts {
            present[v as usize] = true;
        }
        ElimForest {
            parent: vec![None; n],
            present,
        }
    }

    /// Every vertex present, with the given parents.
    pub fn from_parents(parent: Vec<Option<Vid>>) -> Result<Self, ForestError> {
        let n = parent.len();
        let f = ElimForest {
            parent,
            present: vec![true; n],
        };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), ForestError> {
        let n = self.parent.len();
        for v in 0..n {
            if let Some(p) = self.parent[v] {
                if p as usize >= n {
                    return Err(ForestError::OutOfRange(p));
                }
                if !self.present[v] || !self.present[p as usize] {
                    return Err(ForestError::Absent(p));
                }
            }
        }
        // 0 = unvisited, 1 = on the current walk, 2 = finished.
        let mut state = vec![0u8; n];
        for s in 0..n {
            let mut path = Vec::new();
            let mut x = s;
            loop {
                if state[x] == 1 {
                    return Err(ForestError::Cycle(x as Vid));
                }
                if state[x] == 2 {
                    break;
                }
                state[x] = 1;
                path.push(x);
                match self.parent[x] {
                    Some(p) => x = p as usize,
                    None => break,
                }
            }
            for p in path {
                state[p] = 2;
            }
        }
        Ok(())
    }

    /// Sets the parent of `v`. Both must be present; cycles are not checked.
    pub fn set_parent(&mut self, v: Vid, p: Option<Vid>) -> Result<(), ForestError> {
        if !self.contains(v) {
            return Err(ForestError::Absent(v));
        }
        if let Some(p) = p {
            if !self.contains(p) {
                return Err(ForestError::Absent(p));
            }
        }
        self.parent[v as usize] = p;
        Ok(())
    }

    /// Universe size.
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn contains(&self, v: Vid) -> bool {
        (v as usize) < self.present.len() && self.present[v as usize]
    }

    pub fn vertices(&self) -> Vec<Vid> {
        (0..self.n() as Vid).filter(|&v| self.present[v as usize]).collect()
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parent(&self, v: Vid) -> Option<Vid> {
        self.parent[v as usize]
    }

    pub fn parents(&self) -> &[Option<Vid>] {
        &self.parent
    }

    pub fn roots(&self) -> Vec<Vid> {
        (0..self.n() as Vid)
            .filter(|&v| self.present[v as usize] && self.parent[v as usize].is_none())
            .collect()
    }

    /// Children lists, sorted.
    pub fn children(&self) -> Vec<Vec<Vid>> {
        let mut ch = vec![Vec::new(); self.n()];
        for v in 0..self.n() {
            if let Some(p) = self.parent[v] {
                ch[p as usize].push(v as Vid);
            }
        }
        ch
    }

    /// Depth with roots at depth 1; absent vertices get 0.
    pub fn depths(&self) -> Vec<u32> {
        let n = self.n();
        let mut depth = vec![0u32; n];
        for v in 0..n {
            if !self.present[v] || depth[v] != 0 {
                continue;
            }
            let mut path = vec![v];
            let mut x = v;
            while let Some(p) = self.parent[x] {
                if depth[p as usize] != 0 {
                    break;
                }
                x = p as usize;
                path.push(x);
            }
            let top = *path.last().unwrap();
            let mut d = match self.parent[top] {
                Some(p) => depth[p as usize],
                None => 0,
            };
            for &y in path.iter().rev() {
                d += 1;
                depth[y] = d;
            }
        }
        depth
    }

    /// Post-order: every vertex after all its descendants.
    pub fn postorder(&self) -> Vec<Vid> {
        let ch = self.children();
        let mut out = Vec::with_capacity(self.len());
        for r in self.roots() {
            let mut stack = vec![(r, 0usize)];
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if *i < ch[v as usize].len() {
                    let c = ch[v as usize][*i];
                    *i += 1;
                    stack.push((c, 0));
                } else {
                    out.push(v);
                    stack.pop();
                }
            }
        }
        out
    }

    /// Height of the subtree rooted at each vertex (1 for leaves).
    pub fn subtree_heights(&self) -> Vec<u32> {
        let mut h = vec![0u32; self.n()];
        for v in self.postorder() {
            let hv = h[v as usize] + 1;
            h[v as usize] = hv;
            if let Some(p) = self.parent[v as usize] {
                h[p as usize] = h[p as usize].max(hv);
            }
        }
        h
    }

    pub fn height(&self) -> u32 {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// `v` and its ancestors, bottom-up.
    pub fn ancestors(&self, v: Vid) -> Vec<Vid> {
        let mut out = vec![v];
        let mut x = v;
        while let Some(p) = self.parent[x as usize] {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn is_ancestor(&self, a: Vid, v: Vid) -> bool {
        let mut x = v;
        loop {
            if x == a {
                return true;
            }
            match self.parent[x as usize] {
                Some(p) => x = p,
                None => return false,
            }
        }
    }

    /// `desc(v)` including `v`, sorted.
    pub fn descendants(&self, v: Vid) -> Vec<Vid> {
        let ch = self.children();
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            i += 1;
            out.extend_from_slice(&ch[x as usize]);
        }
        out.sort_unstable();
        out
    }

    /// Whether `{u, v}` is straight (one is an ancestor of the other).
    pub fn straight(&self, u: Vid, v: Vid) -> bool {
        self.is_ancestor(u, v) || self.is_ancestor(v, u)
    }

    /// SReach per vertex: the neighbours of `desc(v)` outside it, sorted.
    /// Edges with an absent endpoint are ignored.
    pub fn sreach(&self, g: &Graph) -> Vec<Vec<Vid>> {
        let mut out: Vec<Vec<Vid>> = vec![Vec::new(); self.n()];
        let depth = self.depths();
        let ch = self.children();
        for v in self.postorder() {
            let mut s: Vec<Vid> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| self.contains(w) && depth[w as usize] < depth[v as usize])
                .collect();
            for &c in &ch[v as usize] {
                s.extend(out[c as usize].iter().copied().filter(|&w| w != v));
            }
            s.sort_unstable();
            s.dedup();
            out[v as usize] = s;
        }
        out
    }

    /// NeiUp per vertex: neighbours that are strict ancestors, sorted.
    pub fn neiup(&self, g: &Graph) -> Vec<Vec<Vid>> {
        let mut out = vec![Vec::new(); self.n()];
        for v in self.vertices() {
            let mut s: Vec<Vid> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| self.contains(w) && w != v && self.is_ancestor(w, v))
                .collect();
            s.sort_unstable();
            out[v as usize] = s;
        }
        out
    }

    /// Removes `k` from the forest; the rest keeps its parents (roots of the
    /// remainder lose their parent).
    pub fn without(&self, k: &[Vid]) -> ElimForest {
        let mut f = self.clone();
        for &v in k {
            f.present[v as usize] = false;
            f.parent[v as usize] = None;
        }
        for v in 0..f.n() {
            if let Some(p) = f.parent[v] {
                if !f.present[p as usize] {
                    f.parent[v] = None;
                }
            }
        }
        f
    }
}

/// Whether every edge of `g` between present vertices of `f` is straight and
/// every vertex of `g` is present.
pub fn validate_elim_forest(g: &Graph, f: &ElimForest) -> bool {
    if f.n() != g.n() || f.len() != g.n() {
        return false;
    }
    g.edges().into_iter().all(|(u, v)| f.straight(u, v))
}

/// Whether `f` is a recursively optimal elimination forest of `g`, checked
/// against the brute-force treedepth oracle.
pub fn is_recursively_optimal(g: &Graph, f: &ElimForest) -> bool {
    if !validate_elim_forest(g, f) {
        return false;
    }
    let heights = f.subtree_heights();
    let mut oracle = oracle::SubsetTd::new(g);
    for v in f.vertices() {
        let desc = f.descendants(v);
        let h = g.induced(&desc);
        if h.components().len() != 1 {
            return false;
        }
        let want = heights[v as usize];
        match oracle.treedepth_capped(&desc, want) {
            Some(t) if t == want => {}
            _ => return false,
        }
    }
    true
}

/// `F|_A`: the forest on `a` inheriting the ancestor relation of `f`.
pub fn restrict_forest(f: &ElimForest, a: &[Vid]) -> ElimForest {
    let mut out = ElimForest::over(f.n(), a);
    for &v in a {
        let mut x = f.parent(v);
        while let Some(p) = x {
            if out.contains(p) {
                break;
            }
            x = f.parent(p);
        }
        out.parent[v as usize] = x;
    }
    out
}
