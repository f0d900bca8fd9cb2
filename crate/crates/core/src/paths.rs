//! Endpoint-constrained path queries on the k-path mug structure.
//!
//! A query marks a small prefix `K` of the tree containing both endpoints:
//! from every marked vertex it keeps up to `d` children per (pair, length)
//! configuration whose mug is nonempty, plus the ancestors of the endpoints.
//! Any u-v path of the requested length can be rerouted into `G[K]`, where a
//! plain search finishes the job.

use crate::dynamic::{DynError, MugStructure};
use crate::graph::{Graph, GraphError, Vid};
use crate::scheme::{KPath, PathConf, INF};
use crate::store::{RecId, Store, TopId};
use rustc_hash::FxHashSet;

/// Marked prefix for endpoints `u`, `v` (records), or `None` if they lie in
/// different trees.
pub(crate) fn marked_core(
    store: &Store<KPath>,
    top: TopId,
    u: RecId,
    v: RecId,
) -> Option<Vec<RecId>> {
    let r = store.root(u);
    if store.root(v) != r {
        return None;
    }
    let forced: FxHashSet<RecId> = store
        .ancestors(u)
        .into_iter()
        .chain(store.ancestors(v))
        .collect();
    let k = store.scheme.k();
    let lengths: Vec<u8> = (2..k as u8).chain([INF]).collect();
    let quota = store.d as usize;
    let mut out = Vec::new();
    let mut stack = vec![r];
    while let Some(w) = stack.pop() {
        out.push(w);
        let rec = &store.recs[w as usize];
        let mut scope = rec.sreach.clone();
        scope.push(rec.glo);
        scope.sort_unstable();
        let mut marked: FxHashSet<RecId> = FxHashSet::default();
        for (ia, &x) in scope.iter().enumerate() {
            for &y in &scope[ia + 1..] {
                for &j in &lengths {
                    let c = PathConf::new(vec![(x, y)], j);
                    let mut left = quota;
                    for (key, &b) in &rec.kids {
                        if left == 0 {
                            break;
                        }
                        if key.0.binary_search(&x).is_err() || key.0.binary_search(&y).is_err() {
                            continue;
                        }
                        if let Some(mug) = store.buckets[b as usize].mugs.get(&c) {
                            for &z in mug.iter().take(left) {
                                marked.insert(z);
                                left -= 1;
                            }
                        }
                    }
                }
            }
        }
        for z in store.children(Some(w), top) {
            if forced.contains(&z) {
                marked.insert(z);
            }
        }
        let mut next: Vec<RecId> = marked.into_iter().collect();
        next.sort_unstable();
        stack.extend(next);
    }
    Some(out)
}

/// A simple `u`-`v` path on exactly `i` vertices in `g`.
pub(crate) fn exact_in(g: &Graph, u: Vid, v: Vid, i: usize) -> Option<Vec<Vid>> {
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
        let x = *path.last().unwrap();
        if path.len() == i {
            return x == v;
        }
        if x == v {
            return false;
        }
        for &y in g.neighbors(x) {
            if !on[y as usize] {
                on[y as usize] = true;
                path.push(y);
                if go(g, v, i, path, on) {
                    return true;
                }
                path.pop();
                on[y as usize] = false;
            }
        }
        false
    }
    go(g, v, i, &mut path, &mut on).then_some(path)
}

/// Whether `g` has a simple `u`-`v` path on at least `k` vertices.
pub(crate) fn long_in(g: &Graph, u: Vid, v: Vid, k: usize) -> bool {
    if u == v {
        return k <= 1;
    }
    let mut on = vec![false; g.n()];
    on[u as usize] = true;
    let mut path = vec![u];
    // Once the prefix has k - 1 vertices, any way to finish at v avoiding it
    // gives at least k vertices.
    fn go(g: &Graph, v: Vid, k: usize, path: &mut Vec<Vid>, on: &mut [bool]) -> bool {
        let x = *path.last().unwrap();
        if x == v {
            return path.len() >= k;
        }
        if path.len() + 1 >= k {
            let banned: Vec<Vid> = path[..path.len() - 1].to_vec();
            return g.reachable_avoiding(x, v, &banned);
        }
        for &y in g.neighbors(x) {
            if !on[y as usize] {
                on[y as usize] = true;
                path.push(y);
                if go(g, v, k, path, on) {
                    return true;
                }
                path.pop();
                on[y as usize] = false;
            }
        }
        false
    }
    go(g, v, k, &mut path, &mut on)
}

/// `G[K]` for the marked prefix, with the local positions of `u` and `v`.
pub(crate) fn local_core(
    store: &Store<KPath>,
    top: TopId,
    u: RecId,
    v: RecId,
) -> Option<(Vec<RecId>, Graph, Vid, Vid)> {
    let k = marked_core(store, top, u, v)?;
    let (recs, g) = store.induced(&k);
    let pu = recs.iter().position(|&r| r == u)? as Vid;
    let pv = recs.iter().position(|&r| r == v)? as Vid;
    Some((recs, g, pu, pv))
}

impl MugStructure {
    fn check_vertex(&self, x: Vid) -> Result<(), DynError> {
        if (x as usize) < self.n() {
            Ok(())
        } else {
            Err(GraphError::OutOfRange { v: x, n: self.n() }.into())
        }
    }

    /// The marked prefix used to answer queries about `u` and `v`, or `None`
    /// if they are in different trees.
    pub fn path_core(&self, u: Vid, v: Vid) -> Result<Option<Vec<Vid>>, DynError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let mut k = match marked_core(self.store(), self.top(), u, v) {
            Some(k) => k,
            None => return Ok(None),
        };
        k.sort_unstable();
        Ok(Some(k))
    }

    /// A simple `u`-`v` path on exactly `i` vertices (`1 <= i <= k`).
    pub fn path_exact(&self, u: Vid, v: Vid, i: usize) -> Result<Option<Vec<Vid>>, DynError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let Some((recs, g, pu, pv)) = local_core(self.store(), self.top(), u, v) else {
            return Ok(None);
        };
        Ok(exact_in(&g, pu, pv, i).map(|p| p.into_iter().map(|x| recs[x as usize]).collect()))
    }

    /// Whether some simple `u`-`v` path has at least `k` vertices.
    pub fn path_geq_k(&self, u: Vid, v: Vid) -> Result<bool, DynError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let Some((_, g, pu, pv)) = local_core(self.store(), self.top(), u, v) else {
            return Ok(false);
        };
        Ok(long_in(&g, pu, pv, self.k()))
    }
}
