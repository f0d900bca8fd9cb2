//! Core extraction and reattachment on explicit (graph, forest) pairs.

use crate::forest::ElimForest;
use crate::graph::{Graph, Vid};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("residual tree rooted at {0} has a neighbourhood that is not straight")]
    NotAttachable(Vid),
}

/// A prefix `K` of a forest together with its appendices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorePrefix {
    /// Sorted.
    pub members: Vec<Vid>,
    /// Ancestor-minimal vertices outside `members`, sorted.
    pub appendices: Vec<Vid>,
}

impl CorePrefix {
    pub fn new(f: &ElimForest, mut members: Vec<Vid>) -> Self {
        members.sort_unstable();
        members.dedup();
        let appendices = appendices(f, &members);
        CorePrefix {
            members,
            appendices,
        }
    }

    pub fn contains(&self, v: Vid) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Vertices outside `k` whose parent is in `k` or which are roots.
pub fn appendices(f: &ElimForest, k: &[Vid]) -> Vec<Vid> {
    let mut inside = vec![false; f.n()];
    for &v in k {
        inside[v as usize] = true;
    }
    f.vertices()
        .into_iter()
        .filter(|&v| !inside[v as usize] && f.parent(v).is_none_or(|p| inside[p as usize]))
        .collect()
}

/// Whether `k` is nonempty and closed under taking parents.
pub fn is_prefix(f: &ElimForest, k: &[Vid]) -> bool {
    let mut inside = vec![false; f.n()];
    for &v in k {
        if !f.contains(v) {
            return false;
        }
        inside[v as usize] = true;
    }
    !k.is_empty()
        && k.iter()
            .all(|&v| f.parent(v).is_none_or(|p| inside[p as usize]))
}

/// Subsets of `s` with at most two elements, the empty set first.
pub(crate) fn small_subsets(s: &[Vid]) -> Vec<Vec<Vid>> {
    let mut out = vec![Vec::new()];
    for (i, &a) in s.iter().enumerate() {
        out.push(vec![a]);
        for &b in &s[i + 1..] {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Whether sorted `x` is a subset of sorted `y`.
pub(crate) fn is_subset(x: &[Vid], y: &[Vid]) -> bool {
    let mut j = 0;
    for &a in x {
        while j < y.len() && y[j] < a {
            j += 1;
        }
        if j == y.len() || y[j] != a {
            return false;
        }
    }
    true
}

/// Size bound for [`find_core`] with `|L| = l` on a forest of height `d`.
///
/// Every recursion node keeps at most `q(d^2+1)` heaviest children plus at
/// most `l` forced ones; with `l = 0` this is `q((q(d^2+1))^d - 1)/(q(d^2+1) - 1)`.
pub fn core_size_bound(d: u32, q: u32, l: u32) -> u128 {
    let a = q as u128 * (d as u128 * d as u128 + 1);
    let mut level = q as u128 + l as u128;
    let mut total = 0u128;
    for _ in 0..d {
        total = total.saturating_add(level);
        level = level.saturating_mul(a).saturating_add(l as u128);
    }
    total
}

/// A `q`-core of `(g, f)` containing `anc(l)`.
///
/// Among children of equal subtree height the smaller id is marked first.
pub fn find_core(g: &Graph, f: &ElimForest, l: &[Vid], q: usize) -> CorePrefix {
    let sreach = f.sreach(g);
    let heights = f.subtree_heights();
    let children = f.children();
    let mut forced = vec![false; f.n()];
    for &v in l {
        for a in f.ancestors(v) {
            forced[a as usize] = true;
        }
    }
    let mut marked = vec![false; f.n()];
    let mut out = Vec::new();
    let mark_among = |kids: &[Vid], scope: &[Vid], marked: &mut Vec<bool>| -> Vec<Vid> {
        let mut r: Vec<Vid> = kids.iter().copied().filter(|&w| forced[w as usize]).collect();
        let mut order = kids.to_vec();
        order.sort_by_key(|&w| (std::cmp::Reverse(heights[w as usize]), w));
        for x in small_subsets(scope) {
            let mut c = q;
            for &w in &order {
                if c == 0 {
                    break;
                }
                if is_subset(&x, &sreach[w as usize]) {
                    if !r.contains(&w) {
                        r.push(w);
                    }
                    c -= 1;
                }
            }
        }
        for &w in &r {
            marked[w as usize] = true;
        }
        r
    };
    let roots = f.roots();
    let mut stack: Vec<Vid> = mark_among(&roots, &[], &mut marked);
    while let Some(u) = stack.pop() {
        out.push(u);
        let mut scope = sreach[u as usize].clone();
        scope.push(u);
        scope.sort_unstable();
        let r = mark_among(&children[u as usize], &scope, &mut marked);
        stack.extend(r);
    }
    CorePrefix::new(f, out)
}

/// Checks the `q`-core condition for every appendix of `k`.
pub fn verify_qcore(g: &Graph, f: &ElimForest, k: &CorePrefix, q: usize) -> bool {
    if !is_prefix(f, &k.members) {
        return false;
    }
    let sreach = f.sreach(g);
    let heights = f.subtree_heights();
    let children = f.children();
    let roots = f.roots();
    for &u in &k.appendices {
        let sibs: &[Vid] = match f.parent(u) {
            Some(p) => &children[p as usize],
            None => &roots,
        };
        for x in small_subsets(&sreach[u as usize]) {
            let count = sibs
                .iter()
                .filter(|&&w| {
                    w != u
                        && k.contains(w)
                        && is_subset(&x, &sreach[w as usize])
                        && heights[w as usize] >= heights[u as usize]
                })
                .count();
            if count < q {
                return false;
            }
        }
    }
    true
}

/// Trees of `r` as (root, vertex set).
fn trees(r: &ElimForest) -> Vec<(Vid, Vec<Vid>)> {
    r.roots().into_iter().map(|t| (t, r.descendants(t))).collect()
}

/// `N_h(S)` for a vertex set `s`, sorted.
fn neighbourhood(h: &Graph, s: &[Vid]) -> Vec<Vid> {
    let mut inside = vec![false; h.n()];
    for &v in s {
        inside[v as usize] = true;
    }
    let mut out: Vec<Vid> = s
        .iter()
        .flat_map(|&v| h.neighbors(v).iter().copied())
        .filter(|&w| !inside[w as usize])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Deepest vertex of a straight set in `fk`, or `Err` if not straight.
fn deepest(fk: &ElimForest, depth: &[u32], set: &[Vid]) -> Result<Option<Vid>, ()> {
    let Some(&m) = set.iter().max_by_key(|&&v| depth[v as usize]) else {
        return Ok(None);
    };
    if set.iter().all(|&a| fk.contains(a) && fk.is_ancestor(a, m)) {
        Ok(Some(m))
    } else {
        Err(())
    }
}

pub fn is_attachable(h: &Graph, fk: &ElimForest, r: &ElimForest) -> bool {
    let depth = fk.depths();
    trees(r)
        .iter()
        .all(|(_, s)| deepest(fk, &depth, &neighbourhood(h, s)).is_ok())
}

/// Attachment points of the roots of `r`.
fn attach_points(
    h: &Graph,
    fk: &ElimForest,
    r: &ElimForest,
) -> Result<Vec<(Vid, Option<Vid>)>, CoreError> {
    let depth = fk.depths();
    trees(r)
        .into_iter()
        .map(|(t, s)| {
            deepest(fk, &depth, &neighbourhood(h, &s))
                .map(|m| (t, m))
                .map_err(|_| CoreError::NotAttachable(t))
        })
        .collect()
}

/// The extension of `fk` via `r`.
pub fn extend_forest(h: &Graph, fk: &ElimForest, r: &ElimForest) -> Result<ElimForest, CoreError> {
    let points = attach_points(h, fk, r)?;
    let mut parent = vec![None; h.n()];
    for v in fk.vertices() {
        parent[v as usize] = fk.parent(v);
    }
    for v in r.vertices() {
        parent[v as usize] = r.parent(v);
    }
    for (t, m) in points {
        parent[t as usize] = m;
    }
    let mut out = ElimForest::over(h.n(), &[fk.vertices(), r.vertices()].concat());
    for v in out.vertices() {
        out.set_parent(v, parent[v as usize]).expect("present");
    }
    Ok(out)
}

/// Sibling substitution: every root of `r` gets a sibling from `K` in the
/// extension whose `fk`-subtree is at least as tall.
pub fn has_ssp(h: &Graph, fk: &ElimForest, r: &ElimForest) -> bool {
    let Ok(points) = attach_points(h, fk, r) else {
        return false;
    };
    let kh = fk.subtree_heights();
    let rh = r.subtree_heights();
    let kc = fk.children();
    let kroots = fk.roots();
    points.into_iter().all(|(t, m)| {
        let sibs: &[Vid] = match m {
            Some(m) => &kc[m as usize],
            None => &kroots,
        };
        sibs.iter().any(|&z| kh[z as usize] >= rh[t as usize])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{is_recursively_optimal, restrict_forest, validate_elim_forest};
    use crate::solver::static_elim_forest;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star(leaves: usize) -> (Graph, ElimForest) {
        let e: Vec<_> = (1..=leaves as Vid).map(|v| (0, v)).collect();
        let g = Graph::from_edges(leaves + 1, &e);
        let mut p = vec![Some(0); leaves + 1];
        p[0] = None;
        (g, ElimForest::from_parents(p).unwrap())
    }

    #[test]
    fn star_core() {
        let (g, f) = star(5);
        let k = find_core(&g, &f, &[0], 2);
        // X ranges over {}, {0}: two heaviest leaves each, the same two.
        assert_eq!(k.members, vec![0, 1, 2]);
        assert!(verify_qcore(&g, &f, &k, 2));
        let thin = CorePrefix::new(&f, vec![0, 1]);
        assert!(!verify_qcore(&g, &f, &thin, 2));
        let all = CorePrefix::new(&f, (0..6).collect());
        assert!(all.appendices.is_empty());
        assert!(verify_qcore(&g, &f, &all, 9));
    }

    #[test]
    fn single_vertex_core() {
        let g = Graph::new(1);
        let f = ElimForest::new(1);
        assert_eq!(find_core(&g, &f, &[0], 1).members, vec![0]);
    }

    #[test]
    fn attach_p3_and_c4() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let fk = ElimForest::over(3, &[1]);
        let r = ElimForest::over(3, &[0, 2]);
        assert!(is_attachable(&p3, &fk, &r));
        let e = extend_forest(&p3, &fk, &r).unwrap();
        assert_eq!(e.parent(0), Some(1));
        assert_eq!(e.parent(2), Some(1));
        assert_eq!(e.height(), 2);
        assert!(is_attachable(&p3, &fk, &ElimForest::over(3, &[])));
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let fk = ElimForest::over(4, &[0, 2]);
        let r = ElimForest::over(4, &[1]);
        assert!(!is_attachable(&c4, &fk, &r));
        assert_eq!(extend_forest(&c4, &fk, &r), Err(CoreError::NotAttachable(1)));
    }

    #[test]
    fn ssp_counterexample() {
        // Path a-b-c hangs under root 0 via c; the core side under 0 is only leaf 4.
        let h = Graph::from_edges(5, &[(0, 4), (0, 3), (1, 2), (2, 3)]);
        let mut fk = ElimForest::over(5, &[0, 4]);
        fk.set_parent(4, Some(0)).unwrap();
        let mut r = ElimForest::over(5, &[1, 2, 3]);
        r.set_parent(1, Some(2)).unwrap();
        r.set_parent(3, Some(2)).unwrap();
        assert!(is_attachable(&h, &fk, &r));
        assert!(!has_ssp(&h, &fk, &r));
        assert!(has_ssp(&h, &fk, &ElimForest::over(5, &[])));
    }

    #[test]
    fn bound_formula() {
        // l = 0 reduces to the closed form.
        for d in 1..5u32 {
            for q in 1..5u32 {
                let a = (q * (d * d + 1)) as u128;
                let closed = q as u128 * (a.pow(d) - 1) / (a - 1);
                assert_eq!(core_size_bound(d, q, 0), closed);
            }
        }
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, p: f64) -> (Graph, ElimForest) {
        let mut g = Graph::new(n);
        for a in 0..n as Vid {
            for b in a + 1..n as Vid {
                if rng.gen_bool(p) {
                    g.add_edge(a, b).unwrap();
                }
            }
        }
        let f = static_elim_forest(&g).unwrap();
        (g, f)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn core_properties(seed in any::<u64>(), n in 1usize..16, q in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, f) = random_instance(&mut rng, n, 0.2);
            let l: Vec<Vid> = (0..2).map(|_| rng.gen_range(0..n as Vid)).collect();
            let k = find_core(&g, &f, &l, q);
            prop_assert!(is_prefix(&f, &k.members));
            for &v in &l {
                prop_assert!(k.contains(v));
            }
            prop_assert!(verify_qcore(&g, &f, &k, q));
            let bound = core_size_bound(f.height(), q as u32, l.len() as u32);
            prop_assert!(k.members.len() as u128 <= bound);
            // Connectivity of cores: SReach equals the neighbourhood inside K.
            let sreach = f.sreach(&g);
            let gk_sub: Vec<Vid> = k.members.clone();
            for &u in &k.members {
                let part: Vec<Vid> = f.descendants(u).into_iter().filter(|w| k.contains(*w)).collect();
                let hh = g.induced(&part);
                prop_assert_eq!(hh.components().len(), 1);
                let mut nb: Vec<Vid> = part.iter()
                    .flat_map(|&w| g.neighbors(w).iter().copied())
                    .filter(|w| gk_sub.binary_search(w).is_ok() && !part.contains(w))
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                prop_assert_eq!(&nb, &sreach[u as usize]);
            }
        }

        #[test]
        fn round_trip_extension(seed in any::<u64>(), n in 1usize..16, q in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, f) = random_instance(&mut rng, n, 0.25);
            let k = find_core(&g, &f, &[], q);
            let fk = restrict_forest(&f, &k.members);
            let r = f.without(&k.members);
            prop_assert!(is_attachable(&g, &fk, &r));
            prop_assert_eq!(extend_forest(&g, &fk, &r).unwrap(), f);
        }

        #[test]
        fn ssp_and_uber(seed in any::<u64>(), n in 2usize..14, ell in 0usize..2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, f) = random_instance(&mut rng, n, 0.25);
            let d = f.height() as usize + 1;
            let k = find_core(&g, &f, &[], d + ell + 1);
            // Restricted augmentation: up to ell removals and some additions inside K.
            let mut h = g.clone();
            let inner: Vec<(Vid, Vid)> = g.edges().into_iter()
                .filter(|&(a, b)| k.contains(a) && k.contains(b)).collect();
            for _ in 0..ell {
                if !inner.is_empty() {
                    let (a, b) = inner[rng.gen_range(0..inner.len())];
                    h.remove_edge(a, b).unwrap();
                }
            }
            if k.members.len() >= 2 {
                let a = k.members[rng.gen_range(0..k.members.len())];
                let b = k.members[rng.gen_range(0..k.members.len())];
                if a != b {
                    h.add_edge(a, b).unwrap();
                }
            }
            let hk = h.induced(&k.members);
            let local = static_elim_forest(&hk).unwrap();
            prop_assume!(local.height() as usize <= d);
            let mut fk = ElimForest::over(n, &k.members);
            for (i, &v) in k.members.iter().enumerate() {
                fk.set_parent(v, local.parent(i as Vid).map(|p| k.members[p as usize])).unwrap();
            }
            let r = f.without(&k.members);
            prop_assert!(is_attachable(&h, &fk, &r));
            prop_assert!(has_ssp(&h, &fk, &r));
            let ext = extend_forest(&h, &fk, &r).unwrap();
            prop_assert!(validate_elim_forest(&h, &ext));
            prop_assert!(is_recursively_optimal(&h, &ext));
        }
    }
}
