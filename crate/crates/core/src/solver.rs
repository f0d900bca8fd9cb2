//! Exact static treedepth over vertex bitmasks.
//!
//! `td_le(s, b)` decides `td(G[s]) <= b` for a connected set `s` by trying every
//! root and recursing into the components left behind. Answers are memoised
//! as an interval `[lo, hi]` on the treedepth of `s`.

use crate::forest::ElimForest;
use crate::graph::{Graph, Vid};
use rustc_hash::FxHashMap;
use thiserror::Error;

/// Hard limit on the number of vertices the bitmask solver accepts.
pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("graph has {n} vertices, solver cap is {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("memo table exceeded {0} entries")]
    MemoExceeded(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub vertex_cap: usize,
    pub memo_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            vertex_cap: 64,
            memo_cap: 1 << 24,
        }
    }
}

type Mask = u128;

#[derive(Clone, Copy)]
struct Bounds {
    lo: u32,
    hi: u32,
}

struct Solver {
    adj: Vec<Mask>,
    memo: FxHashMap<Mask, Bounds>,
    memo_cap: usize,
}

#[inline]
fn bits(mut s: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let i = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(i)
        }
    })
}

impl Solver {
    fn new(g: &Graph, cfg: &SolverConfig) -> Result<Self, SolverError> {
        let cap = cfg.vertex_cap.min(MAX_VERTICES);
        if g.n() > cap {
            return Err(SolverError::TooLarge { n: g.n(), cap });
        }
        let adj = (0..g.n() as Vid)
            .map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | (1 << w)))
            .collect();
        Ok(Solver {
            adj,
            memo: FxHashMap::default(),
            memo_cap: cfg.memo_cap,
        })
    }

    fn components(&self, s: Mask) -> Vec<Mask> {
        let mut out = Vec::new();
        let mut rest = s;
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v];
                }
                next &= rest & !comp;
                comp |= next;
                frontier = next;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    fn edges(&self, s: Mask) -> u32 {
        bits(s).map(|v| (self.adj[v] & s).count_ones()).sum::<u32>() / 2
    }

    /// `td(G[s]) <= b` for connected nonempty `s`.
    fn td_le(&mut self, s: Mask, b: u32) -> Result<bool, SolverError> {
        let n = s.count_ones();
        if n <= b {
            return Ok(true);
        }
        if b <= 1 {
            return Ok(false);
        }
        if let Some(bd) = self.memo.get(&s) {
            if bd.hi <= b {
                return Ok(true);
            }
            if bd.lo > b {
                return Ok(false);
            }
        }
        let m = self.edges(s);
        // Every vertex has at most b-1 ancestors, the top b-1 levels fewer.
        let ok = if m as u64 > (b as u64 - 1) * n as u64 - (b as u64 * (b as u64 - 1)) / 2 {
            false
        } else if b == 2 {
            m == n - 1 && bits(s).any(|v| (self.adj[v] & s).count_ones() == n - 1)
        } else {
            let mut order: Vec<usize> = bits(s).collect();
            order.sort_by_key(|&v| std::cmp::Reverse((self.adj[v] & s).count_ones()));
            let mut found = false;
            for v in order {
                let mut comps = self.components(s & !(1 << v));
                comps.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
                let mut all = true;
                for c in comps {
                    if !self.td_le(c, b - 1)? {
                        all = false;
                        break;
                    }
                }
                if all {
                    found = true;
                    break;
                }
            }
            found
        };
        if self.memo.len() >= self.memo_cap {
            return Err(SolverError::MemoExceeded(self.memo_cap));
        }
        let e = self.memo.entry(s).or_insert(Bounds { lo: 1, hi: n });
        if ok {
            e.hi = e.hi.min(b);
        } else {
            e.lo = e.lo.max(b + 1);
        }
        Ok(ok)
    }

    /// Exact treedepth of connected `s`, scanning upward from `from`.
    fn td(&mut self, s: Mask, from: u32) -> Result<u32, SolverError> {
        let mut b = from.max(1);
        while !self.td_le(s, b)? {
            b += 1;
        }
        Ok(b)
    }

    /// Builds a recursively optimal tree for connected `s` of treedepth `t`.
    fn build(
        &mut self,
        s: Mask,
        t: u32,
        parent: Option<usize>,
        out: &mut Vec<Option<usize>>,
    ) -> Result<(), SolverError> {
        for v in bits(s) {
            let comps = self.components(s & !(1 << v));
            let mut all = true;
            for &c in &comps {
                if !self.td_le(c, t - 1)? {
                    all = false;
                    break;
                }
            }
            if !all {
                continue;
            }
            out[v] = parent;
            for c in comps {
                let tc = self.td(c, 1)?;
                self.build(c, tc, Some(v), out)?;
            }
            return Ok(());
        }
        unreachable!("treedepth of a connected set admits a root")
    }
}

fn full(n: usize) -> Mask {
    if n == 128 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

/// Recursively optimal elimination forest of `g`. Ties between admissible
/// roots go to the smallest vertex id.
pub fn static_elim_forest(g: &Graph) -> Result<ElimForest, SolverError> {
    static_elim_forest_with(g, &SolverConfig::default())
}

pub fn static_elim_forest_with(g: &Graph, cfg: &SolverConfig) -> Result<ElimForest, SolverError> {
    Ok(solve_capped(g, u32::MAX, cfg)?.expect("uncapped solve always succeeds"))
}

/// Like [`static_elim_forest_with`] but gives up with `None` as soon as some
/// component is known to need more than `cap` levels.
pub fn solve_capped(
    g: &Graph,
    cap: u32,
    cfg: &SolverConfig,
) -> Result<Option<ElimForest>, SolverError> {
    let mut s = Solver::new(g, cfg)?;
    let comps = s.components(full(g.n()));
    let mut tds = Vec::with_capacity(comps.len());
    for &c in &comps {
        if cap != u32::MAX && !s.td_le(c, cap)? {
            return Ok(None);
        }
        tds.push(s.td(c, 1)?);
    }
    let mut parent = vec![None; g.n()];
    for (c, t) in comps.into_iter().zip(tds) {
        s.build(c, t, None, &mut parent)?;
    }
    let parent = parent.into_iter().map(|p| p.map(|p| p as Vid)).collect();
    Ok(Some(ElimForest::from_parents(parent).expect("solver emits a forest")))
}

/// Exact treedepth of `g` (0 for the empty graph).
pub fn treedepth(g: &Graph) -> Result<u32, SolverError> {
    let mut s = Solver::new(g, &SolverConfig::default())?;
    let mut best = 0;
    for c in s.components(full(g.n())) {
        best = best.max(s.td(c, best)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::is_recursively_optimal;
    use crate::oracle::treedepth_bf;
    use proptest::prelude::*;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n as Vid).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &e)
    }

    #[test]
    fn known_values() {
        assert_eq!(treedepth(&Graph::new(0)).unwrap(), 0);
        assert_eq!(treedepth(&Graph::new(3)).unwrap(), 1);
        assert_eq!(treedepth(&path(7)).unwrap(), 3);
        assert_eq!(treedepth(&path(8)).unwrap(), 4);
        let mut k5 = Graph::new(5);
        for a in 0..5 {
            for b in a + 1..5 {
                k5.add_edge(a, b).unwrap();
            }
        }
        assert_eq!(treedepth(&k5).unwrap(), 5);
    }

    #[test]
    fn forest_of_p3_roots_middle() {
        let f = static_elim_forest(&path(3)).unwrap();
        assert_eq!(f.roots(), vec![1]);
    }

    #[test]
    fn cap_rejects_early() {
        let cfg = SolverConfig::default();
        assert!(solve_capped(&path(8), 3, &cfg).unwrap().is_none());
        assert!(solve_capped(&path(7), 3, &cfg).unwrap().is_some());
    }

    #[test]
    fn too_large_is_an_error() {
        assert!(matches!(
            static_elim_forest(&Graph::new(65)),
            Err(SolverError::TooLarge { .. })
        ));
        let cfg = SolverConfig {
            vertex_cap: 128,
            ..SolverConfig::default()
        };
        assert!(static_elim_forest_with(&path(100), &cfg).is_ok());
    }

    proptest! {
        #[test]
        fn matches_oracle(n in 1usize..10, seed in any::<u64>()) {
            let mut g = Graph::new(n);
            let mut x = seed;
            for a in 0..n as Vid {
                for b in a + 1..n as Vid {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if (x >> 61) < 3 {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            let f = static_elim_forest(&g).unwrap();
            prop_assert_eq!(f.height(), treedepth_bf(&g).unwrap());
            prop_assert!(is_recursively_optimal(&g, &f));
        }
    }
}
