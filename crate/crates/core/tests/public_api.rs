//! The three public structures driven through one random update sequence,
//! each compared with the brute-force oracles.

use dyntd::cycle::LongCycle;
use dyntd::dynamic::{Outcome, TdStructure};
use dyntd::forest::{is_recursively_optimal, validate_elim_forest};
use dyntd::oracle::{has_cycle_at_least_bf, has_k_path_bf, treedepth_bf};
use dyntd::postpone::LongPath;
use dyntd::{Graph, Vid};
use proptest::prelude::*;

fn ops() -> impl Strategy<Value = (usize, usize, Vec<(Vid, Vid)>)> {
    (3usize..10, 2usize..6).prop_flat_map(|(n, k)| {
        let pair = (0..n as Vid, 0..n as Vid);
        (Just(n), Just(k), proptest::collection::vec(pair, 1..120))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Each pair toggles its edge.
    #[test]
    fn structures_agree_with_oracles((n, k, seq) in ops()) {
        let mut lp = LongPath::new(n, k).unwrap();
        let mut lc = LongCycle::new(n, k).unwrap();
        let mut td = TdStructure::new(n, k as u32).unwrap();
        let mut g = Graph::new(n);
        let mut h = Graph::new(n);
        for (a, b) in seq {
            if a == b {
                prop_assert!(lp.insert(a, b).is_err());
                prop_assert!(td.insert(a, b).is_err());
                continue;
            }
            if g.has_edge(a, b) {
                lp.remove(a, b).unwrap();
                lc.remove(a, b).unwrap();
                g.remove_edge(a, b).unwrap();
            } else {
                lp.insert(a, b).unwrap();
                lc.insert(a, b).unwrap();
                g.add_edge(a, b).unwrap();
            }
            prop_assert_eq!(lp.contains(), has_k_path_bf(&g, k));
            prop_assert_eq!(lc.contains(), has_cycle_at_least_bf(&g, k));
            prop_assert_eq!(lp.has_edge(a, b), g.has_edge(a, b));

            if h.has_edge(a, b) {
                td.remove(a, b).unwrap();
                h.remove_edge(a, b).unwrap();
            } else {
                let mut with = h.clone();
                with.add_edge(a, b).unwrap();
                match td.insert(a, b).unwrap() {
                    Outcome::Accepted => h = with,
                    Outcome::Rejected => prop_assert!(treedepth_bf(&with).unwrap() > k as u32),
                }
            }
            let f = td.export_forest().unwrap();
            prop_assert!(validate_elim_forest(&h, &f));
            prop_assert!(is_recursively_optimal(&h, &f));
            prop_assert_eq!(td.height(), treedepth_bf(&h).unwrap().max(1));
        }
    }
}

#[test]
fn out_of_range_is_an_error() {
    let mut lp = LongPath::new(3, 3).unwrap();
    assert!(lp.insert(0, 3).is_err());
    let mut lc = LongCycle::new(3, 3).unwrap();
    assert!(lc.insert(5, 1).is_err());
    let mut td = TdStructure::new(3, 2).unwrap();
    assert!(td.insert(0, 7).is_err());
    assert!(LongPath::new(3, 0).is_err());
}
