use crate::script::{render_script, Op};
use crate::session::{Answer, Applied, Mode, Session};
use crate::CliError;
use dyntd::forest::{is_recursively_optimal, validate_elim_forest};
use dyntd::graph::Graph;
use dyntd::oracle::{biconnected_components_bf, treedepth_bf};
use dyntd::Vid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Above this vertex count `td` heights are compared on every tenth step
/// only; the brute-force treedepth gets expensive.
const FULL_HEIGHT_CHECK: usize = 14;
/// Replays spent on shrinking a failing script.
const SHRINK_BUDGET: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StressConfig {
    pub mode: Mode,
    pub n: usize,
    pub k: usize,
    pub ops: usize,
    pub seed: u64,
    /// Test hook: pretend the structure answered wrongly at this step.
    /// The reported script is then the raw history, since no replay can
    /// reproduce a fake fault.
    pub inject: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StressReport {
    pub ops: usize,
    pub mismatches: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// Steps on which the answer was compared with the oracle.
    pub answer_checks: usize,
    pub inner_ops: u64,
    pub outer_ops: u64,
    pub detail: Option<String>,
    pub repro: Option<String>,
}

impl StressReport {
    pub fn summary(&self) -> String {
        format!("ops={} mismatches={}", self.ops, self.mismatches)
    }
}

/// Draws the next update. Deletions happen with probability `m / (m + n)`,
/// so the edge count hovers around `n`; insertions pick a uniform absent
/// pair.
fn next_op(rng: &mut ChaCha8Rng, g: &Graph) -> Option<Op> {
    let (n, m) = (g.n(), g.m());
    if n < 2 {
        return None;
    }
    let full = m == n * (n - 1) / 2;
    if m > 0 && (full || rng.gen_bool(m as f64 / (m + n) as f64)) {
        let edges = g.edges();
        let (a, b) = edges[rng.gen_range(0..edges.len())];
        return Some(Op::Del(a, b));
    }
    loop {
        let a = rng.gen_range(0..n as Vid);
        let b = rng.gen_range(0..n as Vid);
        if a != b && !g.has_edge(a, b) {
            return Some(Op::Add(a, b));
        }
    }
}

/// Applies one op and checks what can be checked right away: a refused
/// `td` insertion must push the oracle treedepth over the budget and leave
/// the structure untouched.
fn apply(s: &mut Session, op: Op) -> Result<(Applied, Option<String>), CliError> {
    match op {
        Op::Add(u, v) => {
            let before = match s.td() {
                Some(t) => Some(t.export_forest()?),
                None => None,
            };
            let res = s.add(u, v)?;
            if res == Applied::Rejected {
                let mut with = s.graph().clone();
                with.add_edge(u, v)?;
                let td = treedepth_bf(&with)?;
                if td as usize <= s.k() {
                    return Ok((res, Some(format!("add {u} {v} rejected but treedepth would be {td}"))));
                }
                let t = s.td().expect("only td rejects");
                if Some(t.export_forest()?) != before || t.graph() != s.graph() {
                    return Ok((res, Some(format!("rejected add {u} {v} changed the structure"))));
                }
            }
            Ok((res, None))
        }
        Op::Del(u, v) => Ok((s.del(u, v)?, None)),
        Op::Query(_) => Ok((Applied::Done, None)),
    }
}

/// Full consistency check of the current state. `answer` decides whether
/// the query answer is compared with the oracle.
fn verify(s: &Session, answer: bool, flip: bool) -> Result<Option<String>, CliError> {
    if let Some(t) = s.td() {
        let f = t.export_forest()?;
        if !validate_elim_forest(s.graph(), &f) {
            return Ok(Some("exported forest is not an elimination forest".into()));
        }
        if !is_recursively_optimal(s.graph(), &f) {
            return Ok(Some("exported forest is not recursively optimal".into()));
        }
    }
    if let Some(c) = s.cycle() {
        let inner = c.wrapper().inner().partition();
        let parts: Vec<_> = inner.parts().into_iter().map(|p| p.edges).collect();
        if parts != biconnected_components_bf(inner.graph()) {
            return Ok(Some("partition differs from the biconnected components".into()));
        }
    }
    if answer {
        let mut got = s.answer();
        if flip {
            got = match got {
                Answer::Bool(b) => Answer::Bool(!b),
                Answer::Height(h) => Answer::Height(h + 1),
            };
        }
        let want = s.expected()?;
        if got != want {
            return Ok(Some(format!("answer {got}, oracle {want}")));
        }
    }
    Ok(None)
}

/// Whether replaying `ops` on a fresh structure ends in a failed check.
fn fails(cfg: &StressConfig, ops: &[Op]) -> Result<bool, CliError> {
    let mut s = Session::new(cfg.mode, cfg.n, cfg.k)?;
    for &op in ops {
        if apply(&mut s, op)?.1.is_some() {
            return Ok(true);
        }
    }
    Ok(verify(&s, true, false)?.is_some())
}

/// Greedy shrinking: first the final edge set on its own, then removal of
/// ever smaller chunks of the history.
fn shrink(
    mut fails: impl FnMut(&[Op]) -> Result<bool, CliError>,
    history: Vec<Op>,
    last: &Graph,
) -> Result<Vec<Op>, CliError> {
    let mut budget = SHRINK_BUDGET;
    let mut try_fail = |ops: &[Op]| -> Result<bool, CliError> {
        if budget == 0 {
            return Ok(false);
        }
        budget -= 1;
        fails(ops)
    };
    let direct: Vec<Op> = last.edges().into_iter().map(|(a, b)| Op::Add(a, b)).collect();
    let mut cur = if direct.len() < history.len() && try_fail(&direct)? {
        direct
    } else {
        history
    };
    let mut chunk = cur.len().div_ceil(2);
    while chunk >= 1 {
        let mut i = 0;
        while i < cur.len() {
            let mut cand = cur.clone();
            cand.drain(i..(i + chunk).min(cur.len()));
            if try_fail(&cand)? {
                cur = cand;
            } else {
                i += chunk;
            }
        }
        if chunk == 1 {
            break;
        }
        chunk /= 2;
    }
    Ok(cur)
}

/// Random updates cross-checked against the oracles after every step.
/// Stops at the first mismatch and attaches a shrunk reproduction script.
pub fn stress(cfg: &StressConfig) -> Result<StressReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s = Session::new(cfg.mode, cfg.n, cfg.k)?;
    let mut rep = StressReport::default();
    let mut history = Vec::with_capacity(cfg.ops);
    for step in 0..cfg.ops {
        let Some(op) = next_op(&mut rng, s.graph()) else {
            break;
        };
        history.push(op);
        rep.ops += 1;
        let (res, mut bad) = apply(&mut s, op)?;
        match res {
            Applied::Done if matches!(op, Op::Add(..)) => rep.accepted += 1,
            Applied::Rejected => rep.rejected += 1,
            _ => {}
        }
        let answer = cfg.mode != Mode::Td || cfg.n <= FULL_HEIGHT_CHECK || step % 10 == 0;
        let flip = cfg.inject == Some(step);
        if bad.is_none() {
            bad = verify(&s, answer || flip, flip)?;
            rep.answer_checks += (answer || flip) as usize;
        }
        if let Some(msg) = bad {
            rep.mismatches = 1;
            rep.detail = Some(format!("step {step}: {msg}"));
            let ops = if flip { history } else { shrink(|o| fails(cfg, o), history, s.graph())? };
            let mut replay = Session::new(cfg.mode, cfg.n, cfg.k)?;
            for &op in &ops {
                apply(&mut replay, op)?;
            }
            let mut script = format!(
                "# stress repro: mode={} n={} k={} seed={} ({msg})\n",
                cfg.mode, cfg.n, cfg.k, cfg.seed
            );
            let mut all = ops;
            all.push(Op::Query(Some(replay.expected()?)));
            script.push_str(&render_script(&all));
            rep.repro = Some(script);
            break;
        }
    }
    if let Some(p) = s.path() {
        rep.inner_ops = p.wrapper().inner_ops();
        rep.outer_ops = p.wrapper().outer_ops();
    }
    if let Some(c) = s.cycle() {
        rep.inner_ops = c.wrapper().inner_ops();
        rep.outer_ops = c.wrapper().outer_ops();
    }
    if rep.mismatches == 0 && rep.inner_ops > 3 * rep.outer_ops {
        rep.mismatches = 1;
        rep.detail = Some(format!("{} inner ops for {} outer ops", rep.inner_ops, rep.outer_ops));
    }
    Ok(rep)
}
