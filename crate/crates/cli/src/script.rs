use crate::session::Answer;
use crate::CliError;
use dyntd::Vid;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add(Vid, Vid),
    Del(Vid, Vid),
    Query(Option<Answer>),
}

/// A parsed script line with its 1-based line number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub no: usize,
    pub op: Op,
}

/// Parses the whole script up front so that syntax errors surface before
/// anything runs.
pub fn parse_script(text: &str) -> Result<Vec<Line>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let bad = |msg: String| CliError::Parse { line: no, msg };
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c.trim())),
            None => (raw, None),
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        let ctoks: Vec<&str> = comment.map(|c| c.split_whitespace().collect()).unwrap_or_default();
        let expect = match ctoks.as_slice() {
            ["expect", a] => Some(a.parse::<Answer>().map_err(|_| bad(format!("bad expectation `{a}`")))?),
            ["expect", ..] => return Err(bad("`# expect` takes one value".into())),
            _ => None,
        };
        let vid = |s: &str| s.parse::<Vid>().map_err(|_| bad(format!("bad vertex `{s}`")));
        let op = match toks.as_slice() {
            // A bare comment line, including a stray `# expect`.
            [] => continue,
            ["add", u, v] => Op::Add(vid(u)?, vid(v)?),
            ["del", u, v] => Op::Del(vid(u)?, vid(v)?),
            ["query"] => Op::Query(expect),
            _ => return Err(bad(format!("cannot parse `{}`", body.trim()))),
        };
        if expect.is_some() && !matches!(op, Op::Query(_)) {
            return Err(bad("`# expect` must follow a query".into()));
        }
        out.push(Line { no, op });
    }
    Ok(out)
}

pub fn render_script(ops: &[Op]) -> String {
    let mut s = String::new();
    for op in ops {
        match op {
            Op::Add(u, v) => writeln!(s, "add {u} {v}"),
            Op::Del(u, v) => writeln!(s, "del {u} {v}"),
            Op::Query(None) => writeln!(s, "query"),
            Op::Query(Some(a)) => writeln!(s, "query # expect {a}"),
        }
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        let text = "# header\nadd 0 1\n\n  del 1 2  \nquery # expect true\nquery\nquery # expect 3\n";
        let lines = parse_script(text).unwrap();
        let ops: Vec<Op> = lines.iter().map(|l| l.op).collect();
        assert_eq!(
            ops,
            vec![
                Op::Add(0, 1),
                Op::Del(1, 2),
                Op::Query(Some(Answer::Bool(true))),
                Op::Query(None),
                Op::Query(Some(Answer::Height(3))),
            ]
        );
        assert_eq!(lines[2].no, 5);
        assert_eq!(parse_script(&render_script(&ops)).unwrap().iter().map(|l| l.op).collect::<Vec<_>>(), ops);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("add 0 1\nadd 0\n", 2),
            ("query\nfrob\n", 2),
            ("add 0 x\n", 1),
            ("add 0 1 # expect true\n", 1),
            ("query # expect maybe\n", 1),
        ] {
            match parse_script(text) {
                Err(CliError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
