//! Text graph-file format.
//!
//! One graph per record:
//!
//! ```text
//! graph <name>
//! n=<int>
//! <u>-<v> <u>-<v> ...
//! ```
//!
//! Edge tokens may span several lines; a blank line terminates the record.

use super::Graph;
use crate::error::{Error, Result};
use std::fmt::Write as _;

/// A parsed record: the graph, its name, and non-fatal warnings
/// (currently only "not 3-regular", so test graphs stay loadable).
#[derive(Debug, Clone)]
pub struct NamedGraph {
    pub name: String,
    pub graph: Graph,
    pub warnings: Vec<String>,
}

pub fn load_graphs(text: &str) -> Result<Vec<NamedGraph>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(_, peek)) = lines.peek() {
        if peek.trim().is_empty() {
            lines.next();
            continue;
        }
        let (lineno, header) = lines.next().unwrap();
        let name = header
            .trim()
            .strip_prefix("graph ")
            .ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: format!("expected `graph <name>`, got `{header}`"),
            })?
            .trim()
            .to_string();
        let (lineno_n, nline) = lines.next().ok_or_else(|| Error::Parse {
            line: lineno + 2,
            msg: "missing `n=<int>` line".into(),
        })?;
        let n: usize = nline
            .trim()
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno_n + 1,
                msg: format!("expected `n=<int>`, got `{nline}`"),
            })?;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        while let Some(&(el, eline)) = lines.peek() {
            if eline.trim().is_empty() {
                break;
            }
            if eline.trim().starts_with("graph ") {
                break;
            }
            lines.next();
            for tok in eline.split_whitespace() {
                let (u, v) = tok
                    .split_once('-')
                    .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                    .ok_or_else(|| Error::Parse {
                        line: el + 1,
                        msg: format!("bad edge token `{tok}`"),
                    })?;
                if u >= n || v >= n {
                    return Err(Error::Parse {
                        line: el + 1,
                        msg: format!("edge {u}-{v} endpoint out of range for n={n}"),
                    });
                }
                if u == v {
                    return Err(Error::Parse {
                        line: el + 1,
                        msg: format!("self-loop {u}-{v}"),
                    });
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return Err(Error::Parse {
                        line: el + 1,
                        msg: format!("duplicate edge {u}-{v}"),
                    });
                }
                edges.push((u, v));
            }
        }
        let graph = Graph::new(n, edges).map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: format!("record `{name}`: {e}"),
        })?;
        let mut warnings = Vec::new();
        if !graph.is_cubic() {
            warnings.push(format!("graph `{name}` is not 3-regular"));
        }
        out.push(NamedGraph {
            name,
            graph,
            warnings,
        });
    }
    Ok(out)
}

pub fn save_graphs(graphs: &[(&str, &Graph)]) -> String {
    let mut s = String::new();
    for (name, g) in graphs {
        let _ = writeln!(s, "graph {name}");
        let _ = writeln!(s, "n={}", g.n());
        let toks: Vec<String> = g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let _ = writeln!(s, "{}", toks.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ladder_on_circle;

    #[test]
    fn parse_k4() {
        let text = "graph k4\nn=4\n0-1 0-2 0-3 1-2 1-3 2-3\n";
        let gs = load_graphs(text).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].name, "k4");
        assert_eq!(gs[0].graph.num_edges(), 6);
        assert!(gs[0].graph.is_cubic());
        assert!(gs[0].warnings.is_empty());
    }

    #[test]
    fn duplicate_edge_named_in_error() {
        let text = "graph bad\nn=4\n0-1 1-0\n";
        let err = load_graphs(text).unwrap_err();
        assert!(err.to_string().contains("duplicate edge 1-0"), "{err}");
    }

    #[test]
    fn out_of_range_endpoint() {
        let text = "graph bad\nn=3\n0-5\n";
        assert!(load_graphs(text).is_err());
    }

    #[test]
    fn non_cubic_warns_not_errors() {
        let text = "graph path\nn=3\n0-1 1-2\n";
        let gs = load_graphs(text).unwrap();
        assert_eq!(gs[0].warnings.len(), 1);
    }

    #[test]
    fn round_trip_ladders_bit_identical() {
        let g16 = ladder_on_circle(16).unwrap();
        let g18 = ladder_on_circle(18).unwrap();
        let text = save_graphs(&[("ladder16", &g16), ("ladder18", &g18)]);
        let back = load_graphs(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].graph, g16);
        assert_eq!(back[1].graph, g18);
        let text2 = save_graphs(&[("ladder16", &back[0].graph), ("ladder18", &back[1].graph)]);
        assert_eq!(text, text2);
    }
}
