//! Text file formats: graphs, hopsets, tree decompositions, and oracle
//! sidecars. All formats are line-oriented, LF-terminated, 1-indexed.
//!
//! Graph:        `c ...` comments, `p hop <n> <m>`, then `e <u> <v> <w>`
//!               with u < v, each undirected edge once.
//! Hopset:       `p hopset <n> <h> <k>`, then `s <u> <v> <w> <part>`
//!               (part 1 = first/last, 2 = middle, 0 = untagged).
//! Decomposition:`s td <bags> <maxbagsize> <n>`, then `b <id> <v...>`,
//!               then bag-tree edges `<id1> <id2>`.
//! Oracle:       `p oracle <n> <arcs> <mid>`, then `a <w> <x>` arcs and
//!               `m <x> <y>` middle pairs.
//!
//! Writers emit canonical sorted output so identical inputs round-trip
//! byte-identically. Weights in hopset files are redundant and re-verified
//! on load; oracle sidecars carry no weights at all.

use std::fs;
use std::path::Path;

use crate::error::{HopsetError, ParseError, TdError};
use crate::graph::{Edge, WeightedGraph};
use crate::hopset::{Hopset, Part, Shortcut};
use crate::oracle::ThreeHopOracle;
use crate::treewidth::TreeDecomposition;

fn read_lines(path: &Path) -> Result<Vec<String>, ParseError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ParseError::new(0, format!("{}: {}", path.display(), e)))?;
    Ok(text.lines().map(|l| l.to_string()).collect())
}

fn field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, ParseError> {
    tok.ok_or_else(|| ParseError::new(line, format!("missing {what}")))?
        .parse::<T>()
        .map_err(|_| ParseError::new(line, format!("bad {what}")))
}

/// Reads a graph file; construction re-checks all graph invariants, so a
/// self-loop or disconnected input surfaces as a parse-stage error.
pub fn read_graph(path: &Path) -> Result<WeightedGraph, ParseError> {
    let lines = read_lines(path)?;
    let mut header: Option<(u32, usize)> = None;
    let mut edges: Vec<Edge> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(ParseError::new(lineno, "duplicate header"));
                }
                if tok.next() != Some("hop") {
                    return Err(ParseError::new(lineno, "expected `p hop <n> <m>`"));
                }
                let n: u32 = field(tok.next(), lineno, "node count")?;
                let m: usize = field(tok.next(), lineno, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                if header.is_none() {
                    return Err(ParseError::new(lineno, "edge before header"));
                }
                let u: u32 = field(tok.next(), lineno, "endpoint")?;
                let v: u32 = field(tok.next(), lineno, "endpoint")?;
                let w: u64 = field(tok.next(), lineno, "weight")?;
                if u >= v {
                    return Err(ParseError::new(
                        lineno,
                        if u == v {
                            format!("self-loop at node {u}")
                        } else {
                            "endpoints must satisfy u < v".into()
                        },
                    ));
                }
                edges.push(Edge { u, v, w });
            }
            _ => return Err(ParseError::new(lineno, "unrecognized line")),
        }
    }
    let (n, m) = header.ok_or_else(|| ParseError::new(lines.len(), "missing header"))?;
    if edges.len() != m {
        return Err(ParseError::new(
            lines.len(),
            format!("header promises {} edges, found {}", m, edges.len()),
        ));
    }
    WeightedGraph::new(n, edges).map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn write_graph(g: &WeightedGraph, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("p hop {} {}\n", g.n(), g.m()));
    for e in g.edges() {
        out.push_str(&format!("e {} {} {}\n", e.u, e.v, e.w));
    }
    fs::write(path, out)
}

/// Reads a hopset file against its graph; stored weights are re-verified.
pub fn read_hopset(g: &WeightedGraph, path: &Path) -> Result<Hopset, HopsetError> {
    let parse = |p: &Path| -> Result<(u32, Vec<Shortcut>), ParseError> {
        let lines = read_lines(p)?;
        let mut header: Option<(u32, u32, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in lines.iter().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("p") => {
                    if tok.next() != Some("hopset") {
                        return Err(ParseError::new(lineno, "expected `p hopset <n> <h> <k>`"));
                    }
                    let n = field(tok.next(), lineno, "node count")?;
                    let h = field(tok.next(), lineno, "hopbound")?;
                    let k = field(tok.next(), lineno, "edge count")?;
                    header = Some((n, h, k));
                }
                Some("s") => {
                    let u: u32 = field(tok.next(), lineno, "endpoint")?;
                    let v: u32 = field(tok.next(), lineno, "endpoint")?;
                    let w: u64 = field(tok.next(), lineno, "weight")?;
                    let code: u8 = field(tok.next(), lineno, "part tag")?;
                    let part = Part::from_code(code)
                        .ok_or_else(|| ParseError::new(lineno, "part tag must be 0, 1 or 2"))?;
                    edges.push(Shortcut { u, v, w, part });
                }
                _ => return Err(ParseError::new(lineno, "unrecognized line")),
            }
        }
        let (n, h, k) = header.ok_or_else(|| ParseError::new(lines.len(), "missing header"))?;
        if edges.len() != k {
            return Err(ParseError::new(
                lines.len(),
                format!("header promises {} shortcuts, found {}", k, edges.len()),
            ));
        }
        Ok((if n == 0 { 0 } else { h }, edges))
    };
    let (h, edges) = parse(path).map_err(|e| {
        HopsetError::Graph(crate::error::GraphError::InfeasibleParams(e.to_string()))
    })?;
    Hopset::from_weighted_edges(g, edges, h)
}

pub fn write_hopset(hs: &Hopset, n: u32, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("p hopset {} {} {}\n", n, hs.hopbound(), hs.len()));
    let mut edges = hs.edges().to_vec();
    edges.sort_by_key(|e| (e.u, e.v));
    for e in edges {
        out.push_str(&format!("s {} {} {} {}\n", e.u, e.v, e.w, e.part.code()));
    }
    fs::write(path, out)
}

/// Reads a PACE-style tree decomposition.
pub fn read_td(path: &Path) -> Result<TreeDecomposition, TdError> {
    let lines = read_lines(path)?;
    let mut header: Option<(usize, usize, u32)> = None;
    let mut bags: Vec<Vec<u32>> = Vec::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tok = line.split_whitespace().peekable();
        match tok.peek().copied() {
            Some("s") => {
                tok.next();
                if tok.next() != Some("td") {
                    return Err(
                        ParseError::new(lineno, "expected `s td <bags> <maxbagsize> <n>`").into(),
                    );
                }
                let nb = field(tok.next(), lineno, "bag count")?;
                let mb = field(tok.next(), lineno, "max bag size")?;
                let n = field(tok.next(), lineno, "node count")?;
                header = Some((nb, mb, n));
                bags = vec![Vec::new(); nb];
            }
            Some("b") => {
                tok.next();
                let id: usize = field(tok.next(), lineno, "bag id")?;
                if header.is_none() || id == 0 || id > bags.len() {
                    return Err(ParseError::new(lineno, "bag id out of range").into());
                }
                let mut vs = Vec::new();
                for t in tok {
                    let v: u32 = t
                        .parse()
                        .map_err(|_| ParseError::new(lineno, "bad bag vertex"))?;
                    vs.push(v);
                }
                vs.sort_unstable();
                vs.dedup();
                bags[id - 1] = vs;
            }
            Some(_) => {
                let a: usize = field(tok.next(), lineno, "bag id")?;
                let b: usize = field(tok.next(), lineno, "bag id")?;
                if a == 0 || b == 0 || a > bags.len() || b > bags.len() {
                    return Err(ParseError::new(lineno, "bag-edge id out of range").into());
                }
                tree_edges.push((a - 1, b - 1));
            }
            None => {}
        }
    }
    let (nb, mb, n) = header.ok_or_else(|| ParseError::new(lines.len(), "missing header"))?;
    if bags.len() != nb {
        return Err(ParseError::new(lines.len(), "bag count mismatch").into());
    }
    if bags.iter().any(|b| b.len() > mb) {
        return Err(ParseError::new(lines.len(), "bag larger than promised max size").into());
    }
    Ok(TreeDecomposition {
        n,
        bags,
        tree_edges,
    })
}

/// Writes an oracle sidecar: oriented arcs and middle pairs, no weights.
pub fn write_oracle(o: &ThreeHopOracle, path: &Path) -> std::io::Result<()> {
    let mut arcs = Vec::new();
    for w in 1..=o.n() {
        for &(x, _) in o.n1(w) {
            if x != w {
                arcs.push((w, x));
            }
        }
    }
    let mut mids: Vec<(u32, u32)> = o
        .mid_entries()
        .filter(|&(&(x, y), _)| x != y)
        .map(|(&p, _)| p)
        .collect();
    mids.sort_unstable();
    let mut out = String::new();
    out.push_str(&format!(
        "p oracle {} {} {}\n",
        o.n(),
        arcs.len(),
        mids.len()
    ));
    for (w, x) in arcs {
        out.push_str(&format!("a {} {}\n", w, x));
    }
    for (x, y) in mids {
        out.push_str(&format!("m {} {}\n", x, y));
    }
    fs::write(path, out)
}

/// Reloads an oracle sidecar; all lengths are recomputed from the graph.
pub fn read_oracle(g: &WeightedGraph, path: &Path) -> Result<ThreeHopOracle, ParseError> {
    let lines = read_lines(path)?;
    let mut arcs: Vec<(u32, u32)> = Vec::new();
    let mut mids: Vec<(u32, u32)> = Vec::new();
    let mut seen_header = false;
    for (i, line) in lines.iter().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("p") => {
                if tok.next() != Some("oracle") {
                    return Err(ParseError::new(
                        lineno,
                        "expected `p oracle <n> <arcs> <mid>`",
                    ));
                }
                let n: u32 = field(tok.next(), lineno, "node count")?;
                if n != g.n() {
                    return Err(ParseError::new(
                        lineno,
                        "oracle node count differs from graph",
                    ));
                }
                seen_header = true;
            }
            Some("a") => {
                let w: u32 = field(tok.next(), lineno, "arc tail")?;
                let x: u32 = field(tok.next(), lineno, "arc head")?;
                arcs.push((w, x));
            }
            Some("m") => {
                let x: u32 = field(tok.next(), lineno, "mid endpoint")?;
                let y: u32 = field(tok.next(), lineno, "mid endpoint")?;
                mids.push((x, y));
            }
            _ => return Err(ParseError::new(lineno, "unrecognized line")),
        }
    }
    if !seen_header {
        return Err(ParseError::new(lines.len(), "missing header"));
    }
    Ok(ThreeHopOracle::build(g, arcs, mids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("hopset-io-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn graph_header_and_edges() {
        let p = tmp("tiny.hop");
        fs::write(&p, "c comment\np hop 3 2\ne 1 2 1\ne 2 3 1\n").unwrap();
        let g = read_graph(&p).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert!(g.has_edge(1, 2) && g.has_edge(2, 3));
    }

    #[test]
    fn graph_roundtrip_is_byte_identical() {
        let g = generate(GraphKind::Gnm { n: 15, m: 30 }, 2).unwrap();
        let p1 = tmp("rt1.hop");
        write_graph(&g, &p1).unwrap();
        let g2 = read_graph(&p1).unwrap();
        let p2 = tmp("rt2.hop");
        write_graph(&g2, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn self_loop_is_a_parse_error() {
        let p = tmp("loop.hop");
        fs::write(&p, "p hop 2 1\ne 1 1 5\n").unwrap();
        let err = read_graph(&p).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("self-loop"));
    }

    #[test]
    fn td_file_parses() {
        let p = tmp("c4.td");
        fs::write(&p, "c a 4-cycle\ns td 2 3 4\nb 1 1 2 3\nb 2 1 3 4\n1 2\n").unwrap();
        let td = read_td(&p).unwrap();
        assert_eq!(td.bags, vec![vec![1, 2, 3], vec![1, 3, 4]]);
        assert_eq!(td.tree_edges, vec![(0, 1)]);
        assert_eq!(td.width(), 2);

        fs::write(&p, "s td 2 3 4\nb 1 1 2 3\nb 5 1 3 4\n").unwrap();
        assert!(matches!(read_td(&p), Err(crate::error::TdError::Parse(_))));
    }

    #[test]
    fn hopset_roundtrip_and_reverification() {
        let g = generate(GraphKind::Path { n: 6 }, 0).unwrap();
        let hs = crate::tree::tree_hopset(&g, 2).unwrap();
        let p = tmp("hs.hopset");
        write_hopset(&hs, g.n(), &p).unwrap();
        let hs2 = read_hopset(&g, &p).unwrap();
        assert_eq!(hs.edges(), hs2.edges());

        // Tamper with a weight: reload must reject it.
        let text = fs::read_to_string(&p).unwrap().replace(" 2 0", " 1 0");
        fs::write(&p, text).unwrap();
        assert!(read_hopset(&g, &p).is_err());
    }
}
