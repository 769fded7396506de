//! Text formats for graphs, vertex sets, and tree decompositions.
//!
//! # Graph files
//!
//! Line-oriented edge lists. The first non-comment line is a header
//!
//! ```text
//! n m [directed] [weighted]
//! ```
//!
//! followed by exactly `m` body lines `u v [w]` with 0-based vertex ids
//! in `0..n`. Lines starting with `c` and blank lines are ignored.
//!
//! In an undirected file each body line declares one edge; repeating an
//! edge (in either order) is an error. In a `directed` file each body
//! line declares the arc `u -> v` *and* the underlying edge, so a
//! two-way connection is written as two lines (`u v` and `v u`);
//! repeating the same arc is an error. Weights are exact rationals
//! (`5`, `-3`, `7/2`); in a directed file the two arcs of one edge must
//! agree on the edge weight.
//!
//! Writing a directed graph requires every edge to carry at least one
//! arc, since the format has no way to spell an arcless edge of a
//! directed graph.
//!
//! # Vertex-set files
//!
//! Either a JSON array (`[0, 5, 17]`) or one id per line; the JSON form
//! is detected by a leading `[`.
//!
//! # Tree-decomposition files
//!
//! ```text
//! c root 2
//! s td <bags> <max-bag-size> <n>
//! b 1 0 1 4
//! b 2 1 2
//! 1 2
//! ```
//!
//! Bag ids are 1-based, vertex ids 0-based. The optional `c root K`
//! comment records the root bag (default: bag 1); remaining numeric
//! lines are tree edges between bag ids.

use std::collections::BTreeSet;
use std::fmt;

use patcov_core::decomp::TreeDecomposition;
use patcov_core::graph::{Graph, Vertex, Weight};

/// Parse or serialization failure for any of the text formats.
#[derive(Debug)]
pub enum FormatError {
    /// Line could not be interpreted; carries a 1-based line number
    /// where one is known.
    Malformed { line: usize, reason: String },
    /// The header promised a different shape than the body delivered.
    Inconsistent(String),
    /// A directed graph contains an edge with no arc, which the edge
    /// list format cannot express.
    UnwritableDirectedEdge(Vertex, Vertex),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Malformed { line, reason } => {
                write!(f, "line {line}: {reason}")
            }
            FormatError::Inconsistent(reason) => write!(f, "{reason}"),
            FormatError::UnwritableDirectedEdge(u, v) => write!(
                f,
                "edge {{{u}, {v}}} of a directed graph has no arc and cannot be written"
            ),
        }
    }
}

impl std::error::Error for FormatError {}

fn malformed(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        reason: reason.into(),
    }
}

/// Iterate over (1-based line number, content) pairs, skipping blank
/// and `c`-comment lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let t = raw.trim();
        if t.is_empty() || t == "c" || t.starts_with("c ") {
            None
        } else {
            Some((i + 1, t))
        }
    })
}

fn parse_num<T: core::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, FormatError> {
    tok.parse::<T>()
        .map_err(|_| malformed(line, format!("expected {what}, found {tok:?}")))
}

/// Parse an exact rational weight: `a`, `-a`, or `a/b`.
fn parse_weight(tok: &str, line: usize) -> Result<Weight, FormatError> {
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (
            parse_num::<i64>(n, line, "weight numerator")?,
            parse_num::<i64>(d, line, "weight denominator")?,
        ),
        None => (parse_num::<i64>(tok, line, "integer weight")?, 1),
    };
    if den == 0 {
        return Err(malformed(line, "weight denominator is zero"));
    }
    Ok(Weight::new(num, den))
}

/// Format a weight the parser will read back: integer when exact,
/// `a/b` otherwise.
pub fn format_weight(w: &Weight) -> String {
    if *w.denom() == 1 {
        format!("{}", w.numer())
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

/// Parse an edge-list graph file.
pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| FormatError::Inconsistent("empty graph file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 {
        return Err(malformed(hline, "header must start with `n m`"));
    }
    let n: u32 = parse_num(toks[0], hline, "vertex count")?;
    let m: usize = parse_num(toks[1], hline, "edge count")?;
    let mut directed = false;
    let mut weighted = false;
    for t in &toks[2..] {
        match *t {
            "directed" => directed = true,
            "weighted" => weighted = true,
            other => {
                return Err(malformed(
                    hline,
                    format!("unknown header flag {other:?} (expected `directed`/`weighted`)"),
                ));
            }
        }
    }

    let mut g = Graph::new();
    for v in 0..n {
        g.add_vertex(v).expect("fresh ids cannot collide");
    }

    let mut seen_edges: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut seen_arcs: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut body = 0usize;
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        body += 1;
        if body > m {
            return Err(FormatError::Inconsistent(format!(
                "header promised {m} edge lines but found more (line {ln})"
            )));
        }
        if toks.len() < 2 || toks.len() > 3 || (toks.len() == 3 && !weighted) {
            let want = if weighted { "`u v [w]`" } else { "`u v`" };
            return Err(malformed(ln, format!("expected {want}")));
        }
        let u: Vertex = parse_num(toks[0], ln, "vertex id")?;
        let v: Vertex = parse_num(toks[1], ln, "vertex id")?;
        if u >= n || v >= n {
            return Err(malformed(ln, format!("vertex id out of range 0..{n}")));
        }
        if u == v {
            return Err(malformed(ln, format!("self-loop at {u}")));
        }
        let key = (u.min(v), u.max(v));
        if directed {
            if !seen_arcs.insert((u, v)) {
                return Err(malformed(ln, format!("duplicate arc {u} -> {v}")));
            }
        } else if !seen_edges.insert(key) {
            return Err(malformed(ln, format!("duplicate edge {{{u}, {v}}}")));
        }
        let fresh_edge = seen_edges.insert(key);
        g.add_edge(u, v).expect("endpoints were added above");
        if directed {
            g.add_arc(u, v).expect("edge was just added");
        }
        if let Some(tok) = toks.get(2) {
            let w = parse_weight(tok, ln)?;
            if !fresh_edge && directed && g.weight(u, v) != w {
                return Err(malformed(
                    ln,
                    format!(
                        "arcs {v} -> {u} and {u} -> {v} disagree on the weight of edge {{{u}, {v}}}"
                    ),
                ));
            }
            g.set_edge_weight(u, v, w).expect("edge exists");
        } else if !fresh_edge && directed && g.weight(u, v) != Weight::from_integer(1) {
            return Err(malformed(
                ln,
                format!("arcs {v} -> {u} and {u} -> {v} disagree on the weight of edge {{{u}, {v}}}"),
            ));
        }
    }
    if body != m {
        return Err(FormatError::Inconsistent(format!(
            "header promised {m} edge lines but found {body}"
        )));
    }
    Ok(g)
}

/// Write a graph in the edge-list format.
///
/// Fails for a directed graph containing an arcless edge; such a graph
/// has no representation in this format.
pub fn write_graph(g: &Graph) -> Result<String, FormatError> {
    let directed = g.is_directed();
    let weighted = g
        .edges()
        .iter()
        .any(|&(u, v)| g.weight(u, v) != Weight::from_integer(1));

    let mut lines: Vec<(Vertex, Vertex)> = if directed {
        let arcs: BTreeSet<(Vertex, Vertex)> = g.arcs().collect();
        for &(u, v) in &g.edges() {
            if !arcs.contains(&(u, v)) && !arcs.contains(&(v, u)) {
                return Err(FormatError::UnwritableDirectedEdge(u, v));
            }
        }
        arcs.into_iter().collect()
    } else {
        let mut e = g.edges();
        e.sort_unstable();
        e
    };
    lines.sort_unstable();

    let n = g.vertices().map(|v| v + 1).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{} {}", n, lines.len()));
    if directed {
        out.push_str(" directed");
    }
    if weighted {
        out.push_str(" weighted");
    }
    out.push('\n');
    for (u, v) in lines {
        if weighted {
            out.push_str(&format!("{} {} {}\n", u, v, format_weight(&g.weight(u, v))));
        } else {
            out.push_str(&format!("{u} {v}\n"));
        }
    }
    Ok(out)
}

/// Parse a vertex set: a JSON array if the first non-space byte is
/// `[`, otherwise one id per line.
pub fn parse_vertex_set(text: &str) -> Result<BTreeSet<Vertex>, FormatError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let ids: Vec<Vertex> = serde_json::from_str(trimmed)
            .map_err(|e| FormatError::Inconsistent(format!("bad JSON vertex array: {e}")))?;
        Ok(ids.into_iter().collect())
    } else {
        let mut out = BTreeSet::new();
        for (ln, line) in content_lines(text) {
            for tok in line.split_whitespace() {
                out.insert(parse_num::<Vertex>(tok, ln, "vertex id")?);
            }
        }
        Ok(out)
    }
}

/// Write a vertex set as a JSON array in ascending order.
pub fn write_vertex_set(s: &BTreeSet<Vertex>) -> String {
    serde_json::to_string(&s.iter().collect::<Vec<_>>()).expect("ids serialize")
}

/// Write a tree decomposition.
pub fn write_td(td: &TreeDecomposition) -> String {
    let verts: BTreeSet<Vertex> = td.bags.iter().flatten().copied().collect();
    let max_bag = td.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("c root {}\n", td.root + 1));
    out.push_str(&format!(
        "s td {} {} {}\n",
        td.bags.len(),
        max_bag,
        verts.len()
    ));
    for (i, bag) in td.bags.iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for v in bag {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    let mut edges = td.edges.clone();
    edges.sort_unstable();
    for (a, b) in edges {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

/// Parse a tree decomposition.
///
/// Requires the `s td` header, one `b` line per bag id `1..=bags`, and
/// consistency between the header counts and the body. Structural
/// validity against a graph is a separate step
/// ([`TreeDecomposition::validate`]).
pub fn parse_td(text: &str) -> Result<TreeDecomposition, FormatError> {
    let mut root: usize = 0;
    for raw in text.lines() {
        let t = raw.trim();
        if let Some(rest) = t.strip_prefix("c root ") {
            let id: usize = rest
                .trim()
                .parse()
                .map_err(|_| FormatError::Inconsistent(format!("bad root comment {t:?}")))?;
            if id == 0 {
                return Err(FormatError::Inconsistent(
                    "root bag id is 1-based, found 0".into(),
                ));
            }
            root = id - 1;
        }
    }

    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| FormatError::Inconsistent("empty tree-decomposition file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "s" || toks[1] != "td" {
        return Err(malformed(hline, "expected header `s td <bags> <max-bag-size> <n>`"));
    }
    let n_bags: usize = parse_num(toks[2], hline, "bag count")?;
    let max_bag: usize = parse_num(toks[3], hline, "max bag size")?;
    let n_verts: usize = parse_num(toks[4], hline, "vertex count")?;

    let mut bags: Vec<Option<BTreeSet<Vertex>>> = vec![None; n_bags];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "b" {
            if toks.len() < 2 {
                return Err(malformed(ln, "bag line needs an id"));
            }
            let id: usize = parse_num(toks[1], ln, "bag id")?;
            if id == 0 || id > n_bags {
                return Err(malformed(ln, format!("bag id out of range 1..={n_bags}")));
            }
            if bags[id - 1].is_some() {
                return Err(malformed(ln, format!("bag {id} defined twice")));
            }
            let mut bag = BTreeSet::new();
            for tok in &toks[2..] {
                bag.insert(parse_num::<Vertex>(tok, ln, "vertex id")?);
            }
            bags[id - 1] = Some(bag);
        } else {
            if toks.len() != 2 {
                return Err(malformed(ln, "expected tree edge `<bag> <bag>`"));
            }
            let a: usize = parse_num(toks[0], ln, "bag id")?;
            let b: usize = parse_num(toks[1], ln, "bag id")?;
            if a == 0 || a > n_bags || b == 0 || b > n_bags {
                return Err(malformed(ln, format!("bag id out of range 1..={n_bags}")));
            }
            edges.push((a - 1, b - 1));
        }
    }

    let bags: Vec<BTreeSet<Vertex>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| FormatError::Inconsistent(format!("bag {} missing", i + 1))))
        .collect::<Result<_, _>>()?;
    let got_max = bags.iter().map(|b| b.len()).max().unwrap_or(0);
    if got_max != max_bag {
        return Err(FormatError::Inconsistent(format!(
            "header says max bag size {max_bag}, bags have {got_max}"
        )));
    }
    let got_verts = bags.iter().flatten().collect::<BTreeSet<_>>().len();
    if got_verts != n_verts {
        return Err(FormatError::Inconsistent(format!(
            "header says {n_verts} vertices, bags cover {got_verts}"
        )));
    }
    if root >= n_bags {
        return Err(FormatError::Inconsistent(format!(
            "root bag {} out of range 1..={n_bags}",
            root + 1
        )));
    }
    Ok(TreeDecomposition { bags, edges, root })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_roundtrip_undirected_weighted() {
        let text = "c a comment\n4 3 weighted\n0 1 5\n1 2 7/2\n2 3 -1\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 3);
        assert!(!g.is_directed());
        assert_eq!(g.weight(1, 2), Weight::new(7, 2));
        assert_eq!(g.weight(2, 3), Weight::from_integer(-1));
        let written = write_graph(&g).unwrap();
        let g2 = parse_graph(&written).unwrap();
        assert_eq!(g.edges(), g2.edges());
        assert_eq!(g2.weight(1, 2), Weight::new(7, 2));
    }

    #[test]
    fn graph_directed_two_lines_one_edge() {
        let text = "3 3 directed\n0 1\n1 0\n1 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.m(), 2, "two arcs over one edge plus one single-arc edge");
        assert!(g.has_arc(0, 1) && g.has_arc(1, 0) && g.has_arc(1, 2));
        assert!(!g.has_arc(2, 1));
        let written = write_graph(&g).unwrap();
        let back = parse_graph(&written).unwrap();
        assert_eq!(
            back.arcs().collect::<Vec<_>>(),
            g.arcs().collect::<Vec<_>>()
        );
    }

    #[test]
    fn graph_rejects_bad_input() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("2 1\n0 0\n").is_err(), "self-loop");
        assert!(parse_graph("2 1\n0 5\n").is_err(), "id out of range");
        assert!(parse_graph("2 2\n0 1\n1 0\n").is_err(), "duplicate undirected edge");
        assert!(parse_graph("2 2 directed\n0 1\n0 1\n").is_err(), "duplicate arc");
        assert!(parse_graph("2 1\n0 1 9\n").is_err(), "weight without weighted flag");
        assert!(parse_graph("2 1 weighted\n0 1 1/0\n").is_err(), "zero denominator");
        assert!(parse_graph("2 1 sideways\n0 1\n").is_err(), "unknown flag");
        assert!(parse_graph("3 2\n0 1\n").is_err(), "missing edge line");
        assert!(parse_graph("3 1\n0 1\n1 2\n").is_err(), "extra edge line");
        assert!(
            parse_graph("2 2 directed weighted\n0 1 3\n1 0 4\n").is_err(),
            "conflicting weights on the two arcs of one edge"
        );
    }

    #[test]
    fn directed_weight_agreement_allows_match() {
        let g = parse_graph("2 2 directed weighted\n0 1 3\n1 0 3\n").unwrap();
        assert_eq!(g.weight(0, 1), Weight::from_integer(3));
    }

    #[test]
    fn unwritable_directed_graph_is_reported() {
        // One arc makes the graph directed; the second, arcless edge
        // then has no spelling in the format.
        let mut g = Graph::new();
        for v in 0..3 {
            g.add_vertex(v).unwrap();
        }
        g.add_edge(0, 1).unwrap();
        g.add_arc(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        assert!(matches!(
            write_graph(&g),
            Err(FormatError::UnwritableDirectedEdge(1, 2))
        ));
    }

    #[test]
    fn vertex_set_both_forms() {
        let a = parse_vertex_set("[3, 1, 2]").unwrap();
        let b = parse_vertex_set("3\n1\nc note\n2\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, [1, 2, 3].into_iter().collect());
        assert_eq!(parse_vertex_set(&write_vertex_set(&a)).unwrap(), a);
        assert!(parse_vertex_set("[1, oops]").is_err());
        assert!(parse_vertex_set("1\nx\n").is_err());
    }

    #[test]
    fn td_roundtrip_preserves_structure() {
        let td = TreeDecomposition {
            bags: vec![
                [0, 1, 4].into_iter().collect(),
                [1, 2].into_iter().collect(),
                [2, 3].into_iter().collect(),
            ],
            edges: vec![(0, 1), (1, 2)],
            root: 1,
        };
        let text = write_td(&td);
        let back = parse_td(&text).unwrap();
        assert_eq!(back, td);
        assert!(text.starts_with("c root 2\ns td 3 3 5\n"));
    }

    #[test]
    fn td_parser_rejects_inconsistencies() {
        assert!(parse_td("").is_err());
        assert!(parse_td("s td 2 1 1\nb 1 0\n").is_err(), "missing bag 2");
        assert!(parse_td("s td 1 2 1\nb 1 0\n").is_err(), "wrong max bag size");
        assert!(parse_td("s td 1 1 9\nb 1 0\n").is_err(), "wrong vertex count");
        assert!(parse_td("s td 1 1 1\nb 1 0\nb 1 0\n").is_err(), "bag twice");
        assert!(parse_td("s td 1 1 1\nb 1 0\n1 5\n").is_err(), "edge id range");
        assert!(
            parse_td("c root 3\ns td 1 1 1\nb 1 0\n").is_err(),
            "root out of range"
        );
        assert!(parse_td("c root 0\ns td 1 1 1\nb 1 0\n").is_err(), "root not 1-based");
    }

    #[test]
    fn td_default_root_is_first_bag() {
        let td = parse_td("s td 2 1 2\nb 1 0\nb 2 1\n1 2\n").unwrap();
        assert_eq!(td.root, 0);
    }
}
