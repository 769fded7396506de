//! Deterministic instance generators: structured graph families, a
//! randomized planar-like triangulation, planted connected patterns,
//! and orientation helpers for building directed fixtures.
//!
//! All randomness flows through [`Sampler`], so every generator is a
//! pure function of its parameters and the seed.

use std::collections::BTreeSet;

use patcov_core::graph::{Graph, Vertex};
use patcov_core::rng::Sampler;

/// Parameter failure for a generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    BadParams(&'static str),
    /// A planted structure of the requested size does not fit in the
    /// graph (for example, `k` exceeds the largest component).
    DoesNotFit(&'static str),
}

impl core::fmt::Display for GenError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GenError::BadParams(m) => write!(f, "bad generator parameters: {m}"),
            GenError::DoesNotFit(m) => write!(f, "planted structure does not fit: {m}"),
        }
    }
}

impl std::error::Error for GenError {}

fn blank(n: u32) -> Graph {
    let mut g = Graph::new();
    for v in 0..n {
        g.add_vertex(v).expect("fresh ids");
    }
    g
}

/// `w x h` grid; vertex `(col, row)` has id `row * w + col`.
pub fn grid(w: u32, h: u32) -> Result<Graph, GenError> {
    if w == 0 || h == 0 {
        return Err(GenError::BadParams("grid sides must be positive"));
    }
    w.checked_mul(h)
        .ok_or(GenError::BadParams("grid too large"))?;
    let mut g = blank(w * h);
    for row in 0..h {
        for col in 0..w {
            let v = row * w + col;
            if col + 1 < w {
                g.add_edge(v, v + 1).unwrap();
            }
            if row + 1 < h {
                g.add_edge(v, v + w).unwrap();
            }
        }
    }
    Ok(g)
}

/// Cylinder: `len` rings of `circ` vertices each; ring `r` holds ids
/// `r * circ .. (r + 1) * circ`, closed into a cycle and matched to the
/// next ring.
pub fn cylinder(circ: u32, len: u32) -> Result<Graph, GenError> {
    if circ < 3 || len == 0 {
        return Err(GenError::BadParams("cylinder needs circumference >= 3, length >= 1"));
    }
    circ.checked_mul(len)
        .ok_or(GenError::BadParams("cylinder too large"))?;
    let mut g = blank(circ * len);
    for r in 0..len {
        for i in 0..circ {
            let v = r * circ + i;
            g.add_edge(v, r * circ + (i + 1) % circ).unwrap();
            if r + 1 < len {
                g.add_edge(v, v + circ).unwrap();
            }
        }
    }
    Ok(g)
}

/// Path on `n` vertices, ids in path order.
pub fn path(n: u32) -> Result<Graph, GenError> {
    if n == 0 {
        return Err(GenError::BadParams("path needs at least one vertex"));
    }
    let mut g = blank(n);
    for v in 1..n {
        g.add_edge(v - 1, v).unwrap();
    }
    Ok(g)
}

/// Random labeled tree: vertex `i >= 1` attaches to a uniform parent
/// among `0..i`.
pub fn random_tree(n: u32, s: &mut Sampler) -> Result<Graph, GenError> {
    if n == 0 {
        return Err(GenError::BadParams("tree needs at least one vertex"));
    }
    let mut g = blank(n);
    for v in 1..n {
        let parent = s.index(v as usize) as Vertex;
        g.add_edge(parent, v).unwrap();
    }
    Ok(g)
}

/// Random planar-like triangulation: start from a triangle and
/// repeatedly place a fresh vertex inside a uniformly chosen existing
/// face, joining it to that face's three corners. The result is
/// simple, connected, planar, and has `2n - 5` faces tracked along the
/// way.
pub fn random_planar_like(n: u32, s: &mut Sampler) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(GenError::BadParams("triangulation needs at least 3 vertices"));
    }
    let mut g = blank(n);
    g.add_edge(0, 1).unwrap();
    g.add_edge(1, 2).unwrap();
    g.add_edge(0, 2).unwrap();
    let mut faces: Vec<[Vertex; 3]> = vec![[0, 1, 2]];
    for v in 3..n {
        let f = faces[s.index(faces.len())];
        for c in f {
            g.add_edge(c, v).unwrap();
        }
        faces.push([f[0], f[1], v]);
        faces.push([f[0], f[2], v]);
        faces.push([f[1], f[2], v]);
    }
    Ok(g)
}

/// Sample a uniform-ish random connected `k`-subset by seeded frontier
/// growth: start at a uniform vertex, then repeatedly absorb a uniform
/// neighbor of the current set.
pub fn plant_connected(
    g: &Graph,
    k: u32,
    s: &mut Sampler,
) -> Result<BTreeSet<Vertex>, GenError> {
    if k == 0 {
        return Err(GenError::BadParams("pattern size must be positive"));
    }
    if g.n() == 0 {
        return Err(GenError::DoesNotFit("graph is empty"));
    }
    let verts: Vec<Vertex> = g.vertices().collect();
    let start = verts[s.index(verts.len())];
    let mut x: BTreeSet<Vertex> = [start].into();
    let mut frontier: BTreeSet<Vertex> = g.neighbors(start).into_iter().collect();
    while (x.len() as u32) < k {
        if frontier.is_empty() {
            return Err(GenError::DoesNotFit(
                "component of the start vertex is smaller than k",
            ));
        }
        let pick = *frontier
            .iter()
            .nth(s.index(frontier.len()))
            .expect("nonempty");
        frontier.remove(&pick);
        x.insert(pick);
        for nb in g.neighbors(pick) {
            if !x.contains(&nb) {
                frontier.insert(nb);
            }
        }
    }
    Ok(x)
}

/// Find a simple path on `k` vertices by randomized depth-first
/// search from a random start, then retry from other starts.
fn find_simple_path(g: &Graph, k: u32, s: &mut Sampler) -> Result<Vec<Vertex>, GenError> {
    if k == 0 {
        return Err(GenError::BadParams("path length must be positive"));
    }
    let verts: Vec<Vertex> = g.vertices().collect();
    if verts.is_empty() {
        return Err(GenError::DoesNotFit("graph is empty"));
    }
    let rot = s.index(verts.len());
    for attempt in 0..verts.len() {
        let start = verts[(rot + attempt) % verts.len()];
        let mut path = vec![start];
        let mut used: BTreeSet<Vertex> = [start].into();
        if dfs_extend(g, k, s, &mut path, &mut used) {
            return Ok(path);
        }
    }
    Err(GenError::DoesNotFit("no simple path on k vertices found"))
}

fn dfs_extend(
    g: &Graph,
    k: u32,
    s: &mut Sampler,
    path: &mut Vec<Vertex>,
    used: &mut BTreeSet<Vertex>,
) -> bool {
    if path.len() as u32 == k {
        return true;
    }
    let mut nbs: Vec<Vertex> = g
        .neighbors(*path.last().expect("path nonempty"))
        .into_iter()
        .filter(|nb| !used.contains(nb))
        .collect();
    while !nbs.is_empty() {
        let nb = nbs.swap_remove(s.index(nbs.len()));
        path.push(nb);
        used.insert(nb);
        if dfs_extend(g, k, s, path, used) {
            return true;
        }
        path.pop();
        used.remove(&nb);
    }
    false
}

/// Orient every edge across the BFS layering from `root`: arcs run
/// from even layers to odd layers only. On a bipartite graph (grids,
/// trees, cylinders of even circumference) the layers 2-color the
/// graph, so every directed walk alternates even -> odd and stops:
/// no directed path on 3 or more vertices exists.
///
/// Edges inside one layer (absent in the bipartite case) fall back to
/// low id -> high id.
pub fn orient_bipartite(g: &mut Graph, root: Vertex) -> Result<(), GenError> {
    if !g.has_vertex(root) {
        return Err(GenError::BadParams("orientation root is not a vertex"));
    }
    let dist = g.bfs(root);
    let layer = |v: Vertex| dist.get(&v).copied().unwrap_or(0) % 2;
    for (u, v) in g.edges() {
        let (from, to) = match (layer(u), layer(v)) {
            (0, 1) => (u, v),
            (1, 0) => (v, u),
            _ => (u.min(v), u.max(v)),
        };
        g.add_arc(from, to).expect("edge exists");
    }
    Ok(())
}

/// Plant a directed path on `k` vertices: find a simple path, orient
/// its edges along the path, and orient every other edge across the
/// BFS layering from the path's start. Returns the planted path.
pub fn plant_directed_path(
    g: &mut Graph,
    k: u32,
    s: &mut Sampler,
) -> Result<Vec<Vertex>, GenError> {
    let path = find_simple_path(g, k, s)?;
    let on_path: BTreeSet<(Vertex, Vertex)> = path
        .windows(2)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect();
    let dist = g.bfs(path[0]);
    let layer = |v: Vertex| dist.get(&v).copied().unwrap_or(0) % 2;
    for (u, v) in g.edges() {
        if on_path.contains(&(u.min(v), u.max(v))) {
            continue;
        }
        let (from, to) = match (layer(u), layer(v)) {
            (0, 1) => (u, v),
            (1, 0) => (v, u),
            _ => (u.min(v), u.max(v)),
        };
        g.add_arc(from, to).expect("edge exists");
    }
    for w in path.windows(2) {
        g.add_arc(w[0], w[1]).expect("path edge exists");
    }
    Ok(path)
}
