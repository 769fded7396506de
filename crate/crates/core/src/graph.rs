//! Undirected simple graphs with optional directed arcs and rational edge
//! weights, plus ghost-vertex machinery.
//!
//! A ghost vertex costs nothing to traverse: the ghost distance between two
//! vertices is the minimum over connecting paths of the number of non-ghost
//! vertices on the path, minus one when at least one endpoint is non-ghost.
//! Ghosts are not stored on the graph; operations take the ghost set as a
//! parameter. Vertex ids come from a per-graph counter and are never reused
//! after deletions or contractions.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

pub type Vertex = u32;
pub type GhostSet = BTreeSet<Vertex>;
pub type Weight = num_rational::Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    DuplicateVertex(Vertex),
    MissingVertex(Vertex),
    SelfLoop(Vertex),
    NotAdjacent(Vertex, Vertex),
    NotConnected,
    TargetOutsideSet(Vertex),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateVertex(v) => write!(f, "vertex {} already exists", v),
            GraphError::MissingVertex(v) => write!(f, "vertex {} does not exist", v),
            GraphError::SelfLoop(v) => write!(f, "self-loop at {} not allowed", v),
            GraphError::NotAdjacent(u, v) => write!(f, "vertices {} and {} are not adjacent", u, v),
            GraphError::NotConnected => write!(f, "set to contract is not connected"),
            GraphError::TargetOutsideSet(v) => write!(f, "contraction target {} not in set", v),
        }
    }
}

impl core::error::Error for GraphError {}

/// Undirected simple graph. `arcs` and `weights` are optional annotations used
/// by the solvers; all structural algorithms read only `adj`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
    arcs: BTreeSet<(Vertex, Vertex)>,
    weights: BTreeMap<(Vertex, Vertex), Weight>,
    next_id: Vertex,
}

fn ekey(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            adj: BTreeMap::new(),
            arcs: BTreeSet::new(),
            weights: BTreeMap::new(),
            next_id: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn add_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if self.adj.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adj.insert(v, BTreeSet::new());
        if v >= self.next_id {
            self.next_id = v + 1;
        }
        Ok(())
    }

    /// Allocates a brand-new vertex id from the counter.
    pub fn fresh_vertex(&mut self) -> Vertex {
        let v = self.next_id;
        self.adj.insert(v, BTreeSet::new());
        self.next_id = v + 1;
        v
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.adj.contains_key(&u) {
            return Err(GraphError::MissingVertex(u));
        }
        if !self.adj.contains_key(&v) {
            return Err(GraphError::MissingVertex(v));
        }
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
        Ok(())
    }

    /// Adds a directed arc annotation; the undirected edge must already exist.
    pub fn add_arc(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAdjacent(u, v));
        }
        self.arcs.insert((u, v));
        Ok(())
    }

    pub fn set_edge_weight(&mut self, u: Vertex, v: Vertex, w: Weight) -> Result<(), GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAdjacent(u, v));
        }
        self.weights.insert(ekey(u, v), w);
        Ok(())
    }

    /// Weight for an arc (directed use) or edge (undirected use); defaults to 1.
    pub fn weight(&self, u: Vertex, v: Vertex) -> Weight {
        self.weights
            .get(&ekey(u, v))
            .copied()
            .unwrap_or_else(|| Weight::from_integer(1))
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).map(|s| s.contains(&v)).unwrap_or(false)
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn is_directed(&self) -> bool {
        !self.arcs.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    /// Ascending by id, per the BTreeSet order.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map(|s| s.len()).unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for (&u, nb) in &self.adj {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        if let Some(nb) = self.adj.remove(&v) {
            for u in nb {
                self.adj.get_mut(&u).unwrap().remove(&v);
                self.weights.remove(&ekey(u, v));
                self.arcs.remove(&(u, v));
                self.arcs.remove(&(v, u));
            }
        }
    }

    /// Induced subgraph on `keep`; arc and weight annotations restricted too.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Graph {
        let mut g = Graph::new();
        g.next_id = self.next_id;
        for &v in keep {
            if self.adj.contains_key(&v) {
                g.adj.insert(v, BTreeSet::new());
            }
        }
        for (&v, nb) in &self.adj {
            if !keep.contains(&v) {
                continue;
            }
            for &u in nb {
                if keep.contains(&u) {
                    g.adj.get_mut(&v).unwrap().insert(u);
                }
            }
        }
        for &(u, v) in &self.arcs {
            if keep.contains(&u) && keep.contains(&v) {
                g.arcs.insert((u, v));
            }
        }
        for (&(u, v), &w) in &self.weights {
            if keep.contains(&u) && keep.contains(&v) {
                g.weights.insert((u, v), w);
            }
        }
        g
    }

    /// Plain BFS hop distances from `src`, ghosts ignored. Absent key means
    /// unreachable.
    pub fn bfs(&self, src: Vertex) -> BTreeMap<Vertex, u64> {
        self.bfs_tree(src).0
    }

    /// BFS distances and parents. Neighbor lists are explored ascending, so
    /// the first discoverer of a vertex (its parent) is deterministic.
    pub fn bfs_tree(&self, src: Vertex) -> (BTreeMap<Vertex, u64>, BTreeMap<Vertex, Vertex>) {
        let mut dist = BTreeMap::new();
        let mut parent = BTreeMap::new();
        if !self.adj.contains_key(&src) {
            return (dist, parent);
        }
        dist.insert(src, 0);
        let mut q = VecDeque::new();
        q.push_back(src);
        while let Some(v) = q.pop_front() {
            let d = dist[&v];
            for u in self.neighbors(v) {
                if let alloc::collections::btree_map::Entry::Vacant(e) = dist.entry(u) {
                    e.insert(d + 1);
                    parent.insert(u, v);
                    q.push_back(u);
                }
            }
        }
        (dist, parent)
    }

    /// Vertices reachable from `v` (its connected component).
    pub fn reach(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.bfs(v).into_keys().collect()
    }

    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if !seen.contains(&v) {
                let comp = self.reach(v);
                seen.extend(comp.iter().copied());
                out.push(comp);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        match self.adj.keys().next() {
            None => true,
            Some(&v) => self.reach(v).len() == self.n(),
        }
    }

    /// Merges `remove` into `into`: neighbors, arcs and weights are rewired,
    /// self-loops dropped, existing annotations on the survivor win.
    fn merge_into(&mut self, remove: Vertex, into: Vertex) {
        let nb = self.adj.remove(&remove).unwrap();
        for u in &nb {
            self.adj.get_mut(u).unwrap().remove(&remove);
        }
        for u in nb {
            if u != into {
                self.adj.get_mut(&u).unwrap().insert(into);
                self.adj.get_mut(&into).unwrap().insert(u);
                if let Some(w) = self.weights.remove(&ekey(remove, u)) {
                    self.weights.entry(ekey(into, u)).or_insert(w);
                }
            } else {
                self.weights.remove(&ekey(remove, u));
            }
        }
        let touched: Vec<(Vertex, Vertex)> = self
            .arcs
            .iter()
            .filter(|&&(a, b)| a == remove || b == remove)
            .copied()
            .collect();
        for (a, b) in touched {
            self.arcs.remove(&(a, b));
            let a2 = if a == remove { into } else { a };
            let b2 = if b == remove { into } else { b };
            if a2 != b2 {
                self.arcs.insert((a2, b2));
            }
        }
    }

    /// Contracts the edge `uv`, keeping vertex `keep` (one of `u`, `v`).
    pub fn contract_edge(&self, u: Vertex, v: Vertex, keep: Vertex) -> Result<Graph, GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAdjacent(u, v));
        }
        if keep != u && keep != v {
            return Err(GraphError::TargetOutsideSet(keep));
        }
        let mut g = self.clone();
        let remove = if keep == u { v } else { u };
        g.merge_into(remove, keep);
        Ok(g)
    }

    /// Contracts the connected set `s` onto `target ∈ s`.
    pub fn contract_set_onto(
        &self,
        s: &BTreeSet<Vertex>,
        target: Vertex,
    ) -> Result<Graph, GraphError> {
        if !s.contains(&target) {
            return Err(GraphError::TargetOutsideSet(target));
        }
        for &v in s {
            if !self.adj.contains_key(&v) {
                return Err(GraphError::MissingVertex(v));
            }
        }
        if self.induced(s).reach(target).len() != s.len() {
            return Err(GraphError::NotConnected);
        }
        let mut g = self.clone();
        for &v in s {
            if v != target {
                g.merge_into(v, target);
            }
        }
        Ok(g)
    }

    /// Contracts the connected set `s` onto a freshly allocated vertex and
    /// returns it. The fresh vertex inherits the set's outside neighborhood.
    pub fn contract_set_to_fresh(
        &self,
        s: &BTreeSet<Vertex>,
    ) -> Result<(Graph, Vertex), GraphError> {
        let target = match s.iter().next() {
            Some(&v) => v,
            None => return Err(GraphError::NotConnected),
        };
        let mut g = self.contract_set_onto(s, target)?;
        let fresh = g.next_id;
        g.adj.insert(fresh, BTreeSet::new());
        g.next_id += 1;
        g.merge_into(target, fresh);
        // merge_into points annotations at the fresh id already
        Ok((g, fresh))
    }
}

/// Ghost-aware distances from `src` to every reachable vertex. Entering a
/// non-ghost vertex costs 1, a ghost costs 0; the label of a non-ghost target
/// is corrected so that adjacent non-ghosts are at distance 1 and a ghost is
/// at distance 0 from an adjacent non-ghost.
pub fn ghost_dist_from(g: &Graph, ghosts: &GhostSet, src: Vertex) -> BTreeMap<Vertex, u64> {
    let mut raw: BTreeMap<Vertex, u64> = BTreeMap::new();
    if !g.has_vertex(src) {
        return raw;
    }
    // 0-1 BFS over entering costs.
    raw.insert(src, 0);
    let mut dq: VecDeque<Vertex> = VecDeque::new();
    dq.push_back(src);
    while let Some(v) = dq.pop_front() {
        let d = raw[&v];
        for u in g.neighbors(v) {
            let c = if ghosts.contains(&u) { 0 } else { 1 };
            let nd = d + c;
            if raw.get(&u).map(|&x| nd < x).unwrap_or(true) {
                raw.insert(u, nd);
                if c == 0 {
                    dq.push_front(u);
                } else {
                    dq.push_back(u);
                }
            }
        }
    }
    if ghosts.contains(&src) {
        // A non-ghost endpoint grants the "minus one": from a ghost source the
        // raw label of a non-ghost target counts that target itself.
        for (v, d) in raw.iter_mut() {
            if !ghosts.contains(v) && *v != src {
                *d -= 1;
            }
        }
    }
    raw
}

/// Ghost distance between two vertices; `None` when unreachable.
pub fn ghost_distance(g: &Graph, ghosts: &GhostSet, x: Vertex, y: Vertex) -> Option<u64> {
    ghost_dist_from(g, ghosts, x).get(&y).copied()
}

/// Ball of ghost radius `r` around `v`: all vertices at ghost distance ≤ r.
pub fn ball(g: &Graph, ghosts: &GhostSet, v: Vertex, r: u64) -> BTreeSet<Vertex> {
    ghost_dist_from(g, ghosts, v)
        .into_iter()
        .filter(|&(_, d)| d <= r)
        .map(|(u, _)| u)
        .collect()
}

/// Eliminates every ghost (ascending id): remove it and turn its neighborhood
/// into a clique. The result does not depend on the elimination order.
pub fn torso(g: &Graph, ghosts: &GhostSet) -> Graph {
    let mut out = g.clone();
    for &gv in ghosts {
        if !out.has_vertex(gv) {
            continue;
        }
        let nb: Vec<Vertex> = out.neighbors(gv).collect();
        out.remove_vertex(gv);
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let _ = out.add_edge(nb[i], nb[j]);
            }
        }
    }
    out
}

/// Contracts every ghost–ghost edge (keeping the lower id) and every ghost
/// adjacent to `root` onto `root`, until neither pattern remains. Returns the
/// new graph and the surviving ghost set.
pub fn normalize_ghosts(g: &Graph, ghosts: &GhostSet, root: Vertex) -> (Graph, GhostSet) {
    let mut g = g.clone();
    let mut ghosts: GhostSet = ghosts.iter().copied().filter(|v| g.has_vertex(*v)).collect();
    loop {
        let mut acted = false;
        // ghost adjacent to the root folds into the root
        if let Some(&gv) = ghosts.iter().find(|&&v| g.has_edge(root, v)) {
            g = g.contract_edge(root, gv, root).unwrap();
            ghosts.remove(&gv);
            acted = true;
        } else {
            // lowest ghost–ghost edge
            let pair = ghosts.iter().find_map(|&a| {
                g.neighbors(a)
                    .find(|b| *b != a && ghosts.contains(b))
                    .map(|b| if a < b { (a, b) } else { (b, a) })
            });
            if let Some((keep, drop)) = pair {
                g = g.contract_edge(keep, drop, keep).unwrap();
                ghosts.remove(&drop);
                acted = true;
            }
        }
        if !acted {
            return (g, ghosts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    pub(crate) fn graph_from_edges(n: u32, edges: &[(u32, u32)]) -> Graph {
        let mut g = Graph::new();
        for v in 0..n {
            g.add_vertex(v).unwrap();
        }
        for &(u, v) in edges {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    #[test]
    fn contract_triangle_edge() {
        let g = graph_from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = g.contract_edge(0, 1, 0).unwrap();
        assert_eq!(c.n(), 2);
        assert!(c.has_edge(0, 2));
        assert!(!c.has_vertex(1));
    }

    #[test]
    fn contract_path_middle() {
        let g = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = g.contract_edge(1, 2, 1).unwrap();
        assert_eq!(c.edges(), vec![(0, 1), (1, 3)]);
    }

    #[test]
    fn contract_errors() {
        let g = graph_from_edges(3, &[(0, 1)]);
        assert_eq!(g.contract_edge(0, 2, 0), Err(GraphError::NotAdjacent(0, 2)));
        let s: BTreeSet<Vertex> = [0, 2].into_iter().collect();
        assert_eq!(g.contract_set_onto(&s, 0), Err(GraphError::NotConnected));
        assert_eq!(g.contract_set_onto(&s, 1), Err(GraphError::TargetOutsideSet(1)));
    }

    #[test]
    fn contract_set_to_fresh_gets_new_id() {
        let g = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let s: BTreeSet<Vertex> = [1, 2].into_iter().collect();
        let (c, f) = g.contract_set_to_fresh(&s).unwrap();
        assert_eq!(f, 4);
        assert_eq!(c.n(), 3);
        assert!(c.has_edge(0, 4) && c.has_edge(4, 3));
    }

    #[test]
    fn ghost_path_distances() {
        // 0 — 1(ghost) — 2
        let g = graph_from_edges(3, &[(0, 1), (1, 2)]);
        let r: GhostSet = [1].into_iter().collect();
        assert_eq!(ghost_distance(&g, &r, 0, 2), Some(1));
        assert_eq!(ghost_distance(&g, &r, 0, 1), Some(0));
        assert_eq!(ghost_distance(&g, &r, 1, 0), Some(0));
        assert_eq!(ghost_distance(&g, &r, 0, 0), Some(0));
        assert_eq!(ball(&g, &r, 0, 0), [0, 1].into_iter().collect());
    }

    #[test]
    fn ghost_to_ghost_counts_internal() {
        // g(0) — 1 — g(2): two ghosts, one non-ghost between
        let g = graph_from_edges(3, &[(0, 1), (1, 2)]);
        let r: GhostSet = [0, 2].into_iter().collect();
        assert_eq!(ghost_distance(&g, &r, 0, 2), Some(1));
        assert_eq!(ghost_distance(&g, &r, 0, 1), Some(0));
    }

    #[test]
    fn torso_path_becomes_edge() {
        let g = graph_from_edges(3, &[(0, 1), (1, 2)]);
        let r: GhostSet = [1].into_iter().collect();
        let t = torso(&g, &r);
        assert_eq!(t.n(), 2);
        assert!(t.has_edge(0, 2));
    }

    #[test]
    fn normalize_folds_ghosts() {
        // root 0 — g1 — g2 — 3: ghost chain collapses onto the root
        let g = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let r: GhostSet = [1, 2].into_iter().collect();
        let (ng, nr) = normalize_ghosts(&g, &r, 0);
        assert!(nr.is_empty());
        assert_eq!(ng.n(), 2);
        assert!(ng.has_edge(0, 3));
    }

    #[test]
    fn merge_rewires_arcs_and_weights() {
        let mut g = graph_from_edges(3, &[(0, 1), (1, 2)]);
        g.add_arc(0, 1).unwrap();
        g.add_arc(1, 2).unwrap();
        g.set_edge_weight(1, 2, Weight::new(3, 2)).unwrap();
        let c = g.contract_edge(0, 1, 0).unwrap();
        assert!(c.has_arc(0, 2));
        assert_eq!(c.weight(0, 2), Weight::new(3, 2));
    }

    // order-independent torso: eliminate ghosts in an arbitrary order via the
    // public primitives and compare
    fn torso_in_order(g: &Graph, order: &[Vertex]) -> Graph {
        let mut out = g.clone();
        for &gv in order {
            if !out.has_vertex(gv) {
                continue;
            }
            let nb: Vec<Vertex> = out.neighbors(gv).collect();
            out.remove_vertex(gv);
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    let _ = out.add_edge(nb[i], nb[j]);
                }
            }
        }
        out
    }

    fn arb_graph(max_n: u32) -> impl Strategy<Value = Graph> {
        (2..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(u32, u32)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            proptest::collection::vec(proptest::bool::ANY, pairs.len()).prop_map(move |mask| {
                let picked: Vec<(u32, u32)> = pairs
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &b)| b)
                    .map(|(&p, _)| p)
                    .collect();
                graph_from_edges(n, &picked)
            })
        })
    }

    proptest! {
        #[test]
        fn torso_is_order_independent(g in arb_graph(9), sel in proptest::collection::vec(proptest::bool::ANY, 9)) {
            let ghosts: GhostSet = g.vertices().filter(|&v| sel.get(v as usize).copied().unwrap_or(false)).collect();
            let asc: Vec<Vertex> = ghosts.iter().copied().collect();
            let mut desc = asc.clone();
            desc.reverse();
            prop_assert_eq!(torso_in_order(&g, &asc), torso_in_order(&g, &desc));
            prop_assert_eq!(torso(&g, &ghosts), torso_in_order(&g, &desc));
        }

        #[test]
        fn ghost_distance_matches_torso_bfs(g in arb_graph(10), sel in proptest::collection::vec(proptest::bool::ANY, 10)) {
            let ghosts: GhostSet = g.vertices().filter(|&v| sel.get(v as usize).copied().unwrap_or(false)).collect();
            let t = torso(&g, &ghosts);
            for x in t.vertices() {
                let td = t.bfs(x);
                let gd = ghost_dist_from(&g, &ghosts, x);
                for y in t.vertices() {
                    prop_assert_eq!(td.get(&y), gd.get(&y), "x={} y={}", x, y);
                }
            }
        }

        #[test]
        fn ghost_distance_symmetric(g in arb_graph(8), sel in proptest::collection::vec(proptest::bool::ANY, 8)) {
            let ghosts: GhostSet = g.vertices().filter(|&v| sel.get(v as usize).copied().unwrap_or(false)).collect();
            let vs: Vec<Vertex> = g.vertices().collect();
            for &x in &vs {
                for &y in &vs {
                    prop_assert_eq!(ghost_distance(&g, &ghosts, x, y), ghost_distance(&g, &ghosts, y, x));
                }
            }
        }

        #[test]
        fn normalize_is_idempotent(g in arb_graph(8), sel in proptest::collection::vec(proptest::bool::ANY, 8)) {
            let ghosts: GhostSet = g.vertices().filter(|&v| v != 0 && sel.get(v as usize).copied().unwrap_or(false)).collect();
            let (g1, r1) = normalize_ghosts(&g, &ghosts, 0);
            let (g2, r2) = normalize_ghosts(&g1, &r1, 0);
            prop_assert_eq!(&g1, &g2);
            prop_assert_eq!(&r1, &r2);
            // no ghost–ghost or ghost–root adjacency remains
            for &a in &r1 {
                prop_assert!(!g1.has_edge(0, a));
                for b in g1.neighbors(a) {
                    prop_assert!(!r1.contains(&b));
                }
            }
        }

        #[test]
        fn contraction_drops_one_vertex(g in arb_graph(8)) {
            let edges = g.edges();
            if let Some(&(u, v)) = edges.first() {
                let c = g.contract_edge(u, v, u).unwrap();
                prop_assert_eq!(c.n(), g.n() - 1);
                // neighbors of the removed vertex moved over
                for w in g.neighbors(v) {
                    if w != u {
                        prop_assert!(c.has_edge(u, w));
                    }
                }
            }
        }
    }
}
