//! Tree decompositions: validation, weighted balanced separators taken from a
//! centroid bag, elimination-order construction heuristics, and BFS layering.

use crate::graph::{Graph, Vertex};
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompError {
    NotATree,
    BadRoot,
    UnknownVertex(Vertex),
    VertexUncovered(Vertex),
    EdgeUncovered(Vertex, Vertex),
    DisconnectedSubtree(Vertex),
}

impl fmt::Display for DecompError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompError::NotATree => write!(f, "decomposition edges do not form a tree"),
            DecompError::BadRoot => write!(f, "root index out of range"),
            DecompError::UnknownVertex(v) => write!(f, "bag mentions unknown vertex {}", v),
            DecompError::VertexUncovered(v) => write!(f, "vertex {} is in no bag", v),
            DecompError::EdgeUncovered(u, v) => write!(f, "edge {}–{} is in no bag", u, v),
            DecompError::DisconnectedSubtree(v) => {
                write!(f, "bags containing {} do not form a subtree", v)
            }
        }
    }
}

impl core::error::Error for DecompError {}

/// Rooted tree decomposition. Node ids index `bags`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<Vertex>>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn single_bag(vs: BTreeSet<Vertex>) -> Self {
        TreeDecomposition {
            bags: vec![vs],
            edges: Vec::new(),
            root: 0,
        }
    }

    /// Max bag size minus one (0 for an all-empty decomposition).
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Intersects every bag with `keep`; tree shape and root are unchanged.
    pub fn restricted(&self, keep: &BTreeSet<Vertex>) -> TreeDecomposition {
        TreeDecomposition {
            bags: self
                .bags
                .iter()
                .map(|b| b.intersection(keep).copied().collect())
                .collect(),
            edges: self.edges.clone(),
            root: self.root,
        }
    }

    /// New decomposition with `root_bag` on top and every given decomposition
    /// attached below it (their node ids shifted).
    pub fn attach_under_root(
        root_bag: BTreeSet<Vertex>,
        children: Vec<TreeDecomposition>,
    ) -> TreeDecomposition {
        let mut bags = vec![root_bag];
        let mut edges = Vec::new();
        for child in children {
            let off = bags.len();
            edges.push((0, off + child.root));
            for (a, b) in child.edges {
                edges.push((off + a, off + b));
            }
            bags.extend(child.bags);
        }
        TreeDecomposition {
            bags,
            edges,
            root: 0,
        }
    }

    /// Checks the three decomposition conditions against `g`, plus tree shape
    /// and that bags only mention vertices of `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), DecompError> {
        let n = self.bags.len();
        if n == 0 {
            return if g.n() == 0 {
                Ok(())
            } else {
                Err(DecompError::VertexUncovered(g.vertices().next().unwrap()))
            };
        }
        if self.root >= n {
            return Err(DecompError::BadRoot);
        }
        if self.edges.len() != n - 1 {
            return Err(DecompError::NotATree);
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([0usize]);
        seen[0] = true;
        let mut cnt = 1;
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    cnt += 1;
                    q.push_back(y);
                }
            }
        }
        if cnt != n {
            return Err(DecompError::NotATree);
        }

        let mut where_in: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if !g.has_vertex(v) {
                    return Err(DecompError::UnknownVertex(v));
                }
                where_in.entry(v).or_default().push(i);
            }
        }
        for v in g.vertices() {
            if !where_in.contains_key(&v) {
                return Err(DecompError::VertexUncovered(v));
            }
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(DecompError::EdgeUncovered(u, v));
            }
        }
        for (&v, nodes) in &where_in {
            let inside: BTreeSet<usize> = nodes.iter().copied().collect();
            let start = nodes[0];
            let mut seen: BTreeSet<usize> = [start].into_iter().collect();
            let mut q = VecDeque::from([start]);
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if inside.contains(&y) && seen.insert(y) {
                        q.push_back(y);
                    }
                }
            }
            if seen.len() != nodes.len() {
                return Err(DecompError::DisconnectedSubtree(v));
            }
        }
        Ok(())
    }
}

/// Walks the decomposition tree from the root, moving toward the unique
/// too-heavy component until the current bag splits every component of
/// `g − bag` to weight ≤ half the total. Returns that bag.
///
/// `weights` defaults missing vertices to 0. Requires `td` valid for `g`.
pub fn balanced_separator(
    g: &Graph,
    td: &TreeDecomposition,
    weights: &BTreeMap<Vertex, u64>,
) -> BTreeSet<Vertex> {
    let w = |v: Vertex| weights.get(&v).copied().unwrap_or(0) as u128;
    let total: u128 = g.vertices().map(w).sum();
    let adj = td.adjacency();
    let heavy_comp = |bag: &BTreeSet<Vertex>| -> Option<BTreeSet<Vertex>> {
        let rest: BTreeSet<Vertex> = g.vertices().filter(|v| !bag.contains(v)).collect();
        g.induced(&rest)
            .components()
            .into_iter()
            .find(|c| 2 * c.iter().map(|&v| w(v)).sum::<u128>() > total)
    };

    let mut cur = td.root;
    let mut visited: BTreeSet<usize> = BTreeSet::new();
    loop {
        visited.insert(cur);
        let bag = &td.bags[cur];
        let heavy = match heavy_comp(bag) {
            None => return bag.clone(),
            Some(c) => c,
        };
        // step toward some bag holding a vertex of the heavy component
        let u = *heavy.iter().next().unwrap();
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut q = VecDeque::from([cur]);
        let mut found = None;
        'bfs: while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if y != cur && !prev.contains_key(&y) {
                    prev.insert(y, x);
                    if td.bags[y].contains(&u) {
                        found = Some(y);
                        break 'bfs;
                    }
                    q.push_back(y);
                }
            }
        }
        let mut step = match found {
            Some(mut node) => {
                while prev[&node] != cur {
                    node = prev[&node];
                }
                node
            }
            None => usize::MAX,
        };
        if step == usize::MAX || visited.contains(&step) {
            step = usize::MAX;
        }
        if step == usize::MAX {
            // fallback: scan every bag for the best split (never expected)
            let mut best: Option<(u128, usize)> = None;
            for (i, bag) in td.bags.iter().enumerate() {
                let rest: BTreeSet<Vertex> = g.vertices().filter(|v| !bag.contains(v)).collect();
                let maxw = g
                    .induced(&rest)
                    .components()
                    .into_iter()
                    .map(|c| c.iter().map(|&v| w(v)).sum::<u128>())
                    .max()
                    .unwrap_or(0);
                if best.map(|(bw, _)| (maxw, i) < (bw, best.unwrap().1)).unwrap_or(true) {
                    best = Some((maxw, i));
                }
            }
            return td.bags[best.unwrap().1].clone();
        }
        cur = step;
    }
}

fn eliminate(adj: &mut BTreeMap<Vertex, BTreeSet<Vertex>>, v: Vertex) -> BTreeSet<Vertex> {
    let nb = adj.remove(&v).unwrap();
    for &u in &nb {
        adj.get_mut(&u).unwrap().remove(&v);
    }
    let list: Vec<Vertex> = nb.iter().copied().collect();
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            adj.get_mut(&list[i]).unwrap().insert(list[j]);
            adj.get_mut(&list[j]).unwrap().insert(list[i]);
        }
    }
    nb
}

fn fill_in(adj: &BTreeMap<Vertex, BTreeSet<Vertex>>, v: Vertex) -> usize {
    let nb: Vec<Vertex> = adj[&v].iter().copied().collect();
    let mut missing = 0;
    for i in 0..nb.len() {
        for j in i + 1..nb.len() {
            if !adj[&nb[i]].contains(&nb[j]) {
                missing += 1;
            }
        }
    }
    missing
}

fn td_from_order(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let n = order.len();
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).collect()))
        .collect();
    let pos: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut bags: Vec<BTreeSet<Vertex>> = Vec::with_capacity(n);
    for &v in order {
        let nb = eliminate(&mut adj, v);
        let mut bag = nb;
        bag.insert(v);
        bags.push(bag);
    }
    let mut edges = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        // attach below the bag of the next-eliminated member
        let parent = bag
            .iter()
            .filter(|&&u| pos[&u] > i)
            .map(|&u| pos[&u])
            .min();
        match parent {
            Some(p) => edges.push((i, p)),
            None => {
                if i + 1 < n {
                    edges.push((i, i + 1));
                }
            }
        }
    }
    TreeDecomposition {
        bags,
        edges,
        root: n.saturating_sub(1),
    }
}

fn greedy_order(g: &Graph, min_fill: bool) -> Vec<Vertex> {
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).collect()))
        .collect();
    let mut order = Vec::with_capacity(g.n());
    while !adj.is_empty() {
        let pick = adj
            .keys()
            .copied()
            .min_by_key(|&v| {
                let score = if min_fill {
                    fill_in(&adj, v)
                } else {
                    adj[&v].len()
                };
                (score, v)
            })
            .unwrap();
        eliminate(&mut adj, pick);
        order.push(pick);
    }
    order
}

/// Builds a rooted tree decomposition via greedy elimination, trying min-fill
/// and min-degree and keeping the smaller width. Rooted at the first bag
/// containing `root` when present.
pub fn decompose(g: &Graph, root: Vertex) -> TreeDecomposition {
    if g.n() == 0 {
        return TreeDecomposition::single_bag(BTreeSet::new());
    }
    let a = td_from_order(g, &greedy_order(g, true));
    let b = td_from_order(g, &greedy_order(g, false));
    let mut td = if b.width() < a.width() { b } else { a };
    if let Some(i) = td.bags.iter().position(|bag| bag.contains(&root)) {
        td.root = i;
    }
    td
}

/// Like [`decompose`] but min-degree only. Trades a little width for a lot
/// of speed; meant for callers that decompose many graphs in a loop.
pub fn decompose_fast(g: &Graph, root: Vertex) -> TreeDecomposition {
    if g.n() == 0 {
        return TreeDecomposition::single_bag(BTreeSet::new());
    }
    let mut td = td_from_order(g, &greedy_order(g, false));
    if let Some(i) = td.bags.iter().position(|bag| bag.contains(&root)) {
        td.root = i;
    }
    td
}

/// BFS layers from `root` folded mod `ell`: layer i holds the vertices at
/// distance ≡ i (mod ell). Vertices unreachable from `root` appear in no
/// layer.
pub fn baker_layers(g: &Graph, root: Vertex, ell: usize) -> Vec<BTreeSet<Vertex>> {
    assert!(ell >= 1);
    let mut layers = vec![BTreeSet::new(); ell];
    for (v, d) in g.bfs(root) {
        layers[(d % ell as u64) as usize].insert(v);
    }
    layers
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: u32) -> Graph {
        let mut g = Graph::new();
        for v in 0..n {
            g.add_vertex(v).unwrap();
        }
        for v in 0..n - 1 {
            g.add_edge(v, v + 1).unwrap();
        }
        g
    }

    fn grid(rows: u32, cols: u32) -> Graph {
        let mut g = Graph::new();
        for v in 0..rows * cols {
            g.add_vertex(v).unwrap();
        }
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.add_edge(v, v + 1).unwrap();
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols).unwrap();
                }
            }
        }
        g
    }

    fn path_td(n: u32) -> TreeDecomposition {
        TreeDecomposition {
            bags: (0..n - 1).map(|i| [i, i + 1].into_iter().collect()).collect(),
            edges: (0..n as usize - 2).map(|i| (i, i + 1)).collect(),
            root: 0,
        }
    }

    #[test]
    fn single_bag_is_valid() {
        let g = path_graph(3);
        let td = TreeDecomposition::single_bag(g.vertex_set());
        assert!(td.validate(&g).is_ok());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn path_chain_is_valid() {
        let g = path_graph(5);
        let td = path_td(5);
        assert!(td.validate(&g).is_ok());
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn validator_catches_violations() {
        let g = path_graph(5);
        let mut td = path_td(5);
        td.bags[1].remove(&2); // edge 1–2 no longer covered
        assert_eq!(td.validate(&g), Err(DecompError::EdgeUncovered(1, 2)));

        let mut td2 = path_td(5);
        td2.edges.push((0, 3)); // cycle
        assert_eq!(td2.validate(&g), Err(DecompError::NotATree));

        let mut td3 = path_td(5);
        td3.bags[3].insert(0); // 0 in bags {0,1} and {3,4} but not between
        assert_eq!(td3.validate(&g), Err(DecompError::DisconnectedSubtree(0)));

        let mut td4 = path_td(5);
        td4.bags[0].insert(99);
        assert_eq!(td4.validate(&g), Err(DecompError::UnknownVertex(99)));
    }

    #[test]
    fn separator_contract_on_path() {
        let g = path_graph(7);
        let td = path_td(7);
        let w: BTreeMap<Vertex, u64> = (0..7).map(|v| (v, 1)).collect();
        let sep = balanced_separator(&g, &td, &w);
        assert!(sep.len() <= 2);
        let rest: BTreeSet<Vertex> = g.vertices().filter(|v| !sep.contains(v)).collect();
        for comp in g.induced(&rest).components() {
            assert!(2 * comp.len() <= 7);
        }
    }

    #[test]
    fn separator_follows_weight() {
        let g = path_graph(7);
        let td = path_td(7);
        let w: BTreeMap<Vertex, u64> = [(6u32, 10u64)].into_iter().collect();
        let sep = balanced_separator(&g, &td, &w);
        assert!(sep.contains(&6), "all weight sits on 6, so 6 must be cut: {:?}", sep);
    }

    #[test]
    fn separator_zero_weight_returns_root_bag() {
        let g = path_graph(7);
        let td = path_td(7);
        let sep = balanced_separator(&g, &td, &BTreeMap::new());
        assert_eq!(sep, td.bags[td.root]);
    }

    #[test]
    fn decompose_star_and_cycle() {
        let mut star = Graph::new();
        for v in 0..6 {
            star.add_vertex(v).unwrap();
        }
        for v in 1..6 {
            star.add_edge(0, v).unwrap();
        }
        let td = decompose(&star, 0);
        assert!(td.validate(&star).is_ok());
        assert_eq!(td.width(), 1);

        let mut cyc = path_graph(5);
        cyc.add_edge(4, 0).unwrap();
        let td = decompose(&cyc, 0);
        assert!(td.validate(&cyc).is_ok());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn decompose_grid_and_root_placement() {
        let g = grid(4, 4);
        let td = decompose(&g, 5);
        assert!(td.validate(&g).is_ok());
        assert!(td.width() <= 6, "width {}", td.width());
        assert!(td.bags[td.root].contains(&5));
    }

    #[test]
    fn fast_decompose_matches_contract() {
        let g = grid(5, 5);
        let td = decompose_fast(&g, 12);
        assert!(td.validate(&g).is_ok());
        assert!(td.bags[td.root].contains(&12));
        // min-degree alone may be wider than the two-heuristic pick, but
        // not by much on a grid
        assert!(td.width() <= 9, "width {}", td.width());
        assert!(decompose_fast(&Graph::new(), 0).validate(&Graph::new()).is_ok());
    }

    #[test]
    fn restriction_stays_valid() {
        let g = grid(3, 3);
        let td = decompose(&g, 0);
        let keep: BTreeSet<Vertex> = [0, 1, 2, 4, 7].into_iter().collect();
        let sub = g.induced(&keep);
        assert!(td.restricted(&keep).validate(&sub).is_ok());
    }

    #[test]
    fn attach_under_root_links_children() {
        let g = path_graph(4);
        let left: BTreeSet<Vertex> = [0, 1].into_iter().collect();
        let right: BTreeSet<Vertex> = [2, 3].into_iter().collect();
        let td = TreeDecomposition::attach_under_root(
            [1, 2].into_iter().collect(),
            alloc::vec![
                TreeDecomposition::single_bag(left),
                TreeDecomposition::single_bag(right)
            ],
        );
        assert!(td.validate(&g).is_ok());
        assert_eq!(td.bags.len(), 3);
    }

    #[test]
    fn baker_layers_fold_distances() {
        let g = path_graph(6);
        let layers = baker_layers(&g, 0, 3);
        assert_eq!(layers[0], [0, 3].into_iter().collect());
        assert_eq!(layers[1], [1, 4].into_iter().collect());
        assert_eq!(layers[2], [2, 5].into_iter().collect());
        let all = baker_layers(&g, 0, 1);
        assert_eq!(all[0].len(), 6);
    }

    #[test]
    fn baker_layer_removal_on_grid() {
        // removing one layer leaves strips of bounded width
        let g = grid(5, 5);
        let layers = baker_layers(&g, 0, 3);
        for layer in &layers {
            let rest: BTreeSet<Vertex> = g.vertices().filter(|v| !layer.contains(v)).collect();
            let sub = g.induced(&rest);
            let td = decompose(&sub, *rest.iter().next().unwrap_or(&0));
            assert!(td.validate(&sub).is_ok());
            assert!(td.width() <= 6, "width {}", td.width());
        }
    }

    use proptest::prelude::*;

    fn arb_graph(max_n: u32) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(u32, u32)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            proptest::collection::vec(proptest::bool::ANY, pairs.len()).prop_map(move |mask| {
                let mut g = Graph::new();
                for v in 0..n {
                    g.add_vertex(v).unwrap();
                }
                for (&(u, v), &b) in pairs.iter().zip(&mask) {
                    if b {
                        g.add_edge(u, v).unwrap();
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn decompose_always_validates(g in arb_graph(12)) {
            let td = decompose(&g, 0);
            prop_assert!(td.validate(&g).is_ok());
        }

        #[test]
        fn separator_always_balances(g in arb_graph(10)) {
            let td = decompose(&g, 0);
            let w: BTreeMap<Vertex, u64> = g.vertices().map(|v| (v, 1 + (v as u64 % 3))).collect();
            let total: u128 = w.values().map(|&x| x as u128).sum();
            let sep = balanced_separator(&g, &td, &w);
            prop_assert!(td.bags.contains(&sep));
            let rest: BTreeSet<Vertex> = g.vertices().filter(|v| !sep.contains(v)).collect();
            for comp in g.induced(&rest).components() {
                let cw: u128 = comp.iter().map(|v| w[v] as u128).sum();
                prop_assert!(2 * cw <= total);
            }
        }

        #[test]
        fn baker_layers_partition_reachable(g in arb_graph(10), ell in 1usize..4) {
            let layers = baker_layers(&g, 0, ell);
            let mut seen = BTreeSet::new();
            for layer in &layers {
                for &v in layer {
                    prop_assert!(seen.insert(v));
                }
            }
            prop_assert_eq!(seen, g.reach(0));
        }
    }
}
