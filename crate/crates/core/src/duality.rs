//! Cheap path families versus separator chains, by min-cost flow.
//!
//! Every vertex v other than the endpoints is split into a free copy v0
//! (capacity 1, cost 0) and a paid copy v1 (capacity 2q, cost 1), each copy
//! split into an in/out node pair. Edges become zero-cost arcs between copies
//! in both directions. A min-cost flow of value 2q either costs at most 2pq —
//! then its decomposition yields q paths each with at most 4p shared internal
//! vertices — or it certifies, through the dual distance labels of the final
//! residual network, a chain of p disjoint minimal separators of size at most
//! 2q each, ordered from s to t.

use crate::graph::{Graph, Vertex};
use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualityError {
    BadEndpoints,
    BadParams,
    Disconnected,
    /// A post-extraction validity check failed; this is a bug, never an
    /// expected outcome.
    ExtractionFailed(&'static str),
}

impl fmt::Display for DualityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualityError::BadEndpoints => write!(f, "endpoints must be distinct graph vertices"),
            DualityError::BadParams => write!(f, "p and q must be positive"),
            DualityError::Disconnected => write!(f, "graph must be connected"),
            DualityError::ExtractionFailed(what) => write!(f, "extraction failed: {}", what),
        }
    }
}

impl core::error::Error for DualityError {}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PathFamily {
    /// q paths from s to t, vertex sequences.
    pub paths: Vec<Vec<Vertex>>,
    /// Per path: internal vertices shared with another returned path.
    pub public: Vec<BTreeSet<Vertex>>,
    pub flow_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SeparatorChain {
    /// p disjoint minimal (s,t)-separators, ordered from the s side.
    pub separators: Vec<BTreeSet<Vertex>>,
    pub flow_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum DualityOutcome {
    Paths(PathFamily),
    Chain(SeparatorChain),
}

/// Optimal flow value plus the dual labels used for chain extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    pub cost: u64,
    /// Distance label of each free copy's exit node (reachable ones only).
    pub y: BTreeMap<Vertex, i64>,
    pub y_t: i64,
    /// Label increase across the free copy: 0 or 1.
    pub z: BTreeMap<Vertex, u8>,
}

const UNSAT: i64 = i64::MAX / 4;

struct Net {
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    head: Vec<Vec<usize>>,
}

impl Net {
    fn new(nodes: usize) -> Self {
        Net {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            head: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64, cost: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
        self.cost.push(-cost);
    }
}

/// The vertex-split flow network for `g` with endpoints `s`, `t`.
pub struct SplitNetwork {
    net: Net,
    /// Total node count: 2 endpoints plus 4 per internal vertex.
    pub nodes: usize,
    base: BTreeMap<Vertex, usize>,
    s_node: usize,
    t_node: usize,
    value: i64,
}

// node layout per internal vertex: base+0 = v0_in, base+1 = v0_out,
// base+2 = v1_in, base+3 = v1_out

pub fn build_network(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    q: u32,
) -> Result<SplitNetwork, DualityError> {
    if s == t || !g.has_vertex(s) || !g.has_vertex(t) {
        return Err(DualityError::BadEndpoints);
    }
    if q == 0 {
        return Err(DualityError::BadParams);
    }
    if !g.is_connected() {
        return Err(DualityError::Disconnected);
    }
    let big = 2 * q as i64;
    let mut base = BTreeMap::new();
    let mut next = 2usize;
    for v in g.vertices() {
        if v != s && v != t {
            base.insert(v, next);
            next += 4;
        }
    }
    let mut net = Net::new(next);
    for (&_v, &b) in &base {
        net.add(b, b + 1, 1, 0); // free copy
        net.add(b + 2, b + 3, big, 1); // paid copy
    }
    let outs = |v: Vertex| -> Vec<usize> {
        if v == s {
            vec![0]
        } else {
            let b = base[&v];
            vec![b + 1, b + 3]
        }
    };
    let ins = |v: Vertex| -> Vec<usize> {
        if v == t {
            vec![1]
        } else {
            let b = base[&v];
            vec![b, b + 2]
        }
    };
    for (u, v) in g.edges() {
        for (a, b) in [(u, v), (v, u)] {
            if a == t || b == s {
                continue;
            }
            for x in outs(a) {
                for y in ins(b) {
                    net.add(x, y, big, 0);
                }
            }
        }
    }
    Ok(SplitNetwork {
        net,
        nodes: next,
        base,
        s_node: 0,
        t_node: 1,
        value: big,
    })
}

impl SplitNetwork {
    /// Successive shortest augmenting paths with potentials. Dijkstra pops
    /// (distance, node-id) pairs, so equal-cost choices resolve by node id.
    fn solve(&mut self) -> Result<i64, DualityError> {
        let n = self.nodes;
        let net = &mut self.net;
        let mut pot = vec![0i64; n];
        let mut pushed = 0i64;
        let mut total = 0i64;
        while pushed < self.value {
            let mut dist = vec![UNSAT; n];
            let mut prev_arc = vec![usize::MAX; n];
            dist[self.s_node] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, self.s_node)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &a in &net.head[u] {
                    if net.cap[a] <= 0 {
                        continue;
                    }
                    let v = net.to[a];
                    let nd = d + net.cost[a] + pot[u] - pot[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        prev_arc[v] = a;
                        heap.push(Reverse((nd, v)));
                    }
                }
            }
            if dist[self.t_node] >= UNSAT {
                return Err(DualityError::ExtractionFailed("flow value unreachable"));
            }
            for v in 0..n {
                pot[v] += dist[v].min(dist[self.t_node]);
            }
            let mut delta = self.value - pushed;
            let mut v = self.t_node;
            while v != self.s_node {
                let a = prev_arc[v];
                delta = delta.min(net.cap[a]);
                v = net.to[a ^ 1];
            }
            let mut v = self.t_node;
            while v != self.s_node {
                let a = prev_arc[v];
                net.cap[a] -= delta;
                net.cap[a ^ 1] += delta;
                total += delta * net.cost[a];
                v = net.to[a ^ 1];
            }
            pushed += delta;
        }
        Ok(total)
    }

    /// Exact shortest distances from s in the final residual network
    /// (Bellman–Ford; the optimal residual graph has no negative cycles).
    fn residual_dist(&self) -> Vec<i64> {
        let n = self.nodes;
        let mut d = vec![UNSAT; n];
        d[self.s_node] = 0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if d[u] >= UNSAT {
                    continue;
                }
                for &a in &self.net.head[u] {
                    if self.net.cap[a] <= 0 {
                        continue;
                    }
                    let v = self.net.to[a];
                    if d[u] + self.net.cost[a] < d[v] {
                        d[v] = d[u] + self.net.cost[a];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    fn flow_on(&self, arc: usize) -> i64 {
        self.net.cap[arc ^ 1]
    }
}

/// Min-cost flow of value 2q with dual labels read from the final residual
/// network.
pub fn min_cost_flow(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    q: u32,
) -> Result<FlowSolution, DualityError> {
    let mut sn = build_network(g, s, t, q)?;
    let cost = sn.solve()?;
    let d = sn.residual_dist();
    let mut y = BTreeMap::new();
    let mut z = BTreeMap::new();
    for (&v, &b) in &sn.base {
        let din = d[b];
        let dout = d[b + 1];
        if din < UNSAT && dout < UNSAT {
            y.insert(v, dout);
            let zv = dout - din;
            if !(0..=1).contains(&zv) {
                return Err(DualityError::ExtractionFailed("dual step outside {0,1}"));
            }
            z.insert(v, zv as u8);
        } else {
            z.insert(v, 0);
        }
    }
    // The sink is unreachable only when the lone route is a saturated direct
    // s-t edge; the flow is then free and y_t = 0 closes the duality gap.
    let y_t = if d[sn.t_node] >= UNSAT {
        if cost != 0 {
            return Err(DualityError::ExtractionFailed("sink label unavailable"));
        }
        0
    } else {
        d[sn.t_node]
    };
    if y_t < 0 {
        return Err(DualityError::ExtractionFailed("negative sink label"));
    }
    let zsum: i64 = z.values().map(|&x| x as i64).sum();
    if cost != 2 * q as i64 * y_t - zsum {
        return Err(DualityError::ExtractionFailed("strong duality mismatch"));
    }
    Ok(FlowSolution {
        cost: cost as u64,
        y,
        y_t,
        z,
    })
}

fn decompose_unit_paths(sn: &mut SplitNetwork) -> Result<Vec<Vec<usize>>, DualityError> {
    let mut flow: Vec<i64> = (0..sn.net.to.len()).map(|a| sn.flow_on(a)).collect();
    let mut paths = Vec::new();
    for _ in 0..sn.value {
        let mut walk = vec![sn.s_node];
        let mut pos: BTreeMap<usize, usize> = [(sn.s_node, 0)].into_iter().collect();
        let mut arcs: Vec<usize> = Vec::new();
        while *walk.last().unwrap() != sn.t_node {
            let u = *walk.last().unwrap();
            let a = sn.net.head[u]
                .iter()
                .copied()
                .find(|&a| a % 2 == 0 && flow[a] > 0)
                .ok_or(DualityError::ExtractionFailed("stuck during decomposition"))?;
            let v = sn.net.to[a];
            if let Some(&at) = pos.get(&v) {
                // cancel the stray flow cycle and resume from v
                for &ca in &arcs[at..] {
                    flow[ca] -= 1;
                }
                for w in walk.drain(at + 1..) {
                    pos.remove(&w);
                }
                arcs.truncate(at);
            } else {
                pos.insert(v, walk.len());
                walk.push(v);
                arcs.push(a);
            }
            if walk.len() > 4 * sn.nodes {
                return Err(DualityError::ExtractionFailed("runaway decomposition"));
            }
        }
        for &a in &arcs {
            flow[a] -= 1;
        }
        paths.push(walk);
    }
    Ok(paths)
}

fn project_path(sn: &SplitNetwork, s: Vertex, t: Vertex, walk: &[usize]) -> Vec<Vertex> {
    let mut node_vertex: BTreeMap<usize, Vertex> = [(0, s), (1, t)].into_iter().collect();
    for (&v, &b) in &sn.base {
        for i in 0..4 {
            node_vertex.insert(b + i, v);
        }
    }
    let mut out: Vec<Vertex> = Vec::new();
    let mut at: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &n in walk {
        let v = node_vertex[&n];
        if out.last() == Some(&v) {
            continue;
        }
        if let Some(&i) = at.get(&v) {
            for w in out.drain(i + 1..) {
                at.remove(&w);
            }
        } else {
            at.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

fn minimalize_separator(g: &Graph, s: Vertex, t: Vertex, sep: &mut BTreeSet<Vertex>) {
    let candidates: Vec<Vertex> = sep.iter().copied().collect();
    for v in candidates {
        sep.remove(&v);
        if separates(g, s, t, sep) {
            continue;
        }
        sep.insert(v);
    }
}

fn separates(g: &Graph, s: Vertex, t: Vertex, sep: &BTreeSet<Vertex>) -> bool {
    if sep.contains(&s) || sep.contains(&t) {
        return false;
    }
    let keep: BTreeSet<Vertex> = g.vertices().filter(|v| !sep.contains(v)).collect();
    !g.induced(&keep).reach(s).contains(&t)
}

/// Violations reported by [`validate_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainViolation {
    WrongCount { want: usize, got: usize },
    TouchesEndpoint(usize),
    Overlapping(usize, usize),
    TooLarge(usize),
    NotSeparator(usize),
    NotMinimal(usize),
    OutOfOrder(usize, usize),
}

pub fn validate_chain(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    p: u32,
    q: u32,
    chain: &[BTreeSet<Vertex>],
) -> Result<(), ChainViolation> {
    if chain.len() != p as usize {
        return Err(ChainViolation::WrongCount {
            want: p as usize,
            got: chain.len(),
        });
    }
    for (j, c) in chain.iter().enumerate() {
        if c.contains(&s) || c.contains(&t) {
            return Err(ChainViolation::TouchesEndpoint(j));
        }
        if c.len() > 2 * q as usize {
            return Err(ChainViolation::TooLarge(j));
        }
        if !separates(g, s, t, c) {
            return Err(ChainViolation::NotSeparator(j));
        }
        for &v in c {
            let mut smaller = c.clone();
            smaller.remove(&v);
            if separates(g, s, t, &smaller) {
                return Err(ChainViolation::NotMinimal(j));
            }
        }
    }
    for i in 0..chain.len() {
        for j in i + 1..chain.len() {
            if chain[i].intersection(&chain[j]).next().is_some() {
                return Err(ChainViolation::Overlapping(i, j));
            }
        }
    }
    for i in 0..chain.len() {
        let keep: BTreeSet<Vertex> = g.vertices().filter(|v| !chain[i].contains(v)).collect();
        let sub = g.induced(&keep);
        let from_s = sub.reach(s);
        let from_t = sub.reach(t);
        for j in 0..chain.len() {
            if i < j && !chain[j].iter().all(|v| from_t.contains(v)) {
                return Err(ChainViolation::OutOfOrder(i, j));
            }
            if j < i && !chain[j].iter().all(|v| from_s.contains(v)) {
                return Err(ChainViolation::OutOfOrder(j, i));
            }
        }
    }
    Ok(())
}

/// Violations reported by [`validate_paths`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathsViolation {
    WrongCount { want: usize, got: usize },
    BadEndpoints(usize),
    NotSimple(usize),
    NotAPath(usize),
    PublicMismatch(usize),
    PublicTooLarge(usize),
}

pub fn validate_paths(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    p: u32,
    q: u32,
    fam: &PathFamily,
) -> Result<(), PathsViolation> {
    if fam.paths.len() != q as usize || fam.public.len() != q as usize {
        return Err(PathsViolation::WrongCount {
            want: q as usize,
            got: fam.paths.len(),
        });
    }
    for (i, path) in fam.paths.iter().enumerate() {
        if path.first() != Some(&s) || path.last() != Some(&t) {
            return Err(PathsViolation::BadEndpoints(i));
        }
        if path.iter().collect::<BTreeSet<_>>().len() != path.len() {
            return Err(PathsViolation::NotSimple(i));
        }
        for w in path.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(PathsViolation::NotAPath(i));
            }
        }
    }
    let mut multi: BTreeMap<Vertex, usize> = BTreeMap::new();
    for path in &fam.paths {
        for &v in &path[1..path.len() - 1] {
            *multi.entry(v).or_insert(0) += 1;
        }
    }
    for (i, path) in fam.paths.iter().enumerate() {
        let expect: BTreeSet<Vertex> = path[1..path.len() - 1]
            .iter()
            .copied()
            .filter(|v| multi[v] >= 2)
            .collect();
        if expect != fam.public[i] {
            return Err(PathsViolation::PublicMismatch(i));
        }
        if expect.len() > 4 * p as usize {
            return Err(PathsViolation::PublicTooLarge(i));
        }
    }
    Ok(())
}

/// Runs the flow and returns either q cheap paths or a p-chain of separators.
/// Output is deterministic; all structural guarantees are re-validated before
/// returning, and failures surface as [`DualityError::ExtractionFailed`].
pub fn duality(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    p: u32,
    q: u32,
) -> Result<DualityOutcome, DualityError> {
    if p == 0 {
        return Err(DualityError::BadParams);
    }
    let mut sn = build_network(g, s, t, q)?;
    let cost = sn.solve()?;
    let budget = 2 * p as i64 * q as i64;

    if cost <= budget {
        let walks = decompose_unit_paths(&mut sn)?;
        let projected: Vec<Vec<Vertex>> = walks
            .iter()
            .map(|w| project_path(&sn, s, t, w))
            .collect();
        // shared-vertex count per path over the whole 2q-family
        let mut multi: BTreeMap<Vertex, usize> = BTreeMap::new();
        for path in &projected {
            for &v in &path[1..path.len() - 1] {
                *multi.entry(v).or_insert(0) += 1;
            }
        }
        let mut scored: Vec<(usize, usize)> = projected
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let c = path[1..path.len() - 1]
                    .iter()
                    .filter(|v| multi[v] >= 2)
                    .count();
                (c, i)
            })
            .collect();
        let total_shared: usize = scored.iter().map(|&(c, _)| c).sum();
        if total_shared as i64 > 2 * cost {
            return Err(DualityError::ExtractionFailed("sharing exceeds twice the cost"));
        }
        scored.sort();
        let picked: Vec<Vec<Vertex>> = scored
            .iter()
            .take(q as usize)
            .map(|&(_, i)| projected[i].clone())
            .collect();
        let mut multi2: BTreeMap<Vertex, usize> = BTreeMap::new();
        for path in &picked {
            for &v in &path[1..path.len() - 1] {
                *multi2.entry(v).or_insert(0) += 1;
            }
        }
        let public: Vec<BTreeSet<Vertex>> = picked
            .iter()
            .map(|path| {
                path[1..path.len() - 1]
                    .iter()
                    .copied()
                    .filter(|v| multi2[v] >= 2)
                    .collect()
            })
            .collect();
        let fam = PathFamily {
            paths: picked,
            public,
            flow_cost: cost as u64,
        };
        if validate_paths(g, s, t, p, q, &fam).is_err() {
            return Err(DualityError::ExtractionFailed("path family invalid"));
        }
        return Ok(DualityOutcome::Paths(fam));
    }

    // expensive flow: read the chain from the dual labels
    let d = sn.residual_dist();
    let y_t = d[sn.t_node];
    let mut zsum = 0i64;
    let mut levels: BTreeMap<i64, BTreeSet<Vertex>> = BTreeMap::new();
    for (&v, &b) in &sn.base {
        let din = d[b];
        let dout = d[b + 1];
        if din >= UNSAT || dout >= UNSAT {
            continue;
        }
        let zv = dout - din;
        if !(0..=1).contains(&zv) {
            return Err(DualityError::ExtractionFailed("dual step outside {0,1}"));
        }
        zsum += zv;
        if zv == 1 {
            levels.entry(dout).or_default().insert(v);
        }
    }
    if y_t >= UNSAT || cost != 2 * q as i64 * y_t - zsum {
        return Err(DualityError::ExtractionFailed("strong duality mismatch"));
    }
    if y_t <= p as i64 {
        return Err(DualityError::ExtractionFailed("sink label too small for chain"));
    }
    let mut chain: Vec<BTreeSet<Vertex>> = Vec::new();
    for j in 1..=p as i64 {
        let mut c = levels.remove(&j).unwrap_or_default();
        if c.is_empty() {
            return Err(DualityError::ExtractionFailed("empty separator level"));
        }
        minimalize_separator(g, s, t, &mut c);
        chain.push(c);
    }
    if validate_chain(g, s, t, p, q, &chain).is_err() {
        return Err(DualityError::ExtractionFailed("chain invalid"));
    }
    Ok(DualityOutcome::Chain(SeparatorChain {
        separators: chain,
        flow_cost: cost as u64,
    }))
}

/// Slow reference: builds its own copy of the split network and augments one
/// unit at a time along the cheapest residual path found by exhaustive
/// enumeration of simple paths. Intended for cross-checking on tiny graphs.
pub fn flow_cost_reference(g: &Graph, s: Vertex, t: Vertex, q: u32) -> Result<u64, DualityError> {
    let sn = build_network(g, s, t, q)?;
    let nodes = sn.nodes;
    // flat arc table: (from, to, cap, cost), reverse at i^1
    let mut arcs: Vec<(usize, usize, i64, i64)> = Vec::new();
    for u in 0..nodes {
        for &a in &sn.net.head[u] {
            if a % 2 == 0 && sn.net.to[a ^ 1] == u {
                arcs.push((u, sn.net.to[a], sn.net.cap[a], sn.net.cost[a]));
                arcs.push((sn.net.to[a], u, 0, -sn.net.cost[a]));
            }
        }
    }
    let mut total = 0i64;
    for _ in 0..2 * q as i64 {
        // exhaustive DFS over simple residual paths, tracking the cheapest
        let mut best: Option<(i64, Vec<usize>)> = None;
        let mut on_path = vec![false; nodes];
        on_path[0] = true;
        fn dfs(
            arcs: &[(usize, usize, i64, i64)],
            heads: &[Vec<usize>],
            u: usize,
            cost: i64,
            slack: i64,
            on_path: &mut Vec<bool>,
            trail: &mut Vec<usize>,
            best: &mut Option<(i64, Vec<usize>)>,
        ) {
            if u == 1 {
                if best.as_ref().map(|(c, _)| cost < *c).unwrap_or(true) {
                    *best = Some((cost, trail.clone()));
                }
                return;
            }
            if let Some((c, _)) = best {
                // admissible pruning: remaining arcs can only lower cost by `slack`
                if cost - slack >= *c {
                    return;
                }
            }
            for &a in &heads[u] {
                let (_, v, cap, acost) = arcs[a];
                if cap <= 0 || on_path[v] {
                    continue;
                }
                on_path[v] = true;
                trail.push(a);
                dfs(arcs, heads, v, cost + acost, slack, on_path, trail, best);
                trail.pop();
                on_path[v] = false;
            }
        }
        let mut heads: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        for (i, &(from, _, _, _)) in arcs.iter().enumerate() {
            heads[from].push(i);
        }
        let slack = arcs.iter().filter(|&&(_, _, _, c)| c < 0).count() as i64;
        let mut trail = Vec::new();
        dfs(
            &arcs, &heads, 0, 0, slack, &mut on_path, &mut trail, &mut best,
        );
        let (cost, trail) = best.ok_or(DualityError::ExtractionFailed("reference infeasible"))?;
        for a in trail {
            arcs[a].2 -= 1;
            arcs[a ^ 1].2 += 1;
        }
        total += cost;
    }
    Ok(total as u64)
}
