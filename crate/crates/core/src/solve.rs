//! Exact solvers for k-path and k-cycle (directed or undirected, weighted or
//! not) by dynamic programming over tree decompositions, plus a brute-force
//! oracle, the sample-then-solve repetition driver, and a covering-family
//! builder.
//!
//! The DP runs on a nice form of the decomposition (leaf / introduce vertex /
//! introduce edge / forget / join) and represents partial solutions by
//! segment pairing: the set of vertex-disjoint directed path segments meeting
//! the current bag, each recorded by its visible tail and head (`None` for an
//! end already sealed off below the bag). Undirected queries run the same
//! directed machinery with every edge usable both ways. Weights are exact
//! rationals; witnesses are rebuilt from provenance links and re-validated
//! against the input graph, so a `found` answer is never a false positive.

use crate::cover::{sample_cover, Constants, CoverError, CoverResult};
use crate::decomp::TreeDecomposition;
use crate::graph::{Graph, Vertex, Weight};
use crate::rng::Sampler;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::Serialize;

/// Hard cap on the decomposition width the DP accepts.
pub const WIDTH_BUDGET: usize = 14;
/// Largest vertex count the brute-force oracle accepts.
pub const BRUTE_FORCE_CAP: usize = 16;

// ---------------------------------------------------------------------------
// queries, reports, errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Path,
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Exists,
    MinWeight,
    MaxWeight,
}

/// What to search for: a simple path or cycle on exactly `k` vertices.
/// `directed` restricts traversal to annotated arcs; an edge without an arc
/// annotation is unusable in a directed query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathQuery {
    pub kind: QueryKind,
    pub k: u32,
    pub directed: bool,
    pub objective: Objective,
}

impl PathQuery {
    pub fn validate(&self) -> Result<(), SolveError> {
        match self.kind {
            QueryKind::Path if self.k < 2 => {
                Err(SolveError::BadQuery("a path query needs k of at least 2"))
            }
            QueryKind::Cycle if self.k < 3 => {
                Err(SolveError::BadQuery("a cycle query needs k of at least 3"))
            }
            _ => Ok(()),
        }
    }
}

/// Answer of a single exact solve: the witness lists the path's vertices in
/// traversal order (for cycles, without repeating the first vertex).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpOutcome {
    pub found: bool,
    pub witness: Option<Vec<Vertex>>,
    pub weight: Option<Weight>,
}

impl DpOutcome {
    fn not_found() -> Self {
        DpOutcome {
            found: false,
            witness: None,
            weight: None,
        }
    }
}

/// Result of the sample-then-solve driver. `found` answers are re-validated
/// against the original graph; a negative answer after all trials may still
/// be a false negative. `widths` records the sampled decomposition width of
/// every trial, including those skipped for exceeding the width budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub found: bool,
    pub witness: Option<Vec<Vertex>>,
    pub weight: Option<Weight>,
    pub trials_used: u32,
    pub widths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    BadQuery(&'static str),
    /// The decomposition is wider than the DP budget; the caller should
    /// re-sample rather than wait out an exponential table.
    WidthTooLarge { width: usize, budget: usize },
    /// The brute-force oracle refuses graphs above its vertex cap.
    TooLarge { n: usize, cap: usize },
    /// The supplied decomposition does not validate against the graph.
    InvalidDecomposition,
    /// An internal consistency check failed; this is a bug.
    Internal(&'static str),
    Cover(CoverError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::BadQuery(s) => write!(f, "bad query: {s}"),
            SolveError::WidthTooLarge { width, budget } => {
                write!(f, "decomposition width {width} exceeds the DP budget {budget}")
            }
            SolveError::TooLarge { n, cap } => {
                write!(f, "graph with {n} vertices exceeds the brute-force cap {cap}")
            }
            SolveError::InvalidDecomposition => {
                write!(f, "tree decomposition does not validate against the graph")
            }
            SolveError::Internal(s) => write!(f, "internal solver invariant violated: {s}"),
            SolveError::Cover(e) => write!(f, "cover sampling failed: {e}"),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<CoverError> for SolveError {
    fn from(e: CoverError) -> Self {
        SolveError::Cover(e)
    }
}

// ---------------------------------------------------------------------------
// witness validation
// ---------------------------------------------------------------------------

/// Checks a witness from scratch against `g`: right length, distinct
/// vertices, every hop an edge of `g` in an allowed direction (closing hop
/// included for cycles). Returns the total traversed weight.
pub fn validate_witness(
    g: &Graph,
    query: &PathQuery,
    witness: &[Vertex],
) -> Result<Weight, &'static str> {
    if witness.len() != query.k as usize {
        return Err("witness has the wrong number of vertices");
    }
    let distinct: BTreeSet<Vertex> = witness.iter().copied().collect();
    if distinct.len() != witness.len() {
        return Err("witness repeats a vertex");
    }
    if witness.iter().any(|v| !g.has_vertex(*v)) {
        return Err("witness uses a vertex outside the graph");
    }
    let mut hops: Vec<(Vertex, Vertex)> = witness.windows(2).map(|w| (w[0], w[1])).collect();
    if query.kind == QueryKind::Cycle {
        hops.push((witness[witness.len() - 1], witness[0]));
    }
    let mut total = Weight::from_integer(0);
    for (a, b) in hops {
        if !g.has_edge(a, b) {
            return Err("witness hop is not an edge");
        }
        if query.directed && !g.has_arc(a, b) {
            return Err("witness hop violates an arc direction");
        }
        total += g.weight(a, b);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// nice decompositions
// ---------------------------------------------------------------------------

enum NiceNode {
    /// Empty bag.
    Leaf,
    /// Bag of `child` plus `v`.
    Introduce { child: usize, v: Vertex },
    /// Bag of `child` minus `v`.
    Forget { child: usize, v: Vertex },
    /// Same bag as `child`; the edge `{u, v}` becomes usable here.
    IntroEdge { child: usize, u: Vertex, v: Vertex },
    /// Both children carry the same bag.
    Join { left: usize, right: usize },
}

struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
}

/// Converts a rooted decomposition into nice form. Each graph edge is
/// assigned to exactly one decomposition node containing both endpoints and
/// introduced there; the top of the tree forgets the root bag down to empty.
fn build_nice(g: &Graph, td: &TreeDecomposition) -> Result<NiceDecomposition, SolveError> {
    let n = td.bags.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut edges_at: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        let host = (0..n)
            .find(|&i| td.bags[i].contains(&u) && td.bags[i].contains(&v))
            .ok_or(SolveError::InvalidDecomposition)?;
        edges_at[host].push((u, v));
    }

    // Iterative post-order over the rooted tree.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut stack = vec![td.root];
    let mut seen = vec![false; n];
    seen[td.root] = true;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &c in &adj[t] {
            if !seen[c] {
                seen[c] = true;
                parent[c] = Some(t);
                stack.push(c);
            }
        }
    }
    if order.len() != n {
        return Err(SolveError::InvalidDecomposition);
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &t in &order {
        if let Some(p) = parent[t] {
            children[p].push(t);
        }
    }

    let mut nodes: Vec<NiceNode> = Vec::new();
    let mut top_of: Vec<usize> = vec![usize::MAX; n];
    for &t in order.iter().rev() {
        let bag = &td.bags[t];
        let mut acc: Option<usize> = None;
        for &c in &children[t] {
            let mut cur = top_of[c];
            for &v in td.bags[c].iter().filter(|v| !bag.contains(v)) {
                nodes.push(NiceNode::Forget { child: cur, v });
                cur = nodes.len() - 1;
            }
            for &v in bag.iter().filter(|v| !td.bags[c].contains(v)) {
                nodes.push(NiceNode::Introduce { child: cur, v });
                cur = nodes.len() - 1;
            }
            acc = Some(match acc {
                None => cur,
                Some(a) => {
                    nodes.push(NiceNode::Join { left: a, right: cur });
                    nodes.len() - 1
                }
            });
        }
        let mut cur = match acc {
            Some(a) => a,
            None => {
                nodes.push(NiceNode::Leaf);
                let mut cur = nodes.len() - 1;
                for &v in bag.iter() {
                    nodes.push(NiceNode::Introduce { child: cur, v });
                    cur = nodes.len() - 1;
                }
                cur
            }
        };
        for &(u, v) in &edges_at[t] {
            nodes.push(NiceNode::IntroEdge { child: cur, u, v });
            cur = nodes.len() - 1;
        }
        top_of[t] = cur;
    }
    let mut cur = top_of[td.root];
    for &v in td.bags[td.root].iter() {
        nodes.push(NiceNode::Forget { child: cur, v });
        cur = nodes.len() - 1;
    }
    Ok(NiceDecomposition { nodes, root: cur })
}

// ---------------------------------------------------------------------------
// the dynamic program
// ---------------------------------------------------------------------------

/// A segment end visible in the bag, or `None` once sealed below it.
type EndTag = Option<Vertex>;

/// Interface of a partial solution at a bag: the visible segments as
/// (tail, head) pairs, bag vertices that are used but no longer extendable,
/// and the total vertex count across all segments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct DpState {
    pairs: Vec<(EndTag, EndTag)>,
    internal: Vec<Vertex>,
    count: u32,
}

impl DpState {
    fn start() -> Self {
        DpState {
            pairs: Vec::new(),
            internal: Vec::new(),
            count: 0,
        }
    }

    fn sealed_ends(&self) -> usize {
        self.pairs
            .iter()
            .map(|p| usize::from(p.0.is_none()) + usize::from(p.1.is_none()))
            .sum()
    }

    fn is_tail(&self, v: Vertex) -> bool {
        self.pairs.iter().any(|p| p.0 == Some(v))
    }

    fn is_head(&self, v: Vertex) -> bool {
        self.pairs.iter().any(|p| p.1 == Some(v))
    }

    fn used_vertices(&self) -> BTreeSet<Vertex> {
        let mut s: BTreeSet<Vertex> = self.internal.iter().copied().collect();
        for p in &self.pairs {
            if let Some(v) = p.0 {
                s.insert(v);
            }
            if let Some(v) = p.1 {
                s.insert(v);
            }
        }
        s
    }
}

enum ProvNode {
    Start,
    TakeVertex { parent: usize, v: Vertex },
    TakeEdge { parent: usize, a: Vertex, b: Vertex },
    Merge { left: usize, right: usize },
}

#[derive(Clone, Copy)]
struct Entry {
    weight: Weight,
    prov: usize,
}

fn better(objective: Objective, new: Weight, old: Weight) -> bool {
    match objective {
        Objective::Exists => false,
        Objective::MinWeight => new < old,
        Objective::MaxWeight => new > old,
    }
}

fn upsert(
    table: &mut BTreeMap<DpState, Entry>,
    objective: Objective,
    state: DpState,
    entry: Entry,
) {
    match table.get_mut(&state) {
        None => {
            table.insert(state, entry);
        }
        Some(old) => {
            if better(objective, entry.weight, old.weight) {
                *old = entry;
            }
        }
    }
}

/// Outcome of combining two join-child states.
enum Spliced {
    Incompatible,
    State(DpState),
    /// The union closed into one complete solution of exactly k vertices.
    Done,
}

/// Combines partial solutions from the two sides of a join. The sides share
/// only bag vertices; segments splice where one side's visible head is the
/// other side's visible tail, singleton segments dissolve into the other
/// side's structure, and any in/out slot claimed by both sides kills the
/// combination.
fn splice(s1: &DpState, s2: &DpState, k: u32, kind: QueryKind) -> Spliced {
    let used1 = s1.used_vertices();
    let used2 = s2.used_vertices();
    let shared: Vec<Vertex> = used1.intersection(&used2).copied().collect();
    let count = s1.count + s2.count - shared.len() as u32;
    if count > k {
        return Spliced::Incompatible;
    }
    for &v in &shared {
        let in1 = !s1.is_tail(v);
        let in2 = !s2.is_tail(v);
        let out1 = !s1.is_head(v);
        let out2 = !s2.is_head(v);
        // A slot is filled when the vertex is used and not the matching kind
        // of end; two fillings of the same slot would give degree 3 or a
        // second in/out arc.
        if (in1 && in2) || (out1 && out2) {
            return Spliced::Incompatible;
        }
    }

    // Segment list with dissolved singletons dropped: a lone-vertex segment
    // adds nothing when the other side already uses its vertex.
    let singleton = |s: &DpState, v: Vertex| s.pairs.contains(&(Some(v), Some(v)));
    let mut segs: Vec<(EndTag, EndTag, u8)> = Vec::new();
    for &(t, h) in &s1.pairs {
        if let (Some(a), Some(b)) = (t, h) {
            if a == b && used2.contains(&a) && !singleton(s2, a) {
                continue;
            }
        }
        segs.push((t, h, 0));
    }
    for &(t, h) in &s2.pairs {
        if let (Some(a), Some(b)) = (t, h) {
            if a == b && used1.contains(&a) {
                continue;
            }
        }
        segs.push((t, h, 1));
    }

    // succ[i] = j when segment i's head meets segment j's tail across sides.
    let find_tail = |v: Vertex, side: u8| {
        segs.iter()
            .position(|&(t, _, s)| s != side && t == Some(v))
    };
    let mut succ: Vec<Option<usize>> = Vec::with_capacity(segs.len());
    let mut has_pred: Vec<bool> = vec![false; segs.len()];
    for &(_, h, side) in &segs {
        let nxt = h.and_then(|v| {
            if shared.binary_search(&v).is_ok() {
                find_tail(v, side)
            } else {
                None
            }
        });
        succ.push(nxt);
    }
    for &nxt in succ.iter().flatten() {
        has_pred[nxt] = true;
    }

    let mut visited = vec![false; segs.len()];
    let mut chains: Vec<(EndTag, EndTag)> = Vec::new();
    for i in 0..segs.len() {
        if has_pred[i] || visited[i] {
            continue;
        }
        let tail = segs[i].0;
        let mut j = i;
        visited[j] = true;
        while let Some(nj) = succ[j] {
            j = nj;
            visited[j] = true;
        }
        chains.push((tail, segs[j].1));
    }
    if visited.iter().any(|v| !v) {
        // Leftover segments form closed loops.
        if kind == QueryKind::Cycle && chains.is_empty() && count == k {
            // All segments lie on one closed structure only if the loop is
            // everything; several disjoint loops can never merge again.
            let loop_members = visited.iter().filter(|v| !*v).count();
            let mut j = succ
                .iter()
                .enumerate()
                .find(|(i, _)| !visited[*i])
                .map(|(i, _)| i)
                .expect("an unvisited segment exists");
            let start = j;
            let mut len = 0usize;
            loop {
                len += 1;
                match succ[j] {
                    Some(nj) => j = nj,
                    None => break,
                }
                if j == start {
                    break;
                }
            }
            if len == loop_members {
                return Spliced::Done;
            }
        }
        return Spliced::Incompatible;
    }

    let sealed: usize = chains
        .iter()
        .map(|p| usize::from(p.0.is_none()) + usize::from(p.1.is_none()))
        .sum();
    match kind {
        QueryKind::Cycle if sealed > 0 => return Spliced::Incompatible,
        QueryKind::Path if sealed > 2 => return Spliced::Incompatible,
        _ => {}
    }
    if chains.iter().any(|p| p.0.is_none() && p.1.is_none()) {
        return if kind == QueryKind::Path && chains.len() == 1 && count == k {
            Spliced::Done
        } else {
            Spliced::Incompatible
        };
    }

    let mut pairs = chains;
    pairs.sort();
    let ends: BTreeSet<Vertex> = pairs
        .iter()
        .flat_map(|p| [p.0, p.1])
        .flatten()
        .collect();
    let internal: Vec<Vertex> = used1
        .union(&used2)
        .copied()
        .filter(|v| !ends.contains(v))
        .collect();
    Spliced::State(DpState {
        pairs,
        internal,
        count,
    })
}

struct DpRun<'a> {
    g: &'a Graph,
    query: &'a PathQuery,
    arena: Vec<ProvNode>,
    candidates: Vec<Entry>,
}

impl<'a> DpRun<'a> {
    fn push_prov(&mut self, p: ProvNode) -> usize {
        self.arena.push(p);
        self.arena.len() - 1
    }

    fn record(&mut self, entry: Entry) {
        match self
            .candidates
            .first()
            .map(|c| better(self.query.objective, entry.weight, c.weight))
        {
            None => self.candidates.push(entry),
            Some(true) => self.candidates[0] = entry,
            Some(false) => {}
        }
    }

    /// Directions in which the edge `{u, v}` may be traversed.
    fn directions(&self, u: Vertex, v: Vertex) -> Vec<(Vertex, Vertex)> {
        if self.query.directed {
            let mut d = Vec::new();
            if self.g.has_arc(u, v) {
                d.push((u, v));
            }
            if self.g.has_arc(v, u) {
                d.push((v, u));
            }
            d
        } else {
            vec![(u, v), (v, u)]
        }
    }

    fn introduce(
        &mut self,
        child: BTreeMap<DpState, Entry>,
        v: Vertex,
    ) -> BTreeMap<DpState, Entry> {
        let k = self.query.k;
        let obj = self.query.objective;
        let mut out = BTreeMap::new();
        for (st, en) in child {
            if st.count < k {
                let mut pairs = st.pairs.clone();
                pairs.push((Some(v), Some(v)));
                pairs.sort();
                let st2 = DpState {
                    pairs,
                    internal: st.internal.clone(),
                    count: st.count + 1,
                };
                let prov = self.push_prov(ProvNode::TakeVertex { parent: en.prov, v });
                upsert(
                    &mut out,
                    obj,
                    st2,
                    Entry {
                        weight: en.weight,
                        prov,
                    },
                );
            }
            upsert(&mut out, obj, st, en);
        }
        out
    }

    fn intro_edge(
        &mut self,
        child: BTreeMap<DpState, Entry>,
        u: Vertex,
        v: Vertex,
    ) -> BTreeMap<DpState, Entry> {
        let k = self.query.k;
        let obj = self.query.objective;
        let kind = self.query.kind;
        let w = self.g.weight(u, v);
        let dirs = self.directions(u, v);
        let mut out = BTreeMap::new();
        for (st, en) in child {
            for &(a, b) in &dirs {
                let hi = st.pairs.iter().position(|p| p.1 == Some(a));
                let ti = st.pairs.iter().position(|p| p.0 == Some(b));
                let (i, j) = match (hi, ti) {
                    (Some(i), Some(j)) => (i, j),
                    _ => continue,
                };
                if i == j {
                    // Closing the segment into a cycle.
                    if kind == QueryKind::Cycle && st.pairs.len() == 1 && st.count == k {
                        let prov = self.push_prov(ProvNode::TakeEdge {
                            parent: en.prov,
                            a,
                            b,
                        });
                        self.record(Entry {
                            weight: en.weight + w,
                            prov,
                        });
                    }
                    continue;
                }
                let merged = (st.pairs[i].0, st.pairs[j].1);
                if merged.0.is_none() && merged.1.is_none() {
                    // Joining a sealed-tail segment to a sealed-head one
                    // completes a path; with anything else still open the
                    // result is dead either way.
                    if st.pairs.len() == 2 && st.count == k {
                        let prov = self.push_prov(ProvNode::TakeEdge {
                            parent: en.prov,
                            a,
                            b,
                        });
                        self.record(Entry {
                            weight: en.weight + w,
                            prov,
                        });
                    }
                    continue;
                }
                let mut pairs = st.pairs.clone();
                let (first, second) = if i < j { (j, i) } else { (i, j) };
                pairs.remove(first);
                pairs.remove(second);
                pairs.push(merged);
                pairs.sort();
                let mut internal = st.internal.clone();
                if merged.0 != Some(a) {
                    internal.push(a);
                }
                if merged.1 != Some(b) {
                    internal.push(b);
                }
                internal.sort();
                let st2 = DpState {
                    pairs,
                    internal,
                    count: st.count,
                };
                if st2.sealed_ends() > 2 {
                    continue;
                }
                let prov = self.push_prov(ProvNode::TakeEdge {
                    parent: en.prov,
                    a,
                    b,
                });
                upsert(
                    &mut out,
                    obj,
                    st2,
                    Entry {
                        weight: en.weight + w,
                        prov,
                    },
                );
            }
            upsert(&mut out, obj, st, en);
        }
        out
    }

    fn forget(&mut self, child: BTreeMap<DpState, Entry>, v: Vertex) -> BTreeMap<DpState, Entry> {
        let k = self.query.k;
        let obj = self.query.objective;
        let kind = self.query.kind;
        let mut out = BTreeMap::new();
        for (st, en) in child {
            if let Ok(pos) = st.internal.binary_search(&v) {
                let mut internal = st.internal.clone();
                internal.remove(pos);
                let st2 = DpState {
                    pairs: st.pairs.clone(),
                    internal,
                    count: st.count,
                };
                upsert(&mut out, obj, st2, en);
            } else if st.pairs.iter().any(|p| p.0 == Some(v) || p.1 == Some(v)) {
                if kind == QueryKind::Cycle {
                    // A cycle has no endpoints to seal; this branch dies.
                    continue;
                }
                let mut pairs: Vec<(EndTag, EndTag)> = st
                    .pairs
                    .iter()
                    .map(|&(t, h)| {
                        (
                            if t == Some(v) { None } else { t },
                            if h == Some(v) { None } else { h },
                        )
                    })
                    .collect();
                if pairs.iter().any(|p| p.0.is_none() && p.1.is_none()) {
                    if pairs.len() == 1 && st.count == k {
                        self.record(en);
                    }
                    continue;
                }
                pairs.sort();
                let st2 = DpState {
                    pairs,
                    internal: st.internal.clone(),
                    count: st.count,
                };
                if st2.sealed_ends() > 2 {
                    continue;
                }
                upsert(&mut out, obj, st2, en);
            } else {
                upsert(&mut out, obj, st, en);
            }
        }
        out
    }

    fn join(
        &mut self,
        left: BTreeMap<DpState, Entry>,
        right: BTreeMap<DpState, Entry>,
    ) -> BTreeMap<DpState, Entry> {
        let k = self.query.k;
        let obj = self.query.objective;
        let kind = self.query.kind;
        let mut out = BTreeMap::new();
        for (s1, e1) in &left {
            for (s2, e2) in &right {
                match splice(s1, s2, k, kind) {
                    Spliced::Incompatible => {}
                    Spliced::State(st) => {
                        let prov = self.push_prov(ProvNode::Merge {
                            left: e1.prov,
                            right: e2.prov,
                        });
                        upsert(
                            &mut out,
                            obj,
                            st,
                            Entry {
                                weight: e1.weight + e2.weight,
                                prov,
                            },
                        );
                    }
                    Spliced::Done => {
                        let prov = self.push_prov(ProvNode::Merge {
                            left: e1.prov,
                            right: e2.prov,
                        });
                        self.record(Entry {
                            weight: e1.weight + e2.weight,
                            prov,
                        });
                    }
                }
            }
        }
        out
    }

    /// Rebuilds the witness of a recorded solution by collecting its taken
    /// edges and walking them in order.
    fn assemble(&self, prov: usize) -> Result<Vec<Vertex>, SolveError> {
        let mut verts: BTreeSet<Vertex> = BTreeSet::new();
        let mut succ: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let mut pred: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let mut stack = vec![prov];
        while let Some(i) = stack.pop() {
            match self.arena[i] {
                ProvNode::Start => {}
                ProvNode::TakeVertex { parent, v } => {
                    verts.insert(v);
                    stack.push(parent);
                }
                ProvNode::TakeEdge { parent, a, b } => {
                    if succ.insert(a, b).is_some() || pred.insert(b, a).is_some() {
                        return Err(SolveError::Internal("witness edges branch"));
                    }
                    stack.push(parent);
                }
                ProvNode::Merge { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        let start = match self.query.kind {
            QueryKind::Path => verts
                .iter()
                .copied()
                .find(|v| !pred.contains_key(v))
                .ok_or(SolveError::Internal("path witness has no start"))?,
            QueryKind::Cycle => *verts
                .iter()
                .next()
                .ok_or(SolveError::Internal("cycle witness is empty"))?,
        };
        let mut seq = vec![start];
        let mut cur = start;
        while let Some(&nxt) = succ.get(&cur) {
            if nxt == start {
                break;
            }
            seq.push(nxt);
            cur = nxt;
            if seq.len() > verts.len() {
                return Err(SolveError::Internal("witness walk does not terminate"));
            }
        }
        if seq.len() != verts.len() {
            return Err(SolveError::Internal("witness walk misses vertices"));
        }
        Ok(seq)
    }
}

/// Exact k-path / k-cycle solve on `g` using the supplied decomposition.
/// The decomposition must validate against `g` and fit the width budget.
pub fn dp_longest_path(
    g: &Graph,
    td: &TreeDecomposition,
    query: &PathQuery,
) -> Result<DpOutcome, SolveError> {
    query.validate()?;
    if g.n() == 0 {
        return Ok(DpOutcome::not_found());
    }
    td.validate(g).map_err(|_| SolveError::InvalidDecomposition)?;
    if td.width() > WIDTH_BUDGET {
        return Err(SolveError::WidthTooLarge {
            width: td.width(),
            budget: WIDTH_BUDGET,
        });
    }
    let nice = build_nice(g, td)?;
    let mut run = DpRun {
        g,
        query,
        arena: vec![ProvNode::Start],
        candidates: Vec::new(),
    };
    let mut tables: Vec<BTreeMap<DpState, Entry>> = Vec::with_capacity(nice.nodes.len());
    for i in 0..nice.nodes.len() {
        let table = match nice.nodes[i] {
            NiceNode::Leaf => {
                let mut t = BTreeMap::new();
                t.insert(
                    DpState::start(),
                    Entry {
                        weight: Weight::from_integer(0),
                        prov: 0,
                    },
                );
                t
            }
            NiceNode::Introduce { child, v } => {
                let ct = core::mem::take(&mut tables[child]);
                run.introduce(ct, v)
            }
            NiceNode::IntroEdge { child, u, v } => {
                let ct = core::mem::take(&mut tables[child]);
                run.intro_edge(ct, u, v)
            }
            NiceNode::Forget { child, v } => {
                let ct = core::mem::take(&mut tables[child]);
                run.forget(ct, v)
            }
            NiceNode::Join { left, right } => {
                let lt = core::mem::take(&mut tables[left]);
                let rt = core::mem::take(&mut tables[right]);
                run.join(lt, rt)
            }
        };
        tables.push(table);
    }
    debug_assert_eq!(nice.root, nice.nodes.len() - 1);

    match run.candidates.first().copied() {
        None => Ok(DpOutcome::not_found()),
        Some(best) => {
            let witness = run.assemble(best.prov)?;
            let checked = validate_witness(g, query, &witness)
                .map_err(SolveError::Internal)?;
            if checked != best.weight {
                return Err(SolveError::Internal("witness weight disagrees with the table"));
            }
            Ok(DpOutcome {
                found: true,
                witness: Some(witness),
                weight: Some(best.weight),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// brute force oracle
// ---------------------------------------------------------------------------

/// Exhaustive enumeration of simple k-paths / k-cycles. Cycles are
/// canonicalized to start at their smallest vertex so each one is seen once
/// per direction.
pub fn brute_force_paths(g: &Graph, query: &PathQuery) -> Result<DpOutcome, SolveError> {
    query.validate()?;
    if g.n() > BRUTE_FORCE_CAP {
        return Err(SolveError::TooLarge {
            n: g.n(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let k = query.k as usize;
    let allowed = |a: Vertex, b: Vertex| {
        g.has_edge(a, b) && (!query.directed || g.has_arc(a, b))
    };
    let mut best: Option<(Weight, Vec<Vertex>)> = None;
    let mut consider = |w: Weight, seq: &[Vertex], best: &mut Option<(Weight, Vec<Vertex>)>| {
        let take = match best {
            None => true,
            Some((bw, _)) => better(query.objective, w, *bw),
        };
        if take {
            *best = Some((w, seq.to_vec()));
        }
    };

    fn extend(
        g: &Graph,
        query: &PathQuery,
        allowed: &dyn Fn(Vertex, Vertex) -> bool,
        seq: &mut Vec<Vertex>,
        weight: Weight,
        k: usize,
        consider: &mut dyn FnMut(Weight, &[Vertex], &mut Option<(Weight, Vec<Vertex>)>),
        best: &mut Option<(Weight, Vec<Vertex>)>,
    ) {
        if seq.len() == k {
            match query.kind {
                QueryKind::Path => consider(weight, seq, best),
                QueryKind::Cycle => {
                    let (last, first) = (seq[seq.len() - 1], seq[0]);
                    if allowed(last, first) {
                        consider(weight + g.weight(last, first), seq, best);
                    }
                }
            }
            return;
        }
        let last = seq[seq.len() - 1];
        let floor = seq[0];
        for nb in g.neighbors(last) {
            if query.kind == QueryKind::Cycle && nb <= floor {
                continue;
            }
            if seq.contains(&nb) || !allowed(last, nb) {
                continue;
            }
            seq.push(nb);
            extend(
                g,
                query,
                allowed,
                seq,
                weight + g.weight(last, nb),
                k,
                consider,
                best,
            );
            seq.pop();
        }
    }

    for start in g.vertices() {
        let mut seq = vec![start];
        extend(
            g,
            query,
            &allowed,
            &mut seq,
            Weight::from_integer(0),
            k,
            &mut consider,
            &mut best,
        );
    }
    Ok(match best {
        None => DpOutcome::not_found(),
        Some((w, seq)) => DpOutcome {
            found: true,
            witness: Some(seq),
            weight: Some(w),
        },
    })
}

// ---------------------------------------------------------------------------
// repetition driver and covering family
// ---------------------------------------------------------------------------

/// Repeats sample-cover-then-solve up to `trials` times; per-trial samplers
/// derive from `master_seed` and the trial index. A trial whose sampled
/// decomposition exceeds the width budget is skipped but still counts.
/// Positive answers are re-validated against `g0` before being returned, so
/// the only possible error direction is a false negative.
pub fn solve_with_repetition(
    g0: &Graph,
    query: &PathQuery,
    trials: u32,
    c: &Constants,
    master_seed: u64,
) -> Result<SolveReport, SolveError> {
    query.validate()?;
    c.validate()?;
    let mut widths = Vec::new();
    for t in 0..trials {
        let mut s = Sampler::for_trial(master_seed, u64::from(t));
        let cov = sample_cover(g0, c, &mut s)?;
        widths.push(cov.td.width());
        if cov.td.width() > WIDTH_BUDGET {
            continue;
        }
        let ga = g0.induced(&cov.a);
        let out = dp_longest_path(&ga, &cov.td, query)?;
        if out.found {
            let witness = out
                .witness
                .ok_or(SolveError::Internal("found answer without a witness"))?;
            let weight =
                validate_witness(g0, query, &witness).map_err(SolveError::Internal)?;
            return Ok(SolveReport {
                found: true,
                witness: Some(witness),
                weight: Some(weight),
                trials_used: t + 1,
                widths,
            });
        }
    }
    Ok(SolveReport {
        found: false,
        witness: None,
        weight: None,
        trials_used: trials,
        widths,
    })
}

/// Samples `trials` independent covers as a family; member `t` uses the
/// sampler stream for trial `t` of `master_seed`.
pub fn covering_family(
    g0: &Graph,
    trials: u32,
    c: &Constants,
    master_seed: u64,
) -> Result<Vec<CoverResult>, CoverError> {
    c.validate()?;
    let mut family = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut s = Sampler::for_trial(master_seed, u64::from(t));
        family.push(sample_cover(g0, c, &mut s)?);
    }
    Ok(family)
}
