//! Randomized covering sampler: draws a vertex subset `A` of a host graph
//! together with a tree decomposition of `G[A]`, such that any fixed small
//! connected pattern through the root survives inside `A` with probability
//! bounded below by an explicit formula ([`lb_value`]).
//!
//! The sampler recurses on instances carrying a root, light and heavy
//! terminals, ghost vertices (free to traverse; produced by contracting away
//! already-processed regions), and a credit counter for guessed terminals.
//! Each step either stops at a base case, or carves the part of the graph far
//! from the root into a bounded-radius cluster, splits on a balanced separator
//! of an island-contracted auxiliary graph, and recurses; when the recursion
//! decides to chase a far-away island it routes a cheap flow from the root
//! towards the island's centre and continues on either a family of
//! mostly-disjoint paths or a chain of small separators, whichever the flow
//! certifies.
//!
//! All randomness flows through a [`Sampler`], so runs are reproducible from a
//! seed and every decision is recorded in a [`TraceEvent`] log.

use crate::cluster::{cluster, ClusterError};
use crate::decomp::{balanced_separator, decompose, decompose_fast, TreeDecomposition};
use crate::duality::{duality, DualityError, DualityOutcome, PathFamily, SeparatorChain};
use crate::graph::{ball, ghost_dist_from, normalize_ghosts, torso, GhostSet, Graph, Vertex};
use crate::rng::Sampler;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use libm::{ceil, floor, log1p, log2, sqrt};
use serde::Serialize;

/// Leading coefficient of the distance/size penalty in [`lb_value`].
pub const SCORE_C1: f64 = 2.0;
/// Leading coefficient of the graph-potential term in [`lb_value`].
pub const SCORE_C2: f64 = 2.0;

/// Hard cap on recursion depth; hitting it means progress tracking is broken.
const MAX_DEPTH: u32 = 10_000;
/// How often a debug run re-rolls the cluster carve before giving up on
/// keeping the planted pattern.
const CARVE_RETRY_CAP: u32 = 500;

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Tuning knobs for the sampler, all derived from the target pattern size `k`,
/// a global shrink factor `scale`, and the treewidth coefficient `c_tw` of the
/// host graph class.
///
/// At `scale = 1` the derived radii and budgets are the ones needed by the
/// correctness analysis; smaller scales shrink every derived quantity
/// proportionally so that the deep branches of the recursion become observable
/// on graphs of practical size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    /// Largest pattern size the cover targets.
    pub k: u32,
    /// Global shrink factor in `(0, 1]` applied to every derived size.
    pub scale: f64,
    /// Treewidth coefficient of the host graph class.
    pub c_tw: u32,
}

impl Constants {
    pub fn new(k: u32, scale: f64, c_tw: u32) -> Result<Self, CoverError> {
        let c = Constants { k, scale, c_tw };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CoverError> {
        if self.k < 1 {
            return Err(CoverError::BadConfig("k must be at least 1"));
        }
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(CoverError::BadConfig("scale must lie in (0, 1]"));
        }
        if self.c_tw < 1 || self.c_tw > 24 {
            return Err(CoverError::BadConfig("c_tw must lie in 1..=24"));
        }
        Ok(())
    }

    /// `sqrt(k) * lg k`: the unit in which every derived size is expressed.
    pub fn size_unit(&self) -> f64 {
        let k = self.k as f64;
        sqrt(k) * log2(k)
    }

    fn scaled(&self, coeff: f64) -> u64 {
        floor(self.scale * coeff * self.size_unit()) as u64
    }

    /// Radius of the ball around the root that is never contracted away.
    pub fn margin_radius(&self) -> u64 {
        self.scaled(2000.0).max(4)
    }

    /// Vertices beyond this distance from the root count as far.
    /// Always at least 3 and strictly below the margin radius.
    pub fn far_threshold(&self) -> u64 {
        self.scaled(1000.0).min(self.margin_radius() - 1).max(3)
    }

    /// Upper bound on the number of terminals an instance may carry.
    pub fn terminal_cap(&self, credit: u64) -> u64 {
        self.scaled(16014.0 * self.c_tw as f64) + credit
    }

    /// Width budget for the tree decompositions the sampler produces.
    pub fn width_cap(&self) -> u64 {
        self.scaled(24022.0 * self.c_tw as f64)
    }

    /// Number of separators requested from the flow routine.
    pub fn chain_length(&self) -> u32 {
        (ceil(self.scale * 120.0 * self.size_unit()) as u32).max(4)
    }

    /// Largest credit for which the recursion keeps working; beyond it the
    /// instance is closed out as a base case.
    pub fn credit_cap(&self) -> f64 {
        sqrt(self.k as f64) / 10.0
    }

    /// Largest number of separator vertices guessed as terminals in one step.
    pub fn guess_cap(&self) -> u64 {
        (ceil(sqrt(self.k as f64) / 10.0) as u64).max(1)
    }

    /// How much of the pattern budget each unit of credit consumes.
    pub fn pattern_shrink(&self) -> f64 {
        self.scale * 10.0 * sqrt(self.k as f64)
    }

    /// Patterns below this size are covered by uniform sampling instead of
    /// the recursive machinery.
    pub fn trivial_threshold(&self) -> u32 {
        10u32.max(1u32 << self.c_tw.min(24))
    }

    /// Guaranteed drop of the far-vertex count after a path-family step.
    pub fn far_drop_bound(&self) -> u64 {
        self.scaled(511.0)
    }

    /// Whether the far-drop guarantee is arithmetically consistent at this
    /// scale (the shortened root-to-centre distance must stay below the far
    /// threshold; heavy rounding at tiny scales can break that).
    pub fn far_drop_consistent(&self) -> bool {
        3 + self.scaled(488.0) <= self.far_threshold()
    }
}

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverError {
    /// The host graph has no vertices.
    EmptyGraph,
    /// The configuration failed validation.
    BadConfig(&'static str),
    /// A planted pattern was rejected: it must contain the root, avoid ghost
    /// vertices, stay within the size budget, and reach the root through
    /// pattern and ghost vertices only.
    BadPattern,
    /// An internal invariant failed; this indicates a bug, not bad input.
    Invariant(&'static str),
    /// The flow routine failed.
    Duality(DualityError),
    /// The clustering routine failed.
    Cluster(ClusterError),
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverError::EmptyGraph => write!(f, "cannot sample a cover of the empty graph"),
            CoverError::BadConfig(s) => write!(f, "bad configuration: {s}"),
            CoverError::BadPattern => write!(f, "planted pattern is not valid for this instance"),
            CoverError::Invariant(s) => write!(f, "internal invariant violated: {s}"),
            CoverError::Duality(e) => write!(f, "flow routing failed: {e}"),
            CoverError::Cluster(e) => write!(f, "clustering failed: {e}"),
        }
    }
}

impl core::error::Error for CoverError {}

impl From<DualityError> for CoverError {
    fn from(e: DualityError) -> Self {
        CoverError::Duality(e)
    }
}

impl From<ClusterError> for CoverError {
    fn from(e: ClusterError) -> Self {
        CoverError::Cluster(e)
    }
}

// ---------------------------------------------------------------------------
// instances
// ---------------------------------------------------------------------------

/// One node of the recursion: a connected host graph with a root, light and
/// heavy terminals, ghost vertices, and the credit spent on guessed terminals.
///
/// Invariants (enforced by [`Instance::check`]): the root is a light terminal
/// and not a ghost; lights, heavies, and ghosts are pairwise disjoint subsets
/// of the vertex set; the graph is connected; every light terminal lies within
/// ghost-distance 3 of the root; and the terminal count respects the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub g: Graph,
    pub root: Vertex,
    pub light: BTreeSet<Vertex>,
    pub heavy: BTreeSet<Vertex>,
    pub ghosts: GhostSet,
    pub credit: u64,
}

impl Instance {
    pub fn new(
        g: Graph,
        root: Vertex,
        light: BTreeSet<Vertex>,
        heavy: BTreeSet<Vertex>,
        ghosts: GhostSet,
        credit: u64,
    ) -> Self {
        Instance {
            g,
            root,
            light,
            heavy,
            ghosts,
            credit,
        }
    }

    /// The usual starting instance: the root is the only terminal.
    pub fn rooted(g: Graph, root: Vertex) -> Self {
        let mut light = BTreeSet::new();
        light.insert(root);
        Instance::new(g, root, light, BTreeSet::new(), BTreeSet::new(), 0)
    }

    /// Light and heavy terminals together.
    pub fn terminals(&self) -> BTreeSet<Vertex> {
        self.light.union(&self.heavy).copied().collect()
    }

    /// Number of vertices that are neither light terminals nor ghosts.
    pub fn gamma(&self) -> u64 {
        self.g
            .vertices()
            .filter(|v| !self.light.contains(v) && !self.ghosts.contains(v))
            .count() as u64
    }

    /// Whether some vertex is neither a terminal nor a ghost.
    pub fn has_free_vertex(&self) -> bool {
        self.g
            .vertices()
            .any(|v| !self.light.contains(&v) && !self.heavy.contains(&v) && !self.ghosts.contains(&v))
    }

    /// Contracts ghost–ghost and ghost–root adjacencies away.
    pub fn normalize(&mut self) {
        let (g, ghosts) = normalize_ghosts(&self.g, &self.ghosts, self.root);
        self.g = g;
        self.ghosts = ghosts;
        self.light.retain(|v| self.g.has_vertex(*v));
        self.heavy.retain(|v| self.g.has_vertex(*v));
    }

    pub fn check(&self, c: &Constants) -> Result<(), CoverError> {
        if !self.g.has_vertex(self.root) {
            return Err(CoverError::Invariant("root missing from the graph"));
        }
        if !self.light.contains(&self.root) {
            return Err(CoverError::Invariant("root is not a light terminal"));
        }
        for set in [&self.light, &self.heavy, &self.ghosts] {
            if !set.iter().all(|v| self.g.has_vertex(*v)) {
                return Err(CoverError::Invariant("marked vertex missing from the graph"));
            }
        }
        if self.light.intersection(&self.heavy).next().is_some() {
            return Err(CoverError::Invariant("light and heavy terminals overlap"));
        }
        if self
            .ghosts
            .iter()
            .any(|v| self.light.contains(v) || self.heavy.contains(v))
        {
            return Err(CoverError::Invariant("a ghost is marked as a terminal"));
        }
        if !self.g.is_connected() {
            return Err(CoverError::Invariant("instance graph is disconnected"));
        }
        let dist = ghost_dist_from(&self.g, &self.ghosts, self.root);
        if self
            .light
            .iter()
            .any(|v| dist.get(v).map(|&d| d > 3).unwrap_or(true))
        {
            return Err(CoverError::Invariant("light terminal too far from the root"));
        }
        if (self.light.len() + self.heavy.len()) as u64 > c.terminal_cap(self.credit) {
            return Err(CoverError::Invariant("terminal budget exceeded"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// patterns, potentials, and the success bound
// ---------------------------------------------------------------------------

/// The three quantities the success bound is computed from: `pi` counts
/// pattern vertices that are not light terminals, `gamma` counts vertices that
/// are neither light terminals nor ghosts, and `phi` counts pattern vertices
/// beyond the far threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Potentials {
    pub pi: u64,
    pub gamma: u64,
    pub phi: u64,
}

/// Computes the potentials of a pattern `x` inside `inst`.
pub fn potentials_of(inst: &Instance, c: &Constants, x: &BTreeSet<Vertex>) -> Potentials {
    let pi = x.difference(&inst.light).count() as u64;
    let gamma = inst.gamma();
    let dist = ghost_dist_from(&inst.g, &inst.ghosts, inst.root);
    let thr = c.far_threshold();
    let phi = x
        .iter()
        .filter(|v| dist.get(v).map(|&d| d > thr).unwrap_or(true))
        .count() as u64;
    Potentials { pi, gamma, phi }
}

/// Whether `x` is a pattern for `inst`: it contains the root, avoids ghosts,
/// fits the credit-shrunk size budget, and every vertex of `x` reaches the
/// root through vertices of `x` and ghosts only.
pub fn is_pattern(inst: &Instance, c: &Constants, x: &BTreeSet<Vertex>) -> bool {
    if !x.contains(&inst.root) {
        return false;
    }
    if x.iter()
        .any(|v| !inst.g.has_vertex(*v) || inst.ghosts.contains(v))
    {
        return false;
    }
    if x.len() as f64 > c.k as f64 - c.pattern_shrink() * inst.credit as f64 {
        return false;
    }
    let allowed: BTreeSet<Vertex> = x.union(&inst.ghosts).copied().collect();
    let reach = inst.g.induced(&allowed).reach(inst.root);
    x.iter().all(|v| reach.contains(v))
}

/// Natural logarithm of the success probability lower bound for a pattern
/// with potentials `p` in an `n`-vertex instance. An empty pattern
/// (`pi == 0`) is always covered, so the bound is `ln 1 = 0`.
pub fn lb_value(n: usize, p: Potentials, c: &Constants) -> f64 {
    if p.pi == 0 {
        return 0.0;
    }
    let k = c.k as f64;
    let lgn = {
        let l = log2(n as f64);
        if l < 1.0 {
            1.0
        } else {
            l
        }
    };
    let pi = p.pi as f64;
    let gamma = if p.gamma == 0 { 1.0 } else { p.gamma as f64 };
    let phi = p.phi as f64;
    let penalty = -SCORE_C1 * ((log2(k) + log2(lgn)) / sqrt(k)) * (pi * log2(pi) + phi);
    let amortized = SCORE_C2 * pi * log2(gamma) * log1p(-1.0 / k);
    penalty + amortized
}

/// The success bound of a pattern in an instance, with its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LbReport {
    pub n: usize,
    pub pi: u64,
    pub gamma: u64,
    pub phi: u64,
    pub ln_lower_bound: f64,
}

pub fn lb_report(inst: &Instance, c: &Constants, x: &BTreeSet<Vertex>) -> LbReport {
    let p = potentials_of(inst, c, x);
    LbReport {
        n: inst.g.n(),
        pi: p.pi,
        gamma: p.gamma,
        phi: p.phi,
        ln_lower_bound: lb_value(inst.g.n(), p, c),
    }
}

// ---------------------------------------------------------------------------
// trace and results
// ---------------------------------------------------------------------------

/// One recorded decision of the sampler. Probabilities are logged next to
/// each random pick so a trace can be audited offline.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Uniform vertex pick of the small-pattern sampler.
    TrivialPick { v: Vertex },
    /// Root choice of the recursive sampler.
    RootPick { root: Vertex, of: usize },
    /// A base case: the instance closed out by taking all its terminals.
    Base {
        credit: u64,
        free_vertices: u64,
        taken: usize,
    },
    /// Ball carving of the part of the graph beyond the margin.
    Cluster {
        steps: usize,
        kept: usize,
        aborted: bool,
    },
    /// The coin deciding whether the cover treats the separated islands as
    /// untouched by the pattern.
    Branch {
        islands_in_separator: usize,
        disjoint: bool,
        p_disjoint: f64,
    },
    /// Recursion into the components left after removing the separator.
    DisjointSplit {
        separator: usize,
        components: usize,
        child_gammas: Vec<u64>,
        child_sizes: Vec<usize>,
    },
    /// Uniform choice of a separated island to chase.
    IslandPick { island: Vertex, of: usize, p: f64 },
    /// Uniform choice of the contraction radius around the island centre.
    RadiusPick { d: u64, d_max: u64, p: f64 },
    /// Outcome of the flow between the root and the island centre.
    FlowRoute { paths: bool, cost: u64 },
    /// Uniform choice of one path from the routed family.
    PathPick {
        index: usize,
        of: usize,
        last_light: Vertex,
        contracted: usize,
        p: f64,
    },
    /// The path step made no progress; the instance closed out as a base case.
    PathsFallback,
    /// Choice of a separator from the routed chain plus the guessed subset.
    ChainPick {
        index: usize,
        of: usize,
        alpha: usize,
        guessed: Vec<Vertex>,
        p_index: f64,
        p_alpha: f64,
        p_subset: f64,
    },
}

/// The sampled cover: the vertex set, a tree decomposition of its induced
/// subgraph (rooted at a bag holding the surviving terminals), the root, the
/// decision trace, and optionally the success bound for a planted pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverResult {
    pub a: BTreeSet<Vertex>,
    pub td: TreeDecomposition,
    pub root: Vertex,
    pub trace: Vec<TraceEvent>,
    pub lb: Option<LbReport>,
}

/// Counters filled in by [`sample_cover_debug`], which forces every random
/// choice to comply with a planted pattern and checks the bookkeeping claims
/// the analysis relies on along the way.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DebugReport {
    pub base_hits: u32,
    pub disjoint_hits: u32,
    pub intersect_hits: u32,
    pub paths_hits: u32,
    pub chain_hits: u32,
    /// Cluster re-rolls needed before the carve kept the pattern.
    pub cluster_retries: u32,
    /// Carves that never managed to keep the pattern within the retry cap.
    pub cluster_forced_failures: u32,
    /// Split components whose interior free-vertex mass exceeded half the
    /// parent's; the balanced separator rules this out, so any hit is a bug.
    pub separator_halving_violations: u32,
    /// Split children whose instance-level free-vertex count exceeded half
    /// the parent's. The boundary vertices a child absorbs as heavy
    /// terminals sit on top of its halved interior, so instances with few
    /// free vertices can trip this; informational, not gated.
    pub gamma_halving_violations: u32,
    /// Steps where the children's potentials summed to more than the parent's.
    pub superadditivity_violations: u32,
    /// Path steps that changed the pattern-size potential.
    pub pi_preserved_violations: u32,
    /// Path steps where the far-count drop guarantee was applicable.
    pub far_drop_checked: u32,
    /// Applicable path steps where the far count dropped less than promised.
    pub far_drop_violations: u32,
    /// Chain steps where the pattern crossed every usable separator.
    pub balanced_index_checked: u32,
    /// Such steps where no separator balanced the pattern mass on both sides.
    pub balanced_index_missing: u32,
    /// Steps where the forced run nevertheless lost or invalidated the pattern.
    pub pattern_lost: u32,
    /// Path steps abandoned because they made no measurable progress.
    pub paths_fallbacks: u32,
    /// Whether the planted pattern ended up inside the sampled cover.
    pub x_covered: bool,
}

impl DebugReport {
    /// True when no gated claim was violated during the run.
    /// `gamma_halving_violations` is informational and not part of the gate.
    pub fn clean(&self) -> bool {
        self.cluster_forced_failures == 0
            && self.separator_halving_violations == 0
            && self.superadditivity_violations == 0
            && self.pi_preserved_violations == 0
            && self.far_drop_violations == 0
            && self.balanced_index_missing == 0
            && self.pattern_lost == 0
    }
}

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

/// Samples a cover of `g0`. Patterns smaller than the trivial threshold are
/// handled by `k` independent uniform vertex picks; otherwise a uniform root
/// is drawn and the recursive sampler runs on the root's component.
pub fn sample_cover(g0: &Graph, c: &Constants, s: &mut Sampler) -> Result<CoverResult, CoverError> {
    c.validate()?;
    if g0.n() == 0 {
        return Err(CoverError::EmptyGraph);
    }
    let verts: Vec<Vertex> = g0.vertices().collect();
    if c.k < c.trivial_threshold() {
        let mut trace = Vec::new();
        let mut a = BTreeSet::new();
        let mut root = None;
        for _ in 0..c.k {
            let v = verts[s.index(verts.len())];
            trace.push(TraceEvent::TrivialPick { v });
            if root.is_none() {
                root = Some(v);
            }
            a.insert(v);
        }
        let root = root.expect("k >= 1 guarantees a pick");
        let td = decompose(&g0.induced(&a), root);
        return Ok(CoverResult {
            a,
            td,
            root,
            trace,
            lb: None,
        });
    }
    let root = verts[s.index(verts.len())];
    let comp = g0.reach(root);
    let g = if comp.len() == g0.n() {
        g0.clone()
    } else {
        g0.induced(&comp)
    };
    let mut driver = Driver {
        c,
        s,
        trace: Vec::new(),
        debug: None,
    };
    driver.trace.push(TraceEvent::RootPick {
        root,
        of: verts.len(),
    });
    let (a, td) = driver.solve_rec(Instance::rooted(g, root), None, 0)?;
    Ok(CoverResult {
        a,
        td,
        root,
        trace: driver.trace,
        lb: None,
    })
}

/// Runs the recursive sampler on an explicit instance (no trivial-size
/// shortcut, no root sampling).
pub fn solve_instance(
    inst: Instance,
    c: &Constants,
    s: &mut Sampler,
) -> Result<CoverResult, CoverError> {
    c.validate()?;
    let root = inst.root;
    let mut driver = Driver {
        c,
        s,
        trace: Vec::new(),
        debug: None,
    };
    let (a, td) = driver.solve_rec(inst, None, 0)?;
    Ok(CoverResult {
        a,
        td,
        root,
        trace: driver.trace,
        lb: None,
    })
}

/// Like [`sample_cover`] but with a planted pattern `x` and a fixed root:
/// every random choice that the coverage argument conditions on is forced to
/// the compliant alternative, and the bookkeeping claims of the analysis are
/// checked and tallied in the returned [`DebugReport`].
///
/// The trivial-size shortcut is skipped so the full recursion is exercised
/// regardless of `k`. The pattern must contain `root` and be valid for the
/// starting instance, else `BadPattern`.
pub fn sample_cover_debug(
    g0: &Graph,
    root: Vertex,
    x: &BTreeSet<Vertex>,
    c: &Constants,
    s: &mut Sampler,
) -> Result<(CoverResult, DebugReport), CoverError> {
    c.validate()?;
    if g0.n() == 0 {
        return Err(CoverError::EmptyGraph);
    }
    if !g0.has_vertex(root) || !x.contains(&root) {
        return Err(CoverError::BadPattern);
    }
    let comp = g0.reach(root);
    let g = if comp.len() == g0.n() {
        g0.clone()
    } else {
        g0.induced(&comp)
    };
    let inst = Instance::rooted(g, root);
    if !is_pattern(&inst, c, x) {
        return Err(CoverError::BadPattern);
    }
    let lb = lb_report(&inst, c, x);
    let mut driver = Driver {
        c,
        s,
        trace: Vec::new(),
        debug: Some(DebugReport::default()),
    };
    let (a, td) = driver.solve_rec(inst, Some(x), 0)?;
    let mut report = driver.debug.take().expect("debug driver keeps its report");
    report.x_covered = x.iter().all(|v| a.contains(v));
    Ok((
        CoverResult {
            a,
            td,
            root,
            trace: driver.trace,
            lb: Some(lb),
        },
        report,
    ))
}

// ---------------------------------------------------------------------------
// the recursion driver
// ---------------------------------------------------------------------------

type Cover = (BTreeSet<Vertex>, TreeDecomposition);

struct Driver<'a> {
    c: &'a Constants,
    s: &'a mut Sampler,
    trace: Vec<TraceEvent>,
    debug: Option<DebugReport>,
}

impl<'a> Driver<'a> {
    fn lost(&mut self) {
        if let Some(rep) = self.debug.as_mut() {
            rep.pattern_lost += 1;
        }
    }

    /// Closes out an instance by taking all its terminals into one bag.
    fn base(&mut self, inst: &Instance) -> Cover {
        let t = inst.terminals();
        self.trace.push(TraceEvent::Base {
            credit: inst.credit,
            free_vertices: inst.gamma(),
            taken: t.len(),
        });
        if let Some(rep) = self.debug.as_mut() {
            rep.base_hits += 1;
        }
        (t.clone(), TreeDecomposition::single_bag(t))
    }

    fn solve_rec(
        &mut self,
        mut inst: Instance,
        x: Option<&BTreeSet<Vertex>>,
        depth: u32,
    ) -> Result<Cover, CoverError> {
        if depth > MAX_DEPTH {
            return Err(CoverError::Invariant("recursion depth cap exceeded"));
        }
        inst.normalize();
        inst.check(self.c)?;
        // Ghost elimination never touches pattern vertices, so anything
        // missing after normalization is a compliance failure.
        let x0: Option<BTreeSet<Vertex>> = x.map(|xs| {
            let kept: BTreeSet<Vertex> = xs
                .iter()
                .copied()
                .filter(|v| inst.g.has_vertex(*v))
                .collect();
            if kept.len() != xs.len() {
                self.lost();
            }
            kept
        });

        if inst.credit as f64 > self.c.credit_cap() || !inst.has_free_vertex() {
            return Ok(self.base(&inst));
        }

        // Margin ball around the root; the part beyond it gets carved.
        let m = ball(&inst.g, &inst.ghosts, inst.root, self.c.margin_radius());
        let outside: BTreeSet<Vertex> = inst.g.vertices().filter(|v| !m.contains(v)).collect();
        let keep_far: BTreeSet<Vertex> = if outside.is_empty() {
            BTreeSet::new()
        } else {
            let gm = inst.g.induced(&outside);
            let gh: GhostSet = inst.ghosts.intersection(&outside).copied().collect();
            let kept_core = match torso(&gm, &gh).n() {
                0 => BTreeSet::new(),
                1 => {
                    let single: BTreeSet<Vertex> =
                        outside.difference(&gh).copied().collect();
                    if let (Some(_), Some(xs)) = (self.debug.as_ref(), x0.as_ref()) {
                        if xs.iter().any(|v| outside.contains(v) && !single.contains(v)) {
                            let rep = self.debug.as_mut().expect("checked above");
                            rep.cluster_forced_failures += 1;
                        }
                    }
                    single
                }
                _ => self.carve(&gm, &gh, x0.as_ref())?,
            };
            // Ghosts of the faraway part stay when they still touch the
            // kept cluster.
            let mut kept = kept_core.clone();
            for &gv in &gh {
                if inst.g.neighbors(gv).any(|u| kept_core.contains(&u)) {
                    kept.insert(gv);
                }
            }
            kept
        };

        // Restrict to the root's component of margin-plus-cluster.
        let mut keep: BTreeSet<Vertex> = m.clone();
        keep.extend(keep_far.iter().copied());
        let comp = inst.g.induced(&keep).reach(inst.root);
        if !inst.light.iter().all(|v| comp.contains(v)) {
            return Err(CoverError::Invariant("light terminal severed from the root"));
        }
        let inst1 = Instance {
            g: inst.g.induced(&comp),
            root: inst.root,
            light: inst.light.clone(),
            heavy: inst.heavy.intersection(&comp).copied().collect(),
            ghosts: inst.ghosts.intersection(&comp).copied().collect(),
            credit: inst.credit,
        };
        let x1: Option<BTreeSet<Vertex>> = x0.map(|xs| {
            let kept: BTreeSet<Vertex> = xs.intersection(&comp).copied().collect();
            if kept.len() != xs.len() {
                self.lost();
            }
            kept
        });

        if !inst1.has_free_vertex() {
            return Ok(self.base(&inst1));
        }

        // Every recursion edge must shrink this measure lexicographically.
        let snapshot = (inst1.gamma(), inst1.g.n());

        // Islands: components beyond the margin. Contracting each one to a
        // single vertex yields the auxiliary graph the separator comes from.
        let m1: BTreeSet<Vertex> = m.intersection(&comp).copied().collect();
        let interior: BTreeSet<Vertex> = comp.difference(&m1).copied().collect();
        let islands: Vec<BTreeSet<Vertex>> = if interior.is_empty() {
            Vec::new()
        } else {
            inst1.g.induced(&interior).components()
        };
        let ubase = inst1
            .g
            .vertices()
            .max()
            .map(|v| v + 1)
            .unwrap_or(0);
        let mut h = inst1.g.induced(&m1);
        let t_all = inst1.terminals();
        let mut w1: BTreeMap<Vertex, u64> = BTreeMap::new();
        let mut w2: BTreeMap<Vertex, u64> = BTreeMap::new();
        for &v in &m1 {
            w1.insert(v, u64::from(t_all.contains(&v)));
            w2.insert(
                v,
                u64::from(!inst1.light.contains(&v) && !inst1.ghosts.contains(&v)),
            );
        }
        for (i, island) in islands.iter().enumerate() {
            let uc = ubase + i as Vertex;
            h.add_vertex(uc)
                .map_err(|_| CoverError::Invariant("island vertex id collided"))?;
            let nbrs: BTreeSet<Vertex> = island
                .iter()
                .flat_map(|&u| inst1.g.neighbors(u))
                .filter(|v| m1.contains(v))
                .collect();
            for nb in nbrs {
                h.add_edge(uc, nb)
                    .map_err(|_| CoverError::Invariant("island edge insertion failed"))?;
            }
            w1.insert(uc, island.iter().filter(|v| t_all.contains(v)).count() as u64);
            w2.insert(
                uc,
                island
                    .iter()
                    .filter(|v| !inst1.light.contains(v) && !inst1.ghosts.contains(v))
                    .count() as u64,
            );
        }
        let td_h = decompose_fast(&h, inst1.root);
        let z1 = balanced_separator(&h, &td_h, &w1);
        let z2 = balanced_separator(&h, &td_h, &w2);
        let mut z: BTreeSet<Vertex> = z1.union(&z2).copied().collect();
        z.insert(inst1.root);
        let z_islands: Vec<usize> = (0..islands.len())
            .filter(|&i| z.contains(&(ubase + i as Vertex)))
            .collect();
        let w_nrm: BTreeSet<Vertex> = z.iter().copied().filter(|&v| v < ubase).collect();
        let w_isl: BTreeSet<Vertex> = z_islands
            .iter()
            .flat_map(|&i| islands[i].iter().copied())
            .collect();

        let disjoint = if z_islands.is_empty() {
            self.trace.push(TraceEvent::Branch {
                islands_in_separator: 0,
                disjoint: true,
                p_disjoint: 1.0,
            });
            true
        } else {
            let p = 1.0 - 1.0 / self.c.k as f64;
            let dj = if self.debug.is_some() {
                match x1.as_ref() {
                    Some(xs) => xs.iter().all(|v| !w_isl.contains(v)),
                    None => true,
                }
            } else {
                self.s.coin(p)
            };
            self.trace.push(TraceEvent::Branch {
                islands_in_separator: z_islands.len(),
                disjoint: dj,
                p_disjoint: p,
            });
            dj
        };

        if disjoint {
            self.case_disjoint(&inst1, &w_nrm, &w_isl, snapshot, x1.as_ref(), depth)
        } else {
            self.case_intersect(&inst1, &islands, &z_islands, snapshot, x1.as_ref(), depth)
        }
    }

    /// Runs the ball-carving routine on the faraway part; in debug mode the
    /// carve is re-rolled until it keeps every pattern vertex out there.
    fn carve(
        &mut self,
        gm: &Graph,
        gh: &GhostSet,
        x: Option<&BTreeSet<Vertex>>,
    ) -> Result<BTreeSet<Vertex>, CoverError> {
        let need: BTreeSet<Vertex> = match (self.debug.as_ref(), x) {
            (Some(_), Some(xs)) => xs
                .iter()
                .copied()
                .filter(|v| gm.has_vertex(*v))
                .collect(),
            _ => BTreeSet::new(),
        };
        let mut attempt = 0u32;
        loop {
            let res = cluster(gm, gh, self.c.k, self.s)?;
            let kept = if res.aborted { BTreeSet::new() } else { res.kept };
            let ok = need.iter().all(|v| kept.contains(v));
            if ok || self.debug.is_none() || attempt >= CARVE_RETRY_CAP {
                self.trace.push(TraceEvent::Cluster {
                    steps: res.carve_log.len(),
                    kept: kept.len(),
                    aborted: res.aborted,
                });
                if let Some(rep) = self.debug.as_mut() {
                    rep.cluster_retries += attempt;
                    if !ok {
                        rep.cluster_forced_failures += 1;
                    }
                }
                return Ok(kept);
            }
            attempt += 1;
        }
    }

    /// The split step: the separated islands are dropped, the remainder is
    /// split along the separator, and each component becomes a child instance
    /// whose boundary joins its terminals.
    fn case_disjoint(
        &mut self,
        inst1: &Instance,
        w_nrm: &BTreeSet<Vertex>,
        w_isl: &BTreeSet<Vertex>,
        snapshot: (u64, usize),
        x: Option<&BTreeSet<Vertex>>,
        depth: u32,
    ) -> Result<Cover, CoverError> {
        if let Some(rep) = self.debug.as_mut() {
            rep.disjoint_hits += 1;
        }
        let keep: BTreeSet<Vertex> = inst1
            .g
            .vertices()
            .filter(|v| !w_isl.contains(v))
            .collect();
        let g2 = inst1.g.induced(&keep);
        if !g2.is_connected() {
            return Err(CoverError::Invariant(
                "dropping the separated islands disconnected the graph",
            ));
        }
        let interior: BTreeSet<Vertex> = keep.difference(w_nrm).copied().collect();
        let cc: Vec<BTreeSet<Vertex>> = if interior.is_empty() {
            Vec::new()
        } else {
            g2.induced(&interior).components()
        };
        let charges = bfs_charges(&g2, w_nrm, &cc, inst1.root);

        let mut children: Vec<(Instance, BTreeSet<Vertex>, BTreeSet<Vertex>)> = Vec::new();
        for (di, d) in cc.iter().enumerate() {
            let mut v_d = open_neighborhood(&g2, d);
            v_d.extend(d.iter().copied());
            v_d.insert(inst1.root);
            let child = build_disjoint_child(&g2, di, d, &v_d, &charges, inst1)?;
            if (child.gamma(), child.g.n()) >= snapshot {
                return Err(CoverError::Invariant("split child failed to shrink"));
            }
            children.push((child, d.clone(), v_d));
        }
        self.trace.push(TraceEvent::DisjointSplit {
            separator: w_nrm.len(),
            components: cc.len(),
            child_gammas: children.iter().map(|(c, _, _)| c.gamma()).collect(),
            child_sizes: children.iter().map(|(c, _, _)| c.g.n()).collect(),
        });

        if let (Some(_), Some(xs)) = (self.debug.as_ref(), x) {
            let parent = potentials_of(inst1, self.c, xs);
            let mut sum = Potentials {
                pi: 0,
                gamma: 0,
                phi: 0,
            };
            let mut interior_halved = true;
            let mut halved = true;
            let mut all_patterns = true;
            for (child, d, v_d) in &children {
                let interior = d
                    .iter()
                    .filter(|v| !inst1.light.contains(v) && !inst1.ghosts.contains(v))
                    .count() as u64;
                if 2 * interior > parent.gamma {
                    interior_halved = false;
                }
                let xd: BTreeSet<Vertex> = xs.intersection(v_d).copied().collect();
                let p = potentials_of(child, self.c, &xd);
                sum.pi += p.pi;
                sum.gamma += p.gamma;
                sum.phi += p.phi;
                if 2 * p.gamma > parent.gamma {
                    halved = false;
                }
                if !is_pattern(child, self.c, &xd) {
                    all_patterns = false;
                }
            }
            let rep = self.debug.as_mut().expect("checked above");
            if !interior_halved {
                rep.separator_halving_violations += 1;
            }
            if !halved {
                rep.gamma_halving_violations += 1;
            }
            if sum.pi > parent.pi || sum.gamma > parent.gamma || sum.phi > parent.phi {
                rep.superadditivity_violations += 1;
            }
            if !all_patterns {
                rep.pattern_lost += 1;
            }
        }

        let mut parts: Vec<(BTreeSet<Vertex>, TreeDecomposition, BTreeSet<Vertex>, BTreeSet<Vertex>)> =
            Vec::new();
        for (child, d, v_d) in children {
            let xd: Option<BTreeSet<Vertex>> =
                x.map(|xs| xs.intersection(&v_d).copied().collect());
            let (a_d, td_d) = self.solve_rec(child, xd.as_ref(), depth + 1)?;
            parts.push((a_d, td_d, d, v_d));
        }

        // A keeps each component's own picks, plus every non-ghost separator
        // vertex that all adjacent components agreed to keep.
        let mut a: BTreeSet<Vertex> = BTreeSet::new();
        for (a_d, _, d, _) in &parts {
            a.extend(a_d.intersection(d).copied());
        }
        for &v in w_nrm {
            if inst1.ghosts.contains(&v) {
                continue;
            }
            let keep_v = parts.iter().all(|(a_d, _, d, _)| {
                !g2.neighbors(v).any(|u| d.contains(&u)) || a_d.contains(&v)
            });
            if keep_v {
                a.insert(v);
            }
        }

        let mut in_root: BTreeSet<Vertex> = inst1.terminals();
        in_root.extend(
            w_nrm
                .iter()
                .copied()
                .filter(|v| !inst1.ghosts.contains(v)),
        );
        let root_bag: BTreeSet<Vertex> = in_root.intersection(&a).copied().collect();
        let kids: Vec<TreeDecomposition> = parts
            .iter()
            .map(|(_, td_d, _, v_d)| {
                let keep: BTreeSet<Vertex> = a.intersection(v_d).copied().collect();
                td_d.restricted(&keep)
            })
            .collect();
        Ok((a, TreeDecomposition::attach_under_root(root_bag, kids)))
    }

    /// The chase step: pick a separated island, contract a random-radius ball
    /// around its centre, and route a flow from the root to the centre.
    fn case_intersect(
        &mut self,
        inst1: &Instance,
        islands: &[BTreeSet<Vertex>],
        z_islands: &[usize],
        snapshot: (u64, usize),
        x: Option<&BTreeSet<Vertex>>,
        depth: u32,
    ) -> Result<Cover, CoverError> {
        if let Some(rep) = self.debug.as_mut() {
            rep.intersect_hits += 1;
        }
        let pick = if self.debug.is_some() {
            match x.and_then(|xs| {
                z_islands
                    .iter()
                    .position(|&ii| islands[ii].iter().any(|v| xs.contains(v)))
            }) {
                Some(p) => p,
                None => {
                    self.lost();
                    0
                }
            }
        } else {
            self.s.index(z_islands.len())
        };
        let c_set = &islands[z_islands[pick]];
        self.trace.push(TraceEvent::IslandPick {
            island: *c_set.iter().next().expect("islands are nonempty"),
            of: z_islands.len(),
            p: 1.0 / z_islands.len() as f64,
        });

        let c_g = inst1.g.induced(c_set);
        let c_gh: GhostSet = inst1.ghosts.intersection(c_set).copied().collect();
        // Centre: the non-ghost vertex minimizing ghost-eccentricity inside
        // the island, ties broken by id.
        let mut best: Option<(u64, Vertex)> = None;
        for &v in c_set.difference(&c_gh) {
            let dist = ghost_dist_from(&c_g, &c_gh, v);
            if dist.len() != c_set.len() {
                return Err(CoverError::Invariant("island is not connected"));
            }
            let ecc = dist.values().copied().max().unwrap_or(0);
            if best.map(|b| (ecc, v) < b).unwrap_or(true) {
                best = Some((ecc, v));
            }
        }
        let (d_max, z_v) =
            best.ok_or(CoverError::Invariant("island has no non-ghost vertex"))?;
        let dist_z = ghost_dist_from(&c_g, &c_gh, z_v);

        let d = if self.debug.is_some() {
            match x.and_then(|xs| {
                xs.iter()
                    .filter(|v| c_set.contains(v))
                    .filter_map(|v| dist_z.get(v).copied())
                    .min()
            }) {
                Some(dm) => dm,
                None => {
                    self.lost();
                    0
                }
            }
        } else {
            self.s.index((d_max + 1) as usize) as u64
        };
        self.trace.push(TraceEvent::RadiusPick {
            d,
            d_max,
            p: 1.0 / (d_max + 1) as f64,
        });

        // Contract the ball of radius d-1 around the centre (ghosts join a
        // step earlier since entering them is free).
        let lim = d.max(1);
        let s_set: BTreeSet<Vertex> = c_set
            .iter()
            .copied()
            .filter(|v| {
                let dv = dist_z[v];
                if c_gh.contains(v) {
                    dv + 1 < lim
                } else {
                    dv < lim
                }
            })
            .collect();
        let g2 = if s_set.len() <= 1 {
            inst1.g.clone()
        } else {
            inst1
                .g
                .contract_set_onto(&s_set, z_v)
                .map_err(|_| CoverError::Invariant("centre ball contraction failed"))?
        };
        let vs2 = g2.vertex_set();
        let inst2 = Instance {
            g: g2,
            root: inst1.root,
            light: inst1.light.clone(),
            heavy: inst1.heavy.intersection(&vs2).copied().collect(),
            ghosts: inst1.ghosts.intersection(&vs2).copied().collect(),
            credit: inst1.credit,
        };
        let x2: Option<BTreeSet<Vertex>> = x.map(|xs| {
            let kept: BTreeSet<Vertex> = xs.intersection(&vs2).copied().collect();
            if kept.len() != xs.len() {
                self.lost();
            }
            kept
        });

        let skeleton = torso(&inst2.g, &inst2.ghosts);
        match duality(
            &skeleton,
            inst2.root,
            z_v,
            self.c.chain_length(),
            self.c.k,
        )? {
            DualityOutcome::Paths(fam) => {
                self.trace.push(TraceEvent::FlowRoute {
                    paths: true,
                    cost: fam.flow_cost,
                });
                self.subcase_paths(&inst2, z_v, &fam, snapshot, x2.as_ref(), depth)
            }
            DualityOutcome::Chain(chain) => {
                self.trace.push(TraceEvent::FlowRoute {
                    paths: false,
                    cost: chain.flow_cost,
                });
                self.subcase_chain(&inst2, z_v, &chain, snapshot, x2.as_ref(), depth)
            }
        }
    }

    /// The path-family step: lift the routed paths back through the ghosts,
    /// pick one, and contract its segments between shared vertices so the
    /// root-to-centre distance collapses.
    fn subcase_paths(
        &mut self,
        inst2: &Instance,
        z_v: Vertex,
        fam: &PathFamily,
        snapshot: (u64, usize),
        x: Option<&BTreeSet<Vertex>>,
        depth: u32,
    ) -> Result<Cover, CoverError> {
        if let Some(rep) = self.debug.as_mut() {
            rep.paths_hits += 1;
        }
        let lifted: Vec<Vec<Vertex>> = fam
            .paths
            .iter()
            .map(|p| lift_path(&inst2.g, &inst2.ghosts, p))
            .collect::<Result<_, _>>()?;
        // Shared vertices are recomputed over the lifted family; endpoints
        // and ghosts never count.
        let mut multi: BTreeMap<Vertex, u32> = BTreeMap::new();
        for p in &lifted {
            let uniq: BTreeSet<Vertex> = p.iter().copied().collect();
            for v in uniq {
                *multi.entry(v).or_insert(0) += 1;
            }
        }
        let shared: BTreeSet<Vertex> = multi
            .iter()
            .filter(|&(v, &c)| {
                c >= 2 && !inst2.ghosts.contains(v) && *v != inst2.root && *v != z_v
            })
            .map(|(&v, _)| v)
            .collect();

        let private_free = |i: usize, xs: &BTreeSet<Vertex>| -> bool {
            lifted[i].iter().all(|v| {
                !xs.contains(v)
                    || shared.contains(v)
                    || inst2.ghosts.contains(v)
                    || *v == inst2.root
                    || *v == z_v
            })
        };
        let idx = if self.debug.is_some() {
            match x {
                Some(xs) => (0..lifted.len())
                    .find(|&i| private_free(i, xs))
                    .ok_or(CoverError::Invariant(
                        "every routed path meets the pattern privately",
                    ))?,
                None => 0,
            }
        } else {
            self.s.index(lifted.len())
        };

        let path = &lifted[idx];
        let v0_pos = path
            .iter()
            .rposition(|v| inst2.light.contains(v))
            .ok_or(CoverError::Invariant("routed path misses every light terminal"))?;
        let v0 = path[v0_pos];
        let tail = &path[v0_pos..];
        let mut marks: BTreeSet<Vertex> = BTreeSet::new();
        marks.insert(v0);
        marks.insert(z_v);
        marks.extend(tail.iter().copied().filter(|v| shared.contains(v)));
        let (h, contracted) = contract_marked_segments(&inst2.g, tail, &marks, &inst2.ghosts)?;
        self.trace.push(TraceEvent::PathPick {
            index: idx,
            of: lifted.len(),
            last_light: v0,
            contracted,
            p: 1.0 / lifted.len() as f64,
        });
        if !inst2.light.iter().all(|v| h.has_vertex(*v)) {
            return Err(CoverError::Invariant(
                "light terminal contracted away in the path step",
            ));
        }
        let vh = h.vertex_set();
        let child = Instance {
            g: h,
            root: inst2.root,
            light: inst2.light.clone(),
            heavy: inst2.heavy.intersection(&vh).copied().collect(),
            ghosts: inst2.ghosts.intersection(&vh).copied().collect(),
            credit: inst2.credit,
        };
        if (child.gamma(), child.g.n()) >= snapshot {
            self.trace.push(TraceEvent::PathsFallback);
            if let Some(rep) = self.debug.as_mut() {
                rep.paths_fallbacks += 1;
            }
            return Ok(self.base(inst2));
        }

        if let (Some(_), Some(xs)) = (self.debug.as_ref(), x) {
            if xs.iter().any(|v| !vh.contains(v)) {
                self.lost();
            } else {
                let before = potentials_of(inst2, self.c, xs);
                let after = potentials_of(&child, self.c, xs);
                let rep = self.debug.as_mut().expect("checked above");
                if after.pi != before.pi {
                    rep.pi_preserved_violations += 1;
                }
                if self.c.far_drop_consistent() && before.phi >= self.c.far_drop_bound() {
                    rep.far_drop_checked += 1;
                    if before.phi - after.phi < self.c.far_drop_bound() {
                        rep.far_drop_violations += 1;
                    }
                }
                if !is_pattern(&child, self.c, xs) {
                    rep.pattern_lost += 1;
                }
            }
        }
        let x_child: Option<BTreeSet<Vertex>> =
            x.map(|xs| xs.intersection(&vh).copied().collect());
        self.solve_rec(child, x_child.as_ref(), depth + 1)
    }

    /// The separator-chain step: drop the three separators nearest the root,
    /// pick one of the rest, guess a small subset of it as new terminals, and
    /// recurse on both sides.
    fn subcase_chain(
        &mut self,
        inst2: &Instance,
        z_v: Vertex,
        chain: &SeparatorChain,
        snapshot: (u64, usize),
        x: Option<&BTreeSet<Vertex>>,
        depth: u32,
    ) -> Result<Cover, CoverError> {
        if let Some(rep) = self.debug.as_mut() {
            rep.chain_hits += 1;
        }
        if chain.separators.len() < 4 {
            return Err(CoverError::Invariant("separator chain shorter than four"));
        }
        let rest = &chain.separators[3..];
        for c_j in rest {
            if c_j.iter().any(|v| inst2.light.contains(v)) {
                return Err(CoverError::Invariant(
                    "light terminal inside a distant separator",
                ));
            }
        }
        {
            let first = &rest[0];
            let keep: BTreeSet<Vertex> = inst2
                .g
                .vertices()
                .filter(|v| !first.contains(v))
                .collect();
            let reach = inst2.g.induced(&keep).reach(inst2.root);
            if !inst2.light.iter().all(|v| reach.contains(v)) {
                return Err(CoverError::Invariant(
                    "light terminal beyond the first usable separator",
                ));
            }
        }

        let side_split = |c_j: &BTreeSet<Vertex>| -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
            let keep: BTreeSet<Vertex> = inst2
                .g
                .vertices()
                .filter(|v| !c_j.contains(v))
                .collect();
            let v_in = inst2.g.induced(&keep).reach(inst2.root);
            let v_out: BTreeSet<Vertex> = keep.difference(&v_in).copied().collect();
            (v_in, v_out)
        };

        // Forced runs scan for a separator with pattern mass on both sides;
        // random runs pick uniformly.
        let mut forced_alpha_q: Option<(usize, Vec<Vertex>)> = None;
        let idx = if self.debug.is_some() {
            match x {
                Some(xs) => {
                    let cross: Vec<BTreeSet<Vertex>> = rest
                        .iter()
                        .map(|c_j| c_j.intersection(xs).copied().collect())
                        .collect();
                    let chosen = if cross.iter().any(|s| s.is_empty()) {
                        self.lost();
                        0
                    } else {
                        if let Some(rep) = self.debug.as_mut() {
                            rep.balanced_index_checked += 1;
                        }
                        let shrink = self.c.pattern_shrink();
                        let found = (0..rest.len()).find(|&j| {
                            let (v_in, v_out) = side_split(&rest[j]);
                            let a_j = xs
                                .iter()
                                .filter(|v| v_in.contains(v) && !inst2.light.contains(*v))
                                .count();
                            let b_j = xs
                                .iter()
                                .filter(|v| v_out.contains(v) && !inst2.light.contains(*v))
                                .count();
                            shrink * cross[j].len() as f64 <= a_j.min(b_j) as f64
                        });
                        match found {
                            Some(j) => j,
                            None => {
                                if let Some(rep) = self.debug.as_mut() {
                                    rep.balanced_index_missing += 1;
                                }
                                0
                            }
                        }
                    };
                    let want: Vec<Vertex> = cross[chosen].iter().copied().collect();
                    forced_alpha_q = Some((chosen, want));
                    chosen
                }
                None => 0,
            }
        } else {
            self.s.index(rest.len())
        };
        let c_i = &rest[idx];
        let (v_in, v_out) = side_split(c_i);
        if !v_out.contains(&z_v) {
            return Err(CoverError::Invariant("centre ended up on the root side"));
        }

        let cap = self.c.guess_cap().min(c_i.len() as u64).max(1) as usize;
        let civ: Vec<Vertex> = c_i.iter().copied().collect();
        let (alpha, q_set) = match forced_alpha_q {
            Some((_, want)) => {
                let alpha = want.len().clamp(1, cap);
                let mut q: BTreeSet<Vertex> = want.into_iter().take(alpha).collect();
                for &v in &civ {
                    if q.len() >= alpha {
                        break;
                    }
                    q.insert(v);
                }
                (alpha, q)
            }
            None => {
                let alpha = 1 + self.s.index(cap);
                let q: BTreeSet<Vertex> = self
                    .s
                    .sorted_subset(civ.len(), alpha)
                    .into_iter()
                    .map(|i| civ[i])
                    .collect();
                (alpha, q)
            }
        };
        self.trace.push(TraceEvent::ChainPick {
            index: idx,
            of: rest.len(),
            alpha,
            guessed: q_set.iter().copied().collect(),
            p_index: 1.0 / rest.len() as f64,
            p_alpha: 1.0 / cap as f64,
            p_subset: choose_recip(civ.len(), alpha),
        });
        if q_set.iter().any(|v| inst2.light.contains(v)) {
            return Err(CoverError::Invariant("guessed separator vertex is light"));
        }

        let (child_out, child_in) = build_chain_children(inst2, c_i, &q_set, &v_in)?;
        if (child_out.gamma(), child_out.g.n()) >= snapshot
            || (child_in.gamma(), child_in.g.n()) >= snapshot
        {
            return Err(CoverError::Invariant("chain child failed to shrink"));
        }

        let x_out: Option<BTreeSet<Vertex>> = x.map(|xs| {
            xs.iter()
                .copied()
                .filter(|v| child_out.g.has_vertex(*v))
                .collect()
        });
        let x_in: Option<BTreeSet<Vertex>> = x.map(|xs| {
            xs.iter()
                .copied()
                .filter(|v| child_in.g.has_vertex(*v))
                .collect()
        });
        if let (Some(_), Some(xs)) = (self.debug.as_ref(), x) {
            let parent = potentials_of(inst2, self.c, xs);
            let po = potentials_of(&child_out, self.c, x_out.as_ref().expect("x_out set with x"));
            let pi = potentials_of(&child_in, self.c, x_in.as_ref().expect("x_in set with x"));
            let ok_pattern = is_pattern(&child_out, self.c, x_out.as_ref().expect("set"))
                && is_pattern(&child_in, self.c, x_in.as_ref().expect("set"));
            let rep = self.debug.as_mut().expect("checked above");
            if po.pi + pi.pi > parent.pi
                || po.gamma + pi.gamma > parent.gamma
                || po.phi + pi.phi > parent.phi
            {
                rep.superadditivity_violations += 1;
            }
            if !ok_pattern {
                rep.pattern_lost += 1;
            }
        }

        let (a_out, td_out) = self.solve_rec(child_out, x_out.as_ref(), depth + 1)?;
        let (a_in, td_in) = self.solve_rec(child_in, x_in.as_ref(), depth + 1)?;

        let mut a: BTreeSet<Vertex> = a_out.difference(&q_set).copied().collect();
        a.extend(a_in.iter().copied());
        let mut in_root: BTreeSet<Vertex> = inst2.terminals();
        in_root.extend(q_set.iter().copied());
        let root_bag: BTreeSet<Vertex> = in_root.intersection(&a).copied().collect();
        let keep_out: BTreeSet<Vertex> = a.intersection(&a_out).copied().collect();
        let td = TreeDecomposition::attach_under_root(
            root_bag,
            alloc::vec![td_out.restricted(&keep_out), td_in],
        );
        Ok((a, td))
    }
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn open_neighborhood(g: &Graph, s: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    s.iter()
        .flat_map(|&v| g.neighbors(v))
        .filter(|v| !s.contains(v))
        .collect()
}

/// Charges separator vertices to components: contract each component to a
/// single fresh vertex, run a BFS from the root, and charge a separator
/// vertex to a component when its BFS parent is that component's vertex.
/// Fresh ids sort after all originals, so ties prefer separator-side parents.
fn bfs_charges(
    g2: &Graph,
    w_nrm: &BTreeSet<Vertex>,
    cc: &[BTreeSet<Vertex>],
    root: Vertex,
) -> BTreeMap<Vertex, usize> {
    let base = g2.vertices().max().map(|v| v + 1).unwrap_or(0);
    let mut comp_of: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, c) in cc.iter().enumerate() {
        for &v in c {
            comp_of.insert(v, i);
        }
    }
    let mut l = Graph::new();
    for &v in w_nrm {
        let _ = l.add_vertex(v);
    }
    for i in 0..cc.len() {
        let _ = l.add_vertex(base + i as Vertex);
    }
    for (u, v) in g2.edges() {
        let cu = comp_of.get(&u).copied();
        let cv = comp_of.get(&v).copied();
        let (a, b) = match (cu, cv) {
            (None, None) => (u, v),
            (Some(i), None) => (base + i as Vertex, v),
            (None, Some(j)) => (u, base + j as Vertex),
            (Some(_), Some(_)) => continue,
        };
        if a != b {
            let _ = l.add_edge(a, b);
        }
    }
    let (_, parent) = l.bfs_tree(root);
    w_nrm
        .iter()
        .filter_map(|&v| {
            let p = *parent.get(&v)?;
            if p >= base {
                Some((v, (p - base) as usize))
            } else {
                None
            }
        })
        .collect()
}

/// Builds the child instance for one component of the split step: everything
/// outside the component's closed neighborhood is contracted onto the root
/// (when it touches the root) or into a fresh ghost, and the component's
/// boundary joins the terminals, heavy exactly when charged to it.
fn build_disjoint_child(
    g2: &Graph,
    di: usize,
    d: &BTreeSet<Vertex>,
    v_d: &BTreeSet<Vertex>,
    charges: &BTreeMap<Vertex, usize>,
    inst: &Instance,
) -> Result<Instance, CoverError> {
    let root = inst.root;
    let mut gd = g2.clone();
    let mut ghosts_d: GhostSet = inst.ghosts.intersection(v_d).copied().collect();
    let outside: BTreeSet<Vertex> = g2.vertices().filter(|v| !v_d.contains(v)).collect();
    if !outside.is_empty() {
        for q in g2.induced(&outside).components() {
            let root_adjacent = q.iter().any(|&u| g2.has_edge(u, root));
            if root_adjacent {
                let mut set = q.clone();
                set.insert(root);
                gd = gd
                    .contract_set_onto(&set, root)
                    .map_err(|_| CoverError::Invariant("root-side outside contraction failed"))?;
            } else {
                let (gn, fresh) = gd
                    .contract_set_to_fresh(&q)
                    .map_err(|_| CoverError::Invariant("outside contraction failed"))?;
                gd = gn;
                ghosts_d.insert(fresh);
            }
        }
    }
    let boundary = open_neighborhood(g2, d);
    let mut light_d: BTreeSet<Vertex> = inst.light.intersection(v_d).copied().collect();
    let mut heavy_d: BTreeSet<Vertex> = inst.heavy.intersection(d).copied().collect();
    for &v in &boundary {
        if inst.light.contains(&v) || inst.ghosts.contains(&v) {
            continue;
        }
        if charges.get(&v) == Some(&di) {
            heavy_d.insert(v);
        } else {
            light_d.insert(v);
        }
    }
    Ok(Instance {
        g: gd,
        root,
        light: light_d,
        heavy: heavy_d,
        ghosts: ghosts_d,
        credit: inst.credit,
    })
}

/// Builds the two child instances of the chain step. The outside child
/// contracts the root side plus the unguessed separator onto the root and
/// makes the guessed subset light; the inside child keeps the root side,
/// turns everything beyond the separator into fresh ghosts, and makes the
/// guessed subset heavy. Both children pay the guess in credit.
fn build_chain_children(
    inst2: &Instance,
    c_i: &BTreeSet<Vertex>,
    q_set: &BTreeSet<Vertex>,
    v_in: &BTreeSet<Vertex>,
) -> Result<(Instance, Instance), CoverError> {
    let g2 = &inst2.g;
    let root = inst2.root;
    let alpha = q_set.len() as u64;

    let mut blob: BTreeSet<Vertex> = v_in.clone();
    blob.extend(c_i.difference(q_set).copied());
    let g_out = g2
        .contract_set_onto(&blob, root)
        .map_err(|_| CoverError::Invariant("root-side chain contraction failed"))?;
    let vo = g_out.vertex_set();
    let mut light_out: BTreeSet<Vertex> = q_set.clone();
    light_out.insert(root);
    let heavy_out: BTreeSet<Vertex> = inst2
        .heavy
        .iter()
        .copied()
        .filter(|v| vo.contains(v) && !q_set.contains(v))
        .collect();
    let ghosts_out: GhostSet = inst2.ghosts.intersection(&vo).copied().collect();
    let child_out = Instance {
        g: g_out,
        root,
        light: light_out,
        heavy: heavy_out,
        ghosts: ghosts_out,
        credit: inst2.credit + alpha,
    };

    let mut keep: BTreeSet<Vertex> = v_in.clone();
    keep.extend(q_set.iter().copied());
    let beyond: BTreeSet<Vertex> = g2.vertices().filter(|v| !keep.contains(v)).collect();
    let mut g_in = g2.clone();
    let mut ghosts_in: GhostSet = inst2.ghosts.intersection(v_in).copied().collect();
    for comp in g2.induced(&beyond).components() {
        let (gn, fresh) = g_in
            .contract_set_to_fresh(&comp)
            .map_err(|_| CoverError::Invariant("far-side chain contraction failed"))?;
        g_in = gn;
        ghosts_in.insert(fresh);
    }
    let vi = g_in.vertex_set();
    let mut heavy_in: BTreeSet<Vertex> = inst2
        .heavy
        .iter()
        .copied()
        .filter(|v| vi.contains(v))
        .collect();
    heavy_in.extend(q_set.iter().copied());
    let child_in = Instance {
        g: g_in,
        root,
        light: inst2.light.clone(),
        heavy: heavy_in,
        ghosts: ghosts_in,
        credit: inst2.credit + alpha,
    };
    Ok((child_out, child_in))
}

/// Lifts a path of the ghost-eliminated graph back to the real graph: absent
/// edges are re-routed through the lowest-id common ghost neighbor, and any
/// repeated visit is shortcut by truncating back to its first occurrence.
fn lift_path(g2: &Graph, ghosts: &GhostSet, tp: &[Vertex]) -> Result<Vec<Vertex>, CoverError> {
    let mut walk: Vec<Vertex> = Vec::with_capacity(tp.len() * 2);
    walk.push(
        *tp.first()
            .ok_or(CoverError::Invariant("routed path is empty"))?,
    );
    for w in tp.windows(2) {
        let (a, b) = (w[0], w[1]);
        if g2.has_edge(a, b) {
            walk.push(b);
        } else {
            let gv = ghosts
                .iter()
                .copied()
                .find(|&gv| g2.has_edge(gv, a) && g2.has_edge(gv, b))
                .ok_or(CoverError::Invariant(
                    "skeleton edge with no ghost to carry it",
                ))?;
            walk.push(gv);
            walk.push(b);
        }
    }
    let mut out: Vec<Vertex> = Vec::with_capacity(walk.len());
    let mut pos: BTreeMap<Vertex, usize> = BTreeMap::new();
    for v in walk {
        if let Some(&p) = pos.get(&v) {
            for w in out.drain(p + 1..) {
                pos.remove(&w);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    Ok(out)
}

/// Contracts the open segments of `tail` between consecutive marked vertices:
/// a segment containing a ghost is contracted onto its first ghost (which
/// stays a ghost), any other segment is contracted onto the mark before it.
/// Returns the contracted graph and the number of vertices removed.
fn contract_marked_segments(
    g2: &Graph,
    tail: &[Vertex],
    marks: &BTreeSet<Vertex>,
    ghosts: &GhostSet,
) -> Result<(Graph, usize), CoverError> {
    let positions: Vec<usize> = (0..tail.len()).filter(|&i| marks.contains(&tail[i])).collect();
    let mut h = g2.clone();
    let mut removed = 0usize;
    for w in positions.windows(2) {
        let (ja, jb) = (w[0], w[1]);
        if jb <= ja + 1 {
            continue;
        }
        let seg = &tail[ja + 1..jb];
        let (set, target): (BTreeSet<Vertex>, Vertex) =
            match seg.iter().copied().find(|v| ghosts.contains(v)) {
                Some(gv) => (seg.iter().copied().collect(), gv),
                None => {
                    let mut s: BTreeSet<Vertex> = seg.iter().copied().collect();
                    s.insert(tail[ja]);
                    (s, tail[ja])
                }
            };
        removed += set.len() - 1;
        h = h
            .contract_set_onto(&set, target)
            .map_err(|_| CoverError::Invariant("segment contraction failed"))?;
    }
    Ok((h, removed))
}

/// `1 / binomial(n, a)` as a float, computed multiplicatively.
fn choose_recip(n: usize, a: usize) -> f64 {
    let mut r = 1.0f64;
    for i in 1..=a {
        r *= i as f64 / (n - a + i) as f64;
    }
    r
}
