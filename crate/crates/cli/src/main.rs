//! `patcov` — command-line front end for the pattern-covering sampler.
//!
//! Every subcommand prints a single JSON document (with a top-level
//! `schema` field) to stdout and exits 0 on success. Failures use
//! distinct exit codes: 2 for usage errors, 3 for unreadable or
//! malformed input files, and 4 for semantic failures (invalid
//! parameters, invalid decompositions, module errors, failed replays).
//!
//! All randomized subcommands require `--seed`; the same seed and
//! inputs produce byte-identical output.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use patcov_cli::gen;
use patcov_cli::io as fmt_io;
use patcov_cli::stats::{Direction, StatReport};
use patcov_core::cluster::cluster;
use patcov_core::cover::{sample_cover, Constants, TraceEvent};
use patcov_core::duality::{duality, DualityOutcome};
use patcov_core::graph::{GhostSet, Graph, Vertex};
use patcov_core::rng::{Draw, Sampler};
use patcov_core::solve::{
    covering_family, solve_with_repetition, Objective, PathQuery, QueryKind,
};

// ---------------------------------------------------------------------------
// Failure plumbing: one variant per exit code beyond clap's own 2.

enum Failure {
    /// Argument combinations clap cannot express (exit 2).
    Usage(String),
    /// Unreadable or malformed input files (exit 3).
    Parse(String),
    /// Semantic failures: bad parameter values, module errors, invalid
    /// decompositions, failed replays (exit 4).
    Invalid(String),
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Invalid(msg.to_string())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    fmt_io::parse_graph(&read_file(path)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_vertex_set(path: &Path) -> Result<BTreeSet<Vertex>, Failure> {
    fmt_io::parse_vertex_set(&read_file(path)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// Print the subcommand's JSON document: compact, one line, stable
/// field order (struct declaration order). A closed stdout (for
/// example `patcov ... | head`) is not an error.
fn emit(doc: &impl Serialize) {
    use std::io::Write;
    let body = serde_json::to_string(doc).expect("output types always serialize");
    let _ = writeln!(std::io::stdout(), "{body}");
}

fn constants(k: u32, scale: f64, ctw: u32) -> Result<Constants, Failure> {
    Constants::new(k, scale, ctw).map_err(invalid)
}

// ---------------------------------------------------------------------------
// CLI surface.

#[derive(Parser)]
#[command(
    name = "patcov",
    version,
    about = "Randomized low-width pattern-covering sampler for sparse graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one vertex subset A with its tree decomposition.
    Sample(SampleArgs),
    /// Run the ball-carving clustering stage on its own.
    Cluster(ClusterArgs),
    /// Decide the path-family / separator-chain dichotomy for s, t.
    Duality(DualityArgs),
    /// Look for a k-vertex path or cycle by repeated sampling.
    Solve(SolveArgs),
    /// Sample a whole covering family of subsets.
    Family(FamilyArgs),
    /// Check a tree decomposition against a graph.
    #[command(name = "validate-decomposition")]
    ValidateDecomposition(ValidateArgs),
    /// Estimate an event probability with a Hoeffding verdict.
    Estimate(EstimateArgs),
    /// Generate benchmark graphs, optionally with planted patterns.
    Gen(GenArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Sample(a) => cmd_sample(a),
        Cmd::Cluster(a) => cmd_cluster(a),
        Cmd::Duality(a) => cmd_duality(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Family(a) => cmd_family(a),
        Cmd::ValidateDecomposition(a) => cmd_validate(a),
        Cmd::Estimate(a) => cmd_estimate(a),
        Cmd::Gen(a) => cmd_gen(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Parse(m) => (3, m),
                Failure::Invalid(m) => (4, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

// ---------------------------------------------------------------------------
// sample

#[derive(Args)]
struct SampleArgs {
    /// Graph file (edge-list format).
    #[arg(long)]
    graph: PathBuf,
    /// Pattern size the subset must be good for (required unless
    /// --replay supplies it).
    #[arg(long)]
    k: Option<u32>,
    /// RNG seed (required unless --replay is given).
    #[arg(long)]
    seed: Option<u64>,
    /// Shrink factor for the size constants, in (0, 1].
    #[arg(long)]
    scale: Option<f64>,
    /// Treewidth-style sparsity constant of the input family.
    #[arg(long)]
    ctw: Option<u32>,
    /// Write the decomposition of G[A] to this file.
    #[arg(long)]
    emit_td: Option<PathBuf>,
    /// Write the RNG draw log to this file for later replay.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Re-run against a recorded draw log instead of a seed; the log
    /// carries k, scale, and ctw from the original run.
    #[arg(long, conflicts_with = "seed")]
    replay: Option<PathBuf>,
}

/// On-disk shape of a recorded draw log: the run parameters plus
/// every random draw, enough to repeat the run exactly.
#[derive(Serialize, Deserialize)]
struct TraceFile {
    schema: String,
    seed: u64,
    k: u32,
    scale: f64,
    ctw: u32,
    draws: Vec<Draw>,
}

#[derive(Serialize)]
struct SampleOut {
    schema: &'static str,
    seed: u64,
    replayed: bool,
    k: u32,
    scale: f64,
    ctw: u32,
    root: Vertex,
    a: Vec<Vertex>,
    width: usize,
    bags: usize,
    events: Vec<TraceEvent>,
}

fn cmd_sample(a: SampleArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    // Resolve parameters: a replay takes them from the recorded log
    // and rejects contradicting flags; a seeded run takes them from
    // the flags with defaults scale=1, ctw=10.
    let (k, scale, ctw, seed, mut sampler, replayed) = match (&a.replay, a.seed) {
        (Some(path), None) => {
            let tf: TraceFile = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
            let clash = a.k.is_some_and(|k| k != tf.k)
                || a.scale.is_some_and(|s| s != tf.scale)
                || a.ctw.is_some_and(|c| c != tf.ctw);
            if clash {
                return Err(usage(
                    "--k/--scale/--ctw contradict the recorded draw log",
                ));
            }
            (tf.k, tf.scale, tf.ctw, tf.seed, Sampler::replay(tf.draws), true)
        }
        (None, Some(seed)) => {
            let k = a.k.ok_or_else(|| usage("--k is required"))?;
            (
                k,
                a.scale.unwrap_or(1.0),
                a.ctw.unwrap_or(10),
                seed,
                Sampler::from_seed(seed),
                false,
            )
        }
        _ => return Err(usage("exactly one of --seed and --replay is required")),
    };
    let c = constants(k, scale, ctw)?;
    let res = sample_cover(&g, &c, &mut sampler).map_err(invalid)?;
    if replayed && sampler.replay_failed() {
        return Err(invalid("draw log exhausted or diverged during replay"));
    }
    if let Some(td_path) = &a.emit_td {
        write_file(td_path, &fmt_io::write_td(&res.td))?;
    }
    if let Some(trace_path) = &a.trace {
        if replayed {
            return Err(usage("--trace requires a seeded run, not --replay"));
        }
        let tf = TraceFile {
            schema: "patcov/v1/trace".into(),
            seed,
            k,
            scale,
            ctw,
            draws: sampler.into_log(),
        };
        let body = serde_json::to_string(&tf).expect("draws serialize");
        write_file(trace_path, &body)?;
    }
    emit(&SampleOut {
        schema: "patcov/v1/sample",
        seed,
        replayed,
        k,
        scale,
        ctw,
        root: res.root,
        a: res.a.iter().copied().collect(),
        width: res.td.width(),
        bags: res.td.bags.len(),
        events: res.trace,
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// cluster

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    seed: u64,
    /// Optional ghost-vertex set file (traversal cost 0).
    #[arg(long)]
    ghosts: Option<PathBuf>,
    /// Aggregate this many independent runs instead of printing one.
    #[arg(long)]
    trials: Option<u64>,
    /// Pattern file; batch mode also counts how often it survives.
    #[arg(long)]
    pattern: Option<PathBuf>,
}

#[derive(Serialize)]
struct ClusterOut {
    schema: &'static str,
    seed: u64,
    k: u32,
    aborted: bool,
    kept: Vec<Vertex>,
    /// Carve steps as (center, sampled radius) pairs.
    carve_log: Vec<(Vertex, u64)>,
}

#[derive(Serialize)]
struct ClusterBatchOut {
    schema: &'static str,
    seed: u64,
    k: u32,
    trials: u64,
    aborted: u64,
    abort_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern_kept: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern_kept_fraction: Option<f64>,
}

fn cmd_cluster(a: ClusterArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let ghosts: GhostSet = match &a.ghosts {
        Some(p) => load_vertex_set(p)?,
        None => GhostSet::new(),
    };
    let pattern = a.pattern.as_deref().map(load_vertex_set).transpose()?;
    match a.trials {
        None => {
            let mut s = Sampler::from_seed(a.seed);
            let r = cluster(&g, &ghosts, a.k, &mut s).map_err(invalid)?;
            emit(&ClusterOut {
                schema: "patcov/v1/cluster",
                seed: a.seed,
                k: a.k,
                aborted: r.aborted,
                kept: r.kept.iter().copied().collect(),
                carve_log: r.carve_log,
            });
        }
        Some(trials) => {
            if trials == 0 {
                return Err(usage("--trials must be positive"));
            }
            let mut aborted = 0u64;
            let mut kept_pattern = 0u64;
            for t in 0..trials {
                let mut s = Sampler::for_trial(a.seed, t);
                let r = cluster(&g, &ghosts, a.k, &mut s).map_err(invalid)?;
                if r.aborted {
                    aborted += 1;
                }
                if let Some(x) = &pattern {
                    if x.is_subset(&r.kept) {
                        kept_pattern += 1;
                    }
                }
            }
            emit(&ClusterBatchOut {
                schema: "patcov/v1/cluster-batch",
                seed: a.seed,
                k: a.k,
                trials,
                aborted,
                abort_fraction: aborted as f64 / trials as f64,
                pattern_kept: pattern.as_ref().map(|_| kept_pattern),
                pattern_kept_fraction: pattern
                    .as_ref()
                    .map(|_| kept_pattern as f64 / trials as f64),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// duality

#[derive(Args)]
struct DualityArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Source vertex.
    #[arg(long)]
    s: Vertex,
    /// Target vertex.
    #[arg(long)]
    t: Vertex,
    /// Requested number of paths.
    #[arg(long)]
    p: u32,
    /// Congestion budget per non-endpoint vertex.
    #[arg(long)]
    q: u32,
}

#[derive(Serialize)]
struct DualityOut {
    schema: &'static str,
    s: Vertex,
    t: Vertex,
    p: u32,
    q: u32,
    outcome: &'static str,
    flow_cost: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain: Option<Vec<Vec<Vertex>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    paths: Option<Vec<Vec<Vertex>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    public: Option<Vec<Vec<Vertex>>>,
}

fn cmd_duality(a: DualityArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let out = duality(&g, a.s, a.t, a.p, a.q).map_err(invalid)?;
    let doc = match out {
        DualityOutcome::Chain(c) => DualityOut {
            schema: "patcov/v1/duality",
            s: a.s,
            t: a.t,
            p: a.p,
            q: a.q,
            outcome: "chain",
            flow_cost: c.flow_cost,
            chain: Some(
                c.separators
                    .iter()
                    .map(|sep| sep.iter().copied().collect())
                    .collect(),
            ),
            paths: None,
            public: None,
        },
        DualityOutcome::Paths(f) => DualityOut {
            schema: "patcov/v1/duality",
            s: a.s,
            t: a.t,
            p: a.p,
            q: a.q,
            outcome: "paths",
            flow_cost: f.flow_cost,
            chain: None,
            paths: Some(f.paths.clone()),
            public: Some(
                f.public
                    .iter()
                    .map(|b| b.iter().copied().collect())
                    .collect(),
            ),
        },
    };
    emit(&doc);
    Ok(())
}

// ---------------------------------------------------------------------------
// solve

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Path,
    Cycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Exists,
    MinWeight,
    MaxWeight,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Number of vertices in the sought path or cycle.
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Respect arc directions (the graph file must be directed).
    #[arg(long)]
    directed: bool,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Exists)]
    objective: ObjectiveArg,
    #[arg(long)]
    trials: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 10)]
    ctw: u32,
}

#[derive(Serialize)]
struct SolveOut {
    schema: &'static str,
    seed: u64,
    k: u32,
    kind: &'static str,
    directed: bool,
    objective: &'static str,
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<Vertex>>,
    /// Witness weight as an exact rational [numerator, denominator].
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<[i64; 2]>,
    trials_used: u32,
    widths: Vec<usize>,
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    if a.directed && !g.is_directed() {
        return Err(invalid("--directed needs a directed graph file"));
    }
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let (kind, kind_name) = match a.kind {
        KindArg::Path => (QueryKind::Path, "path"),
        KindArg::Cycle => (QueryKind::Cycle, "cycle"),
    };
    let (objective, obj_name) = match a.objective {
        ObjectiveArg::Exists => (Objective::Exists, "exists"),
        ObjectiveArg::MinWeight => (Objective::MinWeight, "min_weight"),
        ObjectiveArg::MaxWeight => (Objective::MaxWeight, "max_weight"),
    };
    let query = PathQuery {
        kind,
        k: a.k,
        directed: a.directed,
        objective,
    };
    let c = constants(a.k, a.scale, a.ctw)?;
    let report = solve_with_repetition(&g, &query, a.trials, &c, a.seed).map_err(invalid)?;
    emit(&SolveOut {
        schema: "patcov/v1/solve",
        seed: a.seed,
        k: a.k,
        kind: kind_name,
        directed: a.directed,
        objective: obj_name,
        found: report.found,
        witness: report.witness,
        weight: report.weight.map(|w| [*w.numer(), *w.denom()]),
        trials_used: report.trials_used,
        widths: report.widths,
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// family

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    /// Number of independent subsets to sample.
    #[arg(long)]
    trials: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 10)]
    ctw: u32,
    /// JSON file with an array of vertex arrays; coverage of each is
    /// reported.
    #[arg(long)]
    patterns: Option<PathBuf>,
}

#[derive(Serialize)]
struct FamilyMemberOut {
    root: Vertex,
    a: Vec<Vertex>,
    width: usize,
}

#[derive(Serialize)]
struct FamilyOut {
    schema: &'static str,
    seed: u64,
    k: u32,
    trials: u32,
    members: Vec<FamilyMemberOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covered: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage_fraction: Option<f64>,
}

fn cmd_family(a: FamilyArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let patterns: Option<Vec<BTreeSet<Vertex>>> = match &a.patterns {
        Some(p) => {
            let raw: Vec<Vec<Vertex>> = serde_json::from_str(&read_file(p)?)
                .map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?;
            Some(raw.into_iter().map(|v| v.into_iter().collect()).collect())
        }
        None => None,
    };
    let c = constants(a.k, a.scale, a.ctw)?;
    let fam = covering_family(&g, a.trials, &c, a.seed).map_err(invalid)?;
    let members: Vec<FamilyMemberOut> = fam
        .iter()
        .map(|m| FamilyMemberOut {
            root: m.root,
            a: m.a.iter().copied().collect(),
            width: m.td.width(),
        })
        .collect();
    let covered = patterns.as_ref().map(|xs| {
        xs.iter()
            .map(|x| fam.iter().any(|m| x.is_subset(&m.a)))
            .collect::<Vec<bool>>()
    });
    let coverage_fraction = covered.as_ref().map(|c| {
        if c.is_empty() {
            0.0
        } else {
            c.iter().filter(|&&b| b).count() as f64 / c.len() as f64
        }
    });
    emit(&FamilyOut {
        schema: "patcov/v1/family",
        seed: a.seed,
        k: a.k,
        trials: a.trials,
        members,
        covered,
        coverage_fraction,
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// validate-decomposition

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    td: PathBuf,
}

#[derive(Serialize)]
struct ValidateOut {
    schema: &'static str,
    ok: bool,
    width: usize,
    bags: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<String>,
}

fn cmd_validate(a: ValidateArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    let td = fmt_io::parse_td(&read_file(&a.td)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", a.td.display())))?;
    match td.validate(&g) {
        Ok(()) => {
            emit(&ValidateOut {
                schema: "patcov/v1/validate",
                ok: true,
                width: td.width(),
                bags: td.bags.len(),
                violation: None,
            });
            Ok(())
        }
        Err(e) => {
            emit(&ValidateOut {
                schema: "patcov/v1/validate",
                ok: false,
                width: td.width(),
                bags: td.bags.len(),
                violation: Some(e.to_string()),
            });
            Err(invalid(format!("invalid decomposition: {e}")))
        }
    }
}

// ---------------------------------------------------------------------------
// estimate

#[derive(Clone, Copy, ValueEnum)]
enum ClaimArg {
    /// P(pattern survives clustering) with claimed bound 1 - 1/k.
    ClusterCoverage,
    /// P(clustering aborts) with claimed bound 1/(2k).
    ClusterAbort,
    /// P(pattern lands inside a sampled subset); report only.
    SamplerCoverage,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    claim: ClaimArg,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.99)]
    confidence: f64,
    /// Pattern file; required for the coverage claims.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 10)]
    ctw: u32,
}

fn cmd_estimate(a: EstimateArgs) -> CmdResult {
    let g = load_graph(&a.graph)?;
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    if !(a.confidence > 0.0 && a.confidence < 1.0) {
        return Err(usage("--confidence must lie strictly between 0 and 1"));
    }
    let pattern = a.pattern.as_deref().map(load_vertex_set).transpose()?;
    let need_pattern = || {
        pattern
            .clone()
            .ok_or_else(|| usage("this claim needs --pattern"))
    };
    let report = match a.claim {
        ClaimArg::ClusterCoverage => {
            let x = need_pattern()?;
            if a.k == 0 {
                return Err(invalid("k must be positive"));
            }
            let ghosts = GhostSet::new();
            let mut hits = 0u64;
            for t in 0..a.trials {
                let mut s = Sampler::for_trial(a.seed, t);
                let r = cluster(&g, &ghosts, a.k, &mut s).map_err(invalid)?;
                if x.is_subset(&r.kept) {
                    hits += 1;
                }
            }
            StatReport::new(
                "cluster-coverage",
                hits,
                a.trials,
                a.confidence,
                Direction::LowerBound,
                Some(1.0 - 1.0 / f64::from(a.k)),
            )
        }
        ClaimArg::ClusterAbort => {
            if a.k == 0 {
                return Err(invalid("k must be positive"));
            }
            let ghosts = GhostSet::new();
            let mut aborts = 0u64;
            for t in 0..a.trials {
                let mut s = Sampler::for_trial(a.seed, t);
                let r = cluster(&g, &ghosts, a.k, &mut s).map_err(invalid)?;
                if r.aborted {
                    aborts += 1;
                }
            }
            StatReport::new(
                "cluster-abort",
                aborts,
                a.trials,
                a.confidence,
                Direction::UpperBound,
                Some(1.0 / (2.0 * f64::from(a.k))),
            )
        }
        ClaimArg::SamplerCoverage => {
            let x = need_pattern()?;
            let c = constants(a.k, a.scale, a.ctw)?;
            let mut hits = 0u64;
            for t in 0..a.trials {
                let mut s = Sampler::for_trial(a.seed, t);
                let r = sample_cover(&g, &c, &mut s).map_err(invalid)?;
                if x.is_subset(&r.a) {
                    hits += 1;
                }
            }
            StatReport::new(
                "sampler-coverage",
                hits,
                a.trials,
                a.confidence,
                Direction::ReportOnly,
                None,
            )
        }
    };
    emit(&report);
    Ok(())
}

// ---------------------------------------------------------------------------
// gen

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Grid,
    Cylinder,
    Path,
    Tree,
    RandomPlanarLike,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Grid width.
    #[arg(long)]
    width: Option<u32>,
    /// Grid height.
    #[arg(long)]
    height: Option<u32>,
    /// Cylinder circumference.
    #[arg(long)]
    circ: Option<u32>,
    /// Cylinder length.
    #[arg(long)]
    len: Option<u32>,
    /// Vertex count for path, tree, and random-planar-like.
    #[arg(long)]
    n: Option<u32>,
    /// Seed; required for randomized kinds and planting.
    #[arg(long)]
    seed: Option<u64>,
    /// Plant a random connected pattern of this size.
    #[arg(long, conflicts_with = "plant_directed_path")]
    plant: Option<u32>,
    /// Plant a directed path on this many vertices and orient all
    /// remaining edges across BFS layers.
    #[arg(long)]
    plant_directed_path: Option<u32>,
    /// Orient all edges across BFS layers (even layer -> odd layer).
    #[arg(long, conflicts_with = "plant_directed_path")]
    orient_bipartite: bool,
    /// Output graph file.
    #[arg(long)]
    out: PathBuf,
    /// Output pattern file (JSON vertex array).
    #[arg(long)]
    pattern_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GenOut {
    schema: &'static str,
    kind: &'static str,
    n: u32,
    m: usize,
    directed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planted: Option<Vec<Vertex>>,
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let need = |field: Option<u32>, name: &str| {
        field.ok_or_else(|| usage(format!("--kind {} needs --{name}", kind_name(a.kind))))
    };
    let randomized_kind = matches!(a.kind, GenKind::Tree | GenKind::RandomPlanarLike);
    let randomized =
        randomized_kind || a.plant.is_some() || a.plant_directed_path.is_some();
    let mut sampler = match (randomized, a.seed) {
        (true, None) => return Err(usage("this generation is randomized and needs --seed")),
        (_, seed) => seed.map(Sampler::from_seed),
    };
    if randomized {
        assert!(sampler.is_some(), "checked above");
    }

    let base = match a.kind {
        GenKind::Grid => gen::grid(need(a.width, "width")?, need(a.height, "height")?),
        GenKind::Cylinder => gen::cylinder(need(a.circ, "circ")?, need(a.len, "len")?),
        GenKind::Path => gen::path(need(a.n, "n")?),
        GenKind::Tree => gen::random_tree(
            need(a.n, "n")?,
            sampler.as_mut().expect("randomized kind has a sampler"),
        ),
        GenKind::RandomPlanarLike => gen::random_planar_like(
            need(a.n, "n")?,
            sampler.as_mut().expect("randomized kind has a sampler"),
        ),
    }
    .map_err(invalid)?;

    let mut planted: Option<Vec<Vertex>> = None;
    let mut g = base;
    if let Some(kp) = a.plant_directed_path {
        let s = sampler.as_mut().expect("planting has a sampler");
        let path = gen::plant_directed_path(&mut g, kp, s).map_err(invalid)?;
        planted = Some(path);
    } else {
        if let Some(kp) = a.plant {
            let s = sampler.as_mut().expect("planting has a sampler");
            let x = gen::plant_connected(&g, kp, s).map_err(invalid)?;
            planted = Some(x.into_iter().collect());
        }
        if a.orient_bipartite {
            let root = g
                .vertices()
                .next()
                .ok_or_else(|| invalid("cannot orient an empty graph"))?;
            gen::orient_bipartite(&mut g, root).map_err(invalid)?;
        }
    }

    let body = fmt_io::write_graph(&g).map_err(invalid)?;
    write_file(&a.out, &body)?;
    if let Some(pp) = &a.pattern_out {
        let x = planted
            .clone()
            .ok_or_else(|| usage("--pattern-out needs --plant or --plant-directed-path"))?;
        write_file(pp, &serde_json::to_string(&x).expect("ids serialize"))?;
    }
    emit(&GenOut {
        schema: "patcov/v1/gen",
        kind: kind_name(a.kind),
        n: g.n() as u32,
        m: g.m(),
        directed: g.is_directed(),
        seed: a.seed,
        planted,
    });
    Ok(())
}

fn kind_name(k: GenKind) -> &'static str {
    match k {
        GenKind::Grid => "grid",
        GenKind::Cylinder => "cylinder",
        GenKind::Path => "path",
        GenKind::Tree => "tree",
        GenKind::RandomPlanarLike => "random-planar-like",
    }
}
