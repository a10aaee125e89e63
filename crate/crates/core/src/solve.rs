//! End-to-end pipelines: encode, run the platform, separate with the
//! detector, decode, recycle residues.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::aggregation::{Aggregation, InvariantViolation};
use crate::detector::{recycle, separate, ProbeOperationGraph, SolutionStore};
use crate::encoders::{
    decode_coloring, decode_hamilton, encode_coloring, encode_hamilton, fixed_classes,
    ColorCandidateTable, EncodeError, FIXED_CLASS_LIMIT,
};
use crate::engine::{
    enumerate_exhaustive, AuditReport, EngineConfig, EngineError, LoadRequest, Mode,
    PlatformState, StepRecord,
};
use crate::graph::{InputGraph, Vertex};
use crate::model::{max_probe_count, DataLibrary, ProbeLibrary};
use crate::oracles::{CanonicalCycle, Coloring};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("platform audit failed: {0}")]
    Audit(#[from] InvariantViolation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub mode: Mode,
    pub seed: u64,
    /// Copies of every data and probe type loaded in stochastic mode.
    pub copies: u64,
    pub max_steps: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Exhaustive,
            seed: 0,
            copies: 20,
            max_steps: u64::MAX,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InstanceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub data_types: usize,
    pub fibers: usize,
    pub probe_types: usize,
    pub sublibraries: usize,
    pub probe_bound: u64,
    pub target_orders: Vec<usize>,
    pub threshold: usize,
}

impl InstanceSummary {
    pub fn of(g: &InputGraph, data: &DataLibrary, probes: &ProbeLibrary, target: &ProbeOperationGraph) -> Self {
        Self {
            vertices: g.n(),
            edges: g.edge_count(),
            data_types: data.types.len(),
            fibers: data.total_fibers(),
            probe_types: probes.len(),
            sublibraries: probes.sublibrary_count(),
            probe_bound: max_probe_count(data, probes.kind),
            target_orders: target.targets().iter().map(|t| t.vertex_count()).collect(),
            threshold: target.threshold(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// `|Θ|`, the aggregations left on the platform.
    pub theta: usize,
    /// `|Q|` after decode validation.
    pub accepted: usize,
    /// `|C|`, including demoted aggregations.
    pub residues: usize,
    /// Accepted by the detector but rejected by the decoder.
    pub demoted: usize,
    pub steps: u64,
    pub refunded_data: u64,
    pub discarded_probes: u64,
    /// Conservation and structure audit of a stochastic run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
}

impl RunStats {
    fn absorb(&mut self, other: RunStats) {
        self.theta += other.theta;
        self.accepted += other.accepted;
        self.residues += other.residues;
        self.demoted += other.demoted;
        self.steps += other.steps;
        self.refunded_data += other.refunded_data;
        self.discarded_probes += other.discarded_probes;
        self.audit = match (self.audit.take(), other.audit) {
            (Some(a), Some(b)) => Some(AuditReport {
                data_loaded: a.data_loaded + b.data_loaded,
                data_on_platform: a.data_on_platform + b.data_on_platform,
                probes_loaded: a.probes_loaded + b.probes_loaded,
                probes_free: a.probes_free + b.probes_free,
                probes_bound: a.probes_bound + b.probes_bound,
                aggregations: a.aggregations + b.aggregations,
                max_order: a.max_order.max(b.max_order),
            }),
            (a, b) => a.or(b),
        };
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport<S> {
    pub problem: &'static str,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub instance: InstanceSummary,
    pub stats: RunStats,
    pub solutions: Vec<S>,
    /// Kept out of the JSON so identical runs serialize identically.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Θ from one engine run.
pub struct EngineRun {
    pub theta: Vec<Aggregation>,
    pub steps: u64,
    pub audit: Option<AuditReport>,
}

/// Runs the platform in the requested mode. `trace` sees every stochastic
/// step.
pub fn run_engine(
    data: &DataLibrary,
    probes: &ProbeLibrary,
    target: &ProbeOperationGraph,
    opts: &SolveOptions,
    trace: &mut dyn FnMut(&StepRecord),
) -> Result<EngineRun, SolveError> {
    match opts.mode {
        Mode::Exhaustive => Ok(EngineRun {
            theta: enumerate_exhaustive(data, probes, target),
            steps: 0,
            audit: None,
        }),
        Mode::Stochastic => {
            let request = LoadRequest::uniform(data, probes, opts.copies);
            let mut state = PlatformState::load(data, probes, &request, target, opts.seed)?;
            let config = EngineConfig {
                mode: Mode::Stochastic,
                seed: opts.seed,
                max_steps: opts.max_steps,
            };
            let theta = state.run(&config, |record, s| {
                debug_assert!(s.audit().is_ok(), "platform invariant broken");
                trace(record);
            });
            let audit = state.audit()?;
            Ok(EngineRun {
                theta,
                steps: state.steps(),
                audit: Some(audit),
            })
        }
    }
}

/// Separates Θ, moves detector-accepted aggregations that fail to decode
/// into the residues, and returns the distinct decoded answers.
fn detect_and_decode<S: Ord, F>(
    run: EngineRun,
    target: &ProbeOperationGraph,
    decode: F,
) -> (BTreeSet<S>, RunStats)
where
    F: Fn(&Aggregation) -> Option<S>,
{
    let theta = run.theta.len();
    let mut store: SolutionStore = separate(run.theta, target);
    let demoted = store.demote(|m| decode(m).is_some());
    let solutions: BTreeSet<S> = store.accepted.iter().filter_map(&decode).collect();
    let refund = recycle(&store);
    let stats = RunStats {
        theta,
        accepted: store.accepted.len(),
        residues: store.residues.len(),
        demoted,
        steps: run.steps,
        refunded_data: refund.total_data(),
        discarded_probes: refund.probes_discarded,
        audit: run.audit,
    };
    (solutions, stats)
}

pub fn solve_hamilton(
    g: &InputGraph,
    cover: Option<&[Vertex]>,
    opts: &SolveOptions,
    trace: &mut dyn FnMut(&StepRecord),
) -> Result<RunReport<CanonicalCycle>, SolveError> {
    let start = Instant::now();
    let enc = encode_hamilton(g, cover)?;
    let run = run_engine(&enc.data, &enc.probes, &enc.target, opts, trace)?;
    let (solutions, stats) = detect_and_decode(run, &enc.target, |m| decode_hamilton(m, &enc).ok());
    Ok(RunReport {
        problem: "hamilton",
        mode: opts.mode,
        seed: (opts.mode == Mode::Stochastic).then_some(opts.seed),
        instance: InstanceSummary::of(g, &enc.data, &enc.probes, &enc.target),
        stats,
        solutions: solutions.into_iter().collect(),
        wall_time: start.elapsed(),
    })
}

/// Where the colour candidates come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableChoice {
    /// Fix the invariant colour classes when the graph is small enough,
    /// otherwise allow every colour everywhere.
    FixClasses,
    Full,
    Given(ColorCandidateTable),
}

/// The candidate table a choice resolves to. Uncolorable graphs and graphs
/// above the fixed-class limit get the full table.
pub fn resolve_table(g: &InputGraph, k: u32, choice: &TableChoice) -> ColorCandidateTable {
    match choice {
        TableChoice::Given(table) => table.clone(),
        TableChoice::Full => ColorCandidateTable::full(g, k),
        TableChoice::FixClasses if g.n() <= FIXED_CLASS_LIMIT => match fixed_classes(g, k) {
            Ok(fixed) => ColorCandidateTable::from_fixed(g, &fixed),
            Err(_) => ColorCandidateTable::full(g, k),
        },
        TableChoice::FixClasses => ColorCandidateTable::full(g, k),
    }
}

/// Connected components, each sorted, in order of smallest vertex.
fn components(g: &InputGraph) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.n() + 1];
    let mut out = Vec::new();
    for s in g.vertices() {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Solves k-coloring. Each connected component with an edge is a separate
/// machine instance; an isolated vertex has no probes and takes any of its
/// candidate colours. The answer is the product over components.
pub fn solve_coloring(
    g: &InputGraph,
    k: u32,
    choice: &TableChoice,
    opts: &SolveOptions,
    trace: &mut dyn FnMut(&StepRecord),
) -> Result<RunReport<Coloring>, SolveError> {
    let start = Instant::now();
    let table = resolve_table(g, k, choice);
    let mut summary = InstanceSummary {
        vertices: g.n(),
        edges: g.edge_count(),
        ..InstanceSummary::default()
    };
    let mut stats = RunStats::default();
    let mut partial: Vec<Coloring> = vec![vec![u32::MAX; g.n()]];
    for comp in components(g) {
        let options: Vec<Vec<u32>> = if comp.len() == 1 {
            let v = comp[0];
            let cands = table.candidates.get(v as usize - 1).cloned().unwrap_or_default();
            if cands.is_empty() {
                return Err(EncodeError::EmptyCandidateSet(v).into());
            }
            summary.data_types += 1;
            summary.fibers += cands.len();
            cands.into_iter().map(|c| vec![c]).collect()
        } else {
            let index = |v: Vertex| comp.binary_search(&v).expect("component member") as Vertex + 1;
            let sub = InputGraph::new(
                comp.len(),
                g.edges()
                    .filter(|(u, _)| comp.binary_search(u).is_ok())
                    .map(|(u, v)| (index(u), index(v))),
            )
            .expect("induced subgraph is simple");
            let sub_table = ColorCandidateTable::new(
                k,
                comp.iter()
                    .map(|&v| table.candidates.get(v as usize - 1).cloned().unwrap_or_default())
                    .collect(),
            );
            let enc = encode_coloring(&sub, &sub_table)?;
            let s = InstanceSummary::of(&sub, &enc.data, &enc.probes, &enc.target);
            summary.data_types += s.data_types;
            summary.fibers += s.fibers;
            summary.probe_types += s.probe_types;
            summary.sublibraries += s.sublibraries;
            summary.probe_bound += s.probe_bound;
            summary.target_orders.extend(s.target_orders);
            summary.threshold = summary.threshold.max(s.threshold);
            let run = run_engine(&enc.data, &enc.probes, &enc.target, opts, trace)?;
            let (found, comp_stats) =
                detect_and_decode(run, &enc.target, |m| decode_coloring(m, &enc).ok());
            stats.absorb(comp_stats);
            found.into_iter().collect()
        };
        let mut next = Vec::with_capacity(partial.len() * options.len());
        for base in &partial {
            for colors in &options {
                let mut c = base.clone();
                for (&v, &color) in comp.iter().zip(colors) {
                    c[v as usize - 1] = color;
                }
                next.push(c);
            }
        }
        partial = next;
    }
    if g.n() == 0 {
        partial.clear();
    }
    partial.sort();
    partial.dedup();
    Ok(RunReport {
        problem: "coloring",
        mode: opts.mode,
        seed: (opts.mode == Mode::Stochastic).then_some(opts.seed),
        instance: summary,
        stats,
        solutions: partial,
        wall_time: start.elapsed(),
    })
}
