//! `pm`: encode graph problems for the probe machine, run it, and check the
//! answers against brute force.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use probe_machine::encoders::{
    color_name, encode_coloring, encode_hamilton, EncodeError, MIN_HAMILTON_VERTICES,
};
use probe_machine::engine::{Mode, StepRecord};
use probe_machine::fixtures;
use probe_machine::graph::{InputGraph, Vertex};
use probe_machine::instance::Instance;
use probe_machine::oracles::{brute_coloring, brute_hamilton, CanonicalCycle, Coloring};
use probe_machine::solve::{
    resolve_table, solve_coloring, solve_hamilton, InstanceSummary, RunReport, SolveError,
    SolveOptions, TableChoice,
};

#[derive(Parser)]
#[command(name = "pm", version, about = "Probe machine solver for Hamilton cycles and k-coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a graph problem into a data and probe library.
    Encode {
        #[command(subcommand)]
        problem: Problem,
    },
    /// Encode, run the platform, detect and decode.
    Solve {
        #[command(subcommand)]
        problem: Problem,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Enumerate the answers by brute force.
    Oracle {
        #[command(subcommand)]
        problem: Problem,
    },
    /// Print a bundled graph as an edge list.
    Fixture {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(fixtures::NAMES))]
        name: String,
    },
}

#[derive(Subcommand)]
enum Problem {
    Hamilton(HamiltonArgs),
    Coloring(ColoringArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, DIMACS .col or JSON graph.
    graph: PathBuf,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Write the main output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HamiltonArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Vertex cover to centre the 2-paths on, e.g. 1,2,3. Defaults to a minimum cover.
    #[arg(long, value_delimiter = ',')]
    cover: Option<Vec<Vertex>>,
}

#[derive(Args)]
struct ColoringArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Number of colours.
    #[arg(short)]
    k: u32,
    /// Fix the colour classes shared by every coloring (default for encode and solve).
    #[arg(long, conflicts_with = "full_table")]
    fix_classes: bool,
    /// Allow every colour at every vertex (default for oracle).
    #[arg(long)]
    full_table: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Stochastic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, global = true, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    /// Seed for stochastic runs.
    #[arg(long, global = true, env = "PM_SEED", default_value_t = 0)]
    seed: u64,
    /// Run every seed in a..b and merge the reports in seed order. Overrides --seed.
    #[arg(long, global = true, value_parser = parse_seeds, conflicts_with = "trace")]
    seeds: Option<Range<u64>>,
    /// Copies of every data and probe type loaded in stochastic mode.
    #[arg(long, global = true, default_value_t = SolveOptions::default().copies)]
    copies: u64,
    /// Stop a stochastic run after this many probe operations.
    #[arg(long, global = true)]
    max_steps: Option<u64>,
    /// Solution format; implies JSON reports for `json`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write one JSON line per platform step to this file.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected a range like 0..10")?;
    let a: u64 = a.trim().parse().map_err(|e| format!("bad start: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad end: {e}"))?;
    if a >= b {
        return Err(format!("empty seed range {a}..{b}"));
    }
    Ok(a..b)
}

enum Failure {
    Parse(String),
    Infeasible(String),
    /// Stochastic runs that found nothing; the report is still printed.
    Empty,
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Empty => 4,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Encode(e) => Failure::Infeasible(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<EncodeError> for Failure {
    fn from(e: EncodeError) -> Self {
        Failure::Infeasible(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Encode { problem } => encode(problem),
        Command::Solve { problem, run } => solve(problem, run),
        Command::Oracle { problem } => oracle(problem),
        Command::Fixture { name } => fixture(&name),
    };
    eprintln!("total time {}", format_duration(start.elapsed()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Parse(msg) => eprintln!("error: {msg}"),
                Failure::Infeasible(msg) => eprintln!("infeasible: {msg}"),
                Failure::Empty => eprintln!("stochastic run found no true solution"),
                Failure::Other(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn format_duration(d: Duration) -> String {
    format!("{:.3}ms", d.as_secs_f64() * 1e3)
}

fn read_graph(args: &GraphArgs) -> Result<InputGraph, Failure> {
    InputGraph::read(&args.graph).map_err(|e| Failure::Parse(format!("{}: {e}", args.graph.display())))
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn summary_text(s: &InstanceSummary) -> String {
    format!(
        "{} vertices, {} edges\ndata types {}, fibers {}, probe types {} (bound {}), sub-libraries {}\ntarget orders {:?}, threshold {}",
        s.vertices, s.edges, s.data_types, s.fibers, s.probe_types, s.probe_bound, s.sublibraries, s.target_orders, s.threshold
    )
}

fn coloring_table(args: &ColoringArgs, default_fixed: bool) -> TableChoice {
    if args.fix_classes || (default_fixed && !args.full_table) {
        TableChoice::FixClasses
    } else {
        TableChoice::Full
    }
}

fn encode(problem: Problem) -> Outcome {
    let (instance, summary, args) = match &problem {
        Problem::Hamilton(h) => {
            let g = read_graph(&h.graph)?;
            let enc = encode_hamilton(&g, h.cover.as_deref())?;
            let summary = InstanceSummary::of(&g, &enc.data, &enc.probes, &enc.target);
            (Instance::new(enc.data, enc.probes), summary, &h.graph)
        }
        Problem::Coloring(c) => {
            let g = read_graph(&c.graph)?;
            let table = resolve_table(&g, c.k, &coloring_table(c, true));
            let enc = encode_coloring(&g, &table)?;
            let summary = InstanceSummary::of(&g, &enc.data, &enc.probes, &enc.target);
            (Instance::new(enc.data, enc.probes), summary, &c.graph)
        }
    };
    if args.json {
        eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    } else {
        eprintln!("{}", summary_text(&summary));
    }
    emit(args.output.as_deref(), &to_json(&instance.to_json()))
}

fn options(run: &RunArgs, seed: u64) -> SolveOptions {
    SolveOptions {
        mode: match run.mode {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Stochastic => Mode::Stochastic,
        },
        seed,
        copies: run.copies,
        max_steps: run.max_steps.unwrap_or(u64::MAX),
    }
}

/// Calls `f` once per seed, in parallel for a sweep, and returns the reports
/// in seed order.
fn sweep<S, F>(run: &RunArgs, f: F) -> Result<Vec<RunReport<S>>, Failure>
where
    S: Send,
    F: Fn(&SolveOptions, &mut dyn FnMut(&StepRecord)) -> Result<RunReport<S>, SolveError> + Sync,
{
    match &run.seeds {
        Some(range) => range
            .clone()
            .into_par_iter()
            .map(|seed| f(&options(run, seed), &mut |_| {}))
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::from),
        None => {
            let opts = options(run, run.seed);
            let report = match &run.trace {
                Some(path) => {
                    let mut out = BufWriter::new(File::create(path)?);
                    let mut failed = None;
                    let report = f(&opts, &mut |record| {
                        if failed.is_none() {
                            let line = serde_json::to_string(record).expect("steps serialize");
                            if let Err(e) = writeln!(out, "{line}") {
                                failed = Some(e);
                            }
                        }
                    })?;
                    if let Some(e) = failed {
                        return Err(e.into());
                    }
                    out.flush()?;
                    report
                }
                None => f(&opts, &mut |_| {})?,
            };
            Ok(vec![report])
        }
    }
}

fn solve(problem: Problem, run: RunArgs) -> Outcome {
    match problem {
        Problem::Hamilton(h) => {
            let g = read_graph(&h.graph)?;
            let cover = h.cover.as_deref();
            let reports = sweep(&run, |opts, trace| solve_hamilton(&g, cover, opts, trace))?;
            let dot = |r: &RunReport<CanonicalCycle>| hamilton_dot(&g, &r.solutions);
            let text = |c: &CanonicalCycle| c.to_string();
            finish(&h.graph, &run, &reports, dot, text)
        }
        Problem::Coloring(c) => {
            let g = read_graph(&c.graph)?;
            let table = coloring_table(&c, true);
            let reports = sweep(&run, |opts, trace| solve_coloring(&g, c.k, &table, opts, trace))?;
            let dot = |r: &RunReport<Coloring>| coloring_dot(&g, &r.solutions);
            finish(&c.graph, &run, &reports, dot, coloring_text)
        }
    }
}

fn finish<S: Serialize>(
    args: &GraphArgs,
    run: &RunArgs,
    reports: &[RunReport<S>],
    dot: impl Fn(&RunReport<S>) -> String,
    text: impl Fn(&S) -> String,
) -> Outcome {
    let body = match run.format {
        Some(Format::Dot) => reports.iter().map(&dot).collect::<String>(),
        _ if args.json || run.format == Some(Format::Json) => {
            if run.seeds.is_some() {
                to_json(&reports)
            } else {
                to_json(&reports[0])
            }
        }
        _ => reports.iter().map(|r| report_text(r, &text)).collect::<Vec<_>>().join("\n"),
    };
    emit(args.output.as_deref(), &body)?;
    for r in reports {
        eprintln!(
            "{}wall time {}",
            r.seed.map(|s| format!("seed {s}: ")).unwrap_or_default(),
            format_duration(r.wall_time)
        );
    }
    let stochastic = reports.iter().all(|r| r.mode == Mode::Stochastic);
    if stochastic && reports.iter().all(|r| r.solutions.is_empty()) {
        return Err(Failure::Empty);
    }
    Ok(())
}

fn report_text<S>(r: &RunReport<S>, text: impl Fn(&S) -> String) -> String {
    let mut out = String::new();
    let mode = match r.mode {
        Mode::Exhaustive => "exhaustive".to_owned(),
        Mode::Stochastic => format!("stochastic, seed {}", r.seed.unwrap_or_default()),
    };
    let s = &r.stats;
    let _ = writeln!(out, "{} ({mode})", r.problem);
    let _ = writeln!(out, "{}", summary_text(&r.instance));
    let _ = writeln!(
        out,
        "|Θ| {}, |Q| {}, |C| {} ({} demoted by decoding)",
        s.theta, s.accepted, s.residues, s.demoted
    );
    if let Some(a) = &s.audit {
        let _ = writeln!(
            out,
            "steps {}, data loaded {} = on platform {}, probes loaded {} = free {} + bound {}",
            s.steps, a.data_loaded, a.data_on_platform, a.probes_loaded, a.probes_free, a.probes_bound
        );
    }
    let _ = writeln!(out, "recycled data {}, discarded probes {}", s.refunded_data, s.discarded_probes);
    let _ = writeln!(out, "{} solutions", r.solutions.len());
    for sol in &r.solutions {
        let _ = writeln!(out, "{}", text(sol));
    }
    out
}

fn coloring_text(c: &Coloring) -> String {
    c.iter().map(|&x| color_name(x)).collect::<Vec<_>>().join(" ")
}

fn hamilton_dot(g: &InputGraph, cycles: &[CanonicalCycle]) -> String {
    let mut out = String::new();
    for (i, cycle) in cycles.iter().enumerate() {
        let used = cycle.edges();
        let _ = writeln!(out, "graph hamilton_{} {{", i + 1);
        let _ = writeln!(out, "  label=\"{cycle}\";");
        for v in g.vertices() {
            let _ = writeln!(out, "  {v} [label=\"{}\"];", g.name(v));
        }
        for (u, v) in g.edges() {
            let style = if used.contains(&(u, v)) {
                "penwidth=3"
            } else {
                "style=dashed, color=gray"
            };
            let _ = writeln!(out, "  {u} -- {v} [{style}];");
        }
        out.push_str("}\n");
    }
    out
}

const PALETTE: [&str; 8] = ["red", "yellow", "lightblue", "green", "cyan", "orange", "violet", "gray"];

fn coloring_dot(g: &InputGraph, colorings: &[Coloring]) -> String {
    let mut out = String::new();
    for (i, c) in colorings.iter().enumerate() {
        let _ = writeln!(out, "graph coloring_{} {{", i + 1);
        for v in g.vertices() {
            let color = c[v as usize - 1];
            let fill = PALETTE.get(color as usize).copied().unwrap_or("white");
            let _ = writeln!(
                out,
                "  {v} [label=\"{} {}\", style=filled, fillcolor={fill}];",
                g.name(v),
                color_name(color)
            );
        }
        for (u, v) in g.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
    }
    out
}

#[derive(Serialize)]
struct OracleReport<S> {
    problem: &'static str,
    solutions: Vec<S>,
}

fn oracle(problem: Problem) -> Outcome {
    match problem {
        Problem::Hamilton(h) => {
            let g = read_graph(&h.graph)?;
            if g.n() < MIN_HAMILTON_VERTICES {
                eprintln!("note: the encoder needs at least {MIN_HAMILTON_VERTICES} vertices");
            }
            let found = brute_hamilton(&g).map_err(|e| Failure::Infeasible(e.to_string()))?;
            let report = OracleReport {
                problem: "hamilton",
                solutions: found.into_iter().collect(),
            };
            oracle_output(&h.graph, &report, |c| c.to_string())
        }
        Problem::Coloring(c) => {
            let g = read_graph(&c.graph)?;
            let fixed = match coloring_table(&c, false) {
                TableChoice::FixClasses => resolve_table(&g, c.k, &TableChoice::FixClasses).fixed(),
                _ => Default::default(),
            };
            let found = brute_coloring(&g, c.k, &fixed).map_err(|e| Failure::Infeasible(e.to_string()))?;
            let report = OracleReport {
                problem: "coloring",
                solutions: found.into_iter().collect(),
            };
            oracle_output(&c.graph, &report, coloring_text)
        }
    }
}

fn oracle_output<S: Serialize>(args: &GraphArgs, report: &OracleReport<S>, text: impl Fn(&S) -> String) -> Outcome {
    let body = if args.json {
        to_json(report)
    } else {
        let mut out = format!("{} solutions\n", report.solutions.len());
        for s in &report.solutions {
            out.push_str(&text(s));
            out.push('\n');
        }
        out
    };
    emit(args.output.as_deref(), &body)
}

fn fixture(name: &str) -> Outcome {
    let g = fixtures::by_name(name).ok_or_else(|| Failure::Parse(format!("unknown fixture {name}")))?;
    emit(None, &g.to_edge_list())
}
