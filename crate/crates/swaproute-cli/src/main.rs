//! Batch front end for the swaproute library. Every command is
//! deterministic given its flags and seed, so reruns produce byte-identical
//! JSON and CSV.
//!
//! Exit codes: 0 success, 1 a verification or bound check failed,
//! 2 usage, parameter, or size-cap errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;

use swaproute::bounds::{
    delta_s_layer, diameter_bound, diameter_bound_chain, ns_lower_bound, ns_lower_bound_general,
    BoundMode, Degree, DiameterBoundInput, StateCount,
};
use swaproute::circuit::{count_layer_matchings, generate_full_layer_circuit, LayeredCircuit};
use swaproute::families::{
    build_complete, build_cyclic_butterfly, build_lattice, build_modified_butterfly,
    build_random_regular,
};
use swaproute::graph::InteractionGraph;
use swaproute::oracle::{emulation_complexity, optimal_routed_depth, verify_transition_bounds};
use swaproute::route::{route_butterfly, route_greedy, verify_schedule, RouteError, RouteResult};

#[derive(Parser)]
#[command(name = "swaproute", version, about = "Route layered two-qubit circuits on sparse graphs and evaluate the depth bounds they are up against")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an interaction graph and write it as JSON.
    GenGraph(GenGraphArgs),
    /// Sample a circuit of uniformly random full layers and write it as JSON.
    GenCircuit(GenCircuitArgs),
    /// Route a circuit onto a graph and report the schedule depth.
    Route(RouteArgs),
    /// Replay a schedule file against its graph and circuit.
    Verify(VerifyArgs),
    /// Evaluate depth lower bounds without routing anything.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Exhaustive small-instance checks of the counting arguments.
    Oracle(OracleArgs),
    /// Route a grid of instances in parallel and emit a CSV of depths.
    Scaling(ScalingArgs),
}

#[derive(Args, Clone)]
struct FamilySpec {
    /// Graph family to build.
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    /// Butterfly levels (butterfly families).
    #[arg(long)]
    k: Option<u32>,
    /// Degree: padding target for the modified butterfly, exact for
    /// random-regular.
    #[arg(long)]
    r: Option<usize>,
    /// Vertex count (random-regular, complete).
    #[arg(long)]
    n: Option<usize>,
    /// Lattice rows.
    #[arg(long)]
    rows: Option<usize>,
    /// Lattice columns.
    #[arg(long)]
    cols: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum FamilyKind {
    CyclicButterfly,
    ModifiedButterfly,
    RandomRegular,
    Lattice,
    Complete,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum RouterKind {
    /// Move each pending gate's qubits together along shortest paths.
    Greedy,
    /// Sorting-network schedule; needs a modified-butterfly graph.
    Butterfly,
}

impl RouterKind {
    fn name(self) -> &'static str {
        match self {
            RouterKind::Greedy => "greedy",
            RouterKind::Butterfly => "butterfly",
        }
    }

    fn run(
        self,
        g: &InteractionGraph,
        c: &LayeredCircuit,
        seed: u64,
    ) -> Result<RouteResult, RouteError> {
        match self {
            RouterKind::Greedy => route_greedy(g, c, seed),
            RouterKind::Butterfly => route_butterfly(g, c, seed),
        }
    }
}

#[derive(Args)]
struct GenGraphArgs {
    #[command(flatten)]
    family: FamilySpec,
    /// Construction seed; defaults to SWAPROUTE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenCircuitArgs {
    /// Number of logical qubits (even).
    #[arg(long)]
    qubits: usize,
    /// Number of full layers.
    #[arg(long)]
    layers: usize,
    /// Sampling seed; defaults to SWAPROUTE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    /// Graph JSON file; alternative to --family.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Circuit JSON file; alternative to --m.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[command(flatten)]
    family: FamilySpec,
    /// Sample this many full layers instead of loading a circuit file.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum)]
    router: RouterKind,
    /// Seed for generation and tie-breaking; defaults to SWAPROUTE_SEED,
    /// then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the schedule JSON (skipped when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Swap-step floor implied by the entropy a routed circuit must shed.
    NsLower(NsLowerArgs),
    /// Least radius at which a degree-bounded state graph can cover all
    /// states.
    Diameter(DiameterArgs),
    /// Same radius for the n!-state placement graph, kept as a float.
    Chain(ChainArgs),
    /// Entropy one uniformly random full layer adds, with the matching
    /// count behind it.
    LayerEntropy(LayerEntropyArgs),
}

#[derive(Args)]
struct NsLowerArgs {
    /// Qubit count (even).
    #[arg(long)]
    n: u64,
    /// Circuit layers.
    #[arg(long)]
    m: u64,
    /// Degree of a regular interaction graph.
    #[arg(long)]
    r: Option<u64>,
    /// Average degree (irregular modes); defaults to --r.
    #[arg(long)]
    r_ave: Option<f64>,
    /// Maximum degree (irregular modes); defaults to --r.
    #[arg(long)]
    r_max: Option<u64>,
    /// Total sites including ancillas; defaults to --n.
    #[arg(long)]
    n_v: Option<u64>,
    #[arg(long, value_enum, default_value_t = BoundModeArg::Regular)]
    mode: BoundModeArg,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum BoundModeArg {
    Regular,
    Irregular,
    SwapAncilla,
    Teleport,
}

impl From<BoundModeArg> for BoundMode {
    fn from(a: BoundModeArg) -> Self {
        match a {
            BoundModeArg::Regular => BoundMode::Regular,
            BoundModeArg::Irregular => BoundMode::Irregular,
            BoundModeArg::SwapAncilla => BoundMode::SwapAncilla,
            BoundModeArg::Teleport => BoundMode::Teleport,
        }
    }
}

#[derive(Args)]
struct DiameterArgs {
    /// Exact state count, as a decimal integer of any size.
    #[arg(long)]
    states: Option<String>,
    /// State count given as a factorial argument: N = (value)!.
    #[arg(long)]
    states_factorial: Option<u64>,
    /// Exact per-state transition count.
    #[arg(long)]
    degree: Option<String>,
    /// Transition count given as its log2.
    #[arg(long)]
    degree_log2: Option<f64>,
    /// Slack in the covering inequality.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Args)]
struct ChainArgs {
    /// Qubit count.
    #[arg(long)]
    n: u64,
    /// Regular degree of the interaction graph.
    #[arg(long)]
    r: u64,
    /// Slack in the covering inequality.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Args)]
struct LayerEntropyArgs {
    /// Qubit count (even).
    #[arg(long)]
    n: u64,
}

#[derive(Args)]
struct OracleArgs {
    /// Graph JSON file; alternative to --family.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    family: FamilySpec,
    /// Permit the n = 7 placement search (minutes, not seconds).
    #[arg(long)]
    allow_n7: bool,
    /// Layers for the routed-depth comparison (capped at 4).
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Seed for graph construction and the comparison circuit; defaults to
    /// SWAPROUTE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ScalingArgs {
    /// Butterfly levels to sweep; each k routes at n = 4k*2^k sites.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    ks: Vec<u32>,
    /// Padding degree for the butterfly construction.
    #[arg(long, default_value_t = 4)]
    r: usize,
    /// Layers per sampled circuit.
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Comma-separated seeds; one routed instance per (k, seed).
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
    seeds: Vec<u64>,
    #[arg(long, value_enum, default_value_t = RouterChoice::Butterfly)]
    router: RouterChoice,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum RouterChoice {
    Greedy,
    Butterfly,
    /// Route every instance with both routers, two rows per instance.
    Both,
}

impl RouterChoice {
    fn expand(self) -> Vec<RouterKind> {
        match self {
            RouterChoice::Greedy => vec![RouterKind::Greedy],
            RouterChoice::Butterfly => vec![RouterKind::Butterfly],
            RouterChoice::Both => vec![RouterKind::Butterfly, RouterKind::Greedy],
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::GenGraph(args) => cmd_gen_graph(args),
        Cmd::GenCircuit(args) => cmd_gen_circuit(args),
        Cmd::Route(args) => cmd_route(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Bounds(cmd) => cmd_bounds(cmd),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Scaling(args) => cmd_scaling(args),
    }
}

/// Flag, then SWAPROUTE_SEED, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("SWAPROUTE_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .with_context(|| format!("SWAPROUTE_SEED={text:?} is not an unsigned integer")),
        Err(_) => Ok(0),
    }
}

fn build_family(spec: &FamilySpec, seed: u64) -> Result<InteractionGraph> {
    let family = spec.family.context("no graph given: pass --family or --graph")?;
    let g = match family {
        FamilyKind::CyclicButterfly => {
            let k = spec.k.context("--family cyclic-butterfly needs --k")?;
            build_cyclic_butterfly(k)?
        }
        FamilyKind::ModifiedButterfly => {
            let k = spec.k.context("--family modified-butterfly needs --k")?;
            build_modified_butterfly(k, spec.r.unwrap_or(4), seed)?
        }
        FamilyKind::RandomRegular => {
            let n = spec.n.context("--family random-regular needs --n")?;
            let r = spec.r.context("--family random-regular needs --r")?;
            build_random_regular(n, r, seed)?
        }
        FamilyKind::Lattice => {
            let rows = spec.rows.context("--family lattice needs --rows")?;
            let cols = spec.cols.context("--family lattice needs --cols")?;
            build_lattice(rows, cols)?
        }
        FamilyKind::Complete => {
            let n = spec.n.context("--family complete needs --n")?;
            build_complete(n)?
        }
    };
    Ok(g)
}

fn load_graph(path: &PathBuf) -> Result<InteractionGraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InteractionGraph::from_json(&text)?)
}

fn load_circuit(path: &PathBuf) -> Result<LayeredCircuit> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(LayeredCircuit::from_json(&text)?)
}

/// Writes to the path when given, otherwise stdout; always ends with one
/// newline so both sinks produce identical bytes.
fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_gen_graph(args: GenGraphArgs) -> Result<u8> {
    let seed = resolve_seed(args.seed)?;
    let g = build_family(&args.family, seed)?;
    write_out(&args.out, &g.to_json())?;
    Ok(0)
}

fn cmd_gen_circuit(args: GenCircuitArgs) -> Result<u8> {
    let seed = resolve_seed(args.seed)?;
    let c = generate_full_layer_circuit(args.qubits, args.layers, seed)?;
    write_out(&args.out, &c.to_json())?;
    Ok(0)
}

fn cmd_route(args: RouteArgs) -> Result<u8> {
    let seed = resolve_seed(args.seed)?;
    if args.graph.is_some() && args.family.family.is_some() {
        bail!("--graph and --family are alternatives, not companions");
    }
    let g = match &args.graph {
        Some(path) => load_graph(path)?,
        None => build_family(&args.family, seed)?,
    };
    let c = match (&args.circuit, args.m) {
        (Some(_), Some(_)) => bail!("--circuit and --m are alternatives, not companions"),
        (Some(path), None) => load_circuit(path)?,
        (None, Some(m)) => generate_full_layer_circuit(g.vertex_count(), m, seed)?,
        (None, None) => bail!("no circuit given: pass --circuit or --m"),
    };

    let result = args.router.run(&g, &c, seed)?;
    if let Some(path) = &args.out {
        write_out(&Some(path.clone()), &result.schedule.to_json())?;
    }

    let violations = verify_schedule(&g, &c, &result.schedule);
    let depth = result.schedule.depth();
    let m = c.depth();
    let overhead = depth as f64 / m as f64;
    let summary = serde_json::json!({
        "router": args.router.name(),
        "family": g.family().tag(),
        "n": g.vertex_count(),
        "qubits": c.n,
        "m": m,
        "depth": depth,
        "swaps": result.schedule.swap_count(),
        "overhead": overhead,
        "overhead_per_log2n": overhead / (g.vertex_count() as f64).log2(),
        "verified": violations.is_empty(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if violations.is_empty() {
        Ok(0)
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Ok(1)
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let g = load_graph(&args.graph)?;
    let c = load_circuit(&args.circuit)?;
    let text = fs::read_to_string(&args.schedule)
        .with_context(|| format!("reading {}", args.schedule.display()))?;
    let s = swaproute::RoutedSchedule::from_json(&text)?;
    let violations = verify_schedule(&g, &c, &s);
    if violations.is_empty() {
        let summary = serde_json::json!({
            "valid": true,
            "depth": s.depth(),
            "swaps": s.swap_count(),
        });
        println!("{}", serde_json::to_string_pretty(&summary)?);
        Ok(0)
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Ok(1)
    }
}

fn cmd_bounds(cmd: BoundsCmd) -> Result<u8> {
    let report = match cmd {
        BoundsCmd::NsLower(args) => {
            let mode = BoundMode::from(args.mode);
            let ledger = if mode == BoundMode::Regular {
                let r = args.r.context("--mode regular needs --r")?;
                ns_lower_bound(args.n, args.m, r)?
            } else {
                let r_max = args.r_max.or(args.r).context("pass --r-max or --r")?;
                let r_ave = args.r_ave.unwrap_or(r_max as f64);
                let n_v = args.n_v.unwrap_or(args.n);
                ns_lower_bound_general(args.n, args.m, r_ave, r_max, n_v, mode)?
            };
            serde_json::to_value(&ledger)?
        }
        BoundsCmd::Diameter(args) => {
            let state_count = match (&args.states, args.states_factorial) {
                (Some(text), None) => StateCount::Exact(
                    text.parse::<BigUint>()
                        .with_context(|| format!("--states {text:?} is not an integer"))?,
                ),
                (None, Some(k)) => StateCount::FactorialOf(k),
                _ => bail!("give exactly one of --states or --states-factorial"),
            };
            let degree = match (&args.degree, args.degree_log2) {
                (Some(text), None) => Degree::Exact(
                    text.parse::<BigUint>()
                        .with_context(|| format!("--degree {text:?} is not an integer"))?,
                ),
                (None, Some(x)) => Degree::Log2(x),
                _ => bail!("give exactly one of --degree or --degree-log2"),
            };
            let input = DiameterBoundInput { state_count, degree, epsilon: args.epsilon };
            let d = diameter_bound(&input)?;
            serde_json::json!({ "epsilon": args.epsilon, "diameter": d })
        }
        BoundsCmd::Chain(args) => {
            let bound = diameter_bound_chain(args.n, args.r, args.epsilon)?;
            serde_json::json!({
                "n": args.n,
                "r": args.r,
                "epsilon": args.epsilon,
                "bound": bound,
            })
        }
        BoundsCmd::LayerEntropy(args) => {
            let matchings = count_layer_matchings(args.n as usize)?;
            serde_json::json!({
                "n": args.n,
                "layer_matchings": matchings.to_string(),
                "delta_s_layer": delta_s_layer(args.n)?,
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let seed = resolve_seed(args.seed)?;
    if args.graph.is_some() && args.family.family.is_some() {
        bail!("--graph and --family are alternatives, not companions");
    }
    let g = match &args.graph {
        Some(path) => load_graph(path)?,
        None => build_family(&args.family, seed)?,
    };
    let n = g.vertex_count();

    let transitions_in_reach = n <= 12 && g.regular_degree().is_some();
    let emulation_in_reach = n <= if args.allow_n7 { 7 } else { 6 };
    let depth_in_reach = n <= 5 && n % 2 == 0 && args.m.min(4) >= 1;
    if !transitions_in_reach && !emulation_in_reach && !depth_in_reach {
        bail!("n = {n} is beyond every oracle cap (transitions 12, placements 6, depth 5)");
    }

    let mut all_pass = true;
    let mut report = serde_json::Map::new();
    report.insert("n".into(), n.into());

    if transitions_in_reach {
        let bounds = verify_transition_bounds(&g)?;
        all_pass &= bounds.pass;
        report.insert("transition_bounds".into(), serde_json::to_value(&bounds)?);
    }
    if emulation_in_reach {
        let emu = emulation_complexity(&g, args.allow_n7)?;
        report.insert("emulation".into(), serde_json::to_value(&emu)?);
    }
    if depth_in_reach {
        let m = args.m.min(4);
        let c = generate_full_layer_circuit(n, m, seed)?;
        let routed = route_greedy(&g, &c, seed)?;
        let optimum = optimal_routed_depth(&g, &c)?;
        let greedy_depth = routed.schedule.depth();
        // Full layers chain every qubit's gates, so even the optimum pays
        // at least one step per layer.
        let pass = greedy_depth >= optimum.depth && optimum.depth >= m;
        all_pass &= pass;
        report.insert(
            "depth_comparison".into(),
            serde_json::json!({
                "layers": m,
                "greedy_depth": greedy_depth,
                "optimal_depth": optimum.depth,
                "pass": pass,
            }),
        );
    }
    report.insert("pass".into(), all_pass.into());
    println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(report))?);
    Ok(if all_pass { 0 } else { 1 })
}

struct ScalingRow {
    n: usize,
    m: usize,
    r: usize,
    seed: u64,
    router: &'static str,
    depth: usize,
    overhead: f64,
    overhead_per_log2n: f64,
    ns_lower: f64,
}

fn scaling_row(k: u32, r: usize, m: usize, seed: u64, router: RouterKind) -> Result<ScalingRow> {
    let g = build_modified_butterfly(k, r, seed)?;
    let n = g.vertex_count();
    let c = generate_full_layer_circuit(n, m, seed)?;
    let result = router.run(&g, &c, seed)?;
    let violations = verify_schedule(&g, &c, &result.schedule);
    if !violations.is_empty() {
        bail!(
            "k={k} seed={seed} router={}: schedule invalid: {violations:?}",
            router.name()
        );
    }
    let depth = result.schedule.depth();
    let overhead = depth as f64 / m as f64;
    Ok(ScalingRow {
        n,
        m,
        r,
        seed,
        router: router.name(),
        depth,
        overhead,
        overhead_per_log2n: overhead / (n as f64).log2(),
        ns_lower: ns_lower_bound(n as u64, m as u64, r as u64)?.ns_lower,
    })
}

fn cmd_scaling(args: ScalingArgs) -> Result<u8> {
    if args.seeds.is_empty() {
        bail!("no seeds given");
    }
    if args.ks.is_empty() {
        bail!("no butterfly levels given");
    }
    let mut jobs = Vec::new();
    for &k in &args.ks {
        for &seed in &args.seeds {
            for router in args.router.expand() {
                jobs.push((k, seed, router));
            }
        }
    }

    let results: Vec<Result<ScalingRow>> = jobs
        .par_iter()
        .map(|&(k, seed, router)| scaling_row(k, args.r, args.m, seed, router))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failed = false;
    for result in results {
        match result {
            Ok(row) => rows.push(row),
            Err(err) => {
                failed = true;
                eprintln!("error: {err:#}");
            }
        }
    }
    if failed {
        return Ok(1);
    }
    rows.sort_by(|a, b| (a.n, a.seed, a.router).cmp(&(b.n, b.seed, b.router)));

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "n",
        "m",
        "r",
        "seed",
        "router",
        "depth",
        "overhead",
        "overhead_per_log2n",
        "ns_lower",
    ])?;
    for row in &rows {
        writer.write_record([
            row.n.to_string(),
            row.m.to_string(),
            row.r.to_string(),
            row.seed.to_string(),
            row.router.to_string(),
            row.depth.to_string(),
            format!("{:.6}", row.overhead),
            format!("{:.6}", row.overhead_per_log2n),
            format!("{:.6}", row.ns_lower),
        ])?;
    }
    let text = String::from_utf8(writer.into_inner()?)?;
    write_out(&args.out, &text)?;
    Ok(0)
}
