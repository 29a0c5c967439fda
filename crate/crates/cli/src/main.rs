use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use treespile::anneal::AnnealCost;
use treespile::circuit::{compile_ansatz, peephole_cancel_tagged, CompileMode};
use treespile::cost::{compiled_cost, pauli_cost, Connectivity, CostBreakdown};
use treespile::enumerate;
use treespile::fermion::{FermionicAnsatz, HamiltonianSpec, MajoranaPoly};
use treespile::mapping::{jw_tree, Braid, MappingTree};
use treespile::{AnnealConfig, HardwareGraph, SearchMode};

mod report;
mod verify;

use report::{emit_json, with_manifest, write_json, RunManifest};
use verify::Suite;

const BUNDLED_ANSATZ: &str = include_str!("../../core/data/ansatz_4.json");
const BUNDLED_HAMILTONIAN: &str = include_str!("../../core/data/hamiltonian_4.json");

#[derive(Parser)]
#[command(name = "treespile", version, about = "Fermion-to-qubit mapping search and compilation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a low-cost mapping and write mapping, cost report and trace.
    Treespile(TreespileArgs),
    /// Compile an ansatz under a mapping to OpenQASM.
    Compile(CompileArgs),
    /// Report the CNOT cost of an ansatz under a mapping.
    Cost(CostArgs),
    /// Check mappings against the dense simulator.
    Verify(VerifyArgs),
    /// Count or explore small mapping spaces exhaustively.
    Enumerate(EnumerateArgs),
    /// Emit a preset device graph as JSON.
    Hardware(HardwareArgs),
}

#[derive(Args)]
struct TreespileArgs {
    #[arg(long)]
    ansatz: Option<PathBuf>,
    /// complete:Q | line:Q | heavy_hex:Q | grid:RxC | file:path
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SearchMode>,
    #[arg(long, value_parser = parse_cost)]
    cost: Option<AnnealCost>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    cooling_factor: Option<f64>,
    #[arg(long)]
    initial_temp: Option<f64>,
    /// Allow braid flips; defaults to on only for Majoranic generators.
    #[arg(long)]
    braiding: Option<bool>,
    /// Start mapping instead of the mode's default.
    #[arg(long)]
    start: Option<PathBuf>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Config-file form of [`TreespileArgs`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreespileFile {
    ansatz: Option<PathBuf>,
    graph: Option<String>,
    search_mode: Option<SearchMode>,
    cost_kind: Option<AnnealCost>,
    seed: Option<u64>,
    iterations: Option<u64>,
    restarts: Option<usize>,
    cooling_factor: Option<f64>,
    initial_temp: Option<f64>,
    enable_braiding: Option<bool>,
    start: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<SearchMode, String> {
    s.parse().map_err(|e: treespile::anneal::AnnealError| e.to_string())
}

fn parse_cost(s: &str) -> Result<AnnealCost, String> {
    s.parse().map_err(|e: treespile::anneal::AnnealError| e.to_string())
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    ansatz: PathBuf,
    #[arg(long)]
    mapping: PathBuf,
    #[arg(long)]
    graph: String,
    /// QASM output path.
    #[arg(long)]
    qasm: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    no_peephole: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostChoice {
    PauliFc,
    PauliLc,
    Compiled,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    ansatz: PathBuf,
    #[arg(long)]
    mapping: PathBuf,
    #[arg(long)]
    graph: String,
    #[arg(long, value_enum, default_value = "pauli-lc")]
    kind: CostChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Defaults to the bundled 4-mode ansatz.
    #[arg(long)]
    ansatz: Option<PathBuf>,
    /// Mapping files; defaults to JW and fully braided JW.
    #[arg(long)]
    mapping: Vec<PathBuf>,
    /// Majorana-form Hamiltonian for the energy suite.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Device for the circuit suite; complete graph on the mapping's qubits otherwise.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "vacuum,energy,circuit")]
    suites: Vec<Suite>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Task {
    Count,
    Reachability,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n_modes: usize,
    #[arg(long)]
    graph: String,
    #[arg(long, value_enum, default_value = "count")]
    task: Task,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HardwareArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_ansatz(path: &Path) -> Result<FermionicAnsatz> {
    FermionicAnsatz::from_json(&read(path)?).with_context(|| format!("ansatz {}", path.display()))
}

fn load_mapping(path: &Path) -> Result<MappingTree> {
    MappingTree::from_json(&read(path)?).with_context(|| format!("mapping {}", path.display()))
}

fn load_graph(spec: &str) -> Result<HardwareGraph> {
    HardwareGraph::from_spec(spec).with_context(|| format!("graph {spec}"))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn check_sizes(a: &FermionicAnsatz, m: &MappingTree, g: &HardwareGraph) -> Result<()> {
    if m.n_modes() != a.n_modes {
        bail!("mapping has {} modes but ansatz has {}", m.n_modes(), a.n_modes);
    }
    m.check_fits_width(g.n_vertices())?;
    Ok(())
}

/// Cost of `m` as seen by the search in `mode`.
fn search_cost(
    a: &FermionicAnsatz,
    m: &MappingTree,
    g: &HardwareGraph,
    mode: SearchMode,
    kind: AnnealCost,
) -> Result<CostBreakdown> {
    let (g, conn) = match mode {
        SearchMode::Free => (HardwareGraph::complete(g.n_vertices())?, Connectivity::Full),
        _ => (g.clone(), Connectivity::Limited),
    };
    Ok(match kind {
        AnnealCost::Pauli => pauli_cost(&m.map_ansatz(a)?, &g, m, conn)?,
        AnnealCost::Compiled => compiled_cost(a, m, &g)?,
    })
}

fn cmd_treespile(args: TreespileArgs) -> Result<Value> {
    let file: TreespileFile = match &args.config {
        Some(p) => serde_json::from_str(&read(p)?).with_context(|| format!("config {}", p.display()))?,
        None => TreespileFile::default(),
    };
    let ansatz_path = args.ansatz.or(file.ansatz).context("missing --ansatz")?;
    let graph_spec = args.graph.or(file.graph).context("missing --graph")?;
    let a = load_ansatz(&ansatz_path)?;
    let g = load_graph(&graph_spec)?;
    let defaults = AnnealConfig::default();
    let majoranic = a.generators.iter().any(|g| g.kind.is_majoranic());
    let cfg = AnnealConfig {
        iterations: args.iterations.or(file.iterations).unwrap_or(defaults.iterations),
        initial_temp: args.initial_temp.or(file.initial_temp),
        cooling_factor: args.cooling_factor.or(file.cooling_factor).unwrap_or(defaults.cooling_factor),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        restarts: args.restarts.or(file.restarts).unwrap_or(defaults.restarts),
        search_mode: args.mode.or(file.search_mode).unwrap_or(defaults.search_mode),
        cost_kind: args.cost.or(file.cost_kind).unwrap_or(defaults.cost_kind),
        enable_braiding: args.braiding.or(file.enable_braiding).unwrap_or(majoranic),
    };
    cfg.validate()?;
    let start_path = args.start.or(file.start);
    let out_dir = args.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("."));

    let result = match &start_path {
        Some(p) => treespile::anneal::treespile_from(&a, &g, &cfg, &load_mapping(p)?)?,
        None => treespile::treespile(&a, &g, &cfg)?,
    };
    let breakdown = search_cost(&a, &result.best_mapping, &g, cfg.search_mode, cfg.cost_kind)?;

    let mut manifest = RunManifest::new("treespile")
        .input("ansatz", display(&ansatz_path))
        .input("graph", graph_spec.clone())
        .config(&cfg)
        .seed(cfg.seed);
    if let Some(p) = &args.config {
        manifest = manifest.input("config", display(p));
    }
    if let Some(p) = &start_path {
        manifest = manifest.input("start", display(p));
    }

    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mapping_path = out_dir.join("mapping.json");
    let cost_path = out_dir.join("cost.json");
    let trace_path = out_dir.join("trace.csv");

    let mapping: Value = serde_json::from_str(&result.best_mapping.to_json())?;
    write_json(&mapping_path, &with_manifest(&manifest, mapping))?;

    let mut csv = String::from("iteration,cost\n");
    for (it, c) in &result.cost_trace {
        writeln!(csv, "{it},{c}").expect("writing to a string");
    }
    std::fs::write(&trace_path, csv).with_context(|| format!("writing {}", trace_path.display()))?;

    let body = json!({
        "cost": breakdown,
        "initial_cost": result.initial_cost,
        "best_cost": result.best_cost,
        "best_restart": result.best_restart,
        "accepted_moves": result.accepted_moves,
        "mapping_file": "mapping.json",
        "trace_file": "trace.csv",
    });
    write_json(&cost_path, &with_manifest(&manifest, body))?;

    Ok(json!({
        "initial_cost": result.initial_cost,
        "best_cost": result.best_cost,
        "mapping": display(&mapping_path),
        "cost_report": display(&cost_path),
        "trace": display(&trace_path),
    }))
}

fn cmd_compile(args: CompileArgs) -> Result<Value> {
    let a = load_ansatz(&args.ansatz)?;
    let m = load_mapping(&args.mapping)?;
    let g = load_graph(&args.graph)?;
    check_sizes(&a, &m, &g)?;
    let mode = if m.is_subgraph_of(&g) { CompileMode::Cp } else { CompileMode::General };
    let mapped = m.map_ansatz(&a)?;
    let raw = compile_ansatz(&mapped, &a.reference_occupations, &m, &g, mode)?;
    let out = if args.no_peephole { raw.clone() } else { peephole_cancel_tagged(&raw) };
    out.circuit.check_edges(&g)?;

    let manifest = RunManifest::new("compile")
        .input("ansatz", display(&args.ansatz))
        .input("mapping", display(&args.mapping))
        .input("graph", args.graph.clone())
        .config(json!({ "peephole": !args.no_peephole }));
    let body = json!({
        "cnots": out.circuit.cnot_count(),
        "cnots_before_peephole": raw.circuit.cnot_count(),
        "per_generator": out.cnots_per_generator(mapped.len()),
        "gates": out.circuit.len(),
        "n_qubits": g.n_vertices(),
        "compile_mode": match mode {
            CompileMode::Cp => "cp",
            CompileMode::General => "general",
        },
        "on_edge": true,
        "qasm_file": display(&args.qasm),
    });
    let report = with_manifest(&manifest, body);
    let qasm = format!(
        "// treespile {} compile\n// content_hash {}\n{}",
        env!("CARGO_PKG_VERSION"),
        report["content_hash"].as_str().expect("hash is a string"),
        out.circuit.to_qasm()
    );
    std::fs::write(&args.qasm, qasm).with_context(|| format!("writing {}", args.qasm.display()))?;
    emit_json(args.report.as_deref(), &report)?;
    Ok(Value::Null)
}

fn cmd_cost(args: CostArgs) -> Result<Value> {
    let a = load_ansatz(&args.ansatz)?;
    let m = load_mapping(&args.mapping)?;
    let g = load_graph(&args.graph)?;
    check_sizes(&a, &m, &g)?;
    let breakdown = match args.kind {
        CostChoice::PauliFc => pauli_cost(&m.map_ansatz(&a)?, &g, &m, Connectivity::Full)?,
        CostChoice::PauliLc => pauli_cost(&m.map_ansatz(&a)?, &g, &m, Connectivity::Limited)?,
        CostChoice::Compiled => compiled_cost(&a, &m, &g)?,
    };
    let manifest = RunManifest::new("cost")
        .input("ansatz", display(&args.ansatz))
        .input("mapping", display(&args.mapping))
        .input("graph", args.graph.clone());
    emit_json(args.out.as_deref(), &with_manifest(&manifest, breakdown))?;
    Ok(Value::Null)
}

fn cmd_verify(args: VerifyArgs) -> Result<Value> {
    let (a, ansatz_label) = match &args.ansatz {
        Some(p) => (load_ansatz(p)?, display(p)),
        None => (FermionicAnsatz::from_json(BUNDLED_ANSATZ)?, "bundled:ansatz_4".to_string()),
    };
    let (h, ham_label): (MajoranaPoly, String) = match &args.hamiltonian {
        Some(p) => {
            let spec = HamiltonianSpec::from_json(&read(p)?).with_context(|| format!("hamiltonian {}", p.display()))?;
            if spec.n_modes != a.n_modes {
                bail!("hamiltonian has {} modes but ansatz has {}", spec.n_modes, a.n_modes);
            }
            (MajoranaPoly::from_monomials(spec.terms), display(p))
        }
        None if args.ansatz.is_none() => (
            MajoranaPoly::from_monomials(HamiltonianSpec::from_json(BUNDLED_HAMILTONIAN)?.terms),
            "bundled:hamiltonian_4".to_string(),
        ),
        None => (verify::chain_hamiltonian(a.n_modes), "chain".to_string()),
    };
    let mappings: Vec<(String, MappingTree)> = if args.mapping.is_empty() {
        let jw = jw_tree(a.n_modes)?;
        let mut braided = jw.clone();
        braided.nodes.iter_mut().for_each(|n| n.braid = Braid::Minus);
        vec![("jw".to_string(), jw), ("jw_braided".to_string(), braided)]
    } else {
        args.mapping
            .iter()
            .map(|p| Ok((display(p), load_mapping(p)?)))
            .collect::<Result<_>>()?
    };
    let graph = args.graph.as_deref().map(load_graph).transpose()?;
    let report = verify::run(&a, &h, &mappings, graph.as_ref(), &args.suites)?;
    let passed = report.passed;

    let mut manifest = RunManifest::new("verify")
        .input("ansatz", ansatz_label)
        .input("hamiltonian", ham_label)
        .config(json!({ "suites": args.suites }));
    for (i, (label, _)) in mappings.iter().enumerate() {
        manifest = manifest.input(&format!("mapping_{i}"), label.clone());
    }
    if let Some(spec) = &args.graph {
        manifest = manifest.input("graph", spec.clone());
    }
    emit_json(args.out.as_deref(), &with_manifest(&manifest, report))?;
    if !passed {
        bail!("verification failed");
    }
    Ok(Value::Null)
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<Value> {
    let g = load_graph(&args.graph)?;
    let body = match args.task {
        Task::Count => serde_json::to_value(enumerate::count(&g, args.n_modes)?)?,
        Task::Reachability => serde_json::to_value(enumerate::reachability(&g, args.n_modes)?)?,
    };
    let manifest = RunManifest::new("enumerate")
        .input("graph", args.graph.clone())
        .config(json!({ "n_modes": args.n_modes, "task": args.task }));
    emit_json(args.out.as_deref(), &with_manifest(&manifest, body))?;
    Ok(Value::Null)
}

fn cmd_hardware(args: HardwareArgs) -> Result<Value> {
    let g = load_graph(&args.graph)?;
    let mut body: Value = serde_json::from_str(&g.to_json())?;
    body["max_degree"] = json!(g.max_degree());
    body["n_edges"] = json!(g.n_edges());
    let manifest = RunManifest::new("hardware").input("graph", args.graph.clone());
    emit_json(args.out.as_deref(), &with_manifest(&manifest, body))?;
    Ok(Value::Null)
}

fn run(cli: Cli) -> Result<()> {
    let summary = match cli.command {
        Command::Treespile(a) => cmd_treespile(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Cost(a) => cmd_cost(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Hardware(a) => cmd_hardware(a),
    }?;
    if !summary.is_null() {
        writeln!(std::io::stdout().lock(), "{summary}").context("writing to stdout")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", json!({ "error": format!("{e:#}"), "causes": chain }));
            ExitCode::FAILURE
        }
    }
}
