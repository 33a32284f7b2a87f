use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use embcoarse::bench::{
    emit_report, generate_mixture, run_trials, Comparison, ComponentSpec, MixtureSpec, TrialPlan,
    DEFAULT_TRIALS,
};
use embcoarse::coarsening::{CoarseningMode, Scorer};
use embcoarse::embedding::{
    embed_hypergraph, load_embedding, write_embedding, EmbeddingMethod, EmbeddingTable,
    TrainConfig, DEFAULT_DIMS,
};
use embcoarse::hypergraph::{
    load_hmetis, load_matrix_market, write_hmetis, write_matrix_market, MatrixOrientation,
};
use embcoarse::partition::write_partition;
use embcoarse::{partition, Error, Hypergraph, Objective, PartitionMode, VCycleConfig};

#[derive(Parser, Debug)]
#[command(
    name = "embcoarse",
    version,
    about = "Multilevel hypergraph partitioning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert between hMetis and MatrixMarket files.
    Convert(ConvertArgs),
    /// Train node embeddings on the star expansion of a hypergraph.
    Embed(EmbedArgs),
    /// Partition a hypergraph into k parts.
    Partition(PartitionArgs),
    /// Partition into k = 2^m parts by recursive bisection.
    Bisect(BisectArgs),
    /// Run seeded trial batches and compare coarseners.
    Bench(BenchArgs),
    /// Generate a mixture hypergraph and a JSON sidecar of its parameters.
    GenMixture(GenMixtureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Hgr,
    Mtx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Cut,
    Km1,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Cut => Objective::Cut,
            ObjectiveArg::Km1 => Objective::Connectivity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Coarsener {
    HeavyEdge,
    Embedding,
}

impl From<Coarsener> for Scorer {
    fn from(c: Coarsener) -> Self {
        match c {
            Coarsener::HeavyEdge => Scorer::HeavyEdge,
            Coarsener::Embedding => Scorer::Embedding,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Logn,
    Nlevel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fobe,
    Hobe,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Hypergraph file; `.mtx` files are read as MatrixMarket.
    #[arg(long)]
    hypergraph: PathBuf,
    /// Read MatrixMarket columns as nodes instead of rows.
    #[arg(long)]
    transpose: bool,
}

impl InputArgs {
    fn load(&self) -> Result<Hypergraph, Error> {
        load_input(&self.hypergraph, self.transpose)
    }
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    from: Format,
    #[arg(long, value_enum)]
    to: Format,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// MatrixMarket columns are nodes (rows are nodes by default).
    #[arg(long)]
    transpose: bool,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "hobe")]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_DIMS)]
    dims: usize,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VCycleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "km1")]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "heavy-edge")]
    coarsener: Coarsener,
    /// Embedding file, required by the embedding coarsener.
    #[arg(long, required_if_eq("coarsener", "embedding"))]
    embedding: Option<PathBuf>,
    #[arg(long, default_value_t = 0.03)]
    imbalance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "logn")]
    mode: ModeArg,
    /// Initial partitioning attempts on the coarsest level.
    #[arg(long, default_value_t = 10)]
    attempts: usize,
    /// Partition file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include phase timings in the report (makes it run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[command(flatten)]
    common: VCycleArgs,
    /// Direct k-way partitioning (default).
    #[arg(long, conflicts_with = "rb")]
    kway: bool,
    /// Recursive bisection.
    #[arg(long)]
    rb: bool,
}

#[derive(Args, Debug)]
struct BisectArgs {
    #[command(flatten)]
    common: VCycleArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Hypergraph files; repeat for several graphs.
    #[arg(long = "hypergraph", required = true)]
    hypergraphs: Vec<PathBuf>,
    /// Embedding files, one per hypergraph in the same order.
    #[arg(long = "embedding")]
    embeddings: Vec<PathBuf>,
    #[arg(long)]
    transpose: bool,
    /// Part counts; repeat for several.
    #[arg(long = "k", required = true)]
    ks: Vec<usize>,
    #[arg(long, value_enum, default_value = "km1")]
    objective: ObjectiveArg,
    /// Coarseners to run; the first is compared against each of the others.
    #[arg(long = "coarsener", value_enum, default_values = ["embedding", "heavy-edge"])]
    coarseners: Vec<Coarsener>,
    #[arg(long, default_value_t = 0.03)]
    imbalance: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "logn")]
    mode: ModeArg,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Record wall-clock runtimes (otherwise written as 0).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    json: PathBuf,
}

#[derive(Args, Debug)]
struct GenMixtureArgs {
    /// Components as NODES:EDGES:MEAN_EDGE_SIZE, comma separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_component)]
    components: Vec<ComponentSpec>,
    #[arg(long, default_value_t = 0.005)]
    cross: f64,
    #[arg(long, default_value_t = 0.005)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Parameter sidecar; defaults to the output path with a `.json` extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

fn parse_component(s: &str) -> Result<ComponentSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected NODES:EDGES:MEAN_EDGE_SIZE, got {s:?}"));
    }
    Ok(ComponentSpec {
        nodes: parts[0]
            .parse()
            .map_err(|e| format!("bad node count: {e}"))?,
        edges: parts[1]
            .parse()
            .map_err(|e| format!("bad edge count: {e}"))?,
        mean_edge_size: parts[2]
            .parse()
            .map_err(|e| format!("bad mean edge size: {e}"))?,
    })
}

fn orientation(transpose: bool) -> MatrixOrientation {
    if transpose {
        MatrixOrientation::ColumnsAreNodes
    } else {
        MatrixOrientation::RowsAreNodes
    }
}

fn load_input(path: &Path, transpose: bool) -> Result<Hypergraph, Error> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"))
    {
        load_matrix_market(path, orientation(transpose))
    } else {
        load_hmetis(path)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn graph_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn convert(a: &ConvertArgs) -> Result<(), Error> {
    let h = match a.from {
        Format::Hgr => load_hmetis(&a.input)?,
        Format::Mtx => load_matrix_market(&a.input, orientation(a.transpose))?,
    };
    let text = match a.to {
        Format::Hgr => write_hmetis(&h),
        Format::Mtx => write_matrix_market(&h, orientation(a.transpose)),
    };
    write_file(&a.out, &text)
}

fn embed(a: &EmbedArgs) -> Result<(), Error> {
    let h = a.input.load()?;
    let method = match a.method {
        MethodArg::Fobe => EmbeddingMethod::Fobe,
        MethodArg::Hobe => EmbeddingMethod::hobe(),
    };
    let cfg = TrainConfig {
        dims: a.dims,
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        seed: a.seed,
        ..TrainConfig::default()
    };
    let eps = embed_hypergraph(&h, method, &cfg)?;
    write_file(&a.out, &write_embedding(&eps))
}

fn coarsening_mode(m: ModeArg) -> CoarseningMode {
    match m {
        ModeArg::Logn => CoarseningMode::LogN,
        ModeArg::Nlevel => CoarseningMode::NLevel,
    }
}

fn run_vcycle(a: &VCycleArgs, mode: PartitionMode) -> Result<(), Error> {
    let h = a.input.load()?;
    let eps = match (&a.embedding, a.coarsener) {
        (Some(path), Coarsener::Embedding) => Some(load_embedding(path)?),
        _ => None,
    };
    let mut cfg = VCycleConfig::new(a.k, a.objective.into());
    cfg.alpha = a.imbalance;
    cfg.seed = a.seed;
    cfg.mode = mode;
    cfg.coarsening.scorer = a.coarsener.into();
    cfg.coarsening.mode = coarsening_mode(a.mode);
    cfg.initial.attempts = a.attempts;
    let report = partition(&h, eps.as_ref(), &cfg)?;
    let text = write_partition(&report.assignment);
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.report {
        write_file(path, &report.to_json(a.timings))?;
    }
    eprintln!(
        "{} = {}, imbalance = {:.4}, feasible = {}",
        cfg.objective, report.objective_value, report.imbalance, report.feasible
    );
    Ok(())
}

fn coarsener_name(c: Coarsener) -> &'static str {
    match c {
        Coarsener::HeavyEdge => "heavy-edge",
        Coarsener::Embedding => "embedding",
    }
}

fn bench(a: &BenchArgs) -> Result<(), Error> {
    let wants_embedding = a.coarseners.contains(&Coarsener::Embedding);
    if wants_embedding && a.embeddings.len() != a.hypergraphs.len() {
        return Err(Error::Config(format!(
            "the embedding coarsener needs one --embedding per --hypergraph ({} given for {})",
            a.embeddings.len(),
            a.hypergraphs.len()
        )));
    }
    let mut records = Vec::new();
    for (gi, path) in a.hypergraphs.iter().enumerate() {
        let h = load_input(path, a.transpose)?;
        let eps: Option<EmbeddingTable> = if wants_embedding {
            Some(load_embedding(&a.embeddings[gi])?)
        } else {
            None
        };
        for &k in &a.ks {
            for &c in &a.coarseners {
                let mut cfg = VCycleConfig::new(k, a.objective.into());
                cfg.alpha = a.imbalance;
                cfg.coarsening.scorer = c.into();
                cfg.coarsening.mode = coarsening_mode(a.mode);
                let mut plan = TrialPlan::new(graph_id(path), coarsener_name(c), a.seed);
                plan.trials = a.trials;
                plan.jobs = a.jobs;
                plan.record_runtime = a.timings;
                records.extend(run_trials(&h, eps.as_ref(), &cfg, &plan)?);
            }
        }
    }
    let comparisons: Vec<Comparison> = a
        .coarseners
        .iter()
        .skip(1)
        .map(|&b| Comparison::new(coarsener_name(a.coarseners[0]), coarsener_name(b)))
        .collect();
    let (csv, json) = emit_report(&records, &comparisons)?;
    write_file(&a.csv, &csv)?;
    write_file(&a.json, &json)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    generator: &'a MixtureSpec,
    nodes: usize,
    edges: usize,
    cross_edges: usize,
    noise_edges: usize,
    /// Component of every node, by node id.
    component: &'a [usize],
}

fn gen_mixture(a: &GenMixtureArgs) -> Result<(), Error> {
    let spec = MixtureSpec {
        components: a.components.clone(),
        cross_fraction: a.cross,
        noise_fraction: a.noise,
        seed: a.seed,
    };
    let m = generate_mixture(&spec)?;
    write_file(&a.out, &write_hmetis(&m.hypergraph))?;
    let sidecar = a
        .sidecar
        .clone()
        .unwrap_or_else(|| a.out.with_extension("json"));
    let doc = Sidecar {
        generator: &spec,
        nodes: m.hypergraph.num_nodes(),
        edges: m.hypergraph.num_edges(),
        cross_edges: m.cross_edges,
        noise_edges: m.noise_edges,
        component: &m.component,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_file(&sidecar, &text)
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Convert(a) => convert(a),
        Command::Embed(a) => embed(a),
        Command::Partition(a) => {
            let mode = if a.rb {
                PartitionMode::RecursiveBisection
            } else {
                PartitionMode::DirectKway
            };
            run_vcycle(&a.common, mode)
        }
        Command::Bisect(a) => run_vcycle(&a.common, PartitionMode::RecursiveBisection),
        Command::Bench(a) => bench(a),
        Command::GenMixture(a) => gen_mixture(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
