//! `wormnet`: generate data, simulate, verify the compiled network, train and
//! report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wormnet::compiler::{
    build_global_network, large_lower_bound, verify_network, CompileOptions, VerifyMode,
    DEFAULT_LARGE,
};
use wormnet::cvnn::{parse_checkpoint, write_checkpoint, NetworkSpec};
use wormnet::datagen::{
    gen_er_graph, gen_sample_pool, load_sensor_graph, parse_sensor_graph, sample_model_params,
    split_pool, SensorRule, SENSOR54,
};
use wormnet::experiment::{run_repeated, summarize, RunResult, Setting};
use wormnet::io::{graph_id, parse_graph, parse_pool, parse_states, write_graph, write_pool, write_trace};
use wormnet::learning::{evaluate, history_csv, random_baseline, train, InitScheme, Metrics, TrainConfig};
use wormnet::propagation::DEFAULT_ORACLE_CAP;
use wormnet::{propagate, Topology, WsnGraph};

#[derive(Parser)]
#[command(name = "wormnet", version, about = "Worm propagation on sensor networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample parameters on a topology and write the graph and a sample pool.
    Generate(GenerateArgs),
    /// Propagate the states in a state file to their fixed points.
    Simulate(SimulateArgs),
    /// Compare the compiled network with the simulator.
    CompileVerify(VerifyArgs),
    /// Fit parameters on the training split of a pool.
    Train(TrainArgs),
    /// Score learned parameters on a pool.
    Eval(EvalArgs),
    /// Repeated runs, worm-count sweep and seed-count sweep.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct TopologyArgs {
    /// Directed Erdős–Rényi graph with N nodes and edge probability P.
    #[arg(long, num_args = 2, value_names = ["N", "P"], conflicts_with_all = ["sensor_file", "sensor54"])]
    er: Option<Vec<String>>,
    /// Sensor file (`wsn-sensors 1 N`, `pos`/`link` records).
    #[arg(long, conflicts_with = "sensor54")]
    sensor_file: Option<PathBuf>,
    /// Use the bundled 54-sensor deployment.
    #[arg(long)]
    sensor54: bool,
    /// Connect sensors within this distance instead of using `link` records.
    #[arg(long)]
    radius: Option<f64>,
}

impl TopologyArgs {
    fn build(&self, seed: u64) -> Result<Topology> {
        let rule = match self.radius {
            Some(radius) => SensorRule::Distance { radius },
            None => SensorRule::EdgeList,
        };
        if let Some(er) = &self.er {
            let n: usize = er[0].parse().context("--er N must be a positive integer")?;
            let p: f64 = er[1].parse().context("--er P must be a probability")?;
            return Ok(gen_er_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed))?);
        }
        let sensors = match (&self.sensor_file, self.sensor54) {
            (Some(path), _) => load_sensor_graph(path, rule)
                .with_context(|| format!("loading {}", path.display()))?,
            (None, true) => parse_sensor_graph(SENSOR54, rule)?,
            (None, false) => bail!("give one of --er N P, --sensor-file PATH or --sensor54"),
        };
        if sensors.components > 1 {
            eprintln!("note: sensor graph has {} weakly connected components", sensors.components);
        }
        Ok(sensors.topology)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    topology: TopologyArgs,
    #[arg(long, default_value_t = 4)]
    worms: usize,
    /// Number of sample pairs.
    #[arg(long, default_value_t = 1000)]
    pool: usize,
    /// Infected nodes per initial state.
    #[arg(long)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    states: PathBuf,
    /// Print every intermediate state.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph whose simulator is the reference.
    #[arg(long)]
    graph: PathBuf,
    /// Compile from this graph file's parameters instead.
    #[arg(long, conflicts_with = "network")]
    params: Option<PathBuf>,
    /// Verify this network checkpoint instead of compiling one.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Write the compiled network here.
    #[arg(long)]
    save_network: Option<PathBuf>,
    /// Check every initial state.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, ValueEnum)]
enum Init {
    Prior,
    Uniform,
}

#[derive(Args, Clone)]
struct TrainFlags {
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 2.0)]
    tau_start: f64,
    #[arg(long, default_value_t = 20.0)]
    tau_end: f64,
    /// Blocks unrolled during training.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Init::Prior)]
    init: Init,
}

impl TrainFlags {
    fn config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.lr,
            epochs: self.epochs,
            batch_size: self.batch,
            tau_start: self.tau_start,
            tau_end: self.tau_end,
            unroll_depth: Some(self.depth),
            init: match self.init {
                Init::Prior => InitScheme::PaperPrior,
                Init::Uniform => InitScheme::Uniform01,
            },
            ..TrainConfig::tuned(seed)
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pool: PathBuf,
    #[arg(long, default_value_t = 600)]
    train: usize,
    #[arg(long, default_value_t = 400)]
    test: usize,
    #[command(flatten)]
    flags: TrainFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Graph the pool was generated from.
    #[arg(long)]
    graph: PathBuf,
    /// Graph file carrying the parameters to score.
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    pool: PathBuf,
    /// Score only the test split drawn as in `train`.
    #[arg(long, requires = "test")]
    train: Option<usize>,
    #[arg(long, requires = "train")]
    test: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    topology: TopologyArgs,
    #[arg(long, default_value_t = 4)]
    worms: usize,
    /// Seeds per initial state; defaults to a quarter of the nodes.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pool: usize,
    #[arg(long, default_value_t = 600)]
    train: usize,
    #[arg(long, default_value_t = 400)]
    test: usize,
    /// Repeated simulations per setting.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[command(flatten)]
    flags: TrainFlags,
    /// Skip the worm-count and seed-count sweeps.
    #[arg(long)]
    no_sweep: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the CSV tables here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_graph(path: &Path) -> Result<WsnGraph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn labels(l: &[usize]) -> String {
    let parts: Vec<String> = l.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let topo = a.topology.build(a.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(1);
    let params = sample_model_params(&topo, a.worms, &mut rng)?;
    let graph = WsnGraph::new(topo, params)?;
    let pool = gen_sample_pool(&graph, a.pool, a.seeds, a.seed)?;
    write(&a.out.join("graph.txt"), &write_graph(&graph))?;
    write(&a.out.join("pool.txt"), &write_pool(&pool))?;
    println!(
        "graph {} nodes, {} edges, {} worms, id {}",
        graph.node_count(),
        graph.edge_count(),
        graph.worm_count(),
        pool.graph_id
    );
    let mean_final: f64 = pool.pairs.iter().map(|p| p.final_state.infected_count() as f64).sum::<f64>()
        / pool.len().max(1) as f64;
    println!(
        "pool {} pairs, {} seeds, mean infected at convergence {mean_final:.2}",
        pool.len(),
        a.seeds
    );
    println!("wrote {} and {}", a.out.join("graph.txt").display(), a.out.join("pool.txt").display());
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let graph = load_graph(&a.graph)?;
    let (k, states) = parse_states(&read(&a.states)?)?;
    if k != graph.worm_count() {
        bail!("state file has {k} worms, graph has {}", graph.worm_count());
    }
    for s in &states {
        let (f, trace) = propagate(&graph, s)?;
        if a.trace {
            print!("{}", write_trace(&trace, k));
        }
        println!("final {} after {} steps", labels(f.labels()), trace.converged_at);
    }
    Ok(())
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let graph = load_graph(&a.graph)?;
    let net: NetworkSpec = match (&a.network, &a.params) {
        (Some(path), _) => parse_checkpoint(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
        (None, source) => {
            let from = match source {
                Some(p) => {
                    let g = load_graph(p)?;
                    if g.topology() != graph.topology() || g.worm_count() != graph.worm_count() {
                        bail!("{} has a different topology", p.display());
                    }
                    g
                }
                None => graph.clone(),
            };
            let opts = CompileOptions {
                large: DEFAULT_LARGE.max(2.0 * large_lower_bound(&from) + 1.0),
                ..CompileOptions::default()
            };
            build_global_network(&from, &opts)?
        }
    };
    if let Some(path) = &a.save_network {
        write(path, &write_checkpoint(&net))?;
    }
    let mode = if a.exhaustive {
        VerifyMode::Exhaustive { cap: DEFAULT_ORACLE_CAP }
    } else {
        VerifyMode::Random {
            trials: a.trials,
            seed: a.seed,
        }
    };
    let report = verify_network(&graph, &net, mode)?;
    print!("{}", report.to_json_lines());
    println!(
        "{}/{} match, {} mismatches",
        report.trials - report.mismatches,
        report.trials,
        report.mismatches
    );
    Ok(report.is_clean())
}

fn metrics_line(m: &Metrics) -> String {
    format!(
        "f1 {:.4}  precision {:.4}  recall {:.4}  accuracy {:.4}  loss {:.4}  samples {}",
        m.f1, m.precision, m.recall, m.accuracy, m.mean_loss, m.samples
    )
}

fn load_pool_for(graph: &WsnGraph, path: &Path) -> Result<wormnet::datagen::SamplePool> {
    let pool = parse_pool(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if pool.graph_id != graph_id(graph) {
        bail!("{} was generated from a different graph", path.display());
    }
    Ok(pool)
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let graph = load_graph(&a.graph)?;
    let pool = load_pool_for(&graph, &a.pool)?;
    let (tr, te) = split_pool(&pool, a.train, a.test, a.seed)?;
    let cfg = a.flags.config(a.seed);
    let val = &tr.pairs[..tr.len().min(100)];
    let out = train(&graph, &tr, val, &cfg)?;
    if let Some(e) = out.diverged_at {
        eprintln!("training diverged at epoch {e}; keeping the best earlier parameters");
    }
    let learned = graph.with_params(out.params.clone())?;
    write(&a.out.join("params.txt"), &write_graph(&learned))?;
    write(&a.out.join("history.csv"), &history_csv(&out.history))?;
    let opts = CompileOptions {
        large: DEFAULT_LARGE.max(2.0 * large_lower_bound(&learned) + 1.0),
        ..CompileOptions::default()
    };
    write(&a.out.join("model.cvnn"), &write_checkpoint(&build_global_network(&learned, &opts)?))?;
    for r in &out.history {
        println!(
            "epoch {:>3}  surrogate {:.4}  val loss {:.4}  val accuracy {:.4}",
            r.epoch, r.train_surrogate_loss, r.val_hard_loss, r.accuracy
        );
    }
    if !te.is_empty() {
        println!("test  {}", metrics_line(&evaluate(&graph, &out.params, &te.pairs)?));
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let graph = load_graph(&a.graph)?;
    let learned = load_graph(&a.params)?;
    if learned.topology() != graph.topology() || learned.worm_count() != graph.worm_count() {
        bail!("{} has a different topology", a.params.display());
    }
    let pool = load_pool_for(&graph, &a.pool)?;
    let samples = match (a.train, a.test) {
        (Some(tr), Some(te)) => split_pool(&pool, tr, te, a.seed)?.1.pairs,
        _ => pool.pairs,
    };
    let k = graph.worm_count();
    println!("proposed  {}", metrics_line(&evaluate(&graph, learned.params(), &samples)?));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    println!("random    {}", metrics_line(&random_baseline(&samples, k, &mut rng)?));
    Ok(())
}

/// A table with one labelled row per entry, each cell `mean(std)`.
struct Table {
    title: String,
    key: &'static str,
    rows: Vec<(String, [(f64, f64); 4])>,
}

const COLUMNS: [&str; 4] = ["f1", "precision", "recall", "accuracy"];

impl Table {
    fn human(&self) -> String {
        let mut s = format!("{}\n{:<12}", self.title, self.key);
        for c in COLUMNS {
            let _ = write!(s, "{c:>18}");
        }
        s.push('\n');
        for (label, cells) in &self.rows {
            let _ = write!(s, "{label:<12}");
            for (m, sd) in cells {
                let _ = write!(s, "{:>18}", format!("{m:.3}({sd:.3})"));
            }
            s.push('\n');
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = format!("{}", self.key);
        for c in COLUMNS {
            let _ = write!(s, ",{c}_mean,{c}_std");
        }
        s.push('\n');
        for (label, cells) in &self.rows {
            s.push_str(label);
            for (m, sd) in cells {
                let _ = write!(s, ",{m:.6},{sd:.6}");
            }
            s.push('\n');
        }
        s
    }
}

fn method_rows(results: &[RunResult]) -> Vec<(String, [(f64, f64); 4])> {
    let p: Vec<Metrics> = results.iter().map(|r| r.proposed).collect();
    let r: Vec<Metrics> = results.iter().map(|r| r.random).collect();
    vec![("proposed".into(), summarize(&p)), ("random".into(), summarize(&r))]
}

fn report(a: &ReportArgs) -> Result<()> {
    let topo = a.topology.build(a.seed)?;
    let n = topo.node_count();
    let seeds = a.seeds.unwrap_or((n / 4).max(1));
    let cfg = a.flags.config(a.seed);
    let setting = |worm_count: usize, num_seeds: usize| Setting {
        worm_count,
        pool_size: a.pool,
        num_seeds,
        train_size: a.train,
        test_size: a.test,
        validation_size: a.train.min(100),
    };
    let base = run_repeated(&topo, &setting(a.worms, seeds), &cfg, a.runs, a.seed)?;
    let mut tables = vec![(
        "methods",
        Table {
            title: format!("N={n}, K={}, seeds={seeds}, {} runs", a.worms, a.runs),
            key: "method",
            rows: method_rows(&base),
        },
    )];
    if !a.no_sweep {
        let mut rows = Vec::new();
        for k in [2, 4, 8] {
            let r = run_repeated(&topo, &setting(k, seeds), &cfg, a.runs, a.seed)?;
            rows.push((k.to_string(), method_rows(&r)[0].1));
        }
        tables.push((
            "worms",
            Table {
                title: format!("proposed, seeds={seeds}, by worm count"),
                key: "worms",
                rows,
            },
        ));
        let mut rows = Vec::new();
        for s in [n / 8, n / 4, 3 * n / 8] {
            let s = s.max(1);
            let r = run_repeated(&topo, &setting(a.worms, s), &cfg, a.runs, a.seed)?;
            rows.push((s.to_string(), method_rows(&r)[0].1));
        }
        tables.push((
            "seeds",
            Table {
                title: format!("proposed, K={}, by seed count", a.worms),
                key: "seeds",
                rows,
            },
        ));
    }
    for (name, t) in &tables {
        println!("{}", t.human());
        println!("{}", t.csv());
        if let Some(dir) = &a.out {
            write(&dir.join(format!("{name}.csv")), &t.csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Generate(a) => generate(a),
        Cmd::Simulate(a) => simulate(a),
        Cmd::CompileVerify(a) => match verify(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        Cmd::Train(a) => cmd_train(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
