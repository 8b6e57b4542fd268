use std::ops::Range;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anomq::engine::{anomaly_max_q, EngineParams};
use anomq::error::Error;
use anomq::eval::{
    aggregates_to_csv, bench_scaling, bench_to_json, oracle_search, run_experiment,
    write_experiment, ExperimentSpec,
};
use anomq::ged::GedConfig;
use anomq::graph::AttributedGraph;
use anomq::query::QuerySpec;
use anomq::sim::{generate_noisy, write_dataset, SimConfig, SimTopology};
use anomq::stats::{calibrate_pvalues, ScoreSpec, Statistic};

#[derive(Parser)]
#[command(name = "anomq", version, about = "Shape-constrained anomalous subgraph search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the most anomalous subgraph matching a query shape.
    Query(QueryArgs),
    /// Generate a synthetic dataset with a planted anomaly.
    Simulate(SimulateArgs),
    /// Run a batched experiment described by a JSON spec.
    Eval(EvalArgs),
    /// Measure query runtime across graph sizes and fit a log-log slope.
    Bench(BenchArgs),
    /// Exhaustive constrained optimum on small instances.
    Oracle(OracleArgs),
}

#[derive(Args)]
#[group(id = "signal", required = true, multiple = false)]
struct SignalArgs {
    /// Attribute CSV (vertex,t_0,...); p-values are calibrated from it.
    #[arg(long, group = "signal")]
    attrs: Option<PathBuf>,
    /// Pre-calibrated p-values CSV (vertex,pvalue).
    #[arg(long, group = "signal")]
    pvalues: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    /// Edge list file (src<TAB>dst per line, # comments).
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    signal: SignalArgs,
    /// Query shape: inline JSON or a path to a JSON file.
    #[arg(long)]
    query: String,
    #[arg(long, default_value = "bj")]
    stat: Statistic,
    #[arg(long, default_value_t = 0.15)]
    alpha_max: f64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Iteration cap (default: vertex count).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Baseline columns as START:END (default: all but the eval column).
    #[arg(long)]
    baseline: Option<String>,
    /// Column of the attribute matrix being scored (default: last).
    #[arg(long)]
    eval_col: Option<usize>,
    /// Combined-size cap for exact edit distance.
    #[arg(long, default_value_t = 16)]
    exact_ged_limit: usize,
    /// Node budget for the exact edit-distance search.
    #[arg(long)]
    ged_node_budget: Option<u64>,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_topology, default_value = "king-grid")]
    topology: SimTopology,
    #[arg(long, default_value_t = 0.4)]
    sparsity: f64,
    /// Planted shape: inline JSON or a path to a JSON file.
    #[arg(long)]
    shape: String,
    #[arg(long, default_value_t = 0.15)]
    planted_pmax: f64,
    #[arg(long, default_value_t = 0.2)]
    background_pmin: f64,
    /// Percentage of vertices whose p-value is flipped to 1-p.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving edges.tsv, pvalues.csv, truth.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Experiment spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Directory receiving rows.csv, aggregates.csv, results.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated graph sizes, ascending (e.g. 100,1000,10000).
    #[arg(long, default_value = "100,1000,10000")]
    sizes: String,
    /// Query shape: inline JSON or a path to a JSON file.
    #[arg(long, default_value = r#"{"shape":"ring","k":3}"#)]
    query: String,
    #[arg(long, default_value = "bj")]
    stat: Statistic,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Write the timing table as JSON here as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    signal: SignalArgs,
    /// Query shape: inline JSON or a path to a JSON file.
    #[arg(long)]
    query: String,
    #[arg(long, default_value = "bj")]
    stat: Statistic,
    #[arg(long, default_value_t = 0.15)]
    alpha_max: f64,
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    eval_col: Option<usize>,
    /// Raise the vertex-count guard for the exhaustive search.
    #[arg(long)]
    limit: Option<usize>,
}

fn parse_topology(s: &str) -> Result<SimTopology, String> {
    match s {
        "king-grid" => Ok(SimTopology::KingGrid),
        "random" => Ok(SimTopology::Random),
        other => Err(format!("unknown topology {other:?} (king-grid|random)")),
    }
}

fn load_query(arg: &str) -> Result<QuerySpec, Error> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|source| Error::Io {
            path: PathBuf::from(arg),
            source,
        })?
    };
    QuerySpec::from_json(&text)
}

fn parse_baseline(s: &str) -> Result<Range<usize>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidConfig(format!("baseline {s:?} must look like START:END"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let start: usize = parts[0].parse().map_err(|_| bad())?;
    let end: usize = parts[1].parse().map_err(|_| bad())?;
    Ok(start..end)
}

/// Loads the graph and attaches the anomaly signal, calibrating p-values
/// from attributes when the statistic needs them.
fn load_graph_with_signal(
    graph: &PathBuf,
    signal: &SignalArgs,
    stat: Statistic,
    alpha_max: f64,
    baseline: &Option<String>,
    eval_col: &Option<usize>,
) -> Result<(AttributedGraph, ScoreSpec), Error> {
    let (mut g, stats) = AttributedGraph::load_edge_list(graph)?;
    if stats.self_loops_dropped + stats.duplicates_dropped > 0 {
        eprintln!(
            "loaded {} vertices, {} edges ({} self-loops and {} duplicates dropped)",
            stats.vertices, stats.edges, stats.self_loops_dropped, stats.duplicates_dropped
        );
    }
    let mut spec = ScoreSpec::new(stat).with_alpha_max(alpha_max);
    if let Some(path) = &signal.pvalues {
        g.load_pvalues(path)?;
    }
    if let Some(path) = &signal.attrs {
        let attr_stats = g.load_attributes(path, 0.0)?;
        if attr_stats.missing_filled > 0 {
            eprintln!("filled {} missing attribute rows with 0", attr_stats.missing_filled);
        }
        let cols = attr_stats.cols;
        let eval = eval_col.unwrap_or(cols.saturating_sub(1));
        let window = match baseline {
            Some(b) => parse_baseline(b)?,
            None => 0..eval,
        };
        spec = spec.with_window(window, eval);
        if stat.is_nonparametric() {
            let pvals = calibrate_pvalues(&g, &spec)?;
            g.set_pvalues(pvals)?;
        }
    }
    Ok((g, spec))
}

fn write_or_print(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("json renders");
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<ExitCode, Error> {
    let (g, spec) = load_graph_with_signal(
        &args.graph,
        &args.signal,
        args.stat,
        args.alpha_max,
        &args.baseline,
        &args.eval_col,
    )?;
    let q = load_query(&args.query)?.build()?;
    let params = EngineParams {
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        ged: GedConfig {
            exact_limit: args.exact_ged_limit,
            node_budget: args.ged_node_budget,
        },
    };
    let result = anomaly_max_q(&g, &q, &spec, &params)?;
    write_or_print(&args.out, &result.to_json())?;
    Ok(if result.feasible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let cfg = SimConfig {
        n: args.n,
        topology: args.topology,
        sparsity: args.sparsity,
        planted_shape: load_query(&args.shape)?,
        planted_pvalue_max: args.planted_pmax,
        background_pvalue_min: args.background_pmin,
        noise_percent: args.noise,
        seed: args.seed,
    };
    let (g, truth) = generate_noisy(&cfg)?;
    write_dataset(&args.out_dir, &g, &truth)?;
    println!(
        "wrote {} vertices, {} edges, planted {:?} to {}",
        g.vertex_count(),
        g.edge_count(),
        truth.planted_vertices,
        args.out_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.spec).map_err(|source| Error::Io {
        path: args.spec.clone(),
        source,
    })?;
    let spec = ExperimentSpec::from_json(&text)?;
    let result = run_experiment(&spec)?;
    write_experiment(&args.out, &result)?;
    print!("{}", aggregates_to_csv(&result.aggregates));
    println!("wrote {} rows to {}", result.rows.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad size {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let query = load_query(&args.query)?;
    let result = bench_scaling(&sizes, &query, args.stat, args.seed, args.repeats)?;
    println!("n,generation_ms,query_ms,iterations,error");
    for r in &result.rows {
        println!(
            "{},{:.3},{:.3},{},{}",
            r.n,
            r.generation_ms,
            r.query_ms,
            r.iterations,
            r.error.clone().unwrap_or_default()
        );
    }
    match result.loglog_slope {
        Some(s) => println!("log-log slope: {s:.3}"),
        None => println!("log-log slope: not enough successful sizes"),
    }
    if args.out.is_some() {
        write_or_print(&args.out, &bench_to_json(&result))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, Error> {
    let (g, spec) = load_graph_with_signal(
        &args.graph,
        &args.signal,
        args.stat,
        args.alpha_max,
        &args.baseline,
        &args.eval_col,
    )?;
    let q = load_query(&args.query)?.build()?;
    let found = oracle_search(&g, &q, &spec, args.limit)?;
    let json = match &found {
        Some((sub, sv)) => serde_json::json!({
            "schema": "anomq/v1",
            "feasible": true,
            "vertices": sub.vertices(),
            "edges": sub.edges(),
            "score": sv.value,
            "alpha_star": sv.alpha_star,
        }),
        None => serde_json::json!({
            "schema": "anomq/v1",
            "feasible": false,
        }),
    };
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    Ok(if found.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Query(args) => cmd_query(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_limit() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
