//! Experiment harness: precision scoring, the brute-force oracle, batched
//! precision/robustness experiments, and runtime scaling measurements.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{anomaly_max_q, EngineParams};
use crate::error::{Error, Result};
use crate::ged::{ged_exact, GedConfig, Topology};
use crate::graph::{AttributedGraph, Subgraph};
use crate::query::{QueryGraph, QuerySpec, ShapeSpec};
use crate::sim::{flip_noise, generate, generate_noisy, noise_seed, read_truth, splitmix64, SimConfig, SimTopology};
use crate::stats::{ScoreSpec, ScoreValue, Statistic, SubsetScorer, DEFAULT_ALPHA_MAX};

/// Fraction of `found` vertices that are true anomalies; zero for an empty
/// result.
pub fn precision(found: &[u32], truth: &[u32]) -> f64 {
    if found.is_empty() {
        return 0.0;
    }
    let mut sorted = truth.to_vec();
    sorted.sort_unstable();
    let hits = found
        .iter()
        .filter(|v| sorted.binary_search(v).is_ok())
        .count();
    hits as f64 / found.len() as f64
}

pub const ORACLE_DEFAULT_LIMIT: usize = 15;

/// Exhaustive constrained optimum: enumerates every connected induced
/// subgraph of query size, keeps the exactly-isomorphic ones, and returns
/// the best-scoring (ties to the lexicographically smaller vertex set).
/// `None` means no isomorphic subgraph exists. Guarded by a vertex-count
/// limit unless `limit_override` raises it.
pub fn oracle_search(
    g: &AttributedGraph,
    q: &QueryGraph,
    spec: &ScoreSpec,
    limit_override: Option<usize>,
) -> Result<Option<(Subgraph, ScoreValue)>> {
    let limit = limit_override.unwrap_or(ORACLE_DEFAULT_LIMIT);
    let n = g.vertex_count();
    if n > limit {
        return Err(Error::TooLarge(format!(
            "oracle search on {n} vertices exceeds the limit {limit}"
        )));
    }
    let m = q.vertex_count();
    let scorer = SubsetScorer::new(g, spec)?;
    let q_topo = Topology::from_query(q);
    // Exact isomorphism checks stay well under any practical exact limit
    // for oracle-sized instances.
    let ged_cfg = GedConfig {
        exact_limit: 2 * m + 2,
        node_budget: None,
    };

    let mut best: Option<(Vec<u32>, ScoreValue)> = None;
    enumerate_connected_sets(g, m, &mut |vs| {
        let sub = g.induced_subgraph(vs).expect("enumerated vertices in range");
        let topo = Topology::from_subgraph(&sub);
        let Ok(r) = ged_exact(&topo, &q_topo, &ged_cfg) else {
            return;
        };
        if r.distance != 0 {
            return;
        }
        let sv = scorer.score(vs);
        let replace = match &best {
            None => true,
            Some((bvs, bsv)) => {
                sv.value > bsv.value || (sv.value == bsv.value && vs < bvs.as_slice())
            }
        };
        if replace {
            best = Some((vs.to_vec(), sv));
        }
    });
    Ok(match best {
        Some((vs, sv)) => Some((g.induced_subgraph(&vs)?, sv)),
        None => None,
    })
}

/// ESU enumeration: every connected induced vertex set of size `m`, each
/// exactly once, passed to `emit` in sorted order.
fn enumerate_connected_sets(g: &AttributedGraph, m: usize, emit: &mut impl FnMut(&[u32])) {
    fn extend(
        g: &AttributedGraph,
        root: u32,
        sub: &mut Vec<u32>,
        ext: &mut Vec<u32>,
        m: usize,
        emit: &mut impl FnMut(&[u32]),
    ) {
        if sub.len() == m {
            let mut vs = sub.clone();
            vs.sort_unstable();
            emit(&vs);
            return;
        }
        while let Some(u) = ext.pop() {
            let mut next_ext = ext.clone();
            for &w in g.neighbors(u) {
                if w > root && !sub.contains(&w) && !next_ext.contains(&w) {
                    // Exclusive neighborhood: skip vertices adjacent to the
                    // current subgraph, they are already in some ext set.
                    let adjacent_to_sub = sub.iter().any(|&s| g.has_edge(s, w));
                    if !adjacent_to_sub {
                        next_ext.push(w);
                    }
                }
            }
            sub.push(u);
            extend(g, root, sub, &mut next_ext, m, emit);
            sub.pop();
        }
    }

    if m == 0 {
        return;
    }
    for v in 0..g.vertex_count() as u32 {
        let mut sub = vec![v];
        if m == 1 {
            emit(&sub);
            continue;
        }
        let mut ext: Vec<u32> = g.neighbors(v).iter().copied().filter(|&w| w > v).collect();
        extend(g, v, &mut sub, &mut ext, m, emit);
    }
}

fn default_queries() -> Vec<QuerySpec> {
    vec![
        QuerySpec::Shape(ShapeSpec::Ring { k: 6 }),
        QuerySpec::Shape(ShapeSpec::Line { k: 5 }),
        QuerySpec::Shape(ShapeSpec::Star { k: 5 }),
        QuerySpec::Shape(ShapeSpec::Bipartite { a: 3, b: 3 }),
        QuerySpec::Shape(ShapeSpec::Tree { branching: 2, depth: 2 }),
        QuerySpec::Shape(ShapeSpec::Star { k: 8 }),
    ]
}

fn default_statistics() -> Vec<Statistic> {
    vec![Statistic::Bj]
}

fn default_noise_levels() -> Vec<f64> {
    vec![5.0, 10.0, 20.0]
}

fn default_trials() -> usize {
    10
}

fn default_alpha_max() -> f64 {
    DEFAULT_ALPHA_MAX
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_measure_runtime() -> bool {
    true
}

/// Where an experiment's data comes from: a generator configuration whose
/// planted shape is replaced by each query under test, or files on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSpec {
    Sim(SimConfig),
    Files {
        graph: PathBuf,
        pvalues: PathBuf,
        #[serde(default)]
        truth: Option<PathBuf>,
    },
}

/// A batched experiment: the cross product of queries, statistics, and
/// noise levels, each run for `trials` independently seeded repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSpec,
    #[serde(default = "default_queries")]
    pub queries: Vec<QuerySpec>,
    #[serde(default = "default_statistics")]
    pub statistics: Vec<Statistic>,
    #[serde(default = "default_noise_levels")]
    pub noise_levels: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha_max")]
    pub alpha_max: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub max_iters: Option<usize>,
    /// With this off, rows carry a zero runtime so outputs are byte-stable
    /// across machines and repeated invocations.
    #[serde(default = "default_measure_runtime")]
    pub measure_runtime: bool,
}

impl ExperimentSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(s)
            .map_err(|e| Error::InvalidConfig(format!("bad experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.queries.is_empty() {
            return Err(Error::InvalidConfig("at least one query required".into()));
        }
        Ok(())
    }
}

/// One engine run within an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub query: String,
    pub statistic: String,
    pub noise: f64,
    pub trial: usize,
    pub precision: Option<f64>,
    pub score: f64,
    pub ged: usize,
    pub runtime_ms: f64,
    pub iterations: usize,
}

/// Mean and spread per (query, statistic, noise) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub query: String,
    pub statistic: String,
    pub noise: f64,
    pub trials: usize,
    pub precision_mean: Option<f64>,
    pub precision_std: Option<f64>,
    pub score_mean: f64,
    pub runtime_ms_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateCell>,
}

fn trial_seed(base: u64, q: usize, s: usize, k: usize, t: usize) -> u64 {
    splitmix64(
        base ^ ((q as u64) << 48) ^ ((s as u64) << 40) ^ ((k as u64) << 32) ^ t as u64,
    )
}

/// Runs the full cross product and aggregates per cell. Rows come out
/// sorted by (query, statistic, noise, trial) and are deterministic given
/// the experiment seed (runtimes aside; see `measure_runtime`).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let file_data = match &spec.dataset {
        DatasetSpec::Files { graph, pvalues, truth } => {
            let (mut g, _) = AttributedGraph::load_edge_list(graph)?;
            g.load_pvalues(pvalues)?;
            let truth = truth.as_ref().map(read_truth).transpose()?;
            Some((g, truth))
        }
        DatasetSpec::Sim(_) => None,
    };

    let mut rows = Vec::new();
    for (qi, qspec) in spec.queries.iter().enumerate() {
        let q = qspec.build()?;
        for (si, &stat) in spec.statistics.iter().enumerate() {
            let score_spec = ScoreSpec::new(stat).with_alpha_max(spec.alpha_max);
            for (ki, &noise) in spec.noise_levels.iter().enumerate() {
                for trial in 0..spec.trials {
                    let seed = trial_seed(spec.seed, qi, si, ki, trial);
                    let (g, truth) = match (&spec.dataset, &file_data) {
                        (DatasetSpec::Sim(base), _) => {
                            let mut cfg = base.clone();
                            cfg.planted_shape = qspec.clone();
                            cfg.noise_percent = noise;
                            cfg.seed = seed;
                            let (g, t) = generate_noisy(&cfg)?;
                            (g, Some(t))
                        }
                        (DatasetSpec::Files { .. }, Some((g, t))) => {
                            let mut g = g.clone();
                            if noise > 0.0 {
                                let pvals = g.pvalues().ok_or(Error::MissingPValues)?;
                                let noisy = flip_noise(pvals, noise, noise_seed(seed))?;
                                g.set_pvalues(noisy)?;
                            }
                            (g, t.clone())
                        }
                        _ => unreachable!(),
                    };
                    let params = EngineParams {
                        epsilon: spec.epsilon,
                        max_iters: spec.max_iters,
                        ged: GedConfig::default(),
                    };
                    let result = anomaly_max_q(&g, &q, &score_spec, &params)?;
                    let prec = truth
                        .as_ref()
                        .map(|t| precision(&result.vertices, &t.planted_vertices));
                    rows.push(ResultRow {
                        query: qspec.to_string(),
                        statistic: stat.name().to_string(),
                        noise,
                        trial,
                        precision: prec,
                        score: result.score,
                        ged: result.ged,
                        runtime_ms: if spec.measure_runtime { result.runtime_ms } else { 0.0 },
                        iterations: result.iterations,
                    });
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.query, &a.statistic)
            .cmp(&(&b.query, &b.statistic))
            .then(a.noise.total_cmp(&b.noise))
            .then(a.trial.cmp(&b.trial))
    });
    let aggregates = aggregate(&rows);
    Ok(ExperimentResult { rows, aggregates })
}

fn aggregate(rows: &[ResultRow]) -> Vec<AggregateCell> {
    let mut cells: Vec<AggregateCell> = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let j = rows[i..]
            .iter()
            .take_while(|r| {
                r.query == rows[i].query
                    && r.statistic == rows[i].statistic
                    && r.noise == rows[i].noise
            })
            .count();
        let group = &rows[i..i + j];
        let precisions: Vec<f64> = group.iter().filter_map(|r| r.precision).collect();
        let (p_mean, p_std) = if precisions.is_empty() {
            (None, None)
        } else {
            let mean = precisions.iter().sum::<f64>() / precisions.len() as f64;
            let var = precisions.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>()
                / precisions.len() as f64;
            (Some(mean), Some(var.sqrt()))
        };
        cells.push(AggregateCell {
            query: rows[i].query.clone(),
            statistic: rows[i].statistic.clone(),
            noise: rows[i].noise,
            trials: j,
            precision_mean: p_mean,
            precision_std: p_std,
            score_mean: group.iter().map(|r| r.score).sum::<f64>() / j as f64,
            runtime_ms_mean: group.iter().map(|r| r.runtime_ms).sum::<f64>() / j as f64,
        });
        i += j;
    }
    cells
}

pub const ROWS_CSV_HEADER: &str =
    "query,statistic,noise,trial,precision,score,ged,runtime_ms,iterations";

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(ROWS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let prec = r.precision.map(|p| p.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.query, r.statistic, r.noise, r.trial, prec, r.score, r.ged, r.runtime_ms,
            r.iterations
        ));
    }
    out
}

pub fn rows_from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != ROWS_CSV_HEADER {
                return Err(Error::InvalidInput(format!("unexpected CSV header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::InvalidInput(format!("row {i}: expected 9 fields")));
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("row {i}: bad {what} {s:?}")))
        };
        rows.push(ResultRow {
            query: f[0].to_string(),
            statistic: f[1].to_string(),
            noise: parse_f64(f[2], "noise")?,
            trial: f[3]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("row {i}: bad trial {:?}", f[3])))?,
            precision: if f[4].is_empty() {
                None
            } else {
                Some(parse_f64(f[4], "precision")?)
            },
            score: parse_f64(f[5], "score")?,
            ged: f[6]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("row {i}: bad ged {:?}", f[6])))?,
            runtime_ms: parse_f64(f[7], "runtime_ms")?,
            iterations: f[8]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("row {i}: bad iterations {:?}", f[8])))?,
        });
    }
    Ok(rows)
}

pub fn aggregates_to_csv(cells: &[AggregateCell]) -> String {
    let mut out =
        String::from("query,statistic,noise,trials,precision_mean,precision_std,score_mean,runtime_ms_mean\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.query,
            c.statistic,
            c.noise,
            c.trials,
            c.precision_mean.map(|p| p.to_string()).unwrap_or_default(),
            c.precision_std.map(|p| p.to_string()).unwrap_or_default(),
            c.score_mean,
            c.runtime_ms_mean
        ));
    }
    out
}

pub fn result_to_json(result: &ExperimentResult) -> serde_json::Value {
    let mut v = serde_json::to_value(result).expect("result serializes");
    v["schema"] = "anomq/v1".into();
    v
}

/// Writes `rows.csv`, `aggregates.csv`, and `results.json` into `dir`.
pub fn write_experiment(dir: impl AsRef<Path>, result: &ExperimentResult) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|source| Error::Io { path, source })
    };
    write("rows.csv", rows_to_csv(&result.rows))?;
    write("aggregates.csv", aggregates_to_csv(&result.aggregates))?;
    write(
        "results.json",
        serde_json::to_string_pretty(&result_to_json(result)).unwrap(),
    )
}

/// One measured size in a scaling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub generation_ms: f64,
    pub query_ms: f64,
    pub iterations: usize,
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log query time against log n over the
    /// successful rows.
    pub loglog_slope: Option<f64>,
}

/// Times the engine on planted king-grid instances of growing size.
/// Generation is excluded from the timed section; each size runs `repeats`
/// times and reports the median. Failures are recorded per size and the
/// remaining sizes still run.
pub fn bench_scaling(
    sizes: &[usize],
    query: &QuerySpec,
    stat: Statistic,
    seed: u64,
    repeats: usize,
) -> Result<BenchResult> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("sizes must be strictly ascending".into()));
    }
    let q = query.build()?;
    let score_spec = ScoreSpec::new(stat);
    let repeats = repeats.max(1);
    let mut rows = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let mut cfg = SimConfig::new(n, SimTopology::KingGrid, query.clone());
        cfg.seed = splitmix64(seed ^ i as u64);
        let gen_start = Instant::now();
        let generated = generate(&cfg);
        let generation_ms = gen_start.elapsed().as_secs_f64() * 1000.0;
        match generated {
            Err(e) => rows.push(BenchRow {
                n,
                generation_ms,
                query_ms: 0.0,
                iterations: 0,
                error: Some(e.to_string()),
            }),
            Ok((g, _)) => {
                let mut times = Vec::with_capacity(repeats);
                let mut iterations = 0;
                let mut error = None;
                for _ in 0..repeats {
                    let start = Instant::now();
                    match anomaly_max_q(&g, &q, &score_spec, &EngineParams::default()) {
                        Ok(r) => {
                            times.push(start.elapsed().as_secs_f64() * 1000.0);
                            iterations = r.iterations;
                        }
                        Err(e) => {
                            error = Some(e.to_string());
                            break;
                        }
                    }
                }
                times.sort_by(f64::total_cmp);
                let query_ms = times.get(times.len() / 2).copied().unwrap_or(0.0);
                rows.push(BenchRow {
                    n,
                    generation_ms,
                    query_ms,
                    iterations,
                    error,
                });
            }
        }
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error.is_none() && r.query_ms > 0.0)
        .map(|r| ((r.n as f64).ln(), r.query_ms.ln()))
        .collect();
    let loglog_slope = if points.len() >= 2 {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };
    Ok(BenchResult { rows, loglog_slope })
}

pub fn bench_to_json(result: &BenchResult) -> serde_json::Value {
    let mut v = serde_json::to_value(result).expect("bench serializes");
    v["schema"] = "anomq/v1".into();
    v
}
