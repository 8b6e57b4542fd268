//! Synthetic attributed networks with a planted query-shaped anomaly, plus
//! the adversarial p-value flip used for robustness runs.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::query::QuerySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimTopology {
    /// Square lattice with 8-neighborhood; edges kept with probability
    /// `sparsity`.
    KingGrid,
    /// Erdos-Renyi with edge probability `sparsity`.
    Random,
}

fn default_sparsity() -> f64 {
    0.4
}

fn default_planted_pmax() -> f64 {
    0.15
}

fn default_background_pmin() -> f64 {
    0.2
}

/// Configuration for [`generate`]. Deterministic given `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub topology: SimTopology,
    #[serde(default = "default_sparsity")]
    pub sparsity: f64,
    pub planted_shape: QuerySpec,
    #[serde(default = "default_planted_pmax")]
    pub planted_pvalue_max: f64,
    #[serde(default = "default_background_pmin")]
    pub background_pvalue_min: f64,
    /// Percentage of vertices whose p-value gets flipped by the noise step.
    #[serde(default)]
    pub noise_percent: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: usize, topology: SimTopology, planted_shape: QuerySpec) -> Self {
        SimConfig {
            n,
            topology,
            sparsity: default_sparsity(),
            planted_shape,
            planted_pvalue_max: default_planted_pmax(),
            background_pvalue_min: default_background_pmin(),
            noise_percent: 0.0,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sparsity > 0.0 && self.sparsity <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sparsity {} outside (0, 1]",
                self.sparsity
            )));
        }
        if !(self.planted_pvalue_max > 0.0 && self.planted_pvalue_max < self.background_pvalue_min)
        {
            return Err(Error::InvalidConfig(format!(
                "planted p-value bound {} must be positive and below the background minimum {}",
                self.planted_pvalue_max, self.background_pvalue_min
            )));
        }
        if self.background_pvalue_min >= 1.0 {
            return Err(Error::InvalidConfig(
                "background p-value minimum must be below 1".into(),
            ));
        }
        if !(0.0..=100.0).contains(&self.noise_percent) {
            return Err(Error::InvalidConfig(format!(
                "noise percent {} outside 0..=100",
                self.noise_percent
            )));
        }
        Ok(())
    }
}

/// Where the anomaly was planted, for scoring recovered subgraphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub planted_vertices: Vec<u32>,
    pub planted_edges: Vec<(u32, u32)>,
}

fn king_grid_edges(n: usize, sparsity: f64, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let side = (n as f64).sqrt().ceil() as usize;
    let mut edges = Vec::new();
    for idx in 0..n {
        let (r, c) = (idx / side, idx % side);
        // East, south, south-east, south-west cover each pair once.
        let candidates = [
            (r, c + 1),
            (r + 1, c),
            (r + 1, c + 1),
            (r + 1, c.wrapping_sub(1)),
        ];
        for (nr, nc) in candidates {
            if nr >= side || nc >= side {
                continue;
            }
            let nidx = nr * side + nc;
            if nidx >= n {
                continue;
            }
            if sparsity >= 1.0 || rng.gen_bool(sparsity) {
                edges.push((idx as u32, nidx as u32));
            }
        }
    }
    edges
}

fn erdos_renyi_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Vec<(u32, u32)>> {
    let expected = p * (n as f64) * (n as f64 - 1.0) / 2.0;
    if expected > 5e7 {
        return Err(Error::TooLarge(format!(
            "random topology with n={n}, sparsity={p} implies ~{expected:.0} edges"
        )));
    }
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if p >= 1.0 || rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(edges)
}

/// Builds the topology, plants the shape's edges over a random vertex
/// subset, and draws planted p-values from `(0, planted_pvalue_max]` and
/// background ones from `(background_pvalue_min, 1]`. Noise is not applied
/// here; see [`flip_noise`].
pub fn generate(cfg: &SimConfig) -> Result<(AttributedGraph, GroundTruth)> {
    cfg.validate()?;
    let shape = cfg.planted_shape.build()?;
    let m = shape.vertex_count();
    if cfg.n < m {
        return Err(Error::InvalidConfig(format!(
            "n={} too small for a planted shape with {m} vertices",
            cfg.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = match cfg.topology {
        SimTopology::KingGrid => king_grid_edges(cfg.n, cfg.sparsity, &mut rng),
        SimTopology::Random => erdos_renyi_edges(cfg.n, cfg.sparsity, &mut rng)?,
    };

    let chosen: Vec<u32> = rand::seq::index::sample(&mut rng, cfg.n, m)
        .iter()
        .map(|i| i as u32)
        .collect();
    let mut planted_edges: Vec<(u32, u32)> = shape
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (chosen[u as usize], chosen[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    planted_edges.sort_unstable();
    edges.extend_from_slice(&planted_edges);

    let mut graph = AttributedGraph::from_edges(cfg.n, &edges)?;

    let mut planted = vec![false; cfg.n];
    for &v in &chosen {
        planted[v as usize] = true;
    }
    let pvals: Vec<f64> = (0..cfg.n)
        .map(|v| {
            let u: f64 = rng.gen();
            if planted[v] {
                cfg.planted_pvalue_max * (1.0 - u)
            } else {
                cfg.background_pvalue_min + (1.0 - cfg.background_pvalue_min) * (1.0 - u)
            }
        })
        .map(|p| p.max(f64::MIN_POSITIVE))
        .collect();
    graph.set_pvalues(pvals)?;

    let mut planted_vertices = chosen;
    planted_vertices.sort_unstable();
    Ok((
        graph,
        GroundTruth {
            planted_vertices,
            planted_edges,
        },
    ))
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Seed for the noise flip derived from a dataset seed, so generation and
/// noise draw from independent streams.
pub fn noise_seed(seed: u64) -> u64 {
    splitmix64(seed ^ 0xA5A5_5A5A_A5A5_5A5A)
}

/// [`generate`] followed by the configured noise flip.
pub fn generate_noisy(cfg: &SimConfig) -> Result<(AttributedGraph, GroundTruth)> {
    let (mut g, truth) = generate(cfg)?;
    if cfg.noise_percent > 0.0 {
        let noisy = flip_noise(
            g.pvalues().expect("generate sets p-values"),
            cfg.noise_percent,
            noise_seed(cfg.seed),
        )?;
        g.set_pvalues(noisy)?;
    }
    Ok((g, truth))
}

/// Flips the p-values of exactly `round(k_percent / 100 * n)` distinct
/// vertices to `1 - p`, chosen uniformly. Deterministic given `seed`.
/// Results are clamped into `(0, 1]`; a second flip with the same seed
/// restores the input up to one floating-point rounding per entry (entries
/// at or above one half restore exactly).
pub fn flip_noise(pvals: &[f64], k_percent: f64, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=100.0).contains(&k_percent) {
        return Err(Error::InvalidConfig(format!(
            "noise percent {k_percent} outside 0..=100"
        )));
    }
    let n = pvals.len();
    let count = (k_percent / 100.0 * n as f64).round() as usize;
    let mut out = pvals.to_vec();
    if count == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in rand::seq::index::sample(&mut rng, n, count) {
        out[idx] = (1.0 - out[idx]).max(f64::MIN_POSITIVE);
    }
    Ok(out)
}

/// Writes `edges.tsv`, `pvalues.csv`, and `truth.json` into `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, g: &AttributedGraph, truth: &GroundTruth) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    g.write_edge_list(dir.join("edges.tsv"))?;
    g.write_pvalues(dir.join("pvalues.csv"))?;
    let mut truth_json = serde_json::to_value(truth).expect("truth serializes");
    truth_json["schema"] = "anomq/v1".into();
    let path = dir.join("truth.json");
    std::fs::write(&path, serde_json::to_string_pretty(&truth_json).unwrap())
        .map_err(|source| Error::Io { path, source })
}

/// Reads a `truth.json` written by [`write_dataset`].
pub fn read_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad truth file: {e}")))
}
