//! The query engine: star decomposition of the query, star matching around
//! anomalous roots, greedy edit-distance assembly (MaxQ), and the outer
//! upper/lower-bound iteration (AnomalyMaxQ).
//!
//! Each iteration keeps two objects. The upper bound `s_up` is the best
//! structure-free vertex set of query size under the priority order; the
//! lower bound `s_low` is a feasible union of star matches assembled to
//! minimize edit distance to the query. The loop refines both until their
//! scores agree to within `epsilon`, the priority order is exhausted, or the
//! iteration cap is hit. A monotone cursor over the priority order
//! guarantees every iteration examines fresh vertices, so the search cannot
//! revisit the same upper bound forever.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ged::{ged_auto, GedConfig, Topology};
use crate::graph::{AttributedGraph, Subgraph};
use crate::query::QueryGraph;
use crate::stats::{PriorityOrder, ScoreSpec, ScoreValue, SubsetScorer};

/// One star of the query decomposition: a query vertex and its degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarPattern {
    pub center: u32,
    pub leaf_count: usize,
}

/// Splits the query into one star per query vertex (the vertex plus all its
/// neighbors).
pub fn decompose_stars(q: &QueryGraph) -> Vec<StarPattern> {
    (0..q.vertex_count() as u32)
        .map(|v| StarPattern {
            center: v,
            leaf_count: q.degree(v),
        })
        .collect()
}

/// A star in the data graph isomorphic to one query star: a root plus its
/// highest-priority neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct StarMatch {
    pub root: u32,
    pub pattern_index: usize,
    /// Root and chosen leaves, sorted.
    pub vertices: Vec<u32>,
    pub score: f64,
}

/// Best match of `pat` rooted at `v`: the `leaf_count` neighbors with the
/// highest priority (lowest p-value), ties by ascending id. `None` when the
/// root's degree is too small.
pub fn best_star_match(
    g: &AttributedGraph,
    scorer: &SubsetScorer,
    v: u32,
    pat: &StarPattern,
    pattern_index: usize,
) -> Option<StarMatch> {
    let nbrs = g.neighbors(v);
    if nbrs.len() < pat.leaf_count {
        return None;
    }
    let mut by_priority: Vec<u32> = nbrs.to_vec();
    by_priority.sort_by(|&a, &b| {
        scorer
            .priority(b)
            .total_cmp(&scorer.priority(a))
            .then(a.cmp(&b))
    });
    by_priority.truncate(pat.leaf_count);
    let mut vertices = by_priority;
    vertices.push(v);
    vertices.sort_unstable();
    let score = scorer.score(&vertices).value;
    Some(StarMatch {
        root: v,
        pattern_index,
        vertices,
        score,
    })
}

/// All feasible star matches for the roots in `s_up`, in (root, pattern)
/// order.
pub fn star_match_table(
    g: &AttributedGraph,
    scorer: &SubsetScorer,
    s_up: &[u32],
    patterns: &[StarPattern],
) -> Vec<StarMatch> {
    let mut table = Vec::new();
    for &v in s_up {
        for (k, pat) in patterns.iter().enumerate() {
            if let Some(m) = best_star_match(g, scorer, v, pat, k) {
                table.push(m);
            }
        }
    }
    table
}

/// Picks the query-size root set under the composite key: priority first,
/// then the smallest gap between the vertex degree and the query's maximum
/// degree, then ascending id. Returned sorted by id.
pub fn select_roots(
    g: &AttributedGraph,
    order: &PriorityOrder,
    q: &QueryGraph,
) -> Result<Vec<u32>> {
    let m = q.vertex_count();
    let n = g.vertex_count();
    if n < m {
        return Err(Error::InvalidInput(format!(
            "graph has {n} vertices but the query needs {m}"
        )));
    }
    let target = q.max_degree();
    let mut vs: Vec<u32> = (0..n as u32).collect();
    vs.sort_by(|&a, &b| {
        order
            .key(b)
            .total_cmp(&order.key(a))
            .then_with(|| g.degree(a).abs_diff(target).cmp(&g.degree(b).abs_diff(target)))
            .then(a.cmp(&b))
    });
    let mut roots = vs[..m].to_vec();
    roots.sort_unstable();
    Ok(roots)
}

/// Mutable state of one AnomalyMaxQ run.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub iteration: usize,
    /// Current upper-bound vertex set, sorted, at most query-size large.
    pub s_up: Vec<u32>,
    pub s_low: Subgraph,
    /// Monotone cursor: vertices before it in the priority order have been
    /// examined and are never re-proposed.
    pub cursor: usize,
    pub epsilon: f64,
    pub trace: Vec<TraceEntry>,
}

impl SearchState {
    pub fn new(epsilon: f64) -> Self {
        SearchState {
            iteration: 0,
            s_up: Vec::new(),
            s_low: Subgraph::empty(),
            cursor: 0,
            epsilon,
            trace: Vec::new(),
        }
    }
}

/// Per-iteration record of both bounds and the lower bound's edit distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub f_up: f64,
    pub f_low: f64,
    pub ged: usize,
}

/// One upper-bound refinement: keep the vertices shared with the current
/// lower bound, then fill up to query size with the highest-priority
/// vertices not yet examined. With both sets empty this reduces to root
/// selection by priority.
pub fn build_upper_bound(state: &mut SearchState, order: &PriorityOrder, m: usize) {
    let mut retained: Vec<u32> = state
        .s_up
        .iter()
        .copied()
        .filter(|&v| state.s_low.contains(v))
        .collect();
    while retained.len() < m && state.cursor < order.len() {
        let v = order.order()[state.cursor];
        state.cursor += 1;
        if retained.binary_search(&v).is_err() {
            retained.push(v);
            retained.sort_unstable();
        }
    }
    state.s_up = retained;
}

/// The lower bound returned by [`max_q`]: the assembled subgraph plus the
/// star matches that built it.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub subgraph: Subgraph,
    pub used: Vec<StarMatch>,
    pub ged: usize,
}

/// Greedy star assembly: starting from the empty subgraph, repeatedly union
/// the star match whose induced union is closest to the query by edit
/// distance (ties: higher match score, then lower root id, then lower
/// pattern index), stopping as soon as the distance strictly increases or
/// every match has been used. Returns the last subgraph before the
/// increase, which is the distance-minimal one seen.
pub fn max_q(
    g: &AttributedGraph,
    scorer: &SubsetScorer,
    s_up: &[u32],
    q: &QueryGraph,
    patterns: &[StarPattern],
    ged_cfg: &GedConfig,
) -> Assembly {
    let q_topo = Topology::from_query(q);
    let empty_ged = ged_auto(&Topology::from_subgraph(&Subgraph::empty()), &q_topo, ged_cfg).distance;
    let mut matches = star_match_table(g, scorer, s_up, patterns);
    // Different (root, pattern) pairs often select the same vertex set;
    // keeping the first occurrence preserves the greedy tie-break order.
    let mut seen = std::collections::HashSet::new();
    matches.retain(|m| seen.insert(m.vertices.clone()));
    if matches.is_empty() {
        return Assembly {
            subgraph: Subgraph::empty(),
            used: Vec::new(),
            ged: empty_ged,
        };
    }

    let mut current = Subgraph::empty();
    let mut current_ged = empty_ged;
    let mut used_flags = vec![false; matches.len()];
    let mut used = Vec::new();
    loop {
        let mut pick: Option<(usize, Subgraph, usize)> = None;
        for (i, mt) in matches.iter().enumerate() {
            if used_flags[i] {
                continue;
            }
            let (union, d) = if mt.vertices.iter().all(|&v| current.contains(v)) {
                (current.clone(), current_ged)
            } else {
                let mut vs = current.vertices().to_vec();
                vs.extend_from_slice(&mt.vertices);
                let union = g.induced_subgraph(&vs).expect("match vertices are in range");
                let d = ged_auto(&Topology::from_subgraph(&union), &q_topo, ged_cfg).distance;
                (union, d)
            };
            let better = match &pick {
                None => true,
                Some((j, _, pd)) => {
                    let prev = &matches[*j];
                    d < *pd
                        || (d == *pd
                            && (mt.score > prev.score
                                || (mt.score == prev.score
                                    && (mt.root, mt.pattern_index) < (prev.root, prev.pattern_index))))
                }
            };
            if better {
                pick = Some((i, union, d));
            }
        }
        let Some((i, union, d)) = pick else {
            break;
        };
        if d > current_ged {
            break;
        }
        used_flags[i] = true;
        used.push(matches[i].clone());
        current = union;
        current_ged = d;
    }
    Assembly {
        subgraph: current,
        used,
        ged: current_ged,
    }
}

/// Tunables for [`anomaly_max_q`].
#[derive(Debug, Clone)]
pub struct EngineParams {
    pub epsilon: f64,
    /// Iteration cap; defaults to the vertex count.
    pub max_iters: Option<usize>,
    pub ged: GedConfig,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            epsilon: 1e-6,
            max_iters: None,
            ged: GedConfig::default(),
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Upper and lower bound scores agreed to within epsilon.
    Converged,
    /// Priority order exhausted or the state reached a fixed point.
    Exhausted,
    /// Iteration cap hit first.
    MaxIterations,
}

/// The best structured subgraph found, with the full iteration trace.
#[derive(Debug, Clone, Serialize)]
pub struct QueryResult {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub score: f64,
    pub alpha_star: Option<f64>,
    pub ged: usize,
    pub iterations: usize,
    pub feasible: bool,
    pub no_anomaly_signal: bool,
    pub status: Termination,
    pub trace: Vec<TraceEntry>,
    pub runtime_ms: f64,
}

impl QueryResult {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("result serializes");
        v["schema"] = "anomq/v1".into();
        v
    }
}

/// Runs the full search: priority sort, then alternating upper-bound
/// refinement and star assembly until convergence, exhaustion, or the
/// iteration cap. Returns the best-scoring lower bound over all iterations;
/// an empty result is reported as infeasible rather than an error.
pub fn anomaly_max_q(
    g: &AttributedGraph,
    q: &QueryGraph,
    spec: &ScoreSpec,
    params: &EngineParams,
) -> Result<QueryResult> {
    let start = Instant::now();
    let n = g.vertex_count();
    let m = q.vertex_count();
    if n < m {
        return Err(Error::InvalidInput(format!(
            "graph has {n} vertices but the query needs {m}"
        )));
    }
    let scorer = SubsetScorer::new(g, spec)?;
    let keys: Vec<f64> = (0..n as u32).map(|v| scorer.priority(v)).collect();
    let order = PriorityOrder::from_keys(keys);
    let patterns = decompose_stars(q);
    let q_topo = Topology::from_query(q);
    let max_iters = params.max_iters.unwrap_or(n).max(1);

    let mut state = SearchState::new(params.epsilon);
    let mut status = Termination::MaxIterations;
    let mut best: Option<(Subgraph, ScoreValue, usize)> = None;

    while state.iteration < max_iters {
        let prev_s_up = state.s_up.clone();
        let prev_cursor = state.cursor;
        build_upper_bound(&mut state, &order, m);
        if state.s_up.is_empty() {
            status = Termination::Exhausted;
            break;
        }
        let assembly = max_q(g, &scorer, &state.s_up, q, &patterns, &params.ged);
        state.s_low = assembly.subgraph;

        let f_up = scorer.score(&state.s_up);
        let f_low = scorer.score(state.s_low.vertices());
        state.trace.push(TraceEntry {
            f_up: f_up.value,
            f_low: f_low.value,
            ged: assembly.ged,
        });
        state.iteration += 1;

        if !state.s_low.is_empty() {
            let replace = match &best {
                None => true,
                Some((_, sv, d)) => {
                    f_low.value > sv.value || (f_low.value == sv.value && assembly.ged < *d)
                }
            };
            if replace {
                best = Some((state.s_low.clone(), f_low.clone(), assembly.ged));
            }
        }

        // The one-sided statistics ignore p-values above alpha_max, so
        // different vertex sets tie exactly all the time; require the
        // bounds to agree on vertices, not just on score.
        let agree = state.s_up.iter().all(|&v| state.s_low.contains(v));
        if agree && (f_up.value - f_low.value).abs() < state.epsilon {
            status = Termination::Converged;
            break;
        }
        if state.s_up == prev_s_up && state.cursor == prev_cursor {
            status = Termination::Exhausted;
            break;
        }
    }

    let runtime_ms = start.elapsed().as_secs_f64() * 1000.0;
    let result = match best {
        Some((sub, sv, ged)) => QueryResult {
            vertices: sub.vertices().to_vec(),
            edges: sub.edges().to_vec(),
            score: sv.value,
            alpha_star: sv.alpha_star,
            ged,
            iterations: state.iteration,
            feasible: true,
            no_anomaly_signal: sv.value == 0.0,
            status,
            trace: state.trace,
            runtime_ms,
        },
        None => QueryResult {
            vertices: Vec::new(),
            edges: Vec::new(),
            score: 0.0,
            alpha_star: None,
            ged: ged_auto(&Topology::from_subgraph(&Subgraph::empty()), &q_topo, &params.ged)
                .distance,
            iterations: state.iteration,
            feasible: false,
            no_anomaly_signal: true,
            status,
            trace: state.trace,
            runtime_ms,
        },
    };
    Ok(result)
}
