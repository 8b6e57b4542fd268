//! Graph edit distance between small unlabeled graphs under unit costs
//! (vertex insert/delete, edge insert/delete; substitution is free).
//!
//! Deleting a vertex requires deleting its incident edges first, each at
//! unit cost. Under this model the distance decomposes over an injective
//! mapping `f` of the smaller vertex set into the larger as
//!
//! ```text
//! ged = (|V_a| + |V_b| - 2 min(|V_a|, |V_b|)) + |E_a| + |E_b| - 2 * matched(f)
//! ```
//!
//! where `matched(f)` counts edges preserved by `f`. Extending a mapping
//! never increases the cost, so the exact solver searches complete
//! injective mappings of the smaller side with branch-and-bound, and the
//! bounded solver greedily builds one such mapping.

use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::query::QueryGraph;

/// Unlabeled topology used for edit-distance comparisons, with vertices
/// relabeled to `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Topology {
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::VertexOutOfRange { id: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Topology {
            adj,
            edge_count: edge_count / 2,
        })
    }

    pub fn from_subgraph(s: &Subgraph) -> Self {
        let vs = s.vertices();
        let relabel = |x: u32| vs.binary_search(&x).unwrap() as u32;
        let edges: Vec<(u32, u32)> = s.edges().iter().map(|&(u, v)| (relabel(u), relabel(v))).collect();
        Topology::new(vs.len(), &edges).expect("subgraph edges are valid")
    }

    pub fn from_query(q: &QueryGraph) -> Self {
        Topology::new(q.vertex_count(), q.edges()).expect("query edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }
}

/// An edit distance together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GedResult {
    pub distance: usize,
    /// True when `distance` is the exact minimum (a zero bound is always
    /// exact: the witnessing mapping is an isomorphism).
    pub exact: bool,
    /// Vertex correspondence `(a_vertex, b_vertex)` realizing `distance`.
    pub mapping: Vec<(u32, u32)>,
}

/// Limits for the exact solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GedConfig {
    /// Maximum combined vertex count `|V_a| + |V_b|` for the exact search.
    pub exact_limit: usize,
    /// Optional cap on branch-and-bound nodes; on exhaustion the best
    /// complete mapping found so far is returned with `exact = false`.
    pub node_budget: Option<u64>,
}

impl Default for GedConfig {
    fn default() -> Self {
        GedConfig {
            exact_limit: 16,
            node_budget: None,
        }
    }
}

struct Search<'a> {
    small: &'a Topology,
    large: &'a Topology,
    /// Small-side vertices in assignment order.
    order: Vec<u32>,
    /// Large-side candidates, highest degree first.
    targets: Vec<u32>,
    /// For each order position, small edges whose later endpoint sits at
    /// this position or beyond (the still-undecided edges).
    future: Vec<usize>,
    assigned: Vec<u32>,
    used: Vec<bool>,
    best_matched: usize,
    best_assignment: Vec<u32>,
    have_complete: bool,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(small: &'a Topology, large: &'a Topology, budget: u64) -> Self {
        let mut order: Vec<u32> = (0..small.vertex_count() as u32).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(small.degree(v)));
        let mut targets: Vec<u32> = (0..large.vertex_count() as u32).collect();
        targets.sort_by_key(|&v| std::cmp::Reverse(large.degree(v)));
        let pos_of = {
            let mut pos = vec![0usize; small.vertex_count()];
            for (i, &v) in order.iter().enumerate() {
                pos[v as usize] = i;
            }
            pos
        };
        let k = small.vertex_count();
        let mut future = vec![0usize; k + 1];
        for (u, v) in small.edges() {
            let later = pos_of[u as usize].max(pos_of[v as usize]);
            future[later] += 1;
        }
        for i in (0..k).rev() {
            future[i] += future[i + 1];
        }
        Search {
            small,
            large,
            order,
            targets,
            future,
            assigned: vec![u32::MAX; k],
            used: vec![false; large.vertex_count()],
            best_matched: 0,
            best_assignment: Vec::new(),
            have_complete: false,
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    fn dfs(&mut self, depth: usize, matched: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if depth == self.order.len() {
            if !self.have_complete || matched > self.best_matched {
                self.best_matched = matched;
                self.best_assignment = self.assigned.clone();
                self.have_complete = true;
            }
            return;
        }
        // Undecided small edges and unused large edges both cap the
        // remaining attainable matches.
        let attainable = self.future[depth].min(self.large.edge_count() - matched);
        if self.have_complete && matched + attainable <= self.best_matched {
            return;
        }
        let u = self.order[depth];
        for ti in 0..self.targets.len() {
            let t = self.targets[ti];
            if self.used[t as usize] {
                continue;
            }
            let mut gain = 0;
            for i in 0..depth {
                let w = self.order[i];
                if self.small.has_edge(u, w) && self.large.has_edge(t, self.assigned[w as usize]) {
                    gain += 1;
                }
            }
            self.assigned[u as usize] = t;
            self.used[t as usize] = true;
            self.dfs(depth + 1, matched + gain);
            self.used[t as usize] = false;
            self.assigned[u as usize] = u32::MAX;
            if self.exhausted {
                return;
            }
        }
    }
}

fn distance_from_matched(a: &Topology, b: &Topology, matched: usize) -> usize {
    let s = a.vertex_count().min(b.vertex_count());
    (a.vertex_count() + b.vertex_count() - 2 * s) + a.edge_count() + b.edge_count() - 2 * matched
}

/// Exact minimum edit distance by branch-and-bound over vertex mappings.
/// Errors when the combined size exceeds `cfg.exact_limit`.
pub fn ged_exact(a: &Topology, b: &Topology, cfg: &GedConfig) -> Result<GedResult> {
    let combined = a.vertex_count() + b.vertex_count();
    if combined > cfg.exact_limit {
        return Err(Error::TooLarge(format!(
            "{combined} combined vertices exceeds the exact GED limit {}; use ged_bounded",
            cfg.exact_limit
        )));
    }
    let swap = a.vertex_count() > b.vertex_count();
    let (small, large) = if swap { (b, a) } else { (a, b) };
    let mut search = Search::new(small, large, cfg.node_budget.unwrap_or(u64::MAX));
    search.dfs(0, 0);
    if !search.have_complete {
        // Budget too small to finish even one mapping; fall back to greedy.
        let mut r = ged_bounded(a, b);
        r.exact = r.distance == 0;
        return Ok(r);
    }
    let mapping = orient_mapping(&search.best_assignment, swap);
    Ok(GedResult {
        distance: distance_from_matched(a, b, search.best_matched),
        exact: !search.exhausted,
        mapping,
    })
}

fn orient_mapping(assignment: &[u32], swap: bool) -> Vec<(u32, u32)> {
    let mut mapping: Vec<(u32, u32)> = assignment
        .iter()
        .enumerate()
        .filter(|(_, &t)| t != u32::MAX)
        .map(|(s, &t)| if swap { (t, s as u32) } else { (s as u32, t) })
        .collect();
    mapping.sort_unstable();
    mapping
}

fn greedy_assignment(small: &Topology, large: &Topology) -> (usize, Vec<u32>) {
    let mut order: Vec<u32> = (0..small.vertex_count() as u32).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(small.degree(v)));
    let mut assigned = vec![u32::MAX; small.vertex_count()];
    let mut used = vec![false; large.vertex_count()];
    let mut matched = 0usize;
    for &u in &order {
        let mut best: Option<(usize, usize, u32)> = None; // (gain, deg gap, target)
        for t in 0..large.vertex_count() as u32 {
            if used[t as usize] {
                continue;
            }
            let gain = small
                .neighbors(u)
                .iter()
                .filter(|&&w| {
                    assigned[w as usize] != u32::MAX && large.has_edge(t, assigned[w as usize])
                })
                .count();
            let gap = small.degree(u).abs_diff(large.degree(t));
            let better = match &best {
                None => true,
                Some((bg, bgap, _)) => gain > *bg || (gain == *bg && gap < *bgap),
            };
            if better {
                best = Some((gain, gap, t));
            }
        }
        if let Some((gain, _, t)) = best {
            assigned[u as usize] = t;
            used[t as usize] = true;
            matched += gain;
        }
    }
    (matched, assigned)
}

/// Upper bound on the edit distance from a greedy degree-ordered assignment
/// (both orientations, keeping the tighter). Never below the exact distance.
pub fn ged_bounded(a: &Topology, b: &Topology) -> GedResult {
    let (m_ab, asg_ab) = greedy_assignment(a, b);
    let (m_ba, asg_ba) = greedy_assignment(b, a);
    let (matched, assignment, swap) = if m_ab >= m_ba {
        (m_ab, asg_ab, false)
    } else {
        (m_ba, asg_ba, true)
    };
    let distance = distance_from_matched(a, b, matched);
    GedResult {
        distance,
        exact: distance == 0,
        mapping: orient_mapping(&assignment, swap),
    }
}

/// Exact distance when the instance fits the configured limit, greedy
/// upper bound otherwise.
pub fn ged_auto(a: &Topology, b: &Topology, cfg: &GedConfig) -> GedResult {
    if a.vertex_count() + b.vertex_count() <= cfg.exact_limit {
        ged_exact(a, b, cfg).expect("size checked")
    } else {
        ged_bounded(a, b)
    }
}
