//! Query graphs: the small target shapes a result subgraph must
//! approximately match, plus builders for the standard shape families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_QUERY_VERTICES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeTag {
    Ring,
    Line,
    Star,
    Bipartite,
    Tree,
    Custom,
}

/// A connected, unlabeled target shape with at least two vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryGraph {
    adjacency: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    shape_tag: ShapeTag,
}

impl QueryGraph {
    fn build(m: usize, mut edges: Vec<(u32, u32)>, tag: ShapeTag) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidQuery(format!(
                "query must have at least 2 vertices, got {m}"
            )));
        }
        if m > MAX_QUERY_VERTICES {
            return Err(Error::InvalidQuery(format!("query too large ({m} vertices)")));
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::InvalidQuery(format!("self-loop at query vertex {}", e.0)));
            }
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); m];
        for &(u, v) in &edges {
            if u as usize >= m || v as usize >= m {
                return Err(Error::InvalidQuery(format!(
                    "query edge ({u}, {v}) out of range for {m} vertices"
                )));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let q = QueryGraph {
            adjacency,
            edges,
            shape_tag: tag,
        };
        if !q.is_connected() {
            return Err(Error::InvalidQuery("query graph is not connected".into()));
        }
        Ok(q)
    }

    /// Cycle on `k` vertices (`k` edges).
    pub fn ring(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidQuery(format!("ring needs k >= 3, got {k}")));
        }
        let edges = (0..k).map(|i| (i as u32, ((i + 1) % k) as u32)).collect();
        Self::build(k, edges, ShapeTag::Ring)
    }

    /// Path on `k` vertices (`k - 1` edges).
    pub fn line(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidQuery(format!("line needs k >= 2, got {k}")));
        }
        let edges = (0..k - 1).map(|i| (i as u32, (i + 1) as u32)).collect();
        Self::build(k, edges, ShapeTag::Line)
    }

    /// Star with `k` leaves: vertex 0 is the center, `k + 1` vertices total.
    pub fn star(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidQuery("star needs at least one leaf".into()));
        }
        let edges = (1..=k).map(|i| (0u32, i as u32)).collect();
        Self::build(k + 1, edges, ShapeTag::Star)
    }

    /// Complete bipartite graph with sides of size `a` and `b`.
    pub fn bipartite(a: usize, b: usize) -> Result<Self> {
        if a < 1 || b < 1 {
            return Err(Error::InvalidQuery(format!(
                "bipartite sides must be positive, got ({a}, {b})"
            )));
        }
        let mut edges = Vec::with_capacity(a * b);
        for i in 0..a {
            for j in 0..b {
                edges.push((i as u32, (a + j) as u32));
            }
        }
        Self::build(a + b, edges, ShapeTag::Bipartite)
    }

    /// Balanced tree with the given branching factor and depth (root at
    /// depth 0, vertices numbered breadth-first).
    pub fn tree(branching: usize, depth: usize) -> Result<Self> {
        if branching < 1 || depth < 1 {
            return Err(Error::InvalidQuery(format!(
                "tree needs branching >= 1 and depth >= 1, got ({branching}, {depth})"
            )));
        }
        let mut edges = Vec::new();
        let mut level: Vec<usize> = vec![0];
        let mut next_id = 1usize;
        for _ in 0..depth {
            let mut next_level = Vec::with_capacity(level.len() * branching);
            for &parent in &level {
                for _ in 0..branching {
                    if next_id > MAX_QUERY_VERTICES {
                        return Err(Error::InvalidQuery("tree too large".into()));
                    }
                    edges.push((parent as u32, next_id as u32));
                    next_level.push(next_id);
                    next_id += 1;
                }
            }
            level = next_level;
        }
        Self::build(next_id, edges, ShapeTag::Tree)
    }

    /// Explicit edge list; vertex ids must be dense `0..m` and the graph
    /// connected.
    pub fn from_edges(edges: &[(u32, u32)]) -> Result<Self> {
        let m = edges
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0);
        Self::build(m, edges.to_vec(), ShapeTag::Custom)
    }

    pub fn from_spec(spec: &QuerySpec) -> Result<Self> {
        match spec {
            QuerySpec::Shape(ShapeSpec::Ring { k }) => Self::ring(*k),
            QuerySpec::Shape(ShapeSpec::Line { k }) => Self::line(*k),
            QuerySpec::Shape(ShapeSpec::Star { k }) => Self::star(*k),
            QuerySpec::Shape(ShapeSpec::Bipartite { a, b }) => Self::bipartite(*a, *b),
            QuerySpec::Shape(ShapeSpec::Tree { branching, depth }) => {
                Self::tree(*branching, *depth)
            }
            QuerySpec::Edges { edges } => Self::from_edges(edges),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn shape_tag(&self) -> ShapeTag {
        self.shape_tag
    }

    fn is_connected(&self) -> bool {
        let m = self.vertex_count();
        if m == 0 {
            return false;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == m
    }
}

/// Serializable description of a query graph, accepted everywhere a query
/// can be configured: either a named shape (`{"shape": "ring", "k": 3}`)
/// or an explicit edge list (`{"edges": [[0, 1], ...]}`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuerySpec {
    Shape(ShapeSpec),
    Edges { edges: Vec<(u32, u32)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum ShapeSpec {
    Ring { k: usize },
    Line { k: usize },
    Star { k: usize },
    Bipartite { a: usize, b: usize },
    Tree { branching: usize, depth: usize },
}

impl QuerySpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidQuery(format!("bad query spec: {e}")))
    }

    pub fn build(&self) -> Result<QueryGraph> {
        QueryGraph::from_spec(self)
    }
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuerySpec::Shape(ShapeSpec::Ring { k }) => write!(f, "ring({k})"),
            QuerySpec::Shape(ShapeSpec::Line { k }) => write!(f, "line({k})"),
            QuerySpec::Shape(ShapeSpec::Star { k }) => write!(f, "star({k})"),
            QuerySpec::Shape(ShapeSpec::Bipartite { a, b }) => write!(f, "bipartite({a},{b})"),
            QuerySpec::Shape(ShapeSpec::Tree { branching, depth }) => {
                write!(f, "tree({branching},{depth})")
            }
            QuerySpec::Edges { edges } => write!(f, "edges({})", edges.len()),
        }
    }
}
