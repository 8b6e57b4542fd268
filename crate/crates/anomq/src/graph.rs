//! Attributed-network data model and file ingestion.
//!
//! Graphs are undirected, with dense integer vertex ids `0..n`. Each vertex
//! may carry a row of real-valued observations (one column per time step)
//! and a calibrated p-value in `(0, 1]`. The structure is immutable once
//! loaded, so it can be shared freely across concurrent queries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense row-major matrix of per-vertex observations, one row per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct AttrMatrix {
    data: Vec<f64>,
    cols: usize,
}

impl AttrMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        AttrMatrix {
            data: vec![0.0; rows * cols],
            cols,
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput(
                "attribute rows have inconsistent lengths".into(),
            ));
        }
        Ok(AttrMatrix {
            data: rows.into_iter().flatten().collect(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.cols..(v + 1) * self.cols]
    }

    fn row_mut(&mut self, v: usize) -> &mut [f64] {
        &mut self.data[v * self.cols..(v + 1) * self.cols]
    }
}

/// Counters reported by [`AttributedGraph::load_edge_list`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub vertices: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Counters reported by [`AttributedGraph::load_attributes`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AttrLoadStats {
    pub rows: usize,
    pub cols: usize,
    pub missing_filled: usize,
}

/// An undirected attributed network.
///
/// Invariants: no self-loops, no duplicate edges, adjacency lists sorted and
/// symmetric. If p-values are present every entry lies in `(0, 1]`; if the
/// attribute matrix is present it has exactly one row per vertex.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
    attrs: Option<AttrMatrix>,
    pvalues: Option<Vec<f64>>,
}

impl AttributedGraph {
    /// Builds a graph from an explicit edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::VertexOutOfRange { id: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(AttributedGraph {
            adjacency,
            edge_count: edge_count / 2,
            attrs: None,
            pvalues: None,
        })
    }

    /// Reads a tab-separated edge list (`src<TAB>dst` per line, `#` comments
    /// ignored). Self-loops and duplicate edges are dropped and counted.
    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Self, LoadStats)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);

        let mut raw: Vec<(u32, u32)> = Vec::new();
        let mut self_loops = 0usize;
        let mut max_id: Option<u32> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let (src, dst) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(malformed(path, idx + 1, "expected \"src<TAB>dst\""));
                }
            };
            let u: u32 = src
                .parse()
                .map_err(|_| malformed(path, idx + 1, &format!("bad vertex id {src:?}")))?;
            let v: u32 = dst
                .parse()
                .map_err(|_| malformed(path, idx + 1, &format!("bad vertex id {dst:?}")))?;
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u.max(v))));
            if u == v {
                self_loops += 1;
                continue;
            }
            raw.push((u.min(v), u.max(v)));
        }

        let n = match max_id {
            Some(m) => m as usize + 1,
            None => return Err(Error::EmptyGraph),
        };
        raw.sort_unstable();
        let before = raw.len();
        raw.dedup();
        let duplicates = before - raw.len();

        let graph = Self::from_edges(n, &raw)?;
        let stats = LoadStats {
            vertices: n,
            edges: graph.edge_count,
            self_loops_dropped: self_loops,
            duplicates_dropped: duplicates,
        };
        Ok((graph, stats))
    }

    /// Writes the edge list in the same format `load_edge_list` reads.
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        for (u, v) in self.edges() {
            writeln!(w, "{u}\t{v}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Reads per-vertex attribute rows from a CSV with header
    /// `vertex,t_0,...,t_{T-1}`. Vertices without a row are filled with
    /// `fill` and counted in the returned stats.
    pub fn load_attributes(
        &mut self,
        path: impl AsRef<Path>,
        fill: f64,
    ) -> Result<AttrLoadStats> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines().enumerate();

        let header = match lines.next() {
            Some((_, Ok(h))) => h,
            Some((_, Err(source))) => {
                return Err(Error::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
            None => return Err(malformed(path, 1, "missing header row")),
        };
        let cols = header.split(',').count();
        if cols < 2 || !header.split(',').next().unwrap().trim().eq_ignore_ascii_case("vertex") {
            return Err(malformed(path, 1, "header must be \"vertex,t_0,...\""));
        }
        let t = cols - 1;

        let n = self.vertex_count();
        let mut matrix = AttrMatrix::new(n, t);
        for cell in matrix.data.iter_mut() {
            *cell = fill;
        }
        let mut seen = vec![false; n];
        for (idx, line) in lines {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return Err(malformed(
                    path,
                    idx + 1,
                    &format!("expected {cols} columns, found {}", fields.len()),
                ));
            }
            let v: usize = fields[0].trim().parse().map_err(|_| {
                malformed(path, idx + 1, &format!("bad vertex id {:?}", fields[0]))
            })?;
            if v >= n {
                return Err(Error::VertexOutOfRange { id: v as u32, n });
            }
            if seen[v] {
                return Err(malformed(path, idx + 1, &format!("duplicate row for vertex {v}")));
            }
            seen[v] = true;
            let row = matrix.row_mut(v);
            for (c, field) in fields[1..].iter().enumerate() {
                row[c] = field.trim().parse().map_err(|_| {
                    malformed(
                        path,
                        idx + 1,
                        &format!("non-numeric cell {:?} in column t_{c}", field),
                    )
                })?;
            }
        }
        let missing = seen.iter().filter(|s| !**s).count();
        self.attrs = Some(matrix);
        Ok(AttrLoadStats {
            rows: n - missing,
            cols: t,
            missing_filled: missing,
        })
    }

    /// Writes the attribute matrix as `vertex,t_0,...` CSV.
    pub fn write_attributes(&self, path: impl AsRef<Path>) -> Result<()> {
        let attrs = self.attrs.as_ref().ok_or(Error::MissingAttributes)?;
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        let header: Vec<String> = (0..attrs.cols()).map(|c| format!("t_{c}")).collect();
        writeln!(w, "vertex,{}", header.join(",")).map_err(io_err)?;
        for v in 0..self.vertex_count() {
            let cells: Vec<String> = attrs.row(v).iter().map(|x| x.to_string()).collect();
            writeln!(w, "{v},{}", cells.join(",")).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Reads a `vertex,pvalue` CSV. The file must cover vertices `0..=max`
    /// contiguously; ids beyond the current vertex count extend the graph
    /// with isolated vertices (an edge list cannot name them).
    pub fn load_pvalues(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || (idx == 0 && trimmed.eq_ignore_ascii_case("vertex,pvalue")) {
                continue;
            }
            let (a, b) = trimmed
                .split_once(',')
                .ok_or_else(|| malformed(path, idx + 1, "expected \"vertex,pvalue\""))?;
            let v: usize = a.trim().parse().map_err(|_| {
                malformed(path, idx + 1, &format!("bad vertex id {a:?}"))
            })?;
            let p: f64 = b.trim().parse().map_err(|_| {
                malformed(path, idx + 1, &format!("bad p-value {b:?}"))
            })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(malformed(path, idx + 1, &format!("p-value {p} outside (0, 1]")));
            }
            entries.push((v, p));
        }
        if entries.is_empty() {
            return Err(malformed(path, 1, "no p-value rows"));
        }
        let max = entries.iter().map(|e| e.0).max().unwrap();
        let mut pvals = vec![f64::NAN; max + 1];
        for (i, (v, p)) in entries.iter().enumerate() {
            if !pvals[*v].is_nan() {
                return Err(malformed(path, i + 1, &format!("duplicate row for vertex {v}")));
            }
            pvals[*v] = *p;
        }
        if let Some(gap) = pvals.iter().position(|p| p.is_nan()) {
            return Err(malformed(path, 1, &format!("missing p-value for vertex {gap}")));
        }
        while self.adjacency.len() < pvals.len() {
            self.adjacency.push(Vec::new());
        }
        self.pvalues = Some(pvals);
        Ok(())
    }

    /// Writes p-values as `vertex,pvalue` CSV.
    pub fn write_pvalues(&self, path: impl AsRef<Path>) -> Result<()> {
        let pvals = self.pvalues.as_ref().ok_or(Error::MissingPValues)?;
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        writeln!(w, "vertex,pvalue").map_err(io_err)?;
        for (v, p) in pvals.iter().enumerate() {
            writeln!(w, "{v},{p}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    pub fn set_pvalues(&mut self, pvals: Vec<f64>) -> Result<()> {
        if pvals.len() != self.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "expected {} p-values, got {}",
                self.vertex_count(),
                pvals.len()
            )));
        }
        if let Some(bad) = pvals.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidInput(format!("p-value {bad} outside (0, 1]")));
        }
        self.pvalues = Some(pvals);
        Ok(())
    }

    pub fn set_attrs(&mut self, attrs: AttrMatrix) -> Result<()> {
        if attrs.rows() != self.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "attribute matrix has {} rows for {} vertices",
                attrs.rows(),
                self.vertex_count()
            )));
        }
        self.attrs = Some(attrs);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Iterates all edges once, in canonical `(min, max)` order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    pub fn attrs(&self) -> Option<&AttrMatrix> {
        self.attrs.as_ref()
    }

    pub fn pvalues(&self) -> Option<&[f64]> {
        self.pvalues.as_deref()
    }

    /// Vertex-induced subgraph: keeps exactly the host edges with both
    /// endpoints in `vs`.
    pub fn induced_subgraph(&self, vs: &[u32]) -> Result<Subgraph> {
        let n = self.vertex_count();
        let mut vertices: Vec<u32> = vs.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&bad) = vertices.iter().find(|&&v| v as usize >= n) {
            return Err(Error::VertexOutOfRange { id: bad, n });
        }
        let mut edges = Vec::new();
        for &u in &vertices {
            for &v in self.neighbors(u) {
                if v > u && vertices.binary_search(&v).is_ok() {
                    edges.push((u, v));
                }
            }
        }
        Ok(Subgraph { vertices, edges })
    }
}

fn malformed(path: &Path, line: usize, msg: &str) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    }
}

/// A vertex-induced subgraph of an [`AttributedGraph`]. Vertices are sorted;
/// edges are exactly the host edges within the vertex set, in `(min, max)`
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subgraph {
    vertices: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Subgraph {
    pub fn empty() -> Self {
        Subgraph::default()
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}
