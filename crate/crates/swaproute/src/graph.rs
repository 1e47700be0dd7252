//! Interaction graphs: vertices are physical qubit sites, edges are sites
//! that may jointly undergo a two-qubit gate or a swap in one time step.
//!
//! A graph may carry two kinds of annotation beyond its edge list: pendant
//! pairs (an original vertex and its degree-1 partner, used as a routing
//! ancilla slot) and unused padding edges (present only to reach a target
//! degree; routers must never traverse them, see [`crate::route`]). Plain
//! graph queries such as [`InteractionGraph::diameter`] treat the edge list
//! as-is, padding included.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generation failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("malformed graph data: {0}")]
    Malformed(String),
}

/// Construction family, kept so routers can recover structural metadata
/// (the modified butterfly's split map is a pure function of `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    Butterfly { k: u32 },
    ModifiedButterfly { k: u32, r: usize },
    RandomRegular { r: usize },
    Lattice { rows: usize, cols: usize },
    Complete,
    Custom,
}

impl GraphFamily {
    pub fn tag(&self) -> String {
        match self {
            GraphFamily::Butterfly { k } => format!("butterfly-{k}"),
            GraphFamily::ModifiedButterfly { k, r } => format!("modified-butterfly-{k}-r{r}"),
            GraphFamily::RandomRegular { r } => format!("random-regular-{r}"),
            GraphFamily::Lattice { rows, cols } => format!("lattice-{rows}x{cols}"),
            GraphFamily::Complete => "complete".to_string(),
            GraphFamily::Custom => "custom".to_string(),
        }
    }

    pub fn parse(tag: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::Malformed(format!("unknown family tag {tag:?}"));
        if tag == "complete" {
            return Ok(GraphFamily::Complete);
        }
        if tag == "custom" {
            return Ok(GraphFamily::Custom);
        }
        if let Some(rest) = tag.strip_prefix("modified-butterfly-") {
            let (k, r) = rest.split_once("-r").ok_or_else(bad)?;
            return Ok(GraphFamily::ModifiedButterfly {
                k: k.parse().map_err(|_| bad())?,
                r: r.parse().map_err(|_| bad())?,
            });
        }
        if let Some(k) = tag.strip_prefix("butterfly-") {
            return Ok(GraphFamily::Butterfly { k: k.parse().map_err(|_| bad())? });
        }
        if let Some(r) = tag.strip_prefix("random-regular-") {
            return Ok(GraphFamily::RandomRegular { r: r.parse().map_err(|_| bad())? });
        }
        if let Some(dims) = tag.strip_prefix("lattice-") {
            let (rows, cols) = dims.split_once('x').ok_or_else(bad)?;
            return Ok(GraphFamily::Lattice {
                rows: rows.parse().map_err(|_| bad())?,
                cols: cols.parse().map_err(|_| bad())?,
            });
        }
        Err(bad())
    }
}

/// An undirected simple graph over dense vertex ids `[0, n)`.
///
/// Immutable after construction; edge list is normalized (`u < v`,
/// lexicographically sorted, deduplicated) so serialization is byte-stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    family: GraphFamily,
    pendant_pairs: Vec<(usize, usize)>,
    unused_edges: BTreeSet<(usize, usize)>,
}

pub(crate) fn norm_edge(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl InteractionGraph {
    pub fn new(
        n: usize,
        edges: Vec<(usize, usize)>,
        family: GraphFamily,
        pendant_pairs: Vec<(usize, usize)>,
        unused_edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::InvalidParameter("graph needs at least one vertex".into()));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u == v {
                return Err(GraphError::Malformed(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(GraphError::Malformed(format!("edge ({u},{v}) out of range for n={n}")));
            }
            norm.push(norm_edge(u, v));
        }
        norm.sort_unstable();
        norm.dedup();
        let unused: BTreeSet<(usize, usize)> =
            unused_edges.iter().map(|&(u, v)| norm_edge(u, v)).collect();
        for e in &unused {
            if norm.binary_search(e).is_err() {
                return Err(GraphError::Malformed(format!(
                    "unused edge ({},{}) is not an edge of the graph",
                    e.0, e.1
                )));
            }
        }
        let mut seen = vec![false; n];
        for &(orig, pendant) in &pendant_pairs {
            if norm.binary_search(&norm_edge(orig, pendant)).is_err() {
                return Err(GraphError::Malformed(format!(
                    "pendant pair ({orig},{pendant}) is not an edge"
                )));
            }
            for q in [orig, pendant] {
                if seen[q] {
                    return Err(GraphError::Malformed(format!(
                        "vertex {q} appears in more than one pendant pair"
                    )));
                }
                seen[q] = true;
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(InteractionGraph { n, edges: norm, adj, family, pendant_pairs, unused_edges: unused })
    }

    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        Self::new(n, edges, GraphFamily::Custom, Vec::new(), Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn family(&self) -> GraphFamily {
        self.family
    }

    /// Pendant pairs as `(original, pendant)` vertex ids.
    pub fn pendant_pairs(&self) -> &[(usize, usize)] {
        &self.pendant_pairs
    }

    pub fn unused_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.unused_edges
    }

    pub fn is_unused(&self, u: usize, v: usize) -> bool {
        self.unused_edges.contains(&norm_edge(u, v))
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&norm_edge(u, v)).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `Some(r)` iff every vertex has degree exactly `r`.
    pub fn regular_degree(&self) -> Option<usize> {
        let r = self.degree(0);
        (1..self.n).all(|v| self.degree(v) == r).then_some(r)
    }

    /// Edges that routers may traverse: the edge list minus padding.
    pub fn routable_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied().filter(|e| !self.unused_edges.contains(e))
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// BFS distances from `src`; unreachable vertices get `usize::MAX`.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Graph diameter by all-pairs BFS.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        let mut best = 0;
        for src in 0..self.n {
            for &d in &self.bfs_distances(src) {
                if d == usize::MAX {
                    return Err(GraphError::Disconnected);
                }
                best = best.max(d);
            }
        }
        Ok(best)
    }

    pub fn to_json(&self) -> String {
        // serde_json can only fail on non-string map keys or failing
        // Serialize impls; GraphFile has neither.
        serde_json::to_string_pretty(&GraphFile::from(self)).expect("graph serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(s).map_err(|e| GraphError::Malformed(e.to_string()))?;
        file.try_into()
    }
}

/// On-disk form: `{ "n", "edges", "family", "pendant_pairs", "unused_edges" }`.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
    family: String,
    pendant_pairs: Vec<(usize, usize)>,
    unused_edges: Vec<(usize, usize)>,
}

impl From<&InteractionGraph> for GraphFile {
    fn from(g: &InteractionGraph) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.clone(),
            family: g.family.tag(),
            pendant_pairs: g.pendant_pairs.clone(),
            unused_edges: g.unused_edges.iter().copied().collect(),
        }
    }
}

impl TryFrom<GraphFile> for InteractionGraph {
    type Error = GraphError;

    fn try_from(f: GraphFile) -> Result<Self, GraphError> {
        InteractionGraph::new(
            f.n,
            f.edges,
            GraphFamily::parse(&f.family)?,
            f.pendant_pairs,
            f.unused_edges,
        )
    }
}
