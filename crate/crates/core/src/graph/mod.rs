//! Finite loopless graphs and digraphs with stable string identifiers.
//!
//! A [`Graph`] is immutable once built. Vertices keep their insertion order,
//! which is also the order of the internal indices used by the solvers; every
//! search and every report iterates in that order so results are reproducible.

mod io;
mod ops;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{from_json, to_dot, to_json, to_json_value, GraphDoc};
pub use ops::{
    dicycles_to_digraph, directed_cycle, disjoint_union, weak_components, DiCycles,
};

/// Per-vertex label map, `vertex -> (key -> value)`.
pub type Labels = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "graph")]
    Undirected,
    #[serde(rename = "digraph")]
    Directed,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Undirected => f.write_str("graph"),
            Kind::Directed => f.write_str("digraph"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{context}loop would be created at vertex {vertex:?}")]
    Loop { vertex: String, context: String },
    #[error("{context}duplicate edge {pair:?}")]
    DuplicateEdge { pair: (String, String), context: String },
    #[error("{context}duplicate vertex {vertex:?}")]
    DuplicateVertex { vertex: String, context: String },
    #[error("{context}unknown endpoint {vertex:?}")]
    UnknownEndpoint { vertex: String, context: String },
    #[error("directed cycle needs at least 2 vertices, got {0} (loop would be created)")]
    CycleTooShort(usize),
    #[error("mixed graph kinds: expected {expected}, found {found}")]
    MixedKinds { expected: Kind, found: Kind },
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

impl GraphError {
    pub(crate) fn with_context(self, ctx: &str) -> Self {
        let ctx = format!("{ctx}: ");
        match self {
            GraphError::Loop { vertex, .. } => GraphError::Loop { vertex, context: ctx },
            GraphError::DuplicateEdge { pair, .. } => GraphError::DuplicateEdge { pair, context: ctx },
            GraphError::DuplicateVertex { vertex, .. } => {
                GraphError::DuplicateVertex { vertex, context: ctx }
            }
            GraphError::UnknownEndpoint { vertex, .. } => {
                GraphError::UnknownEndpoint { vertex, context: ctx }
            }
            other => other,
        }
    }
}

/// Incremental constructor enforcing the graph invariants edge by edge.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    kind: Kind,
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    labels: Labels,
}

impl GraphBuilder {
    pub fn new(kind: Kind) -> Self {
        GraphBuilder {
            kind,
            names: Vec::new(),
            index: HashMap::new(),
            edges: BTreeSet::new(),
            labels: Labels::new(),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize, GraphError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(GraphError::DuplicateVertex { vertex: name, context: String::new() });
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn resolve(&self, name: &str) -> Result<usize, GraphError> {
        self.index_of(name).ok_or_else(|| GraphError::UnknownEndpoint {
            vertex: name.to_string(),
            context: String::new(),
        })
    }

    fn key(&self, a: usize, b: usize) -> (usize, usize) {
        match self.kind {
            Kind::Directed => (a, b),
            Kind::Undirected => (a.min(b), a.max(b)),
        }
    }

    pub fn add_edge_ids(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::Loop { vertex: self.names[a].clone(), context: String::new() });
        }
        let key = self.key(a, b);
        if !self.edges.insert(key) {
            return Err(GraphError::DuplicateEdge {
                pair: (self.names[a].clone(), self.names[b].clone()),
                context: String::new(),
            });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let (ia, ib) = (self.resolve(a)?, self.resolve(b)?);
        self.add_edge_ids(ia, ib)
    }

    pub fn has_edge_ids(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&self.key(a, b))
    }

    pub fn set_label(
        &mut self,
        vertex: &str,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<(), GraphError> {
        self.resolve(vertex)?;
        self.labels
            .entry(vertex.to_string())
            .or_default()
            .insert(key.into(), value.into());
        Ok(())
    }

    pub fn build(self) -> Graph {
        let n = self.names.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            match self.kind {
                Kind::Directed => {
                    succ[a].push(b);
                    pred[b].push(a);
                }
                Kind::Undirected => {
                    succ[a].push(b);
                    succ[b].push(a);
                }
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        if self.kind == Kind::Undirected {
            pred = succ.clone();
        }
        Graph {
            kind: self.kind,
            names: self.names,
            index: self.index,
            edges: self.edges,
            labels: self.labels,
            succ,
            pred,
        }
    }
}

/// A finite loopless graph (`Kind::Undirected`) or digraph (`Kind::Directed`).
///
/// Undirected edges are stored once, as `(lo, hi)` by vertex index.
#[derive(Debug, Clone)]
pub struct Graph {
    kind: Kind,
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    labels: Labels,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.names == other.names
            && self.edges == other.edges
            && self.labels == other.labels
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn empty(kind: Kind) -> Self {
        GraphBuilder::new(kind).build()
    }

    /// Builds a graph from name lists, validating every invariant.
    pub fn from_parts<S: AsRef<str>>(
        kind: Kind,
        vertices: &[S],
        edges: &[(S, S)],
    ) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(kind);
        for v in vertices {
            b.add_vertex(v.as_ref())?;
        }
        for (x, y) in edges {
            b.add_edge(x.as_ref(), y.as_ref())?;
        }
        Ok(b.build())
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_directed(&self) -> bool {
        self.kind == Kind::Directed
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    /// Edges as index pairs; arcs are `(tail, head)`, undirected edges `(lo, hi)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Out-neighbours (neighbours, for undirected graphs), sorted by index.
    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    /// In-neighbours (neighbours, for undirected graphs), sorted by index.
    pub fn pred(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    /// All vertices adjacent to `v` ignoring direction, sorted and deduplicated.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        if self.kind == Kind::Undirected {
            return self.succ[v].clone();
        }
        let mut all: Vec<usize> = self.succ[v].iter().chain(&self.pred[v]).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn degree(&self, v: usize) -> usize {
        match self.kind {
            Kind::Undirected => self.succ[v].len(),
            Kind::Directed => self.succ[v].len() + self.pred[v].len(),
        }
    }

    /// `true` iff `a -> b` is an arc (directed) or `ab` is an edge (undirected).
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn has_edge_named(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(x), Some(y)) => self.has_edge(x, y),
            _ => false,
        }
    }

    /// Out-neighbourhoods as bitsets over the vertex indices.
    pub fn succ_bits(&self) -> Vec<FixedBitSet> {
        Self::to_bits(&self.succ, self.names.len())
    }

    pub fn pred_bits(&self) -> Vec<FixedBitSet> {
        Self::to_bits(&self.pred, self.names.len())
    }

    fn to_bits(lists: &[Vec<usize>], n: usize) -> Vec<FixedBitSet> {
        lists
            .iter()
            .map(|l| {
                let mut b = FixedBitSet::with_capacity(n);
                for &v in l {
                    b.insert(v);
                }
                b
            })
            .collect()
    }

    /// Induced subgraph on `keep` (indices), preserving vertex order and labels.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut b = GraphBuilder::new(self.kind);
        let mut map = HashMap::new();
        for &v in &sorted {
            let id = b.add_vertex(self.names[v].clone()).expect("names are unique");
            map.insert(v, id);
        }
        for &(x, y) in &self.edges {
            if let (Some(&a), Some(&c)) = (map.get(&x), map.get(&y)) {
                b.add_edge_ids(a, c).expect("subgraph of a valid graph");
            }
        }
        for &v in &sorted {
            if let Some(l) = self.labels.get(&self.names[v]) {
                b.labels.insert(self.names[v].clone(), l.clone());
            }
        }
        b.build()
    }

    /// Returns a builder pre-loaded with this graph, for extending it.
    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder {
            kind: self.kind,
            names: self.names.clone(),
            index: self.index.clone(),
            edges: self.edges.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Same vertices with every arc reversed; undirected graphs are returned as is.
    pub fn reversed(&self) -> Graph {
        let mut b = GraphBuilder::new(self.kind);
        for n in &self.names {
            b.add_vertex(n.clone()).expect("names are unique");
        }
        for &(x, y) in &self.edges {
            b.add_edge_ids(y, x).expect("reversal keeps invariants");
        }
        b.labels = self.labels.clone();
        b.build()
    }
}
