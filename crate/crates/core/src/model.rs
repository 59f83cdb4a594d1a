//! Hypernetworks: typed vertices joined by typed hyperedges, each with an
//! ordered list of sources and a single target.
//!
//! A [`Hypernetwork`] is immutable once built. Vertices and hyperedges are
//! stored sorted by id, and that lexicographic order fixes the layout of
//! state vectors and every iteration order in the crate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub id: String,
    pub vtype: String,
    /// Dimension of the internal phase space.
    pub dim: usize,
}

impl Vertex {
    pub fn new(id: impl Into<String>, vtype: impl Into<String>) -> Self {
        Vertex { id: id.into(), vtype: vtype.into(), dim: 1 }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hyperedge {
    pub id: String,
    pub etype: String,
    pub sources: Vec<String>,
    pub target: String,
}

impl Hyperedge {
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        etype: impl Into<String>,
        sources: impl IntoIterator<Item = S>,
        target: impl Into<String>,
    ) -> Self {
        Hyperedge {
            id: id.into(),
            etype: etype.into(),
            sources: sources.into_iter().map(Into::into).collect(),
            target: target.into(),
        }
    }

    pub fn order(&self) -> usize {
        self.sources.len()
    }
}

/// A failure of one of the two type-consistency axioms, or of the
/// equal-phase-space requirement for same-type vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Same-type hyperedges of different order.
    EdgeOrder { etype: String, first: String, second: String },
    /// Same-type hyperedges whose sources at `position` (0-based) differ in vertex type.
    EdgeSourceType { etype: String, first: String, second: String, position: usize },
    /// Same-type hyperedges whose targets differ in vertex type.
    EdgeTargetType { etype: String, first: String, second: String },
    /// Same-type vertices with different multisets of in-edge types.
    InEdgeTypes { vtype: String, first: String, second: String },
    /// Same-type vertices with different phase-space dimensions.
    Dimension { vtype: String, first: String, second: String },
}

impl Violation {
    /// Which type-consistency condition fails (1: hyperedges, 2: vertices).
    /// Dimension mismatches belong to neither and return `None`.
    pub fn condition(&self) -> Option<u8> {
        match self {
            Violation::EdgeOrder { .. }
            | Violation::EdgeSourceType { .. }
            | Violation::EdgeTargetType { .. } => Some(1),
            Violation::InEdgeTypes { .. } => Some(2),
            Violation::Dimension { .. } => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeOrder { etype, first, second } => write!(
                f,
                "condition 1: hyperedges {first} and {second} share type {etype} but differ in order"
            ),
            Violation::EdgeSourceType { etype, first, second, position } => write!(
                f,
                "condition 1: hyperedges {first} and {second} share type {etype} but source {} differs in vertex type",
                position + 1
            ),
            Violation::EdgeTargetType { etype, first, second } => write!(
                f,
                "condition 1: hyperedges {first} and {second} share type {etype} but their targets differ in vertex type"
            ),
            Violation::InEdgeTypes { vtype, first, second } => write!(
                f,
                "condition 2: vertices {first} and {second} share type {vtype} but receive different hyperedge types"
            ),
            Violation::Dimension { vtype, first, second } => write!(
                f,
                "vertices {first} and {second} share type {vtype} but have different dimensions"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid {kind} identifier {id:?}")]
    InvalidId { kind: &'static str, id: String },
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(String),
    #[error("duplicate hyperedge id {0}")]
    DuplicateEdge(String),
    #[error("hyperedge {edge} references unknown vertex {vertex}")]
    DanglingVertex { edge: String, vertex: String },
    #[error("hyperedge {0} has no sources")]
    EmptySources(String),
    #[error("vertex {0} has dimension 0")]
    ZeroDim(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("{}", format_violations(.0))]
    Inconsistent(Vec<Violation>),
    #[error("hyperedge {edge} targets the vertex subset but its source {source_vertex} lies outside it")]
    NotClosed { edge: String, source_vertex: String },
    #[error("an undirected hyperedge needs at least 2 vertices, got {0}")]
    UndirectedTooSmall(usize),
}

fn format_violations(vs: &[Violation]) -> String {
    let parts: Vec<String> = vs.iter().map(ToString::to_string).collect();
    format!("type-consistency violated: {}", parts.join("; "))
}

pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(char::is_whitespace)
}

#[derive(Clone, Debug)]
pub struct Hypernetwork {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Hyperedge>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
    sources: Vec<Vec<usize>>,
    targets: Vec<usize>,
    /// In-edges per vertex, sorted by (edge type, edge id).
    in_edges: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    total_dim: usize,
}

impl PartialEq for Hypernetwork {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Hypernetwork {}

impl Hypernetwork {
    /// Builds a hypernetwork and checks both type-consistency conditions.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Vertex>,
        edges: Vec<Hyperedge>,
    ) -> Result<Self, ModelError> {
        let net = Self::from_parts(name, vertices, edges)?;
        let violations = net.validate();
        if violations.is_empty() {
            Ok(net)
        } else {
            Err(ModelError::Inconsistent(violations))
        }
    }

    /// Builds a hypernetwork checking only identifiers and references.
    /// Use [`Hypernetwork::validate`] to inspect type consistency.
    pub fn from_parts(
        name: impl Into<String>,
        mut vertices: Vec<Vertex>,
        mut edges: Vec<Hyperedge>,
    ) -> Result<Self, ModelError> {
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));

        let mut vindex = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if !valid_id(&v.id) {
                return Err(ModelError::InvalidId { kind: "vertex", id: v.id.clone() });
            }
            if !valid_id(&v.vtype) {
                return Err(ModelError::InvalidId { kind: "vertex type", id: v.vtype.clone() });
            }
            if v.dim == 0 {
                return Err(ModelError::ZeroDim(v.id.clone()));
            }
            if vindex.insert(v.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateVertex(v.id.clone()));
            }
        }

        let mut eindex = HashMap::with_capacity(edges.len());
        let mut sources = Vec::with_capacity(edges.len());
        let mut targets = Vec::with_capacity(edges.len());
        let mut in_edges = vec![Vec::new(); vertices.len()];
        for (i, h) in edges.iter().enumerate() {
            if !valid_id(&h.id) {
                return Err(ModelError::InvalidId { kind: "hyperedge", id: h.id.clone() });
            }
            if !valid_id(&h.etype) {
                return Err(ModelError::InvalidId { kind: "hyperedge type", id: h.etype.clone() });
            }
            if eindex.insert(h.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateEdge(h.id.clone()));
            }
            if h.sources.is_empty() {
                return Err(ModelError::EmptySources(h.id.clone()));
            }
            let lookup = |v: &String| {
                vindex.get(v).copied().ok_or_else(|| ModelError::DanglingVertex {
                    edge: h.id.clone(),
                    vertex: v.clone(),
                })
            };
            let src = h.sources.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
            let tgt = lookup(&h.target)?;
            sources.push(src);
            targets.push(tgt);
            in_edges[tgt].push(i);
        }
        for list in &mut in_edges {
            list.sort_by(|&a, &b| edges[a].etype.cmp(&edges[b].etype).then(a.cmp(&b)));
        }

        let mut offsets = Vec::with_capacity(vertices.len());
        let mut total_dim = 0;
        for v in &vertices {
            offsets.push(total_dim);
            total_dim += v.dim;
        }

        Ok(Hypernetwork {
            name: name.into(),
            vertices,
            edges,
            vindex,
            eindex,
            sources,
            targets,
            in_edges,
            offsets,
            total_dim,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Vertices in lexicographic id order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Hyperedges in lexicographic id order.
    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vindex.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.eindex.get(id).copied()
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn edge(&self, i: usize) -> &Hyperedge {
        &self.edges[i]
    }

    /// Source vertex indices of hyperedge `e`, in order.
    pub fn sources(&self, e: usize) -> &[usize] {
        &self.sources[e]
    }

    pub fn target(&self, e: usize) -> usize {
        self.targets[e]
    }

    /// Hyperedges targeting vertex `v`, sorted by (edge type, edge id).
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Maximum hyperedge order; 0 for a hypernetwork without hyperedges.
    pub fn order(&self) -> usize {
        self.edges.iter().map(Hyperedge::order).max().unwrap_or(0)
    }

    /// Offset of vertex `v`'s block in a state vector.
    pub fn offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn vertex_types(&self) -> Vec<&str> {
        let mut ts: Vec<&str> = self.vertices.iter().map(|v| v.vtype.as_str()).collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    pub fn edge_types(&self) -> Vec<&str> {
        let mut ts: Vec<&str> = self.edges.iter().map(|h| h.etype.as_str()).collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    /// Lists every violation of the type-consistency conditions; empty iff
    /// the hypernetwork is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut first_of_type: BTreeMap<&str, usize> = BTreeMap::new();
        for (e, h) in self.edges.iter().enumerate() {
            let f = *first_of_type.entry(h.etype.as_str()).or_insert(e);
            if f == e {
                continue;
            }
            let g = &self.edges[f];
            if g.order() != h.order() {
                out.push(Violation::EdgeOrder {
                    etype: h.etype.clone(),
                    first: g.id.clone(),
                    second: h.id.clone(),
                });
            } else if let Some(position) = (0..h.order()).find(|&i| {
                self.vertices[self.sources[f][i]].vtype != self.vertices[self.sources[e][i]].vtype
            }) {
                out.push(Violation::EdgeSourceType {
                    etype: h.etype.clone(),
                    first: g.id.clone(),
                    second: h.id.clone(),
                    position,
                });
            }
            if self.vertices[self.targets[f]].vtype != self.vertices[self.targets[e]].vtype {
                out.push(Violation::EdgeTargetType {
                    etype: h.etype.clone(),
                    first: g.id.clone(),
                    second: h.id.clone(),
                });
            }
        }

        let mut first_vertex: BTreeMap<&str, usize> = BTreeMap::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            let f = *first_vertex.entry(vert.vtype.as_str()).or_insert(v);
            if f == v {
                continue;
            }
            if self.in_type_multiset(f) != self.in_type_multiset(v) {
                out.push(Violation::InEdgeTypes {
                    vtype: vert.vtype.clone(),
                    first: self.vertices[f].id.clone(),
                    second: vert.id.clone(),
                });
            }
            if self.vertices[f].dim != vert.dim {
                out.push(Violation::Dimension {
                    vtype: vert.vtype.clone(),
                    first: self.vertices[f].id.clone(),
                    second: vert.id.clone(),
                });
            }
        }
        out
    }

    /// Sorted in-edge types of `v`; in-edges are already sorted by type.
    pub fn in_type_multiset(&self, v: usize) -> Vec<&str> {
        self.in_edges[v].iter().map(|&e| self.edges[e].etype.as_str()).collect()
    }

    /// The sub-hypernetwork on `ids`: those vertices and every hyperedge
    /// targeting them. Fails if such a hyperedge has a source outside `ids`.
    pub fn sub_hypernetwork<S: AsRef<str>>(&self, ids: &[S]) -> Result<Hypernetwork, ModelError> {
        let mut keep = vec![false; self.vertices.len()];
        for id in ids {
            let v = self
                .vertex_index(id.as_ref())
                .ok_or_else(|| ModelError::UnknownVertex(id.as_ref().to_string()))?;
            keep[v] = true;
        }
        let mut edges = Vec::new();
        for (e, h) in self.edges.iter().enumerate() {
            if !keep[self.targets[e]] {
                continue;
            }
            if let Some(&s) = self.sources[e].iter().find(|&&s| !keep[s]) {
                return Err(ModelError::NotClosed {
                    edge: h.id.clone(),
                    source_vertex: self.vertices[s].id.clone(),
                });
            }
            edges.push(h.clone());
        }
        let vertices = self
            .vertices
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.clone())
            .collect();
        Hypernetwork::from_parts(self.name.clone(), vertices, edges)
    }
}

/// Expands an undirected hyperedge on `vertices` into directed hyperedges:
/// for every target in the list, one hyperedge per ordered `(m-1)`-tuple
/// drawn (with repetition) from the full list. That is `m^m` hyperedges of
/// order `m - 1`, all of type `etype`, with ids `{prefix}.{target}.{k}`.
pub fn expand_undirected<S: AsRef<str>>(
    vertices: &[S],
    etype: &str,
    prefix: &str,
) -> Result<Vec<Hyperedge>, ModelError> {
    let m = vertices.len();
    if m < 2 {
        return Err(ModelError::UndirectedTooSmall(m));
    }
    let order = m - 1;
    let tuples = m.pow(order as u32);
    let mut out = Vec::with_capacity(m * tuples);
    for target in vertices {
        for k in 0..tuples {
            // k written in base m, most significant digit first.
            let mut digits = vec![0; order];
            let mut rest = k;
            for d in digits.iter_mut().rev() {
                *d = rest % m;
                rest /= m;
            }
            out.push(Hyperedge::new(
                format!("{prefix}.{}.{k}", target.as_ref()),
                etype,
                digits.iter().map(|&d| vertices[d].as_ref().to_string()),
                target.as_ref(),
            ));
        }
    }
    Ok(out)
}
