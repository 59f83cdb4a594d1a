//! Augmented hypernetworks.
//!
//! Given a core with `k + 1` same-type nodes `v_0..v_k`, two new nodes
//! `w_0, w_1` are added. Every permutation `σ` of `{0..k}` contributes an
//! order-`k` hyperedge with sources `(v_σ(1), .., v_σ(k))` targeting `w_0`
//! when `σ` is even and `w_1` when it is odd. No hyperedge leaves the new
//! nodes, so the core keeps its own dynamics.

use itertools::Itertools;
use thiserror::Error;

use crate::model::{Hyperedge, Hypernetwork, ModelError, Vertex};
use crate::perm::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AugmentError {
    #[error("augmentation needs at least 3 core nodes, got {0}")]
    TooFewNodes(usize),
    #[error("core nodes {0} and {1} have different types")]
    MixedTypes(String, String),
    #[error("core node {0} listed twice")]
    RepeatedNode(String),
    #[error("core nodes must be one-dimensional; {0} is not")]
    NotOneDimensional(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentationSpec {
    /// `v_0..v_k`, in order.
    pub nodes: Vec<String>,
    pub w_ids: [String; 2],
    pub w_type: String,
    /// Type of the order-`k` hyperedges; also the prefix of their ids.
    pub hyper_type: String,
    pub loop_type: String,
    pub name: Option<String>,
}

impl AugmentationSpec {
    pub fn new<S: Into<String>>(nodes: impl IntoIterator<Item = S>) -> Self {
        AugmentationSpec {
            nodes: nodes.into_iter().map(Into::into).collect(),
            w_ids: ["w0".into(), "w1".into()],
            w_type: "square".into(),
            hyper_type: "h".into(),
            loop_type: "loop_s".into(),
            name: None,
        }
    }

    pub fn k(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }
}

/// Id of `h_σ`: the hyperedge type followed by the image tuple.
pub fn hyperedge_id(hyper_type: &str, sigma: &Perm) -> String {
    let sep = if sigma.len() <= 10 { "" } else { "_" };
    format!("{hyper_type}_{}", sigma.images().iter().join(sep))
}

pub fn augment(core: &Hypernetwork, spec: &AugmentationSpec) -> Result<Hypernetwork, AugmentError> {
    let n = spec.nodes.len();
    if n < 3 {
        return Err(AugmentError::TooFewNodes(n));
    }
    let mut idx = Vec::with_capacity(n);
    for id in &spec.nodes {
        let v = core.vertex_index(id).ok_or_else(|| ModelError::UnknownVertex(id.clone()))?;
        if idx.contains(&v) {
            return Err(AugmentError::RepeatedNode(id.clone()));
        }
        if core.vertex(v).dim != 1 {
            return Err(AugmentError::NotOneDimensional(id.clone()));
        }
        idx.push(v);
    }
    let first = core.vertex(idx[0]);
    if let Some(&v) = idx.iter().find(|&&v| core.vertex(v).vtype != first.vtype) {
        return Err(AugmentError::MixedTypes(first.id.clone(), core.vertex(v).id.clone()));
    }

    let mut vertices = core.vertices().to_vec();
    let mut edges = core.edges().to_vec();
    for w in &spec.w_ids {
        vertices.push(Vertex::new(w.clone(), spec.w_type.clone()));
        edges.push(Hyperedge::new(format!("loop_{w}"), spec.loop_type.clone(), [w.clone()], w.clone()));
    }
    for sigma in Perm::all(n) {
        let sources = sigma.images()[1..].iter().map(|&i| spec.nodes[i].clone());
        let target = spec.w_ids[sigma.parity() as usize].clone();
        edges.push(Hyperedge::new(hyperedge_id(&spec.hyper_type, &sigma), spec.hyper_type.clone(), sources, target));
    }
    let name = spec.name.clone().unwrap_or_else(|| format!("{}_augmented", core.name()));
    Ok(Hypernetwork::new(name, vertices, edges)?)
}
