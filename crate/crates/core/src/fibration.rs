//! Hypergraph fibrations and quotient hypernetworks.
//!
//! A fibration `φ: N → N'` maps vertices to vertices and hyperedges to
//! hyperedges, preserving types, ordered sources and targets, and restricts
//! at every vertex to a bijection between in-edge sets. It induces the
//! linear map `R_φ` copying block `x_{φ(v)}` into slot `v`, which carries
//! solutions of any `N'`-admissible system to solutions of the `N`-admissible
//! system with the same response functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::admissible::{AdmissibleError, AdmissibleSystem};
use crate::format::strip_comment;
use crate::model::{Hyperedge, Hypernetwork, ModelError, Vertex};
use crate::partition::{is_balanced, Balance, Imbalance, Partition};
use crate::poly::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibrationError {
    #[error("map line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("map line {line}: {kind} {id} mapped twice")]
    Duplicate { line: usize, kind: char, id: String },
    #[error("partition is not balanced: {0}")]
    NotBalanced(Imbalance),
    #[error("map is not a fibration")]
    NotAFibration(FibrationReport),
    #[error("vertex type {0} uses different response functions in the two systems")]
    IncompatibleLibrary(String),
    #[error("point has dimension {got}, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Admissible(#[from] AdmissibleError),
}

/// Vertex and hyperedge maps by id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FibrationMap {
    pub vmap: BTreeMap<String, String>,
    pub hmap: BTreeMap<String, String>,
}

impl FibrationMap {
    pub fn identity(net: &Hypernetwork) -> Self {
        FibrationMap {
            vmap: net.vertices().iter().map(|v| (v.id.clone(), v.id.clone())).collect(),
            hmap: net.edges().iter().map(|h| (h.id.clone(), h.id.clone())).collect(),
        }
    }

    /// Inclusion of a sub-hypernetwork into its parent (ids are shared).
    pub fn inclusion(sub: &Hypernetwork) -> Self {
        Self::identity(sub)
    }

    /// Parses lines `v <id> -> <id>` and `h <id> -> <id>`.
    pub fn parse(text: &str) -> Result<Self, FibrationError> {
        let mut map = FibrationMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let [kind, from, arrow, to] = tokens[..] else {
                return Err(FibrationError::Syntax { line, message: "expected `v|h <id> -> <id>`".into() });
            };
            if arrow != "->" {
                return Err(FibrationError::Syntax { line, message: format!("expected `->`, found `{arrow}`") });
            }
            let (target, k) = match kind {
                "v" => (&mut map.vmap, 'v'),
                "h" => (&mut map.hmap, 'h'),
                other => {
                    return Err(FibrationError::Syntax { line, message: format!("unknown map kind `{other}`") })
                }
            };
            if target.insert(from.to_string(), to.to_string()).is_some() {
                return Err(FibrationError::Duplicate { line, kind: k, id: from.to_string() });
            }
        }
        Ok(map)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.vmap {
            out += &format!("v {a} -> {b}\n");
        }
        for (a, b) in &self.hmap {
            out += &format!("h {a} -> {b}\n");
        }
        out
    }

    pub fn is_surjective(&self, target: &Hypernetwork) -> bool {
        let vs: BTreeSet<&str> = self.vmap.values().map(String::as_str).collect();
        let hs: BTreeSet<&str> = self.hmap.values().map(String::as_str).collect();
        target.vertices().iter().all(|v| vs.contains(v.id.as_str()))
            && target.edges().iter().all(|h| hs.contains(h.id.as_str()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: u8,
    pub description: &'static str,
    pub failures: Vec<String>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Pass/fail for each of the six fibration conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub conditions: Vec<ConditionReport>,
}

impl FibrationReport {
    pub fn is_fibration(&self) -> bool {
        self.conditions.iter().all(ConditionReport::passed)
    }
}

impl fmt::Display for FibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            if c.passed() {
                writeln!(f, "condition {} ({}): pass", c.condition, c.description)?;
            } else {
                writeln!(f, "condition {} ({}): fail", c.condition, c.description)?;
                for msg in &c.failures {
                    writeln!(f, "  {msg}")?;
                }
            }
        }
        write!(f, "fibration: {}", self.is_fibration())
    }
}

/// Checks every fibration condition and reports the offending ids.
pub fn check_fibration(n: &Hypernetwork, n2: &Hypernetwork, phi: &FibrationMap) -> FibrationReport {
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let mut c3 = Vec::new();
    let mut c4 = Vec::new();
    let mut c5 = Vec::new();
    let mut c6 = Vec::new();

    let vimage = |v: usize| -> Option<usize> { phi.vmap.get(&n.vertex(v).id).and_then(|id| n2.vertex_index(id)) };
    let himage = |e: usize| -> Option<usize> { phi.hmap.get(&n.edge(e).id).and_then(|id| n2.edge_index(id)) };

    for (v, vert) in n.vertices().iter().enumerate() {
        match (phi.vmap.get(&vert.id), vimage(v)) {
            (None, _) => c1.push(format!("vertex {} is not mapped", vert.id)),
            (Some(id), None) => c1.push(format!("vertex {} maps to unknown vertex {id}", vert.id)),
            (Some(_), Some(w)) => {
                let img = n2.vertex(w);
                if img.vtype != vert.vtype {
                    c3.push(format!("vertex {} of type {} maps to {} of type {}", vert.id, vert.vtype, img.id, img.vtype));
                }
                if img.dim != vert.dim {
                    c3.push(format!("vertex {} of dim {} maps to {} of dim {}", vert.id, vert.dim, img.id, img.dim));
                }
            }
        }
    }
    for id in phi.vmap.keys().filter(|id| n.vertex_index(id).is_none()) {
        c1.push(format!("map mentions unknown vertex {id}"));
    }

    for (e, h) in n.edges().iter().enumerate() {
        let Some(img) = himage(e) else {
            match phi.hmap.get(&h.id) {
                None => c2.push(format!("hyperedge {} is not mapped", h.id)),
                Some(id) => c2.push(format!("hyperedge {} maps to unknown hyperedge {id}", h.id)),
            }
            continue;
        };
        let g = n2.edge(img);
        if g.etype != h.etype {
            c3.push(format!("hyperedge {} of type {} maps to {} of type {}", h.id, h.etype, g.id, g.etype));
        }
        let mapped: Vec<Option<usize>> = n.sources(e).iter().map(|&s| vimage(s)).collect();
        if mapped.len() != n2.sources(img).len() {
            c4.push(format!("hyperedge {} has order {} but its image {} has order {}", h.id, h.order(), g.id, g.order()));
        } else if mapped.iter().zip(n2.sources(img)).any(|(a, b)| *a != Some(*b)) {
            c4.push(format!("sources of {} do not map onto the sources of {}", h.id, g.id));
        }
        if vimage(n.target(e)) != Some(n2.target(img)) {
            c5.push(format!("target of {} does not map to the target of {}", h.id, g.id));
        }
    }
    for id in phi.hmap.keys().filter(|id| n.edge_index(id).is_none()) {
        c2.push(format!("map mentions unknown hyperedge {id}"));
    }

    for (v, vert) in n.vertices().iter().enumerate() {
        let Some(w) = vimage(v) else { continue };
        let mut images: Vec<Option<usize>> = n.in_edges(v).iter().map(|&e| himage(e)).collect();
        images.sort_unstable();
        let mut expected: Vec<Option<usize>> = n2.in_edges(w).iter().map(|&e| Some(e)).collect();
        expected.sort_unstable();
        if images != expected {
            c6.push(format!(
                "in-edges of {} do not map bijectively onto the in-edges of {}",
                vert.id,
                n2.vertex(w).id
            ));
        }
    }

    let conditions = [
        (1, "vertices map to vertices", c1),
        (2, "hyperedges map to hyperedges", c2),
        (3, "types are preserved", c3),
        (4, "ordered sources are preserved", c4),
        (5, "targets are preserved", c5),
        (6, "in-edge sets map bijectively", c6),
    ]
    .into_iter()
    .map(|(condition, description, failures)| ConditionReport { condition, description, failures })
    .collect();
    FibrationReport { conditions }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientResult {
    pub quotient: Hypernetwork,
    pub phi: FibrationMap,
    /// One vertex id per class, by colour.
    pub representatives: Vec<String>,
}

/// Collapses each class of a balanced partition to its smallest vertex.
/// Quotient vertices keep their representative's id; quotient hyperedges are
/// the representative's in-edges, keeping their ids, with sources replaced
/// by their classes' representatives.
pub fn quotient(net: &Hypernetwork, p: &Partition) -> Result<QuotientResult, FibrationError> {
    let cert = match is_balanced(net, p) {
        Balance::Balanced(c) => c,
        Balance::Unbalanced(why) => return Err(FibrationError::NotBalanced(why)),
    };
    let rep_id = |v: usize| net.vertex(cert.representatives[p.colour(v) - 1]).id.clone();

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for &r in &cert.representatives {
        let vert = net.vertex(r);
        vertices.push(Vertex::new(vert.id.clone(), vert.vtype.clone()).with_dim(vert.dim));
        for &e in net.in_edges(r) {
            let h = net.edge(e);
            let sources: Vec<String> = net.sources(e).iter().map(|&s| rep_id(s)).collect();
            edges.push(Hyperedge::new(h.id.clone(), h.etype.clone(), sources, vert.id.clone()));
        }
    }
    let quotient = Hypernetwork::new(format!("{}_quotient", net.name()), vertices, edges)?;

    let mut phi = FibrationMap::default();
    for v in 0..net.vertex_count() {
        phi.vmap.insert(net.vertex(v).id.clone(), rep_id(v));
        for &(e, er) in &cert.to_representative[v] {
            phi.hmap.insert(net.edge(e).id.clone(), net.edge(er).id.clone());
        }
    }
    let representatives = cert.representatives.iter().map(|&r| net.vertex(r).id.clone()).collect();
    Ok(QuotientResult { quotient, phi, representatives })
}

/// The linear map `R_φ`: state index `i` of `N` copies index `index[i]` of `N'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPhi {
    pub index: Vec<usize>,
    pub source_dim: usize,
}

impl RPhi {
    pub fn apply<T: Clone>(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.source_dim, "state of the wrong dimension");
        self.index.iter().map(|&i| y[i].clone()).collect()
    }

    /// Dense matrix (rows indexed by `N` coordinates).
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.index
            .iter()
            .map(|&i| (0..self.source_dim).map(|j| u8::from(i == j)).collect())
            .collect()
    }
}

pub fn r_phi(n: &Hypernetwork, n2: &Hypernetwork, phi: &FibrationMap) -> Result<RPhi, FibrationError> {
    let mut index = Vec::with_capacity(n.total_dim());
    for vert in n.vertices() {
        let w = phi
            .vmap
            .get(&vert.id)
            .and_then(|id| n2.vertex_index(id))
            .ok_or_else(|| FibrationError::NotAFibration(check_fibration(n, n2, phi)))?;
        index.extend((0..vert.dim).map(|c| n2.offset(w) + c));
    }
    Ok(RPhi { index, source_dim: n2.total_dim() })
}

fn check_libraries(big: &AdmissibleSystem, small: &AdmissibleSystem) -> Result<(), FibrationError> {
    for vtype in small.network().vertex_types() {
        match (big.library().get(vtype), small.library().get(vtype)) {
            (Some(a), Some(b)) if a.same_as(b) => {}
            (None, _) => {}
            _ => return Err(FibrationError::IncompatibleLibrary(vtype.to_string())),
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SemiconjugacyReport {
    pub max_error: f64,
    pub points: usize,
    pub holds: bool,
}

/// `max_y ‖R_φ f'(y) − f(R_φ y)‖∞` over the given `N'`-states.
pub fn check_semiconjugacy(
    system: &AdmissibleSystem,
    quotient_system: &AdmissibleSystem,
    phi: &FibrationMap,
    points: &[Vec<f64>],
    lambda: f64,
    tol: f64,
) -> Result<SemiconjugacyReport, FibrationError> {
    check_libraries(system, quotient_system)?;
    let r = r_phi(system.network(), quotient_system.network(), phi)?;
    let mut max_error: f64 = 0.0;
    for y in points {
        if y.len() != r.source_dim {
            return Err(FibrationError::PointDimension { expected: r.source_dim, got: y.len() });
        }
        let lhs = r.apply(&quotient_system.eval(y, lambda)?);
        let rhs = system.eval(&r.apply(y), lambda)?;
        for (a, b) in lhs.iter().zip(&rhs) {
            let err = (a - b).abs();
            max_error = if err.is_nan() { f64::INFINITY } else { max_error.max(err) };
        }
    }
    Ok(SemiconjugacyReport { max_error, points: points.len(), holds: max_error <= tol })
}

/// Exact version of [`check_semiconjugacy`] for polynomial systems.
pub fn check_semiconjugacy_exact(
    system: &AdmissibleSystem,
    quotient_system: &AdmissibleSystem,
    phi: &FibrationMap,
    points: &[Vec<Rational>],
    lambda: &Rational,
) -> Result<bool, FibrationError> {
    check_libraries(system, quotient_system)?;
    let r = r_phi(system.network(), quotient_system.network(), phi)?;
    for y in points {
        if y.len() != r.source_dim {
            return Err(FibrationError::PointDimension { expected: r.source_dim, got: y.len() });
        }
        if r.apply(&quotient_system.eval_exact(y, lambda)?) != system.eval_exact(&r.apply(y), lambda)? {
            return Ok(false);
        }
    }
    Ok(true)
}
