//! Vertex colourings, signatures, signature censuses and balanced partitions.
//!
//! A partition is balanced when same-class vertices admit type-preserving
//! bijections between their in-edges that match sources class by class.
//! [`is_balanced`] decides this through the census characterization: it
//! counts, at every vertex, the in-edges of each type with each colour
//! signature and compares those counts inside every class.
//! [`is_balanced_oracle`] searches for the bijections directly and serves as
//! the independent check.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::Hypernetwork;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("unknown vertex {0} in partition")]
    UnknownVertex(String),
    #[error("vertex {0} appears in more than one class")]
    Repeated(String),
    #[error("vertex {0} is not covered by the partition")]
    Uncovered(String),
    #[error("partition contains an empty class")]
    EmptyClass,
    #[error("partition has {got} labels but the hypernetwork has {expected} vertices")]
    WrongSize { expected: usize, got: usize },
    #[error("vertices {first} and {second} share a class but have different types")]
    NotRefining { first: String, second: String },
    #[error("hypernetwork has {got} vertices; enumeration is limited to {limit}")]
    TooLarge { limit: usize, got: usize },
}

/// A colouring of the vertices. Classes are stored canonically: each class
/// sorted, classes ordered by their smallest vertex, and colour `c` (1-based)
/// is the `c`-th class. Vertex indices follow the hypernetwork's
/// lexicographic vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary per-vertex labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut canon = Vec::with_capacity(labels.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (v, l) in labels.iter().enumerate() {
            let next = remap.len();
            let c = *remap.entry(*l).or_insert(next);
            if c == classes.len() {
                classes.push(Vec::new());
            }
            classes[c].push(v);
            canon.push(c);
        }
        Partition { labels: canon, classes }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// The partition into vertex types.
    pub fn by_type(net: &Hypernetwork) -> Self {
        let labels: Vec<usize> = {
            let types = net.vertex_types();
            net.vertices()
                .iter()
                .map(|v| types.binary_search(&v.vtype.as_str()).unwrap())
                .collect()
        };
        Self::from_labels(&labels)
    }

    pub fn from_classes<S: AsRef<str>>(net: &Hypernetwork, classes: &[Vec<S>]) -> Result<Self, PartitionError> {
        let mut labels = vec![usize::MAX; net.vertex_count()];
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(PartitionError::EmptyClass);
            }
            for id in class {
                let id = id.as_ref();
                let v = net
                    .vertex_index(id)
                    .ok_or_else(|| PartitionError::UnknownVertex(id.to_string()))?;
                if labels[v] != usize::MAX {
                    return Err(PartitionError::Repeated(id.to_string()));
                }
                labels[v] = c;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::Uncovered(net.vertex(v).id.clone()));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Parses `"v0 v1 v2 | w0 w1"`: classes separated by `|`.
    pub fn parse(net: &Hypernetwork, spec: &str) -> Result<Self, PartitionError> {
        let classes: Vec<Vec<&str>> = if spec.trim().is_empty() {
            Vec::new()
        } else {
            spec.split('|').map(|c| c.split_whitespace().collect()).collect()
        };
        Self::from_classes(net, &classes)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_colours(&self) -> usize {
        self.classes.len()
    }

    /// Colour of vertex `v`, in `1..=num_colours()`.
    pub fn colour(&self, v: usize) -> usize {
        self.labels[v] + 1
    }

    pub fn class_of(&self, v: usize) -> &[usize] {
        &self.classes[self.labels[v]]
    }

    pub fn same_class(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// Checks that every class lies inside one vertex type.
    pub fn check_refines_types(&self, net: &Hypernetwork) -> Result<(), PartitionError> {
        if self.len() != net.vertex_count() {
            return Err(PartitionError::WrongSize { expected: net.vertex_count(), got: self.len() });
        }
        for class in &self.classes {
            let first = net.vertex(class[0]);
            if let Some(&other) = class.iter().find(|&&v| net.vertex(v).vtype != first.vtype) {
                return Err(PartitionError::NotRefining {
                    first: first.id.clone(),
                    second: net.vertex(other).id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, net: &'a Hypernetwork) -> PartitionDisplay<'a> {
        PartitionDisplay { partition: self, net }
    }
}

pub struct PartitionDisplay<'a> {
    partition: &'a Partition,
    net: &'a Hypernetwork,
}

impl fmt::Display for PartitionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, class) in self.partition.classes.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            for (j, &v) in class.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.net.vertex(v).id)?;
            }
        }
        Ok(())
    }
}

/// Colours of a hyperedge's ordered sources.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature(pub Vec<usize>);

impl Signature {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colours(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Signature of hyperedge `e` under `p`.
pub fn signature(net: &Hypernetwork, p: &Partition, e: usize) -> Signature {
    Signature(net.sources(e).iter().map(|&s| p.colour(s)).collect())
}

/// Per-vertex counts of in-edges by (edge type, signature).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    counts: Vec<BTreeMap<(String, Signature), usize>>,
}

impl Census {
    pub fn count(&self, v: usize, etype: &str, sig: &Signature) -> usize {
        self.counts[v].get(&(etype.to_string(), sig.clone())).copied().unwrap_or(0)
    }

    pub fn at(&self, v: usize) -> &BTreeMap<(String, Signature), usize> {
        &self.counts[v]
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(BTreeMap::is_empty)
    }
}

pub fn census(net: &Hypernetwork, p: &Partition) -> Result<Census, PartitionError> {
    p.check_refines_types(net)?;
    let counts = (0..net.vertex_count())
        .map(|v| {
            let mut m = BTreeMap::new();
            for &e in net.in_edges(v) {
                *m.entry((net.edge(e).etype.clone(), signature(net, p, e))).or_insert(0) += 1;
            }
            m
        })
        .collect();
    Ok(Census { counts })
}

/// Why a partition fails to be balanced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Imbalance {
    /// The partition does not refine the vertex types.
    TypeMismatch { first: String, second: String },
    /// Two same-class vertices disagree on a census entry.
    CensusMismatch {
        colour: usize,
        first: String,
        second: String,
        etype: String,
        signature: Signature,
        first_count: usize,
        second_count: usize,
    },
}

impl fmt::Display for Imbalance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Imbalance::TypeMismatch { first, second } => {
                write!(f, "{first} and {second} share a class but not a vertex type")
            }
            Imbalance::CensusMismatch { colour, first, second, etype, signature, first_count, second_count } => write!(
                f,
                "class {colour}: {first} receives {first_count} and {second} receives {second_count} hyperedges of type {etype} with signature {signature}"
            ),
        }
    }
}

/// Bijections witnessing balance: for every vertex, its in-edges paired with
/// the in-edges of its class representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceCertificate {
    /// Representative (smallest vertex) of each class, by colour.
    pub representatives: Vec<usize>,
    /// For each vertex `v`: `(edge targeting v, edge targeting rep(v))`.
    pub to_representative: Vec<Vec<(usize, usize)>>,
}

impl BalanceCertificate {
    /// The bijection from the in-edges of `a` to those of `b` (same class),
    /// composed through the representative.
    pub fn bijection(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        let back: BTreeMap<usize, usize> =
            self.to_representative[b].iter().map(|&(eb, er)| (er, eb)).collect();
        self.to_representative[a].iter().map(|&(ea, er)| (ea, back[&er])).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Balanced(BalanceCertificate),
    Unbalanced(Imbalance),
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced(_))
    }
}

fn bucket_key<'a>(net: &'a Hypernetwork, p: &Partition, e: usize) -> (&'a str, Signature, usize) {
    (net.edge(e).etype.as_str(), signature(net, p, e), e)
}

/// Decides balance by comparing signature censuses within each class.
pub fn is_balanced(net: &Hypernetwork, p: &Partition) -> Balance {
    if let Err(err) = p.check_refines_types(net) {
        return match err {
            PartitionError::NotRefining { first, second } => {
                Balance::Unbalanced(Imbalance::TypeMismatch { first, second })
            }
            other => panic!("partition does not match the hypernetwork: {other}"),
        };
    }
    let census = census(net, p).expect("refinement already checked");

    for (ci, class) in p.classes().iter().enumerate() {
        let rep = class[0];
        for &v in &class[1..] {
            let (a, b) = (census.at(rep), census.at(v));
            let keys = a.keys().chain(b.keys());
            for key in keys {
                let (ca, cb) = (a.get(key).copied().unwrap_or(0), b.get(key).copied().unwrap_or(0));
                if ca != cb {
                    return Balance::Unbalanced(Imbalance::CensusMismatch {
                        colour: ci + 1,
                        first: net.vertex(rep).id.clone(),
                        second: net.vertex(v).id.clone(),
                        etype: key.0.clone(),
                        signature: key.1.clone(),
                        first_count: ca,
                        second_count: cb,
                    });
                }
            }
        }
    }

    let mut to_representative = vec![Vec::new(); net.vertex_count()];
    let representatives: Vec<usize> = p.classes().iter().map(|c| c[0]).collect();
    for v in 0..net.vertex_count() {
        let rep = p.class_of(v)[0];
        let mut mine: Vec<_> = net.in_edges(v).iter().map(|&e| bucket_key(net, p, e)).collect();
        let mut theirs: Vec<_> = net.in_edges(rep).iter().map(|&e| bucket_key(net, p, e)).collect();
        mine.sort();
        theirs.sort();
        to_representative[v] = mine.iter().zip(&theirs).map(|(a, b)| (a.2, b.2)).collect();
    }
    Balance::Balanced(BalanceCertificate { representatives, to_representative })
}

/// Decides balance by searching directly for colour-matching, type-preserving
/// bijections between the in-edges of every same-class pair. Exponential in
/// the worst case; intended for cross-checking.
pub fn is_balanced_oracle(net: &Hypernetwork, p: &Partition) -> bool {
    if p.check_refines_types(net).is_err() {
        return false;
    }
    for class in p.classes() {
        for (i, &a) in class.iter().enumerate() {
            for &b in &class[i + 1..] {
                if !bijection_exists(net, p, net.in_edges(a), net.in_edges(b)) {
                    return false;
                }
            }
        }
    }
    true
}

fn edges_compatible(net: &Hypernetwork, p: &Partition, e1: usize, e2: usize) -> bool {
    let (h1, h2) = (net.edge(e1), net.edge(e2));
    h1.etype == h2.etype
        && h1.order() == h2.order()
        && net
            .sources(e1)
            .iter()
            .zip(net.sources(e2))
            .all(|(&s1, &s2)| p.same_class(s1, s2))
}

fn bijection_exists(net: &Hypernetwork, p: &Partition, from: &[usize], to: &[usize]) -> bool {
    fn search(net: &Hypernetwork, p: &Partition, from: &[usize], to: &[usize], used: &mut [bool]) -> bool {
        let Some((&e, rest)) = from.split_first() else {
            return true;
        };
        for (j, &f) in to.iter().enumerate() {
            if !used[j] && edges_compatible(net, p, e, f) {
                used[j] = true;
                if search(net, p, rest, to, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    from.len() == to.len() && search(net, p, from, to, &mut vec![false; to.len()])
}

pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

/// All balanced partitions refining the vertex types, in lexicographic
/// order of their canonical label sequences. The singleton partition is
/// always among them.
pub fn enumerate_balanced(net: &Hypernetwork, limit: usize) -> Result<Vec<Partition>, PartitionError> {
    let n = net.vertex_count();
    if n > limit {
        return Err(PartitionError::TooLarge { limit, got: n });
    }
    // A same-class pair (u, v) can be compared once u, v and all sources of
    // their in-edges have been labelled.
    let ready: Vec<usize> = (0..n)
        .map(|v| {
            net.in_edges(v)
                .iter()
                .flat_map(|&e| net.sources(e).iter().copied())
                .fold(v, usize::max)
        })
        .collect();
    let mut search = Enumerator {
        net,
        ready,
        labels: Vec::with_capacity(n),
        class_first: Vec::new(),
        out: Vec::new(),
    };
    search.extend();
    Ok(search.out)
}

/// Every partition refining the vertex types, in the same order as
/// [`enumerate_balanced`].
pub fn refining_partitions(net: &Hypernetwork, limit: usize) -> Result<Vec<Partition>, PartitionError> {
    let n = net.vertex_count();
    if n > limit {
        return Err(PartitionError::TooLarge { limit, got: n });
    }
    fn extend(net: &Hypernetwork, labels: &mut Vec<usize>, firsts: &mut Vec<usize>, out: &mut Vec<Partition>) {
        let i = labels.len();
        if i == net.vertex_count() {
            out.push(Partition::from_labels(labels));
            return;
        }
        for c in 0..=firsts.len() {
            let opening = c == firsts.len();
            if !opening && net.vertex(firsts[c]).vtype != net.vertex(i).vtype {
                continue;
            }
            labels.push(c);
            if opening {
                firsts.push(i);
            }
            extend(net, labels, firsts, out);
            if opening {
                firsts.pop();
            }
            labels.pop();
        }
    }
    let mut out = Vec::new();
    extend(net, &mut Vec::new(), &mut Vec::new(), &mut out);
    Ok(out)
}

struct Enumerator<'a> {
    net: &'a Hypernetwork,
    ready: Vec<usize>,
    labels: Vec<usize>,
    /// First (smallest) vertex of each class opened so far.
    class_first: Vec<usize>,
    out: Vec<Partition>,
}

impl Enumerator<'_> {
    fn extend(&mut self) {
        let i = self.labels.len();
        if i == self.net.vertex_count() {
            self.out.push(Partition::from_labels(&self.labels));
            return;
        }
        let vtype = &self.net.vertex(i).vtype;
        for c in 0..=self.class_first.len() {
            let opening = c == self.class_first.len();
            if !opening && self.net.vertex(self.class_first[c]).vtype != *vtype {
                continue;
            }
            self.labels.push(c);
            if opening {
                self.class_first.push(i);
            }
            if self.consistent_at(i) {
                self.extend();
            }
            if opening {
                self.class_first.pop();
            }
            self.labels.pop();
        }
    }

    /// Checks every same-class pair that becomes decidable once vertex `i`
    /// is labelled.
    fn consistent_at(&self, i: usize) -> bool {
        for v in 0..=i {
            let first = self.class_first[self.labels[v]];
            if first == v || self.ready[v].max(self.ready[first]) != i {
                continue;
            }
            if self.partial_census(v) != self.partial_census(first) {
                return false;
            }
        }
        true
    }

    fn partial_census(&self, v: usize) -> Vec<(&str, Vec<usize>)> {
        let mut entries: Vec<_> = self
            .net
            .in_edges(v)
            .iter()
            .map(|&e| {
                (
                    self.net.edge(e).etype.as_str(),
                    self.net.sources(e).iter().map(|&s| self.labels[s]).collect(),
                )
            })
            .collect();
        entries.sort();
        entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn canonical_colours() {
        let p = Partition::from_labels(&[7, 3, 7, 1]);
        assert_eq!(p.classes(), &[vec![0, 2], vec![1], vec![3]]);
        assert_eq!((p.colour(0), p.colour(1), p.colour(3)), (1, 2, 3));
        assert_eq!(p, Partition::from_labels(&[0, 1, 0, 2]));
    }

    #[test]
    fn parse_and_display() {
        let net = gallery::running_example();
        let p = Partition::parse(&net, "w1 w0 | v2 v0 v1").unwrap();
        assert_eq!(p.display(&net).to_string(), "v0 v1 v2 | w0 w1");
        assert!(matches!(Partition::parse(&net, "v0 v1 | w0 w1"), Err(PartitionError::Uncovered(_))));
        assert!(matches!(Partition::parse(&net, "v0 v0 v1 v2 | w0 w1"), Err(PartitionError::Repeated(_))));
        assert!(matches!(Partition::parse(&net, "v0 v1 v2 q | w0 w1"), Err(PartitionError::UnknownVertex(_))));
        assert!(matches!(Partition::parse(&net, "v0 v1 v2 | | w0 w1"), Err(PartitionError::EmptyClass)));
    }

    #[test]
    fn signatures_on_running_example() {
        let net = gallery::running_example();
        let two = Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap();
        for e in 0..net.edge_count() {
            if net.edge(e).etype == "h" {
                assert_eq!(signature(&net, &two, e), Signature(vec![1, 1]));
            }
        }
        let loop_w0 = net.edge_index("loop_w0").unwrap();
        assert_eq!(signature(&net, &two, loop_w0), Signature(vec![2]));

        let single = Partition::parse(&net, "v0 | v1 | v2 | w0 | w1").unwrap();
        let e = (0..net.edge_count())
            .find(|&e| net.edge(e).etype == "h" && net.sources(e) == [0, 1])
            .unwrap();
        assert_eq!(signature(&net, &single, e), Signature(vec![1, 2]));
    }

    #[test]
    fn census_counts() {
        let net = gallery::running_example();
        let w0 = net.vertex_index("w0").unwrap();
        let w1 = net.vertex_index("w1").unwrap();
        let two = Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap();
        let c = census(&net, &two).unwrap();
        assert_eq!(c.count(w0, "h", &Signature(vec![1, 1])), 3);
        assert_eq!(c.at(w0), c.at(w1));

        let single = Partition::parse(&net, "v0 | v1 | v2 | w0 w1").unwrap();
        let c = census(&net, &single).unwrap();
        for sig in [[1, 2], [2, 3], [3, 1]] {
            assert_eq!(c.count(w0, "h", &Signature(sig.to_vec())), 1);
        }
        assert_eq!(c.count(w1, "h", &Signature(vec![1, 2])), 0);

        let empty = Hypernetwork::new("e", vec![], vec![]).unwrap();
        assert!(census(&empty, &Partition::singletons(0)).unwrap().is_empty());
    }

    #[test]
    fn census_rejects_non_refining_partition() {
        let net = gallery::running_example();
        let p = Partition::parse(&net, "v0 w0 | v1 v2 | w1").unwrap();
        assert!(matches!(census(&net, &p), Err(PartitionError::NotRefining { .. })));
        assert!(matches!(is_balanced(&net, &p), Balance::Unbalanced(Imbalance::TypeMismatch { .. })));
        assert!(!is_balanced_oracle(&net, &p));
    }

    #[test]
    fn running_example_balance() {
        let net = gallery::running_example();
        let two = Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap();
        let merged = Partition::parse(&net, "v0 | v1 | v2 | w0 w1").unwrap();
        let single = Partition::singletons(net.vertex_count());
        assert!(is_balanced(&net, &two).is_balanced());
        assert!(is_balanced_oracle(&net, &two));
        match is_balanced(&net, &merged) {
            Balance::Unbalanced(Imbalance::CensusMismatch { etype, colour, .. }) => {
                assert_eq!(etype, "h");
                assert_eq!(colour, 4);
            }
            other => panic!("expected census mismatch, got {other:?}"),
        }
        assert!(!is_balanced_oracle(&net, &merged));
        assert!(is_balanced(&net, &single).is_balanced());
        assert!(is_balanced_oracle(&net, &single));
    }

    #[test]
    fn certificate_bijections_match_colours() {
        let net = gallery::running_example();
        let two = Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap();
        let Balance::Balanced(cert) = is_balanced(&net, &two) else { panic!() };
        let (w0, w1) = (net.vertex_index("w0").unwrap(), net.vertex_index("w1").unwrap());
        let alpha = cert.bijection(w0, w1);
        assert_eq!(alpha.len(), 4);
        for (a, b) in alpha {
            assert_eq!(net.target(a), w0);
            assert_eq!(net.target(b), w1);
            assert_eq!(net.edge(a).etype, net.edge(b).etype);
            assert_eq!(signature(&net, &two, a), signature(&net, &two, b));
        }
    }

    #[test]
    fn disconnected_core_has_all_five_partitions_balanced() {
        let net = gallery::disconnected_core();
        let found = enumerate_balanced(&net, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(found.len(), 5);
        let brute: Vec<Partition> = [[0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1], [0, 1, 2]]
            .iter()
            .map(|l| Partition::from_labels(l))
            .filter(|p| is_balanced_oracle(&net, p))
            .collect();
        assert_eq!(found, brute);
    }

    #[test]
    fn running_example_enumeration() {
        let net = gallery::running_example();
        let found = enumerate_balanced(&net, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert!(found.contains(&Partition::singletons(5)));
        assert!(found.contains(&Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap()));
        assert!(!found.contains(&Partition::parse(&net, "v0 | v1 | v2 | w0 w1").unwrap()));
        for p in &found {
            assert!(is_balanced_oracle(&net, p));
        }
        let mut sorted = found.clone();
        sorted.sort_by(|a, b| a.labels.cmp(&b.labels));
        assert_eq!(sorted, found);
    }

    #[test]
    fn enumeration_respects_limit() {
        let net = gallery::running_example();
        assert!(matches!(enumerate_balanced(&net, 4), Err(PartitionError::TooLarge { limit: 4, got: 5 })));
    }
}
