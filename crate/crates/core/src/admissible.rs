//! Admissible vector fields.
//!
//! Every vertex evolves by a response function shared by all vertices of its
//! type. The function sees the vertex's own state and, for each in-edge, the
//! ordered states of that edge's sources. In-edges are grouped by edge type
//! and fed in (edge type, edge id) order; a response must be invariant under
//! permuting whole edge blocks inside a group, so that order does not
//! matter.
//!
//! Polynomial responses are written over [`Slot`] variables:
//! `Y[i]` is component `i` of the vertex's own state,
//! `E[t][e][p][c]` is component `c` of source `p` of the `e`-th in-edge of
//! type `t` (all indices 0-based), and `lambda` is the bifurcation
//! parameter, which does not count toward the degree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num::{BigInt, One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::Hypernetwork;
use crate::partition::{Partition, PartitionError};
use crate::poly::{int, Monomial, Polynomial, Rational, Variable};

#[derive(Clone, Debug, Eq, Hash)]
pub enum Slot {
    Own(usize),
    Edge { etype: Arc<str>, edge: usize, pos: usize, comp: usize },
    Lambda,
}

impl Slot {
    pub fn edge(etype: &str, edge: usize, pos: usize, comp: usize) -> Slot {
        Slot::Edge { etype: Arc::from(etype), edge, pos, comp }
    }
}

impl Slot {
    fn rank(&self) -> u8 {
        match self {
            Slot::Own(_) => 0,
            Slot::Edge { .. } => 1,
            Slot::Lambda => 2,
        }
    }
}

// Edge types are usually shared `Arc`s, so pointer equality settles most
// comparisons without touching the strings.
fn cmp_etype(a: &Arc<str>, b: &Arc<str>) -> Ordering {
    if Arc::ptr_eq(a, b) {
        Ordering::Equal
    } else {
        a.cmp(b)
    }
}

impl Ord for Slot {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slot::Own(a), Slot::Own(b)) => a.cmp(b),
            (
                Slot::Edge { etype: t, edge: e, pos: p, comp: c },
                Slot::Edge { etype: u, edge: f, pos: q, comp: d },
            ) => cmp_etype(t, u).then((e, p, c).cmp(&(f, q, d))),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Slot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Slot {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Variable for Slot {
    fn counts_toward_degree(&self) -> bool {
        !matches!(self, Slot::Lambda)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Own(i) => write!(f, "Y[{i}]"),
            Slot::Edge { etype, edge, pos, comp } => write!(f, "E[{etype}][{edge}][{pos}][{comp}]"),
            Slot::Lambda => write!(f, "lambda"),
        }
    }
}

/// Colour variable `Z_c` on a synchrony subspace (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Colour(pub usize);

impl Variable for Colour {}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdmissibleError {
    #[error("no response function for vertex type {0}")]
    MissingResponse(String),
    #[error("response for vertex type {vtype} has {got} components, expected {expected}")]
    ComponentCount { vtype: String, expected: usize, got: usize },
    #[error("slot {slot} is not an input of vertex type {vtype}")]
    SlotOutOfSchema { vtype: String, slot: String },
    #[error("builtin {name} does not fit vertex type {vtype}: {reason}")]
    BuiltinSchema { name: String, vtype: String, reason: String },
    #[error("response for vertex type {0} is not polynomial")]
    NotPolynomial(String),
    #[error("response for vertex type {0} depends on lambda")]
    ParameterDependent(String),
    #[error("state has dimension {got}, expected {expected}")]
    StateDimension { expected: usize, got: usize },
    #[error("vertex {0} is not one-dimensional")]
    NotOneDimensional(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("cannot parse polynomial at byte {at}: {message}")]
    PolynomialSyntax { at: usize, message: String },
    #[error("unknown builtin response library {0}")]
    UnknownBuiltin(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGroup {
    pub etype: String,
    pub count: usize,
    /// Phase-space dimension of each source position.
    pub dims: Vec<usize>,
}

/// Shape of a response function's input for one vertex type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSchema {
    pub vtype: String,
    pub self_dim: usize,
    pub groups: Vec<EdgeGroup>,
}

impl InputSchema {
    pub fn of_vertex(net: &Hypernetwork, v: usize) -> Self {
        let mut groups: Vec<EdgeGroup> = Vec::new();
        for &e in net.in_edges(v) {
            let h = net.edge(e);
            match groups.last_mut() {
                Some(g) if g.etype == h.etype => g.count += 1,
                _ => groups.push(EdgeGroup {
                    etype: h.etype.clone(),
                    count: 1,
                    dims: net.sources(e).iter().map(|&s| net.vertex(s).dim).collect(),
                }),
            }
        }
        let vert = net.vertex(v);
        InputSchema { vtype: vert.vtype.clone(), self_dim: vert.dim, groups }
    }

    /// Schemas for every vertex type, derived from the first vertex of each.
    pub fn all(net: &Hypernetwork) -> BTreeMap<String, InputSchema> {
        let mut out = BTreeMap::new();
        for (v, vert) in net.vertices().iter().enumerate() {
            out.entry(vert.vtype.clone()).or_insert_with(|| Self::of_vertex(net, v));
        }
        out
    }

    pub fn group(&self, etype: &str) -> Option<&EdgeGroup> {
        self.groups.iter().find(|g| g.etype == etype)
    }

    pub fn contains(&self, slot: &Slot) -> bool {
        match slot {
            Slot::Own(i) => *i < self.self_dim,
            Slot::Edge { etype, edge, pos, comp } => self
                .group(etype)
                .is_some_and(|g| *edge < g.count && *pos < g.dims.len() && *comp < g.dims[*pos]),
            Slot::Lambda => true,
        }
    }

    /// Every state slot (not `lambda`), in canonical order.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out: Vec<Slot> = (0..self.self_dim).map(Slot::Own).collect();
        for g in &self.groups {
            let etype: Arc<str> = Arc::from(g.etype.as_str());
            for edge in 0..g.count {
                for (pos, &d) in g.dims.iter().enumerate() {
                    for comp in 0..d {
                        out.push(Slot::Edge { etype: etype.clone(), edge, pos, comp });
                    }
                }
            }
        }
        out
    }
}

/// Read access to a vertex's inputs for builtin responses.
pub struct Inputs<'a> {
    state: &'a [f64],
    plan: &'a VertexPlan,
}

impl<'a> Inputs<'a> {
    pub fn own(&self) -> &'a [f64] {
        &self.state[self.plan.offset..self.plan.offset + self.plan.dim]
    }

    pub fn group_index(&self, etype: &str) -> Option<usize> {
        self.plan.groups.iter().position(|g| &*g.etype == etype)
    }

    pub fn group_len(&self, group: usize) -> usize {
        self.plan.groups[group].edges.len()
    }

    /// State of source `pos` of edge `edge` in group `group`.
    pub fn source(&self, group: usize, edge: usize, pos: usize) -> &'a [f64] {
        let (off, dim) = self.plan.groups[group].edges[edge][pos];
        &self.state[off..off + dim]
    }
}

/// A response function implemented in Rust rather than as a polynomial.
pub trait Builtin: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn check_schema(&self, schema: &InputSchema) -> Result<(), String>;

    /// Writes the response into `out`, which has the vertex's dimension.
    fn eval(&self, input: &Inputs<'_>, lambda: f64, out: &mut [f64]);
}

#[derive(Clone, Debug)]
pub enum ResponseFunction {
    /// One polynomial per output component.
    Polynomial(Vec<Polynomial<Slot>>),
    Builtin(Arc<dyn Builtin>),
}

impl ResponseFunction {
    pub fn scalar(p: Polynomial<Slot>) -> Self {
        ResponseFunction::Polynomial(vec![p])
    }

    pub fn as_polynomial(&self) -> Option<&[Polynomial<Slot>]> {
        match self {
            ResponseFunction::Polynomial(ps) => Some(ps),
            ResponseFunction::Builtin(_) => None,
        }
    }

    /// Structural equality; builtins compare by identity.
    pub fn same_as(&self, other: &ResponseFunction) -> bool {
        match (self, other) {
            (ResponseFunction::Polynomial(a), ResponseFunction::Polynomial(b)) => a == b,
            (ResponseFunction::Builtin(a), ResponseFunction::Builtin(b)) => {
                std::ptr::addr_eq(Arc::as_ptr(a), Arc::as_ptr(b))
            }
            _ => false,
        }
    }
}

/// Response functions keyed by vertex type.
pub type ResponseLibrary = BTreeMap<String, ResponseFunction>;

#[derive(Clone, Debug)]
struct GroupPlan {
    etype: Arc<str>,
    /// Per edge, per source position: (state offset, dim).
    edges: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug)]
pub struct VertexPlan {
    offset: usize,
    dim: usize,
    groups: Vec<GroupPlan>,
}

const LAMBDA_INDEX: usize = usize::MAX;

impl VertexPlan {
    fn state_index(&self, slot: &Slot) -> usize {
        match slot {
            Slot::Own(i) => self.offset + i,
            Slot::Edge { etype, edge, pos, comp } => {
                let g = self.groups.iter().find(|g| g.etype == *etype).expect("slot checked against schema");
                g.edges[*edge][*pos].0 + comp
            }
            Slot::Lambda => LAMBDA_INDEX,
        }
    }
}

/// A polynomial rewritten over state indices for fast float evaluation.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Polynomial<Slot>, plan: &VertexPlan) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let vars = m.powers().iter().map(|(s, e)| (plan.state_index(s), *e as i32)).collect();
                (c.to_f64().unwrap_or(f64::NAN), vars)
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, x: &[f64], lambda: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, vars)| {
                vars.iter().fold(*c, |acc, &(i, e)| {
                    let base = if i == LAMBDA_INDEX { lambda } else { x[i] };
                    acc * base.powi(e)
                })
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    Polynomial(Vec<CompiledPoly>),
    Builtin(Arc<dyn Builtin>),
}

/// A hypernetwork together with a response library, evaluating the
/// admissible vector field.
#[derive(Clone, Debug)]
pub struct AdmissibleSystem {
    net: Hypernetwork,
    library: ResponseLibrary,
    schemas: BTreeMap<String, InputSchema>,
    plans: Vec<VertexPlan>,
    compiled: Vec<Compiled>,
}

impl AdmissibleSystem {
    pub fn new(net: Hypernetwork, library: ResponseLibrary) -> Result<Self, AdmissibleError> {
        let schemas = InputSchema::all(&net);
        for (vtype, schema) in &schemas {
            let response = library
                .get(vtype)
                .ok_or_else(|| AdmissibleError::MissingResponse(vtype.clone()))?;
            match response {
                ResponseFunction::Polynomial(ps) => {
                    if ps.len() != schema.self_dim {
                        return Err(AdmissibleError::ComponentCount {
                            vtype: vtype.clone(),
                            expected: schema.self_dim,
                            got: ps.len(),
                        });
                    }
                    for p in ps {
                        if let Some(slot) = p.variables().into_iter().find(|s| !schema.contains(s)) {
                            return Err(AdmissibleError::SlotOutOfSchema {
                                vtype: vtype.clone(),
                                slot: slot.to_string(),
                            });
                        }
                    }
                }
                ResponseFunction::Builtin(b) => {
                    b.check_schema(schema).map_err(|reason| AdmissibleError::BuiltinSchema {
                        name: b.name().to_string(),
                        vtype: vtype.clone(),
                        reason,
                    })?;
                }
            }
        }

        let plans: Vec<VertexPlan> = (0..net.vertex_count()).map(|v| plan_for(&net, v)).collect();
        let compiled = plans
            .iter()
            .enumerate()
            .map(|(v, plan)| match &library[&net.vertex(v).vtype] {
                ResponseFunction::Polynomial(ps) => {
                    Compiled::Polynomial(ps.iter().map(|p| CompiledPoly::new(p, plan)).collect())
                }
                ResponseFunction::Builtin(b) => Compiled::Builtin(b.clone()),
            })
            .collect();
        Ok(AdmissibleSystem { net, library, schemas, plans, compiled })
    }

    pub fn network(&self) -> &Hypernetwork {
        &self.net
    }

    pub fn library(&self) -> &ResponseLibrary {
        &self.library
    }

    pub fn schema(&self, vtype: &str) -> Option<&InputSchema> {
        self.schemas.get(vtype)
    }

    pub fn dim(&self) -> usize {
        self.net.total_dim()
    }

    pub fn is_polynomial(&self) -> bool {
        self.library.values().all(|r| r.as_polynomial().is_some())
    }

    pub fn eval(&self, x: &[f64], lambda: f64) -> Result<Vec<f64>, AdmissibleError> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, lambda, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, x: &[f64], lambda: f64, out: &mut [f64]) -> Result<(), AdmissibleError> {
        if x.len() != self.dim() || out.len() != self.dim() {
            return Err(AdmissibleError::StateDimension { expected: self.dim(), got: x.len() });
        }
        for (plan, compiled) in self.plans.iter().zip(&self.compiled) {
            let block = &mut out[plan.offset..plan.offset + plan.dim];
            match compiled {
                Compiled::Polynomial(ps) => {
                    for (o, p) in block.iter_mut().zip(ps) {
                        *o = p.eval(x, lambda);
                    }
                }
                Compiled::Builtin(b) => b.eval(&Inputs { state: x, plan }, lambda, block),
            }
        }
        Ok(())
    }

    /// Exact evaluation; requires polynomial responses.
    pub fn eval_exact(&self, x: &[Rational], lambda: &Rational) -> Result<Vec<Rational>, AdmissibleError> {
        if x.len() != self.dim() {
            return Err(AdmissibleError::StateDimension { expected: self.dim(), got: x.len() });
        }
        let mut out = Vec::with_capacity(self.dim());
        for (v, plan) in self.plans.iter().enumerate() {
            let vtype = &self.net.vertex(v).vtype;
            let ps = self.library[vtype]
                .as_polynomial()
                .ok_or_else(|| AdmissibleError::NotPolynomial(vtype.clone()))?;
            for p in ps {
                out.push(p.eval(|s| match plan.state_index(s) {
                    LAMBDA_INDEX => lambda.clone(),
                    i => x[i].clone(),
                }));
            }
        }
        Ok(out)
    }

    /// The polynomial of component `comp` of vertex `v`, written over state
    /// indices (`usize::MAX` stands for lambda).
    pub fn vertex_polynomial(&self, v: usize, comp: usize) -> Result<Polynomial<usize>, AdmissibleError> {
        let vtype = &self.net.vertex(v).vtype;
        let ps = self.library[vtype]
            .as_polynomial()
            .ok_or_else(|| AdmissibleError::NotPolynomial(vtype.clone()))?;
        let plan = &self.plans[v];
        Ok(ps[comp].map_vars(|s| plan.state_index(s)))
    }
}

pub const LAMBDA_STATE_INDEX: usize = LAMBDA_INDEX;

fn plan_for(net: &Hypernetwork, v: usize) -> VertexPlan {
    let mut groups: Vec<GroupPlan> = Vec::new();
    for &e in net.in_edges(v) {
        let etype = &net.edge(e).etype;
        let blocks: Vec<(usize, usize)> = net
            .sources(e)
            .iter()
            .map(|&s| (net.offset(s), net.vertex(s).dim))
            .collect();
        match groups.last_mut() {
            Some(g) if &*g.etype == etype.as_str() => g.edges.push(blocks),
            _ => groups.push(GroupPlan { etype: Arc::from(etype.as_str()), edges: vec![blocks] }),
        }
    }
    VertexPlan { offset: net.offset(v), dim: net.vertex(v).dim, groups }
}

/// Averages `p` over all permutations of edge blocks within each edge group
/// of `schema`. The result is block invariant, and invariant polynomials are
/// fixed points.
pub fn symmetrize(p: &Polynomial<Slot>, schema: &InputSchema) -> Polynomial<Slot> {
    // Work on dense slot indices; the orbit of one monomial can hold
    // hundreds of thousands of images.
    let count = |etype: &str| schema.group(etype).map_or(0, |g| g.count);
    let mut universe: BTreeSet<Slot> = BTreeSet::new();
    for (m, _) in p.terms() {
        for (s, _) in m.powers() {
            if let Slot::Edge { etype, pos, comp, .. } = s {
                for e in 0..count(etype) {
                    universe.insert(Slot::Edge { etype: etype.clone(), edge: e, pos: *pos, comp: *comp });
                }
            }
            universe.insert(s.clone());
        }
    }
    let slots: Vec<Slot> = universe.into_iter().collect();
    let index = |s: &Slot| slots.binary_search(s).expect("slot in universe") as u32;

    struct Term {
        increment: BigInt,
        images: Vec<Vec<(u32, u32)>>,
    }
    let mut terms = Vec::new();
    let mut den = BigInt::one();
    for (m, c) in p.terms() {
        // Distinct edge indices used per group.
        let mut groups: Vec<(Arc<str>, Vec<usize>)> = Vec::new();
        // Per power: its exponent, its group and position in the group's
        // used list, and its slot index for every possible target edge.
        let mut plan: Vec<(u32, Option<(usize, usize)>, Vec<u32>)> = Vec::with_capacity(m.powers().len());
        for (s, e) in m.powers() {
            plan.push(if let Slot::Edge { etype, edge, pos, comp } = s {
                let g = match groups.iter().position(|(t, _)| t == etype) {
                    Some(g) => g,
                    None => {
                        groups.push((etype.clone(), Vec::new()));
                        groups.len() - 1
                    }
                };
                let list = &mut groups[g].1;
                let k = list.iter().position(|x| x == edge).unwrap_or_else(|| {
                    list.push(*edge);
                    list.len() - 1
                });
                let targets = (0..count(etype))
                    .map(|t| index(&Slot::Edge { etype: etype.clone(), edge: t, pos: *pos, comp: *comp }))
                    .collect();
                (*e, Some((g, k)), targets)
            } else {
                (*e, None, vec![index(s)])
            });
        }
        let choices: Vec<Vec<Vec<usize>>> =
            groups.iter().map(|(etype, edges)| (0..count(etype)).permutations(edges.len()).collect()).collect();
        let images: Vec<Vec<&Vec<usize>>> = if choices.is_empty() {
            vec![Vec::new()]
        } else {
            choices.iter().map(|c| c.iter()).multi_cartesian_product().collect()
        };
        if images.is_empty() {
            continue;
        }
        let weight = c / int(images.len() as i64);
        den = num::integer::lcm(den, weight.denom().clone());
        let images = images
            .iter()
            .map(|image| {
                let mut key: Vec<(u32, u32)> = plan
                    .iter()
                    .map(|(e, at, targets)| match at {
                        Some((g, k)) => (targets[image[*g][*k]], *e),
                        None => (targets[0], *e),
                    })
                    .collect();
                key.sort_unstable();
                key.dedup_by(|b, a| {
                    let same = a.0 == b.0;
                    if same {
                        a.1 += b.1;
                    }
                    same
                });
                key
            })
            .collect();
        terms.push((weight, images));
    }
    let terms: Vec<Term> = terms
        .into_iter()
        .map(|(w, images)| Term { increment: w.numer() * (&den / w.denom()), images })
        .collect();

    let mut acc: HashMap<Vec<(u32, u32)>, BigInt> = HashMap::new();
    for t in &terms {
        for key in &t.images {
            match acc.get_mut(key) {
                Some(n) => *n += &t.increment,
                None => {
                    acc.insert(key.clone(), t.increment.clone());
                }
            }
        }
    }
    let mut out: Vec<(Vec<(u32, u32)>, BigInt)> = acc.into_iter().filter(|(_, n)| !n.is_zero()).collect();
    // Dense indices follow slot order, so this is monomial order.
    out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Polynomial::from_sorted_terms(
        out.into_iter()
            .map(|(key, n)| {
                let m = Monomial::from_sorted_powers(key.into_iter().map(|(i, e)| (slots[i as usize].clone(), e)).collect());
                (m, Rational::new(n, den.clone()))
            })
            .collect(),
    )
}

fn nonzero_coefficient(rng: &mut impl Rng, bound: i64) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-bound..=bound);
    }
    int(c)
}

/// Symmetrization of a random sparse integer polynomial of total degree at
/// most `max_degree` over the state slots of `schema`. Deterministic per seed.
pub fn random_invariant_polynomial(schema: &InputSchema, max_degree: u32, seed: u64) -> Polynomial<Slot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sparse_invariant(schema, max_degree, &mut rng)
}

fn sparse_invariant(schema: &InputSchema, max_degree: u32, rng: &mut impl Rng) -> Polynomial<Slot> {
    let slots = schema.slots();
    let mut p = Polynomial::zero();
    let terms = rng.gen_range(1..=6);
    for _ in 0..terms {
        let degree = rng.gen_range(0..=max_degree);
        let m = if slots.is_empty() {
            Monomial::one()
        } else {
            Monomial::from_powers((0..degree).map(|_| (slots.choose(rng).unwrap().clone(), 1)))
        };
        p.add_term(m, nonzero_coefficient(rng, 5));
    }
    symmetrize(&p, schema)
}

/// Every monomial of degree `1..=max_degree` in `vars`.
fn monomials_up_to<V: Variable>(vars: &[V], max_degree: u32) -> Vec<Monomial<V>> {
    let mut out = Vec::new();
    for d in 1..=max_degree as usize {
        for combo in (0..vars.len()).combinations_with_replacement(d) {
            out.push(Monomial::from_powers(combo.into_iter().map(|i| (vars[i].clone(), 1))));
        }
    }
    out
}

/// A random polynomial response for probing invariance: a sparse random
/// invariant part plus, for every edge group, a random combination of all
/// single-block monomials (first components of the block's sources) of
/// degree at most `max_degree`, summed over the group's edges. Every
/// component of the output gets an independent draw.
pub fn random_probe_response(schema: &InputSchema, max_degree: u32, rng: &mut impl Rng) -> Vec<Polynomial<Slot>> {
    (0..schema.self_dim)
        .map(|_| {
            let mut p = sparse_invariant(schema, max_degree, rng);
            p.add_term(Monomial::one(), nonzero_coefficient(rng, 9));
            for g in &schema.groups {
                let block: Vec<Slot> = (0..g.dims.len()).map(|pos| Slot::edge(&g.etype, 0, pos, 0)).collect();
                for m in monomials_up_to(&block, max_degree) {
                    let c = nonzero_coefficient(rng, 9);
                    for edge in 0..g.count {
                        let shifted = Monomial::from_powers(m.powers().iter().map(|(s, e)| match s {
                            Slot::Edge { etype, pos, comp, .. } => (
                                Slot::Edge { etype: etype.clone(), edge, pos: *pos, comp: *comp },
                                *e,
                            ),
                            other => (other.clone(), *e),
                        }));
                        p.add_term(shifted, c.clone());
                    }
                }
            }
            p
        })
        .collect()
}

/// A library of random probe responses for every vertex type of `net`.
pub fn random_probe_library(net: &Hypernetwork, max_degree: u32, rng: &mut impl Rng) -> ResponseLibrary {
    InputSchema::all(net)
        .into_iter()
        .map(|(vtype, schema)| {
            let r = ResponseFunction::Polynomial(random_probe_response(&schema, max_degree, rng));
            (vtype, r)
        })
        .collect()
}

/// Restriction of each vertex's (first-component) response to `Syn_P`, as an
/// exact polynomial in the colour variables `Z_1..Z_C`.
pub fn eval_symbolic_on_syn(
    system: &AdmissibleSystem,
    p: &Partition,
) -> Result<Vec<Polynomial<Colour>>, AdmissibleError> {
    let net = system.network();
    p.check_refines_types(net)?;
    if let Some(v) = net.vertices().iter().find(|v| v.dim != 1) {
        return Err(AdmissibleError::NotOneDimensional(v.id.clone()));
    }
    (0..net.vertex_count())
        .map(|v| {
            let vtype = &net.vertex(v).vtype;
            let poly = &system.library[vtype]
                .as_polynomial()
                .ok_or_else(|| AdmissibleError::NotPolynomial(vtype.clone()))?[0];
            if poly.variables().contains(&Slot::Lambda) {
                return Err(AdmissibleError::ParameterDependent(vtype.clone()));
            }
            let plan = &system.plans[v];
            let colour_of_index: BTreeMap<usize, usize> =
                (0..net.vertex_count()).map(|u| (net.offset(u), p.colour(u))).collect();
            Ok(poly.map_vars(|s| Colour(colour_of_index[&plan.state_index(s)])))
        })
        .collect()
}

/// Embeds colour values into a state on `Syn_P` (one-dimensional vertices).
pub fn embed_colours<T: Clone>(p: &Partition, z: &[T]) -> Vec<T> {
    (0..p.len()).map(|v| z[p.colour(v) - 1].clone()).collect()
}

/// Parses a response in the slot mini-language; components separated by `;`.
pub fn parse_response(text: &str) -> Result<Vec<Polynomial<Slot>>, AdmissibleError> {
    let mut out = Vec::new();
    let mut start = 0;
    for part in text.split(';') {
        out.push(PolyParser { src: part.as_bytes(), pos: 0, base: start }.parse()?);
        start += part.len() + 1;
    }
    Ok(out)
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    base: usize,
}

impl PolyParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, AdmissibleError> {
        Err(AdmissibleError::PolynomialSyntax { at: self.base + self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), AdmissibleError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn number(&mut self) -> Result<u64, AdmissibleError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match digits.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                self.err("expected a number")
            }
        }
    }

    fn bracketed_word(&mut self) -> Result<String, AdmissibleError> {
        self.expect(b'[')?;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos] != b']' {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().trim().to_string();
        self.expect(b']')?;
        Ok(word)
    }

    fn bracketed_index(&mut self) -> Result<usize, AdmissibleError> {
        self.expect(b'[')?;
        let n = self.number()? as usize;
        self.expect(b']')?;
        Ok(n)
    }

    fn parse(mut self) -> Result<Polynomial<Slot>, AdmissibleError> {
        let mut p = Polynomial::zero();
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let t = self.term()?;
            if negative {
                p -= &t;
            } else {
                p += &t;
            }
            match self.peek() {
                None => return Ok(p),
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(c) => return self.err(format!("unexpected `{}`", c as char)),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial<Slot>, AdmissibleError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial<Slot>, AdmissibleError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                let mut c = int(n as i64);
                if self.eat(b'/') {
                    let d = self.number()?;
                    if d == 0 {
                        return self.err("zero denominator");
                    }
                    c /= int(d as i64);
                }
                Ok(Polynomial::constant(c))
            }
            Some(b'Y') => {
                self.pos += 1;
                let i = self.bracketed_index()?;
                self.power(Slot::Own(i))
            }
            Some(b'E') => {
                self.pos += 1;
                let etype = self.bracketed_word()?;
                let edge = self.bracketed_index()?;
                let pos = self.bracketed_index()?;
                let comp = self.bracketed_index()?;
                self.power(Slot::edge(&etype, edge, pos, comp))
            }
            Some(b'l') if self.src[self.pos..].starts_with(b"lambda") => {
                self.pos += "lambda".len();
                self.power(Slot::Lambda)
            }
            Some(b'(') => {
                self.pos += 1;
                let start = self.pos;
                let mut depth = 1;
                while self.pos < self.src.len() && depth > 0 {
                    match self.src[self.pos] {
                        b'(' => depth += 1,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    self.pos += 1;
                }
                if depth > 0 {
                    return self.err("unbalanced parenthesis");
                }
                let inner = PolyParser { src: &self.src[start..self.pos - 1], pos: 0, base: self.base + start }.parse()?;
                if self.eat(b'^') {
                    let e = self.number()?;
                    Ok(inner.pow(e as u32))
                } else {
                    Ok(inner)
                }
            }
            _ => self.err("expected a coefficient or a slot"),
        }
    }

    fn power(&mut self, slot: Slot) -> Result<Polynomial<Slot>, AdmissibleError> {
        let e = if self.eat(b'^') { self.number()? as u32 } else { 1 };
        Ok(Polynomial::term(int(1), Monomial::var(slot, e)))
    }
}

/// Writes a response in the slot mini-language accepted by [`parse_response`].
pub fn format_response(ps: &[Polynomial<Slot>]) -> String {
    ps.iter().map(ToString::to_string).join("; ")
}

/// Core-cell response of the reluctant-synchrony-breaking example:
/// `-X0 + X1 - X2 + 8 lambda X0 + 4 X0^2`, where `X0` is the cell's own
/// state and `X1`, `X2` are the sources of its single in-edges of types
/// `first` and `second`.
#[derive(Debug)]
pub struct ReluctantCore {
    pub first: String,
    pub second: String,
}

impl Builtin for ReluctantCore {
    fn name(&self) -> &str {
        "example58-core"
    }

    fn check_schema(&self, schema: &InputSchema) -> Result<(), String> {
        if schema.self_dim != 1 {
            return Err("needs one-dimensional cells".into());
        }
        for etype in [&self.first, &self.second] {
            match schema.group(etype) {
                Some(g) if g.count == 1 && g.dims == [1] => {}
                _ => return Err(format!("needs exactly one order-1 in-edge of type {etype}")),
            }
        }
        Ok(())
    }

    fn eval(&self, input: &Inputs<'_>, lambda: f64, out: &mut [f64]) {
        let x0 = input.own()[0];
        let x1 = input.source(input.group_index(&self.first).unwrap(), 0, 0)[0];
        let x2 = input.source(input.group_index(&self.second).unwrap(), 0, 0)[0];
        out[0] = -x0 + x1 - x2 + 8.0 * lambda * x0 + 4.0 * x0 * x0;
    }
}

/// `sin(x) + cos(x) - 1`.
pub fn bump(x: f64) -> f64 {
    x.sin() + x.cos() - 1.0
}

/// Hyperedge-target response of the reluctant-synchrony-breaking example:
/// `-5Y + 14 lambda - sum_e bump(10 X_e0 - 12 X_e1)` over the order-2
/// in-edges of type `hyper`.
#[derive(Debug)]
pub struct ReluctantCell {
    pub hyper: String,
}

impl Builtin for ReluctantCell {
    fn name(&self) -> &str {
        "example58-cell"
    }

    fn check_schema(&self, schema: &InputSchema) -> Result<(), String> {
        if schema.self_dim != 1 {
            return Err("needs one-dimensional cells".into());
        }
        match schema.group(&self.hyper) {
            Some(g) if g.dims == [1, 1] => Ok(()),
            _ => Err(format!("needs order-2 in-edges of type {}", self.hyper)),
        }
    }

    fn eval(&self, input: &Inputs<'_>, lambda: f64, out: &mut [f64]) {
        let y = input.own()[0];
        let g = input.group_index(&self.hyper).unwrap();
        let mut acc = -5.0 * y + 14.0 * lambda;
        for e in 0..input.group_len(g) {
            let a = input.source(g, e, 0)[0];
            let b = input.source(g, e, 1)[0];
            acc -= bump(10.0 * a - 12.0 * b);
        }
        out[0] = acc;
    }
}

/// The reluctant-synchrony-breaking responses for the running example's
/// naming: core cells of type `circle` with in-edge types `a`, `b`, and
/// hyperedge targets of type `square` fed by hyperedges of type `h`.
pub fn example58_library() -> ResponseLibrary {
    let mut lib = ResponseLibrary::new();
    lib.insert(
        "circle".into(),
        ResponseFunction::Builtin(Arc::new(ReluctantCore { first: "a".into(), second: "b".into() })),
    );
    lib.insert("square".into(), ResponseFunction::Builtin(Arc::new(ReluctantCell { hyper: "h".into() })));
    lib
}

/// Looks up a named builtin response library.
pub fn builtin_library(name: &str) -> Result<ResponseLibrary, AdmissibleError> {
    match name {
        "example58" => Ok(example58_library()),
        other => Err(AdmissibleError::UnknownBuiltin(other.to_string())),
    }
}

/// Applies a permutation of edge blocks inside one group of a vertex's
/// inputs to a state-independent assignment of slot values: `perm[e]` is
/// the new position of edge `e`.
pub fn permute_blocks(
    values: &BTreeMap<Slot, Rational>,
    etype: &str,
    perm: &[usize],
) -> BTreeMap<Slot, Rational> {
    values
        .iter()
        .map(|(s, v)| {
            let s = match s {
                Slot::Edge { etype: t, edge, pos, comp } if &**t == etype => {
                    Slot::Edge { etype: t.clone(), edge: perm[*edge], pos: *pos, comp: *comp }
                }
                other => other.clone(),
            };
            (s, v.clone())
        })
        .collect()
}

/// Exact evaluation of a polynomial response at a slot assignment; missing
/// slots read as zero.
pub fn eval_at_slots(p: &Polynomial<Slot>, values: &BTreeMap<Slot, Rational>) -> Rational {
    p.eval(|s| values.get(s).cloned().unwrap_or_else(Rational::zero))
}
