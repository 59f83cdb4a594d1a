//! Robust synchrony and its breaking.
//!
//! A synchrony subspace is robust (invariant under every admissible map)
//! exactly when its partition is balanced, and when it is not, some
//! polynomial admissible map of degree at most `k(k+1)/2` already breaks it,
//! `k` being the order of the hypernetwork. This module builds such maps
//! explicitly from the colour signatures of hyperedges, probes invariance
//! with random exact polynomial systems, and provides the power-sum
//! responses and Vandermonde factorization showing the bound is attained on
//! augmented hypernetworks.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::admissible::{
    random_probe_library, AdmissibleError, AdmissibleSystem, Colour, InputSchema, ResponseFunction,
    ResponseLibrary, Slot, LAMBDA_STATE_INDEX,
};
use crate::model::Hypernetwork;
use crate::partition::{census, is_balanced, signature, Partition, PartitionError, Signature};
use crate::perm::Perm;
use crate::poly::{int, Monomial, Polynomial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynchronyError {
    #[error("signatures have different lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("permutation has length {got}, hyperedges of type {etype} have order {expected}")]
    PermLength { etype: String, expected: usize, got: usize },
    #[error("no hyperedge of type {0}")]
    UnknownEdgeType(String),
    #[error("power sums need k >= 2, got {0}")]
    OrderTooSmall(usize),
    #[error("division by the Vandermonde product leaves a remainder; the polynomial is not block invariant")]
    NonzeroRemainder,
    #[error("vertex {0} not found")]
    UnknownVertex(String),
    #[error(transparent)]
    Admissible(#[from] AdmissibleError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeqOrder {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl fmt::Display for SeqOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeqOrder::Greater => "a > b",
            SeqOrder::Less => "b > a",
            SeqOrder::Equal => "equal",
            SeqOrder::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

/// Compares colour counts from the highest colour down to colour 2; the
/// first colour whose counts differ decides.
pub fn seq_compare(a: &Signature, b: &Signature) -> Result<SeqOrder, SynchronyError> {
    if a.len() != b.len() {
        return Err(SynchronyError::LengthMismatch(a.len(), b.len()));
    }
    let top = a.colours().iter().chain(b.colours()).copied().max().unwrap_or(0);
    let count = |s: &Signature, c: usize| s.colours().iter().filter(|&&x| x == c).count();
    for c in (2..=top).rev() {
        match count(a, c).cmp(&count(b, c)) {
            Ordering::Greater => return Ok(SeqOrder::Greater),
            Ordering::Less => return Ok(SeqOrder::Less),
            Ordering::Equal => {}
        }
    }
    Ok(if a == b { SeqOrder::Equal } else { SeqOrder::Incomparable })
}

/// `Z_{a_1}^{σ(1)} ⋯ Z_{a_m}^{σ(m)}` with `σ` read one-based.
pub fn monomial(a: &Signature, sigma: &Perm) -> Monomial<Colour> {
    Monomial::from_powers(
        a.colours()
            .iter()
            .zip(sigma.images())
            .map(|(&c, &s)| (Colour(c), s as u32 + 1)),
    )
}

/// The attuned permutation of `a`: the largest values go to the positions
/// of the highest colour, and so on down. Within one colour the larger value
/// goes to the smaller position.
pub fn attune(a: &Signature) -> Perm {
    let m = a.len();
    let mut positions: Vec<usize> = (0..m).collect();
    positions.sort_by(|&i, &j| a.colours()[j].cmp(&a.colours()[i]).then(i.cmp(&j)));
    let mut images = vec![0; m];
    for (rank, &i) in positions.iter().enumerate() {
        images[i] = m - 1 - rank;
    }
    Perm::from_images(images).expect("ranks form a permutation")
}

/// Whether `tau` is attuned to `a`: `a_i > a_j` implies `tau(i) > tau(j)`.
pub fn is_attuned(a: &Signature, tau: &Perm) -> bool {
    let c = a.colours();
    (0..c.len()).all(|i| (0..c.len()).all(|j| c[i] <= c[j] || tau.apply(i) > tau.apply(j)))
}

fn edge_type_order(net: &Hypernetwork, etype: &str) -> Result<usize, SynchronyError> {
    net.edges()
        .iter()
        .find(|h| h.etype == etype)
        .map(|h| h.order())
        .ok_or_else(|| SynchronyError::UnknownEdgeType(etype.to_string()))
}

/// `Σ_e Π_i E[etype][e][i][0]^{σ(i)}` over the `count` edges of one group.
fn signature_sum(etype: &str, count: usize, sigma: &Perm) -> Polynomial<Slot> {
    let mut p = Polynomial::zero();
    for e in 0..count {
        let m = Monomial::from_powers(
            sigma
                .images()
                .iter()
                .enumerate()
                .map(|(pos, &s)| (Slot::edge(etype, e, pos, 0), s as u32 + 1)),
        );
        p.add_term(m, int(1));
    }
    p
}

/// Response library whose first component at every vertex receiving
/// hyperedges of type `etype` is `Σ_h Π_i (x_{s_i(h)})_1^{σ(i)}`; every
/// other component and every other vertex type responds with zero.
pub fn witness_library(net: &Hypernetwork, etype: &str, sigma: &Perm) -> Result<ResponseLibrary, SynchronyError> {
    let m = edge_type_order(net, etype)?;
    if sigma.len() != m {
        return Err(SynchronyError::PermLength { etype: etype.to_string(), expected: m, got: sigma.len() });
    }
    Ok(InputSchema::all(net)
        .into_iter()
        .map(|(vtype, schema)| {
            let mut comps = vec![Polynomial::zero(); schema.self_dim];
            if let Some(g) = schema.group(etype) {
                comps[0] = signature_sum(etype, g.count, sigma);
            }
            (vtype, ResponseFunction::Polynomial(comps))
        })
        .collect())
}

pub fn witness_response(net: &Hypernetwork, etype: &str, sigma: &Perm) -> Result<AdmissibleSystem, SynchronyError> {
    Ok(AdmissibleSystem::new(net.clone(), witness_library(net, etype, sigma)?)?)
}

/// A polynomial admissible map of degree `m(m+1)/2` that does not leave
/// `Syn_P` invariant, with an integer point of `Syn_P` where two vertices of
/// one class move apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub etype: String,
    pub sigma: Perm,
    /// Value of each colour (1-based colour `c` at index `c - 1`).
    pub point: Vec<i64>,
    pub first: usize,
    pub second: usize,
    pub first_value: BigInt,
    pub second_value: BigInt,
    /// Response of the broken vertices' type (first component).
    pub response: Polynomial<Slot>,
    /// Restrictions of the two vertices' responses to `Syn_P`.
    pub first_restricted: Polynomial<Colour>,
    pub second_restricted: Polynomial<Colour>,
}

impl Witness {
    pub fn degree(&self) -> u32 {
        let m = self.sigma.len() as u32;
        m * (m + 1) / 2
    }

    /// The full state on `Syn_P`: first components take their colour's
    /// value, higher components are zero.
    pub fn state(&self, net: &Hypernetwork, p: &Partition) -> Vec<i64> {
        let mut x = vec![0; net.total_dim()];
        for v in 0..net.vertex_count() {
            x[net.offset(v)] = self.point[p.colour(v) - 1];
        }
        x
    }
}

/// Restriction of the witness response to `Syn_P` at vertex `v`:
/// `Σ_{h → v of type etype} M^σ_{sig(h)}`.
fn restricted_witness(net: &Hypernetwork, p: &Partition, v: usize, etype: &str, sigma: &Perm) -> Polynomial<Colour> {
    let mut out = Polynomial::zero();
    for &e in net.in_edges(v) {
        if net.edge(e).etype == etype {
            out.add_term(monomial(&signature(net, p, e), sigma), int(1));
        }
    }
    out
}

fn eval_colours(p: &Polynomial<Colour>, z: &[i64]) -> BigInt {
    let v = p.eval(|c| int(z[c.0 - 1]));
    debug_assert!(v.is_integer());
    v.to_integer()
}

fn primes(n: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2;
    while out.len() < n {
        if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// An integer colour assignment where `a` and `b` differ: distinct primes
/// first, then the `{1..5}^C` grid (small `C`), then seeded random points.
fn separating_point(a: &Polynomial<Colour>, b: &Polynomial<Colour>, colours: usize) -> Option<Vec<i64>> {
    let diff = a - b;
    if diff.is_zero() {
        return None;
    }
    let nonzero = |z: &[i64]| !eval_colours(&diff, z).is_zero();
    let z = primes(colours);
    if nonzero(&z) {
        return Some(z);
    }
    if colours <= 8 {
        let mut z = vec![1i64; colours];
        loop {
            if nonzero(&z) {
                return Some(z);
            }
            let mut i = 0;
            while i < colours && z[i] == 5 {
                z[i] = 1;
                i += 1;
            }
            if i == colours {
                break;
            }
            z[i] += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..10_000)
        .map(|_| (0..colours).map(|_| rng.gen_range(-1000..=1000)).collect::<Vec<i64>>())
        .find(|z| nonzero(z))
}

/// Finds an explicit polynomial map breaking `Syn_P`, or `None` when `P` is
/// balanced (or does not refine the vertex types).
///
/// Edge types whose censuses disagree inside some class are tried in order;
/// for each, permutations `σ` are tried lexicographically and the first one
/// whose restricted responses differ on a class is returned.
pub fn find_breaking_witness(net: &Hypernetwork, p: &Partition) -> Option<Witness> {
    let c = census(net, p).ok()?;
    let mut mismatched: Vec<&str> = Vec::new();
    for class in p.classes() {
        for &v in &class[1..] {
            let (a, b) = (c.at(class[0]), c.at(v));
            for ((etype, _), _) in a.iter().chain(b.iter()) {
                let key_count = |m: &BTreeMap<(String, Signature), usize>| {
                    m.iter().filter(|((t, _), _)| t == etype).map(|(k, n)| (k.1.clone(), *n)).collect::<Vec<_>>()
                };
                if key_count(a) != key_count(b) && !mismatched.contains(&etype.as_str()) {
                    mismatched.push(etype.as_str());
                }
            }
        }
    }
    mismatched.sort_unstable();
    for etype in mismatched {
        let m = edge_type_order(net, etype).ok()?;
        for sigma in Perm::all(m) {
            let restricted: Vec<Polynomial<Colour>> =
                (0..net.vertex_count()).map(|v| restricted_witness(net, p, v, etype, &sigma)).collect();
            for class in p.classes() {
                let first = class[0];
                let Some(&second) = class[1..].iter().find(|&&v| restricted[v] != restricted[first]) else {
                    continue;
                };
                let point = separating_point(&restricted[first], &restricted[second], p.num_colours())?;
                let schema = InputSchema::of_vertex(net, first);
                let count = schema.group(etype).map_or(0, |g| g.count);
                return Some(Witness {
                    etype: etype.to_string(),
                    first_value: eval_colours(&restricted[first], &point),
                    second_value: eval_colours(&restricted[second], &point),
                    response: signature_sum(etype, count, &sigma),
                    sigma,
                    point,
                    first,
                    second,
                    first_restricted: restricted[first].clone(),
                    second_restricted: restricted[second].clone(),
                });
            }
        }
    }
    None
}

/// Integer evaluation of a polynomial admissible system. Each vertex type's
/// responses are scaled to integer coefficients; the scale is shared by all
/// vertices of the type, so equalities inside a class are unaffected.
#[derive(Clone, Debug)]
pub struct IntegerField {
    /// Per vertex, per component: terms `(coefficient, [(state index, exp)])`.
    vertices: Vec<Vec<Vec<(i128, Vec<(usize, u32)>)>>>,
    exact: AdmissibleSystem,
    scales: Vec<BigInt>,
}

impl IntegerField {
    pub fn new(system: &AdmissibleSystem) -> Result<Self, SynchronyError> {
        let net = system.network();
        let polys: Vec<Vec<Polynomial<usize>>> = (0..net.vertex_count())
            .map(|v| (0..net.vertex(v).dim).map(|c| system.vertex_polynomial(v, c)).collect())
            .collect::<Result<_, _>>()?;
        let mut type_scale: BTreeMap<&str, BigInt> = BTreeMap::new();
        for (v, ps) in polys.iter().enumerate() {
            let s = type_scale.entry(&net.vertex(v).vtype).or_insert_with(|| BigInt::from(1));
            *s = ps.iter().fold(s.clone(), |acc, p| num::integer::lcm(acc, p.denominator_lcm()));
        }
        let scales: Vec<BigInt> = (0..net.vertex_count()).map(|v| type_scale[net.vertex(v).vtype.as_str()].clone()).collect();
        let vertices = polys
            .iter()
            .zip(&scales)
            .map(|(ps, scale)| {
                ps.iter()
                    .map(|p| {
                        p.terms()
                            .map(|(m, c)| {
                                let k = (c * Rational::from_integer(scale.clone())).to_integer();
                                (k.to_i128().unwrap_or(i128::MAX), m.powers().to_vec())
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(IntegerField { vertices, exact: system.clone(), scales })
    }

    fn eval_fast(&self, x: &[i64], lambda: i64) -> Option<Vec<i128>> {
        let mut out = Vec::with_capacity(x.len());
        for comps in &self.vertices {
            for terms in comps {
                let mut acc: i128 = 0;
                for (c, vars) in terms {
                    if *c == i128::MAX {
                        return None;
                    }
                    let mut t = *c;
                    for &(i, e) in vars {
                        let base = if i == LAMBDA_STATE_INDEX { lambda } else { x[i] } as i128;
                        t = t.checked_mul(base.checked_pow(e)?)?;
                    }
                    acc = acc.checked_add(t)?;
                }
                out.push(acc);
            }
        }
        Some(out)
    }

    /// The scaled field at an integer point.
    pub fn eval(&self, x: &[i64], lambda: i64) -> Vec<BigInt> {
        if let Some(v) = self.eval_fast(x, lambda) {
            return v.into_iter().map(BigInt::from).collect();
        }
        let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        let exact = self.exact.eval_exact(&xr, &int(lambda)).expect("system is polynomial");
        let net = self.exact.network();
        let mut out = Vec::with_capacity(exact.len());
        for v in 0..net.vertex_count() {
            for c in 0..net.vertex(v).dim {
                let scaled = &exact[net.offset(v) + c] * Rational::from_integer(self.scales[v].clone());
                out.push(scaled.to_integer());
            }
        }
        out
    }
}

/// Whether the field at `x` has equal blocks on every class of `p`.
fn field_respects(net: &Hypernetwork, p: &Partition, f: &[BigInt]) -> bool {
    p.classes().iter().all(|class| {
        let block = |v: usize| &f[net.offset(v)..net.offset(v) + net.vertex(v).dim];
        class[1..].iter().all(|&v| block(v) == block(class[0]))
    })
}

/// A random integer point of `Syn_P` (all components synchronized).
pub fn random_syn_point(net: &Hypernetwork, p: &Partition, rng: &mut impl Rng) -> Vec<i64> {
    let dim = |c: usize| net.vertex(p.classes()[c][0]).dim;
    let blocks: Vec<Vec<i64>> = (0..p.num_colours())
        .map(|c| (0..dim(c)).map(|_| rng.gen_range(-9..=9)).collect())
        .collect();
    let mut x = vec![0; net.total_dim()];
    for v in 0..net.vertex_count() {
        let b = &blocks[p.colour(v) - 1];
        x[net.offset(v)..net.offset(v) + b.len()].copy_from_slice(b);
    }
    x
}

/// A batch of random exact polynomial probes for one hypernetwork, reusable
/// across partitions.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    pub degree: u32,
    fields: Vec<IntegerField>,
}

impl ProbeSet {
    pub fn new(net: &Hypernetwork, degree: u32, probes: usize, seed: u64) -> Result<Self, SynchronyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fields = (0..probes)
            .map(|_| {
                let lib = random_probe_library(net, degree, &mut rng);
                IntegerField::new(&AdmissibleSystem::new(net.clone(), lib)?)
            })
            .collect::<Result<_, _>>()?;
        Ok(ProbeSet { degree, fields })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Whether every probe leaves `Syn_P` invariant, each tested at a random
    /// integer point of `Syn_P`.
    pub fn all_invariant(&self, net: &Hypernetwork, p: &Partition, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.fields.iter().all(|f| {
            let x = random_syn_point(net, p, &mut rng);
            field_respects(net, p, &f.eval(&x, 0))
        })
    }
}

/// `k(k+1)/2` for a hypernetwork of order `k`.
pub fn degree_bound(order: usize) -> u32 {
    (order * (order + 1) / 2) as u32
}

pub const DEFAULT_PROBES: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustnessVerdict {
    pub balanced: bool,
    pub invariant_under_low_degree: bool,
    /// Degree of the random probes.
    pub probe_degree: u32,
    pub probes: usize,
    pub witness: Option<Witness>,
}

impl RobustnessVerdict {
    /// Balanced exactly when there is no witness, and, when the probes
    /// reach the full degree bound, exactly when the probes all pass.
    pub fn is_consistent(&self, order: usize) -> bool {
        let probes_decisive = self.probe_degree >= degree_bound(order);
        self.balanced == self.witness.is_none()
            && (!self.balanced || self.invariant_under_low_degree)
            && (!probes_decisive || self.balanced == self.invariant_under_low_degree)
    }
}

/// Balance, an explicit breaking witness, and random invariance probes of
/// degree `min(k(k+1)/2, degree_cap)`.
pub fn robust_verdict(
    net: &Hypernetwork,
    p: &Partition,
    seed: u64,
    degree_cap: Option<u32>,
    probes: usize,
) -> Result<RobustnessVerdict, SynchronyError> {
    p.check_refines_types(net)?;
    let bound = degree_bound(net.order());
    let probe_degree = degree_cap.map_or(bound, |d| d.min(bound));
    let set = ProbeSet::new(net, probe_degree, probes, seed)?;
    Ok(RobustnessVerdict {
        balanced: is_balanced(net, p).is_balanced(),
        invariant_under_low_degree: set.all_invariant(net, p, seed.wrapping_add(1)),
        probe_degree,
        probes,
        witness: find_breaking_witness(net, p),
    })
}

/// `Σ_e Π_{i=1..k} E[etype][e][i-1][0]^i` over the in-edges of type `etype`
/// of a vertex with `count` such edges.
pub fn power_sum(k: usize, etype: &str, count: usize) -> Result<Polynomial<Slot>, SynchronyError> {
    if k < 2 {
        return Err(SynchronyError::OrderTooSmall(k));
    }
    Ok(signature_sum(etype, count, &Perm::identity(k)))
}

/// Library for an augmented hypernetwork: `w_response` on the type of the
/// added nodes, zero everywhere else.
pub fn augmented_library(net: &Hypernetwork, w_type: &str, w_response: Vec<Polynomial<Slot>>) -> ResponseLibrary {
    InputSchema::all(net)
        .into_iter()
        .map(|(vtype, schema)| {
            let r = if vtype == w_type {
                ResponseFunction::Polynomial(w_response.clone())
            } else {
                ResponseFunction::Polynomial(vec![Polynomial::zero(); schema.self_dim])
            };
            (vtype, r)
        })
        .collect()
}

/// Core coordinates used by [`vandermonde_quotient`]: `x_0..x_k` are the
/// core nodes, `k+1` stands for the common `y` value and `k+2` for lambda.
pub fn even_minus_odd(q: &Polynomial<Slot>, k: usize, etype: &str) -> Polynomial<usize> {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for sigma in Perm::all(k + 1) {
        let block = sigma.images()[1..].to_vec();
        if sigma.parity() == 0 {
            even.push(block);
        } else {
            odd.push(block);
        }
    }
    let assign = |blocks: &[Vec<usize>]| {
        q.map_vars(|s| match s {
            Slot::Edge { etype: t, edge, pos, .. } if &**t == etype => blocks[*edge][*pos],
            Slot::Lambda => k + 2,
            _ => k + 1,
        })
    };
    &assign(&even) - &assign(&odd)
}

/// Divides `Q(even blocks) - Q(odd blocks)` by `Π_{i>j} (x_i - x_j)` exactly.
pub fn vandermonde_quotient(q: &Polynomial<Slot>, k: usize, etype: &str) -> Result<Polynomial<usize>, SynchronyError> {
    let mut s = even_minus_odd(q, k, etype);
    for i in 0..=k {
        for j in 0..i {
            let (quot, rem) = s.div_rem_difference(&i, &j);
            if !rem.is_zero() {
                return Err(SynchronyError::NonzeroRemainder);
            }
            s = quot;
        }
    }
    Ok(s)
}

/// `Π_{i>j} (x_i - x_j)` over `x_0..x_k`.
pub fn vandermonde(k: usize) -> Polynomial<usize> {
    let mut p = Polynomial::one();
    for i in 0..=k {
        for j in 0..i {
            p = &p * &(&Polynomial::var(i) - &Polynomial::var(j));
        }
    }
    p
}

/// Block indices of the two vertices swapped by the ghost symmetry.
fn swap_blocks(net: &Hypernetwork, w0: &str, w1: &str) -> Result<(usize, usize, usize), SynchronyError> {
    let find = |id: &str| net.vertex_index(id).ok_or_else(|| SynchronyError::UnknownVertex(id.to_string()));
    let (a, b) = (find(w0)?, find(w1)?);
    Ok((net.offset(a), net.offset(b), net.vertex(a).dim))
}

fn apply_swap<T>(x: &mut [T], (a, b, d): (usize, usize, usize)) {
    for i in 0..d {
        x.swap(a + i, b + i);
    }
}

/// Whether `f(Sx) = S f(x)` within `tol` at every point, `S` swapping the
/// blocks of `w0` and `w1`.
pub fn check_ghost_symmetry(
    system: &AdmissibleSystem,
    w0: &str,
    w1: &str,
    points: &[Vec<f64>],
    lambda: f64,
    tol: f64,
) -> Result<bool, SynchronyError> {
    let swap = swap_blocks(system.network(), w0, w1)?;
    for x in points {
        let mut fx = system.eval(x, lambda)?;
        apply_swap(&mut fx, swap);
        let mut sx = x.clone();
        apply_swap(&mut sx, swap);
        let fsx = system.eval(&sx, lambda)?;
        if fx.iter().zip(&fsx).any(|(a, b)| (a - b).abs() > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact version of [`check_ghost_symmetry`] for polynomial systems.
pub fn check_ghost_symmetry_exact(
    system: &AdmissibleSystem,
    w0: &str,
    w1: &str,
    points: &[Vec<Rational>],
    lambda: &Rational,
) -> Result<bool, SynchronyError> {
    let swap = swap_blocks(system.network(), w0, w1)?;
    for x in points {
        let mut fx = system.eval_exact(x, lambda)?;
        apply_swap(&mut fx, swap);
        let mut sx = x.clone();
        apply_swap(&mut sx, swap);
        if system.eval_exact(&sx, lambda)? != fx {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use itertools::Itertools;

    fn sig(c: &[usize]) -> Signature {
        Signature(c.to_vec())
    }

    #[test]
    fn seq_compare_examples() {
        assert_eq!(seq_compare(&sig(&[2, 2, 1]), &sig(&[1, 1, 2])).unwrap(), SeqOrder::Greater);
        assert_eq!(seq_compare(&sig(&[1, 1, 2]), &sig(&[2, 2, 1])).unwrap(), SeqOrder::Less);
        assert_eq!(seq_compare(&sig(&[2, 1]), &sig(&[2, 1])).unwrap(), SeqOrder::Equal);
        assert_eq!(seq_compare(&sig(&[1, 2]), &sig(&[2, 1])).unwrap(), SeqOrder::Incomparable);
        assert!(seq_compare(&sig(&[1]), &sig(&[1, 1])).is_err());
    }

    #[test]
    fn monomial_examples() {
        let id = Perm::identity(3);
        let z1z2 = Monomial::from_powers([(Colour(1), 3), (Colour(2), 3)]);
        assert_eq!(monomial(&sig(&[2, 2, 1]), &id), z1z2);
        assert_eq!(monomial(&sig(&[1, 1, 2]), &id), z1z2);
        for s in Perm::all(4) {
            assert_eq!(monomial(&sig(&[3, 3, 3, 3]), &s), Monomial::var(Colour(3), 10));
        }
    }

    #[test]
    fn attune_examples() {
        let a = sig(&[3, 3, 1, 2, 1]);
        let tau = attune(&a);
        assert_eq!(tau.one_based(), vec![5, 4, 2, 3, 1]);
        assert!(is_attuned(&a, &tau));
        assert!(is_attuned(&a, &Perm::from_one_based(&[4, 5, 1, 3, 2]).unwrap()));
        assert!(is_attuned(&a, &Perm::from_one_based(&[5, 4, 1, 3, 2]).unwrap()));
        assert!(!is_attuned(&a, &Perm::identity(5)));
        assert_eq!(attune(&sig(&[2, 2, 2])).one_based(), vec![3, 2, 1]);
        for p in Perm::all(3) {
            assert!(is_attuned(&sig(&[2, 2, 2]), &p));
        }
    }

    #[test]
    fn attune_always_attuned() {
        for m in 1..=5 {
            for a in (0..m).map(|_| 1..=3usize).multi_cartesian_product() {
                let a = Signature(a);
                assert!(is_attuned(&a, &attune(&a)), "{a}");
            }
        }
    }

    #[test]
    fn witness_response_on_two_triangles() {
        let net = gallery::two_triangles();
        let sys = witness_response(&net, "h", &Perm::identity(2)).unwrap();
        let x = [0.0, 1.0, 2.0, 7.0, -3.0];
        let f = sys.eval(&x, 0.0).unwrap();
        assert_eq!(f[3], 4.0);
        assert_eq!(f[4], 2.0);
        assert_eq!(&f[..3], &[0.0, 0.0, 0.0]);
        let lib = witness_library(&net, "h", &Perm::identity(2)).unwrap();
        assert_eq!(lib["square"].as_polynomial().unwrap()[0].total_degree(), 3);
        assert!(witness_response(&net, "nope", &Perm::identity(2)).is_err());
        assert!(witness_response(&net, "h", &Perm::identity(3)).is_err());
    }

    #[test]
    fn witness_for_running_example_merge() {
        let net = gallery::running_example();
        let p = Partition::parse(&net, "v0 | v1 | v2 | w0 w1").unwrap();
        let w = find_breaking_witness(&net, &p).expect("not balanced");
        assert_eq!(w.etype, "h");
        assert_eq!(w.sigma, Perm::identity(2));
        assert_eq!(w.degree(), 3);
        assert_ne!(w.first_value, w.second_value);
        assert_eq!(eval_colours(&w.first_restricted, &[0, 1, 2]), BigInt::from(4));
        assert_eq!(eval_colours(&w.second_restricted, &[0, 1, 2]), BigInt::from(2));

        let sys = witness_response(&net, "h", &w.sigma).unwrap();
        let x: Vec<f64> = w.state(&net, &p).iter().map(|&v| v as f64).collect();
        let f = sys.eval(&x, 0.0).unwrap();
        assert_ne!(f[3], f[4]);
    }

    #[test]
    fn no_witness_for_balanced() {
        let net = gallery::running_example();
        let p = Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap();
        assert!(find_breaking_witness(&net, &p).is_none());
        let tri = gallery::two_triangles();
        let p = Partition::parse(&tri, "v0 v1 v2 | w0 | w1").unwrap();
        assert!(is_balanced(&tri, &p).is_balanced());
        assert!(find_breaking_witness(&tri, &p).is_none());
    }

    #[test]
    fn verdicts_on_running_example() {
        let net = gallery::running_example();
        let two = Partition::parse(&net, "v0 v1 v2 | w0 w1").unwrap();
        let v = robust_verdict(&net, &two, 1, None, 10).unwrap();
        assert!(v.balanced && v.invariant_under_low_degree && v.witness.is_none());
        assert!(v.is_consistent(net.order()));

        let merge = Partition::parse(&net, "v0 | v1 | v2 | w0 w1").unwrap();
        let v = robust_verdict(&net, &merge, 1, None, 10).unwrap();
        assert!(!v.balanced && !v.invariant_under_low_degree && v.witness.is_some());
        assert!(v.is_consistent(net.order()));

        let capped = robust_verdict(&net, &merge, 1, Some(2), 25).unwrap();
        assert_eq!(capped.probe_degree, 2);
        assert!(capped.invariant_under_low_degree);
        assert!(capped.is_consistent(net.order()));
    }

    #[test]
    fn power_sum_k2() {
        let net = gallery::two_triangles();
        let p = power_sum(2, "h", 3).unwrap();
        assert_eq!(p.total_degree(), 3);
        assert!(power_sum(1, "h", 3).is_err());
        let sys = AdmissibleSystem::new(net.clone(), augmented_library(&net, "square", vec![p])).unwrap();
        let f = sys.eval(&[0.0, 1.0, 2.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!((f[3], f[4]), (4.0, 2.0));
        let f = sys.eval(&[1.5, 1.5, -2.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(f[3], f[4]);
    }

    #[test]
    fn vandermonde_of_power_sum_is_one() {
        let p = power_sum(2, "h", 3).unwrap();
        assert_eq!(vandermonde_quotient(&p, 2, "h").unwrap(), Polynomial::one());
        let diff = even_minus_odd(&p, 2, "h");
        assert_eq!(diff, vandermonde(2));
    }

    #[test]
    fn vandermonde_low_degree_and_full_symmetry() {
        let y = Polynomial::var(Slot::Own(0));
        assert!(vandermonde_quotient(&y, 2, "h").unwrap().is_zero());
        let all: Polynomial<Slot> = (0..3)
            .flat_map(|e| (0..2).map(move |pos| Polynomial::var(Slot::edge("h", e, pos, 0)).pow(2)))
            .fold(Polynomial::zero(), |a, b| &a + &b);
        assert!(vandermonde_quotient(&all, 2, "h").unwrap().is_zero());
        let broken = Polynomial::var(Slot::edge("h", 0, 0, 0));
        assert_eq!(vandermonde_quotient(&broken, 2, "h"), Err(SynchronyError::NonzeroRemainder));
    }

    #[test]
    fn ghost_symmetry_examples() {
        let net = gallery::two_triangles();
        let pts: Vec<Vec<Rational>> = vec![[0, 1, 2, 3, 5], [2, 3, 5, 7, 7], [-1, 4, 9, 0, 2]]
            .into_iter()
            .map(|v| v.iter().map(|&x| int(x)).collect())
            .collect();
        let constant = AdmissibleSystem::new(
            net.clone(),
            augmented_library(&net, "square", vec![Polynomial::integer(3)]),
        )
        .unwrap();
        assert!(check_ghost_symmetry_exact(&constant, "w0", "w1", &pts, &int(0)).unwrap());
        let ps = AdmissibleSystem::new(
            net.clone(),
            augmented_library(&net, "square", vec![power_sum(2, "h", 3).unwrap()]),
        )
        .unwrap();
        assert!(!check_ghost_symmetry_exact(&ps, "w0", "w1", &pts, &int(0)).unwrap());
        let fpts: Vec<Vec<f64>> = vec![vec![2.0, 3.0, 5.0, 0.0, 0.0]];
        assert!(!check_ghost_symmetry(&ps, "w0", "w1", &fpts, 0.0, 1e-9).unwrap());
        assert!(check_ghost_symmetry(&constant, "w0", "w1", &fpts, 0.0, 0.0).unwrap());
    }

    #[test]
    fn integer_field_matches_exact() {
        let net = gallery::running_example();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let lib = random_probe_library(&net, 3, &mut rng);
        let sys = AdmissibleSystem::new(net.clone(), lib).unwrap();
        let field = IntegerField::new(&sys).unwrap();
        let x = [3i64, -2, 5, 1, 4];
        let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        let exact = sys.eval_exact(&xr, &int(0)).unwrap();
        let scaled = field.eval(&x, 0);
        for v in 0..5 {
            assert_eq!(Rational::from_integer(scaled[v].clone()), &exact[v] * Rational::from_integer(field.scales[v].clone()));
        }
    }
}
