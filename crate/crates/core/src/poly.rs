//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Polynomials are generic over the variable type, so the same machinery
//! serves response-function slots, colour variables on a synchrony
//! subspace, and the core coordinates of an augmented hypernetwork.
//! Terms live in a `BTreeMap` keyed by sorted monomials, which keeps the
//! representation canonical: two equal polynomials compare equal
//! structurally and the zero polynomial has no terms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// A polynomial variable.
pub trait Variable: Ord + Clone + fmt::Debug {
    /// Whether powers of this variable count toward the total degree.
    fn counts_toward_degree(&self) -> bool {
        true
    }
}

impl Variable for usize {}

/// A power product `v1^e1 * v2^e2 * ...`, variables strictly increasing,
/// exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial<V>(Vec<(V, u32)>);

impl<V: Variable> Monomial<V> {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: V, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    /// Builds a monomial from arbitrary `(variable, exponent)` pairs,
    /// merging repeats and dropping zero exponents.
    pub fn from_powers(powers: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut raw: Vec<(V, u32)> = powers.into_iter().filter(|(_, e)| *e > 0).collect();
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(V, u32)> = Vec::with_capacity(raw.len());
        for (v, e) in raw {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    /// Wraps powers already sorted by variable with distinct variables and
    /// positive exponents.
    pub(crate) fn from_sorted_powers(powers: Vec<(V, u32)>) -> Self {
        debug_assert!(powers.windows(2).all(|w| w[0].0 < w[1].0) && powers.iter().all(|(_, e)| *e > 0));
        Monomial(powers)
    }

    pub fn powers(&self) -> &[(V, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &V) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| v.counts_toward_degree())
            .map(|(_, e)| e)
            .sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Splits off the power of `v`: returns `(exp, rest)`.
    fn split(&self, v: &V) -> (u32, Self) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for (w, e) in &self.0 {
            if w == v {
                exp = *e;
            } else {
                rest.push((w.clone(), *e));
            }
        }
        (exp, Monomial(rest))
    }
}

/// Multivariate polynomial over `Q` in canonical sparse form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial<V> {
    terms: BTreeMap<Monomial<V>, Rational>,
}

impl<V: Variable> Default for Polynomial<V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Variable> Polynomial<V> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(v: V) -> Self {
        Self::term(Rational::one(), Monomial::var(v, 1))
    }

    pub fn term(c: Rational, m: Monomial<V>) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Wraps terms with strictly increasing monomials and nonzero coefficients.
    pub(crate) fn from_sorted_terms(terms: Vec<(Monomial<V>, Rational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0) && terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { terms: terms.into_iter().collect() }
    }

    /// Sums the terms over a common denominator, so merging repeated
    /// monomials costs integer additions only.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial<V>, Rational)>) -> Self {
        let terms: Vec<(Monomial<V>, Rational)> = terms.into_iter().collect();
        let mut den = BigInt::one();
        for (_, c) in &terms {
            if !(&den % c.denom()).is_zero() {
                den = num::integer::lcm(den, c.denom().clone());
            }
        }
        let mut acc: BTreeMap<Monomial<V>, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            let n = if c.denom() == &den { c.numer().clone() } else { c.numer() * (&den / c.denom()) };
            *acc.entry(m).or_insert_with(BigInt::zero) += n;
        }
        Polynomial {
            terms: acc
                .into_iter()
                .filter(|(_, n)| !n.is_zero())
                .map(|(m, n)| (m, Rational::new(n, den.clone())))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial<V>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<V>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial<V>) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, ignoring variables that do not count toward it.
    /// The zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<V> {
        let mut vs: Vec<V> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces every variable by a polynomial in another variable set.
    pub fn substitute<W: Variable>(&self, mut image: impl FnMut(&V) -> Polynomial<W>) -> Polynomial<W> {
        let mut cache: BTreeMap<V, Polynomial<W>> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            for (v, e) in &m.0 {
                let base = cache.entry(v.clone()).or_insert_with(|| image(v));
                acc = &acc * &base.pow(*e);
            }
            out += &acc;
        }
        out
    }

    /// Renames variables one-to-one (or many-to-one); exponents merge.
    pub fn map_vars<W: Variable>(&self, mut f: impl FnMut(&V) -> W) -> Polynomial<W> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::from_powers(m.0.iter().map(|(v, e)| (f(v), *e))),
                c.clone(),
            )
        }))
    }

    /// Exact evaluation.
    pub fn eval(&self, mut value: impl FnMut(&V) -> Rational) -> Rational {
        let mut cache: BTreeMap<V, Rational> = BTreeMap::new();
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = cache.entry(v.clone()).or_insert_with(|| value(v));
                t *= num::pow(x.clone(), *e as usize);
            }
            sum += t;
        }
        sum
    }

    pub fn eval_f64(&self, mut value: impl FnMut(&V) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .fold(c.to_f64().unwrap_or(f64::NAN), |acc, (v, e)| acc * value(v).powi(*e as i32))
            })
            .sum()
    }

    /// Divides by `(a - b)` treating the polynomial as univariate in `a`.
    /// Returns `(quotient, remainder)` with the remainder free of `a`.
    pub fn div_rem_difference(&self, a: &V, b: &V) -> (Self, Self) {
        assert!(a != b, "divisor a - b must be non-zero");
        // Coefficients c_d (polynomials without `a`) of a^d.
        let mut by_power: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            by_power.entry(e).or_default().add_term(rest, c.clone());
        }
        let top = match by_power.keys().next_back() {
            Some(&d) => d,
            None => return (Self::zero(), Self::zero()),
        };
        let b_poly = Self::var(b.clone());
        // Synthetic division by (a - b): q_{d-1} = c_d + b * q_d.
        let mut quotient = Self::zero();
        let mut carry = Self::zero();
        for d in (1..=top).rev() {
            let c_d = by_power.remove(&d).unwrap_or_default();
            let q = &c_d + &(&b_poly * &carry);
            quotient += &(&q * &Self::term(Rational::one(), Monomial::var(a.clone(), d - 1)));
            carry = q;
        }
        let c_0 = by_power.remove(&0).unwrap_or_default();
        let remainder = &c_0 + &(&b_poly * &carry);
        (quotient, remainder)
    }

    /// Smallest positive integer `s` such that `s * self` has integer
    /// coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()))
    }
}

impl<V: Variable> From<Rational> for Polynomial<V> {
    fn from(c: Rational) -> Self {
        Polynomial::constant(c)
    }
}

impl<'a, V: Variable> AddAssign<&'a Polynomial<V>> for Polynomial<V> {
    fn add_assign(&mut self, rhs: &'a Polynomial<V>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a, V: Variable> SubAssign<&'a Polynomial<V>> for Polynomial<V> {
    fn sub_assign(&mut self, rhs: &'a Polynomial<V>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a, V: Variable> Add for &'a Polynomial<V> {
    type Output = Polynomial<V>;
    fn add(self, rhs: Self) -> Polynomial<V> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a, V: Variable> Sub for &'a Polynomial<V> {
    type Output = Polynomial<V>;
    fn sub(self, rhs: Self) -> Polynomial<V> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a, V: Variable> Mul for &'a Polynomial<V> {
    type Output = Polynomial<V>;
    fn mul(self, rhs: Self) -> Polynomial<V> {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl<V: Variable> Add for Polynomial<V> {
    type Output = Polynomial<V>;
    fn add(mut self, rhs: Self) -> Polynomial<V> {
        self += &rhs;
        self
    }
}

impl<V: Variable> Sub for Polynomial<V> {
    type Output = Polynomial<V>;
    fn sub(mut self, rhs: Self) -> Polynomial<V> {
        self -= &rhs;
        self
    }
}

impl<V: Variable> Mul for Polynomial<V> {
    type Output = Polynomial<V>;
    fn mul(self, rhs: Self) -> Polynomial<V> {
        &self * &rhs
    }
}

impl<'a, V: Variable> Neg for &'a Polynomial<V> {
    type Output = Polynomial<V>;
    fn neg(self) -> Polynomial<V> {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<V: Variable> Neg for Polynomial<V> {
    type Output = Polynomial<V>;
    fn neg(self) -> Polynomial<V> {
        -&self
    }
}

pub(crate) fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl<V: Variable + fmt::Display> fmt::Display for Polynomial<V> {
    /// Writes `c * v^e * w + ...`, highest-degree terms first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut first = true;
            if !mag.is_one() || m.is_one() {
                write!(f, "{}", format_rational(&mag))?;
                first = false;
            }
            for (v, e) in m.powers() {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if *e == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Convenience: rational from a pair of integers.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Polynomial<usize> {
        Polynomial::var(i)
    }

    #[test]
    fn canonical_form_cancels_to_zero() {
        let p = &(&x(0) * &x(1)) - &(&x(1) * &x(0));
        assert!(p.is_zero());
        assert_eq!(p.total_degree(), 0);
        assert_eq!(p, Polynomial::zero());
    }

    #[test]
    fn multiplication_and_degree() {
        let p = (&x(0) + &x(1)).pow(3);
        assert_eq!(p.len(), 4);
        assert_eq!(p.total_degree(), 3);
        assert_eq!(p.coefficient(&Monomial::from_powers([(0, 2), (1, 1)])), int(3));
    }

    #[test]
    fn divide_by_difference_exact() {
        // x0^3 - x1^3 = (x0 - x1)(x0^2 + x0 x1 + x1^2)
        let p = &x(0).pow(3) - &x(1).pow(3);
        let (q, r) = p.div_rem_difference(&0, &1);
        assert!(r.is_zero());
        let expected = &(&x(0).pow(2) + &(&x(0) * &x(1))) + &x(1).pow(2);
        assert_eq!(q, expected);
    }

    #[test]
    fn divide_by_difference_remainder() {
        // x0^2 + 1 = (x0 - x1)(x0 + x1) + x1^2 + 1
        let p = &x(0).pow(2) + &Polynomial::one();
        let (q, r) = p.div_rem_difference(&0, &1);
        assert_eq!(q, &x(0) + &x(1));
        assert_eq!(r, &x(1).pow(2) + &Polynomial::one());
        let back = &(&q * &(&x(0) - &x(1))) + &r;
        assert_eq!(back, p);
    }

    #[test]
    fn substitution_and_eval_agree() {
        let p = &(&x(0) * &x(1).pow(2)) + &Polynomial::integer(5);
        let s = p.substitute(|v| if *v == 0 { x(2) } else { &x(2) + &Polynomial::one() });
        let direct = p.eval(|v| if *v == 0 { int(3) } else { int(4) });
        let via = s.eval(|_| int(3));
        assert_eq!(direct, via);
        assert_eq!(direct, int(53));
    }

    #[test]
    fn display_is_readable() {
        let p = &(&x(0) * &x(1).pow(2)).scale(&ratio(1, 3)) - &Polynomial::integer(2);
        assert_eq!(p.to_string(), "1/3*0*1^2 - 2");
    }

    #[test]
    fn denominator_lcm_clears_fractions() {
        let p = &x(0).scale(&ratio(1, 6)) + &x(1).scale(&ratio(3, 4));
        assert_eq!(p.denominator_lcm(), BigInt::from(12));
    }
}
