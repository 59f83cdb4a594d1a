//! Permutations of `{0, .., n-1}`.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0:?} is not a permutation")]
pub struct NotAPermutation(pub Vec<usize>);

/// A bijection of `{0, .., n-1}` stored by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, NotAPermutation> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(NotAPermutation(images));
            }
        }
        Ok(Perm(images))
    }

    /// From images written on `{1, .., n}`.
    pub fn from_one_based(images: &[usize]) -> Result<Self, NotAPermutation> {
        if images.contains(&0) {
            return Err(NotAPermutation(images.to_vec()));
        }
        Self::from_images(images.iter().map(|i| i - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// 0 for even, 1 for odd; computed from the cycle decomposition.
    pub fn parity(&self) -> u8 {
        let mut seen = vec![false; self.0.len()];
        let mut transpositions = 0;
        for start in 0..self.0.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        (transpositions % 2) as u8
    }

    /// All permutations of `n` elements, lexicographic in their images.
    pub fn all(n: usize) -> impl Iterator<Item = Perm> {
        (0..n).permutations(n).map(Perm)
    }
}

impl fmt::Display for Perm {
    /// One-line notation on `{1, .., n}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.one_based().iter().join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inversion_parity(p: &Perm) -> u8 {
        let v = p.images();
        let mut inv = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    inv += 1;
                }
            }
        }
        (inv % 2) as u8
    }

    #[test]
    fn parity_matches_inversion_count() {
        for n in 0..=6 {
            for p in Perm::all(n) {
                assert_eq!(p.parity(), inversion_parity(&p), "{p}");
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all: Vec<Perm> = Perm::all(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], Perm::identity(4));
        assert_eq!(all.iter().filter(|p| p.parity() == 0).count(), 12);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![0, 2]).is_err());
        assert!(Perm::from_one_based(&[0, 1]).is_err());
        assert_eq!(Perm::from_one_based(&[2, 1]).unwrap().images(), &[1, 0]);
    }

    #[test]
    fn compose_and_inverse() {
        let p = Perm::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(p.compose(&p.inverse()), Perm::identity(3));
        assert_eq!(p.to_string(), "(3,1,2)");
    }
}
