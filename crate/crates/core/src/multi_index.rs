//! Occupation vectors over `d` modes.
//!
//! A [`MultiIndex`] labels both the Fock basis vector `φ_α = z*^α / √(α!)` and the
//! exponents of symbol monomials. Everything that enumerates multi-indices uses the
//! graded lexicographic order: total degree first, then the first mode carrying the
//! larger exponent comes first, so for two modes the degree-one block is `(1,0), (0,1)`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(modes: usize) -> Self {
        MultiIndex(vec![0; modes])
    }

    pub fn unit(modes: usize, mode: usize) -> Self {
        let mut e = vec![0; modes];
        e[mode] = 1;
        MultiIndex(e)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// `α!` as the product of per-mode factorials.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modes(), other.modes());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, or `None` when some entry would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.modes(), other.modes());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Entry-wise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn with_entry(&self, mode: usize, value: u32) -> Self {
        let mut e = self.0.clone();
        e[mode] = value;
        MultiIndex(e)
    }

    /// `z^α` for a complex vector `z`.
    pub fn power(&self, z: &[num_complex::Complex64]) -> num_complex::Complex64 {
        self.0
            .iter()
            .zip(z)
            .fold(num_complex::Complex64::new(1.0, 0.0), |acc, (&a, &zi)| {
                acc * zi.powu(a)
            })
    }

    /// First `n` modes only; `None` if any dropped mode is occupied.
    pub fn restrict(&self, n: usize) -> Option<Self> {
        if self.0[n..].iter().any(|&a| a != 0) {
            return None;
        }
        Some(MultiIndex(self.0[..n].to_vec()))
    }

    /// Pad with zeros up to `modes` entries.
    pub fn extend_to(&self, modes: usize) -> Self {
        let mut e = self.0.clone();
        e.resize(modes, 0);
        MultiIndex(e)
    }

    /// All multi-indices of exactly total degree `k`, in graded-lex order.
    pub fn of_degree(modes: usize, k: u32) -> Vec<Self> {
        let mut out = Vec::new();
        if modes == 0 {
            if k == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        let mut current = vec![0; modes];
        fill_degree(&mut current, 0, k, &mut out);
        out
    }

    /// All multi-indices with total degree `≤ max_degree`, in graded-lex order.
    pub fn up_to_degree(modes: usize, max_degree: u32) -> Vec<Self> {
        (0..=max_degree)
            .flat_map(|k| Self::of_degree(modes, k))
            .collect()
    }
}

fn fill_degree(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill_degree(current, pos + 1, remaining - a, out);
    }
    current[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// `n!` in floating point (exact up to 22!).
pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient `C(n, k)` in floating point.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of multi-indices over `modes` modes with degree `≤ cutoff`: `C(cutoff + modes, modes)`.
pub fn truncated_dimension(modes: usize, cutoff: u32) -> usize {
    binomial(cutoff + modes as u32, modes as u32).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order_two_modes() {
        let all = MultiIndex::up_to_degree(2, 2);
        let got: Vec<Vec<u32>> = all.iter().map(|a| a.entries().to_vec()).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn enumeration_counts_match_binomial() {
        for d in 1..=4 {
            for m in 0..=6 {
                assert_eq!(
                    MultiIndex::up_to_degree(d, m).len(),
                    truncated_dimension(d, m)
                );
            }
        }
    }

    #[test]
    fn factorial_of_multi_index() {
        assert_eq!(MultiIndex::new(vec![2, 1]).factorial(), 2.0);
        assert_eq!(MultiIndex::new(vec![3, 0, 4]).factorial(), 144.0);
    }

    #[test]
    fn checked_sub_rejects_negative() {
        let a = MultiIndex::new(vec![1, 2]);
        assert_eq!(
            a.checked_sub(&MultiIndex::new(vec![1, 1])),
            Some(MultiIndex::new(vec![0, 1]))
        );
        assert_eq!(a.checked_sub(&MultiIndex::new(vec![2, 0])), None);
    }
}
