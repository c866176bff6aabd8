//! Set-pair systems and the predicates and transforms on them.
//!
//! Pair indices are 0-based in the API and printed 1-based in messages and
//! files. Element labels are 0-based everywhere.

use crate::set::ElementSet;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Which side of a pair a set sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("pair {}: label {label} is outside the ground set of size {n}", .pair + 1)]
    LabelOutOfRange { pair: usize, label: usize, n: usize },
    #[error("pair {}: A and B share element {element}", .pair + 1)]
    PairNotDisjoint { pair: usize, element: usize },
    #[error("pair {}: |{side}| = {size} exceeds the cap {cap}", .pair + 1)]
    SizeCapExceeded {
        pair: usize,
        side: Side,
        size: usize,
        cap: usize,
    },
    #[error("pair {}: |{side}| = {size}, expected exactly {expected}", .pair + 1)]
    SizeNotExact {
        pair: usize,
        side: Side,
        size: usize,
        expected: usize,
    },
    #[error("system is not skew: A_{} and B_{} are disjoint", .i + 1, .j + 1)]
    NotSkew { i: usize, j: usize },
}

/// One pair `(A, B)` of disjoint sets.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SetPair {
    pub a: ElementSet,
    pub b: ElementSet,
}

impl SetPair {
    pub fn new(a: impl Into<ElementSet>, b: impl Into<ElementSet>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
        }
    }
}

/// An ordered sequence of set pairs over the ground set `0..n`.
///
/// Construction validates that every label is below `n` and that each pair
/// is disjoint, so every value of this type is well formed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SetPairSystem {
    pairs: Vec<SetPair>,
    n: usize,
}

/// Summary of a system: both predicates, every violated ordered index pair,
/// and the size metrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemReport {
    pub is_skew: bool,
    pub is_symmetric_bollobas: bool,
    /// Every ordered `(i, j)`, `i != j`, with `A_i ∩ B_j = ∅`, 0-based.
    pub violations: Vec<(usize, usize)>,
    pub m: usize,
    pub union_a_size: usize,
    pub union_b_size: usize,
    pub ground_size: usize,
    pub max_a_size: usize,
    pub max_b_size: usize,
}

impl SystemReport {
    /// Violations with `i < j`; these are the only ones the skew condition sees.
    pub fn skew_violations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.violations.iter().copied().filter(|(i, j)| i < j)
    }
}

impl SetPairSystem {
    pub fn new(n: usize, pairs: Vec<SetPair>) -> Result<Self, SystemError> {
        for (k, pair) in pairs.iter().enumerate() {
            for set in [&pair.a, &pair.b] {
                if let Some(label) = set.max().filter(|&l| l >= n) {
                    return Err(SystemError::LabelOutOfRange { pair: k, label, n });
                }
            }
            if let Some(element) = pair.a.intersection(&pair.b).min() {
                return Err(SystemError::PairNotDisjoint { pair: k, element });
            }
        }
        Ok(Self { pairs, n })
    }

    /// Smallest ground set that holds every label in use.
    pub fn from_pairs(pairs: Vec<SetPair>) -> Result<Self, SystemError> {
        let n = pairs
            .iter()
            .flat_map(|p| [p.a.max(), p.b.max()])
            .flatten()
            .max()
            .map_or(0, |l| l + 1);
        Self::new(n, pairs)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            pairs: Vec::new(),
            n,
        }
    }

    pub fn pairs(&self) -> &[SetPair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<SetPair> {
        self.pairs
    }

    /// Number of pairs.
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    /// Ground-set size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The system made of the first `k` pairs.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            pairs: self.pairs[..k.min(self.m())].to_vec(),
            n: self.n,
        }
    }

    pub fn union_a(&self) -> ElementSet {
        self.pairs.iter().fold(ElementSet::new(), |mut acc, p| {
            acc.union_with(&p.a);
            acc
        })
    }

    pub fn union_b(&self) -> ElementSet {
        self.pairs.iter().fold(ElementSet::new(), |mut acc, p| {
            acc.union_with(&p.b);
            acc
        })
    }

    /// Every label used by some pair.
    pub fn ground(&self) -> ElementSet {
        self.union_a().union(&self.union_b())
    }

    pub fn max_a_size(&self) -> usize {
        self.pairs.iter().map(|p| p.a.len()).max().unwrap_or(0)
    }

    pub fn max_b_size(&self) -> usize {
        self.pairs.iter().map(|p| p.b.len()).max().unwrap_or(0)
    }

    /// For each `j`, the indices `i` with `A_i ∩ B_j ≠ ∅`.
    ///
    /// Built from an element-to-pairs index, so the cost follows the number
    /// of incidences rather than `m²` set intersections.
    fn meeting_a_sets(&self) -> impl Iterator<Item = ElementSet> + '_ {
        let mut holders: Vec<ElementSet> = vec![ElementSet::new(); self.n];
        for (i, p) in self.pairs.iter().enumerate() {
            for e in &p.a {
                holders[e].insert(i);
            }
        }
        self.pairs.iter().map(move |q| {
            q.b.iter().fold(ElementSet::new(), |mut acc, e| {
                acc.union_with(&holders[e]);
                acc
            })
        })
    }

    /// First `(i, j)` with `i < j` and `A_i ∩ B_j = ∅`, scanning `j` then `i`.
    pub fn first_skew_violation(&self) -> Option<(usize, usize)> {
        self.meeting_a_sets()
            .enumerate()
            .find_map(|(j, hits)| hits.missing_below(j).next().map(|i| (i, j)))
    }

    /// `A_i ∩ B_j ≠ ∅` for all `i < j`.
    pub fn is_skew_bollobas(&self) -> bool {
        self.first_skew_violation().is_none()
    }

    /// `A_i ∩ B_j ≠ ∅` for all `i ≠ j`.
    pub fn is_bollobas(&self) -> bool {
        let m = self.m();
        self.meeting_a_sets()
            .enumerate()
            .all(|(j, hits)| hits.missing_below(m).all(|i| i == j))
    }

    pub fn check_caps(&self, a: usize, b: usize) -> Result<(), SystemError> {
        for (k, p) in self.pairs.iter().enumerate() {
            for (side, set, cap) in [(Side::A, &p.a, a), (Side::B, &p.b, b)] {
                if set.len() > cap {
                    return Err(SystemError::SizeCapExceeded {
                        pair: k,
                        side,
                        size: set.len(),
                        cap,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_exact_sizes(&self, a: usize, b: usize) -> Result<(), SystemError> {
        for (k, p) in self.pairs.iter().enumerate() {
            for (side, set, expected) in [(Side::A, &p.a, a), (Side::B, &p.b, b)] {
                if set.len() != expected {
                    return Err(SystemError::SizeNotExact {
                        pair: k,
                        side,
                        size: set.len(),
                        expected,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn report(&self) -> SystemReport {
        let m = self.m();
        let mut violations: Vec<(usize, usize)> = self
            .meeting_a_sets()
            .enumerate()
            .flat_map(|(j, hits)| {
                hits.missing_below(m)
                    .filter(move |&i| i != j)
                    .map(move |i| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect();
        violations.sort_unstable();
        let (union_a, union_b) = (self.union_a(), self.union_b());
        SystemReport {
            is_skew: violations.iter().all(|(i, j)| i > j),
            is_symmetric_bollobas: violations.is_empty(),
            m: self.m(),
            union_a_size: union_a.len(),
            union_b_size: union_b.len(),
            ground_size: union_a.union(&union_b).len(),
            max_a_size: self.max_a_size(),
            max_b_size: self.max_b_size(),
            violations,
        }
    }

    /// Reverses the pair order and swaps A with B in every pair.
    pub fn dual(&self) -> Self {
        Self {
            pairs: self
                .pairs
                .iter()
                .rev()
                .map(|p| SetPair {
                    a: p.b.clone(),
                    b: p.a.clone(),
                })
                .collect(),
            n: self.n,
        }
    }

    /// Grows every A-set to exactly `a` elements and every B-set to exactly
    /// `b`, using fresh labels `n, n+1, ...` handed out pair by pair, A before B.
    pub fn pad(&self, a: usize, b: usize) -> Result<Self, SystemError> {
        self.check_caps(a, b)?;
        if let Some((i, j)) = self.first_skew_violation() {
            return Err(SystemError::NotSkew { i, j });
        }
        let mut next = self.n;
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                let mut padded = p.clone();
                for (set, target) in [(&mut padded.a, a), (&mut padded.b, b)] {
                    while set.len() < target {
                        set.insert(next);
                        next += 1;
                    }
                }
                padded
            })
            .collect();
        Ok(Self { pairs, n: next })
    }

    /// Relabels elements to `0..k` in order of first use (pairs in order, A
    /// before B, ascending within a set) and shrinks `n` to `k`.
    pub fn normalize(&self) -> Self {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut pairs = Vec::with_capacity(self.m());
        for p in &self.pairs {
            let mut map_set = |set: &ElementSet| {
                set.map(|l| {
                    let next = relabel.len();
                    *relabel.entry(l).or_insert(next)
                })
            };
            let a = map_set(&p.a);
            let b = map_set(&p.b);
            pairs.push(SetPair { a, b });
        }
        Self {
            pairs,
            n: relabel.len(),
        }
    }

    /// Pairs of `first` followed by pairs of `second`, with `second`'s labels
    /// shifted by `first.n()` so the two ground sets are disjoint.
    pub fn disjoint_union(first: &Self, second: &Self) -> Self {
        let shift = first.n;
        let mut pairs = first.pairs.clone();
        pairs.extend(second.pairs.iter().map(|p| SetPair {
            a: p.a.map(|l| l + shift),
            b: p.b.map(|l| l + shift),
        }));
        Self {
            pairs,
            n: first.n + second.n,
        }
    }
}
