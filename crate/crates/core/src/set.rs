//! Bit-mask sets of element labels.
//!
//! A set over the dense labels `0..n` is stored as a little-endian array of
//! 64-bit words. Sets over at most 64 labels fit in a single inline word.
//! Trailing zero words are always trimmed, so structural equality is set
//! equality.

use smallvec::SmallVec;
use std::fmt;

const WORD_BITS: usize = 64;

/// A finite set of element labels.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: SmallVec<[u64; 1]>,
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The set whose members are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut set = Self::new();
        if mask != 0 {
            set.words.push(mask);
        }
        set
    }

    /// `{start, start + 1, ..., end - 1}`.
    pub fn range(start: usize, end: usize) -> Self {
        (start..end).collect()
    }

    /// The low word, if every member is below 64.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn insert(&mut self, label: usize) -> bool {
        let (w, bit) = (label / WORD_BITS, label % WORD_BITS);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << bit) == 0;
        self.words[w] |= 1 << bit;
        fresh
    }

    pub fn remove(&mut self, label: usize) -> bool {
        let (w, bit) = (label / WORD_BITS, label % WORD_BITS);
        if w >= self.words.len() {
            return false;
        }
        let present = self.words[w] & (1 << bit) != 0;
        self.words[w] &= !(1 << bit);
        self.trim();
        present
    }

    pub fn contains(&self, label: usize) -> bool {
        let (w, bit) = (label / WORD_BITS, label % WORD_BITS);
        self.words.get(w).is_some_and(|word| word & (1 << bit) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member.
    pub fn max(&self) -> Option<usize> {
        let last = self.words.len().checked_sub(1)?;
        let word = self.words[last];
        Some(last * WORD_BITS + (WORD_BITS - 1 - word.leading_zeros() as usize))
    }

    /// Smallest member.
    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(x, y)| x & y != 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.intersects(other)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.len() <= other.words.len()
            && self
                .words
                .iter()
                .zip(other.words.iter())
                .all(|(x, y)| x & !y == 0)
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (x, y) in self.words.iter_mut().zip(other.words.iter()) {
            *x |= y;
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Self {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(x, y)| x & y)
                .collect(),
        };
        out.trim();
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, y) in out.words.iter_mut().zip(other.words.iter()) {
            *x &= !y;
        }
        out.trim();
        out
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Labels in `0..limit` that are not members, ascending.
    pub fn missing_below(&self, limit: usize) -> impl Iterator<Item = usize> + '_ {
        (0..limit.div_ceil(WORD_BITS)).flat_map(move |w| {
            let mut gaps = !self.words.get(w).copied().unwrap_or(0);
            let base = w * WORD_BITS;
            if limit - base < WORD_BITS {
                gaps &= (1u64 << (limit - base)) - 1;
            }
            std::iter::from_fn(move || {
                (gaps != 0).then(|| {
                    let bit = gaps.trailing_zeros() as usize;
                    gaps &= gaps - 1;
                    base + bit
                })
            })
        })
    }

    /// Applies `f` to every member.
    pub fn map(&self, mut f: impl FnMut(usize) -> usize) -> Self {
        self.iter().map(&mut f).collect()
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD_BITS + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = Self::new();
        for label in iter {
            set.insert(label);
        }
        set
    }
}

impl<const N: usize> From<[usize; N]> for ElementSet {
    fn from(labels: [usize; N]) -> Self {
        labels.into_iter().collect()
    }
}

/// Canonical text form: `{0,3,7}`, ascending, no spaces.
impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, label) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{label}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
