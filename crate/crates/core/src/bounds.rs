//! Closed-form extremal values for skew systems with caps `|A_i| ≤ a`,
//! `|B_i| ≤ b`, computed with exact binomials.
//!
//! Everything is generic over the integer type. Fixed-width types report
//! overflow instead of wrapping; [`BigUint`] never overflows and is the
//! default.

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, FromPrimitive, One, Zero};
use std::fmt;
use thiserror::Error;

/// Integer types usable for exact counting.
pub trait Count:
    Clone
    + Ord
    + Zero
    + One
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + CheckedDiv
    + FromPrimitive
    + fmt::Display
    + fmt::Debug
{
}

impl<T> Count for T where
    T: Clone
        + Ord
        + Zero
        + One
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + CheckedDiv
        + FromPrimitive
        + fmt::Display
        + fmt::Debug
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("bound table for (a, b) = ({a}, {b}) overflows the chosen integer type")]
    Overflow { a: u64, b: u64 },
}

/// `C(n, k)`, or `None` if an intermediate value overflows `T`. Zero when `k > n`.
pub fn binomial_checked<T: Count>(n: u64, k: u64) -> Option<T> {
    if k > n {
        return Some(T::zero());
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        // acc = C(n, i), and C(n, i) * (n - i) = C(n, i + 1) * (i + 1).
        acc = acc
            .checked_mul(&T::from_u64(n - i)?)?
            .checked_div(&T::from_u64(i + 1)?)?;
    }
    Some(acc)
}

/// Exact `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    binomial_checked(n, k).expect("BigUint arithmetic cannot overflow")
}

/// The extremal values for a given `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTable<T = BigUint> {
    pub a: u64,
    pub b: u64,
    /// Largest possible `|∪ A_i|`: `C(a+b+1, a) − 1`.
    pub s1: T,
    /// Largest possible `|∪ B_i|`: `C(a+b+1, a+1) − 1`.
    pub s2: T,
    /// Largest possible `|∪ (A_i ∪ B_i)|`: `C(a+b+2, a+1) − C(a+b, a) − 1`.
    pub n_skew: T,
    /// Largest possible number of pairs: `C(a+b, a)`.
    pub frankl_kalai_m: T,
}

impl<T: Count> BoundTable<T> {
    pub fn checked(a: u64, b: u64) -> Result<Self, BoundsError> {
        let overflow = BoundsError::Overflow { a, b };
        let c = |n: u64, k: u64| binomial_checked::<T>(n, k).ok_or(overflow.clone());
        let one = T::one();
        let sub = |x: T, y: &T| x.checked_sub(y).ok_or(overflow.clone());

        let s1 = sub(c(a + b + 1, a)?, &one)?;
        let s2 = sub(c(a + b + 1, a + 1)?, &one)?;
        let frankl_kalai_m = c(a + b, a)?;
        let n_skew = sub(sub(c(a + b + 2, a + 1)?, &frankl_kalai_m)?, &one)?;
        Ok(Self {
            a,
            b,
            s1,
            s2,
            n_skew,
            frankl_kalai_m,
        })
    }

    /// `s1 + s2 = n_skew + frankl_kalai_m − 1`, evaluated without subtraction.
    pub fn identity_holds(&self) -> bool {
        let lhs = self
            .s1
            .checked_add(&self.s2)
            .and_then(|x| x.checked_add(&T::one()));
        let rhs = self.n_skew.checked_add(&self.frankl_kalai_m);
        matches!((lhs, rhs), (Some(l), Some(r)) if l == r)
    }
}

impl BoundTable<BigUint> {
    pub fn new(a: u64, b: u64) -> Self {
        Self::checked(a, b).expect("BigUint arithmetic cannot overflow")
    }
}

impl<T: fmt::Display> fmt::Display for BoundTable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s1={} s2={} n_skew={} m_max={}",
            self.s1, self.s2, self.n_skew, self.frankl_kalai_m
        )
    }
}

/// Exact bound table for `(a, b)`.
pub fn bound_table(a: u64, b: u64) -> BoundTable {
    BoundTable::new(a, b)
}

/// Whether `S1 + S2 = n_skew + C(a+b, a) − 1` holds at `(a, b)`.
pub fn identity_check(a: u64, b: u64) -> bool {
    bound_table(a, b).identity_holds()
}

/// Pair-count bound for the level-`j` subsystem of a peeling with caps
/// `(a, b)`: `C(a−j+1+b, a−j+1)`. Zero for `j` outside `1..=a`.
pub fn level_bound(a: u64, b: u64, j: u64) -> BigUint {
    if j == 0 || j > a {
        return BigUint::zero();
    }
    let k = a - j + 1;
    binomial(k + b, k)
}
