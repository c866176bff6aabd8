//! Recursive construction of extremal skew systems.
//!
//! The system for `(a, b)` glues the system for `(a − 1, b)` to the system
//! for `(a, b − 1)` on disjoint ground sets and adds one fresh point `x`: it
//! joins every A-set of the first block and every B-set of the second block.
//! Each cross pair then meets in `x`, so the result stays skew, and the pair
//! count, both partial unions and the ground set all hit their maxima.

use crate::bounds::binomial_checked;
use crate::set::ElementSet;
use crate::system::{SetPair, SetPairSystem};
use std::fmt::{self, Write as _};
use thiserror::Error;

/// Default cap on the number of nodes [`construction_trace`] will print.
pub const DEFAULT_TRACE_NODE_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("recursion tree for ({a}, {b}) has {nodes} nodes, over the limit of {limit}")]
    TooLarge {
        a: u64,
        b: u64,
        nodes: u64,
        limit: u64,
    },
}

/// Extremal skew system for caps `(a, b)`.
///
/// Labels follow the recursion: the `(a − 1, b)` block keeps `0..n₁`, the
/// `(a, b − 1)` block is shifted to `n₁..n₁ + n₂`, and `x = n₁ + n₂`.
pub fn extremal_system(a: usize, b: usize) -> SetPairSystem {
    // Row-by-row table; identical to the plain recursion, each cell built once.
    let mut prev: Vec<SetPairSystem> = Vec::new();
    for i in 0..=a {
        let mut row: Vec<SetPairSystem> = Vec::with_capacity(b + 1);
        for j in 0..=b {
            let cell = if i == 0 {
                single_pair(ElementSet::new(), ElementSet::range(0, j), j)
            } else if j == 0 {
                single_pair(ElementSet::range(0, i), ElementSet::new(), i)
            } else {
                glue(&prev[j], &row[j - 1])
            };
            row.push(cell);
        }
        prev = row;
    }
    prev.pop().expect("row has b + 1 cells")
}

fn single_pair(a: ElementSet, b: ElementSet, n: usize) -> SetPairSystem {
    SetPairSystem::new(n, vec![SetPair { a, b }]).expect("base pair is well formed")
}

fn glue(first: &SetPairSystem, second: &SetPairSystem) -> SetPairSystem {
    let joined = SetPairSystem::disjoint_union(first, second);
    let x = joined.n();
    let split = first.m();
    let pairs = joined
        .into_pairs()
        .into_iter()
        .enumerate()
        .map(|(k, mut p)| {
            if k < split {
                p.a.insert(x);
            } else {
                p.b.insert(x);
            }
            p
        })
        .collect();
    SetPairSystem::new(x + 1, pairs).expect("fresh point keeps pairs disjoint")
}

/// Printable recursion tree of [`extremal_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub text: String,
    pub leaves: u64,
    pub internal: u64,
}

impl fmt::Display for ConstructionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Renders the `(a − 1, b)` / `(a, b − 1)` split at every node, with the
/// fresh point's label local to that node's system.
pub fn construction_trace(
    a: u64,
    b: u64,
    node_limit: u64,
) -> Result<ConstructionTrace, ConstructError> {
    let leaves = binomial_checked::<u64>(a + b, a).unwrap_or(u64::MAX);
    let nodes = leaves.saturating_mul(2).saturating_sub(1);
    if nodes > node_limit {
        return Err(ConstructError::TooLarge {
            a,
            b,
            nodes,
            limit: node_limit,
        });
    }
    let mut trace = ConstructionTrace {
        text: String::new(),
        leaves: 0,
        internal: 0,
    };
    trace_node(a, b, 0, "", &mut trace);
    Ok(trace)
}

/// Ground-set size of the `(a, b)` construction.
fn ground_size(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, b) => b,
        (a, 0) => a,
        _ => ground_size(a - 1, b) + ground_size(a, b - 1) + 1,
    }
}

fn trace_node(a: u64, b: u64, depth: usize, tag: &str, trace: &mut ConstructionTrace) {
    let indent = "  ".repeat(depth);
    if a == 0 || b == 0 {
        trace.leaves += 1;
        let (aset, bset) = if a == 0 {
            (ElementSet::new(), ElementSet::range(0, b as usize))
        } else {
            (ElementSet::range(0, a as usize), ElementSet::new())
        };
        let _ = writeln!(trace.text, "{indent}{tag}({a},{b}) leaf: ({aset}, {bset})");
        return;
    }
    trace.internal += 1;
    let x = ground_size(a - 1, b) + ground_size(a, b - 1);
    let _ = writeln!(trace.text, "{indent}{tag}({a},{b}) fresh point x={x}");
    trace_node(a - 1, b, depth + 1, "A+x ", trace);
    trace_node(a, b - 1, depth + 1, "B+x ", trace);
}
