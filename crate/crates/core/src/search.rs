//! Exact branch-and-bound search over ordered set-pair systems on a small
//! ground set.
//!
//! Systems are built one pair at a time. A new pair only has to be checked
//! against the pairs before it: in skew mode its B-set must meet every
//! earlier A-set, in symmetric mode its A-set must also meet every earlier
//! B-set. Sets are single-word bit masks, so the ground set is limited to
//! 64 labels.
//!
//! With symmetry breaking on, a new pair may only introduce labels in
//! first-use order (fresh A labels first, then fresh B labels), so exactly
//! the normalized systems are generated, each once.

use crate::bounds::binomial_checked;
use crate::set::ElementSet;
use crate::system::{SetPair, SetPairSystem};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use thiserror::Error;

/// Largest ground set the search accepts.
pub const MAX_GROUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `A_i ∩ B_j ≠ ∅` for `i < j`.
    Skew,
    /// `A_i ∩ B_j ≠ ∅` for `i ≠ j`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    UnionA,
    UnionB,
    Ground,
    Pairs,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Skew => "skew",
            Mode::Symmetric => "symmetric",
        }
    }
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::Pairs,
        Objective::UnionA,
        Objective::UnionB,
        Objective::Ground,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::UnionA => "union-a",
            Objective::UnionB => "union-b",
            Objective::Ground => "ground",
            Objective::Pairs => "pairs",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} `{value}`")]
pub struct UnknownName {
    what: &'static str,
    value: String,
}

impl FromStr for Mode {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skew" => Ok(Mode::Skew),
            "symmetric" => Ok(Mode::Symmetric),
            _ => Err(UnknownName {
                what: "mode",
                value: s.to_owned(),
            }),
        }
    }
}

impl FromStr for Objective {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "union-a" => Ok(Objective::UnionA),
            "union-b" => Ok(Objective::UnionB),
            "ground" => Ok(Objective::Ground),
            "pairs" => Ok(Objective::Pairs),
            _ => Err(UnknownName {
                what: "objective",
                value: s.to_owned(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProblem {
    pub a: usize,
    pub b: usize,
    pub n: usize,
    pub mode: Mode,
    pub objective: Objective,
    pub node_limit: Option<u64>,
}

impl SearchProblem {
    pub fn new(a: usize, b: usize, n: usize, mode: Mode, objective: Objective) -> Self {
        Self {
            a,
            b,
            n,
            mode,
            objective,
            node_limit: None,
        }
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }
}

/// Search switches. The defaults are what every public entry point uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Only generate normalized systems.
    pub symmetry_breaking: bool,
    /// Cap the number of pairs at `C(a+b, a)`.
    pub depth_bound: bool,
    /// Worker threads for the first-level split.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            symmetry_breaking: true,
            depth_bound: true,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub optimum: usize,
    /// Normalized system attaining `optimum`.
    pub witness: SetPairSystem,
    pub nodes_explored: u64,
    /// False iff the node limit stopped the search early.
    pub proven_optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    pub visited: u64,
    /// False iff the node limit stopped the enumeration early.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("ground set of size {n} exceeds the search limit of {MAX_GROUND}")]
    GroundTooLarge { n: usize },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    a: u64,
    b: u64,
}

/// Candidate pairs, sorted lexicographically by (A, B) as ascending label lists.
struct CandidateTable {
    /// Indexed by the number of labels already in use; a single entry
    /// when symmetry breaking is off.
    by_used: Vec<Vec<Candidate>>,
    symmetry_breaking: bool,
}

impl CandidateTable {
    fn new(a: usize, b: usize, n: usize, symmetry_breaking: bool) -> Self {
        let by_used = if symmetry_breaking {
            (0..=n).map(|k| normalized_candidates(a, b, n, k)).collect()
        } else {
            vec![all_candidates(a, b, n)]
        };
        Self {
            by_used,
            symmetry_breaking,
        }
    }

    fn get(&self, used: u64) -> &[Candidate] {
        if self.symmetry_breaking {
            &self.by_used[used.count_ones() as usize]
        } else {
            &self.by_used[0]
        }
    }
}

fn mask_of(labels: impl IntoIterator<Item = usize>) -> u64 {
    labels.into_iter().fold(0, |m, l| m | (1 << l))
}

fn labels_of(mask: u64) -> Vec<usize> {
    ElementSet::from_mask(mask).iter().collect()
}

/// All subsets of `universe` with at most `max` members.
fn subsets(universe: &[usize], max: usize) -> Vec<u64> {
    fn go(universe: &[usize], max: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        out.push(acc);
        if max == 0 {
            return;
        }
        for k in start..universe.len() {
            go(universe, max - 1, k + 1, acc | (1 << universe[k]), out);
        }
    }
    let mut out = Vec::new();
    go(universe, max, 0, 0, &mut out);
    out
}

fn sort_candidates(cands: &mut [Candidate]) {
    cands.sort_by_cached_key(|c| (labels_of(c.a), labels_of(c.b)));
}

/// Pairs that extend a normalized system using labels `0..used`.
fn normalized_candidates(a: usize, b: usize, n: usize, used: usize) -> Vec<Candidate> {
    let old: Vec<usize> = (0..used).collect();
    let mut out = Vec::new();
    for old_a in subsets(&old, a) {
        let taken_a = old_a.count_ones() as usize;
        for fresh_a in 0..=(a - taken_a).min(n - used) {
            let amask = old_a | mask_of(used..used + fresh_a);
            let after_a = used + fresh_a;
            let b_universe: Vec<usize> = (0..after_a).filter(|&l| amask & (1 << l) == 0).collect();
            for old_b in subsets(&b_universe, b) {
                let taken_b = old_b.count_ones() as usize;
                for fresh_b in 0..=(b - taken_b).min(n - after_a) {
                    out.push(Candidate {
                        a: amask,
                        b: old_b | mask_of(after_a..after_a + fresh_b),
                    });
                }
            }
        }
    }
    sort_candidates(&mut out);
    out
}

/// Every pair of disjoint subsets of `0..n` within the caps.
fn all_candidates(a: usize, b: usize, n: usize) -> Vec<Candidate> {
    let ground: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for amask in subsets(&ground, a) {
        let rest: Vec<usize> = (0..n).filter(|&l| amask & (1 << l) == 0).collect();
        for bmask in subsets(&rest, b) {
            out.push(Candidate { a: amask, b: bmask });
        }
    }
    sort_candidates(&mut out);
    out
}

/// Partial system on the DFS stack.
#[derive(Clone, Default)]
struct Path {
    a_sets: Vec<u64>,
    b_sets: Vec<u64>,
    union_a: u64,
    union_b: u64,
}

impl Path {
    fn used(&self) -> u64 {
        self.union_a | self.union_b
    }

    fn depth(&self) -> usize {
        self.a_sets.len()
    }

    fn accepts(&self, c: Candidate, mode: Mode) -> bool {
        self.a_sets.iter().all(|&pa| pa & c.b != 0)
            && (mode == Mode::Skew || self.b_sets.iter().all(|&pb| pb & c.a != 0))
    }

    fn push(&mut self, c: Candidate) -> (u64, u64) {
        let saved = (self.union_a, self.union_b);
        self.a_sets.push(c.a);
        self.b_sets.push(c.b);
        self.union_a |= c.a;
        self.union_b |= c.b;
        saved
    }

    fn pop(&mut self, saved: (u64, u64)) {
        self.a_sets.pop();
        self.b_sets.pop();
        (self.union_a, self.union_b) = saved;
    }

    fn value(&self, objective: Objective) -> usize {
        match objective {
            Objective::UnionA => self.union_a.count_ones() as usize,
            Objective::UnionB => self.union_b.count_ones() as usize,
            Objective::Ground => self.used().count_ones() as usize,
            Objective::Pairs => self.depth(),
        }
    }

    fn to_system(&self, n: usize) -> SetPairSystem {
        let pairs = self
            .a_sets
            .iter()
            .zip(&self.b_sets)
            .map(|(&a, &b)| SetPair {
                a: ElementSet::from_mask(a),
                b: ElementSet::from_mask(b),
            })
            .collect();
        SetPairSystem::new(n, pairs).expect("search only builds well-formed systems")
    }
}

/// State shared by all workers.
struct Shared<'p> {
    problem: &'p SearchProblem,
    table: CandidateTable,
    max_depth: Option<usize>,
    nodes: AtomicU64,
    aborted: AtomicBool,
    /// Best value found anywhere; only ever raised.
    best: AtomicUsize,
}

impl<'p> Shared<'p> {
    fn new(problem: &'p SearchProblem, options: &SearchOptions) -> Result<Self, SearchError> {
        if problem.n > MAX_GROUND {
            return Err(SearchError::GroundTooLarge { n: problem.n });
        }
        let max_depth = options.depth_bound.then(|| {
            binomial_checked::<u64>((problem.a + problem.b) as u64, problem.a as u64)
                .and_then(|m| usize::try_from(m).ok())
                .unwrap_or(usize::MAX)
        });
        Ok(Self {
            problem,
            table: CandidateTable::new(problem.a, problem.b, problem.n, options.symmetry_breaking),
            max_depth,
            nodes: AtomicU64::new(0),
            aborted: AtomicBool::new(false),
            best: AtomicUsize::new(0),
        })
    }

    /// Counts one node; false once the node limit has been reached.
    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        let seen = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.problem.node_limit.is_some_and(|limit| seen > limit) {
            self.nodes.fetch_sub(1, Ordering::Relaxed);
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn room(&self, path: &Path) -> bool {
        self.max_depth.is_none_or(|d| path.depth() < d)
    }

    /// Admissible bound on the objective over all extensions of `path`.
    fn upper_bound(&self, path: &Path) -> usize {
        let p = self.problem;
        let remaining = self.max_depth.map(|d| d.saturating_sub(path.depth()));
        let grow = |current: usize, per_pair: usize| match remaining {
            Some(r) => current.saturating_add(r.saturating_mul(per_pair)).min(p.n),
            None if per_pair == 0 => current,
            None => p.n,
        };
        match p.objective {
            Objective::UnionA => grow(path.value(Objective::UnionA), p.a),
            Objective::UnionB => grow(path.value(Objective::UnionB), p.b),
            Objective::Ground => grow(path.value(Objective::Ground), p.a + p.b),
            Objective::Pairs => remaining.map_or(usize::MAX, |r| path.depth() + r),
        }
    }
}

/// Best system found in one subtree.
struct Incumbent {
    value: usize,
    path: Option<Path>,
}

fn optimize(shared: &Shared<'_>, path: &mut Path, best: &mut Incumbent) {
    if !shared.tick() {
        return;
    }
    let value = path.value(shared.problem.objective);
    if value > best.value {
        best.value = value;
        best.path = Some(path.clone());
        shared.best.fetch_max(value, Ordering::Relaxed);
    }
    if !shared.room(path) {
        return;
    }
    let bound = shared.upper_bound(path);
    // Other workers' results only prune strictly, so the first optimum in
    // DFS order is found no matter how subtrees are scheduled.
    if bound <= best.value || bound < shared.best.load(Ordering::Relaxed) {
        return;
    }
    for &c in shared.table.get(path.used()) {
        if path.accepts(c, shared.problem.mode) {
            let saved = path.push(c);
            optimize(shared, path, best);
            path.pop(saved);
            if shared.aborted.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

/// Maximizes the objective with default options.
pub fn max_objective(problem: &SearchProblem) -> Result<SearchResult, SearchError> {
    max_objective_with(problem, &SearchOptions::default())
}

pub fn max_objective_with(
    problem: &SearchProblem,
    options: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    let shared = Shared::new(problem, options)?;
    let root = Path::default();
    let mut root_best = Incumbent {
        value: 0,
        path: Some(root.clone()),
    };
    shared.tick();

    let first: Vec<Candidate> = if shared.room(&root) {
        shared.table.get(0).to_vec()
    } else {
        Vec::new()
    };
    let explore = |c: &Candidate| {
        let mut path = Path::default();
        let mut best = Incumbent {
            value: 0,
            path: None,
        };
        path.push(*c);
        optimize(&shared, &mut path, &mut best);
        best
    };
    let subtrees: Vec<Incumbent> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| SearchError::Pool(e.to_string()))?;
        pool.install(|| first.par_iter().map(explore).collect())
    } else {
        first.iter().map(explore).collect()
    };

    for sub in subtrees {
        if sub.value > root_best.value {
            root_best = sub;
        }
    }
    let path = root_best.path.expect("root is always a candidate");
    let witness = path.to_system(problem.n).normalize();
    Ok(SearchResult {
        optimum: root_best.value,
        witness,
        nodes_explored: shared.nodes.load(Ordering::Relaxed),
        proven_optimal: !shared.aborted.load(Ordering::Relaxed),
    })
}

/// Calls `visitor` on every system (normalized, when symmetry breaking is
/// on) satisfying the mode's predicate and the caps, in DFS order.
pub fn enumerate_systems(
    problem: &SearchProblem,
    visitor: impl FnMut(&SetPairSystem),
) -> Result<Enumeration, SearchError> {
    enumerate_systems_with(problem, &SearchOptions::default(), visitor)
}

pub fn enumerate_systems_with(
    problem: &SearchProblem,
    options: &SearchOptions,
    mut visitor: impl FnMut(&SetPairSystem),
) -> Result<Enumeration, SearchError> {
    let shared = Shared::new(problem, options)?;
    let symmetry_breaking = options.symmetry_breaking;
    let mut visit = |path: &Path| {
        let n = if symmetry_breaking {
            path.used().count_ones() as usize
        } else {
            problem.n
        };
        visitor(&path.to_system(n));
    };
    let mut path = Path::default();
    walk(&shared, &mut path, &mut visit);
    Ok(Enumeration {
        visited: shared.nodes.load(Ordering::Relaxed),
        complete: !shared.aborted.load(Ordering::Relaxed),
    })
}

fn walk(shared: &Shared<'_>, path: &mut Path, visit: &mut impl FnMut(&Path)) {
    if !shared.tick() {
        return;
    }
    visit(path);
    if !shared.room(path) {
        return;
    }
    for &c in shared.table.get(path.used()) {
        if path.accepts(c, shared.problem.mode) {
            let saved = path.push(c);
            walk(shared, path, visit);
            path.pop(saved);
            if shared.aborted.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}
