//! Level-by-level peeling of an exact-size skew system, and an independent
//! checker for the resulting certificate.
//!
//! Level `j` keeps an inclusion-minimal index set `M_j ⊆ M_{j−1}` whose
//! current A-sets still cover the same union, deletes one private element
//! `x_i^(j)` from each kept A-set, and repairs B-sets so the kept pairs stay
//! skew. Every kept index loses a distinct element at every level, so the
//! level sizes add up to `|∪ A_i|`, and each level is a skew system with caps
//! `(a − j + 1, b)`.

use crate::bounds::{bound_table, level_bound};
use crate::set::ElementSet;
use crate::system::{SetPairSystem, SystemError};
use num_bigint::BigUint;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

/// One B-set adjustment: in `B_v`, `old` was replaced by `new`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Repair {
    pub v: usize,
    pub old: usize,
    pub new: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelLevel {
    /// 1-based level number.
    pub j: usize,
    /// `M_j`, ascending, as 0-based original pair indices.
    pub m_set: Vec<usize>,
    /// The private element deleted from each kept A-set.
    pub removed: BTreeMap<usize, usize>,
    /// B-sets of the level-`j` subsystem, after repairs.
    pub b_family: BTreeMap<usize, ElementSet>,
    /// Repairs applied while forming this level, in order.
    pub repairs: Vec<Repair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelCertificate {
    pub input: SetPairSystem,
    pub a: usize,
    pub b: usize,
    pub levels: Vec<PeelLevel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeelError {
    #[error("input is not exact-size (pad it first): {0}")]
    NotExact(SystemError),
    #[error("input is not skew: A_{} and B_{} are disjoint", .i + 1, .j + 1)]
    NotSkew { i: usize, j: usize },
    #[error("level {level}: B-repair did not settle within {cap} replacements")]
    RepairCapExceeded {
        level: usize,
        cap: usize,
        partial: Box<PeelCertificate>,
    },
    #[error("level {level}: {detail}")]
    Stuck { level: usize, detail: String },
}

/// Inclusion-minimal `M ⊆ indices` with the same union of sets.
///
/// Indices are examined from largest to smallest, and one is dropped when
/// every element of its set is still held by another kept index. Each kept
/// index ends up owning a private element. The result is ascending.
pub fn minimal_union_subset<'s>(
    indices: &[usize],
    set_of: impl Fn(usize) -> &'s ElementSet,
) -> Vec<usize> {
    let mut holders: HashMap<usize, usize> = HashMap::new();
    for &i in indices {
        for e in set_of(i) {
            *holders.entry(e).or_default() += 1;
        }
    }
    let mut kept: Vec<usize> = indices.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let mut dropped = vec![false; kept.len()];
    for (pos, &i) in kept.iter().enumerate().rev() {
        let set = set_of(i);
        if set.iter().all(|e| holders[&e] >= 2) {
            for e in set {
                *holders.get_mut(&e).expect("counted above") -= 1;
            }
            dropped[pos] = true;
        }
    }
    kept.into_iter()
        .zip(dropped)
        .filter_map(|(i, d)| (!d).then_some(i))
        .collect()
}

/// Smallest element of `set_of(i)` held by no other index in `kept`.
fn private_element<'s>(
    i: usize,
    kept: &[usize],
    set_of: &impl Fn(usize) -> &'s ElementSet,
) -> Option<usize> {
    set_of(i)
        .iter()
        .find(|&e| kept.iter().all(|&l| l == i || !set_of(l).contains(e)))
}

/// Peels an exact-size skew system (`|A_i| = a`, `|B_i| = b`).
pub fn peel(system: &SetPairSystem, a: usize, b: usize) -> Result<PeelCertificate, PeelError> {
    system
        .check_exact_sizes(a, b)
        .map_err(PeelError::NotExact)?;
    if let Some((i, j)) = system.first_skew_violation() {
        return Err(PeelError::NotSkew { i, j });
    }

    let mut cert = PeelCertificate {
        input: system.clone(),
        a,
        b,
        levels: Vec::with_capacity(a),
    };
    let mut cur_a: Vec<ElementSet> = system.pairs().iter().map(|p| p.a.clone()).collect();
    let mut cur_b: Vec<ElementSet> = system.pairs().iter().map(|p| p.b.clone()).collect();
    let mut prev_m: Vec<usize> = (0..system.m()).collect();
    let mut prev_removed: BTreeMap<usize, usize> = BTreeMap::new();

    for j in 1..=a {
        let m_set = minimal_union_subset(&prev_m, |i| &cur_a[i]);
        let mut removed = BTreeMap::new();
        for &i in &m_set {
            let x = private_element(i, &m_set, &|l| &cur_a[l]).ok_or_else(|| PeelError::Stuck {
                level: j,
                detail: format!("kept pair {} has no private element", i + 1),
            })?;
            removed.insert(i, x);
        }

        let mut repairs = Vec::new();
        if j > 1 {
            let cap = m_set.len() * m_set.len() * b;
            while let Some((u, v)) = first_violation(&m_set, &cur_a, &cur_b) {
                if repairs.len() >= cap {
                    cert.levels.push(PeelLevel {
                        j,
                        b_family: m_set.iter().map(|&i| (i, cur_b[i].clone())).collect(),
                        m_set,
                        removed,
                        repairs,
                    });
                    return Err(PeelError::RepairCapExceeded {
                        level: j,
                        cap,
                        partial: Box::new(cert),
                    });
                }
                let old = prev_removed[&u];
                if !cur_b[v].remove(old) {
                    return Err(PeelError::Stuck {
                        level: j,
                        detail: format!(
                            "A_{} misses B_{} but B_{} lacks the element {old} removed from A_{}",
                            u + 1,
                            v + 1,
                            v + 1,
                            u + 1
                        ),
                    });
                }
                let new = removed[&u];
                cur_b[v].insert(new);
                repairs.push(Repair { v, old, new });
            }
        }

        for (&i, &x) in &removed {
            cur_a[i].remove(x);
        }
        cert.levels.push(PeelLevel {
            j,
            b_family: m_set.iter().map(|&i| (i, cur_b[i].clone())).collect(),
            m_set: m_set.clone(),
            removed: removed.clone(),
            repairs,
        });
        prev_m = m_set;
        prev_removed = removed;
    }
    Ok(cert)
}

/// First `(u, v)`, `u < v` in `kept`, lexicographically, with `A_u ∩ B_v = ∅`.
fn first_violation(
    kept: &[usize],
    a_sets: &[ElementSet],
    b_sets: &[ElementSet],
) -> Option<(usize, usize)> {
    kept.iter().enumerate().find_map(|(pos, &u)| {
        kept[pos + 1..]
            .iter()
            .find(|&&v| a_sets[u].is_disjoint(&b_sets[v]))
            .map(|&v| (u, v))
    })
}

/// The invariants [`verify_certificate`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    InputSizes,
    InputSkew,
    LevelCount,
    Nesting,
    UnionPreserved,
    PrivateElement,
    DistinctRemovals,
    RepairTrail,
    BFamily,
    LevelSkew,
    LevelBound,
    SumIdentity,
    BoundSum,
}

impl CheckKind {
    pub const ALL: [CheckKind; 13] = [
        CheckKind::InputSizes,
        CheckKind::InputSkew,
        CheckKind::LevelCount,
        CheckKind::Nesting,
        CheckKind::UnionPreserved,
        CheckKind::PrivateElement,
        CheckKind::DistinctRemovals,
        CheckKind::RepairTrail,
        CheckKind::BFamily,
        CheckKind::LevelSkew,
        CheckKind::LevelBound,
        CheckKind::SumIdentity,
        CheckKind::BoundSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::InputSizes => "input-sizes",
            CheckKind::InputSkew => "input-skew",
            CheckKind::LevelCount => "level-count",
            CheckKind::Nesting => "nesting",
            CheckKind::UnionPreserved => "union-preserved",
            CheckKind::PrivateElement => "private-element",
            CheckKind::DistinctRemovals => "distinct-removals",
            CheckKind::RepairTrail => "repair-trail",
            CheckKind::BFamily => "b-family",
            CheckKind::LevelSkew => "level-skew",
            CheckKind::LevelBound => "level-bound",
            CheckKind::SumIdentity => "sum-identity",
            CheckKind::BoundSum => "bound-sum",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertFailure {
    pub check: CheckKind,
    pub level: Option<usize>,
    pub detail: String,
}

impl fmt::Display for CertFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(j) => write!(f, "{} (level {j}): {}", self.check, self.detail),
            None => write!(f, "{}: {}", self.check, self.detail),
        }
    }
}

/// Outcome of [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub failures: Vec<CertFailure>,
    /// `|M_j|` for each level present.
    pub level_sizes: Vec<usize>,
    pub union_a_size: usize,
}

impl CertificateReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn passed(&self, check: CheckKind) -> bool {
        self.failures.iter().all(|f| f.check != check)
    }
}

/// Re-derives every level from the input and the recorded removals and
/// checks the peeling invariants. Nothing from [`peel`] is reused.
pub fn verify_certificate(cert: &PeelCertificate) -> CertificateReport {
    let mut failures = Vec::new();
    let mut fail = |check, level, detail: String| {
        failures.push(CertFailure {
            check,
            level,
            detail,
        })
    };
    let (a, b) = (cert.a, cert.b);
    let input = &cert.input;
    let m = input.m();

    if let Err(e) = input.check_exact_sizes(a, b) {
        fail(CheckKind::InputSizes, None, e.to_string());
    }
    for v in 0..m {
        for u in 0..v {
            if input.pairs()[u].a.is_disjoint(&input.pairs()[v].b) {
                fail(
                    CheckKind::InputSkew,
                    None,
                    format!("A_{} and B_{} are disjoint", u + 1, v + 1),
                );
            }
        }
    }
    if cert.levels.len() != a {
        fail(
            CheckKind::LevelCount,
            None,
            format!("expected {a} levels, found {}", cert.levels.len()),
        );
    }

    // a_sets[i] is A_i^(j−1) while level j is checked.
    let mut a_sets: Vec<ElementSet> = input.pairs().iter().map(|p| p.a.clone()).collect();
    let mut prev_b: BTreeMap<usize, ElementSet> = input
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.b.clone()))
        .collect();
    let mut prev_set: Vec<usize> = (0..m).collect();
    let mut prev_removed: BTreeMap<usize, usize> = BTreeMap::new();
    let mut level_sizes = Vec::new();

    for (pos, level) in cert.levels.iter().enumerate() {
        let j = pos + 1;
        let at = Some(j);
        if level.j != j {
            fail(
                CheckKind::LevelCount,
                at,
                format!("level numbered {} in position {j}", level.j),
            );
        }
        level_sizes.push(level.m_set.len());

        // M_j ⊆ M_{j−1}, strictly ascending
        if level.m_set.windows(2).any(|w| w[0] >= w[1]) {
            fail(
                CheckKind::Nesting,
                at,
                "index set is not strictly ascending".into(),
            );
        }
        for &i in &level.m_set {
            if prev_set.binary_search(&i).is_err() {
                fail(
                    CheckKind::Nesting,
                    at,
                    format!("pair {} is not in M_{}", i + 1, j - 1),
                );
            }
        }
        let members: Vec<usize> = level
            .m_set
            .iter()
            .copied()
            .filter(|&i| i < m && prev_set.binary_search(&i).is_ok())
            .collect();

        let union_of = |idx: &[usize]| {
            idx.iter().fold(ElementSet::new(), |mut acc, &i| {
                acc.union_with(&a_sets[i]);
                acc
            })
        };
        if union_of(&members) != union_of(&prev_set) {
            fail(
                CheckKind::UnionPreserved,
                at,
                format!("kept A-sets do not cover the union of level {}", j - 1),
            );
        }

        if level
            .removed
            .keys()
            .copied()
            .ne(level.m_set.iter().copied())
        {
            fail(
                CheckKind::PrivateElement,
                at,
                "removed elements are not indexed by M_j".into(),
            );
        }
        for (&i, &x) in &level.removed {
            if i >= m || !a_sets[i].contains(x) {
                fail(
                    CheckKind::PrivateElement,
                    at,
                    format!("element {x} is not in A_{}", i + 1),
                );
                continue;
            }
            if let Some(&l) = members.iter().find(|&&l| l != i && a_sets[l].contains(x)) {
                fail(
                    CheckKind::PrivateElement,
                    at,
                    format!(
                        "element {x} removed from A_{} also lies in A_{}",
                        i + 1,
                        l + 1
                    ),
                );
            }
        }
        let mut seen = ElementSet::new();
        for (&i, &x) in &level.removed {
            if !seen.insert(x) {
                fail(
                    CheckKind::DistinctRemovals,
                    at,
                    format!("element {x} removed twice (again at pair {})", i + 1),
                );
            }
        }

        // replay repairs on the previous level's B-sets
        if j == 1 && !level.repairs.is_empty() {
            fail(
                CheckKind::RepairTrail,
                at,
                "level 1 cannot carry repairs".into(),
            );
        }
        let mut replayed: BTreeMap<usize, ElementSet> = members
            .iter()
            .filter_map(|&i| prev_b.get(&i).map(|s| (i, s.clone())))
            .collect();
        for r in &level.repairs {
            let source = prev_removed.iter().find(|&(&u, &old)| {
                old == r.old && u < r.v && level.removed.get(&u) == Some(&r.new)
            });
            if source.is_none() {
                fail(
                    CheckKind::RepairTrail,
                    at,
                    format!(
                        "repair {} : {} -> {} does not swap x_u^({}) for x_u^({j}) of an earlier u",
                        r.v + 1,
                        r.old,
                        r.new,
                        j - 1
                    ),
                );
            }
            match replayed.get_mut(&r.v) {
                Some(set) if set.contains(r.old) && !set.contains(r.new) => {
                    set.remove(r.old);
                    set.insert(r.new);
                }
                _ => fail(
                    CheckKind::RepairTrail,
                    at,
                    format!("repair {} : {} -> {} does not apply", r.v + 1, r.old, r.new),
                ),
            }
        }
        if level
            .b_family
            .keys()
            .copied()
            .ne(level.m_set.iter().copied())
        {
            fail(
                CheckKind::BFamily,
                at,
                "B-family is not indexed by M_j".into(),
            );
        } else if replayed != level.b_family {
            fail(
                CheckKind::RepairTrail,
                at,
                "recorded B-sets differ from the replayed repairs".into(),
            );
        }
        for (&i, bset) in &level.b_family {
            if bset.len() != b {
                fail(
                    CheckKind::BFamily,
                    at,
                    format!("|B_{}| = {}, expected {b}", i + 1, bset.len()),
                );
            }
            if i < m && a_sets[i].intersects(bset) {
                fail(
                    CheckKind::BFamily,
                    at,
                    format!("A_{} and B_{} overlap", i + 1, i + 1),
                );
            }
        }

        for (pos_u, &u) in members.iter().enumerate() {
            for &v in &members[pos_u + 1..] {
                if let Some(bv) = level.b_family.get(&v) {
                    if a_sets[u].is_disjoint(bv) {
                        fail(
                            CheckKind::LevelSkew,
                            at,
                            format!(
                                "violation ({},{},{j}): A_{} misses B_{}",
                                u + 1,
                                v + 1,
                                u + 1,
                                v + 1
                            ),
                        );
                    }
                }
            }
        }

        let cap = level_bound(a as u64, b as u64, j as u64);
        if BigUint::from(level.m_set.len()) > cap {
            fail(
                CheckKind::LevelBound,
                at,
                format!("|M_{j}| = {} exceeds {cap}", level.m_set.len()),
            );
        }

        for (&i, &x) in &level.removed {
            if i < m {
                a_sets[i].remove(x);
            }
        }
        prev_b = level.b_family.clone();
        prev_set = members;
        prev_removed = level.removed.clone();
    }

    let union_a_size = input.union_a().len();
    let total: usize = level_sizes.iter().sum();
    if total != union_a_size {
        fail(
            CheckKind::SumIdentity,
            None,
            format!("sum of |M_j| is {total} but |∪A_i| is {union_a_size}"),
        );
    }
    let table = bound_table(a as u64, b as u64);
    let bound_sum: BigUint = (1..=a as u64)
        .map(|j| level_bound(a as u64, b as u64, j))
        .sum();
    if bound_sum != table.s1 {
        fail(
            CheckKind::BoundSum,
            None,
            format!(
                "sum of level bounds is {bound_sum} but C(a+b+1, a) - 1 is {}",
                table.s1
            ),
        );
    }
    if BigUint::from(union_a_size) > table.s1 {
        fail(
            CheckKind::BoundSum,
            None,
            format!("|∪A_i| = {union_a_size} exceeds {}", table.s1),
        );
    }

    CertificateReport {
        failures,
        level_sizes,
        union_a_size,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::extremal_system;
    use crate::system::SetPair;

    fn sets(entries: &[(usize, &[usize])]) -> BTreeMap<usize, ElementSet> {
        entries
            .iter()
            .map(|(i, s)| (*i, s.iter().copied().collect()))
            .collect()
    }

    #[test]
    fn minimal_subset_tie_break() {
        let s = sets(&[(1, &[0]), (2, &[0])]);
        assert_eq!(minimal_union_subset(&[1, 2], |i| &s[&i]), vec![1]);
    }

    #[test]
    fn minimal_subset_keeps_disjoint_sets() {
        let s = sets(&[(0, &[0]), (1, &[1, 2]), (2, &[5])]);
        assert_eq!(minimal_union_subset(&[0, 1, 2], |i| &s[&i]), vec![0, 1, 2]);
    }

    #[test]
    fn minimal_subset_descending_scan() {
        // 3 is covered by 1, then 2 is covered by 1
        let s = sets(&[(1, &[0, 1]), (2, &[1]), (3, &[0])]);
        assert_eq!(minimal_union_subset(&[1, 2, 3], |i| &s[&i]), vec![1]);
    }

    #[test]
    fn peel_one_one() {
        let cert = peel(&extremal_system(1, 1), 1, 1).unwrap();
        assert_eq!(cert.levels.len(), 1);
        assert_eq!(cert.levels[0].m_set, vec![0, 1]);
        assert!(cert.levels[0].repairs.is_empty());
        let report = verify_certificate(&cert);
        assert!(report.is_valid(), "{:?}", report.failures);
        assert_eq!(report.union_a_size, 2);
    }

    #[test]
    fn peel_two_one() {
        let cert = peel(&extremal_system(2, 1), 2, 1).unwrap();
        let sizes: Vec<usize> = cert.levels.iter().map(|l| l.m_set.len()).collect();
        assert_eq!(sizes, vec![3, 2]);
        let report = verify_certificate(&cert);
        assert!(report.is_valid(), "{:?}", report.failures);
        assert_eq!(report.union_a_size, 5);
    }

    #[test]
    fn peel_rejects_bad_input() {
        let s = extremal_system(2, 1);
        assert!(matches!(peel(&s, 2, 2), Err(PeelError::NotExact(_))));
        let bad =
            SetPairSystem::new(4, vec![SetPair::new([0], [1]), SetPair::new([2], [3])]).unwrap();
        assert_eq!(peel(&bad, 1, 1), Err(PeelError::NotSkew { i: 0, j: 1 }));
    }

    #[test]
    fn repair_needed_when_private_element_sits_in_later_b() {
        // A_1 = {0,1}, A_2 = {2,3}; B_2 meets A_1 only in 0, which level 1 deletes.
        let s = SetPairSystem::new(
            6,
            vec![SetPair::new([0, 1], [4]), SetPair::new([2, 3], [0])],
        )
        .unwrap();
        let cert = peel(&s, 2, 1).unwrap();
        assert_eq!(cert.levels[0].removed[&0], 0);
        assert_eq!(
            cert.levels[1].repairs,
            vec![Repair {
                v: 1,
                old: 0,
                new: 1
            }]
        );
        assert_eq!(cert.levels[1].b_family[&1], ElementSet::from([1]));
        assert!(verify_certificate(&cert).is_valid());
    }

    #[test]
    fn nesting_failure_is_reported() {
        let mut cert = peel(&extremal_system(2, 1), 2, 1).unwrap();
        let victim = cert.levels[1].m_set[0];
        cert.levels[0].m_set.retain(|&i| i != victim);
        let report = verify_certificate(&cert);
        assert!(!report.passed(CheckKind::Nesting));
        assert!(report
            .failures
            .iter()
            .any(|f| f.check == CheckKind::Nesting && f.level == Some(2)));
    }

    #[test]
    fn level_skew_failure_names_the_pair() {
        let s = SetPairSystem::new(
            6,
            vec![SetPair::new([0, 1], [4]), SetPair::new([2, 3], [0])],
        )
        .unwrap();
        let mut cert = peel(&s, 2, 1).unwrap();
        cert.levels[1].repairs.clear();
        cert.levels[1].b_family.insert(1, ElementSet::from([0]));
        let report = verify_certificate(&cert);
        assert!(report
            .failures
            .iter()
            .any(|f| f.check == CheckKind::LevelSkew && f.detail.contains("(1,2,2)")));
    }
}
