use num_bigint::BigUint;
use skew_bollobas::bounds::{binomial, bound_table};
use skew_bollobas::construct::{construction_trace, extremal_system};

/// (m, |∪A|, |∪B|, ground) of the construction for every `(a, b)` up to
/// `max`, from its recursion alone.
#[allow(clippy::needless_range_loop)]
fn recurrence_metrics(max: usize) -> Vec<Vec<[u64; 4]>> {
    let mut t = vec![vec![[0u64; 4]; max + 1]; max + 1];
    for a in 0..=max {
        for b in 0..=max {
            t[a][b] = match (a, b) {
                (0, b) => [1, 0, b as u64, b as u64],
                (a, 0) => [1, a as u64, 0, a as u64],
                _ => {
                    let (p, q) = (t[a - 1][b], t[a][b - 1]);
                    // x joins ∪A through the first block and ∪B through the second
                    [
                        p[0] + q[0],
                        p[1] + q[1] + 1,
                        p[2] + q[2] + 1,
                        p[3] + q[3] + 1,
                    ]
                }
            };
        }
    }
    t
}

#[test]
#[allow(clippy::needless_range_loop)]
fn recurrence_solutions_match_closed_forms() {
    let table = recurrence_metrics(30);
    for a in 0..=30 {
        for b in 0..=30 {
            let t = bound_table(a as u64, b as u64);
            let got = table[a][b].map(BigUint::from);
            assert_eq!(got, [t.frankl_kalai_m, t.s1, t.s2, t.n_skew], "({a},{b})");
        }
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn construction_meets_every_bound_up_to_eight() {
    let table = recurrence_metrics(8);
    for a in 0..=8usize {
        for b in 0..=8usize {
            let s = extremal_system(a, b);
            assert!(s.is_skew_bollobas(), "({a},{b})");
            assert!(s.max_a_size() <= a && s.max_b_size() <= b);
            let got = [
                s.m(),
                s.union_a().len(),
                s.union_b().len(),
                s.ground().len(),
            ];
            assert_eq!(got.map(|x| x as u64), table[a][b], "({a},{b})");
            assert_eq!(s.n(), got[3]);
        }
    }
}

#[test]
fn structural_recurrences() {
    for a in 1..=6 {
        for b in 1..=6 {
            let (s, p, q) = (
                extremal_system(a, b),
                extremal_system(a - 1, b),
                extremal_system(a, b - 1),
            );
            assert_eq!(s.m(), p.m() + q.m());
            assert_eq!(s.ground().len(), p.ground().len() + q.ground().len() + 1);
            // the first block is p with x added to A, the second q shifted with x added to B
            let x = s.n() - 1;
            for (k, pair) in s.pairs().iter().enumerate() {
                let (mut a_set, mut b_set) = (pair.a.clone(), pair.b.clone());
                if k < p.m() {
                    assert!(a_set.remove(x));
                    assert_eq!(
                        (a_set, b_set),
                        (p.pairs()[k].a.clone(), p.pairs()[k].b.clone())
                    );
                } else {
                    assert!(b_set.remove(x));
                    let shift = p.n();
                    let orig = &q.pairs()[k - p.m()];
                    assert_eq!(a_set, orig.a.map(|l| l + shift));
                    assert_eq!(b_set, orig.b.map(|l| l + shift));
                }
            }
        }
    }
}

#[test]
fn construction_is_deterministic() {
    for (a, b) in [(2, 2), (3, 1), (4, 3)] {
        assert_eq!(
            extremal_system(a, b).normalize(),
            extremal_system(a, b).normalize()
        );
    }
}

#[test]
fn trace_has_one_leaf_per_pair() {
    for a in 0..=5u64 {
        for b in 0..=5u64 {
            let t = construction_trace(a, b, 10_000).unwrap();
            assert_eq!(BigUint::from(t.leaves), binomial(a + b, a));
            assert_eq!(t.internal + 1, t.leaves);
            assert_eq!(t.text.lines().count() as u64, t.leaves + t.internal);
        }
    }
}
