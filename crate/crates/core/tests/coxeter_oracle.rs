//! Element enumeration against a braid-move rewriting oracle, plus group
//! laws on the enumerated ball.

use std::collections::{BTreeSet, HashSet, VecDeque};

use hecke_cells::coxeter::{CoxeterSystem, Gen, GroupType, Universe};
use proptest::prelude::*;

/// All words reachable by braid moves `stst.. = tsts..`.
fn braid_class(sys: &CoxeterSystem, word: &[Gen]) -> HashSet<Vec<Gen>> {
    let mut seen = HashSet::from([word.to_vec()]);
    let mut queue = VecDeque::from([word.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for s in 0..3 as Gen {
            for t in 0..3 as Gen {
                if s == t {
                    continue;
                }
                let m = sys.coxeter_order(s, t) as usize;
                let lhs: Vec<Gen> = (0..m).map(|i| if i % 2 == 0 { s } else { t }).collect();
                let rhs: Vec<Gen> = (0..m).map(|i| if i % 2 == 0 { t } else { s }).collect();
                if w.len() < m {
                    continue;
                }
                for i in 0..=w.len() - m {
                    if w[i..i + m] == lhs[..] {
                        let mut v = w.clone();
                        v[i..i + m].copy_from_slice(&rhs);
                        if seen.insert(v.clone()) {
                            queue.push_back(v);
                        }
                    }
                }
            }
        }
    }
    seen
}

/// Reduced words up to braid moves, by Tits' solution of the word problem:
/// a word is reduced iff no word in its braid class has a repeated letter.
fn oracle_growth(ty: GroupType, radius: usize) -> Vec<usize> {
    let sys = CoxeterSystem::new(ty);
    let mut level: BTreeSet<Vec<Gen>> = BTreeSet::from([vec![]]);
    let mut sizes = vec![1];
    for _ in 1..=radius {
        let mut next = BTreeSet::new();
        for w in &level {
            for s in 0..3 as Gen {
                let mut v = w.clone();
                v.push(s);
                let class = braid_class(&sys, &v);
                if class.iter().any(|x| x.windows(2).any(|p| p[0] == p[1])) {
                    continue;
                }
                next.insert(class.into_iter().min().expect("nonempty"));
            }
        }
        sizes.push(next.len());
        level = next;
    }
    sizes
}

#[test]
fn growth_matches_braid_oracle() {
    for (ty, r) in [(GroupType::C2, 9), (GroupType::G2, 9)] {
        let u = Universe::new(ty, r);
        assert_eq!(u.growth(), oracle_growth(ty, r), "{ty}");
    }
}

#[test]
fn small_balls() {
    assert_eq!(Universe::new(GroupType::C2, 2).growth(), vec![1, 3, 5]);
    assert_eq!(Universe::new(GroupType::G2, 2).growth(), vec![1, 3, 5]);
}

#[test]
fn stored_words_are_reduced() {
    for ty in [GroupType::C2, GroupType::G2] {
        let u = Universe::new(ty, 7);
        let sys = CoxeterSystem::new(ty);
        for x in u.elements() {
            let w = u.word(x).letters().to_vec();
            assert_eq!(w.len(), u.length(x));
            assert!(braid_class(&sys, &w)
                .iter()
                .all(|v| v.windows(2).all(|p| p[0] != p[1])));
        }
    }
}

fn elem_pair() -> impl Strategy<Value = (bool, usize, usize)> {
    (any::<bool>(), 0usize..120, 0usize..120)
}

proptest! {
    #[test]
    fn group_laws((g2, i, j) in elem_pair()) {
        let ty = if g2 { GroupType::G2 } else { GroupType::C2 };
        let u = Universe::new(ty, 12);
        let inner: Vec<_> = u.ball(5).collect();
        let x = inner[i % inner.len()];
        let y = inner[j % inner.len()];
        let xy = u.mul(x, y).unwrap();
        prop_assert_eq!(u.inverse(u.inverse(x)), x);
        prop_assert_eq!(u.length(u.inverse(x)), u.length(x));
        prop_assert_eq!(u.inverse(xy), u.mul(u.inverse(y), u.inverse(x)).unwrap());
        prop_assert!(u.length(xy) <= u.length(x) + u.length(y));
        prop_assert_eq!(u.length(xy) % 2, (u.length(x) + u.length(y)) % 2);
        prop_assert!(u.bruhat_leq(u.identity(), x));
        prop_assert_eq!(u.duflo_leq(x, xy), u.length(xy) == u.length(x) + u.length(y));
    }
}
