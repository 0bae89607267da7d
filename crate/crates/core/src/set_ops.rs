//! Whole-tree set algebra on top of bulk updates and bulk search.
//!
//! The smaller operand is flattened into a sorted sequence and applied to the
//! larger one. On equal sizes the first argument counts as the smaller.

use crate::bulk::{bulk_search, bulk_update, Strategy, UpdateBatch};
use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::node::{self, SendLink};
use crate::tree::{collect_into, ABTree, Key, Params};
use crate::workers::Workers;
use crate::Result;

/// All elements of `t` in ascending order. Subtrees near the root are
/// flattened in parallel and concatenated.
pub fn to_sorted<K: Key>(t: &ABTree<K>, workers: &Workers) -> Vec<K> {
    let Some(root) = t.root else {
        return Vec::new();
    };
    let want = 4 * workers.threads();
    let mut frontier = vec![root];
    unsafe {
        while frontier.len() < want && !node::is_leaf(frontier[0]) {
            frontier = frontier
                .iter()
                .flat_map(|&n| (*n.as_ptr()).children.clone())
                .collect();
        }
    }
    if frontier.len() == 1 || workers.threads() == 1 {
        return t.to_vec();
    }
    let parts = workers.map(frontier.into_iter().map(SendLink).collect(), |s| {
        let mut out = Vec::new();
        unsafe { collect_into(s.get(), &mut out) };
        out
    });
    let mut out = Vec::with_capacity(t.len());
    for p in parts {
        out.extend(p);
    }
    out
}

/// Builds a tree with subtree sizes from a strictly ascending slice.
pub fn build_from_sorted<K: Key>(
    params: Params,
    seq: &[K],
    workers: &Workers,
) -> Result<ABTree<K>> {
    ABTree::build_with(params, seq, workers)
}

fn same_params<K: Key>(u: &ABTree<K>, t: &ABTree<K>) -> Result<()> {
    if u.params() != t.params() {
        return Err(TreeError::ParamsMismatch);
    }
    Ok(())
}

fn with_sizes<K: Key>(mut t: ABTree<K>) -> ABTree<K> {
    t.enable_sizes();
    t
}

/// `u ∪ t`; the smaller tree is bulk-inserted into the larger.
pub fn set_union<K: Key>(
    u: ABTree<K>,
    t: ABTree<K>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    same_params(&u, &t)?;
    let (small, large) = if u.len() <= t.len() { (u, t) } else { (t, u) };
    let batch = UpdateBatch::inserts(&to_sorted(&small, workers))?;
    bulk_update(with_sizes(large), &batch, workers, Strategy::Auto, counters)
}

/// `u ∩ t`, built from the elements of the smaller tree found in the larger.
pub fn set_intersection<K: Key>(
    u: &ABTree<K>,
    t: &ABTree<K>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    same_params(u, t)?;
    let (small, large) = if u.len() <= t.len() { (u, t) } else { (t, u) };
    let found = bulk_search(large, &to_sorted(small, workers), workers, counters)?;
    build_from_sorted(u.params(), &found, workers)
}

/// `t \ u`. When `t` is the smaller tree only `t ∩ u` is deleted, so the
/// deletions never outnumber `t`.
pub fn set_difference<K: Key>(
    t: ABTree<K>,
    u: &ABTree<K>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    same_params(&t, u)?;
    let dels = if t.len() >= u.len() {
        to_sorted(u, workers)
    } else {
        bulk_search(u, &to_sorted(&t, workers), workers, counters)?
    };
    let batch = UpdateBatch::deletes(&dels)?;
    bulk_update(with_sizes(t), &batch, workers, Strategy::Auto, counters)
}

/// `(u \ t) ∪ (t \ u)`. Both inputs are left untouched.
pub fn set_symmetric_difference<K: Key>(
    u: &ABTree<K>,
    t: &ABTree<K>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    let a = set_difference(u.clone(), t, workers, counters)?;
    let b = set_difference(t.clone(), u, workers, counters)?;
    set_union(a, b, workers, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn tree(keys: &[u32]) -> ABTree<u32> {
        ABTree::from_sorted(Params::default(), keys).unwrap()
    }

    fn random_set(rng: &mut ChaCha8Rng, max_len: usize, range: u32) -> BTreeSet<u32> {
        let n = rng.random_range(0..=max_len);
        (0..n).map(|_| rng.random_range(0..range)).collect()
    }

    fn check(t: &ABTree<u32>, want: &BTreeSet<u32>) {
        assert_eq!(t.to_vec(), want.iter().copied().collect::<Vec<_>>());
        let v = t.validate();
        assert!(v.ok, "{:?}", v.violations);
        assert!(t.has_sizes());
    }

    #[test]
    fn sorted_roundtrip() {
        for p in [1, 2, 8] {
            let w = Workers::new(p);
            for n in [0usize, 1, 7, 8, 9, 100, 5000] {
                let keys: Vec<u32> = (0..n as u32).map(|i| 3 * i).collect();
                let t = build_from_sorted(Params::default(), &keys, &w).unwrap();
                assert_eq!(to_sorted(&t, &w), keys);
                assert!(t.validate().ok);
            }
        }
        assert_eq!(
            build_from_sorted(Params::default(), &[2u32, 2], &Workers::new(2)).unwrap_err(),
            TreeError::NotSorted
        );
    }

    #[test]
    fn trivial_identities() {
        let w = Workers::new(3);
        let c = WorkCounters::new();
        let keys: Vec<u32> = (1..=500).collect();
        let all: BTreeSet<u32> = keys.iter().copied().collect();
        let none = BTreeSet::new();
        let t = tree(&keys);
        let e = tree(&[]);
        check(&set_union(t.clone(), e.clone(), &w, &c).unwrap(), &all);
        check(&set_intersection(&t, &t, &w, &c).unwrap(), &all);
        check(
            &set_intersection(&t, &tree(&[1000, 2000]), &w, &c).unwrap(),
            &none,
        );
        check(&set_difference(t.clone(), &e, &w, &c).unwrap(), &all);
        check(&set_difference(t.clone(), &t, &w, &c).unwrap(), &none);
        check(&set_symmetric_difference(&t, &t, &w, &c).unwrap(), &none);
        check(&set_symmetric_difference(&t, &e, &w, &c).unwrap(), &all);
        let hi: Vec<u32> = (501..=900).collect();
        let both: BTreeSet<u32> = (1..=900).collect();
        check(&set_union(t, tree(&hi), &w, &c).unwrap(), &both);
    }

    #[test]
    fn params_must_match() {
        let c = WorkCounters::new();
        let w = Workers::new(1);
        let a = tree(&[1]);
        let b = ABTree::from_sorted(Params::new(2, 4).unwrap(), &[2u32]).unwrap();
        assert_eq!(
            set_union(a.clone(), b.clone(), &w, &c).unwrap_err(),
            TreeError::ParamsMismatch
        );
        assert_eq!(
            set_intersection(&a, &b, &w, &c).unwrap_err(),
            TreeError::ParamsMismatch
        );
    }

    #[test]
    fn random_against_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let c = WorkCounters::new();
        for _ in 0..80 {
            let a = random_set(&mut rng, 3000, 8000);
            let b = random_set(&mut rng, 3000, 8000);
            let ta = tree(&a.iter().copied().collect::<Vec<_>>());
            let tb = tree(&b.iter().copied().collect::<Vec<_>>());
            for p in [1, 4] {
                let w = Workers::new(p);
                let uni = set_union(ta.clone(), tb.clone(), &w, &c).unwrap();
                check(&uni, &a.union(&b).copied().collect());
                let int = set_intersection(&ta, &tb, &w, &c).unwrap();
                check(&int, &a.intersection(&b).copied().collect());
                let dif = set_difference(ta.clone(), &tb, &w, &c).unwrap();
                check(&dif, &a.difference(&b).copied().collect());
                let sym = set_symmetric_difference(&ta, &tb, &w, &c).unwrap();
                check(&sym, &a.symmetric_difference(&b).copied().collect());
                assert_eq!(sym.len() + 2 * int.len(), ta.len() + tb.len());
            }
        }
    }
}
