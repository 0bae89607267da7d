//! Joining many key-ordered trees.
//!
//! * [`sequential_join`] folds two-tree joins left to right.
//! * [`pairwise_par_join`] halves the list each round, joining neighbours in
//!   parallel. It keeps subtree sizes.
//! * [`lightweight_par_join`] works in randomized rounds on prepared trees.
//!   A tree joins its left neighbour only at a local rank minimum, with coin
//!   flips breaking ties inside runs of equal rank. Full parents are handled
//!   by stealing the rank-equal node instead of splitting chains.
//! * [`optimal_par_join`] joins groups of about `log k` prepared trees
//!   sequentially, then finishes with the lightweight join. It does not keep
//!   subtree sizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::join::join2;
use crate::prepared::{join_many_prepared, join_pair, Joined, Mode, PreparedTree};
use crate::tree::{ABTree, Key};
use crate::workers::Workers;
use crate::Result;

/// Statistics of one lightweight join run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PjStats {
    pub iterations: u32,
    pub joins: u64,
    pub steals: u64,
    /// Per round with any run of equal ranks: the fraction of trees inside
    /// such runs that joined a neighbour.
    pub plain_shrinkage: Vec<f64>,
}

impl PjStats {
    pub fn mean_plain_shrinkage(&self) -> Option<f64> {
        if self.plain_shrinkage.is_empty() {
            None
        } else {
            Some(self.plain_shrinkage.iter().sum::<f64>() / self.plain_shrinkage.len() as f64)
        }
    }
}

/// Checks parameters and key order, and drops empty trees.
fn nonempty_in_order<K: Key>(trees: Vec<ABTree<K>>) -> Result<Vec<ABTree<K>>> {
    let trees: Vec<_> = trees.into_iter().filter(|t| !t.is_empty()).collect();
    for w in trees.windows(2) {
        if w[0].params != w[1].params {
            return Err(TreeError::ParamsMismatch);
        }
        let (_, hi) = w[0].bounds.expect("nonempty");
        let (lo, _) = w[1].bounds.expect("nonempty");
        if hi >= lo {
            return Err(TreeError::Overlap);
        }
    }
    Ok(trees)
}

fn empty_like<K: Key>(trees: &[ABTree<K>]) -> ABTree<K> {
    ABTree::new(trees.first().map(|t| t.params).unwrap_or_default())
}

/// Joins the first tree with the second, the result with the third, and so on.
pub fn sequential_join<K: Key>(
    trees: Vec<ABTree<K>>,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    let empty = empty_like(&trees);
    let trees = nonempty_in_order(trees)?;
    let mut it = trees.into_iter();
    let Some(mut acc) = it.next() else {
        return Ok(empty);
    };
    for t in it {
        acc = join2(acc, t, counters)?;
    }
    Ok(acc)
}

pub fn pairwise_par_join<K: Key>(
    trees: Vec<ABTree<K>>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    pairwise_par_join_with_rounds(trees, workers, counters).map(|(t, _)| t)
}

/// Pairwise join that also reports the number of rounds, `ceil(log2 k)` for
/// `k` non-empty inputs.
pub fn pairwise_par_join_with_rounds<K: Key>(
    trees: Vec<ABTree<K>>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<(ABTree<K>, u32)> {
    let empty = empty_like(&trees);
    let mut list = nonempty_in_order(trees)?;
    if list.is_empty() {
        return Ok((empty, 0));
    }
    let mut rounds = 0;
    while list.len() > 1 {
        rounds += 1;
        let mut pairs = Vec::with_capacity(list.len().div_ceil(2));
        let mut it = list.into_iter();
        while let Some(a) = it.next() {
            pairs.push((a, it.next()));
        }
        list = workers.map(pairs, |(a, b)| match b {
            Some(b) => join2(a, b, counters).expect("validated order"),
            None => a,
        });
    }
    Ok((list.pop().expect("one tree left"), rounds))
}

pub fn lightweight_par_join<K: Key>(
    trees: Vec<ABTree<K>>,
    workers: &Workers,
    seed: u64,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    lightweight_par_join_with_stats(trees, workers, seed, counters).map(|(t, _)| t)
}

pub fn lightweight_par_join_with_stats<K: Key>(
    trees: Vec<ABTree<K>>,
    workers: &Workers,
    seed: u64,
    counters: &WorkCounters,
) -> Result<(ABTree<K>, PjStats)> {
    let empty = empty_like(&trees);
    let trees = nonempty_in_order(trees)?;
    if trees.is_empty() {
        return Ok((empty, PjStats::default()));
    }
    let len = trees.iter().map(|t| t.len).sum();
    let prepared = workers.map(trees, |t| PreparedTree::prepare(t, counters));
    let (t, stats) = lightweight_prepared(prepared, workers, seed, counters);
    Ok((t.finish_with_len(Some(len)), stats))
}

/// Whether tree `t` joins a neighbour this round: leftward for `t > 0`, into
/// tree 1 for `t = 0`. Missing neighbours have infinite rank.
fn initiates(t: usize, ranks: &[u32], coins: &[bool]) -> bool {
    let k = ranks.len();
    if k < 2 {
        return false;
    }
    let rt = ranks[t];
    let rl = if t == 0 { u32::MAX } else { ranks[t - 1] };
    let rr = if t + 1 == k { u32::MAX } else { ranks[t + 1] };
    let cl = t > 0 && coins[t - 1];
    let ct = coins[t];
    (rl > rt && rt < rr)
        || (rl > rt && rt == rr && ct)
        || (rl == rt && rt < rr && !cl && ct)
        || (rl == rt && rt == rr && !cl && ct)
}

#[allow(clippy::large_enum_variant)]
enum Group<K: Key> {
    Single(PreparedTree<K>),
    Join {
        left: Option<PreparedTree<K>>,
        host: PreparedTree<K>,
        right: Option<PreparedTree<K>>,
    },
}

/// Runs one host's joins. Returns the resulting trees and the number of
/// steals.
fn run_group<K: Key>(g: Group<K>, counters: &WorkCounters) -> (Vec<PreparedTree<K>>, u64) {
    let (left, mut host, right) = match g {
        Group::Single(t) => return (vec![t], 0),
        Group::Join { left, host, right } => (left, host, right),
    };
    let mut out = Vec::with_capacity(3);
    let mut steals = 0;
    if let Some(l) = left {
        match join_pair(l, host, Mode::Steal, counters) {
            Joined::One(t) => host = t,
            Joined::Two(x, y) => {
                steals += 1;
                out.push(x);
                host = y;
            }
        }
    }
    match right {
        None => out.push(host),
        Some(r) => match join_pair(host, r, Mode::Steal, counters) {
            Joined::One(t) => out.push(t),
            Joined::Two(x, y) => {
                steals += 1;
                out.push(x);
                out.push(y);
            }
        },
    }
    (out, steals)
}

/// Rounds after which the remaining trees are joined sequentially. Never
/// reached in practice; it only bounds a pathological coin sequence.
const MAX_ROUNDS: u32 = 100_000;

pub(crate) fn lightweight_prepared<K: Key>(
    mut list: Vec<PreparedTree<K>>,
    workers: &Workers,
    seed: u64,
    counters: &WorkCounters,
) -> (PreparedTree<K>, PjStats) {
    let mut stats = PjStats::default();
    while list.len() > 1 {
        if stats.iterations >= MAX_ROUNDS {
            let t = join_many_prepared(list, counters)
                .expect("ordered")
                .expect("nonempty");
            return (t, stats);
        }
        stats.iterations += 1;
        counters.add_pj_iterations(1);
        let k = list.len();
        let ranks: Vec<u32> = list.iter().map(|t| t.rank()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(stats.iterations));
        let coins: Vec<bool> = (0..k).map(|_| rng.random()).collect();
        let init: Vec<bool> = (0..k).map(|t| initiates(t, &ranks, &coins)).collect();
        for t in 1..k {
            if init[t] && init[t - 1] {
                counters.add_neighbor_conflicts(1);
            }
        }
        let in_plain = |t: usize| {
            (t > 0 && ranks[t - 1] == ranks[t]) || (t + 1 < k && ranks[t + 1] == ranks[t])
        };
        let plain = (0..k).filter(|&t| in_plain(t)).count();
        if plain > 0 {
            let joined = (0..k).filter(|&t| in_plain(t) && init[t]).count();
            stats.plain_shrinkage.push(joined as f64 / plain as f64);
        }
        let mut slots: Vec<Option<PreparedTree<K>>> = list.into_iter().map(Some).collect();
        let mut groups = Vec::new();
        let mut i = 0;
        while i < k {
            let mut take = |j: usize| slots[j].take().expect("each tree used once");
            if i == 0 && init[0] {
                let left = Some(take(0));
                let host = take(1);
                let right = if k > 2 && init[2] {
                    Some(take(2))
                } else {
                    None
                };
                i += if right.is_some() { 3 } else { 2 };
                groups.push(Group::Join { left, host, right });
            } else if i + 1 < k && init[i + 1] {
                let host = take(i);
                let right = Some(take(i + 1));
                groups.push(Group::Join {
                    left: None,
                    host,
                    right,
                });
                i += 2;
            } else {
                groups.push(Group::Single(take(i)));
                i += 1;
            }
        }
        let out = workers.map(groups, |g| run_group(g, counters));
        list = Vec::with_capacity(k);
        for (trees, steals) in out {
            stats.steals += steals;
            list.extend(trees);
        }
        stats.joins += (k - list.len()) as u64;
    }
    (list.pop().expect("one tree left"), stats)
}

/// Work-optimal join: sequential joins inside groups of `ceil(log2 k)`
/// prepared trees, then the lightweight join over the group results. The
/// result has subtree sizes turned off.
pub fn optimal_par_join<K: Key>(
    trees: Vec<ABTree<K>>,
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    let empty = empty_like(&trees);
    let mut trees = nonempty_in_order(trees)?;
    let k = trees.len();
    if k == 0 {
        let mut e = empty;
        e.disable_sizes();
        return Ok(e);
    }
    let len: usize = trees.iter().map(|t| t.len).sum();
    for t in &mut trees {
        t.disable_sizes();
    }
    let g = (usize::BITS - (k - 1).leading_zeros()).max(1) as usize;
    let prepared = workers.map(trees, |t| PreparedTree::prepare(t, counters));
    let mut groups: Vec<Vec<PreparedTree<K>>> = Vec::with_capacity(k.div_ceil(g));
    let mut it = prepared.into_iter().peekable();
    while it.peek().is_some() {
        groups.push(it.by_ref().take(g).collect());
    }
    let joined = workers.map(groups, |grp| {
        let t = join_many_prepared(grp, counters)
            .expect("validated order")
            .expect("nonempty group");
        PreparedTree::prepare(t.finish(), counters)
    });
    let (t, _) = lightweight_prepared(joined, workers, 0, counters);
    Ok(t.finish_with_len(Some(len)))
}
