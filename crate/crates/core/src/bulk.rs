//! Bulk updates in three phases: split the tree at separator keys, apply each
//! piece of the batch to its subtree, join the subtrees back together.

use std::ops::Range;

use serde::Serialize;

use crate::counters::{CounterSnapshot, WorkCounters};
use crate::error::TreeError;
use crate::finger::{erase_sorted, search_sorted, union_sorted};
use crate::par_join::{lightweight_par_join, pairwise_par_join};
use crate::split::par_split;
use crate::tree::{ABTree, Key};
use crate::workers::Workers;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateKind {
    Insert,
    Delete,
}

/// Update operations sorted by key, one per key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateBatch<K> {
    ops: Vec<(K, UpdateKind)>,
}

impl<K: Key> Default for UpdateBatch<K> {
    fn default() -> Self {
        UpdateBatch { ops: Vec::new() }
    }
}

impl<K: Key> UpdateBatch<K> {
    /// Fails with `NotSorted` unless keys are strictly ascending.
    pub fn new(ops: Vec<(K, UpdateKind)>) -> Result<Self> {
        if ops.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(TreeError::NotSorted);
        }
        Ok(UpdateBatch { ops })
    }

    pub fn inserts(keys: &[K]) -> Result<Self> {
        Self::new(keys.iter().map(|&k| (k, UpdateKind::Insert)).collect())
    }

    pub fn deletes(keys: &[K]) -> Result<Self> {
        Self::new(keys.iter().map(|&k| (k, UpdateKind::Delete)).collect())
    }

    /// Sorts by key; for repeated keys the last op wins.
    pub fn from_unsorted(mut ops: Vec<(K, UpdateKind)>) -> Self {
        // stable sort keeps input order among equal keys
        ops.sort_by_key(|x| x.0);
        let mut out: Vec<(K, UpdateKind)> = Vec::with_capacity(ops.len());
        for op in ops {
            match out.last_mut() {
                Some(last) if last.0 == op.0 => *last = op,
                _ => out.push(op),
            }
        }
        UpdateBatch { ops: out }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[(K, UpdateKind)] {
        &self.ops
    }

    pub fn keys(&self) -> Vec<K> {
        self.ops.iter().map(|o| o.0).collect()
    }

    /// Index of the first op with key `> x`.
    fn upper(&self, x: &K) -> usize {
        self.ops.partition_point(|o| o.0 <= *x)
    }
}

/// Keys in `(lower, upper]`; `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece<K> {
    pub lower: Option<K>,
    pub upper: Option<K>,
    /// Ops of the batch falling into the piece.
    pub batch: Range<usize>,
    /// Tree elements falling into the piece, when the tree has sizes.
    pub tree_len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatorPartition<K> {
    pub separators: Vec<K>,
    pub pieces: Vec<Piece<K>>,
}

impl<K: Key> SeparatorPartition<K> {
    fn from_separators(
        separators: Vec<K>,
        batch: &UpdateBatch<K>,
        t: Option<&ABTree<K>>,
    ) -> Result<Self> {
        let mut pieces = Vec::with_capacity(separators.len() + 1);
        let (mut lower, mut start, mut below) = (None, 0, 0);
        for s in separators
            .iter()
            .copied()
            .map(Some)
            .chain(std::iter::once(None))
        {
            let end = s.map_or(batch.len(), |x| batch.upper(&x));
            let le = match (t, s) {
                (Some(t), Some(x)) => Some(t.count_le(&x)?),
                (Some(t), None) => Some(t.len()),
                (None, _) => None,
            };
            pieces.push(Piece {
                lower,
                upper: s,
                batch: start..end,
                tree_len: le.map(|n| n - below),
            });
            lower = s;
            start = end;
            below = le.unwrap_or(0);
        }
        Ok(SeparatorPartition { separators, pieces })
    }
}

/// Keys at positions `step, 2 step, ...` (1-based) with `step = ceil(n / p)`,
/// skipping the last element, which would only produce an empty tail.
fn quantile_positions(n: usize, p: usize) -> impl Iterator<Item = usize> {
    let step = n.div_ceil(p.max(1)).max(1);
    (1..p).map(move |j| j * step).take_while(move |&i| i < n)
}

/// `p - 1` separators cutting the batch into pieces of `ceil(|I| / p)` ops.
pub fn select_uniform<K: Key>(batch: &UpdateBatch<K>, p: usize) -> SeparatorPartition<K> {
    let seps = quantile_positions(batch.len(), p)
        .map(|i| batch.ops[i - 1].0)
        .collect();
    SeparatorPartition::from_separators(seps, batch, None).expect("no tree lookups")
}

/// Quantiles of both the batch and the tree, merged. Every piece holds at most
/// `ceil(|I| / p)` ops and `ceil(|T| / p)` tree elements.
pub fn select_double_binary<K: Key>(
    batch: &UpdateBatch<K>,
    t: &ABTree<K>,
    p: usize,
) -> Result<SeparatorPartition<K>> {
    if !t.has_sizes() {
        return Err(TreeError::NotAugmented);
    }
    let s: Vec<K> = quantile_positions(batch.len(), p)
        .map(|i| batch.ops[i - 1].0)
        .collect();
    let mut t_sep = Vec::new();
    for i in quantile_positions(t.len(), p) {
        t_sep.push(t.select_ith(i)?);
    }
    let mut seps = Vec::with_capacity(s.len() + t_sep.len());
    let (mut i, mut j) = (0, 0);
    while i < s.len() || j < t_sep.len() {
        let next = match (s.get(i), t_sep.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (_, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        seps.push(next);
    }
    SeparatorPartition::from_separators(seps, batch, Some(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Uniform,
    DoubleBinary,
    /// Double binary when the batch is smaller than the tree and the tree has
    /// sizes, uniform otherwise.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JoinAlgo {
    /// Pairwise join; keeps subtree sizes.
    #[default]
    Ppj,
    /// Lightweight randomized join.
    Pj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BulkOptions {
    pub strategy: Strategy,
    pub join: JoinAlgo,
    /// Coin seed for the lightweight join.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BulkReport {
    pub strategy: Strategy,
    pub pieces: usize,
    pub inserted: usize,
    pub deleted: usize,
    /// Nodes visited while applying ops to the pieces.
    pub update_visited: u64,
}

/// Applies `batch` to `t` with default options.
pub fn bulk_update<K: Key>(
    t: ABTree<K>,
    batch: &UpdateBatch<K>,
    workers: &Workers,
    strategy: Strategy,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    let opts = BulkOptions {
        strategy,
        ..BulkOptions::default()
    };
    bulk_update_with_report(t, batch, workers, &opts, counters).map(|(t, _)| t)
}

pub fn bulk_update_with_report<K: Key>(
    t: ABTree<K>,
    batch: &UpdateBatch<K>,
    workers: &Workers,
    opts: &BulkOptions,
    counters: &WorkCounters,
) -> Result<(ABTree<K>, BulkReport)> {
    let p = workers.threads();
    let strategy = match opts.strategy {
        Strategy::Auto if batch.len() < t.len() && t.has_sizes() => Strategy::DoubleBinary,
        Strategy::Auto => Strategy::Uniform,
        s => s,
    };
    let mut report = BulkReport {
        strategy,
        pieces: 0,
        inserted: 0,
        deleted: 0,
        update_visited: 0,
    };
    if batch.is_empty() {
        return Ok((t, report));
    }
    let part = match strategy {
        Strategy::DoubleBinary => select_double_binary(batch, &t, p)?,
        _ => select_uniform(batch, p),
    };
    report.pieces = part.pieces.len();

    let trees = par_split(t, &part.separators, workers, counters)?;
    // double binary hands each worker two consecutive pieces
    let per_task = if strategy == Strategy::DoubleBinary {
        2
    } else {
        1
    };
    let mut tasks = Vec::new();
    let mut it = trees
        .into_iter()
        .zip(part.pieces.iter().map(|pc| pc.batch.clone()));
    loop {
        let group: Vec<_> = it.by_ref().take(per_task).collect();
        if group.is_empty() {
            break;
        }
        tasks.push(group);
    }
    let results = workers.map(tasks, |group| {
        let local = WorkCounters::new();
        let mut out = Vec::with_capacity(group.len());
        let (mut ins, mut del) = (0, 0);
        for (mut tree, range) in group {
            let ops = &batch.ops[range];
            let add: Vec<K> = ops
                .iter()
                .filter(|o| o.1 == UpdateKind::Insert)
                .map(|o| o.0)
                .collect();
            let rem: Vec<K> = ops
                .iter()
                .filter(|o| o.1 == UpdateKind::Delete)
                .map(|o| o.0)
                .collect();
            ins += union_sorted(&mut tree, &add, &local).expect("sorted batch");
            del += erase_sorted(&mut tree, &rem, &local).expect("sorted batch");
            out.push(tree);
        }
        (out, ins, del, local.snapshot())
    });
    let mut trees = Vec::with_capacity(report.pieces);
    let mut phase = CounterSnapshot::default();
    for (out, ins, del, snap) in results {
        trees.extend(out);
        report.inserted += ins;
        report.deleted += del;
        phase.visited += snap.visited;
        counters.absorb(&snap);
    }
    report.update_visited = phase.visited;

    let joined = match opts.join {
        JoinAlgo::Ppj => pairwise_par_join(trees, workers, counters)?,
        JoinAlgo::Pj => lightweight_par_join(trees, workers, opts.seed, counters)?,
    };
    Ok((joined, report))
}

/// Keys of the strictly ascending `keys` present in `t`, searched in
/// `workers.threads()` equal slices.
pub fn bulk_search<K: Key>(
    t: &ABTree<K>,
    keys: &[K],
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<Vec<K>> {
    if keys.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TreeError::NotSorted);
    }
    if keys.is_empty() {
        return Ok(Vec::new());
    }
    let step = keys.len().div_ceil(workers.threads());
    let slices: Vec<&[K]> = keys.chunks(step).collect();
    let found = workers.map(slices, |s| search_sorted(t, s, counters));
    let mut out = Vec::new();
    for f in found {
        out.extend(f?);
    }
    Ok(out)
}
