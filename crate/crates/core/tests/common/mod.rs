#![allow(dead_code)]

use std::collections::BTreeSet;

use abtree::{ABTree, Params, UpdateBatch, UpdateKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PARAMS: [(usize, usize); 4] = [(2, 4), (2, 5), (3, 6), (4, 8)];

pub fn params(rng: &mut ChaCha8Rng) -> Params {
    let (a, b) = PARAMS[rng.random_range(0..PARAMS.len())];
    Params::new(a, b).unwrap()
}

/// Size drawn log-uniformly from `[0, max]`.
pub fn log_size(rng: &mut ChaCha8Rng, max: usize) -> usize {
    let e = rng.random_range(0.0..((max + 1) as f64).ln());
    (e.exp() as usize).saturating_sub(1).min(max)
}

/// Up to `n` distinct keys from `[lo, hi)`, ascending.
pub fn key_set(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> Vec<u32> {
    let s: BTreeSet<u32> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    s.into_iter().collect()
}

/// Tree over `keys`, bulk loaded or built by random insertion so that shapes
/// vary between trials.
pub fn build(rng: &mut ChaCha8Rng, p: Params, keys: &[u32]) -> ABTree<u32> {
    if keys.len() > 3000 || rng.random_bool(0.5) {
        let mut t = ABTree::from_sorted(p, keys).unwrap();
        // roughen the packed shape a little
        let extra = keys.len().min(64);
        for _ in 0..extra {
            let k = keys[rng.random_range(0..keys.len())];
            t.delete(&k);
            t.insert(k);
        }
        t
    } else {
        let mut order = keys.to_vec();
        order.shuffle(rng);
        let mut t = ABTree::new(p);
        for k in order {
            t.insert(k);
        }
        t
    }
}

/// Cuts ascending `keys` into `k` contiguous, possibly empty runs.
pub fn cut(rng: &mut ChaCha8Rng, keys: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut bounds: Vec<usize> = (0..k.saturating_sub(1))
        .map(|_| rng.random_range(0..=keys.len()))
        .collect();
    bounds.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for b in bounds.into_iter().chain(std::iter::once(keys.len())) {
        out.push(keys[start..b].to_vec());
        start = b;
    }
    out
}

pub fn random_batch(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> UpdateBatch<u32> {
    let ops = (0..n)
        .map(|_| {
            let kind = if rng.random_bool(0.6) {
                UpdateKind::Insert
            } else {
                UpdateKind::Delete
            };
            (rng.random_range(lo..hi), kind)
        })
        .collect();
    UpdateBatch::from_unsorted(ops)
}

pub fn apply(base: &[u32], batch: &UpdateBatch<u32>) -> Vec<u32> {
    let mut s: BTreeSet<u32> = base.iter().copied().collect();
    for &(k, kind) in batch.ops() {
        match kind {
            UpdateKind::Insert => s.insert(k),
            UpdateKind::Delete => s.remove(&k),
        };
    }
    s.into_iter().collect()
}

/// Element set and structure check; returns a message on mismatch.
pub fn check(t: &ABTree<u32>, want: &[u32]) -> Result<(), String> {
    let got = t.to_vec();
    if got != want {
        return Err(format!(
            "element set differs: {} vs {} expected",
            got.len(),
            want.len()
        ));
    }
    let rep = t.validate();
    if !rep.ok {
        return Err(format!(
            "invalid tree: {:?}",
            &rep.violations[..rep.violations.len().min(3)]
        ));
    }
    if t.len() != want.len() {
        return Err(format!("len {} vs {}", t.len(), want.len()));
    }
    Ok(())
}
