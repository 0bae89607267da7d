//! Deterministic key streams for the experiments. Keys are `u32`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Dist {
    Uniform,
    /// Uniform inside a window of `range / skew` at a uniform position,
    /// redrawn per batch.
    SkewedUniform,
    Normal,
    /// Every batch lies strictly above all earlier ones.
    IncreasingUniform,
}

#[derive(Debug, Clone, Copy)]
pub struct DistParams {
    pub skew: u32,
    /// Mean and standard deviation as fractions of the key space.
    pub mean: f64,
    pub stddev: f64,
}

impl Default for DistParams {
    fn default() -> Self {
        DistParams {
            skew: 64,
            mean: 0.5,
            stddev: 0.125,
        }
    }
}

const SPACE: u64 = 1 << 32;

/// Stateful generator; batch `i` depends only on the seed and batches before it.
pub struct KeyGen {
    dist: Dist,
    params: DistParams,
    rng: ChaCha8Rng,
    /// Lowest key the next increasing batch may use.
    floor: u64,
    /// Width of each increasing batch's range.
    step: u64,
}

impl KeyGen {
    /// `batches` and `batch_len` size the increasing stream so that all
    /// batches fit into the key space.
    pub fn new(
        dist: Dist,
        params: DistParams,
        seed: u64,
        batches: usize,
        batch_len: usize,
    ) -> Self {
        let step = (SPACE / (batches.max(1) as u64 + 1))
            .max(batch_len as u64 * 4)
            .max(1);
        KeyGen {
            dist,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            floor: 0,
            step,
        }
    }

    /// `n` raw keys, possibly with repeats, in generation order.
    pub fn next_keys(&mut self, n: usize) -> Vec<u32> {
        if n == 0 {
            return Vec::new();
        }
        match self.dist {
            Dist::Uniform => (0..n).map(|_| self.rng.random::<u32>()).collect(),
            Dist::SkewedUniform => {
                let width = (SPACE / u64::from(self.params.skew.max(1))).max(1);
                let start = self.rng.random_range(0..=SPACE - width);
                (0..n)
                    .map(|_| (start + self.rng.random_range(0..width)) as u32)
                    .collect()
            }
            Dist::Normal => {
                let space = SPACE as f64;
                let normal = Normal::new(
                    self.params.mean * space,
                    self.params.stddev.max(1e-9) * space,
                )
                .expect("finite parameters");
                (0..n)
                    .map(|_| normal.sample(&mut self.rng).clamp(0.0, (SPACE - 1) as f64) as u32)
                    .collect()
            }
            Dist::IncreasingUniform => {
                let lo = self.floor.min(SPACE - 1);
                let hi = (lo + self.step).min(SPACE);
                let keys: Vec<u32> = (0..n)
                    .map(|_| self.rng.random_range(lo..hi) as u32)
                    .collect();
                let max = keys.iter().copied().max().map_or(lo, u64::from);
                self.floor = max + 1;
                keys
            }
        }
    }

    /// `n` raw keys, sorted and deduplicated.
    pub fn next_set(&mut self, n: usize) -> Vec<u32> {
        let mut k = self.next_keys(n);
        k.sort_unstable();
        k.dedup();
        k
    }
}
