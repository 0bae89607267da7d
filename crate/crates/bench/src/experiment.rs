use std::io::Write;
use std::time::Instant;

use abtree::{
    bulk_update_with_report, lightweight_par_join, optimal_par_join, pairwise_par_join, par_split,
    sequential_join, set_difference, set_intersection, set_symmetric_difference, set_union, ABTree,
    BulkOptions, CounterSnapshot, JoinAlgo, Params, Strategy, UpdateBatch, WorkCounters, Workers,
};
use clap::ValueEnum;
use serde::Serialize;

use crate::keygen::{Dist, DistParams, KeyGen};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Algo {
    /// Split into `parts` trees, join back sequentially.
    Sj,
    /// Same split, pairwise parallel join.
    Ppj,
    /// Same split, lightweight randomized join.
    Pj,
    /// Same split, optimal parallel join.
    Optimal,
    /// Split into `parts` trees on one worker.
    SeqSplit,
    /// Split into `parts` trees on all workers.
    ParSplit,
    BulkUniform,
    BulkDoubleBinary,
    BulkAuto,
    /// Automatic strategy with the lightweight join phase.
    BulkPj,
    /// Bulk insertion timed at one worker and at `workers`; always timed.
    BulkSpeedup,
    Union,
    Intersection,
    Difference,
    SymmetricDifference,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub tree_size: usize,
    pub bulk_size: usize,
    pub iterations: usize,
    pub workers: usize,
    pub dist: Dist,
    pub dist_params: DistParams,
    pub seed: u64,
    pub algo: Algo,
    pub params: Params,
    /// Pieces for the split and join experiments.
    pub parts: usize,
    pub counters: bool,
    /// Wall-clock columns; off keeps the output identical across runs.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.tree_size == 0 || self.bulk_size == 0 || self.iterations == 0 {
            return Err("tree size, bulk size and iterations must be positive".into());
        }
        if self.workers == 0 {
            return Err("need at least one worker".into());
        }
        if self.parts == 0 {
            return Err("need at least one part".into());
        }
        Ok(())
    }
}

/// Iteration count when none is given: `4e9 / B`, capped for desk runs.
pub fn default_iterations(bulk_size: usize) -> usize {
    (4_000_000_000usize / bulk_size.max(1)).clamp(1, 20)
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub algo: Algo,
    pub dist: Dist,
    pub tree_size: usize,
    pub bulk_size: usize,
    pub workers: usize,
    pub seed: u64,
    pub iteration: usize,
    /// Elements of the tree after the iteration.
    pub elements: usize,
    pub rank: u32,
    pub wall_ns: Option<u128>,
    /// Single-worker time over `workers` time, for `bulk_speedup`.
    pub speedup: Option<f64>,
    pub visited: Option<u64>,
    pub node_splits: Option<u64>,
    pub degree_b_splits: Option<u64>,
    pub fuses: Option<u64>,
    pub join_descent: Option<u64>,
    pub preprocess_splits: Option<u64>,
    pub stack_pops: Option<u64>,
    pub stack_pushes: Option<u64>,
    pub stack_combines: Option<u64>,
    pub steals: Option<u64>,
    pub pj_iterations: Option<u64>,
    pub max_chain_growth: Option<u64>,
}

struct Measured {
    nanos: u128,
    counters: CounterSnapshot,
    speedup: Option<f64>,
}

/// Runs the experiment, writing a header and one CSV row per iteration.
/// Fails if the final tree does not validate.
pub fn run_experiment<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<Vec<MetricsRow>, String> {
    cfg.check()?;
    let workers = Workers::new(cfg.workers);
    let mut gen = KeyGen::new(
        cfg.dist,
        cfg.dist_params,
        cfg.seed,
        cfg.iterations + 1,
        cfg.bulk_size,
    );
    let initial = gen.next_set(cfg.tree_size);
    let mut tree = ABTree::from_sorted(cfg.params, &initial).map_err(|e| e.to_string())?;
    let mut writer = csv::Writer::from_writer(out);
    let mut rows = Vec::with_capacity(cfg.iterations);
    for iteration in 0..cfg.iterations {
        let (next, m) = step(cfg, &workers, &mut gen, tree)?;
        tree = next;
        let c = cfg.counters.then_some(m.counters);
        let row = MetricsRow {
            algo: cfg.algo,
            dist: cfg.dist,
            tree_size: cfg.tree_size,
            bulk_size: cfg.bulk_size,
            workers: cfg.workers,
            seed: cfg.seed,
            iteration,
            elements: tree.len(),
            rank: tree.rank(),
            wall_ns: (cfg.timing || cfg.algo == Algo::BulkSpeedup).then_some(m.nanos),
            speedup: m.speedup,
            visited: c.map(|c| c.visited),
            node_splits: c.map(|c| c.node_splits),
            degree_b_splits: c.map(|c| c.degree_b_splits),
            fuses: c.map(|c| c.fuses),
            join_descent: c.map(|c| c.join_descent),
            preprocess_splits: c.map(|c| c.preprocess_splits),
            stack_pops: c.map(|c| c.stack_pops),
            stack_pushes: c.map(|c| c.stack_pushes),
            stack_combines: c.map(|c| c.stack_combines),
            steals: c.map(|c| c.steals),
            pj_iterations: c.map(|c| c.pj_iterations),
            max_chain_growth: c.map(|c| c.max_chain_growth),
        };
        writer.serialize(&row).map_err(|e| e.to_string())?;
        rows.push(row);
    }
    writer.flush().map_err(|e| e.to_string())?;
    let rep = tree.validate();
    if !rep.ok {
        return Err(format!(
            "final tree failed validation: {:?}",
            rep.violations.first()
        ));
    }
    Ok(rows)
}

fn err(e: abtree::TreeError) -> String {
    e.to_string()
}

/// One iteration; returns the tree to carry forward.
fn step(
    cfg: &ExperimentConfig,
    workers: &Workers,
    gen: &mut KeyGen,
    tree: ABTree<u32>,
) -> Result<(ABTree<u32>, Measured), String> {
    let c = WorkCounters::new();
    let plain = |nanos: u128, c: &WorkCounters| Measured {
        nanos,
        counters: c.snapshot(),
        speedup: None,
    };
    match cfg.algo {
        Algo::Sj | Algo::Ppj | Algo::Pj | Algo::Optimal => {
            let seps = gen.next_set(cfg.parts - 1);
            let pieces = par_split(tree, &seps, workers, &WorkCounters::new()).map_err(err)?;
            let start = Instant::now();
            let joined = match cfg.algo {
                Algo::Sj => sequential_join(pieces, &c),
                Algo::Ppj => pairwise_par_join(pieces, workers, &c),
                Algo::Pj => lightweight_par_join(pieces, workers, cfg.seed, &c),
                _ => optimal_par_join(pieces, workers, &c),
            }
            .map_err(err)?;
            let nanos = start.elapsed().as_nanos();
            Ok((joined, plain(nanos, &c)))
        }
        Algo::SeqSplit | Algo::ParSplit => {
            let seps = gen.next_set(cfg.parts - 1);
            let seq = Workers::sequential();
            let w = if cfg.algo == Algo::SeqSplit {
                &seq
            } else {
                workers
            };
            let start = Instant::now();
            let pieces = par_split(tree, &seps, w, &c).map_err(err)?;
            let nanos = start.elapsed().as_nanos();
            let back = pairwise_par_join(pieces, workers, &WorkCounters::new()).map_err(err)?;
            Ok((back, plain(nanos, &c)))
        }
        Algo::BulkUniform | Algo::BulkDoubleBinary | Algo::BulkAuto | Algo::BulkPj => {
            let batch = UpdateBatch::inserts(&gen.next_set(cfg.bulk_size)).map_err(err)?;
            let strategy = match cfg.algo {
                Algo::BulkUniform => Strategy::Uniform,
                Algo::BulkDoubleBinary => Strategy::DoubleBinary,
                _ => Strategy::Auto,
            };
            let join = if cfg.algo == Algo::BulkPj {
                JoinAlgo::Pj
            } else {
                JoinAlgo::Ppj
            };
            let opts = BulkOptions {
                strategy,
                join,
                seed: cfg.seed,
            };
            let start = Instant::now();
            let (t, _) = bulk_update_with_report(tree, &batch, workers, &opts, &c).map_err(err)?;
            let nanos = start.elapsed().as_nanos();
            Ok((t, plain(nanos, &c)))
        }
        Algo::BulkSpeedup => {
            let batch = UpdateBatch::inserts(&gen.next_set(cfg.bulk_size)).map_err(err)?;
            let opts = BulkOptions::default();
            let single = Workers::sequential();
            let t1 = tree.clone();
            let start = Instant::now();
            let (r1, _) = bulk_update_with_report(t1, &batch, &single, &opts, &WorkCounters::new())
                .map_err(err)?;
            let base = start.elapsed().as_nanos();
            drop(r1);
            let start = Instant::now();
            let (t, _) = bulk_update_with_report(tree, &batch, workers, &opts, &c).map_err(err)?;
            let nanos = start.elapsed().as_nanos();
            let speedup = Some(base as f64 / nanos.max(1) as f64);
            Ok((
                t,
                Measured {
                    nanos,
                    counters: c.snapshot(),
                    speedup,
                },
            ))
        }
        Algo::Union | Algo::Intersection | Algo::Difference | Algo::SymmetricDifference => {
            let other =
                ABTree::from_sorted(cfg.params, &gen.next_set(cfg.bulk_size)).map_err(err)?;
            let start = Instant::now();
            // union and difference carry their result forward, the others leave the tree as is
            let next = match cfg.algo {
                Algo::Union => set_union(tree, other, workers, &c).map_err(err)?,
                Algo::Difference => set_difference(tree, &other, workers, &c).map_err(err)?,
                Algo::Intersection => {
                    let r = set_intersection(&tree, &other, workers, &c).map_err(err)?;
                    drop(r);
                    tree
                }
                _ => {
                    let r = set_symmetric_difference(&tree, &other, workers, &c).map_err(err)?;
                    drop(r);
                    tree
                }
            };
            let nanos = start.elapsed().as_nanos();
            Ok((next, plain(nanos, &c)))
        }
    }
}
