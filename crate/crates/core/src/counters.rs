use std::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering};

/// Work tallies shared by every operation that takes a `&WorkCounters`.
///
/// All fields are relaxed atomics; parallel phases add to them concurrently.
#[derive(Debug, Default)]
pub struct WorkCounters {
    visited: AtomicU64,
    node_splits: AtomicU64,
    degree_b_splits: AtomicU64,
    preprocess_splits: AtomicU64,
    fuses: AtomicU64,
    join_descent: AtomicU64,
    stack_pops: AtomicU64,
    stack_pushes: AtomicU64,
    stack_combines: AtomicU64,
    steals: AtomicU64,
    spine_repairs: AtomicU64,
    pj_iterations: AtomicU64,
    max_chain_growth: AtomicU64,
    rank_order_violations: AtomicU64,
    neighbor_conflicts: AtomicU64,
}

/// Plain copy of the counters at one point in time.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub visited: u64,
    pub node_splits: u64,
    pub degree_b_splits: u64,
    pub preprocess_splits: u64,
    pub fuses: u64,
    pub join_descent: u64,
    pub stack_pops: u64,
    pub stack_pushes: u64,
    pub stack_combines: u64,
    pub steals: u64,
    pub spine_repairs: u64,
    pub pj_iterations: u64,
    /// Largest number of nodes that reached degree b during a single join.
    pub max_chain_growth: u64,
    /// Joins onto one side of a tree whose rank was below the previous join there.
    pub rank_order_violations: u64,
    /// Rounds of the lightweight join where two neighbours both initiated a join.
    pub neighbor_conflicts: u64,
}

macro_rules! adders {
    ($($name:ident => $field:ident),* $(,)?) => {
        $(
            #[inline]
            pub(crate) fn $name(&self, n: u64) {
                self.$field.fetch_add(n, Ordering::Relaxed);
            }
        )*
    };
}

impl WorkCounters {
    pub fn new() -> Self {
        Self::default()
    }

    adders! {
        add_visited => visited,
        add_node_splits => node_splits,
        add_degree_b_splits => degree_b_splits,
        add_preprocess_splits => preprocess_splits,
        add_fuses => fuses,
        add_join_descent => join_descent,
        add_stack_pops => stack_pops,
        add_stack_pushes => stack_pushes,
        add_stack_combines => stack_combines,
        add_steals => steals,
        add_spine_repairs => spine_repairs,
        add_pj_iterations => pj_iterations,
        add_rank_order_violations => rank_order_violations,
        add_neighbor_conflicts => neighbor_conflicts,
    }

    pub(crate) fn record_chain_growth(&self, g: u64) {
        self.max_chain_growth.fetch_max(g, Ordering::Relaxed);
    }

    /// Adds a snapshot taken from another set of counters.
    pub fn absorb(&self, s: &CounterSnapshot) {
        for (a, v) in [
            (&self.visited, s.visited),
            (&self.node_splits, s.node_splits),
            (&self.degree_b_splits, s.degree_b_splits),
            (&self.preprocess_splits, s.preprocess_splits),
            (&self.fuses, s.fuses),
            (&self.join_descent, s.join_descent),
            (&self.stack_pops, s.stack_pops),
            (&self.stack_pushes, s.stack_pushes),
            (&self.stack_combines, s.stack_combines),
            (&self.steals, s.steals),
            (&self.spine_repairs, s.spine_repairs),
            (&self.pj_iterations, s.pj_iterations),
            (&self.rank_order_violations, s.rank_order_violations),
            (&self.neighbor_conflicts, s.neighbor_conflicts),
        ] {
            a.fetch_add(v, Ordering::Relaxed);
        }
        self.max_chain_growth
            .fetch_max(s.max_chain_growth, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        let l = |a: &AtomicU64| a.load(Ordering::Relaxed);
        CounterSnapshot {
            visited: l(&self.visited),
            node_splits: l(&self.node_splits),
            degree_b_splits: l(&self.degree_b_splits),
            preprocess_splits: l(&self.preprocess_splits),
            fuses: l(&self.fuses),
            join_descent: l(&self.join_descent),
            stack_pops: l(&self.stack_pops),
            stack_pushes: l(&self.stack_pushes),
            stack_combines: l(&self.stack_combines),
            steals: l(&self.steals),
            spine_repairs: l(&self.spine_repairs),
            pj_iterations: l(&self.pj_iterations),
            max_chain_growth: l(&self.max_chain_growth),
            rank_order_violations: l(&self.rank_order_violations),
            neighbor_conflicts: l(&self.neighbor_conflicts),
        }
    }

    pub fn reset(&self) {
        for a in [
            &self.visited,
            &self.node_splits,
            &self.degree_b_splits,
            &self.preprocess_splits,
            &self.fuses,
            &self.join_descent,
            &self.stack_pops,
            &self.stack_pushes,
            &self.stack_combines,
            &self.steals,
            &self.spine_repairs,
            &self.pj_iterations,
            &self.max_chain_growth,
            &self.rank_order_violations,
            &self.neighbor_conflicts,
        ] {
            a.store(0, Ordering::Relaxed);
        }
    }
}

impl Sub for CounterSnapshot {
    type Output = CounterSnapshot;

    /// Difference of two snapshots. `max_chain_growth` keeps the later value.
    fn sub(self, rhs: Self) -> Self {
        CounterSnapshot {
            visited: self.visited - rhs.visited,
            node_splits: self.node_splits - rhs.node_splits,
            degree_b_splits: self.degree_b_splits - rhs.degree_b_splits,
            preprocess_splits: self.preprocess_splits - rhs.preprocess_splits,
            fuses: self.fuses - rhs.fuses,
            join_descent: self.join_descent - rhs.join_descent,
            stack_pops: self.stack_pops - rhs.stack_pops,
            stack_pushes: self.stack_pushes - rhs.stack_pushes,
            stack_combines: self.stack_combines - rhs.stack_combines,
            steals: self.steals - rhs.steals,
            spine_repairs: self.spine_repairs - rhs.spine_repairs,
            pj_iterations: self.pj_iterations - rhs.pj_iterations,
            max_chain_growth: self.max_chain_growth,
            rank_order_violations: self.rank_order_violations - rhs.rank_order_violations,
            neighbor_conflicts: self.neighbor_conflicts - rhs.neighbor_conflicts,
        }
    }
}
