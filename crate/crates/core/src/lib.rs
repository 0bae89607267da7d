//! Weak (a,b)-trees with sequential and parallel split, join, bulk updates
//! and whole-tree set operations.
//!
//! Elements live in the leaves; internal nodes carry router keys where the
//! router between child `i` and child `i + 1` is an upper bound for child `i`
//! and strictly below every element of child `i + 1`. Trees are sets: every
//! element is stored at most once.
//!
//! ```
//! use abtree::{ABTree, Params, WorkCounters, Workers, join2, par_split};
//!
//! let counters = WorkCounters::new();
//! let tree = ABTree::from_sorted(Params::default(), &(1..=100u32).collect::<Vec<_>>()).unwrap();
//! let parts = par_split(tree, &[30, 60], &Workers::new(2), &counters).unwrap();
//! assert_eq!(parts[1].to_vec(), (31..=60).collect::<Vec<_>>());
//!
//! let mut it = parts.into_iter();
//! let left = it.next().unwrap();
//! let mid = it.next().unwrap();
//! let joined = join2(left, mid, &counters).unwrap();
//! assert_eq!(joined.len(), 60);
//! ```

mod bulk;
mod counters;
mod error;
mod finger;
mod join;
mod layout;
mod node;
mod par_join;
mod prepared;
mod set_ops;
mod spine;
mod split;
mod tree;
mod validate;
mod workers;

pub use bulk::{
    bulk_search, bulk_update, bulk_update_with_report, select_double_binary, select_uniform,
    BulkOptions, BulkReport, JoinAlgo, Piece, SeparatorPartition, Strategy, UpdateBatch,
    UpdateKind,
};
pub use counters::{CounterSnapshot, WorkCounters};
pub use error::TreeError;
pub use finger::{erase_sorted, search_sorted, union_sorted};
pub use join::join2;
pub use layout::TreeLayout;
pub use par_join::{
    lightweight_par_join, lightweight_par_join_with_stats, optimal_par_join, pairwise_par_join,
    pairwise_par_join_with_rounds, sequential_join, PjStats,
};
pub use prepared::{join_many_seq, PreparedTree};
pub use set_ops::{
    build_from_sorted, set_difference, set_intersection, set_symmetric_difference, set_union,
    to_sorted,
};
pub use spine::{Side, SpineEntry, SpineStack};
pub use split::{locate_leaf_le, par_split, split_at, LeafLocation};
pub use tree::{ABTree, Key, Params};
pub use validate::{Rule, ValidationReport, Violation};
pub use workers::{Workers, WORKERS_ENV};

pub type Result<T> = std::result::Result<T, TreeError>;
