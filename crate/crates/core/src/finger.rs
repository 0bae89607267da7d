//! Sorted-batch operations that walk a finger through the tree.
//!
//! The walk keeps the root-to-leaf path of the previous key on a stack. For
//! the next key it retreats to the lowest ancestor whose key range still
//! covers it, then descends again. Every push counts as one visited node.

use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::node::{self, Keep, Link};
use crate::tree::{ABTree, Key};
use crate::Result;

struct Finger<K> {
    /// Nodes on the current path with the upper bound of their key range
    /// (`None` for unbounded).
    path: Vec<(Link<K>, Option<K>)>,
    aug: bool,
    visited: u64,
}

impl<K: Key> Finger<K> {
    fn new(root: Option<Link<K>>, aug: bool) -> Self {
        Finger {
            path: root.map(|r| (r, None)).into_iter().collect(),
            aug,
            visited: root.map_or(0, |_| 1),
        }
    }

    /// Pops one node, recomputing its size from its (already final) children.
    unsafe fn pop(&mut self) -> Option<Link<K>> {
        let (n, _) = self.path.pop()?;
        if self.aug {
            node::recompute_size(n);
        }
        Some(n)
    }

    /// Retreats to the lowest ancestor covering `x`, then descends to its leaf.
    unsafe fn seek(&mut self, x: &K) -> Option<Link<K>> {
        while self.path.len() > 1 {
            match self.path.last() {
                Some((_, Some(hi))) if x > hi => {
                    self.pop();
                }
                _ => break,
            }
        }
        let &(mut n, mut hi) = self.path.last()?;
        while !node::is_leaf(n) {
            let nd = &*n.as_ptr();
            let ci = node::route(&nd.keys, x);
            if let Some(&k) = nd.keys.get(ci) {
                hi = Some(k);
            }
            n = nd.children[ci];
            self.path.push((n, hi));
            self.visited += 1;
        }
        Some(n)
    }

    unsafe fn finish(mut self) -> u64 {
        while self.pop().is_some() {}
        self.visited
    }
}

fn check_sorted<K: Ord>(seq: &[K]) -> Result<()> {
    if seq.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TreeError::NotSorted);
    }
    Ok(())
}

/// Inserts every key of the strictly ascending `seq` into `t`. Returns how
/// many were new.
pub fn union_sorted<K: Key>(
    t: &mut ABTree<K>,
    seq: &[K],
    counters: &WorkCounters,
) -> Result<usize> {
    check_sorted(seq)?;
    if seq.is_empty() {
        return Ok(0);
    }
    let mut rest = seq;
    let mut added = 0;
    if t.root.is_none() {
        t.root = Some(node::new_leaf(vec![seq[0]]));
        t.bounds = Some((seq[0], seq[0]));
        rest = &seq[1..];
        added = 1;
    }
    let b = t.params.b();
    let mut f = Finger::new(t.root, t.augmented);
    unsafe {
        for &x in rest {
            let leaf = f.seek(&x).expect("nonempty tree");
            let keys = &mut (*leaf.as_ptr()).keys;
            let Err(pos) = keys.binary_search(&x) else {
                continue;
            };
            keys.insert(pos, x);
            added += 1;
            // split upward while the top of the path overflows
            while let Some(&(n, _)) = f.path.last() {
                if node::degree(n) <= b {
                    break;
                }
                f.pop();
                counters.add_node_splits(1);
                let (l, r, s) = node::split_node(n, Keep::Left, f.aug).expect("overflowing node");
                match node::parent(l) {
                    Some(p) => node::insert_beside(p, l, r, s, true),
                    None => {
                        let root = node::new_internal(vec![s], vec![l, r], f.aug);
                        t.root = Some(root);
                        f.path.push((root, None));
                    }
                }
            }
        }
        counters.add_visited(f.finish());
    }
    t.len += added;
    let (lo, hi) = t.bounds.expect("nonempty");
    t.bounds = Some((lo.min(seq[0]), hi.max(seq[seq.len() - 1])));
    Ok(added)
}

/// Removes every key of the strictly ascending `seq` from `t`. Returns how
/// many were present.
pub fn erase_sorted<K: Key>(
    t: &mut ABTree<K>,
    seq: &[K],
    counters: &WorkCounters,
) -> Result<usize> {
    check_sorted(seq)?;
    if seq.is_empty() || t.root.is_none() {
        return Ok(0);
    }
    let a = t.params.a();
    let mut removed = 0;
    let mut f = Finger::new(t.root, t.augmented);
    unsafe {
        for x in seq {
            let Some(leaf) = f.seek(x) else { break };
            let keys = &mut (*leaf.as_ptr()).keys;
            let Ok(pos) = keys.binary_search(x) else {
                continue;
            };
            keys.remove(pos);
            removed += 1;
            // rebalance upward while the top of the path underflows
            while let Some(&(n, _)) = f.path.last() {
                let Some(p) = node::parent(n) else { break };
                if node::degree(n) >= a {
                    break;
                }
                f.pop();
                counters.add_fuses(u64::from(rebalance_child(p, n, a, f.aug)));
            }
            // collapse a degree-1 internal root or drop an empty leaf root
            if let Some(&(r, _)) = f.path.first() {
                if f.path.len() == 1 && node::parent(r).is_none() {
                    let rn = &*r.as_ptr();
                    if (rn.rank > 1 && rn.children.len() == 1)
                        || (rn.rank == 1 && rn.keys.is_empty())
                    {
                        f.path.clear();
                        t.collapse_root();
                        if let Some(nr) = t.root {
                            f.path.push((nr, None));
                        }
                    }
                }
            }
        }
        counters.add_visited(f.finish());
    }
    t.len -= removed;
    if t.len == 0 {
        t.bounds = None;
    } else if removed > 0 {
        t.recompute_bounds();
    }
    Ok(removed)
}

/// Fixes the underflowing child `n` of `p` by borrowing from or fusing with a
/// sibling. Returns whether a fuse happened.
unsafe fn rebalance_child<K: Key>(p: Link<K>, n: Link<K>, a: usize, aug: bool) -> bool {
    let i = node::child_index(p, n);
    let pn = &mut *p.as_ptr();
    let (li, left, right) = if i > 0 {
        (i - 1, pn.children[i - 1], n)
    } else {
        (i, n, pn.children[i + 1])
    };
    let sib = if left == n { right } else { left };
    if node::degree(sib) > a {
        crate::tree::borrow(p, li, left, right, sib == left, aug);
        return false;
    }
    let splitter = pn.keys.remove(li);
    pn.children.remove(li + 1);
    node::fuse(left, right, splitter, Keep::Left, aug);
    true
}

/// Returns the keys of the strictly ascending `seq` that are present in `t`.
pub fn search_sorted<K: Key>(t: &ABTree<K>, seq: &[K], counters: &WorkCounters) -> Result<Vec<K>> {
    check_sorted(seq)?;
    let mut out = Vec::new();
    let mut f = Finger::new(t.root, false);
    unsafe {
        for x in seq {
            let Some(leaf) = f.seek(x) else { break };
            if (*leaf.as_ptr()).keys.binary_search(x).is_ok() {
                out.push(*x);
            }
        }
        counters.add_visited(f.finish());
    }
    Ok(out)
}
