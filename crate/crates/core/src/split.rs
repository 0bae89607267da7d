//! Splitting by separators.
//!
//! Both the single split and the k-way parallel split build each output piece
//! from the routing paths of its two bounding separators. Path nodes are read
//! only; pieces are assembled from fresh copies of their slices plus the
//! untouched subtrees hanging off the paths, which move into exactly one
//! piece. Once every piece is built the original path nodes are released.

use std::collections::HashSet;

use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::join::join_links;
use crate::node::{self, Link, SendLink};
use crate::tree::{count_elements, ABTree, Key, Params};
use crate::workers::Workers;
use crate::Result;

/// Result of [`locate_leaf_le`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafLocation<K> {
    /// Elements of the leaf holding the largest element `<= s`.
    pub leaf: Vec<K>,
    /// Child indices from the root down to that leaf.
    pub path: Vec<usize>,
}

/// Finds the leaf containing the largest element `<= s`. Returns `None` when
/// `s` is below every key (the piece left of `s` is empty).
pub fn locate_leaf_le<K: Key>(t: &ABTree<K>, s: &K) -> Option<LeafLocation<K>> {
    let min = t.min()?;
    if *s < min {
        return None;
    }
    let mut n = t.root?;
    let mut path = Vec::new();
    unsafe {
        loop {
            let nd = &*n.as_ptr();
            if nd.rank == 1 {
                break;
            }
            let mut ci = node::route(&nd.keys, s);
            // s may fall in a gap left of child ci; the predecessor then sits
            // in the nearest nonempty subtree to the left
            if ci > 0 && node::subtree_min(nd.children[ci]).is_some_and(|m| m > *s) {
                ci -= 1;
            }
            path.push(ci);
            n = nd.children[ci];
        }
        Some(LeafLocation {
            leaf: (*n.as_ptr()).keys.clone(),
            path,
        })
    }
}

/// Splits `t` into elements `<= x` and elements `> x`.
pub fn split_at<K: Key>(t: ABTree<K>, x: &K, counters: &WorkCounters) -> (ABTree<K>, ABTree<K>) {
    let mut parts = split_sequential(t, std::slice::from_ref(x), counters);
    let right = parts.pop().expect("two parts");
    let left = parts.pop().expect("two parts");
    (left, right)
}

/// Splits `t` into `seps.len() + 1` trees; tree `i` holds the keys in
/// `(seps[i-1], seps[i]]` with open ends at both extremes.
///
/// With more pieces than workers, the tree is first split into one part per
/// worker and each worker then finishes its part with sequential splits.
pub fn par_split<K: Key>(
    t: ABTree<K>,
    seps: &[K],
    workers: &Workers,
    counters: &WorkCounters,
) -> Result<Vec<ABTree<K>>> {
    if seps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TreeError::NotSorted);
    }
    let k = seps.len() + 1;
    let p = workers.threads();
    if k <= p || p == 1 {
        return Ok(split_pieces(t, seps, workers, counters));
    }
    // coarse split by every (k/p)-th separator, then finish sequentially
    let mut cut_idx: Vec<usize> = (1..p).map(|j| j * k / p - 1).collect();
    cut_idx.dedup();
    let coarse: Vec<K> = cut_idx.iter().map(|&i| seps[i]).collect();
    let parts = split_pieces(t, &coarse, workers, counters);
    let mut bounds = Vec::with_capacity(parts.len());
    let mut start = 0;
    for &ci in &cut_idx {
        bounds.push((start, ci));
        start = ci + 1;
    }
    bounds.push((start, seps.len()));
    let jobs: Vec<(ABTree<K>, &[K])> = parts
        .into_iter()
        .zip(bounds)
        .map(|(t, (s, e))| (t, &seps[s..e]))
        .collect();
    let done = workers.map(jobs, |(t, local)| split_sequential(t, local, counters));
    Ok(done.into_iter().flatten().collect())
}

/// Repeated single splits, left to right.
fn split_sequential<K: Key>(t: ABTree<K>, seps: &[K], counters: &WorkCounters) -> Vec<ABTree<K>> {
    let mut out = Vec::with_capacity(seps.len() + 1);
    let mut rest = t;
    for s in seps {
        let mut two = split_pieces(
            rest,
            std::slice::from_ref(s),
            &Workers::sequential(),
            counters,
        );
        rest = two.pop().expect("two parts");
        out.push(two.pop().expect("two parts"));
    }
    out.push(rest);
    out
}

/// One piece per gap between consecutive separators, built in parallel.
fn split_pieces<K: Key>(
    mut t: ABTree<K>,
    seps: &[K],
    workers: &Workers,
    counters: &WorkCounters,
) -> Vec<ABTree<K>> {
    let params = t.params;
    let aug = t.augmented;
    let empty = || {
        let mut e = ABTree::new(params);
        e.augmented = aug;
        e
    };
    if seps.is_empty() {
        return vec![t];
    }
    let Some(root) = t.take_root() else {
        return (0..=seps.len()).map(|_| empty()).collect();
    };
    let root = SendLink(root);
    let ranges: Vec<(Option<K>, Option<K>)> = (0..=seps.len())
        .map(|i| {
            (
                if i == 0 { None } else { Some(seps[i - 1]) },
                seps.get(i).copied(),
            )
        })
        .collect();
    let pieces = workers.map(ranges, |(lo, hi)| {
        let r = unsafe { build_piece(params, root.get(), lo, hi, aug, counters) };
        r.map(SendLink)
    });
    // barrier passed: every piece has adopted what it needs
    unsafe { free_paths(root.0, seps) };
    pieces
        .into_iter()
        .map(|r| match r {
            Some(l) => unsafe {
                let len = if aug { None } else { Some(count_elements(l.0)) };
                ABTree::from_root(params, Some(l.0), aug, len)
            },
            None => empty(),
        })
        .collect()
}

/// Frees every node on the routing path of any separator. Children that are
/// not on a path were moved into pieces and are left alone.
unsafe fn free_paths<K: Key>(root: Link<K>, seps: &[K]) {
    let mut seen: HashSet<*mut node::Node<K>> = HashSet::new();
    for s in seps {
        let mut n = root;
        loop {
            let next = {
                let nd = &*n.as_ptr();
                if nd.rank == 1 {
                    None
                } else {
                    Some(nd.children[node::route(&nd.keys, s)])
                }
            };
            seen.insert(n.as_ptr());
            match next {
                Some(c) => n = c,
                None => break,
            }
        }
    }
    for p in seen {
        node::free_node(std::ptr::NonNull::new_unchecked(p));
    }
}

/// Builds the piece holding keys in `(lo, hi]` from the read-only original
/// tree. Returns `None` for an empty piece.
unsafe fn build_piece<K: Key>(
    params: Params,
    root: Link<K>,
    lo: Option<K>,
    hi: Option<K>,
    aug: bool,
    counters: &WorkCounters,
) -> Option<Link<K>> {
    let mut visited = 0u64;
    // shared prefix of both routing paths
    let mut f = root;
    loop {
        visited += 1;
        let nd = &*f.as_ptr();
        if nd.rank == 1 {
            counters.add_visited(visited);
            let keys: Vec<K> = nd
                .keys
                .iter()
                .copied()
                .filter(|k| lo.is_none_or(|l| *k > l) && hi.is_none_or(|h| *k <= h))
                .collect();
            return (!keys.is_empty()).then(|| node::new_leaf(keys));
        }
        let (Some(l), Some(h)) = (lo, hi) else { break };
        let (cl, ch) = (node::route(&nd.keys, &l), node::route(&nd.keys, &h));
        if cl != ch {
            break;
        }
        f = nd.children[cl];
    }
    let nd = &*f.as_ptr();
    let last = nd.children.len() - 1;
    let cl = lo.map(|l| node::route(&nd.keys, &l));
    let ch = hi.map(|h| node::route(&nd.keys, &h));
    // children of f fully inside the range
    let c_from = cl.map_or(0, |c| c + 1);
    let c_to = ch.map_or(last as isize, |c| c as isize - 1);
    // tree so far and the router bounding it from above (none past the last child)
    let mut acc: Option<(Link<K>, Option<K>)> = None;
    if let (Some(c), Some(l)) = (cl, lo) {
        let (side, v) = lower_side(params, nd.children[c], l, aug, counters);
        visited += v;
        if let Some(s) = side {
            acc = Some((s, nd.keys.get(c).copied()));
        }
    }
    if c_from as isize <= c_to {
        let (from, to) = (c_from, c_to as usize);
        let central = if from == to {
            detach(nd.children[from])
        } else {
            node::new_internal(
                nd.keys[from..to].to_vec(),
                nd.children[from..=to].to_vec(),
                aug,
            )
        };
        let fence = nd.keys.get(to).copied();
        acc = Some(match acc {
            None => (central, fence),
            Some((t, s)) => {
                let s = s.expect("lower side left of central children has a router");
                (join_links(params, t, central, s, aug, counters), fence)
            }
        });
        if fence.is_none() {
            // open upper end: no upper side follows
            counters.add_visited(visited);
            return acc.map(|(t, _)| collapse(t));
        }
    }
    if let (Some(c), Some(h)) = (ch, hi) {
        let (side, v) = upper_side(params, nd.children[c], h, aug, counters);
        visited += v;
        if let Some(u) = side {
            acc = Some(match acc {
                None => (u, None),
                Some((t, _)) => (
                    join_links(params, t, u, nd.keys[c - 1], aug, counters),
                    None,
                ),
            });
        }
    }
    counters.add_visited(visited);
    acc.map(|(t, _)| collapse(t))
}

unsafe fn detach<K>(n: Link<K>) -> Link<K> {
    (*n.as_ptr()).parent = None;
    n
}

/// Removes degree-1 internal roots left over from deficient pieces.
unsafe fn collapse<K>(mut r: Link<K>) -> Link<K> {
    loop {
        let nd = &mut *r.as_ptr();
        if nd.rank > 1 && nd.children.len() == 1 {
            let c = nd.children[0];
            node::free_node(r);
            (*c.as_ptr()).parent = None;
            r = c;
        } else {
            (*r.as_ptr()).parent = None;
            return r;
        }
    }
}

/// Keys `> l` under `n`: the parts right of the routing path, joined bottom-up.
unsafe fn lower_side<K: Key>(
    params: Params,
    top: Link<K>,
    l: K,
    aug: bool,
    counters: &WorkCounters,
) -> (Option<Link<K>>, u64) {
    let mut path = Vec::new();
    let mut n = top;
    while !node::is_leaf(n) {
        let nd = &*n.as_ptr();
        let ci = node::route(&nd.keys, &l);
        path.push((n, ci));
        n = nd.children[ci];
    }
    let visited = path.len() as u64 + 1;
    let keys: Vec<K> = (*n.as_ptr())
        .keys
        .iter()
        .copied()
        .filter(|k| *k > l)
        .collect();
    let mut acc = (!keys.is_empty()).then(|| node::new_leaf(keys));
    for &(p, ci) in path.iter().rev() {
        let nd = &*p.as_ptr();
        if ci + 1 > nd.children.len() - 1 {
            continue;
        }
        let part = if ci + 1 == nd.children.len() - 1 {
            detach(nd.children[ci + 1])
        } else {
            node::new_internal(
                nd.keys[ci + 1..].to_vec(),
                nd.children[ci + 1..].to_vec(),
                aug,
            )
        };
        acc = Some(match acc {
            None => part,
            Some(a) => join_links(params, a, part, nd.keys[ci], aug, counters),
        });
    }
    (acc, visited)
}

/// Keys `<= h` under `n`: the parts left of the routing path, joined bottom-up.
unsafe fn upper_side<K: Key>(
    params: Params,
    top: Link<K>,
    h: K,
    aug: bool,
    counters: &WorkCounters,
) -> (Option<Link<K>>, u64) {
    let mut path = Vec::new();
    let mut n = top;
    while !node::is_leaf(n) {
        let nd = &*n.as_ptr();
        let ci = node::route(&nd.keys, &h);
        path.push((n, ci));
        n = nd.children[ci];
    }
    let visited = path.len() as u64 + 1;
    let keys: Vec<K> = (*n.as_ptr())
        .keys
        .iter()
        .copied()
        .filter(|k| *k <= h)
        .collect();
    let mut acc = (!keys.is_empty()).then(|| node::new_leaf(keys));
    for &(p, ci) in path.iter().rev() {
        if ci == 0 {
            continue;
        }
        let nd = &*p.as_ptr();
        let part = if ci == 1 {
            detach(nd.children[0])
        } else {
            node::new_internal(nd.keys[..ci - 1].to_vec(), nd.children[..ci].to_vec(), aug)
        };
        acc = Some(match acc {
            None => part,
            Some(a) => join_links(params, part, a, nd.keys[ci - 1], aug, counters),
        });
    }
    (acc, visited)
}
