use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::node::{self, Keep, Link};
use crate::tree::{ABTree, Key, Params};
use crate::Result;

/// Joins two trees where every key of `t1` is below every key of `t2`.
///
/// Descends `|r(t1) - r(t2)|` nodes on the facing spine of the taller tree and
/// hangs (or fuses) the shorter root there; splits then propagate upward as in
/// an insert.
pub fn join2<K: Key>(
    mut t1: ABTree<K>,
    mut t2: ABTree<K>,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    if t2.is_empty() {
        return Ok(t1);
    }
    if t1.is_empty() {
        return Ok(t2);
    }
    if t1.params != t2.params {
        return Err(TreeError::ParamsMismatch);
    }
    let (lo1, hi1) = t1.bounds.expect("nonempty");
    let (lo2, hi2) = t2.bounds.expect("nonempty");
    if hi1 >= lo2 {
        return Err(TreeError::Overlap);
    }
    let aug = t1.augmented && t2.augmented;
    let len = t1.len + t2.len;
    let params = t1.params;
    let l = t1.take_root().expect("nonempty");
    let r = t2.take_root().expect("nonempty");
    let root = unsafe { join_links(params, l, r, hi1, aug, counters) };
    let mut out = ABTree::new(params);
    out.root = Some(root);
    out.len = len;
    out.augmented = aug;
    out.bounds = Some((lo1, hi2));
    Ok(out)
}

/// Link-level join. `splitter` must be `>=` every key under `l` and `<` every
/// key under `r`. Either root may be deficient (degree below `a`, even 1);
/// such a root is fused rather than hung. Returns the new root.
pub(crate) unsafe fn join_links<K: Copy>(
    params: Params,
    l: Link<K>,
    r: Link<K>,
    splitter: K,
    aug: bool,
    counters: &WorkCounters,
) -> Link<K> {
    let (a, b) = (params.a(), params.b());
    let (r1, r2) = (node::rank(l), node::rank(r));
    let mut touched = Vec::new();
    let left_taller = r1 >= r2;
    let mut root = if left_taller { l } else { r };
    let descend = r1.abs_diff(r2);
    counters.add_join_descent(descend as u64 + 1);
    counters.add_visited(descend as u64 + 1);
    // n: node of the shorter tree's rank on the facing spine of the taller one
    let mut n = root;
    for _ in 0..descend {
        let nd = &*n.as_ptr();
        n = if left_taller {
            *nd.children.last().unwrap()
        } else {
            nd.children[0]
        };
    }
    let short = if left_taller { r } else { l };
    let mut cur;
    if node::degree(n) < a || node::degree(short) < a {
        counters.add_fuses(1);
        let keep = if left_taller { Keep::Left } else { Keep::Right };
        let (left, right) = if left_taller { (n, short) } else { (short, n) };
        node::fuse(left, right, splitter, keep, false);
        touched.push(n);
        cur = n;
    } else {
        match node::parent(n) {
            Some(p) => {
                node::insert_beside(p, n, short, splitter, left_taller);
                touched.push(p);
                cur = p;
            }
            None => {
                let kids = if left_taller {
                    vec![n, short]
                } else {
                    vec![short, n]
                };
                root = node::new_internal(vec![splitter], kids, false);
                touched.push(root);
                cur = root;
            }
        }
    }
    while node::degree(cur) > b {
        counters.add_node_splits(1);
        let (x, y, s) = node::split_node(cur, Keep::Left, false).expect("degree > b");
        touched.push(y);
        match node::parent(cur) {
            Some(p) => {
                node::insert_beside(p, x, y, s, true);
                touched.push(p);
                cur = p;
            }
            None => {
                root = node::new_internal(vec![s], vec![x, y], false);
                touched.push(root);
                break;
            }
        }
    }
    if aug {
        node::repair_sizes(&touched);
    }
    root
}
