//! Raw node storage.
//!
//! Nodes are heap allocated and linked by raw pointers in both directions
//! (children and parent). Ownership is tracked by the owning [`ABTree`]; the
//! helpers here never free children implicitly.
//!
//! [`ABTree`]: crate::ABTree

use std::ptr::NonNull;

use crate::error::TreeError;
use crate::Result;

pub(crate) type Link<K> = NonNull<Node<K>>;

pub(crate) struct Node<K> {
    /// Router keys for internal nodes (`degree - 1` of them), elements for leaves.
    pub(crate) keys: Vec<K>,
    /// Empty for leaves.
    pub(crate) children: Vec<Link<K>>,
    pub(crate) parent: Option<Link<K>>,
    /// Number of elements below this node; only meaningful when the owning
    /// tree maintains sizes.
    pub(crate) size: usize,
    /// Number of nodes on a path from here to a leaf, inclusive.
    pub(crate) rank: u32,
    pub(crate) dirty: bool,
}

/// Raw link that may cross thread boundaries. Workers only ever touch
/// disjoint node sets, which is what makes this sound.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) struct SendLink<K>(pub(crate) Link<K>);

impl<K> SendLink<K> {
    #[inline]
    pub(crate) fn get(&self) -> Link<K> {
        self.0
    }
}

unsafe impl<K> Send for SendLink<K> {}
unsafe impl<K> Sync for SendLink<K> {}

/// Which half of a split keeps the original allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Keep {
    Left,
    Right,
}

pub(crate) fn new_leaf<K>(keys: Vec<K>) -> Link<K> {
    let size = keys.len();
    alloc(Node {
        keys,
        children: Vec::new(),
        parent: None,
        size,
        rank: 1,
        dirty: false,
    })
}

/// Allocates an internal node and points every child's parent at it.
pub(crate) fn new_internal<K>(keys: Vec<K>, children: Vec<Link<K>>, aug: bool) -> Link<K> {
    debug_assert_eq!(keys.len() + 1, children.len());
    let rank = unsafe { children[0].as_ref().rank } + 1;
    let link = alloc(Node {
        keys,
        children,
        parent: None,
        size: 0,
        rank,
        dirty: false,
    });
    unsafe {
        adopt_all(link);
        if aug {
            recompute_size(link);
        }
    }
    link
}

fn alloc<K>(node: Node<K>) -> Link<K> {
    NonNull::from(Box::leak(Box::new(node)))
}

/// Frees one node without touching its children.
///
/// # Safety
/// `link` must be a live node that nothing else will dereference afterwards.
pub(crate) unsafe fn free_node<K>(link: Link<K>) {
    drop(Box::from_raw(link.as_ptr()));
}

/// Frees a whole subtree.
///
/// # Safety
/// The subtree must be exclusively owned by the caller.
pub(crate) unsafe fn free_subtree<K>(root: Link<K>) {
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        stack.extend_from_slice(&(*n.as_ptr()).children);
        free_node(n);
    }
}

#[inline]
pub(crate) unsafe fn is_leaf<K>(n: Link<K>) -> bool {
    (*n.as_ptr()).rank == 1
}

#[inline]
pub(crate) unsafe fn degree<K>(n: Link<K>) -> usize {
    let node = &*n.as_ptr();
    if node.rank == 1 {
        node.keys.len()
    } else {
        node.children.len()
    }
}

#[inline]
pub(crate) unsafe fn rank<K>(n: Link<K>) -> u32 {
    (*n.as_ptr()).rank
}

#[inline]
pub(crate) unsafe fn parent<K>(n: Link<K>) -> Option<Link<K>> {
    (*n.as_ptr()).parent
}

#[inline]
pub(crate) unsafe fn size<K>(n: Link<K>) -> usize {
    (*n.as_ptr()).size
}

/// Sets the parent pointer of every child of `n` to `n`.
pub(crate) unsafe fn adopt_all<K>(n: Link<K>) {
    for &c in &(*n.as_ptr()).children {
        (*c.as_ptr()).parent = Some(n);
    }
}

pub(crate) unsafe fn recompute_size<K>(n: Link<K>) {
    let node = &mut *n.as_ptr();
    node.size = if node.rank == 1 {
        node.keys.len()
    } else {
        node.children.iter().map(|c| (*c.as_ptr()).size).sum()
    };
}

/// Position of `child` inside its parent's child list.
pub(crate) unsafe fn child_index<K>(parent: Link<K>, child: Link<K>) -> usize {
    (*parent.as_ptr())
        .children
        .iter()
        .position(|&c| c == child)
        .expect("child not found under its parent")
}

/// Child slot for `x`: the first router that is `>= x`, or the last child.
#[inline]
pub(crate) fn route<K: Ord>(keys: &[K], x: &K) -> usize {
    keys.partition_point(|k| k < x)
}

/// Splits `n` into a node with the first `d/2` children (or elements) and a
/// node with the remaining ones. The half named by `keep` stays in `n`; the
/// other half is freshly allocated. Returns `(left, right, splitter)`.
///
/// For internal nodes the splitter is the `d/2`-th router and leaves both
/// halves; for leaves it is the largest element of the left half, which stays
/// there. The new node is not linked into any parent.
pub(crate) unsafe fn split_node<K: Copy>(
    n: Link<K>,
    keep: Keep,
    aug: bool,
) -> Result<(Link<K>, Link<K>, K)> {
    let d = degree(n);
    if d < 2 {
        return Err(TreeError::InvalidNode(format!(
            "cannot split a node of degree {d}"
        )));
    }
    let half = d / 2;
    let node = &mut *n.as_ptr();
    let (left, right, splitter);
    if node.rank == 1 {
        splitter = node.keys[half - 1];
        match keep {
            Keep::Left => {
                let tail = node.keys.split_off(half);
                right = new_leaf(tail);
                left = n;
            }
            Keep::Right => {
                let head: Vec<K> = node.keys.drain(..half).collect();
                left = new_leaf(head);
                right = n;
            }
        }
    } else {
        splitter = node.keys[half - 1];
        match keep {
            Keep::Left => {
                let tail_keys = node.keys.split_off(half);
                node.keys.pop();
                let tail_children = node.children.split_off(half);
                right = new_internal(tail_keys, tail_children, aug);
                left = n;
            }
            Keep::Right => {
                let head_keys: Vec<K> = node.keys.drain(..half).collect();
                let mut head_keys = head_keys;
                head_keys.pop();
                let head_children: Vec<Link<K>> = node.children.drain(..half).collect();
                left = new_internal(head_keys, head_children, aug);
                right = n;
            }
        }
    }
    if aug {
        recompute_size(n);
    }
    Ok((left, right, splitter))
}

/// Moves the content of `right` into `left` (or the other way round when
/// `keep` is `Right`) with `splitter` as the router between them, and frees
/// the emptied node. Returns the surviving node.
///
/// Caller guarantees equal ranks. The order precondition is checked only in
/// debug builds; [`fuse_checked`] validates it explicitly.
pub(crate) unsafe fn fuse<K: Copy>(
    left: Link<K>,
    right: Link<K>,
    splitter: K,
    keep: Keep,
    aug: bool,
) -> Link<K> {
    let (dst, src) = fuse_into(left, right, splitter, keep, aug);
    free_node(src);
    dst
}

/// Like [`fuse`] but leaves the emptied node allocated, with its parent
/// pointer redirected to the survivor so upward walks from it still reach the
/// live path. Returns `(survivor, shell)`.
pub(crate) unsafe fn fuse_into<K: Copy>(
    left: Link<K>,
    right: Link<K>,
    splitter: K,
    keep: Keep,
    aug: bool,
) -> (Link<K>, Link<K>) {
    let (dst, src) = match keep {
        Keep::Left => (left, right),
        Keep::Right => (right, left),
    };
    let s = &mut *src.as_ptr();
    let src_keys = std::mem::take(&mut s.keys);
    let src_children = std::mem::take(&mut s.children);
    let src_size = std::mem::replace(&mut s.size, 0);
    s.parent = Some(dst);
    let d = &mut *dst.as_ptr();
    debug_assert_eq!(d.rank, s.rank);
    let leaf = d.rank == 1;
    match keep {
        Keep::Left => {
            if !leaf {
                d.keys.push(splitter);
            }
            d.keys.extend(src_keys);
            d.children.extend(src_children);
        }
        Keep::Right => {
            let mut keys = src_keys;
            if !leaf {
                keys.push(splitter);
            }
            keys.append(&mut d.keys);
            d.keys = keys;
            let mut children = src_children;
            children.append(&mut d.children);
            d.children = children;
        }
    }
    adopt_all(dst);
    if aug {
        d.size += src_size;
    }
    (dst, src)
}

/// [`fuse`] with the key-order precondition enforced: the splitter must not be
/// below any key of `left` and must be below every key of `right`.
#[cfg(test)]
pub(crate) unsafe fn fuse_checked<K: Copy + Ord + std::fmt::Debug>(
    left: Link<K>,
    right: Link<K>,
    splitter: K,
    aug: bool,
) -> Result<Link<K>> {
    if rank(left) != rank(right) {
        return Err(TreeError::InvalidNode(
            "fuse of nodes with different ranks".into(),
        ));
    }
    let lmax = subtree_max(left);
    let rmin = subtree_min(right);
    if lmax.is_some_and(|m| m > splitter) || rmin.is_some_and(|m| m <= splitter) {
        return Err(TreeError::OrderViolation(format!(
            "splitter {splitter:?} not between {lmax:?} and {rmin:?}"
        )));
    }
    Ok(fuse(left, right, splitter, Keep::Left, aug))
}

/// Inserts `child` next to `anchor` inside `parent` with `splitter` as the
/// router between them; `on_right` places it after `anchor`.
pub(crate) unsafe fn insert_beside<K>(
    parent: Link<K>,
    anchor: Link<K>,
    child: Link<K>,
    splitter: K,
    on_right: bool,
) {
    let pos = child_index(parent, anchor);
    let p = &mut *parent.as_ptr();
    if on_right {
        p.children.insert(pos + 1, child);
        p.keys.insert(pos, splitter);
    } else {
        p.children.insert(pos, child);
        p.keys.insert(pos, splitter);
    }
    (*child.as_ptr()).parent = Some(parent);
}

/// Smallest element below `n` (leftmost leaf).
pub(crate) unsafe fn subtree_min<K: Copy>(mut n: Link<K>) -> Option<K> {
    while !is_leaf(n) {
        n = (&(*n.as_ptr()).children)[0];
    }
    (*n.as_ptr()).keys.first().copied()
}

/// Largest element below `n` (rightmost leaf).
pub(crate) unsafe fn subtree_max<K: Copy>(mut n: Link<K>) -> Option<K> {
    while !is_leaf(n) {
        n = *(*n.as_ptr()).children.last().unwrap();
    }
    (*n.as_ptr()).keys.last().copied()
}

/// Deep copy of a subtree; parent of the copy is `None`.
pub(crate) unsafe fn clone_subtree<K: Copy>(n: Link<K>) -> Link<K> {
    let src = &*n.as_ptr();
    let copy = if src.rank == 1 {
        new_leaf(src.keys.clone())
    } else {
        let children = src.children.iter().map(|&c| clone_subtree(c)).collect();
        new_internal(src.keys.clone(), children, false)
    };
    (*copy.as_ptr()).size = src.size;
    copy
}

/// Recomputes subtree sizes of every node in `touched` and of all their
/// ancestors, lowest rank first. Nodes below the touched set must already be
/// correct.
pub(crate) unsafe fn repair_sizes<K>(touched: &[Link<K>]) {
    for level in dirty_levels(touched) {
        for n in level {
            recompute_size(n);
            (*n.as_ptr()).dirty = false;
        }
    }
}

/// Marks `touched` and their ancestors dirty and groups them by rank,
/// lowest first. Stops each upward walk at the first already dirty node.
pub(crate) unsafe fn dirty_levels<K>(touched: &[Link<K>]) -> Vec<Vec<Link<K>>> {
    let mut levels: Vec<Vec<Link<K>>> = Vec::new();
    for &t in touched {
        let mut cur = Some(t);
        while let Some(c) = cur {
            let nd = &mut *c.as_ptr();
            if nd.dirty {
                break;
            }
            nd.dirty = true;
            let r = nd.rank as usize;
            if levels.len() < r {
                levels.resize_with(r, Vec::new);
            }
            levels[r - 1].push(c);
            cur = nd.parent;
        }
    }
    levels
}
