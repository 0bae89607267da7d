use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::TreeError;
use crate::node::{self, Keep, Link, SendLink};
use crate::workers::Workers;
use crate::Result;

/// Element type stored in a tree.
pub trait Key: Ord + Copy + Debug + Send + Sync + 'static {}

impl<T: Ord + Copy + Debug + Send + Sync + 'static> Key for T {}

/// Degree bounds of a weak (a,b)-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    a: usize,
    b: usize,
}

impl Params {
    /// Requires `a >= 2` and `b >= 2a`.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a < 2 || b < 2 * a {
            return Err(TreeError::InvalidParams { a, b });
        }
        Ok(Params { a, b })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of nodes to use for `n` items on one level when building from a
    /// sorted run. Aims for a fill of `(a+b)/2` while keeping every node in
    /// `[a, b]`.
    pub(crate) fn groups_for(&self, n: usize) -> usize {
        if n <= self.b {
            // a single node is legal here; two only if both halves reach a
            let fill = (self.a + self.b) / 2;
            return if n > fill && n >= 2 * self.a { 2 } else { 1 };
        }
        let fill = (self.a + self.b) / 2;
        let lo = n.div_ceil(self.b);
        let hi = (n / self.a).max(1);
        n.div_ceil(fill).clamp(lo, hi)
    }
}

impl Default for Params {
    fn default() -> Self {
        Params { a: 4, b: 8 }
    }
}

/// A weak (a,b)-tree over a duplicate-free set of keys. Elements live in the
/// leaves; internal nodes hold routers.
pub struct ABTree<K> {
    pub(crate) params: Params,
    pub(crate) root: Option<Link<K>>,
    pub(crate) len: usize,
    /// Whether per-node subtree sizes are maintained.
    pub(crate) augmented: bool,
    /// Cached `(min, max)`; `None` iff empty.
    pub(crate) bounds: Option<(K, K)>,
}

// Nodes are owned exclusively by the tree; moving the tree moves the nodes.
unsafe impl<K: Send> Send for ABTree<K> {}
unsafe impl<K: Sync> Sync for ABTree<K> {}

impl<K> Drop for ABTree<K> {
    fn drop(&mut self) {
        if let Some(r) = self.root.take() {
            unsafe { node::free_subtree(r) }
        }
    }
}

impl<K: Key> Clone for ABTree<K> {
    fn clone(&self) -> Self {
        ABTree {
            params: self.params,
            root: self.root.map(|r| unsafe { node::clone_subtree(r) }),
            len: self.len,
            augmented: self.augmented,
            bounds: self.bounds,
        }
    }
}

impl<K: Key> Debug for ABTree<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ABTree")
            .field("params", &self.params)
            .field("len", &self.len)
            .field("rank", &self.rank())
            .field("augmented", &self.augmented)
            .finish()
    }
}

impl<K: Key> Default for ABTree<K> {
    fn default() -> Self {
        ABTree::new(Params::default())
    }
}

impl<K: Key> ABTree<K> {
    /// Empty tree with subtree sizes enabled.
    pub fn new(params: Params) -> Self {
        ABTree {
            params,
            root: None,
            len: 0,
            augmented: true,
            bounds: None,
        }
    }

    /// Builds a tree from a strictly ascending slice.
    pub fn from_sorted(params: Params, keys: &[K]) -> Result<Self> {
        Self::build_with(params, keys, &Workers::sequential())
    }

    pub(crate) fn build_with(params: Params, keys: &[K], workers: &Workers) -> Result<Self> {
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TreeError::NotSorted);
        }
        let mut t = ABTree::new(params);
        if keys.is_empty() {
            return Ok(t);
        }
        let chunks = |n: usize| -> Vec<(usize, usize)> {
            let g = params.groups_for(n);
            (0..g).map(|i| (i * n / g, (i + 1) * n / g)).collect()
        };
        let leaves: Vec<SendLink<K>> = workers.map(chunks(keys.len()), |(s, e)| {
            SendLink(node::new_leaf(keys[s..e].to_vec()))
        });
        let mut level = leaves;
        while level.len() > 1 {
            let lower = &level;
            let next: Vec<SendLink<K>> = workers.map(chunks(lower.len()), |(s, e)| unsafe {
                let kids: Vec<Link<K>> = lower[s..e].iter().map(|l| l.0).collect();
                let routers = kids[..kids.len() - 1]
                    .iter()
                    .map(|&c| node::subtree_max(c).expect("nonempty child"))
                    .collect();
                SendLink(node::new_internal(routers, kids, true))
            });
            level = next;
        }
        t.root = Some(level[0].0);
        t.len = keys.len();
        t.bounds = Some((keys[0], keys[keys.len() - 1]));
        Ok(t)
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of nodes on a root-to-leaf path; 0 for the empty tree.
    pub fn rank(&self) -> u32 {
        self.root.map_or(0, |r| unsafe { node::rank(r) })
    }

    pub fn has_sizes(&self) -> bool {
        self.augmented
    }

    /// Turns on subtree-size maintenance, recomputing every size.
    pub fn enable_sizes(&mut self) {
        if !self.augmented {
            if let Some(r) = self.root {
                unsafe { recompute_all_sizes(r) };
            }
            self.augmented = true;
        }
    }

    /// Stops maintaining sizes; stored sizes become meaningless.
    pub fn disable_sizes(&mut self) {
        self.augmented = false;
    }

    pub fn min(&self) -> Option<K> {
        self.bounds.map(|b| b.0)
    }

    pub fn max(&self) -> Option<K> {
        self.bounds.map(|b| b.1)
    }

    pub fn contains(&self, x: &K) -> bool {
        self.search(x).is_some()
    }

    pub fn search(&self, x: &K) -> Option<K> {
        let leaf = self.leaf_for(x)?;
        let keys = unsafe { &(*leaf.as_ptr()).keys };
        keys.binary_search(x).ok().map(|i| keys[i])
    }

    fn leaf_for(&self, x: &K) -> Option<Link<K>> {
        let mut n = self.root?;
        unsafe {
            while !node::is_leaf(n) {
                let nd = &*n.as_ptr();
                n = nd.children[node::route(&nd.keys, x)];
            }
        }
        Some(n)
    }

    /// Inserts `x`; returns `false` if it was already present.
    pub fn insert(&mut self, x: K) -> bool {
        let Some(root) = self.root else {
            self.root = Some(node::new_leaf(vec![x]));
            self.len = 1;
            self.bounds = Some((x, x));
            return true;
        };
        let leaf = self.leaf_for(&x).unwrap_or(root);
        unsafe {
            let keys = &mut (*leaf.as_ptr()).keys;
            let pos = match keys.binary_search(&x) {
                Ok(_) => return false,
                Err(p) => p,
            };
            keys.insert(pos, x);
            if self.augmented {
                let mut cur = Some(leaf);
                while let Some(c) = cur {
                    (*c.as_ptr()).size += 1;
                    cur = node::parent(c);
                }
            }
            self.fix_overflow(leaf);
        }
        self.len += 1;
        let (lo, hi) = self.bounds.expect("nonempty");
        self.bounds = Some((lo.min(x), hi.max(x)));
        true
    }

    /// Splits `n` and its ancestors while they exceed `b`.
    pub(crate) unsafe fn fix_overflow(&mut self, mut n: Link<K>) {
        let aug = self.augmented;
        while node::degree(n) > self.params.b {
            let (l, r, s) = node::split_node(n, Keep::Left, aug).expect("degree > b >= 2");
            match node::parent(n) {
                Some(p) => {
                    node::insert_beside(p, l, r, s, true);
                    n = p;
                }
                None => {
                    self.root = Some(node::new_internal(vec![s], vec![l, r], aug));
                    return;
                }
            }
        }
    }

    /// Removes `x`; returns `false` if it was absent.
    pub fn delete(&mut self, x: &K) -> bool {
        let Some(leaf) = self.leaf_for(x) else {
            return false;
        };
        unsafe {
            let keys = &mut (*leaf.as_ptr()).keys;
            match keys.binary_search(x) {
                Ok(i) => {
                    keys.remove(i);
                }
                Err(_) => return false,
            }
            if self.augmented {
                let mut cur = Some(leaf);
                while let Some(c) = cur {
                    (*c.as_ptr()).size -= 1;
                    cur = node::parent(c);
                }
            }
            self.fix_underflow(leaf);
        }
        self.len -= 1;
        self.refresh_bounds_after_delete(x);
        true
    }

    fn refresh_bounds_after_delete(&mut self, x: &K) {
        match self.bounds {
            Some((lo, hi)) if self.len > 0 && (*x == lo || *x == hi) => self.recompute_bounds(),
            _ if self.len == 0 => self.bounds = None,
            _ => {}
        }
    }

    pub(crate) fn recompute_bounds(&mut self) {
        self.bounds = self
            .root
            .and_then(|r| unsafe { Some((node::subtree_min(r)?, node::subtree_max(r)?)) });
    }

    /// Restores the lower degree bound from `n` upward by borrowing from or
    /// fusing with a sibling, then collapses a degree-1 root.
    pub(crate) unsafe fn fix_underflow(&mut self, mut n: Link<K>) {
        let a = self.params.a;
        let aug = self.augmented;
        while let Some(p) = node::parent(n) {
            if node::degree(n) >= a {
                break;
            }
            let i = node::child_index(p, n);
            let pn = &mut *p.as_ptr();
            let (li, left, right) = if i > 0 {
                (i - 1, pn.children[i - 1], n)
            } else {
                (i, n, pn.children[i + 1])
            };
            let sib = if left == n { right } else { left };
            if node::degree(sib) > a {
                borrow(p, li, left, right, sib == left, aug);
                break;
            }
            let splitter = pn.keys.remove(li);
            pn.children.remove(li + 1);
            node::fuse(left, right, splitter, Keep::Left, aug);
            n = p;
        }
        self.collapse_root();
    }

    pub(crate) unsafe fn collapse_root(&mut self) {
        while let Some(r) = self.root {
            let rn = &mut *r.as_ptr();
            if rn.rank > 1 && rn.children.len() == 1 {
                let c = rn.children[0];
                (*c.as_ptr()).parent = None;
                rn.children.clear();
                node::free_node(r);
                self.root = Some(c);
            } else if rn.rank == 1 && rn.keys.is_empty() {
                node::free_node(r);
                self.root = None;
            } else {
                break;
            }
        }
    }

    /// The `i`-th smallest element, 1-based. Needs subtree sizes.
    pub fn select_ith(&self, i: usize) -> Result<K> {
        if !self.augmented {
            return Err(TreeError::NotAugmented);
        }
        if i == 0 || i > self.len {
            return Err(TreeError::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        let mut rem = i - 1;
        let mut n = self.root.expect("nonempty");
        unsafe {
            while !node::is_leaf(n) {
                let mut next = None;
                for &c in &(*n.as_ptr()).children {
                    let s = node::size(c);
                    if rem < s {
                        next = Some(c);
                        break;
                    }
                    rem -= s;
                }
                n =
                    next.ok_or_else(|| TreeError::InvalidNode("subtree sizes out of date".into()))?;
            }
            Ok((&(*n.as_ptr()).keys)[rem])
        }
    }

    /// Number of elements `<= x`. Needs subtree sizes.
    pub fn count_le(&self, x: &K) -> Result<usize> {
        if !self.augmented {
            return Err(TreeError::NotAugmented);
        }
        let Some(mut n) = self.root else { return Ok(0) };
        let mut acc = 0;
        unsafe {
            while !node::is_leaf(n) {
                let nd = &*n.as_ptr();
                let ci = node::route(&nd.keys, x);
                acc += nd.children[..ci]
                    .iter()
                    .map(|&c| node::size(c))
                    .sum::<usize>();
                n = nd.children[ci];
            }
            acc += (*n.as_ptr()).keys.partition_point(|k| k <= x);
        }
        Ok(acc)
    }

    /// All elements in ascending order.
    pub fn to_vec(&self) -> Vec<K> {
        let mut out = Vec::with_capacity(self.len);
        if let Some(r) = self.root {
            unsafe { collect_into(r, &mut out) };
        }
        out
    }

    /// Detaches the nodes, leaving an empty tree with the same parameters.
    pub(crate) fn take_root(&mut self) -> Option<Link<K>> {
        self.len = 0;
        self.bounds = None;
        self.root.take()
    }

    /// Wraps an owned subtree into a tree, recounting what it cannot trust.
    pub(crate) unsafe fn from_root(
        params: Params,
        root: Option<Link<K>>,
        augmented: bool,
        len: Option<usize>,
    ) -> Self {
        let mut t = ABTree {
            params,
            root,
            len: 0,
            augmented,
            bounds: None,
        };
        if let Some(r) = root {
            (*r.as_ptr()).parent = None;
            t.len = match len {
                Some(l) => l,
                None if augmented => node::size(r),
                None => count_elements(r),
            };
        }
        t.recompute_bounds();
        t
    }
}

pub(crate) unsafe fn collect_into<K: Copy>(n: Link<K>, out: &mut Vec<K>) {
    let nd = &*n.as_ptr();
    if nd.rank == 1 {
        out.extend_from_slice(&nd.keys);
    } else {
        for &c in &nd.children {
            collect_into(c, out);
        }
    }
}

pub(crate) unsafe fn count_elements<K>(n: Link<K>) -> usize {
    let nd = &*n.as_ptr();
    if nd.rank == 1 {
        nd.keys.len()
    } else {
        nd.children.iter().map(|&c| count_elements(c)).sum()
    }
}

pub(crate) unsafe fn recompute_all_sizes<K>(n: Link<K>) -> usize {
    let nd = &mut *n.as_ptr();
    nd.size = if nd.rank == 1 {
        nd.keys.len()
    } else {
        nd.children.iter().map(|&c| recompute_all_sizes(c)).sum()
    };
    nd.size
}

/// Moves one child (or element) between adjacent siblings `left` and
/// `right` under `p`, where `li` is the router between them.
pub(crate) unsafe fn borrow<K: Copy>(
    p: Link<K>,
    li: usize,
    left: Link<K>,
    right: Link<K>,
    from_left: bool,
    aug: bool,
) {
    let pn = &mut *p.as_ptr();
    let l = &mut *left.as_ptr();
    let r = &mut *right.as_ptr();
    if l.rank == 1 {
        if from_left {
            let k = l.keys.pop().unwrap();
            r.keys.insert(0, k);
            pn.keys[li] = *l.keys.last().unwrap();
        } else {
            let k = r.keys.remove(0);
            l.keys.push(k);
            pn.keys[li] = k;
        }
        if aug {
            l.size = l.keys.len();
            r.size = r.keys.len();
        }
        return;
    }
    let moved = if from_left {
        let c = l.children.pop().unwrap();
        r.children.insert(0, c);
        r.keys.insert(0, pn.keys[li]);
        pn.keys[li] = l.keys.pop().unwrap();
        (*c.as_ptr()).parent = Some(right);
        c
    } else {
        let c = r.children.remove(0);
        l.children.push(c);
        l.keys.push(pn.keys[li]);
        pn.keys[li] = r.keys.remove(0);
        (*c.as_ptr()).parent = Some(left);
        c
    };
    if aug {
        let s = node::size(moved);
        if from_left {
            l.size -= s;
            r.size += s;
        } else {
            l.size += s;
            r.size -= s;
        }
    }
}
