//! Trees prepared for constant-time joins.
//!
//! Preparation splits every spine node of degree `b` and records both spines
//! in [`SpineStack`]s. A prepared join then finds the host spine node of the
//! guest's rank without walking, hangs or fuses the guest root there and
//! stacks the guest's spine arrays on the host's.
//!
//! Structural work during joins runs with sizes off. Every node whose child
//! list changes is saved, and sizes are repaired once in
//! [`PreparedTree::finish`]. Nodes emptied by a fuse stay allocated until then
//! so saved pointers never dangle.

use std::mem;

use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::node::{self, Keep, Link, SendLink};
use crate::spine::{Side, SpineStack};
use crate::tree::{ABTree, Key, Params};
use crate::Result;

fn ix(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

fn opposite(side: Side) -> Side {
    match side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    }
}

/// The half of a split that stays on the `side` spine.
fn keep_on(side: Side) -> Keep {
    match side {
        Side::Left => Keep::Left,
        Side::Right => Keep::Right,
    }
}

unsafe fn outer<K>(n: Link<K>, side: Side) -> Link<K> {
    let c = &(*n.as_ptr()).children;
    match side {
        Side::Left => c[0],
        Side::Right => c[c.len() - 1],
    }
}

/// Spine nodes from the leaf (rank 1) up to `root`.
unsafe fn spine_walk<K>(root: Link<K>, side: Side) -> Vec<SendLink<K>> {
    let mut v = Vec::with_capacity(node::rank(root) as usize);
    let mut n = root;
    loop {
        v.push(SendLink(n));
        if node::is_leaf(n) {
            break;
        }
        n = outer(n, side);
    }
    v.reverse();
    v
}

/// Splits `y` so the original stays on the `side` spine. Returns the new
/// inward sibling and the splitter.
unsafe fn split_keep<K: Copy>(y: Link<K>, side: Side) -> (Link<K>, K) {
    let (l, r, s) = node::split_node(y, keep_on(side), false).expect("node of degree >= 2");
    (if side == Side::Right { l } else { r }, s)
}

unsafe fn hang_inward<K>(p: Link<K>, y: Link<K>, x: Link<K>, s: K, side: Side) {
    node::insert_beside(p, y, x, s, side == Side::Left);
}

pub(crate) struct ChainSplit<K> {
    pub(crate) new_root: Option<Link<K>>,
    pub(crate) splitters: Vec<K>,
    /// Topmost chain member (still on the spine) and its new inward sibling.
    pub(crate) top: Link<K>,
    pub(crate) top_inward: Link<K>,
}

/// Splits `bottom` and every consecutive degree-`b` ancestor. All members are
/// split first, with the original keeping its outer child, then each new
/// sibling is hung into the parent. Sizes are not maintained; every node whose
/// children changed lands in `touched`.
pub(crate) unsafe fn split_chain<K: Copy>(
    b: usize,
    bottom: Link<K>,
    side: Side,
    counters: &WorkCounters,
    touched: &mut Vec<Link<K>>,
) -> ChainSplit<K> {
    let mut chain = vec![bottom];
    while let Some(p) = node::parent(*chain.last().unwrap()) {
        if node::degree(p) != b {
            break;
        }
        chain.push(p);
    }
    let halves: Vec<(Link<K>, K)> = chain.iter().map(|&y| split_keep(y, side)).collect();
    counters.add_degree_b_splits(chain.len() as u64);
    counters.add_node_splits(chain.len() as u64);
    let mut new_root = None;
    for (&y, &(x, s)) in chain.iter().zip(&halves) {
        touched.push(x);
        touched.push(y);
        match node::parent(y) {
            Some(p) => {
                hang_inward(p, y, x, s, side);
                touched.push(p);
            }
            None => {
                let kids = if side == Side::Right {
                    vec![x, y]
                } else {
                    vec![y, x]
                };
                let r = node::new_internal(vec![s], kids, false);
                touched.push(r);
                new_root = Some(r);
            }
        }
    }
    ChainSplit {
        new_root,
        splitters: halves.iter().map(|&(_, s)| s).collect(),
        top: *chain.last().unwrap(),
        top_inward: halves.last().unwrap().0,
    }
}

impl<K: Key> ABTree<K> {
    /// Splits spine nodes bottom-up until neither spine holds a node of
    /// degree `b`. Returns the number of splits.
    pub fn preprocess_spines(&mut self, counters: &WorkCounters) -> usize {
        let b = self.params.b();
        let aug = self.augmented;
        let mut splits = 0;
        for side in [Side::Right, Side::Left] {
            let Some(root) = self.root else { return 0 };
            unsafe {
                for y in spine_walk(root, side) {
                    let y = y.get();
                    if node::degree(y) < b {
                        continue;
                    }
                    splits += 1;
                    let (l, r, s) = node::split_node(y, keep_on(side), aug).expect("degree >= b");
                    match node::parent(y) {
                        Some(p) => {
                            let x = if side == Side::Right { l } else { r };
                            hang_inward(p, y, x, s, side);
                        }
                        None => self.root = Some(node::new_internal(vec![s], vec![l, r], aug)),
                    }
                }
            }
        }
        counters.add_preprocess_splits(splits as u64);
        counters.add_node_splits(splits as u64);
        splits
    }

    /// Degrees of the spine nodes from the leaf up to the root.
    pub fn spine_degrees(&self, side: Side) -> Vec<usize> {
        match self.root {
            None => Vec::new(),
            Some(r) => unsafe {
                spine_walk(r, side)
                    .iter()
                    .map(|n| node::degree(n.get()))
                    .collect()
            },
        }
    }

    /// Splits the run of degree-`b` nodes on the `side` spine that starts at
    /// `rank` and continues through consecutive degree-`b` ancestors. Spine
    /// nodes stay on the spine and keep their outer child; each new sibling
    /// is hung into the parent. Returns the splitters inserted, bottom-up.
    /// A node of degree below `b` at `rank` is an empty chain.
    pub fn split_b_chain(
        &mut self,
        side: Side,
        rank: u32,
        counters: &WorkCounters,
    ) -> Result<Vec<K>> {
        let top = self.rank();
        let Some(root) = self.root.filter(|_| (1..=top).contains(&rank)) else {
            return Err(TreeError::RankOutOfCoverage {
                rank,
                lo: 1,
                hi: top,
            });
        };
        unsafe {
            let y = spine_walk(root, side)[rank as usize - 1].get();
            if node::degree(y) < self.params.b() {
                return Ok(Vec::new());
            }
            let mut touched = Vec::new();
            let cs = split_chain(self.params.b(), y, side, counters, &mut touched);
            if let Some(r) = cs.new_root {
                self.root = Some(r);
            }
            if self.augmented {
                node::repair_sizes(&touched);
            }
            Ok(cs.splitters)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Split degree-`b` chains when a full parent must take a child.
    Chain,
    /// Take the rank-equal node out of a full parent instead.
    Steal,
}

pub(crate) enum Joined<K: Key> {
    One(PreparedTree<K>),
    /// A steal leaves two trees, in key order.
    Two(PreparedTree<K>, PreparedTree<K>),
}

/// A tree whose spines hold no degree-`b` nodes, together with rank-indexed
/// spine stacks for both sides.
pub struct PreparedTree<K: Key> {
    tree: ABTree<K>,
    /// Unknown after a steal moved a subtree between trees.
    len: Option<usize>,
    lo: Option<K>,
    /// At least every key here and below every key of the right neighbour.
    fence: Option<K>,
    stacks: [SpineStack<SendLink<K>>; 2],
    /// A stale stack is rebuilt by a spine walk before its next use.
    stale: [bool; 2],
    /// Rank of the last tree joined onto each side.
    last_join: [u32; 2],
    saved: Vec<SendLink<K>>,
    graveyard: Vec<SendLink<K>>,
}

impl<K: Key> Drop for PreparedTree<K> {
    fn drop(&mut self) {
        for g in self.graveyard.drain(..) {
            unsafe { node::free_node(g.get()) }
        }
    }
}

impl<K: Key> std::fmt::Debug for PreparedTree<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PreparedTree")
            .field("rank", &self.rank())
            .field("len", &self.len)
            .field("left", &self.stacks[0].intervals())
            .field("right", &self.stacks[1].intervals())
            .finish()
    }
}

fn add_len(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    Some(a? + b?)
}

impl<K: Key> PreparedTree<K> {
    /// Preprocesses both spines and builds one stack entry per side.
    pub fn prepare(mut tree: ABTree<K>, counters: &WorkCounters) -> Self {
        tree.preprocess_spines(counters);
        let (lo, fence) = (tree.min(), tree.max());
        let stacks = match tree.root {
            Some(r) => unsafe {
                counters.add_stack_pushes(2);
                [
                    SpineStack::new(Side::Left, spine_walk(r, Side::Left)),
                    SpineStack::new(Side::Right, spine_walk(r, Side::Right)),
                ]
            },
            None => [
                SpineStack::new(Side::Left, Vec::new()),
                SpineStack::new(Side::Right, Vec::new()),
            ],
        };
        PreparedTree {
            len: Some(tree.len),
            tree,
            lo,
            fence,
            stacks,
            stale: [false; 2],
            last_join: [0; 2],
            saved: Vec::new(),
            graveyard: Vec::new(),
        }
    }

    /// Wraps a subtree cut out of another tree; both stacks start stale.
    fn detached(params: Params, root: Link<K>, aug: bool, lo: Option<K>, fence: Option<K>) -> Self {
        let mut tree = ABTree::new(params);
        tree.root = Some(root);
        tree.augmented = aug;
        PreparedTree {
            tree,
            len: None,
            lo,
            fence,
            stacks: [
                SpineStack::new(Side::Left, Vec::new()),
                SpineStack::new(Side::Right, Vec::new()),
            ],
            stale: [true; 2],
            last_join: [0; 2],
            saved: Vec::new(),
            graveyard: Vec::new(),
        }
    }

    pub fn rank(&self) -> u32 {
        self.tree.rank()
    }

    pub fn params(&self) -> Params {
        self.tree.params
    }

    /// Element count, if known without a traversal.
    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.tree.root.is_none()
    }

    pub fn to_vec(&self) -> Vec<K> {
        self.tree.to_vec()
    }

    pub fn spine_degrees(&self, side: Side) -> Vec<usize> {
        self.tree.spine_degrees(side)
    }

    pub fn spine_intervals(&self, side: Side) -> Vec<(u32, u32)> {
        self.stacks[ix(side)].intervals()
    }

    /// Checks every in-interval slot of both stacks against a fresh spine
    /// walk, and that intervals are consecutive and end at the root.
    pub fn check_spines(&self) -> std::result::Result<(), String> {
        let Some(root) = self.tree.root else {
            return Ok(());
        };
        for side in [Side::Left, Side::Right] {
            if self.stale[ix(side)] {
                continue;
            }
            let walk = unsafe { spine_walk(root, side) };
            let st = &self.stacks[ix(side)];
            if st.top_rank() as usize != walk.len() {
                return Err(format!(
                    "{side:?} stack ends at {} but rank is {}",
                    st.top_rank(),
                    walk.len()
                ));
            }
            let iv = st.intervals();
            if iv.windows(2).any(|w| w[0].1 + 1 != w[1].0) {
                return Err(format!("{side:?} intervals not consecutive: {iv:?}"));
            }
            for e in st.entries() {
                for r in e.lo()..=e.hi() {
                    if e.slot(r) != Some(&walk[r as usize - 1]) {
                        return Err(format!(
                            "{side:?} slot {r} does not point at the spine node of rank {r}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Joins `right` onto `self` (all keys of `self` below those of `right`),
    /// splitting degree-`b` chains as needed.
    pub fn join(self, right: Self, counters: &WorkCounters) -> Result<Self> {
        check_order(&[&self, &right])?;
        match join_pair(self, right, Mode::Chain, counters) {
            Joined::One(t) => Ok(t),
            Joined::Two(..) => unreachable!("chain mode never steals"),
        }
    }

    /// Repairs sizes (if the inputs had them), frees fused-away nodes and
    /// returns the plain tree.
    pub fn finish(self) -> ABTree<K> {
        self.finish_with_len(None)
    }

    pub(crate) fn finish_with_len(mut self, len: Option<usize>) -> ABTree<K> {
        let params = self.tree.params;
        let aug = self.tree.augmented;
        let root = self.tree.take_root();
        unsafe {
            if aug && root.is_some() {
                let saved: Vec<Link<K>> = self.saved.drain(..).map(|s| s.get()).collect();
                node::repair_sizes(&saved);
            }
            for g in self.graveyard.drain(..) {
                node::free_node(g.get());
            }
            ABTree::from_root(params, root, aug, len.or(self.len))
        }
    }

    fn root(&self) -> Link<K> {
        self.tree.root.expect("nonempty prepared tree")
    }

    fn rebuild(&mut self, side: Side, counters: &WorkCounters) {
        let walk = unsafe { spine_walk(self.root(), side) };
        self.stacks[ix(side)] = SpineStack::new(side, walk);
        self.stale[ix(side)] = false;
        counters.add_stack_pushes(1);
        counters.add_spine_repairs(1);
    }

    unsafe fn spine_node(&mut self, side: Side, r: u32, counters: &WorkCounters) -> Link<K> {
        let st = &self.stacks[ix(side)];
        if self.stale[ix(side)] || r < st.floor() || r > st.top_rank() {
            self.rebuild(side, counters);
        }
        self.stacks[ix(side)]
            .get(r, counters)
            .expect("rank covered after rebuild")
            .get()
    }

    fn set_front(&mut self, side: Side, r: u32, n: Link<K>) {
        if !self.stale[ix(side)] {
            self.stacks[ix(side)].set_front_slot(r, SendLink(n));
        }
    }

    fn extend(&mut self, side: Side, n: Link<K>) {
        if !self.stale[ix(side)] {
            self.stacks[ix(side)].extend_top(SendLink(n));
        }
    }

    fn save(&mut self, nodes: &[Link<K>]) {
        self.saved.extend(nodes.iter().map(|&n| SendLink(n)));
    }

    /// Takes over the nodes and bookkeeping of `other`, which is left empty.
    fn absorb(&mut self, other: &mut Self) {
        self.saved.append(&mut other.saved);
        self.graveyard.append(&mut other.graveyard);
        self.tree.augmented &= other.tree.augmented;
        other.tree.take_root();
    }

    /// Splits a degree-`b` root under a new root.
    unsafe fn split_root(&mut self, counters: &WorkCounters) {
        let r = self.root();
        let rk = node::rank(r);
        let (l, rt, s) = node::split_node(r, Keep::Right, false).expect("root of degree b");
        let nr = node::new_internal(vec![s], vec![l, rt], false);
        self.tree.root = Some(nr);
        self.set_front(Side::Left, rk, l);
        self.extend(Side::Left, nr);
        self.extend(Side::Right, nr);
        self.save(&[l, rt, nr]);
        counters.add_degree_b_splits(1);
        counters.add_node_splits(1);
    }

    /// Splits the chain starting at `p` on the `side` spine. Returns 1 if the
    /// parent of the chain newly reached degree `b`.
    unsafe fn split_chain_at(&mut self, p: Link<K>, side: Side, counters: &WorkCounters) -> u64 {
        let b = self.tree.params.b();
        let mut touched = Vec::new();
        let cs = split_chain(b, p, side, counters, &mut touched);
        self.save(&touched);
        match cs.new_root {
            Some(nr) => {
                let rk = node::rank(cs.top);
                self.tree.root = Some(nr);
                self.extend(side, nr);
                self.set_front(opposite(side), rk, cs.top_inward);
                self.extend(opposite(side), nr);
                0
            }
            None => u64::from(node::degree(node::parent(cs.top).expect("chain below root")) == b),
        }
    }
}

fn check_order<K: Key>(trees: &[&PreparedTree<K>]) -> Result<()> {
    let mut prev: Option<&PreparedTree<K>> = None;
    for &t in trees.iter().filter(|t| !t.is_empty()) {
        if let Some(p) = prev {
            if p.params() != t.params() {
                return Err(TreeError::ParamsMismatch);
            }
            if p.fence >= t.lo {
                return Err(TreeError::Overlap);
            }
        }
        prev = Some(t);
    }
    Ok(())
}

/// Joins two prepared trees with `l` entirely below `r`.
pub(crate) fn join_pair<K: Key>(
    l: PreparedTree<K>,
    r: PreparedTree<K>,
    mode: Mode,
    counters: &WorkCounters,
) -> Joined<K> {
    if r.is_empty() {
        return Joined::One(l);
    }
    if l.is_empty() {
        return Joined::One(r);
    }
    counters.add_join_descent(1);
    counters.add_visited(1);
    unsafe {
        if l.rank() >= r.rank() {
            join_into(l, r, Side::Right, mode, counters)
        } else {
            join_into(r, l, Side::Left, mode, counters)
        }
    }
}

/// Joins guest `g` onto the `s` spine of host `h`, where `r(g) <= r(h)`.
unsafe fn join_into<K: Key>(
    mut h: PreparedTree<K>,
    mut g: PreparedTree<K>,
    s: Side,
    mode: Mode,
    counters: &WorkCounters,
) -> Joined<K> {
    let (a, b) = (h.tree.params.a(), h.tree.params.b());
    let si = ix(s);
    let rg0 = g.rank();
    if rg0 < h.last_join[si] {
        counters.add_rank_order_violations(1);
    }
    // a full guest root could merge with a chain on the host spine
    if rg0 < h.rank() && node::degree(g.root()) == b {
        g.split_root(counters);
    }
    let rg = g.rank();
    if rg == h.rank() {
        let mut out = if s == Side::Right {
            equal_join(h, g, false, counters)
        } else {
            equal_join(g, h, false, counters)
        };
        out.last_join[si] = out.last_join[si].max(rg0);
        return Joined::One(out);
    }
    let n = h.spine_node(s, rg, counters);
    let p = node::parent(n).expect("rank below root");
    let groot = g.root();
    let fuse = node::degree(n) < a || node::degree(groot) < a;
    let d = node::degree(n) + node::degree(groot);
    if mode == Mode::Steal && node::degree(p) == b && (!fuse || d > b) {
        return steal(h, g, s, n, p, rg0, counters);
    }
    let left_fence = if s == Side::Right { h.fence } else { g.fence }.expect("nonempty");
    let mut growth = 0;
    if fuse {
        counters.add_fuses(1);
        let (lft, rgt, keep) = if s == Side::Right {
            (n, groot, Keep::Left)
        } else {
            (groot, n, Keep::Right)
        };
        let (_, shell) = node::fuse_into(lft, rgt, left_fence, keep, false);
        h.graveyard.push(SendLink(shell));
        h.save(&[n]);
        g.set_front(s, rg, n);
        let dn = node::degree(n);
        if dn > b || (dn == b && node::degree(p) == b) {
            if node::degree(p) == b {
                growth += h.split_chain_at(p, s, counters);
            }
            let (x, sp) = split_keep(n, s);
            counters.add_degree_b_splits(1);
            counters.add_node_splits(1);
            let p = node::parent(n).expect("rank below root");
            hang_inward(p, n, x, sp, s);
            h.save(&[x, p]);
            growth += u64::from(node::degree(p) == b);
        } else {
            growth += u64::from(dn == b);
        }
    } else {
        if node::degree(p) == b {
            growth += h.split_chain_at(p, s, counters);
        }
        let p = node::parent(n).expect("rank below root");
        node::insert_beside(p, n, groot, left_fence, s == Side::Right);
        h.save(&[p]);
        growth += u64::from(node::degree(p) == b);
    }
    counters.record_chain_growth(growth);
    // ranks up to rg now resolve through the guest's spine
    if g.stale[si] {
        h.stale[si] = true;
    } else {
        let gs = mem::replace(&mut g.stacks[si], SpineStack::new(s, Vec::new()));
        h.stacks[si]
            .combine(gs, rg, counters)
            .expect("host stack popped to the guest rank");
    }
    h.last_join[si] = rg0;
    if s == Side::Right {
        h.fence = g.fence;
    } else {
        h.lo = g.lo;
    }
    h.len = add_len(h.len, g.len);
    h.absorb(&mut g);
    Joined::One(h)
}

/// Joins two trees of equal rank: fuse when either root is deficient
/// (splitting again if that overflows), otherwise hang both under a new root.
/// `keep_right` picks which root survives a fuse.
unsafe fn equal_join<K: Key>(
    mut l: PreparedTree<K>,
    mut r: PreparedTree<K>,
    keep_right: bool,
    counters: &WorkCounters,
) -> PreparedTree<K> {
    let (a, b) = (l.tree.params.a(), l.tree.params.b());
    let (lr, rr) = (l.root(), r.root());
    let rk = node::rank(lr);
    debug_assert_eq!(rk, node::rank(rr));
    let splitter = l.fence.expect("nonempty");
    let root;
    if node::degree(lr) < a || node::degree(rr) < a {
        counters.add_fuses(1);
        let keep = if keep_right { Keep::Right } else { Keep::Left };
        let (sv, shell) = node::fuse_into(lr, rr, splitter, keep, false);
        l.graveyard.push(SendLink(shell));
        l.save(&[sv]);
        if node::degree(sv) > b {
            counters.add_node_splits(1);
            let (x, y, sp) = node::split_node(sv, keep, false).expect("overfull node");
            root = node::new_internal(vec![sp], vec![x, y], false);
            l.set_front(Side::Left, rk, x);
            r.set_front(Side::Right, rk, y);
            l.save(&[x, y]);
        } else {
            l.set_front(Side::Left, rk, sv);
            r.set_front(Side::Right, rk, sv);
            counters.record_chain_growth(u64::from(node::degree(sv) == b));
            root = sv;
        }
    } else {
        root = node::new_internal(vec![splitter], vec![lr, rr], false);
    }
    if node::rank(root) > rk {
        l.extend(Side::Left, root);
        r.extend(Side::Right, root);
    }
    l.save(&[root]);
    l.tree.root = Some(root);
    l.stacks[1] = mem::replace(&mut r.stacks[1], SpineStack::new(Side::Right, Vec::new()));
    l.stale[1] = r.stale[1];
    l.last_join[1] = r.last_join[1];
    l.fence = r.fence;
    l.len = add_len(l.len, r.len);
    l.absorb(&mut r);
    l
}

/// Takes `n` (rank `r(g)`) out of its full parent `p` on the host spine and
/// joins it with `g` into a separate tree.
unsafe fn steal<K: Key>(
    mut h: PreparedTree<K>,
    g: PreparedTree<K>,
    s: Side,
    n: Link<K>,
    p: Link<K>,
    rg0: u32,
    counters: &WorkCounters,
) -> Joined<K> {
    counters.add_steals(1);
    let si = ix(s);
    let rg = node::rank(n);
    let pn = &mut *p.as_ptr();
    let removed = match s {
        Side::Right => {
            pn.children.pop();
            pn.keys.pop().expect("internal parent")
        }
        Side::Left => {
            pn.children.remove(0);
            pn.keys.remove(0)
        }
    };
    (*n.as_ptr()).parent = None;
    h.save(&[p]);
    let c = outer(p, s);
    if !h.stale[si] {
        h.stacks[si].set_back_slot(rg, SendLink(c));
        h.stacks[si].raise_floor(rg);
    }
    h.last_join[si] = rg0;
    h.len = None;
    let (params, aug) = (h.tree.params, h.tree.augmented);
    match s {
        Side::Right => {
            let stolen = PreparedTree::detached(params, n, aug, node::subtree_min(n), h.fence);
            h.fence = Some(removed);
            let gp = equal_join(stolen, g, true, counters);
            Joined::Two(h, gp)
        }
        Side::Left => {
            let stolen = PreparedTree::detached(params, n, aug, None, Some(removed));
            h.lo = node::subtree_min(c);
            let gp = equal_join(g, stolen, false, counters);
            Joined::Two(gp, h)
        }
    }
}

/// Joins prepared trees left to right, using the spine stacks for rank
/// access and splitting degree-`b` chains on the way.
pub fn join_many_seq<K: Key>(
    trees: Vec<PreparedTree<K>>,
    counters: &WorkCounters,
) -> Result<ABTree<K>> {
    let params = trees.first().map(|t| t.params()).unwrap_or_default();
    match join_many_prepared(trees, counters)? {
        Some(t) => Ok(t.finish()),
        None => Ok(ABTree::new(params)),
    }
}

pub(crate) fn join_many_prepared<K: Key>(
    trees: Vec<PreparedTree<K>>,
    counters: &WorkCounters,
) -> Result<Option<PreparedTree<K>>> {
    check_order(&trees.iter().collect::<Vec<_>>())?;
    let mut it = trees.into_iter();
    let Some(mut acc) = it.next() else {
        return Ok(None);
    };
    for t in it {
        acc = match join_pair(acc, t, Mode::Chain, counters) {
            Joined::One(t) => t,
            Joined::Two(..) => unreachable!("chain mode never steals"),
        };
    }
    Ok(Some(acc))
}
