//! Rank-indexed access to spine nodes across a sequence of joins.
//!
//! Each entry pairs an array indexed by rank with the interval of ranks for
//! which that array is authoritative. Intervals are disjoint and consecutive;
//! the bottom of the stack holds the highest ranks (the root end of the
//! spine) and the top the lowest ones, which is where a join with a shorter
//! tree stacks that tree's arrays. A linked list makes combining two stacks
//! O(1).

use std::collections::LinkedList;

use serde::Serialize;

use crate::counters::WorkCounters;
use crate::error::TreeError;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct SpineEntry<S> {
    /// `slots[r - 1]` is the spine node of rank `r`, valid for `r` in
    /// `[lo, hi]`.
    slots: Vec<S>,
    lo: u32,
    hi: u32,
}

impl<S> SpineEntry<S> {
    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn hi(&self) -> u32 {
        self.hi
    }

    pub fn contains(&self, r: u32) -> bool {
        self.lo <= r && r <= self.hi
    }

    /// Slot for rank `r` if it lies in this entry's interval.
    pub fn slot(&self, r: u32) -> Option<&S> {
        if self.contains(r) {
            self.slots.get(r as usize - 1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpineStack<S> {
    side: Side,
    /// Front is the bottom of the stack (highest ranks), back is the top.
    entries: LinkedList<SpineEntry<S>>,
}

impl<S: Clone> SpineStack<S> {
    /// Single entry covering `[1, slots.len()]`; `slots[i]` is the node of
    /// rank `i + 1`.
    pub fn new(side: Side, slots: Vec<S>) -> Self {
        let hi = slots.len() as u32;
        let mut entries = LinkedList::new();
        if hi > 0 {
            entries.push_back(SpineEntry { slots, lo: 1, hi });
        }
        SpineStack { side, entries }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Highest covered rank (the root), 0 when empty.
    pub fn top_rank(&self) -> u32 {
        self.entries.front().map_or(0, |e| e.hi)
    }

    /// Lowest covered rank, 0 when empty.
    pub fn floor(&self) -> u32 {
        self.entries.back().map_or(0, |e| e.lo)
    }

    /// Intervals in ascending rank order.
    pub fn intervals(&self) -> Vec<(u32, u32)> {
        self.entries.iter().rev().map(|e| (e.lo, e.hi)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &SpineEntry<S>> {
        self.entries.iter()
    }

    /// Pops entries lying entirely below `target` until the top entry holds
    /// it. Each removed entry counts as one pop.
    pub fn pop_to(&mut self, target: u32, counters: &WorkCounters) -> Result<&SpineEntry<S>> {
        let (lo, hi) = (self.floor(), self.top_rank());
        if self.entries.is_empty() || target < lo || target > hi {
            return Err(TreeError::RankOutOfCoverage {
                rank: target,
                lo,
                hi,
            });
        }
        while self.entries.back().is_some_and(|e| e.hi < target) {
            self.entries.pop_back();
            counters.add_stack_pops(1);
        }
        Ok(self.entries.back().expect("target within coverage"))
    }

    /// The spine node of rank `r`. Pops everything below `r`.
    pub fn get(&mut self, r: u32, counters: &WorkCounters) -> Result<S> {
        let e = self.pop_to(r, counters)?;
        Ok(e.slots[r as usize - 1].clone())
    }

    /// Non-destructive lookup.
    pub fn peek(&self, r: u32) -> Option<&S> {
        self.entries.iter().find_map(|e| e.slot(r))
    }

    /// Stacks `other` (covering ranks up to `v_rank`) on top of `self` after
    /// [`pop_to`](Self::pop_to)`(v_rank)`. The top entry of `self` shrinks to
    /// `(v_rank, hi]` and is dropped, as a pop, if that is empty.
    pub fn combine(
        &mut self,
        mut other: SpineStack<S>,
        v_rank: u32,
        counters: &WorkCounters,
    ) -> Result<()> {
        if other.top_rank() != v_rank {
            return Err(TreeError::RankOutOfCoverage {
                rank: v_rank,
                lo: other.floor(),
                hi: other.top_rank(),
            });
        }
        if let Some(back) = self.entries.back_mut() {
            if v_rank + 1 < back.lo || v_rank > back.hi {
                return Err(TreeError::RankOutOfCoverage {
                    rank: v_rank,
                    lo: back.lo,
                    hi: back.hi,
                });
            }
            back.lo = back.lo.max(v_rank + 1);
            if back.lo > back.hi {
                self.entries.pop_back();
                counters.add_stack_pops(1);
            }
        }
        counters.add_stack_pushes(other.entries.len() as u64);
        counters.add_stack_combines(1);
        self.entries.append(&mut other.entries);
        Ok(())
    }

    /// Overwrites the slot of rank `r` in the bottom entry (the root end).
    pub(crate) fn set_front_slot(&mut self, r: u32, s: S) {
        let e = self.entries.front_mut().expect("nonempty stack");
        debug_assert!(e.contains(r));
        e.slots[r as usize - 1] = s;
    }

    /// Overwrites the slot of rank `r` in the top entry (the leaf end).
    pub(crate) fn set_back_slot(&mut self, r: u32, s: S) {
        let e = self.entries.back_mut().expect("nonempty stack");
        debug_assert!(e.contains(r));
        e.slots[r as usize - 1] = s;
    }

    /// Drops coverage below `r` in the top entry.
    pub(crate) fn raise_floor(&mut self, r: u32) {
        let e = self.entries.back_mut().expect("nonempty stack");
        e.lo = e.lo.max(r);
    }

    /// Adds a new highest rank (a new root).
    pub(crate) fn extend_top(&mut self, s: S) {
        let e = self.entries.front_mut().expect("nonempty stack");
        debug_assert_eq!(e.slots.len() as u32, e.hi);
        e.slots.push(s);
        e.hi += 1;
    }
}
