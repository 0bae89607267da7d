//! Browser bindings: two trees A and B, with bulk updates, split and set
//! operations. Every call returns the new state as JSON.

use abtree::{
    bulk_update_with_report, set_difference, set_intersection, set_symmetric_difference, set_union,
    split_at, ABTree, BulkOptions, CounterSnapshot, Params, Strategy, TreeLayout, UpdateBatch,
    UpdateKind, WorkCounters, Workers,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct TreeView {
    len: usize,
    rank: u32,
    layout: Option<TreeLayout<u32>>,
}

#[derive(Serialize)]
struct Counters {
    visited: u64,
    node_splits: u64,
    fuses: u64,
    join_descent: u64,
    degree_b_splits: u64,
}

impl From<CounterSnapshot> for Counters {
    fn from(s: CounterSnapshot) -> Self {
        Counters {
            visited: s.visited,
            node_splits: s.node_splits,
            fuses: s.fuses,
            join_descent: s.join_descent,
            degree_b_splits: s.degree_b_splits,
        }
    }
}

#[derive(Serialize)]
struct View<'a> {
    a: TreeView,
    b: TreeView,
    message: &'a str,
    counters: Counters,
}

fn view_of(t: &ABTree<u32>) -> TreeView {
    TreeView {
        len: t.len(),
        rank: t.rank(),
        layout: t.to_layout(),
    }
}

/// Parses `3, 8 10..14` into sorted distinct keys; `lo..hi` is inclusive.
pub fn parse_keys(text: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let num = |s: &str| s.parse::<u32>().map_err(|_| format!("not a key: {s}"));
        match tok.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if hi < lo || hi - lo > 100_000 {
                    return Err(format!("bad range {tok}"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(tok)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Demo state without any JS types, so it also runs in native tests.
pub struct DemoCore {
    params: Params,
    a: ABTree<u32>,
    b: ABTree<u32>,
    workers: Workers,
}

impl DemoCore {
    pub fn new(a: usize, b: usize) -> Result<Self, String> {
        let params = Params::new(a, b).map_err(|e| e.to_string())?;
        Ok(DemoCore {
            params,
            a: ABTree::new(params),
            b: ABTree::new(params),
            workers: Workers::sequential(),
        })
    }

    fn tree_mut(&mut self, which: &str) -> Result<&mut ABTree<u32>, String> {
        match which {
            "a" | "A" => Ok(&mut self.a),
            "b" | "B" => Ok(&mut self.b),
            _ => Err(format!("no tree named {which}")),
        }
    }

    fn render(&self, message: &str, c: &WorkCounters) -> String {
        let v = View {
            a: view_of(&self.a),
            b: view_of(&self.b),
            message,
            counters: c.snapshot().into(),
        };
        serde_json::to_string(&v).expect("serializable view")
    }

    pub fn view(&self) -> String {
        self.render("", &WorkCounters::new())
    }

    /// Replaces a tree with one built from `keys`.
    pub fn load(&mut self, which: &str, keys: &str) -> Result<String, String> {
        let keys = parse_keys(keys)?;
        let t = ABTree::from_sorted(self.params, &keys).map_err(|e| e.to_string())?;
        *self.tree_mut(which)? = t;
        Ok(self.render(
            &format!("loaded {} keys into {which}", keys.len()),
            &WorkCounters::new(),
        ))
    }

    /// One bulk update on a tree: `inserts` added, then `deletes` removed.
    /// A key in both lists ends up deleted.
    pub fn bulk(&mut self, which: &str, inserts: &str, deletes: &str) -> Result<String, String> {
        let mut ops: Vec<(u32, UpdateKind)> = parse_keys(inserts)?
            .into_iter()
            .map(|k| (k, UpdateKind::Insert))
            .collect();
        ops.extend(
            parse_keys(deletes)?
                .into_iter()
                .map(|k| (k, UpdateKind::Delete)),
        );
        let batch = UpdateBatch::from_unsorted(ops);
        let c = WorkCounters::new();
        let workers = Workers::sequential();
        let empty = ABTree::new(self.params);
        let t = std::mem::replace(self.tree_mut(which)?, empty);
        let opts = BulkOptions {
            strategy: Strategy::Auto,
            ..BulkOptions::default()
        };
        let (t, rep) =
            bulk_update_with_report(t, &batch, &workers, &opts, &c).map_err(|e| e.to_string())?;
        *self.tree_mut(which)? = t;
        let msg = format!(
            "{which}: {} inserted, {} deleted in {} pieces",
            rep.inserted, rep.deleted, rep.pieces
        );
        Ok(self.render(&msg, &c))
    }

    /// Splits A at `key`: A keeps the keys up to `key`, B gets the rest.
    pub fn split(&mut self, key: u32) -> Result<String, String> {
        let c = WorkCounters::new();
        let t = std::mem::replace(&mut self.a, ABTree::new(self.params));
        let (l, r) = split_at(t, &key, &c);
        self.a = l;
        self.b = r;
        Ok(self.render(&format!("split at {key}"), &c))
    }

    /// `A = A op B` for `union`, `intersection`, `difference` or
    /// `symmetric_difference`.
    pub fn set_op(&mut self, op: &str) -> Result<String, String> {
        let c = WorkCounters::new();
        let w = &self.workers;
        let a = std::mem::replace(&mut self.a, ABTree::new(self.params));
        let res = match op {
            "union" => set_union(a, self.b.clone(), w, &c),
            "intersection" => set_intersection(&a, &self.b, w, &c),
            "difference" => set_difference(a, &self.b, w, &c),
            "symmetric_difference" => set_symmetric_difference(&a, &self.b, w, &c),
            _ => return Err(format!("unknown operation {op}")),
        };
        self.a = res.map_err(|e| e.to_string())?;
        Ok(self.render(&format!("A = A {op} B"), &c))
    }
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Demo {
    core: DemoCore,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(a: usize, b: usize) -> Result<Demo, JsError> {
        DemoCore::new(a, b)
            .map(|core| Demo { core })
            .map_err(|e| JsError::new(&e))
    }

    pub fn view(&self) -> String {
        self.core.view()
    }

    pub fn load(&mut self, which: &str, keys: &str) -> Result<String, JsError> {
        js(self.core.load(which, keys))
    }

    pub fn bulk(&mut self, which: &str, inserts: &str, deletes: &str) -> Result<String, JsError> {
        js(self.core.bulk(which, inserts, deletes))
    }

    pub fn split(&mut self, key: u32) -> Result<String, JsError> {
        js(self.core.split(key))
    }

    pub fn set_op(&mut self, op: &str) -> Result<String, JsError> {
        js(self.core.set_op(op))
    }
}
