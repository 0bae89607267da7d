use serde::Serialize;

use crate::node::{self, Link};
use crate::tree::{ABTree, Key};

/// Invariant that a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    DegreeUpper,
    DegreeLower,
    RootDegree,
    KeyOrder,
    RouterBound,
    LeafDepth,
    Rank,
    ParentPointer,
    SubtreeSize,
    Len,
    Bounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: Rule,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

struct Walk<'a, K> {
    a: usize,
    b: usize,
    sizes: bool,
    out: &'a mut Vec<Violation>,
    path: Vec<usize>,
    leaf_depth: Option<usize>,
    count: usize,
    _k: std::marker::PhantomData<K>,
}

impl<K: Key> Walk<'_, K> {
    fn report(&mut self, rule: Rule, message: String) {
        // keep reports bounded on badly broken trees
        if self.out.len() < 64 {
            self.out.push(Violation {
                path: self.path.clone(),
                rule,
                message,
            });
        }
    }

    /// Returns the (min, max) key of the subtree, if any.
    unsafe fn visit(
        &mut self,
        n: Link<K>,
        parent: Option<Link<K>>,
        depth: usize,
    ) -> Option<(K, K)> {
        let nd = &*n.as_ptr();
        if nd.parent != parent {
            self.report(Rule::ParentPointer, "parent pointer does not match".into());
        }
        let is_root = parent.is_none();
        let deg = node::degree(n);
        if deg > self.b {
            self.report(Rule::DegreeUpper, format!("degree {deg} > b={}", self.b));
        }
        if is_root {
            if nd.rank > 1 && deg < 2 {
                self.report(Rule::RootDegree, format!("internal root of degree {deg}"));
            }
            if nd.rank == 1 && deg == 0 {
                self.report(Rule::RootDegree, "empty root leaf".into());
            }
        } else if deg < self.a {
            self.report(
                Rule::DegreeLower,
                format!("degree {deg} violates degree >= a={}", self.a),
            );
        }
        if nd.keys.windows(2).any(|w| w[0] >= w[1]) {
            self.report(Rule::KeyOrder, "keys not strictly ascending".into());
        }
        if nd.rank == 1 {
            if !nd.children.is_empty() {
                self.report(Rule::Rank, "leaf with children".into());
            }
            match self.leaf_depth {
                None => self.leaf_depth = Some(depth),
                Some(d) if d != depth => self.report(
                    Rule::LeafDepth,
                    format!("leaf at depth {depth}, expected {d}"),
                ),
                _ => {}
            }
            self.count += nd.keys.len();
            if self.sizes && nd.size != nd.keys.len() {
                self.report(
                    Rule::SubtreeSize,
                    format!("leaf size {} != {}", nd.size, nd.keys.len()),
                );
            }
            return Some((*nd.keys.first()?, *nd.keys.last()?));
        }
        if nd.children.len() != nd.keys.len() + 1 {
            self.report(
                Rule::KeyOrder,
                format!(
                    "{} routers for {} children",
                    nd.keys.len(),
                    nd.children.len()
                ),
            );
            return None;
        }
        let mut lo: Option<K> = None;
        let mut hi: Option<K> = None;
        let mut total = 0;
        for (i, &c) in nd.children.iter().enumerate() {
            let cr = node::rank(c);
            if cr + 1 != nd.rank {
                self.path.push(i);
                self.report(
                    Rule::Rank,
                    format!("child rank {cr} under rank {}", nd.rank),
                );
                self.path.pop();
            }
            self.path.push(i);
            let b = self.visit(c, Some(n), depth + 1);
            self.path.pop();
            total += node::size(c);
            if let Some((cmin, cmax)) = b {
                if i < nd.keys.len() && cmax > nd.keys[i] {
                    self.report(
                        Rule::RouterBound,
                        format!("child {i} max {cmax:?} above router {:?}", nd.keys[i]),
                    );
                }
                if i > 0 && cmin <= nd.keys[i - 1] {
                    self.report(
                        Rule::RouterBound,
                        format!(
                            "child {i} min {cmin:?} not above router {:?}",
                            nd.keys[i - 1]
                        ),
                    );
                }
                lo = lo.or(Some(cmin));
                hi = Some(cmax);
            }
        }
        if self.sizes && nd.size != total {
            self.report(
                Rule::SubtreeSize,
                format!("size {} != sum of children {total}", nd.size),
            );
        }
        Some((lo?, hi?))
    }
}

/// Which tree-level checks to run besides the structural ones.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Checks {
    pub sizes: bool,
    pub len: bool,
    pub bounds: bool,
}

impl<K: Key> ABTree<K> {
    /// Checks every structural invariant and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(Checks {
            sizes: self.augmented,
            len: true,
            bounds: true,
        })
    }

    pub(crate) fn validate_with(&self, checks: Checks) -> ValidationReport {
        let mut out = Vec::new();
        let mut count = 0;
        let mut found = None;
        if let Some(r) = self.root {
            let mut w = Walk {
                a: self.params.a(),
                b: self.params.b(),
                sizes: checks.sizes,
                out: &mut out,
                path: Vec::new(),
                leaf_depth: None,
                count: 0,
                _k: std::marker::PhantomData,
            };
            found = unsafe { w.visit(r, None, 1) };
            count = w.count;
            if let Some(d) = w.leaf_depth {
                let rank = unsafe { node::rank(r) } as usize;
                if rank != d {
                    out.push(Violation {
                        path: vec![],
                        rule: Rule::Rank,
                        message: format!("root rank {rank} but leaves at depth {d}"),
                    });
                }
            }
        }
        if checks.len && count != self.len {
            out.push(Violation {
                path: vec![],
                rule: Rule::Len,
                message: format!("len {} but {count} elements", self.len),
            });
        }
        if checks.bounds && found != self.bounds {
            out.push(Violation {
                path: vec![],
                rule: Rule::Bounds,
                message: format!("cached bounds {:?}, actual {found:?}", self.bounds),
            });
        }
        ValidationReport {
            ok: out.is_empty(),
            violations: out,
        }
    }
}
