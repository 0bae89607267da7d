//! Explicit tree shapes, used to hand-build trees in tests and to export
//! structure to the demo.

use serde::{Deserialize, Serialize};

use crate::error::TreeError;
use crate::node::{self, Link};
use crate::tree::{ABTree, Key, Params};
use crate::Result;

/// A subtree written out node by node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeLayout<K> {
    Leaf {
        keys: Vec<K>,
    },
    Internal {
        keys: Vec<K>,
        children: Vec<TreeLayout<K>>,
    },
}

impl<K: Key> TreeLayout<K> {
    pub fn leaf(keys: Vec<K>) -> Self {
        TreeLayout::Leaf { keys }
    }

    pub fn internal(keys: Vec<K>, children: Vec<TreeLayout<K>>) -> Self {
        TreeLayout::Internal { keys, children }
    }

    fn depth(&self) -> Result<u32> {
        match self {
            TreeLayout::Leaf { .. } => Ok(1),
            TreeLayout::Internal { keys, children } => {
                if children.is_empty() || keys.len() + 1 != children.len() {
                    return Err(TreeError::InvalidLayout(format!(
                        "{} routers for {} children",
                        keys.len(),
                        children.len()
                    )));
                }
                let d = children[0].depth()?;
                for c in &children[1..] {
                    if c.depth()? != d {
                        return Err(TreeError::InvalidLayout(
                            "leaves at different depths".into(),
                        ));
                    }
                }
                Ok(d + 1)
            }
        }
    }

    unsafe fn materialize(&self) -> Link<K> {
        match self {
            TreeLayout::Leaf { keys } => node::new_leaf(keys.clone()),
            TreeLayout::Internal { keys, children } => {
                let kids = children.iter().map(|c| c.materialize()).collect();
                node::new_internal(keys.clone(), kids, true)
            }
        }
    }

    unsafe fn capture(n: Link<K>) -> Self {
        let nd = &*n.as_ptr();
        if nd.rank == 1 {
            TreeLayout::Leaf {
                keys: nd.keys.clone(),
            }
        } else {
            TreeLayout::Internal {
                keys: nd.keys.clone(),
                children: nd.children.iter().map(|&c| Self::capture(c)).collect(),
            }
        }
    }
}

impl<K: Key> ABTree<K> {
    /// Builds a tree with exactly the given shape. The result is checked with
    /// [`ABTree::validate`]; any violation is returned as an error.
    pub fn from_layout(params: Params, layout: &TreeLayout<K>) -> Result<Self> {
        layout.depth()?;
        let root = unsafe { layout.materialize() };
        let t = unsafe { ABTree::from_root(params, Some(root), true, None) };
        let rep = t.validate();
        if !rep.ok {
            return Err(TreeError::InvalidLayout(format!("{:?}", rep.violations[0])));
        }
        Ok(t)
    }

    /// Like [`ABTree::from_layout`] but skips validation, so degree and order
    /// violations survive. Only the shape (router counts, equal depth) is
    /// checked. Meant for exercising the validator.
    pub fn from_layout_unchecked(params: Params, layout: &TreeLayout<K>) -> Result<Self> {
        layout.depth()?;
        let root = unsafe { layout.materialize() };
        Ok(unsafe { ABTree::from_root(params, Some(root), true, None) })
    }

    pub fn to_layout(&self) -> Option<TreeLayout<K>> {
        self.root.map(|r| unsafe { TreeLayout::capture(r) })
    }
}
