//! Decision trees with `x^j < eta` predicates and real-valued leaves.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode<S> {
    Internal {
        feature: usize,
        threshold: S,
        left: usize,
        right: usize,
    },
    Leaf {
        value: S,
    },
}

/// A single tree stored as a node arena; node 0 is the root and children
/// always come after their parent.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree<S> {
    pub nodes: Vec<TreeNode<S>>,
}

impl<S: Scalar> Tree<S> {
    pub fn leaf(value: S) -> Self {
        Tree {
            nodes: vec![TreeNode::Leaf { value }],
        }
    }

    /// A depth-1 tree: `x^feature < threshold ? left_value : right_value`.
    pub fn stump(feature: usize, threshold: S, left_value: S, right_value: S) -> Self {
        Tree {
            nodes: vec![
                TreeNode::Internal {
                    feature,
                    threshold,
                    left: 1,
                    right: 2,
                },
                TreeNode::Leaf { value: left_value },
                TreeNode::Leaf { value: right_value },
            ],
        }
    }

    pub fn eval(&self, x: &[S]) -> S {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x[*feature] < *threshold { *left } else { *right };
                }
                TreeNode::Leaf { value } => return *value,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk<S>(nodes: &[TreeNode<S>], idx: usize) -> usize {
            match &nodes[idx] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Internal {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        })
    }

    /// Every leaf with its root-to-leaf path of `(feature, threshold, goes_left)`.
    pub fn leaves_with_paths(&self) -> Vec<LeafPath<S>> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<(usize, S, bool)>)> = vec![(0, Vec::new())];
        while let Some((idx, path)) = stack.pop() {
            match &self.nodes[idx] {
                TreeNode::Leaf { value } => out.push(LeafPath {
                    node: idx,
                    value: *value,
                    path,
                }),
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let mut lp = path.clone();
                    lp.push((*feature, *threshold, true));
                    let mut rp = path;
                    rp.push((*feature, *threshold, false));
                    // push right first so leaves come out in left-to-right order
                    stack.push((*right, rp));
                    stack.push((*left, lp));
                }
            }
        }
        out
    }

    /// Structural sanity: children in range and strictly after their parent,
    /// every non-root node referenced exactly once.
    pub fn validate(&self, context: &str) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Model(format!("{context}: tree has no nodes")));
        }
        let n = self.nodes.len();
        let mut referenced = vec![0usize; n];
        for (idx, node) in self.nodes.iter().enumerate() {
            if let TreeNode::Internal { left, right, .. } = node {
                for &child in [left, right] {
                    if child >= n {
                        return Err(Error::Model(format!(
                            "{context}.nodes[{idx}]: child index {child} out of range"
                        )));
                    }
                    if child <= idx {
                        return Err(Error::Model(format!(
                            "{context}.nodes[{idx}]: child index {child} does not follow its parent"
                        )));
                    }
                    referenced[child] += 1;
                }
            }
        }
        for (idx, &count) in referenced.iter().enumerate() {
            let expected = usize::from(idx != 0);
            if count != expected {
                return Err(Error::Model(format!(
                    "{context}.nodes[{idx}]: referenced {count} times, expected {expected}"
                )));
            }
        }
        Ok(())
    }
}

/// One leaf plus the predicates on its path.
#[derive(Clone, Debug)]
pub struct LeafPath<S> {
    pub node: usize,
    pub value: S,
    /// `(feature, threshold, goes_left)`; `goes_left` means the path requires
    /// `x^feature < threshold`.
    pub path: Vec<(usize, S, bool)>,
}
