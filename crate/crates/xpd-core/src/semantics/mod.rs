//! Data trees, their concrete format, and the denotational evaluator.
//!
//! Node expressions denote node sets and path expressions denote node-pair
//! relations.  Evaluation ignores child order; the order is only kept so that
//! printing is deterministic.

mod eval;
mod tree;

pub use eval::{eval_node, eval_path, node_set, pair_set, Evaluator, Relation};
pub use tree::{parse_tree, print_tree, DataTree, NodeId, TreeNode};
