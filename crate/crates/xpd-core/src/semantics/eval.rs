//! Bottom-up evaluator computing the denotation of node expressions (node
//! sets) and path expressions (node-pair relations) over one data tree.
//!
//! Every subexpression is evaluated once per tree: results are memoized by
//! the subexpression's address, which is stable because the evaluator
//! borrows the expressions for its whole lifetime.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::tree::{DataTree, NodeId};
use crate::ast::{NodeExpr, PathExpr};
use crate::error::Result;

/// Hash-by-address wrapper for memo keys.
struct Addr<'e, T>(&'e T);

impl<T> PartialEq for Addr<'_, T> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl<T> Eq for Addr<'_, T> {}
impl<T> std::hash::Hash for Addr<'_, T> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::ptr::hash(self.0, state)
    }
}

/// A binary relation on the nodes of one tree: row `x` holds every `y` with `(x, y)`.
pub type Relation = Vec<FixedBitSet>;

/// Memoizing evaluator over one tree.
pub struct Evaluator<'t, 'e> {
    tree: &'t DataTree,
    /// Dense index of each node's class.
    class_of: Vec<usize>,
    classes: usize,
    nodes: HashMap<Addr<'e, NodeExpr>, Rc<FixedBitSet>>,
    paths: HashMap<Addr<'e, PathExpr>, Rc<Relation>>,
}

impl<'t, 'e> Evaluator<'t, 'e> {
    pub fn new(tree: &'t DataTree) -> Self {
        let mut dense: HashMap<u64, usize> = HashMap::new();
        let class_of = tree
            .ids()
            .map(|x| {
                let next = dense.len();
                *dense.entry(tree.data(x)).or_insert(next)
            })
            .collect();
        Evaluator {
            tree,
            class_of,
            classes: dense.len(),
            nodes: HashMap::new(),
            paths: HashMap::new(),
        }
    }

    pub fn tree(&self) -> &'t DataTree {
        self.tree
    }

    fn n(&self) -> usize {
        self.tree.len()
    }

    /// The set of nodes at which `e` holds.
    pub fn nodes(&mut self, e: &'e NodeExpr) -> Rc<FixedBitSet> {
        if let Some(s) = self.nodes.get(&Addr(e)) {
            return Rc::clone(s);
        }
        let n = self.n();
        let set = match e {
            NodeExpr::Atom(l) => {
                let mut s = FixedBitSet::with_capacity(n);
                for x in self.tree.ids() {
                    if self.tree.label(x) == l {
                        s.insert(x.0);
                    }
                }
                s
            }
            NodeExpr::True => full(n),
            NodeExpr::False => FixedBitSet::with_capacity(n),
            NodeExpr::Not(x) => {
                let mut s = (*self.nodes(x)).clone();
                s.toggle_range(..);
                s
            }
            NodeExpr::And(l, r) => {
                let mut s = (*self.nodes(l)).clone();
                s.intersect_with(&self.nodes(r));
                s
            }
            NodeExpr::Or(l, r) => {
                let mut s = (*self.nodes(l)).clone();
                s.union_with(&self.nodes(r));
                s
            }
            NodeExpr::Diamond(p) => {
                let rel = self.paths(p);
                let mut s = FixedBitSet::with_capacity(n);
                for (x, row) in rel.iter().enumerate() {
                    if !row.is_clear() {
                        s.insert(x);
                    }
                }
                s
            }
            NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => {
                let eq = matches!(e, NodeExpr::EqDiamond(..));
                let (rl, rr) = (self.paths(l), self.paths(r));
                let mut s = FixedBitSet::with_capacity(n);
                for x in 0..n {
                    let (cl, cr) = (self.class_set(&rl[x]), self.class_set(&rr[x]));
                    let holds = if eq {
                        !cl.is_disjoint(&cr)
                    } else {
                        // Some pair of endpoints differs unless both sides see one and the same class.
                        !cl.is_clear() && !cr.is_clear() && !(cl.count_ones(..) == 1 && cl == cr)
                    };
                    if holds {
                        s.insert(x);
                    }
                }
                s
            }
        };
        let set = Rc::new(set);
        self.nodes.insert(Addr(e), Rc::clone(&set));
        set
    }

    /// The relation denoted by `p`.
    pub fn paths(&mut self, p: &'e PathExpr) -> Rc<Relation> {
        if let Some(r) = self.paths.get(&Addr(p)) {
            return Rc::clone(r);
        }
        let n = self.n();
        let rel: Relation = match p {
            PathExpr::Eps => (0..n).map(|x| singleton(n, x)).collect(),
            PathExpr::Down => self
                .tree
                .ids()
                .map(|x| {
                    let mut row = FixedBitSet::with_capacity(n);
                    for c in self.tree.children(x) {
                        row.insert(c.0);
                    }
                    row
                })
                .collect(),
            PathExpr::BotPath => (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            PathExpr::Test(e) => {
                let s = self.nodes(e);
                (0..n)
                    .map(|x| if s.contains(x) { singleton(n, x) } else { FixedBitSet::with_capacity(n) })
                    .collect()
            }
            PathExpr::Union(l, r) => {
                let (a, b) = (self.paths(l), self.paths(r));
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| {
                        let mut row = x.clone();
                        row.union_with(y);
                        row
                    })
                    .collect()
            }
            PathExpr::Concat(l, r) => {
                let (a, b) = (self.paths(l), self.paths(r));
                a.iter()
                    .map(|row| {
                        let mut out = FixedBitSet::with_capacity(n);
                        for y in row.ones() {
                            out.union_with(&b[y]);
                        }
                        out
                    })
                    .collect()
            }
        };
        let rel = Rc::new(rel);
        self.paths.insert(Addr(p), Rc::clone(&rel));
        rel
    }

    fn class_set(&self, nodes: &FixedBitSet) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.classes);
        for y in nodes.ones() {
            s.insert(self.class_of[y]);
        }
        s
    }

    /// Whether `e` holds at `x`.
    pub fn holds(&mut self, x: NodeId, e: &'e NodeExpr) -> bool {
        self.nodes(e).contains(x.0)
    }
}

fn full(n: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert_range(..);
    s
}

fn singleton(n: usize, x: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert(x);
    s
}

/// Whether `φ` holds at node `x` of `t`.
pub fn eval_node(t: &DataTree, x: NodeId, phi: &NodeExpr) -> Result<bool> {
    t.check(x)?;
    Ok(Evaluator::new(t).holds(x, phi))
}

/// Whether `(x, y)` belongs to the denotation of `α` in `t`.
pub fn eval_path(t: &DataTree, x: NodeId, y: NodeId, alpha: &PathExpr) -> Result<bool> {
    t.check(x)?;
    t.check(y)?;
    Ok(Evaluator::new(t).paths(alpha)[x.0].contains(y.0))
}

/// The set of nodes of `t` at which `φ` holds.
pub fn node_set(t: &DataTree, phi: &NodeExpr) -> BTreeSet<NodeId> {
    Evaluator::new(t).nodes(phi).ones().map(NodeId).collect()
}

/// The set of node pairs of `t` related by `α`.
pub fn pair_set(t: &DataTree, alpha: &PathExpr) -> BTreeSet<(NodeId, NodeId)> {
    let rel = Evaluator::new(t).paths(alpha);
    rel.iter()
        .enumerate()
        .flat_map(|(x, row)| row.ones().map(move |y| (NodeId(x), NodeId(y))))
        .collect()
}
