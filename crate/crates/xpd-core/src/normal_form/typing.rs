//! Direct computation of level-n types.
//!
//! The type of `x` at level `n` is the unique member of `N_n` true at `x`.
//! Every descendant `y` of `x` at depth `k ≤ n` has exactly one normal path
//! from `x`: `↓[type(y₁, n−1)]…↓[type(y, n−k)]ε`, where `y₁ … y` are the
//! nodes on the way down.  A diamond `⟨p ∗ q⟩` is positive iff two such
//! descendants with paths `p` and `q` have equal (`=`) or different (`≠`)
//! data.

use std::collections::{BTreeSet, HashMap};

use super::{DiamondAtom, NormalForm, NormalPath};
use crate::ast::{DataOp, Fragment};
use crate::semantics::{DataTree, NodeId};

/// Memoizing type computation over one tree.
pub struct Typer<'t> {
    tree: &'t DataTree,
    fragment: Fragment,
    types: HashMap<(NodeId, usize), NormalForm>,
    paths: HashMap<(NodeId, usize), Vec<(NodeId, NormalPath)>>,
}

impl<'t> Typer<'t> {
    pub fn new(tree: &'t DataTree, fragment: Fragment) -> Self {
        Typer {
            tree,
            fragment,
            types: HashMap::new(),
            paths: HashMap::new(),
        }
    }

    pub fn tree(&self) -> &'t DataTree {
        self.tree
    }

    /// Every node within `level` steps below `x` (including `x`) with its
    /// normal path from `x`, in preorder.
    pub fn paths_from(&mut self, x: NodeId, level: usize) -> Vec<(NodeId, NormalPath)> {
        if let Some(p) = self.paths.get(&(x, level)) {
            return p.clone();
        }
        let mut out = vec![(x, NormalPath::eps(level))];
        if level > 0 {
            for &c in self.tree.children(x) {
                let theta = self.type_at(c, level - 1);
                for (y, p) in self.paths_from(c, level - 1) {
                    let full = NormalPath::step(theta.clone(), &p).expect("levels agree by construction");
                    out.push((y, full));
                }
            }
        }
        self.paths.insert((x, level), out.clone());
        out
    }

    /// The endpoints of normal path `alpha` from `x`, in preorder.
    pub fn endpoints(&mut self, x: NodeId, alpha: &NormalPath) -> Vec<NodeId> {
        self.paths_from(x, alpha.level())
            .into_iter()
            .filter(|(_, p)| p == alpha)
            .map(|(y, _)| y)
            .collect()
    }

    /// The level-`level` type of `x`.
    pub fn type_at(&mut self, x: NodeId, level: usize) -> NormalForm {
        if let Some(t) = self.types.get(&(x, level)) {
            return t.clone();
        }
        let reach = self.paths_from(x, level);
        let mut positives = BTreeSet::new();
        for (i, (y, p)) in reach.iter().enumerate() {
            for (z, q) in &reach[i..] {
                if self.tree.data(*y) == self.tree.data(*z) {
                    positives.insert(DiamondAtom::of(DataOp::Eq, p, q));
                } else if self.fragment == Fragment::Full {
                    positives.insert(DiamondAtom::of(DataOp::Neq, p, q));
                }
            }
        }
        let t = NormalForm::unchecked(self.fragment, level, self.tree.label(x).clone(), positives);
        self.types.insert((x, level), t.clone());
        t
    }
}
