//! Finite data trees: labeled, unordered trees whose nodes are partitioned
//! into data classes.  A class is named by an opaque natural number.

use std::collections::HashMap;
use std::fmt;

use crate::ast::{Alphabet, Label};
use crate::error::{Error, Result};

/// Index of a node inside one [`DataTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// One node of a data tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Label,
    /// Data class id; two nodes carry equal data iff their ids are equal.
    pub data: u64,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
}

/// A data tree rooted at node 0.
#[derive(Clone, PartialEq, Eq)]
pub struct DataTree {
    nodes: Vec<TreeNode>,
}

impl DataTree {
    /// A single-node tree.
    pub fn leaf(label: Label, data: u64) -> Self {
        DataTree {
            nodes: vec![TreeNode {
                label,
                data,
                children: Vec::new(),
                parent: None,
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn label(&self, id: NodeId) -> &Label {
        &self.nodes[id.0].label
    }

    pub fn data(&self, id: NodeId) -> u64 {
        self.nodes[id.0].data
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    /// Checks that `id` names a node of this tree.
    pub fn check(&self, id: NodeId) -> Result<()> {
        if id.0 < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(id.0))
        }
    }

    /// All node ids in id order.
    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Node ids of the subtree at `id` in depth-first, child-order traversal.
    pub fn preorder(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.children(x).iter().rev());
        }
        out
    }

    /// Distance from the root.
    pub fn depth_of(&self, id: NodeId) -> usize {
        let mut d = 0;
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    /// Height of the tree (a single node has height 0).
    pub fn height(&self) -> usize {
        self.ids().map(|x| self.depth_of(x)).max().unwrap_or(0)
    }

    /// The largest class id in use.
    pub fn max_data(&self) -> u64 {
        self.nodes.iter().map(|n| n.data).max().unwrap_or(0)
    }

    /// Appends a new leaf below `parent` and returns its id.
    pub fn add_child(&mut self, parent: NodeId, label: Label, data: u64) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(TreeNode {
            label,
            data,
            children: Vec::new(),
            parent: Some(parent),
        });
        self.nodes[parent.0].children.push(id);
        id
    }

    /// Copies `sub` (its whole tree) below `parent`; `data` maps the copied
    /// class ids.  Returns the mapping from `sub`'s ids to the new ids.
    pub fn graft(&mut self, parent: NodeId, sub: &DataTree, data: impl Fn(u64) -> u64) -> Vec<NodeId> {
        self.graft_subtree(parent, sub, sub.root(), data)
    }

    /// Copies the subtree of `sub` rooted at `at` below `parent`.
    pub fn graft_subtree(
        &mut self,
        parent: NodeId,
        sub: &DataTree,
        at: NodeId,
        data: impl Fn(u64) -> u64,
    ) -> Vec<NodeId> {
        let mut map = vec![NodeId(usize::MAX); sub.len()];
        let mut stack = vec![(at, parent)];
        while let Some((x, p)) = stack.pop() {
            let id = self.add_child(p, sub.label(x).clone(), data(sub.data(x)));
            map[x.0] = id;
            for &c in sub.children(x).iter().rev() {
                stack.push((c, id));
            }
        }
        // `add_child` appended children in reverse of the stack order; restore child order.
        for &x in sub.preorder(at).iter() {
            let new = map[x.0];
            let kids: Vec<NodeId> = sub.children(x).iter().map(|c| map[c.0]).collect();
            self.nodes[new.0].children = kids;
        }
        map
    }

    /// Sets the class id of one node.
    pub fn set_data(&mut self, id: NodeId, data: u64) {
        self.nodes[id.0].data = data;
    }

    /// Replaces every occurrence of class `from` by class `to`.
    pub fn merge_classes(&mut self, from: u64, to: u64) {
        for n in &mut self.nodes {
            if n.data == from {
                n.data = to;
            }
        }
    }

    /// The subtree hanging from `x`, with class ids preserved verbatim.
    pub fn restrict(&self, x: NodeId) -> Result<DataTree> {
        Ok(self.restrict_with_map(x)?.0)
    }

    /// Like [`DataTree::restrict`], also returning the old-to-new id map
    /// (`None` for nodes outside the subtree).
    pub fn restrict_with_map(&self, x: NodeId) -> Result<(DataTree, Vec<Option<NodeId>>)> {
        self.check(x)?;
        let mut out = DataTree::leaf(self.label(x).clone(), self.data(x));
        let mut map = vec![None; self.len()];
        map[x.0] = Some(out.root());
        for y in self.preorder(x).into_iter().skip(1) {
            let p = map[self.parent(y).expect("non-root has a parent").0].expect("parents precede children");
            map[y.0] = Some(out.add_child(p, self.label(y).clone(), self.data(y)));
        }
        Ok((out, map))
    }

    /// Renumbers class ids in first-visit (preorder) order, starting at 0.
    pub fn renumbered(&self) -> DataTree {
        let mut seen: HashMap<u64, u64> = HashMap::new();
        let mut out = self.clone();
        for x in self.preorder(self.root()) {
            let next = seen.len() as u64;
            let id = *seen.entry(self.data(x)).or_insert(next);
            out.nodes[x.0].data = id;
        }
        out
    }

    /// Rebuilds the tree so that ids follow preorder and classes are renumbered.
    pub fn normalized(&self) -> DataTree {
        self.restrict(self.root()).expect("root exists").renumbered()
    }

    /// Number of distinct classes.
    pub fn class_count(&self) -> usize {
        let mut ids: Vec<u64> = self.nodes.iter().map(|n| n.data).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Child-index path from the root, e.g. `[0, 1]` for the second child of the first child.
    pub fn at_path(&self, path: &[usize]) -> Result<NodeId> {
        let mut cur = self.root();
        for &i in path {
            cur = *self
                .children(cur)
                .get(i)
                .ok_or_else(|| Error::syntax(0, format!("node has no child with index {i}")))?;
        }
        Ok(cur)
    }

    /// Checks that every label belongs to `alphabet`.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        match self.nodes.iter().find(|n| !alphabet.contains(&n.label)) {
            Some(n) => Err(Error::UnknownLabel(n.label.name().to_string())),
            None => Ok(()),
        }
    }
}

/// Parses the tree format `(LABEL NAT tree*)`.
pub fn parse_tree(text: &str, alphabet: &Alphabet) -> Result<DataTree> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' || c == ')' {
            toks.push((i, c.to_string()));
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let s = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((s, text[s..i].to_string()));
        } else {
            return Err(Error::syntax(i, format!("unexpected character `{c}` in tree")));
        }
    }
    let mut pos = 0;
    let mut tree: Option<DataTree> = None;
    parse_subtree(&toks, &mut pos, text.len(), alphabet, &mut tree, None)?;
    if let Some((at, t)) = toks.get(pos) {
        return Err(Error::syntax(*at, format!("unexpected `{t}` after tree")));
    }
    Ok(tree.expect("a parsed tree has a root"))
}

fn parse_subtree(
    toks: &[(usize, String)],
    pos: &mut usize,
    end: usize,
    alphabet: &Alphabet,
    tree: &mut Option<DataTree>,
    parent: Option<NodeId>,
) -> Result<()> {
    let at = |p: usize| toks.get(p).map_or(end, |(o, _)| *o);
    let tok = |p: usize| toks.get(p).map(|(_, t)| t.as_str());
    if tok(*pos) != Some("(") {
        return Err(Error::syntax(at(*pos), "expected `(`"));
    }
    *pos += 1;
    let label_name = tok(*pos).ok_or_else(|| Error::syntax(end, "expected a label, found end of input"))?;
    if label_name == "(" || label_name == ")" {
        return Err(Error::syntax(at(*pos), "expected a label"));
    }
    let label = alphabet
        .get(label_name)
        .cloned()
        .ok_or_else(|| Error::UnknownLabel(label_name.to_string()))?;
    *pos += 1;
    let data: u64 = tok(*pos)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::syntax(at(*pos), "expected a decimal class id"))?;
    *pos += 1;
    let me = match (tree.as_mut(), parent) {
        (None, _) => {
            *tree = Some(DataTree::leaf(label, data));
            NodeId(0)
        }
        (Some(t), Some(p)) => t.add_child(p, label, data),
        (Some(_), None) => unreachable!("only the root has no parent"),
    };
    loop {
        match tok(*pos) {
            Some(")") => {
                *pos += 1;
                return Ok(());
            }
            Some("(") => parse_subtree(toks, pos, end, alphabet, tree, Some(me))?,
            Some(_) => return Err(Error::syntax(at(*pos), "expected `(` or `)`")),
            None => return Err(Error::syntax(end, "unterminated tree")),
        }
    }
}

/// Prints a tree in the `(LABEL NAT tree*)` format.
pub fn print_tree(t: &DataTree) -> String {
    let mut out = String::new();
    print_at(t, t.root(), &mut out);
    out
}

fn print_at(t: &DataTree, x: NodeId, out: &mut String) {
    out.push('(');
    out.push_str(t.label(x).name());
    out.push(' ');
    out.push_str(&t.data(x).to_string());
    for &c in t.children(x) {
        out.push(' ');
        print_at(t, c, out);
    }
    out.push(')');
}

impl fmt::Display for DataTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_tree(self))
    }
}

impl fmt::Debug for DataTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_tree(self))
    }
}
