//! Abstract syntax of downward XPath with data tests.
//!
//! Two sorts of expressions exist: node expressions ([`NodeExpr`]) denote sets
//! of nodes and path expressions ([`PathExpr`]) denote sets of node pairs.
//! The derived `Ord` on both types is the total syntactic order used
//! everywhere downstream: constructor tag first, then children
//! lexicographically, labels by name.

mod parser;
mod printer;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use parser::{
    is_label_name, parse_equation_sides, parse_expr, parse_node, parse_node_in, parse_node_with_holes, parse_path,
    parse_path_in, parse_path_with_holes, Sort,
};
pub(crate) use parser::{NODE_HOLE, PATH_HOLE};
pub use printer::{print_node, print_path};

/// A node label.  Labels compare by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Arc<str>);

impl Label {
    /// Creates a label, checking the identifier shape (`[a-z][a-z0-9_]*`).
    pub fn new(name: &str) -> Result<Self> {
        if is_label_ident(name) && !is_keyword(name) {
            Ok(Label(Arc::from(name)))
        } else {
            Err(Error::syntax(0, format!("`{name}` is not a valid label")))
        }
    }

    pub(crate) fn raw(name: &str) -> Self {
        Label(Arc::from(name))
    }

    /// The label's name.
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_label_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

pub(crate) fn is_keyword(s: &str) -> bool {
    matches!(s, "true" | "false" | "eps" | "down" | "bot")
}

/// A finite, declared set of labels kept in name order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(Vec<Label>);

impl Alphabet {
    /// Builds an alphabet from label names; duplicates are removed.
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut labels = names
            .into_iter()
            .map(|n| Label::new(n.as_ref().trim()))
            .collect::<Result<Vec<_>>>()?;
        labels.sort();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::syntax(0, "the alphabet must contain at least one label"));
        }
        Ok(Alphabet(labels))
    }

    /// Parses a comma-separated list such as `a,b,c`.
    pub fn parse(list: &str) -> Result<Self> {
        Alphabet::new(list.split(',').filter(|s| !s.trim().is_empty()))
    }

    /// The labels in name order.
    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    /// Looks a label up by name.
    pub fn get(&self, name: &str) -> Option<&Label> {
        self.0.iter().find(|l| l.name() == name)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.0.binary_search(label).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|l| l.name()).collect();
        f.write_str(&names.join(","))
    }
}

/// The language fragment: without (`EqOnly`) or with (`Full`) inequality diamonds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fragment {
    EqOnly,
    Full,
}

impl Fragment {
    /// Parses `eq` or `full`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eq" => Ok(Fragment::EqOnly),
            "full" => Ok(Fragment::Full),
            other => Err(Error::syntax(0, format!("unknown fragment `{other}` (expected eq or full)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fragment::EqOnly => "eq",
            Fragment::Full => "full",
        }
    }
}

/// Node expressions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeExpr {
    Atom(Label),
    Not(Box<NodeExpr>),
    And(Box<NodeExpr>, Box<NodeExpr>),
    Or(Box<NodeExpr>, Box<NodeExpr>),
    Diamond(Box<PathExpr>),
    EqDiamond(Box<PathExpr>, Box<PathExpr>),
    NeqDiamond(Box<PathExpr>, Box<PathExpr>),
    /// Sugar for `<eps>`.
    True,
    /// Sugar for `!<eps>`.
    False,
}

/// Path expressions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathExpr {
    Eps,
    Down,
    Test(Box<NodeExpr>),
    Concat(Box<PathExpr>, Box<PathExpr>),
    Union(Box<PathExpr>, Box<PathExpr>),
    /// Sugar for `[!<eps>]`.
    BotPath,
}

/// The comparison carried by a data diamond.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataOp {
    Eq,
    Neq,
}

impl DataOp {
    pub fn symbol(self) -> &'static str {
        match self {
            DataOp::Eq => "=",
            DataOp::Neq => "!=",
        }
    }
}

impl NodeExpr {
    pub fn atom(label: &Label) -> Self {
        NodeExpr::Atom(label.clone())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: NodeExpr) -> Self {
        NodeExpr::Not(Box::new(e))
    }

    pub fn and(l: NodeExpr, r: NodeExpr) -> Self {
        NodeExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: NodeExpr, r: NodeExpr) -> Self {
        NodeExpr::Or(Box::new(l), Box::new(r))
    }

    pub fn diamond(p: PathExpr) -> Self {
        NodeExpr::Diamond(Box::new(p))
    }

    pub fn eq(l: PathExpr, r: PathExpr) -> Self {
        NodeExpr::EqDiamond(Box::new(l), Box::new(r))
    }

    pub fn neq(l: PathExpr, r: PathExpr) -> Self {
        NodeExpr::NeqDiamond(Box::new(l), Box::new(r))
    }

    /// A data diamond with the given comparison.
    pub fn data(op: DataOp, l: PathExpr, r: PathExpr) -> Self {
        match op {
            DataOp::Eq => NodeExpr::eq(l, r),
            DataOp::Neq => NodeExpr::neq(l, r),
        }
    }

    /// Right-associated conjunction of a non-empty list (`None` when empty).
    pub fn and_all(items: impl IntoIterator<Item = NodeExpr>) -> Option<Self> {
        let items: Vec<NodeExpr> = items.into_iter().collect();
        items.into_iter().rev().reduce(|acc, e| NodeExpr::and(e, acc))
    }

    /// Right-associated disjunction of a list; the empty disjunction is `false`.
    pub fn or_all(items: impl IntoIterator<Item = NodeExpr>) -> Self {
        let items: Vec<NodeExpr> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .reduce(|acc, e| NodeExpr::or(e, acc))
            .unwrap_or(NodeExpr::False)
    }

    /// Downward depth: how far below the evaluation point the expression can see.
    pub fn dd(&self) -> usize {
        match self {
            NodeExpr::Atom(_) | NodeExpr::True | NodeExpr::False => 0,
            NodeExpr::Not(e) => e.dd(),
            NodeExpr::And(l, r) | NodeExpr::Or(l, r) => l.dd().max(r.dd()),
            NodeExpr::Diamond(p) => p.dd(),
            NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => l.dd().max(r.dd()),
        }
    }

    /// Expands `true`/`false`/`bot` into `<eps>`, `!<eps>` and `[!<eps>]`.
    pub fn desugar(&self) -> NodeExpr {
        match self {
            NodeExpr::True => NodeExpr::diamond(PathExpr::Eps),
            NodeExpr::False => NodeExpr::not(NodeExpr::diamond(PathExpr::Eps)),
            NodeExpr::Atom(l) => NodeExpr::Atom(l.clone()),
            NodeExpr::Not(e) => NodeExpr::not(e.desugar()),
            NodeExpr::And(l, r) => NodeExpr::and(l.desugar(), r.desugar()),
            NodeExpr::Or(l, r) => NodeExpr::or(l.desugar(), r.desugar()),
            NodeExpr::Diamond(p) => NodeExpr::diamond(p.desugar()),
            NodeExpr::EqDiamond(l, r) => NodeExpr::eq(l.desugar(), r.desugar()),
            NodeExpr::NeqDiamond(l, r) => NodeExpr::neq(l.desugar(), r.desugar()),
        }
    }

    /// Whether an inequality diamond occurs anywhere.
    pub fn uses_neq(&self) -> bool {
        match self {
            NodeExpr::Atom(_) | NodeExpr::True | NodeExpr::False => false,
            NodeExpr::Not(e) => e.uses_neq(),
            NodeExpr::And(l, r) | NodeExpr::Or(l, r) => l.uses_neq() || r.uses_neq(),
            NodeExpr::Diamond(p) => p.uses_neq(),
            NodeExpr::EqDiamond(l, r) => l.uses_neq() || r.uses_neq(),
            NodeExpr::NeqDiamond(_, _) => true,
        }
    }

    /// Rejects inequality diamonds in the equality-only fragment.
    pub fn check_fragment(&self, fragment: Fragment) -> Result<()> {
        if fragment == Fragment::EqOnly && self.uses_neq() {
            Err(Error::FragmentViolation)
        } else {
            Ok(())
        }
    }

    /// Rejects labels outside the alphabet.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        let mut bad = None;
        self.visit_labels(&mut |l| {
            if bad.is_none() && !alphabet.contains(l) {
                bad = Some(l.name().to_string());
            }
        });
        bad.map_or(Ok(()), |l| Err(Error::UnknownLabel(l)))
    }

    pub(crate) fn visit_labels(&self, f: &mut impl FnMut(&Label)) {
        match self {
            NodeExpr::Atom(l) => f(l),
            NodeExpr::True | NodeExpr::False => {}
            NodeExpr::Not(e) => e.visit_labels(f),
            NodeExpr::And(l, r) | NodeExpr::Or(l, r) => {
                l.visit_labels(f);
                r.visit_labels(f);
            }
            NodeExpr::Diamond(p) => p.visit_labels(f),
            NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => {
                l.visit_labels(f);
                r.visit_labels(f);
            }
        }
    }

    /// Number of constructors in the expression.
    pub fn size(&self) -> usize {
        match self {
            NodeExpr::Atom(_) | NodeExpr::True | NodeExpr::False => 1,
            NodeExpr::Not(e) => 1 + e.size(),
            NodeExpr::And(l, r) | NodeExpr::Or(l, r) => 1 + l.size() + r.size(),
            NodeExpr::Diamond(p) => 1 + p.size(),
            NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Swaps `=` and `!=` in every data diamond (used by mutation fixtures).
    pub fn swap_data_ops(&self) -> NodeExpr {
        match self {
            NodeExpr::Atom(_) | NodeExpr::True | NodeExpr::False => self.clone(),
            NodeExpr::Not(e) => NodeExpr::not(e.swap_data_ops()),
            NodeExpr::And(l, r) => NodeExpr::and(l.swap_data_ops(), r.swap_data_ops()),
            NodeExpr::Or(l, r) => NodeExpr::or(l.swap_data_ops(), r.swap_data_ops()),
            NodeExpr::Diamond(p) => NodeExpr::diamond(p.swap_data_ops()),
            NodeExpr::EqDiamond(l, r) => NodeExpr::neq(l.swap_data_ops(), r.swap_data_ops()),
            NodeExpr::NeqDiamond(l, r) => NodeExpr::eq(l.swap_data_ops(), r.swap_data_ops()),
        }
    }
}

impl PathExpr {
    pub fn test(e: NodeExpr) -> Self {
        PathExpr::Test(Box::new(e))
    }

    pub fn concat(l: PathExpr, r: PathExpr) -> Self {
        PathExpr::Concat(Box::new(l), Box::new(r))
    }

    pub fn union(l: PathExpr, r: PathExpr) -> Self {
        PathExpr::Union(Box::new(l), Box::new(r))
    }

    /// Right-associated concatenation of a list; the empty list is `eps`.
    pub fn concat_all(steps: impl IntoIterator<Item = PathExpr>) -> Self {
        let steps: Vec<PathExpr> = steps.into_iter().collect();
        steps
            .into_iter()
            .rev()
            .reduce(|acc, e| PathExpr::concat(e, acc))
            .unwrap_or(PathExpr::Eps)
    }

    /// The maximal sequence of non-concatenation factors, left to right.
    pub fn flatten(&self) -> Vec<&PathExpr> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a PathExpr, out: &mut Vec<&'a PathExpr>) {
            match p {
                PathExpr::Concat(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Length: the number of `down` steps along the longest alternative.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        match self {
            PathExpr::Eps | PathExpr::Test(_) | PathExpr::BotPath => 0,
            PathExpr::Down => 1,
            PathExpr::Concat(l, r) => l.len() + r.len(),
            PathExpr::Union(l, r) => l.len().max(r.len()),
        }
    }

    /// Downward depth, including the depth of tests nested after a prefix.
    pub fn dd(&self) -> usize {
        match self {
            PathExpr::Eps | PathExpr::BotPath => 0,
            PathExpr::Down => 1,
            PathExpr::Test(e) => e.dd(),
            PathExpr::Concat(l, r) => l.dd().max(r.dd()).max(l.len() + r.dd()),
            PathExpr::Union(l, r) => l.dd().max(r.dd()),
        }
    }

    /// See [`NodeExpr::desugar`].
    pub fn desugar(&self) -> PathExpr {
        match self {
            PathExpr::BotPath => PathExpr::test(NodeExpr::not(NodeExpr::diamond(PathExpr::Eps))),
            PathExpr::Eps => PathExpr::Eps,
            PathExpr::Down => PathExpr::Down,
            PathExpr::Test(e) => PathExpr::test(e.desugar()),
            PathExpr::Concat(l, r) => PathExpr::concat(l.desugar(), r.desugar()),
            PathExpr::Union(l, r) => PathExpr::union(l.desugar(), r.desugar()),
        }
    }

    pub fn uses_neq(&self) -> bool {
        match self {
            PathExpr::Eps | PathExpr::Down | PathExpr::BotPath => false,
            PathExpr::Test(e) => e.uses_neq(),
            PathExpr::Concat(l, r) | PathExpr::Union(l, r) => l.uses_neq() || r.uses_neq(),
        }
    }

    pub fn check_fragment(&self, fragment: Fragment) -> Result<()> {
        if fragment == Fragment::EqOnly && self.uses_neq() {
            Err(Error::FragmentViolation)
        } else {
            Ok(())
        }
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        let mut bad = None;
        self.visit_labels(&mut |l| {
            if bad.is_none() && !alphabet.contains(l) {
                bad = Some(l.name().to_string());
            }
        });
        bad.map_or(Ok(()), |l| Err(Error::UnknownLabel(l)))
    }

    pub(crate) fn visit_labels(&self, f: &mut impl FnMut(&Label)) {
        match self {
            PathExpr::Eps | PathExpr::Down | PathExpr::BotPath => {}
            PathExpr::Test(e) => e.visit_labels(f),
            PathExpr::Concat(l, r) | PathExpr::Union(l, r) => {
                l.visit_labels(f);
                r.visit_labels(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PathExpr::Eps | PathExpr::Down | PathExpr::BotPath => 1,
            PathExpr::Test(e) => 1 + e.size(),
            PathExpr::Concat(l, r) | PathExpr::Union(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn swap_data_ops(&self) -> PathExpr {
        match self {
            PathExpr::Eps | PathExpr::Down | PathExpr::BotPath => self.clone(),
            PathExpr::Test(e) => PathExpr::test(e.swap_data_ops()),
            PathExpr::Concat(l, r) => PathExpr::concat(l.swap_data_ops(), r.swap_data_ops()),
            PathExpr::Union(l, r) => PathExpr::union(l.swap_data_ops(), r.swap_data_ops()),
        }
    }
}

/// Path length, as a free function.
pub fn path_len(p: &PathExpr) -> usize {
    p.len()
}

/// Downward depth of a node expression, as a free function.
pub fn dd_node(e: &NodeExpr) -> usize {
    e.dd()
}

/// Downward depth of a path expression, as a free function.
pub fn dd_path(p: &PathExpr) -> usize {
    p.dd()
}

impl fmt::Display for NodeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_node(self))
    }
}

impl fmt::Debug for NodeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_node(self))
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_path(self))
    }
}

impl fmt::Debug for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_path(self))
    }
}

/// An expression of either sort.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Node(NodeExpr),
    Path(PathExpr),
}

impl Expr {
    pub fn sort(&self) -> Sort {
        match self {
            Expr::Node(_) => Sort::Node,
            Expr::Path(_) => Sort::Path,
        }
    }

    pub fn desugar(&self) -> Expr {
        match self {
            Expr::Node(e) => Expr::Node(e.desugar()),
            Expr::Path(p) => Expr::Path(p.desugar()),
        }
    }

    pub fn dd(&self) -> usize {
        match self {
            Expr::Node(e) => e.dd(),
            Expr::Path(p) => p.dd(),
        }
    }

    pub fn uses_neq(&self) -> bool {
        match self {
            Expr::Node(e) => e.uses_neq(),
            Expr::Path(p) => p.uses_neq(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Node(e) => write!(f, "{e}"),
            Expr::Path(p) => write!(f, "{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::parse("a,b").unwrap()
    }

    #[test]
    fn lengths() {
        let a = ab();
        assert_eq!(path_len(&PathExpr::Eps), 0);
        assert_eq!(path_len(&parse_path("down/[a]/down", &a).unwrap()), 2);
        assert_eq!(path_len(&parse_path("down + down/down", &a).unwrap()), 2);
    }

    #[test]
    fn depths() {
        let a = ab();
        assert_eq!(dd_node(&parse_node("a", &a).unwrap()), 0);
        assert_eq!(dd_node(&parse_node("<down[a]/down[b] = eps>", &a).unwrap()), 2);
        assert_eq!(dd_path(&parse_path("down + eps", &a).unwrap()), 1);
        // A test after a step is seen one level further down.
        assert_eq!(dd_path(&parse_path("down/[<down>]", &a).unwrap()), 2);
    }

    #[test]
    fn desugar_expands_sugar_only() {
        let a = ab();
        let e = parse_node("true & <bot>", &a).unwrap().desugar();
        assert_eq!(print_node(&e), "<eps> & <[!<eps>]>");
    }

    #[test]
    fn flatten_yields_steps() {
        let a = ab();
        let p = parse_path("down/[a]/down", &a).unwrap();
        let steps: Vec<String> = p.flatten().iter().map(|s| print_path(s)).collect();
        assert_eq!(steps, ["down", "[a]", "down"]);
    }

    #[test]
    fn alphabet_is_sorted_and_deduplicated() {
        let a = Alphabet::parse("b,a,b").unwrap();
        assert_eq!(a.to_string(), "a,b");
        assert!(Alphabet::parse("").is_err());
        assert!(Alphabet::parse("A").is_err());
    }
}
