//! Axiom schemes as first-class values, their instantiation and syntactic
//! matching, the equational derivation checker, and a soundness fuzzer.
//!
//! A scheme is a pair of templates over metavariables of three sorts: node
//! (`phi`, `psi`, `rho`), path (`alpha`, `beta`, `gamma`, `eta`) and label
//! (`a`, `b`).  Inequational schemes `l <= r` are stored expanded as
//! `l | r == r` (nodes) or `l + r == r` (paths).

mod fuzz;
mod proof;
mod table;

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{parse_equation_sides, Alphabet, Expr, Fragment, Label, NodeExpr, PathExpr, Sort};
use crate::error::{Error, Result};

pub use fuzz::{flipped_inequation, fuzz_schemes, fuzz_soundness, Counterexample, FuzzReport, SchemeReport};
pub use proof::{check_derivation, check_script, parse_script, Derivation, ProofScript, Step, Verdict};
pub use table::{derived_schemes, schemes, equality_schemes, inequality_schemes};

/// Sort of a metavariable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetaSort {
    Node,
    Path,
    Label,
}

/// Which collection a scheme belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeGroup {
    /// Axioms for the equality-only fragment.
    Equality,
    /// Additional axioms for inequality diamonds.
    Inequality,
    /// Derived laws (provable, hence sound, and convenient in proofs).
    Derived,
}

/// An expression template with metavariables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pat {
    NodeVar(&'static str),
    PathVar(&'static str),
    LabelVar(&'static str),
    Label(Label),
    Not(Box<Pat>),
    And(Box<Pat>, Box<Pat>),
    Or(Box<Pat>, Box<Pat>),
    Diamond(Box<Pat>),
    EqD(Box<Pat>, Box<Pat>),
    NeqD(Box<Pat>, Box<Pat>),
    True,
    False,
    Eps,
    Down,
    Test(Box<Pat>),
    Concat(Box<Pat>, Box<Pat>),
    Union(Box<Pat>, Box<Pat>),
    Bot,
}

impl Pat {
    fn sort(&self) -> Sort {
        match self {
            Pat::NodeVar(_)
            | Pat::LabelVar(_)
            | Pat::Label(_)
            | Pat::Not(_)
            | Pat::And(..)
            | Pat::Or(..)
            | Pat::Diamond(_)
            | Pat::EqD(..)
            | Pat::NeqD(..)
            | Pat::True
            | Pat::False => Sort::Node,
            _ => Sort::Path,
        }
    }

    fn collect_vars(&self, out: &mut Vec<(&'static str, MetaSort)>) {
        let mut add = |n: &'static str, s: MetaSort| {
            if !out.iter().any(|(m, _)| *m == n) {
                out.push((n, s));
            }
        };
        match self {
            Pat::NodeVar(n) => add(n, MetaSort::Node),
            Pat::PathVar(n) => add(n, MetaSort::Path),
            Pat::LabelVar(n) => add(n, MetaSort::Label),
            Pat::Label(_) | Pat::True | Pat::False | Pat::Eps | Pat::Down | Pat::Bot => {}
            Pat::Not(x) | Pat::Diamond(x) | Pat::Test(x) => x.collect_vars(out),
            Pat::And(l, r) | Pat::Or(l, r) | Pat::EqD(l, r) | Pat::NeqD(l, r) | Pat::Concat(l, r) | Pat::Union(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

/// A binding of a metavariable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Binding {
    Node(NodeExpr),
    Path(PathExpr),
    Label(Label),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Node(e) => write!(f, "{e}"),
            Binding::Path(p) => write!(f, "{p}"),
            Binding::Label(l) => write!(f, "{l}"),
        }
    }
}

/// Metavariable assignments, ordered by name.
pub type Bindings = BTreeMap<String, Binding>;

/// An axiom scheme.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub name: &'static str,
    pub group: SchemeGroup,
    pub sort: Sort,
    /// Metavariables in order of first occurrence.
    pub metavars: Vec<(&'static str, MetaSort)>,
    pub lhs: Pat,
    pub rhs: Pat,
    /// Whether the scheme was stated with `<=` (the templates hold the expansion).
    pub inequational: bool,
}

impl Scheme {
    pub(crate) fn new(name: &'static str, group: SchemeGroup, lhs: Pat, rhs: Pat) -> Self {
        let sort = lhs.sort();
        debug_assert_eq!(sort, rhs.sort(), "{name}: sides of different sorts");
        let mut metavars = Vec::new();
        lhs.collect_vars(&mut metavars);
        rhs.collect_vars(&mut metavars);
        Scheme {
            name,
            group,
            sort,
            metavars,
            lhs,
            rhs,
            inequational: false,
        }
    }

    /// `l <= r`, stored as `l | r == r` or `l + r == r`.
    pub(crate) fn leq(name: &'static str, group: SchemeGroup, l: Pat, r: Pat) -> Self {
        let lhs = match l.sort() {
            Sort::Node => Pat::Or(Box::new(l), Box::new(r.clone())),
            Sort::Path => Pat::Union(Box::new(l), Box::new(r.clone())),
        };
        let mut s = Scheme::new(name, group, lhs, r);
        s.inequational = true;
        s
    }

    /// Whether the scheme mentions inequality diamonds.
    pub fn uses_neq(&self) -> bool {
        fn go(p: &Pat) -> bool {
            match p {
                Pat::NeqD(..) => true,
                Pat::Not(x) | Pat::Diamond(x) | Pat::Test(x) => go(x),
                Pat::And(l, r) | Pat::Or(l, r) | Pat::EqD(l, r) | Pat::Concat(l, r) | Pat::Union(l, r) => {
                    go(l) || go(r)
                }
                _ => false,
            }
        }
        go(&self.lhs) || go(&self.rhs)
    }

    /// Produces the ground equation for `bindings`.
    pub fn instantiate(&self, bindings: &Bindings) -> Result<Equation> {
        for (name, sort) in &self.metavars {
            match (bindings.get(*name), sort) {
                (None, _) => return Err(Error::Instantiation(format!("{}: missing binding for `{name}`", self.name))),
                (Some(Binding::Node(_)), MetaSort::Node)
                | (Some(Binding::Path(_)), MetaSort::Path)
                | (Some(Binding::Label(_)), MetaSort::Label) => {}
                (Some(b), s) => {
                    return Err(Error::Instantiation(format!(
                        "{}: `{name}` expects a {} but was bound to `{b}`",
                        self.name,
                        meta_sort_name(*s)
                    )))
                }
            }
        }
        if let Some((extra, _)) = bindings.iter().find(|(k, _)| !self.metavars.iter().any(|(m, _)| m == k)) {
            return Err(Error::Instantiation(format!("{}: `{extra}` is not a metavariable of this scheme", self.name)));
        }
        if self.name == "LbAx2" && bindings.get("a") == bindings.get("b") {
            return Err(Error::Instantiation("LbAx2 requires two distinct labels".into()));
        }
        Ok(Equation {
            lhs: subst(&self.lhs, bindings),
            rhs: subst(&self.rhs, bindings),
        })
    }
}

pub(crate) fn meta_sort_name(s: MetaSort) -> &'static str {
    match s {
        MetaSort::Node => "node expression",
        MetaSort::Path => "path expression",
        MetaSort::Label => "label",
    }
}

fn subst(p: &Pat, b: &Bindings) -> Expr {
    match p.sort() {
        Sort::Node => Expr::Node(subst_node(p, b)),
        Sort::Path => Expr::Path(subst_path(p, b)),
    }
}

fn subst_node(p: &Pat, b: &Bindings) -> NodeExpr {
    match p {
        Pat::NodeVar(n) => match &b[*n] {
            Binding::Node(e) => e.clone(),
            _ => unreachable!("sorts checked before substitution"),
        },
        Pat::LabelVar(n) => match &b[*n] {
            Binding::Label(l) => NodeExpr::Atom(l.clone()),
            _ => unreachable!("sorts checked before substitution"),
        },
        Pat::Label(l) => NodeExpr::Atom(l.clone()),
        Pat::Not(x) => NodeExpr::not(subst_node(x, b)),
        Pat::And(l, r) => NodeExpr::and(subst_node(l, b), subst_node(r, b)),
        Pat::Or(l, r) => NodeExpr::or(subst_node(l, b), subst_node(r, b)),
        Pat::Diamond(x) => NodeExpr::diamond(subst_path(x, b)),
        Pat::EqD(l, r) => NodeExpr::eq(subst_path(l, b), subst_path(r, b)),
        Pat::NeqD(l, r) => NodeExpr::neq(subst_path(l, b), subst_path(r, b)),
        Pat::True => NodeExpr::True,
        Pat::False => NodeExpr::False,
        _ => unreachable!("path template in node position"),
    }
}

fn subst_path(p: &Pat, b: &Bindings) -> PathExpr {
    match p {
        Pat::PathVar(n) => match &b[*n] {
            Binding::Path(e) => e.clone(),
            _ => unreachable!("sorts checked before substitution"),
        },
        Pat::Eps => PathExpr::Eps,
        Pat::Down => PathExpr::Down,
        Pat::Bot => PathExpr::BotPath,
        Pat::Test(x) => PathExpr::test(subst_node(x, b)),
        Pat::Concat(l, r) => PathExpr::concat(subst_path(l, b), subst_path(r, b)),
        Pat::Union(l, r) => PathExpr::union(subst_path(l, b), subst_path(r, b)),
        _ => unreachable!("node template in path position"),
    }
}

/// Syntactic matching of a template against an expression.  Sugar constants
/// in templates match either their sugared or their expanded form; repeated
/// metavariables must be bound to expressions with equal expansions.
fn match_node(p: &Pat, e: &NodeExpr, b: &mut Bindings) -> bool {
    match (p, e) {
        (Pat::NodeVar(n), _) => bind(b, n, Binding::Node(e.clone())),
        (Pat::LabelVar(n), NodeExpr::Atom(l)) => bind(b, n, Binding::Label(l.clone())),
        (Pat::Label(l), NodeExpr::Atom(m)) => l == m,
        (Pat::True, _) => e.desugar() == NodeExpr::True.desugar(),
        (Pat::False, _) => e.desugar() == NodeExpr::False.desugar(),
        (Pat::Not(x), NodeExpr::Not(y)) => match_node(x, y, b),
        (Pat::And(pl, pr), NodeExpr::And(el, er)) | (Pat::Or(pl, pr), NodeExpr::Or(el, er)) => {
            match_node(pl, el, b) && match_node(pr, er, b)
        }
        (Pat::Diamond(x), NodeExpr::Diamond(y)) => match_path(x, y, b),
        (Pat::EqD(pl, pr), NodeExpr::EqDiamond(el, er)) | (Pat::NeqD(pl, pr), NodeExpr::NeqDiamond(el, er)) => {
            match_path(pl, el, b) && match_path(pr, er, b)
        }
        _ => false,
    }
}

fn match_path(p: &Pat, e: &PathExpr, b: &mut Bindings) -> bool {
    match (p, e) {
        (Pat::PathVar(n), _) => bind(b, n, Binding::Path(e.clone())),
        (Pat::Eps, PathExpr::Eps) | (Pat::Down, PathExpr::Down) => true,
        (Pat::Bot, _) => e.desugar() == PathExpr::BotPath.desugar(),
        (Pat::Test(x), PathExpr::Test(y)) => match_node(x, y, b),
        (Pat::Concat(pl, pr), PathExpr::Concat(el, er)) | (Pat::Union(pl, pr), PathExpr::Union(el, er)) => {
            match_path(pl, el, b) && match_path(pr, er, b)
        }
        _ => false,
    }
}

fn bind(b: &mut Bindings, name: &str, value: Binding) -> bool {
    match b.get(name) {
        Some(old) => desugar_binding(old) == desugar_binding(&value),
        None => {
            b.insert(name.to_string(), value);
            true
        }
    }
}

fn desugar_binding(b: &Binding) -> Binding {
    match b {
        Binding::Node(e) => Binding::Node(e.desugar()),
        Binding::Path(p) => Binding::Path(p.desugar()),
        Binding::Label(l) => Binding::Label(l.clone()),
    }
}

fn match_expr(p: &Pat, e: &Expr, b: &mut Bindings) -> bool {
    match e {
        Expr::Node(n) => p.sort() == Sort::Node && match_node(p, n, b),
        Expr::Path(q) => p.sort() == Sort::Path && match_path(p, q, b),
    }
}

/// A ground equation between two expressions of the same sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    /// Builds an equation, checking that the sides share a sort.
    pub fn new(lhs: Expr, rhs: Expr) -> Result<Self> {
        if lhs.sort() != rhs.sort() {
            return Err(Error::syntax(0, "the two sides of an equation must have the same sort"));
        }
        Ok(Equation { lhs, rhs })
    }

    /// Parses `LHS == RHS`.
    pub fn parse(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<Self> {
        let (l, r) = parse_equation_sides(text, alphabet, fragment)?;
        Equation::new(l, r)
    }

    pub fn sort(&self) -> Sort {
        self.lhs.sort()
    }

    /// The equation with `true`/`false`/`bot` expanded on both sides.
    pub fn desugar(&self) -> Equation {
        Equation {
            lhs: self.lhs.desugar(),
            rhs: self.rhs.desugar(),
        }
    }

    /// Syntactic equality up to sugar.
    pub fn same_as(&self, other: &Equation) -> bool {
        self.desugar() == other.desugar()
    }

    pub fn flipped(&self) -> Equation {
        Equation {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} == {}", self.lhs, self.rhs)
    }
}

/// The schemes available for one alphabet and fragment.
#[derive(Clone, Debug)]
pub struct AxiomSystem {
    pub alphabet: Alphabet,
    pub fragment: Fragment,
    schemes: Vec<Scheme>,
}

impl AxiomSystem {
    /// Tables for `fragment` (inequality axioms only in the full fragment),
    /// followed by the derived laws, in table order.
    pub fn new(alphabet: &Alphabet, fragment: Fragment) -> Self {
        AxiomSystem {
            alphabet: alphabet.clone(),
            fragment,
            schemes: schemes(alphabet, fragment),
        }
    }

    pub fn schemes(&self) -> &[Scheme] {
        &self.schemes
    }

    /// Looks a scheme up by name (e.g. `IsAx5.1`).
    pub fn scheme(&self, name: &str) -> Option<&Scheme> {
        self.schemes.iter().find(|s| s.name == name)
    }

    /// Instantiates the named scheme.
    pub fn instantiate(&self, name: &str, bindings: &Bindings) -> Result<Equation> {
        let s = self
            .scheme(name)
            .ok_or_else(|| Error::Instantiation(format!("unknown scheme `{name}` for this fragment")))?;
        let eq = s.instantiate(bindings)?;
        for side in [&eq.lhs, &eq.rhs] {
            match side {
                Expr::Node(e) => {
                    e.check_alphabet(&self.alphabet)?;
                    e.check_fragment(self.fragment)?;
                }
                Expr::Path(p) => {
                    p.check_alphabet(&self.alphabet)?;
                    p.check_fragment(self.fragment)?;
                }
            }
        }
        Ok(eq)
    }

    /// The first scheme (in table order) of which `eq` is an instance.
    pub fn match_axiom(&self, eq: &Equation) -> Option<(&Scheme, Bindings)> {
        self.schemes.iter().find_map(|s| {
            let mut b = Bindings::new();
            let ok = match_expr(&s.lhs, &eq.lhs, &mut b) && match_expr(&s.rhs, &eq.rhs, &mut b);
            if !ok {
                return None;
            }
            if s.name == "LbAx2" && b.get("a") == b.get("b") {
                return None;
            }
            match s.instantiate(&b) {
                Ok(inst) if inst.same_as(eq) => Some((s, b)),
                _ => None,
            }
        })
    }
}

/// Free-function form of [`AxiomSystem::match_axiom`] returning the scheme name.
pub fn match_axiom(eq: &Equation, alphabet: &Alphabet, fragment: Fragment) -> Option<(String, Bindings)> {
    let sys = AxiomSystem::new(alphabet, fragment);
    sys.match_axiom(eq).map(|(s, b)| (s.name.to_string(), b))
}

/// Free-function form of [`AxiomSystem::instantiate`].
pub fn instantiate(name: &str, bindings: &Bindings, alphabet: &Alphabet, fragment: Fragment) -> Result<Equation> {
    AxiomSystem::new(alphabet, fragment).instantiate(name, bindings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{parse_node, parse_path};

    fn ab() -> Alphabet {
        Alphabet::parse("a,b").unwrap()
    }

    fn path_binding(name: &str, text: &str) -> (String, Binding) {
        (name.to_string(), Binding::Path(parse_path(text, &ab()).unwrap()))
    }

    #[test]
    fn instantiation_examples() {
        let sys = AxiomSystem::new(&ab(), Fragment::EqOnly);
        let b: Bindings = [path_binding("alpha", "down")].into_iter().collect();
        assert_eq!(sys.instantiate("IsAx5.1", &b).unwrap().to_string(), "eps/down == down");
        assert_eq!(sys.instantiate("EqAx1", &b).unwrap().to_string(), "<down = down> == <down>");
        let b: Bindings = [path_binding("alpha", "down"), path_binding("beta", "eps")].into_iter().collect();
        assert_eq!(sys.instantiate("EqAx5", &b).unwrap().to_string(), "<down = eps> | <down> == <down>");
    }

    #[test]
    fn instantiation_errors() {
        let sys = AxiomSystem::new(&ab(), Fragment::EqOnly);
        assert!(sys.instantiate("IsAx5.1", &Bindings::new()).is_err());
        let wrong: Bindings = [("alpha".to_string(), Binding::Node(parse_node("a", &ab()).unwrap()))].into();
        assert!(matches!(sys.instantiate("IsAx5.1", &wrong), Err(Error::Instantiation(_))));
        let la = Binding::Label(ab().get("a").unwrap().clone());
        let same: Bindings = [("a".to_string(), la.clone()), ("b".to_string(), la)].into();
        assert!(matches!(sys.instantiate("LbAx2", &same), Err(Error::Instantiation(_))));
        assert!(sys.instantiate("NeqAx1", &Bindings::new()).is_err(), "inequality axioms absent in eq fragment");
    }

    #[test]
    fn matching_examples() {
        let sys = AxiomSystem::new(&ab(), Fragment::Full);
        let eq = Equation::parse("eps/down == down", &ab(), Fragment::Full).unwrap();
        let (s, b) = sys.match_axiom(&eq).unwrap();
        assert_eq!(s.name, "IsAx5.1");
        assert_eq!(b["alpha"], Binding::Path(PathExpr::Down));
        let eq = Equation::parse("<[true]> == true", &ab(), Fragment::Full).unwrap();
        let (s, b) = sys.match_axiom(&eq).unwrap();
        assert_eq!(s.name, "NdAx2");
        assert_eq!(b["phi"], Binding::Node(NodeExpr::True));
        let eq = Equation::parse("a == b", &ab(), Fragment::Full).unwrap();
        assert!(sys.match_axiom(&eq).is_none());
        // LbAx1 is right-associated in alphabet order.
        let eq = Equation::parse("true == a | b", &ab(), Fragment::Full).unwrap();
        assert_eq!(sys.match_axiom(&eq).unwrap().0.name, "LbAx1");
        // Sugar constants match their expansions.
        let eq = Equation::parse("[<eps>] == eps", &ab(), Fragment::Full).unwrap();
        assert_eq!(sys.match_axiom(&eq).unwrap().0.name, "PrAx2");
    }

    #[test]
    fn pr_ax4_is_absent() {
        let sys = AxiomSystem::new(&ab(), Fragment::Full);
        assert!(sys.scheme("PrAx4").is_none());
        assert!(sys.scheme("IsAx4").is_some());
    }
}
