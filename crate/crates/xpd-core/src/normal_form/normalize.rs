//! Executable normalization.
//!
//! A node expression of downward depth at most `n` is mapped to the set of
//! members of `N_n` it is equivalent to the disjunction of; a path expression
//! to a set of guarded normal paths `[ψ]p` (guard absent when trivial).  The
//! recursion follows the inductive proof: labels split by `LbAx1`, Boolean
//! connectives act as set operations over the partition `N_n`, `⟨α⟩` becomes
//! `⟨α=α⟩` (`EqAx1`), a data diamond keeps the members whose atoms match a pair
//! of disjuncts (`EqAx3`/`EqAx4`, `NeqAx2`/`NeqAx3`), `↓` splits by child type
//! (`PrAx3`), tests become guards (`IsAx4`–`IsAx6`) and concatenation
//! distributes (`Der21`).  Disjuncts whose path cannot be realized are pruned.

use std::collections::BTreeSet;

use super::{NormalForm, NormalPath, Reasoner};
use crate::ast::{DataOp, Fragment, NodeExpr, PathExpr};
use crate::error::{Error, Result};

/// The normal form of a node expression at some level, with a step log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedNode {
    pub level: usize,
    /// Members of `N_level` in ascending order; empty iff inconsistent.
    pub forms: Vec<NormalForm>,
    /// One line per rewriting step, naming the axioms used.
    pub log: Vec<String>,
}

impl NormalizedNode {
    /// The disjunction as an expression (`false` when empty).
    pub fn to_expr(&self, r: &Reasoner) -> Result<NodeExpr> {
        Ok(NodeExpr::or_all(self.forms.iter().map(|f| f.to_expr(r)).collect::<Result<Vec<_>>>()?))
    }
}

/// A guarded disjunct `[guard]path`; an absent guard is trivial.
pub type GuardedPath = (Option<NormalForm>, NormalPath);

/// The normal form of a path expression, with a step log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedPath {
    pub level: usize,
    pub disjuncts: Vec<GuardedPath>,
    pub log: Vec<String>,
}

impl NormalizedPath {
    /// Canonical denotation: every `(type of the source, path)` pair covered,
    /// with absent guards expanded to all members of `N_level` realizing the path.
    pub fn pairs(&self, r: &Reasoner) -> Result<BTreeSet<(NormalForm, NormalPath)>> {
        let all = r.enum_n(self.level)?;
        let mut out = BTreeSet::new();
        for (g, p) in &self.disjuncts {
            match g {
                Some(g) => {
                    out.insert((g.clone(), p.clone()));
                }
                None => {
                    for psi in all.iter().filter(|psi| psi.holds(DataOp::Eq, p, p)) {
                        out.insert((psi.clone(), p.clone()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The union as an expression (`bot` when empty).
    pub fn to_expr(&self, r: &Reasoner) -> Result<PathExpr> {
        let mut items = Vec::new();
        for (g, p) in &self.disjuncts {
            let p = p.to_expr(r)?;
            items.push(match g {
                Some(g) => PathExpr::concat(PathExpr::test(g.to_expr(r)?), p),
                None => p,
            });
        }
        Ok(items.into_iter().rev().reduce(|acc, e| PathExpr::union(e, acc)).unwrap_or(PathExpr::BotPath))
    }
}

impl Reasoner {
    fn check_input(&self, used_neq: bool, labels: &mut dyn Iterator<Item = crate::ast::Label>) -> Result<()> {
        if used_neq && self.fragment() == Fragment::EqOnly {
            return Err(Error::FragmentViolation);
        }
        for l in labels {
            if !self.alphabet().contains(&l) {
                return Err(Error::UnknownLabel(l.name().to_string()));
            }
        }
        Ok(())
    }

    /// Normalizes at level `dd(φ)`.
    pub fn normalize_node(&self, phi: &NodeExpr) -> Result<NormalizedNode> {
        self.normalize_node_at(phi, phi.dd())
    }

    /// Normalizes at level `n ≥ dd(φ)`.
    pub fn normalize_node_at(&self, phi: &NodeExpr, n: usize) -> Result<NormalizedNode> {
        if n < phi.dd() {
            return Err(Error::LevelMismatch {
                expected: phi.dd(),
                found: n,
            });
        }
        self.check_input(phi.uses_neq(), &mut node_labels(phi).into_iter())?;
        let mut log = Vec::new();
        let forms = self.norm_node(phi, n, &mut log)?.into_iter().collect();
        Ok(NormalizedNode { level: n, forms, log })
    }

    /// Normalizes at level `dd(α)`.
    pub fn normalize_path(&self, alpha: &PathExpr) -> Result<NormalizedPath> {
        self.normalize_path_at(alpha, alpha.dd())
    }

    /// Normalizes at level `n ≥ dd(α)`.
    pub fn normalize_path_at(&self, alpha: &PathExpr, n: usize) -> Result<NormalizedPath> {
        if n < alpha.dd() {
            return Err(Error::LevelMismatch {
                expected: alpha.dd(),
                found: n,
            });
        }
        self.check_input(alpha.uses_neq(), &mut path_labels(alpha).into_iter())?;
        let mut log = Vec::new();
        let disjuncts = self.norm_path(alpha, n, &mut log)?.into_iter().collect();
        Ok(NormalizedPath { level: n, disjuncts, log })
    }

    fn norm_node(&self, e: &NodeExpr, n: usize, log: &mut Vec<String>) -> Result<BTreeSet<NormalForm>> {
        let all = self.enum_n(n)?;
        let out: BTreeSet<NormalForm> = match e {
            NodeExpr::True => all.iter().cloned().collect(),
            NodeExpr::False => BTreeSet::new(),
            NodeExpr::Atom(a) => {
                let s: BTreeSet<_> = all.iter().filter(|p| p.label() == a).cloned().collect();
                log.push(format!("LbAx1 + completion: `{a}` at level {n} -> {} members", s.len()));
                s
            }
            NodeExpr::Not(inner) => {
                let s = self.norm_node(inner, n, log)?;
                log.push(format!("NdAx (complement over N_{n}): `{e}`"));
                all.iter().filter(|p| !s.contains(*p)).cloned().collect()
            }
            NodeExpr::And(l, r) => {
                let a = self.norm_node(l, n, log)?;
                let b = self.norm_node(r, n, log)?;
                log.push(format!("distribution + exclusion pruning: `{e}`"));
                a.intersection(&b).cloned().collect()
            }
            NodeExpr::Or(l, r) => {
                let mut a = self.norm_node(l, n, log)?;
                a.extend(self.norm_node(r, n, log)?);
                a
            }
            NodeExpr::Diamond(p) => {
                log.push(format!("EqAx1: `{e}` -> `<{p} = {p}>`"));
                self.norm_data(DataOp::Eq, p, p, n, log)?
            }
            NodeExpr::EqDiamond(l, r) => self.norm_data(DataOp::Eq, l, r, n, log)?,
            NodeExpr::NeqDiamond(l, r) => self.norm_data(DataOp::Neq, l, r, n, log)?,
        };
        Ok(out)
    }

    fn norm_data(
        &self,
        op: DataOp,
        l: &PathExpr,
        r: &PathExpr,
        n: usize,
        log: &mut Vec<String>,
    ) -> Result<BTreeSet<NormalForm>> {
        let left = self.norm_path(l, n, log)?;
        let right = if l == r { left.clone() } else { self.norm_path(r, n, log)? };
        let axioms = match op {
            DataOp::Eq => "EqAx3/EqAx4",
            DataOp::Neq => "NeqAx2/NeqAx3",
        };
        log.push(format!(
            "{axioms}: <{l} {} {r}> over {} x {} disjuncts",
            op.symbol(),
            left.len(),
            right.len()
        ));
        let all = self.enum_n(n)?;
        let fits = |psi: &NormalForm, g: &Option<NormalForm>| g.as_ref().is_none_or(|g| g == psi);
        Ok(all
            .iter()
            .filter(|psi| {
                left.iter().any(|(g1, p1)| {
                    fits(psi, g1)
                        && right
                            .iter()
                            .any(|(g2, p2)| fits(psi, g2) && psi.holds(op, p1, p2))
                })
            })
            .cloned()
            .collect())
    }

    fn norm_path(&self, p: &PathExpr, n: usize, log: &mut Vec<String>) -> Result<BTreeSet<GuardedPath>> {
        let out = match p {
            PathExpr::Eps => BTreeSet::from([(None, NormalPath::eps(n))]),
            PathExpr::BotPath => BTreeSet::new(),
            PathExpr::Down => {
                if n == 0 {
                    return Err(Error::LevelMismatch { expected: 1, found: 0 });
                }
                let lower = self.enum_n(n - 1)?;
                log.push(format!("PrAx3: `down` splits into {} child types", lower.len()));
                lower
                    .iter()
                    .map(|theta| Ok((None, NormalPath::step(theta.clone(), &NormalPath::eps(n - 1))?)))
                    .collect::<Result<_>>()?
            }
            PathExpr::Test(phi) => {
                let s = self.norm_node(phi, n, log)?;
                log.push(format!("IsAx4-IsAx6: `[{phi}]` becomes {} guards", s.len()));
                s.into_iter().map(|g| (Some(g), NormalPath::eps(n))).collect()
            }
            PathExpr::Union(a, b) => {
                let mut s = self.norm_path(a, n, log)?;
                s.extend(self.norm_path(b, n, log)?);
                s
            }
            PathExpr::Concat(a, b) => {
                let first = self.norm_path(a, n, log)?;
                let mut out = BTreeSet::new();
                let mut rests: std::collections::BTreeMap<usize, BTreeSet<GuardedPath>> = Default::default();
                for (g1, p1) in &first {
                    let k = p1.len();
                    if let std::collections::btree_map::Entry::Vacant(e) = rests.entry(k) {
                        e.insert(self.norm_path(b, n - k, log)?);
                    }
                    for (g2, p2) in &rests[&k] {
                        if let Some(d) = concat(g1, p1, g2, p2) {
                            if realizable(&d) {
                                out.insert(d);
                            }
                        }
                    }
                }
                log.push(format!("Der21: `{p}` -> {} disjuncts", out.len()));
                out
            }
        };
        Ok(out)
    }
}

/// `[g1]p1 / [g2]p2` as one guarded path, or `None` when the guards clash.
fn concat(g1: &Option<NormalForm>, p1: &NormalPath, g2: &Option<NormalForm>, p2: &NormalPath) -> Option<GuardedPath> {
    if p1.is_eps() {
        let guard = match (g1, g2) {
            (None, g) | (g, None) => g.clone(),
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => return None,
        };
        return Some((guard, p2.clone()));
    }
    let last = p1.steps().last().expect("non-empty");
    if g2.as_ref().is_some_and(|g| g != last) {
        return None;
    }
    let mut steps = p1.steps().to_vec();
    steps.extend(p2.steps().iter().cloned());
    Some((g1.clone(), NormalPath::from_parts(steps, p1.level())))
}

/// Every step must see the rest of the path, and the guard the whole path.
fn realizable((g, p): &GuardedPath) -> bool {
    let steps_ok = (0..p.len()).all(|i| {
        let rest = p.suffix(i + 1);
        p.steps()[i].holds(DataOp::Eq, &rest, &rest)
    });
    steps_ok && g.as_ref().is_none_or(|g| g.holds(DataOp::Eq, p, p))
}

fn node_labels(e: &NodeExpr) -> Vec<crate::ast::Label> {
    let mut out = Vec::new();
    collect_node(e, &mut out);
    out
}

fn path_labels(p: &PathExpr) -> Vec<crate::ast::Label> {
    let mut out = Vec::new();
    collect_path(p, &mut out);
    out
}

fn collect_node(e: &NodeExpr, out: &mut Vec<crate::ast::Label>) {
    match e {
        NodeExpr::Atom(a) => out.push(a.clone()),
        NodeExpr::Not(x) => collect_node(x, out),
        NodeExpr::And(l, r) | NodeExpr::Or(l, r) => {
            collect_node(l, out);
            collect_node(r, out);
        }
        NodeExpr::Diamond(p) => collect_path(p, out),
        NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => {
            collect_path(l, out);
            collect_path(r, out);
        }
        NodeExpr::True | NodeExpr::False => {}
    }
}

fn collect_path(p: &PathExpr, out: &mut Vec<crate::ast::Label>) {
    match p {
        PathExpr::Test(e) => collect_node(e, out),
        PathExpr::Concat(l, r) | PathExpr::Union(l, r) => {
            collect_path(l, out);
            collect_path(r, out);
        }
        PathExpr::Eps | PathExpr::Down | PathExpr::BotPath => {}
    }
}
