//! Satisfiability, validity and equivalence.
//!
//! Within the level cap, decisions go through normalization: an expression
//! is satisfiable iff its normal form is a non-empty disjunction, and two
//! expressions are equivalent iff their normal forms at the common level
//! coincide.  Witnesses are canonical models, always re-checked with the
//! evaluator before they are returned.
//!
//! When normalization exceeds its budget (typically at downward depth 2,
//! where `N_2` cannot be enumerated), the decision falls back to a search
//! over the small trees of [`crate::normal_form::Limits::search`].  A model
//! or separating tree found this way is a definite answer; if none exists the
//! original budget error is returned, because absence within the bounds
//! proves nothing.

use std::fmt;

use crate::ast::{NodeExpr, PathExpr};
use crate::canonical::model;
use crate::error::{Error, Result};
use crate::normal_form::{Reasoner, Typer};
use crate::oracle::{brute_sat_in, brute_separate};
use crate::semantics::{DataTree, Evaluator, NodeId};

/// How a witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Canonical model of a normal-form disjunct.
    Canonical,
    /// Canonical model of the type of a node found by bounded search.
    CanonicalFromSearch,
    /// A tree found by bounded search, used as is.
    Search,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Canonical => "canonical model",
            Method::CanonicalFromSearch => "canonical model of a searched type",
            Method::Search => "bounded search",
        })
    }
}

/// A verified model: the root satisfies the formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub tree: DataTree,
    pub level: usize,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatVerdict {
    Sat(Witness),
    Unsat,
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Equiv,
    /// The two expressions differ at `node` of `tree`.
    Differ { tree: DataTree, node: NodeId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathEquivVerdict {
    Equiv,
    /// Exactly one of the two paths relates `from` to `to` in `tree`.
    Differ { tree: DataTree, from: NodeId, to: NodeId },
}

fn holds(t: &DataTree, x: NodeId, phi: &NodeExpr) -> bool {
    let phi = phi.desugar();
    Evaluator::new(t).holds(x, &phi)
}

fn relates(t: &DataTree, x: NodeId, y: NodeId, alpha: &PathExpr) -> bool {
    let alpha = alpha.desugar();
    Evaluator::new(t).paths(&alpha)[x.0].contains(y.0)
}

/// Decides satisfiability of `φ`.
pub fn sat(r: &Reasoner, phi: &NodeExpr) -> Result<SatVerdict> {
    sat_traced(r, phi, &mut Vec::new())
}

/// Like [`sat`], appending normalization and construction steps to `trace`.
pub fn sat_traced(r: &Reasoner, phi: &NodeExpr, trace: &mut Vec<String>) -> Result<SatVerdict> {
    let nf = match r.normalize_node(phi) {
        Ok(nf) => nf,
        Err(e) if e.is_budget() => return sat_by_search(r, phi, e, trace),
        Err(e) => return Err(e),
    };
    trace.extend(nf.log.iter().cloned());
    let Some(first) = nf.forms.first() else {
        trace.push("no consistent disjunct: UNSAT".into());
        return Ok(SatVerdict::Unsat);
    };
    trace.push(format!("{} disjunct(s); building the model of the first", nf.forms.len()));
    let tree = crate::canonical::build_model_traced(r, first, trace)?;
    if !holds(&tree, tree.root(), phi) {
        return Err(Error::Internal(format!("canonical model of `{first}` does not satisfy `{phi}`")));
    }
    Ok(SatVerdict::Sat(Witness {
        tree,
        level: nf.level,
        method: Method::Canonical,
    }))
}

fn sat_by_search(r: &Reasoner, phi: &NodeExpr, budget: Error, trace: &mut Vec<String>) -> Result<SatVerdict> {
    trace.push(format!("normalization out of budget ({budget}); searching {}", r.limits().search));
    let trees = r.search_trees();
    let Some(found) = brute_sat_in(phi, &trees) else {
        return Err(budget);
    };
    let level = phi.dd();
    let ty = Typer::new(found, r.fragment()).type_at(found.root(), level);
    match model(r, &ty) {
        Ok(m) if holds(&m, m.root(), phi) => {
            trace.push(format!("found a model; rebuilt it canonically from its level-{level} type"));
            Ok(SatVerdict::Sat(Witness {
                tree: (*m).clone(),
                level,
                method: Method::CanonicalFromSearch,
            }))
        }
        Ok(_) => Err(Error::Internal(format!("canonical model of the type `{ty}` does not satisfy `{phi}`"))),
        Err(e) => {
            trace.push(format!("canonical rebuild unavailable ({e}); returning the searched tree"));
            Ok(SatVerdict::Sat(Witness {
                tree: found.clone(),
                level,
                method: Method::Search,
            }))
        }
    }
}

/// `φ` is valid iff `¬φ` is unsatisfiable.
pub fn valid(r: &Reasoner, phi: &NodeExpr) -> Result<bool> {
    Ok(!sat(r, &NodeExpr::not(phi.clone()))?.is_sat())
}

/// Decides node equivalence; a `Differ` witness is evaluator-verified.
pub fn equiv_node(r: &Reasoner, phi: &NodeExpr, psi: &NodeExpr) -> Result<EquivVerdict> {
    let n = phi.dd().max(psi.dd());
    let both = r.normalize_node_at(phi, n).and_then(|a| Ok((a, r.normalize_node_at(psi, n)?)));
    let (a, b) = match both {
        Ok(ab) => ab,
        Err(e) if e.is_budget() => {
            let trees = r.search_trees();
            return match brute_separate(phi, psi, &trees) {
                Some((t, x)) => Ok(EquivVerdict::Differ { tree: t.clone(), node: x }),
                None => Err(e),
            };
        }
        Err(e) => return Err(e),
    };
    if a.forms == b.forms {
        return Ok(EquivVerdict::Equiv);
    }
    let only = a
        .forms
        .iter()
        .find(|f| !b.forms.contains(f))
        .or_else(|| b.forms.iter().find(|f| !a.forms.contains(f)))
        .expect("the sets differ");
    let tree = (*model(r, only)?).clone();
    let root = tree.root();
    if holds(&tree, root, phi) == holds(&tree, root, psi) {
        return Err(Error::Internal(format!("model of `{only}` does not separate the expressions")));
    }
    Ok(EquivVerdict::Differ { tree, node: root })
}

/// Decides path equivalence; a `Differ` witness is evaluator-verified.
pub fn equiv_path(r: &Reasoner, alpha: &PathExpr, beta: &PathExpr) -> Result<PathEquivVerdict> {
    let n = alpha.dd().max(beta.dd());
    let both = r
        .normalize_path_at(alpha, n)
        .and_then(|a| Ok((a.pairs(r)?, r.normalize_path_at(beta, n)?.pairs(r)?)));
    let (a, b) = match both {
        Ok(ab) => ab,
        Err(e) if e.is_budget() => {
            return match separate_paths(alpha, beta, &r.search_trees()) {
                Some(v) => Ok(v),
                None => Err(e),
            };
        }
        Err(e) => return Err(e),
    };
    if a == b {
        return Ok(PathEquivVerdict::Equiv);
    }
    let (psi, p) = a.symmetric_difference(&b).next().expect("the sets differ");
    let tree = (*model(r, psi)?).clone();
    let root = tree.root();
    let to = Typer::new(&tree, r.fragment())
        .endpoints(root, p)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("model of `{psi}` has no endpoint of {p}")))?;
    if relates(&tree, root, to, alpha) == relates(&tree, root, to, beta) {
        return Err(Error::Internal(format!("model of `{psi}` does not separate the paths")));
    }
    Ok(PathEquivVerdict::Differ { tree, from: root, to })
}

fn separate_paths(alpha: &PathExpr, beta: &PathExpr, trees: &[DataTree]) -> Option<PathEquivVerdict> {
    let (alpha, beta) = (alpha.desugar(), beta.desugar());
    trees.iter().find_map(|t| {
        let mut ev = Evaluator::new(t);
        let (ra, rb) = (ev.paths(&alpha), ev.paths(&beta));
        t.ids().find_map(|x| {
            let y = ra[x.0].symmetric_difference(&rb[x.0]).next()?;
            Some(PathEquivVerdict::Differ {
                tree: t.clone(),
                from: x,
                to: NodeId(y),
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{parse_node_in, parse_path_in, Alphabet, Fragment};

    fn r(f: Fragment, labels: &str) -> Reasoner {
        Reasoner::new(f, Alphabet::parse(labels).unwrap())
    }

    #[test]
    fn sat_and_unsat() {
        let r = r(Fragment::Full, "a,b");
        let p = |s: &str| parse_node_in(s, r.alphabet(), r.fragment()).unwrap();
        assert!(sat(&r, &p("<down[a] != down[b]> & !<down[a] = down[b]>")).unwrap().is_sat());
        assert_eq!(sat(&r, &p("<eps != eps>")).unwrap(), SatVerdict::Unsat);
        assert!(valid(&r, &p("<down = down> | !<down>")).unwrap());
        assert!(!valid(&r, &p("<down[a]>")).unwrap());
    }

    #[test]
    fn depth_two_sat_falls_back_to_search() {
        let r = r(Fragment::EqOnly, "a,b");
        let phi = parse_node_in("<down[a]/down[b] = eps>", r.alphabet(), r.fragment()).unwrap();
        let SatVerdict::Sat(w) = sat(&r, &phi).unwrap() else {
            panic!("expected SAT");
        };
        assert!(w.tree.len() >= 3);
        assert!(holds(&w.tree, w.tree.root(), &phi));
    }

    #[test]
    fn path_equivalences() {
        let r = r(Fragment::EqOnly, "a,b");
        let p = |s: &str| parse_path_in(s, r.alphabet(), r.fragment()).unwrap();
        assert_eq!(equiv_path(&r, &p("eps/down"), &p("down")).unwrap(), PathEquivVerdict::Equiv);
        assert_eq!(equiv_path(&r, &p("down[a] + down[b]"), &p("down")).unwrap(), PathEquivVerdict::Equiv);
        assert!(matches!(
            equiv_path(&r, &p("down[a]"), &p("down")).unwrap(),
            PathEquivVerdict::Differ { .. }
        ));
        assert!(matches!(
            equiv_path(&r, &p("[<down>]"), &p("eps")).unwrap(),
            PathEquivVerdict::Differ { .. }
        ));
    }
}
