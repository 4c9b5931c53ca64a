//! Equational derivations: reflexivity, symmetry, transitivity, replacement
//! in a one-hole context, and axiom instances — plus the line-oriented
//! proof-script format.
//!
//! ```text
//! alphabet: a,b
//! fragment: eq
//! goal: eps/down == down/eps
//! 1. axiom IsAx5.1 {alpha=down}
//! 2. axiom IsAx5.2 {alpha=down}
//! 3. sym 2
//! 4. trans 1 3
//! ```

use std::fmt;

use super::{AxiomSystem, Binding, Bindings, Equation, MetaSort};
use crate::ast::{
    parse_node_with_holes, parse_path_with_holes, parse_expr, parse_node_in, parse_path_in, Alphabet, Expr, Fragment,
    NodeExpr, PathExpr, Sort, NODE_HOLE, PATH_HOLE,
};
use crate::error::{Error, Result};

/// One inference step.  Step references are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// An instance of a named scheme.
    Axiom { name: String, bindings: Bindings },
    /// `e == e`.
    Refl(Expr),
    /// From `P == Q` infer `Q == P`.
    Sym(usize),
    /// From `P == Q` and `Q == R` infer `P == R`.
    Trans(usize, usize),
    /// From `P == Q` infer `C[P] == C[Q]` for a context `C` with one hole.
    Congr { premise: usize, context: Expr },
}

/// A goal with its proof steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub goal: Equation,
    pub steps: Vec<Step>,
}

/// Outcome of checking a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    /// `step` is the 1-based offending step, or `None` for the final goal check.
    Rejected { step: Option<usize>, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => write!(f, "accepted"),
            Verdict::Rejected { step: Some(k), reason } => write!(f, "rejected at step {k}: {reason}"),
            Verdict::Rejected { step: None, reason } => write!(f, "rejected at final check: {reason}"),
        }
    }
}

fn reject(step: usize, reason: impl Into<String>) -> Verdict {
    Verdict::Rejected {
        step: Some(step),
        reason: reason.into(),
    }
}

/// Checks every step in order, then compares the last equation with the goal.
pub fn check_derivation(d: &Derivation, fragment: Fragment, alphabet: &Alphabet) -> Verdict {
    let sys = AxiomSystem::new(alphabet, fragment);
    check_steps(&sys, &d.goal, d.steps.iter().map(|s| Ok(s.clone())))
}

fn check_steps(
    sys: &AxiomSystem,
    goal: &Equation,
    steps: impl Iterator<Item = std::result::Result<Step, String>>,
) -> Verdict {
    let mut proved: Vec<Equation> = Vec::new();
    for (i, step) in steps.enumerate() {
        let k = i + 1;
        let step = match step {
            Ok(s) => s,
            Err(reason) => return reject(k, reason),
        };
        let earlier = |j: usize| -> std::result::Result<&Equation, String> {
            if j >= 1 && j < k {
                Ok(&proved[j - 1])
            } else {
                Err(format!("step {j} does not precede step {k}"))
            }
        };
        let eq = match &step {
            Step::Axiom { name, bindings } => match sys.instantiate(name, bindings) {
                Ok(eq) => eq,
                Err(e) => return reject(k, e.to_string()),
            },
            Step::Refl(e) => {
                if let Err(err) = check_expr(sys, e) {
                    return reject(k, err.to_string());
                }
                Equation {
                    lhs: e.clone(),
                    rhs: e.clone(),
                }
            }
            Step::Sym(j) => match earlier(*j) {
                Ok(eq) => eq.flipped(),
                Err(r) => return reject(k, r),
            },
            Step::Trans(j, l) => {
                let (a, b) = match (earlier(*j), earlier(*l)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(r), _) | (_, Err(r)) => return reject(k, r),
                };
                if a.rhs.desugar() != b.lhs.desugar() {
                    return reject(
                        k,
                        format!("transitivity needs matching middle terms: `{}` vs `{}`", a.rhs, b.lhs),
                    );
                }
                Equation {
                    lhs: a.lhs.clone(),
                    rhs: b.rhs.clone(),
                }
            }
            Step::Congr { premise, context } => {
                let p = match earlier(*premise) {
                    Ok(p) => p.clone(),
                    Err(r) => return reject(k, r),
                };
                match plug_both(context, &p) {
                    Ok(eq) => {
                        if let Err(err) = check_expr(sys, &eq.lhs).and_then(|_| check_expr(sys, &eq.rhs)) {
                            return reject(k, err.to_string());
                        }
                        eq
                    }
                    Err(r) => return reject(k, r),
                }
            }
        };
        proved.push(eq);
    }
    match proved.last() {
        None => Verdict::Rejected {
            step: None,
            reason: "the derivation has no steps".into(),
        },
        Some(last) if last.same_as(goal) => Verdict::Accepted,
        Some(last) => Verdict::Rejected {
            step: None,
            reason: format!("goal mismatch: derived `{last}`, goal is `{goal}`"),
        },
    }
}

fn check_expr(sys: &AxiomSystem, e: &Expr) -> Result<()> {
    match e {
        Expr::Node(n) => {
            n.check_alphabet(&sys.alphabet)?;
            n.check_fragment(sys.fragment)
        }
        Expr::Path(p) => {
            p.check_alphabet(&sys.alphabet)?;
            p.check_fragment(sys.fragment)
        }
    }
}

/// Counts holes of each sort in a context.
fn holes(e: &Expr) -> (usize, usize) {
    fn node(e: &NodeExpr, acc: &mut (usize, usize)) {
        match e {
            NodeExpr::Atom(l) if l.name() == NODE_HOLE => acc.0 += 1,
            NodeExpr::Atom(_) | NodeExpr::True | NodeExpr::False => {}
            NodeExpr::Not(x) => node(x, acc),
            NodeExpr::And(l, r) | NodeExpr::Or(l, r) => {
                node(l, acc);
                node(r, acc);
            }
            NodeExpr::Diamond(p) => path(p, acc),
            NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => {
                path(l, acc);
                path(r, acc);
            }
        }
    }
    fn path(p: &PathExpr, acc: &mut (usize, usize)) {
        match p {
            PathExpr::Test(e) if matches!(&**e, NodeExpr::Atom(l) if l.name() == PATH_HOLE) => acc.1 += 1,
            PathExpr::Test(e) => node(e, acc),
            PathExpr::Concat(l, r) | PathExpr::Union(l, r) => {
                path(l, acc);
                path(r, acc);
            }
            _ => {}
        }
    }
    let mut acc = (0, 0);
    match e {
        Expr::Node(n) => node(n, &mut acc),
        Expr::Path(p) => path(p, &mut acc),
    }
    acc
}

fn plug_both(context: &Expr, premise: &Equation) -> std::result::Result<Equation, String> {
    let (nh, ph) = holes(context);
    if nh + ph != 1 {
        return Err(format!("a context must contain exactly one hole, found {}", nh + ph));
    }
    let hole_sort = if nh == 1 { Sort::Node } else { Sort::Path };
    if hole_sort != premise.sort() {
        return Err(format!(
            "the hole has {} sort but the premise equates {} expressions",
            hole_sort.name(),
            premise.sort().name()
        ));
    }
    Ok(Equation {
        lhs: plug(context, &premise.lhs),
        rhs: plug(context, &premise.rhs),
    })
}

fn plug(context: &Expr, fill: &Expr) -> Expr {
    fn node(e: &NodeExpr, fill: &Expr) -> NodeExpr {
        match e {
            NodeExpr::Atom(l) if l.name() == NODE_HOLE => match fill {
                Expr::Node(n) => n.clone(),
                Expr::Path(_) => unreachable!("hole sort checked"),
            },
            NodeExpr::Atom(_) | NodeExpr::True | NodeExpr::False => e.clone(),
            NodeExpr::Not(x) => NodeExpr::not(node(x, fill)),
            NodeExpr::And(l, r) => NodeExpr::and(node(l, fill), node(r, fill)),
            NodeExpr::Or(l, r) => NodeExpr::or(node(l, fill), node(r, fill)),
            NodeExpr::Diamond(p) => NodeExpr::diamond(path(p, fill)),
            NodeExpr::EqDiamond(l, r) => NodeExpr::eq(path(l, fill), path(r, fill)),
            NodeExpr::NeqDiamond(l, r) => NodeExpr::neq(path(l, fill), path(r, fill)),
        }
    }
    fn path(p: &PathExpr, fill: &Expr) -> PathExpr {
        match p {
            PathExpr::Test(e) if matches!(&**e, NodeExpr::Atom(l) if l.name() == PATH_HOLE) => match fill {
                Expr::Path(q) => q.clone(),
                Expr::Node(_) => unreachable!("hole sort checked"),
            },
            PathExpr::Test(e) => PathExpr::test(node(e, fill)),
            PathExpr::Concat(l, r) => PathExpr::concat(path(l, fill), path(r, fill)),
            PathExpr::Union(l, r) => PathExpr::union(path(l, fill), path(r, fill)),
            other => other.clone(),
        }
    }
    match context {
        Expr::Node(n) => Expr::Node(node(n, fill)),
        Expr::Path(p) => Expr::Path(path(p, fill)),
    }
}

/// A parsed proof script.  Malformed step lines are kept as errors so that
/// checking rejects the script at exactly that step.
#[derive(Clone, Debug)]
pub struct ProofScript {
    pub alphabet: Alphabet,
    pub fragment: Fragment,
    pub goal: Equation,
    pub steps: Vec<std::result::Result<Step, String>>,
}

impl ProofScript {
    /// Checks the script.
    pub fn check(&self) -> Verdict {
        let sys = AxiomSystem::new(&self.alphabet, self.fragment);
        check_steps(&sys, &self.goal, self.steps.iter().cloned())
    }

    /// The well-formed derivation, if every step parsed.
    pub fn derivation(&self) -> Option<Derivation> {
        let steps = self.steps.iter().cloned().collect::<std::result::Result<Vec<_>, _>>().ok()?;
        Some(Derivation {
            goal: self.goal.clone(),
            steps,
        })
    }
}

/// Parses a proof script.  Header problems are errors; step problems become
/// rejections when the script is checked.
pub fn parse_script(text: &str) -> Result<ProofScript> {
    let mut alphabet = None;
    let mut fragment = None;
    let mut goal_text = None;
    let mut step_lines: Vec<(usize, &str)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            alphabet = Some(Alphabet::parse(rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("fragment:") {
            fragment = Some(Fragment::parse(rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("goal:") {
            goal_text = Some(rest.trim().to_string());
        } else {
            step_lines.push((lineno + 1, line));
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::syntax(0, "missing `alphabet:` header"))?;
    let fragment = fragment.ok_or_else(|| Error::syntax(0, "missing `fragment:` header"))?;
    let goal_text = goal_text.ok_or_else(|| Error::syntax(0, "missing `goal:` header"))?;
    let goal = Equation::parse(&goal_text, &alphabet, fragment)?;
    let sys = AxiomSystem::new(&alphabet, fragment);
    let steps = step_lines
        .iter()
        .enumerate()
        .map(|(i, (lineno, line))| parse_step(&sys, i + 1, line).map_err(|r| format!("line {lineno}: {r}")))
        .collect();
    Ok(ProofScript {
        alphabet,
        fragment,
        goal,
        steps,
    })
}

/// Parses and checks a script in one go.
pub fn check_script(text: &str) -> Result<Verdict> {
    Ok(parse_script(text)?.check())
}

fn parse_step(sys: &AxiomSystem, expected: usize, line: &str) -> std::result::Result<Step, String> {
    let (num, rest) = line.split_once('.').ok_or("expected `K. <rule> ...`")?;
    let k: usize = num.trim().parse().map_err(|_| format!("`{num}` is not a step number"))?;
    if k != expected {
        return Err(format!("steps must be numbered consecutively: expected {expected}, found {k}"));
    }
    let rest = rest.trim();
    let (rule, args) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let args = args.trim();
    let index = |s: &str| s.parse::<usize>().map_err(|_| format!("`{s}` is not a step number"));
    match rule {
        "axiom" => {
            let (name, binds) = match args.split_once('{') {
                Some((n, b)) => (n.trim(), Some(b)),
                None => (args, None),
            };
            let scheme = sys
                .scheme(name)
                .ok_or_else(|| format!("unknown scheme `{name}` for the {} fragment", sys.fragment.name()))?;
            let mut bindings = Bindings::new();
            if let Some(b) = binds {
                let body = b.trim_end().strip_suffix('}').ok_or("unterminated binding list")?;
                for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (var, text) = item.split_once('=').ok_or_else(|| format!("expected `x=EXPR`, found `{item}`"))?;
                    let var = var.trim();
                    let sort = scheme
                        .metavars
                        .iter()
                        .find(|(m, _)| *m == var)
                        .map(|(_, s)| *s)
                        .ok_or_else(|| format!("`{var}` is not a metavariable of {name}"))?;
                    let text = text.trim();
                    let value = match sort {
                        MetaSort::Node => Binding::Node(
                            parse_node_in(text, &sys.alphabet, sys.fragment)
                                .map_err(|e| format!("binding for `{var}` is not a node expression: {e}"))?,
                        ),
                        MetaSort::Path => Binding::Path(
                            parse_path_in(text, &sys.alphabet, sys.fragment)
                                .map_err(|e| format!("binding for `{var}` is not a path expression: {e}"))?,
                        ),
                        MetaSort::Label => Binding::Label(
                            sys.alphabet
                                .get(text)
                                .cloned()
                                .ok_or_else(|| format!("binding for `{var}` is not a label: `{text}`"))?,
                        ),
                    };
                    if bindings.insert(var.to_string(), value).is_some() {
                        return Err(format!("`{var}` bound twice"));
                    }
                }
            }
            Ok(Step::Axiom {
                name: name.to_string(),
                bindings,
            })
        }
        "refl" => Ok(Step::Refl(
            parse_expr(args, &sys.alphabet, sys.fragment).map_err(|e| e.to_string())?,
        )),
        "sym" => Ok(Step::Sym(index(args)?)),
        "trans" => {
            let parts: Vec<&str> = args.split_whitespace().collect();
            match parts.as_slice() {
                [j, l] => Ok(Step::Trans(index(j)?, index(l)?)),
                _ => Err("expected `trans J L`".into()),
            }
        }
        "congr" => {
            let (j, ctx) = args.split_once(" in ").ok_or("expected `congr J in CONTEXT`")?;
            let premise = index(j.trim())?;
            let ctx = ctx.trim();
            let context = match parse_node_with_holes(ctx, &sys.alphabet, sys.fragment) {
                Ok((e, _)) => Expr::Node(e),
                Err(node_err) => match parse_path_with_holes(ctx, &sys.alphabet, sys.fragment) {
                    Ok((p, _)) => Expr::Path(p),
                    Err(_) => return Err(format!("bad context: {node_err}")),
                },
            };
            Ok(Step::Congr { premise, context })
        }
        other => Err(format!("unknown rule `{other}`")),
    }
}
