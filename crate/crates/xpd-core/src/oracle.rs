//! Brute-force reference: exhaustive enumeration of small data trees, and
//! decisions by plain evaluation over them.  Nothing here uses normal forms,
//! so it serves as an independent check of [`crate::decision`].

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{Alphabet, DataOp, Fragment, NodeExpr};
use crate::decision::{self, EquivVerdict, SatVerdict};
use crate::error::Result;
use crate::generate::rng;
use crate::normal_form::Reasoner;
use crate::semantics::{print_tree, DataTree, Evaluator, NodeId};

/// Enumeration bounds.  Every negative oracle answer is relative to these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_nodes: usize,
    pub max_depth: usize,
    pub max_branch: usize,
    pub max_classes: usize,
}

impl Default for Bounds {
    /// Large enough for every level-1 type over two labels in both fragments.
    fn default() -> Self {
        Bounds {
            max_nodes: 5,
            max_depth: 2,
            max_branch: 4,
            max_classes: 5,
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes<={} depth<={} branch<={} classes<={}",
            self.max_nodes, self.max_depth, self.max_branch, self.max_classes
        )
    }
}

/// An unlabeled unordered shape: the children's shapes, sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Shape(Vec<Shape>);

impl Shape {
    fn size(&self) -> usize {
        1 + self.0.iter().map(Shape::size).sum::<usize>()
    }
}

/// All shapes with exactly `n` nodes, height at most `depth` and at most
/// `branch` children per node, each listed once.
fn shapes(n: usize, depth: usize, branch: usize) -> Vec<Shape> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Shape(Vec::new())];
    }
    if depth == 0 {
        return Vec::new();
    }
    let pool: Vec<Shape> = (1..n).flat_map(|k| shapes(k, depth - 1, branch)).collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    multisets(&pool, 0, n - 1, branch, &mut stack, &mut out);
    out
}

/// Non-decreasing index sequences over `pool` whose sizes sum to `left`.
fn multisets(pool: &[Shape], from: usize, left: usize, branch: usize, cur: &mut Vec<usize>, out: &mut Vec<Shape>) {
    if left == 0 {
        out.push(Shape(cur.iter().map(|&i| pool[i].clone()).collect()));
        return;
    }
    if cur.len() == branch {
        return;
    }
    for i in from..pool.len() {
        let s = pool[i].size();
        if s <= left {
            cur.push(i);
            multisets(pool, i, left - s, branch, cur, out);
            cur.pop();
        }
    }
}

/// Parent of each node in preorder (`None` for the root).
fn parents(shape: &Shape) -> Vec<Option<usize>> {
    fn walk(s: &Shape, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
        let me = out.len();
        out.push(parent);
        for c in &s.0 {
            walk(c, Some(me), out);
        }
    }
    let mut out = Vec::new();
    walk(shape, None, &mut out);
    out
}

/// Canonical text of a tree up to child reordering and class renaming: the
/// least printout over all child orders, classes numbered by first visit.
pub fn canonical_key(t: &DataTree) -> String {
    fn orders(t: &DataTree, x: NodeId) -> Vec<Vec<NodeId>> {
        let kids = t.children(x);
        let per_child_orders: Vec<Vec<Vec<NodeId>>> = kids.iter().map(|&c| orders(t, c)).collect();
        let mut out = Vec::new();
        for perm in permutations(kids.len()) {
            let mut partial: Vec<Vec<NodeId>> = vec![vec![x]];
            for &i in &perm {
                let mut next = Vec::new();
                for p in &partial {
                    for o in &per_child_orders[i] {
                        let mut q = p.clone();
                        q.push(NodeId(usize::MAX));
                        q.extend(o);
                        next.push(q);
                    }
                }
                partial = next;
            }
            for mut p in partial {
                p.push(NodeId(usize::MAX - 1));
                out.push(p);
            }
        }
        out
    }
    orders(t, t.root())
        .into_iter()
        .map(|seq| {
            let mut classes: Vec<u64> = Vec::new();
            let mut s = String::new();
            for x in seq {
                match x.0 {
                    usize::MAX => s.push('('),
                    m if m == usize::MAX - 1 => s.push(')'),
                    _ => {
                        let d = t.data(x);
                        let c = classes.iter().position(|&e| e == d).unwrap_or_else(|| {
                            classes.push(d);
                            classes.len() - 1
                        });
                        s.push_str(&format!("{} {} ", t.label(x), c));
                    }
                }
            }
            s
        })
        .min()
        .expect("at least one order")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Restricted-growth strings of length `n` using at most `k` blocks.
fn partitions(n: usize, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, k: usize, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let top = if cur.is_empty() { 0 } else { max + 1 };
        for c in 0..=top {
            if (c as usize) < k {
                cur.push(c);
                go(n, k, max.max(c), cur, out);
                cur.pop();
            }
        }
    }
    if n > 0 && k > 0 {
        go(n, k, 0, &mut cur, &mut out);
    }
    out
}

/// Every data tree within `bounds` exactly once up to isomorphism, ordered by
/// node count, then shape, labeling and partition.  Lazy per shape.
pub fn enum_trees(alphabet: &Alphabet, bounds: Bounds) -> impl Iterator<Item = DataTree> + '_ {
    let mut seen: HashSet<String> = HashSet::new();
    (1..=bounds.max_nodes)
        .flat_map(move |n| shapes(n, bounds.max_depth, bounds.max_branch))
        .flat_map(move |shape| {
            let par = parents(&shape);
            let n = par.len();
            let labels = alphabet.labels();
            let parts = partitions(n, bounds.max_classes);
            let labelings = (labels.len() as u64).pow(n as u32);
            (0..labelings).flat_map(move |mut code| {
                let lab: Vec<_> = (0..n)
                    .map(|_| {
                        let l = labels[(code % labels.len() as u64) as usize].clone();
                        code /= labels.len() as u64;
                        l
                    })
                    .collect();
                let par = par.clone();
                parts.clone().into_iter().map(move |classes| {
                    let mut t = DataTree::leaf(lab[0].clone(), classes[0]);
                    for i in 1..n {
                        t.add_child(NodeId(par[i].expect("non-root")), lab[i].clone(), classes[i]);
                    }
                    t
                })
            })
        })
        .filter(move |t| seen.insert(canonical_key(t)))
}

/// All trees within `bounds`, collected.
pub fn trees(alphabet: &Alphabet, bounds: Bounds) -> Vec<DataTree> {
    enum_trees(alphabet, bounds).collect()
}

/// The first enumerated tree whose root satisfies `φ`.
pub fn brute_sat(phi: &NodeExpr, alphabet: &Alphabet, bounds: Bounds) -> Option<DataTree> {
    let phi = phi.desugar();
    enum_trees(alphabet, bounds).find(|t| Evaluator::new(t).holds(t.root(), &phi))
}

/// Like [`brute_sat`] over a pre-enumerated list.
pub fn brute_sat_in<'t>(phi: &NodeExpr, trees: &'t [DataTree]) -> Option<&'t DataTree> {
    let phi = phi.desugar();
    trees.iter().find(|t| Evaluator::new(t).holds(t.root(), &phi))
}

/// A node at which `φ` and `ψ` differ, searching the trees in order.
pub fn brute_separate<'t>(phi: &NodeExpr, psi: &NodeExpr, trees: &'t [DataTree]) -> Option<(&'t DataTree, NodeId)> {
    let (phi, psi) = (phi.desugar(), psi.desugar());
    trees.iter().find_map(|t| {
        let mut ev = Evaluator::new(t);
        let (a, b) = ((*ev.nodes(&phi)).clone(), (*ev.nodes(&psi)).clone());
        let diff = a.symmetric_difference(&b).next()?;
        Some((t, NodeId(diff)))
    })
}

/// An injectable semantics for the oracle side of a cross-check: the set of
/// nodes of the tree satisfying the expression.
pub type OracleEval<'a> = &'a dyn Fn(&DataTree, &NodeExpr) -> FixedBitSet;

/// The evaluator's semantics.
pub fn standard_eval(t: &DataTree, e: &NodeExpr) -> FixedBitSet {
    let e = e.desugar();
    let mut ev = Evaluator::new(t);
    (*ev.nodes(&e)).clone()
}

/// A deliberately wrong semantics (`=` and `≠` exchanged), used to show that
/// the cross-check detects disagreements.
pub fn swapped_eval(t: &DataTree, e: &NodeExpr) -> FixedBitSet {
    standard_eval(t, &e.swap_data_ops())
}

/// One disagreement between the decision procedure and the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub check: String,
    pub expr: String,
    pub decision: String,
    pub oracle: String,
}

impl fmt::Display for Disagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} `{}`: decision says {}, oracle says {}",
            self.check, self.expr, self.decision, self.oracle
        )
    }
}

/// Outcome of a cross-check run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub fragment: Fragment,
    pub bounds: Bounds,
    pub seed: u64,
    pub trees: usize,
    pub sat_checks: usize,
    pub equiv_checks: usize,
    pub disagreements: Vec<Disagreement>,
}

/// The standard corpus: every `⟨α∗β⟩` with `α, β ∈ P_1` (as expressions),
/// each negated, and `extra` random Boolean combinations of those and labels.
pub fn default_corpus(r: &Reasoner, extra: usize, seed: u64) -> Result<Vec<NodeExpr>> {
    let paths = r.enum_p(1)?;
    let ops: &[DataOp] = match r.fragment() {
        Fragment::EqOnly => &[DataOp::Eq],
        Fragment::Full => &[DataOp::Eq, DataOp::Neq],
    };
    let exprs: Vec<_> = paths.iter().map(|p| p.to_expr(r)).collect::<Result<_>>()?;
    let mut atoms = Vec::new();
    for &op in ops {
        for (i, a) in exprs.iter().enumerate() {
            for b in &exprs[i..] {
                atoms.push(NodeExpr::data(op, a.clone(), b.clone()));
            }
        }
    }
    let mut corpus: Vec<NodeExpr> = atoms.iter().cloned().chain(atoms.iter().cloned().map(NodeExpr::not)).collect();
    let mut g = rng(seed);
    let mut leaves = atoms.clone();
    leaves.extend(r.alphabet().labels().iter().map(NodeExpr::atom));
    for _ in 0..extra {
        corpus.push(random_combination(&leaves, 3, &mut g));
    }
    Ok(corpus)
}

fn random_combination<R: Rng>(leaves: &[NodeExpr], depth: usize, g: &mut R) -> NodeExpr {
    if depth == 0 || g.gen_bool(0.3) {
        return leaves.choose(g).expect("non-empty").clone();
    }
    match g.gen_range(0..3) {
        0 => NodeExpr::not(random_combination(leaves, depth - 1, g)),
        1 => NodeExpr::and(random_combination(leaves, depth - 1, g), random_combination(leaves, depth - 1, g)),
        _ => NodeExpr::or(random_combination(leaves, depth - 1, g), random_combination(leaves, depth - 1, g)),
    }
}

/// Runs `decision::sat` against exhaustive search on every corpus formula,
/// and `decision::equiv_node` against exhaustive comparison on consecutive
/// pairs and on `seed`-chosen random pairs.  `oracle` supplies the oracle's
/// semantics (normally [`standard_eval`]).
pub fn cross_check(
    r: &Reasoner,
    corpus: &[NodeExpr],
    bounds: Bounds,
    seed: u64,
    oracle: OracleEval<'_>,
) -> Result<CrossCheckReport> {
    let all = trees(r.alphabet(), bounds);
    let mut report = CrossCheckReport {
        fragment: r.fragment(),
        bounds,
        seed,
        trees: all.len(),
        sat_checks: 0,
        equiv_checks: 0,
        disagreements: Vec::new(),
    };
    let sets: Vec<Vec<FixedBitSet>> = corpus.iter().map(|e| all.iter().map(|t| oracle(t, e)).collect()).collect();
    for (i, e) in corpus.iter().enumerate() {
        report.sat_checks += 1;
        let found = all.iter().zip(&sets[i]).find(|(t, s)| s.contains(t.root().0)).map(|(t, _)| t);
        let verdict = decision::sat(r, e)?;
        let agree = matches!((&verdict, found), (SatVerdict::Sat(_), Some(_)) | (SatVerdict::Unsat, None));
        if !agree {
            report.disagreements.push(Disagreement {
                check: "sat".into(),
                expr: e.to_string(),
                decision: match &verdict {
                    SatVerdict::Sat(w) => format!("SAT with {}", print_tree(&w.tree)),
                    SatVerdict::Unsat => "UNSAT".into(),
                },
                oracle: match found {
                    Some(t) => format!("SAT with {}", print_tree(t)),
                    None => format!("no model within {bounds}"),
                },
            });
        }
    }
    let mut pairs: Vec<(usize, usize)> = (1..corpus.len()).map(|i| (i - 1, i)).collect();
    let mut g = rng(seed);
    for _ in 0..corpus.len() {
        if corpus.len() > 1 {
            pairs.push((g.gen_range(0..corpus.len()), g.gen_range(0..corpus.len())));
        }
    }
    for (i, j) in pairs {
        report.equiv_checks += 1;
        let separated = all.iter().enumerate().find_map(|(k, t)| {
            let d = sets[i][k].symmetric_difference(&sets[j][k]).next()?;
            Some((t, d))
        });
        let verdict = decision::equiv_node(r, &corpus[i], &corpus[j])?;
        let agree = matches!(
            (&verdict, separated),
            (EquivVerdict::Equiv, None) | (EquivVerdict::Differ { .. }, Some(_))
        );
        if !agree {
            report.disagreements.push(Disagreement {
                check: "equiv".into(),
                expr: format!("{}  vs  {}", corpus[i], corpus[j]),
                decision: match &verdict {
                    EquivVerdict::Equiv => "EQUIV".into(),
                    EquivVerdict::Differ { tree, node } => format!("DIFFER at node {} of {}", node.0, print_tree(tree)),
                },
                oracle: match separated {
                    Some((t, d)) => format!("DIFFER at node {d} of {}", print_tree(t)),
                    None => format!("no separating tree within {bounds}"),
                },
            });
        }
    }
    Ok(report)
}
