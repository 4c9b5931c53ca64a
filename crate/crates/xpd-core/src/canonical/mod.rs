//! Canonical models for normal forms.
//!
//! A member `φ` of `N_n` is built bottom-up: the root carries `φ`'s label and
//! receives, as children, copies of the canonical models of the level-`(n−1)`
//! types mentioned by `φ`'s positive diamonds, some of them altered by *tree
//! surgery* so that a chosen witness node avoids forbidden data classes.  The
//! data classes of the children are then glued together.  Two constructions
//! exist: one for the equality-only fragment ([`build_model_eq`]) and one for
//! the full fragment ([`build_model_full`]).
//!
//! Every construction ends with a verification pass that recomputes the
//! root's type (see [`crate::normal_form::Typer`]) and compares it with `φ`.
//! Consistency is decided this way: a candidate is consistent iff its model
//! verifies ([`is_consistent`]).  Verification failures surface as
//! [`Error::NotConsistent`].

mod full;
mod surgery;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::ast::{DataOp, Fragment, Label};
use crate::error::{Error, Result};
use crate::normal_form::{DiamondAtom, NormalForm, NormalPath, Reasoner, Typer};
use crate::semantics::{DataTree, NodeId};

pub use full::{build_model_full, classify, Quad, QuadSets, VClassification, VPair};
pub use surgery::{surgery_eq, surgery_full, WitnessTree};

/// Whether `d` is a conjunct of `ψ` with the given sign.
pub fn has_conjunct(psi: &NormalForm, d: &DiamondAtom, positive: bool) -> Result<bool> {
    if d.level() != psi.level() {
        return Err(Error::LevelMismatch {
            expected: psi.level(),
            found: d.level(),
        });
    }
    let d = DiamondAtom::new(d.op(), d.left().clone(), d.right().clone())?;
    Ok(psi.positives().contains(&d) == positive)
}

/// Whether the conjunction `(label, positives)` at `level` is consistent,
/// decided by building and verifying its model.  Memoized.
pub fn is_consistent(r: &Reasoner, level: usize, label: &Label, positives: &BTreeSet<DiamondAtom>) -> Result<bool> {
    for d in positives {
        r.check_atom(d, level)?;
    }
    let cand = NormalForm::unchecked(r.fragment(), level, label.clone(), positives.clone());
    is_consistent_form(r, &cand)
}

pub(crate) fn is_consistent_form(r: &Reasoner, cand: &NormalForm) -> Result<bool> {
    match model(r, cand) {
        Ok(_) => Ok(true),
        Err(Error::NotConsistent(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// The verified canonical model of `φ`, memoized per reasoner.
pub fn model(r: &Reasoner, phi: &NormalForm) -> Result<Arc<DataTree>> {
    if let Some(m) = r.models.lock().get(phi) {
        return m.clone().ok_or_else(|| Error::NotConsistent(format!("{phi}")));
    }
    match build_model(r, phi) {
        Ok(t) => {
            let t = Arc::new(t);
            r.models.lock().insert(phi.clone(), Some(Arc::clone(&t)));
            Ok(t)
        }
        Err(e @ Error::NotConsistent(_)) => {
            r.models.lock().insert(phi.clone(), None);
            Err(e)
        }
        Err(e) => Err(e),
    }
}

/// Builds and verifies a model of `φ` with the construction of its fragment.
pub fn build_model(r: &Reasoner, phi: &NormalForm) -> Result<DataTree> {
    build_model_traced(r, phi, &mut Vec::new())
}

/// Like [`build_model`], appending a line per construction step to `trace`.
pub fn build_model_traced(r: &Reasoner, phi: &NormalForm, trace: &mut Vec<String>) -> Result<DataTree> {
    if phi.fragment() != r.fragment() {
        return Err(Error::Internal(format!(
            "normal form of fragment {} given to a {} reasoner",
            phi.fragment().name(),
            r.fragment().name()
        )));
    }
    match r.fragment() {
        Fragment::EqOnly => build_eq(r, phi, trace),
        Fragment::Full => full::build_full(r, phi, trace),
    }
}

/// The equality-only construction, verified.
pub fn build_model_eq(r: &Reasoner, phi: &NormalForm) -> Result<DataTree> {
    if phi.fragment() != Fragment::EqOnly {
        return Err(Error::FragmentViolation);
    }
    build_eq(r, phi, &mut Vec::new())
}

fn build_eq(r: &Reasoner, phi: &NormalForm, trace: &mut Vec<String>) -> Result<DataTree> {
    let n = phi.level();
    let mut t = DataTree::leaf(phi.label().clone(), 0);
    if n == 0 {
        return verify(r, t, phi, trace);
    }
    let root = t.root();
    let eps = NormalPath::eps(n);
    for d in phi.positives() {
        if d.op() != DataOp::Eq || d.right().is_eps() {
            continue;
        }
        if d.left().is_eps() {
            // Rule 1: a child whose witness shares the root's data.
            let (psi, alpha) = split(d.right());
            let base = model(r, &psi)?;
            let betas = realized_where(&base, r.fragment(), n - 1, |beta| {
                !phi.holds(DataOp::Eq, &eps, &down(&psi, beta))
            });
            let w = surgery_eq(&psi, &base, &alpha, &betas)?;
            let x = hang(&mut t, &w.tree)[w.x().0];
            merge(&mut t, root, x);
            trace.push(format!("rule 1 for <eps = {}>: child of type {psi}, witness {alpha}", d.right()));
        } else {
            // Rule 2: two children whose witnesses share data.
            let (psi, alpha) = split(d.left());
            let (rho, beta) = split(d.right());
            let (x, y) = double_surgery(r, phi, (&psi, &alpha), (&rho, &beta), surgery_eq)?;
            let x = hang(&mut t, &x.tree)[x.x().0];
            let y = hang(&mut t, &y.tree)[y.x().0];
            merge(&mut t, x, y);
            trace.push(format!("rule 2 for {d}: two children, witnesses glued"));
        }
    }
    verify(r, t, phi, trace)
}

type Surgery = fn(&NormalForm, &DataTree, &NormalPath, &[NormalPath]) -> Result<WitnessTree>;

/// The two surgeries realizing `⟨↓[ψ]α = ↓[ρ]β⟩` without creating forbidden
/// equalities: first `x` avoids every `γ` with `¬⟨↓[ρ]β = ↓[ψ]γ⟩`, then `y`
/// avoids every `δ` with `¬⟨↓[ρ]δ = ↓[ψ]μ⟩` for some path `μ` reaching `x`'s class.
fn double_surgery(
    r: &Reasoner,
    phi: &NormalForm,
    (psi, alpha): (&NormalForm, &NormalPath),
    (rho, beta): (&NormalForm, &NormalPath),
    surgery: Surgery,
) -> Result<(WitnessTree, WitnessTree)> {
    let n = phi.level();
    let left = model(r, psi)?;
    let rb = down(rho, beta);
    let gammas = realized_where(&left, r.fragment(), n - 1, |g| {
        !phi.holds(DataOp::Eq, &rb, &down(psi, g))
    });
    let w1 = surgery(psi, &left, alpha, &gammas)?;
    let class = w1.tree.data(w1.x());
    let mus: Vec<NormalPath> = Typer::new(&w1.tree, r.fragment())
        .paths_from(w1.tree.root(), n - 1)
        .into_iter()
        .filter(|(z, _)| w1.tree.data(*z) == class)
        .map(|(_, p)| p)
        .collect();
    let right = model(r, rho)?;
    let deltas = realized_where(&right, r.fragment(), n - 1, |dl| {
        mus.iter().any(|mu| !phi.holds(DataOp::Eq, &down(rho, dl), &down(psi, mu)))
    });
    let w2 = surgery(rho, &right, beta, &deltas)?;
    Ok((w1, w2))
}

/// `(ψ, β)` for the path `↓[ψ]β`.
pub(crate) fn split(p: &NormalPath) -> (NormalForm, NormalPath) {
    let (psi, rest) = p.split_first().expect("caller checked the path is not eps");
    (psi.clone(), rest)
}

/// `↓[ψ]β`.
pub(crate) fn down(psi: &NormalForm, beta: &NormalPath) -> NormalPath {
    NormalPath::step(psi.clone(), beta).expect("levels agree by construction")
}

/// The distinct paths (at `level`) realized from the root of `t` that satisfy `keep`.
pub(crate) fn realized_where(
    t: &DataTree,
    fragment: Fragment,
    level: usize,
    keep: impl Fn(&NormalPath) -> bool,
) -> Vec<NormalPath> {
    let found: BTreeSet<NormalPath> = Typer::new(t, fragment)
        .paths_from(t.root(), level)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    found.into_iter().filter(|p| keep(p)).collect()
}

/// Hangs a copy of `sub` below the root with fresh class ids; returns the id map.
pub(crate) fn hang(t: &mut DataTree, sub: &DataTree) -> Vec<NodeId> {
    let off = t.max_data() + 1;
    let root = t.root();
    t.graft(root, sub, |d| d + off)
}

/// Puts `a` and `b` in one class.
pub(crate) fn merge(t: &mut DataTree, a: NodeId, b: NodeId) {
    let (ca, cb) = (t.data(a), t.data(b));
    if ca != cb {
        t.merge_classes(cb, ca);
    }
}

/// The final pass: the root's recomputed type must be `φ` itself.
pub(crate) fn verify(r: &Reasoner, t: DataTree, phi: &NormalForm, trace: &mut Vec<String>) -> Result<DataTree> {
    let t = t.renumbered();
    let got = Typer::new(&t, r.fragment()).type_at(t.root(), phi.level());
    if got == *phi {
        trace.push(format!("verified: root of the {}-node model has the requested type", t.len()));
        Ok(t)
    } else {
        let missing: Vec<String> = phi.positives().difference(got.positives()).map(|d| d.to_string()).collect();
        let extra: Vec<String> = got.positives().difference(phi.positives()).map(|d| d.to_string()).collect();
        Err(Error::NotConsistent(format!(
            "level-{} candidate `{phi}`: model misses [{}], has extra [{}]",
            phi.level(),
            missing.join(", "),
            extra.join(", ")
        )))
    }
}

/// For each node of the subtree at `top`, the index of its class among the
/// classes of that subtree (first-visit order).  Two snapshots are equal iff
/// the subtree's partition is unchanged.
pub(crate) fn partition_snapshot(t: &DataTree, top: NodeId) -> Vec<usize> {
    let mut seen: HashMap<u64, usize> = HashMap::new();
    t.preorder(top)
        .into_iter()
        .map(|x| {
            let next = seen.len();
            *seen.entry(t.data(x)).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests;
