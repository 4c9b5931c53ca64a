//! The full-fragment construction.
//!
//! The pairs `(ψ, α)` (a child type and a path below it) are classified by
//! the signs of `⟨ε=↓[ψ]α⟩` and `⟨ε≠↓[ψ]α⟩` in `φ`.  Children are added per
//! class, plus pairs of children for the quadruples of `U`; the data classes
//! of the children are then glued: the root absorbs the distinguished
//! witnesses of `V_{=,≠}` and every endpoint of the `V_{=,¬≠}` paths, the
//! endpoints of each `Z`-equivalence class of `V_{¬=,≠}` form one class, and
//! finally each `U₂` quadruple glues its two witnesses.

use std::collections::{BTreeMap, BTreeSet};

use super::{double_surgery, hang, merge, model, partition_snapshot, realized_where, split, surgery_full, verify};
use crate::ast::{DataOp, Fragment};
use crate::error::{Error, Result};
use crate::normal_form::{NormalForm, NormalPath, Reasoner, Typer};
use crate::semantics::{DataTree, NodeId};

/// A child type and a path below it: the diamond path `↓[ψ]α`.
pub type VPair = (NormalForm, NormalPath);

/// A quadruple `(ψ, α, ρ, β)`, stored as two pairs.
pub type Quad = (VPair, VPair);

/// The four-way split of the pairs `(ψ, α)` with `α` realizable below `ψ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VClassification {
    /// `⟨ε=↓[ψ]α⟩` and `⟨ε≠↓[ψ]α⟩` both positive.
    pub v_eq_neq: BTreeSet<VPair>,
    /// Only `⟨ε=↓[ψ]α⟩` positive.
    pub v_eq_noneq: BTreeSet<VPair>,
    /// Only `⟨ε≠↓[ψ]α⟩` positive.
    pub v_noneq_neq: BTreeSet<VPair>,
    /// Both negative.
    pub v_noneq_noneq: BTreeSet<VPair>,
}

/// The quadruple sets of the construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuadSets {
    pub u: BTreeSet<Quad>,
    pub z: BTreeSet<Quad>,
    pub u1: BTreeSet<Quad>,
    pub u2: BTreeSet<Quad>,
}

fn path_of(r: &VPair) -> NormalPath {
    super::down(&r.0, &r.1)
}

/// Computes the classification and the quadruple sets of a level-`n ≥ 1`
/// Full normal form; fails when `Z` is not transitive (the form is then
/// inconsistent).
pub fn classify(r: &Reasoner, phi: &NormalForm) -> Result<(VClassification, QuadSets)> {
    if phi.fragment() != Fragment::Full {
        return Err(Error::FragmentViolation);
    }
    let n = phi.level();
    if n == 0 {
        return Err(Error::LevelMismatch { expected: 1, found: 0 });
    }
    let eps = NormalPath::eps(n);
    let (mut eq, mut neq) = (BTreeSet::new(), BTreeSet::new());
    for d in phi.positives() {
        if d.left().is_eps() && !d.right().is_eps() {
            let pair = split(d.right());
            match d.op() {
                DataOp::Eq => eq.insert(pair),
                DataOp::Neq => neq.insert(pair),
            };
        }
    }
    let mut v = VClassification {
        v_eq_neq: eq.intersection(&neq).cloned().collect(),
        v_eq_noneq: eq.difference(&neq).cloned().collect(),
        v_noneq_neq: neq.difference(&eq).cloned().collect(),
        v_noneq_noneq: BTreeSet::new(),
    };
    for psi in r.enum_n(n - 1)?.iter() {
        for alpha in r.enum_p(n - 1)?.iter() {
            let pair = (psi.clone(), alpha.clone());
            if psi.holds(DataOp::Eq, alpha, alpha) && !eq.contains(&pair) && !neq.contains(&pair) {
                v.v_noneq_noneq.insert(pair);
            }
        }
    }
    debug_assert!(phi.holds(DataOp::Eq, &eps, &eps));

    let mut q = QuadSets::default();
    for d in phi.positives() {
        if d.op() != DataOp::Eq || d.left().is_eps() {
            continue;
        }
        let (p, s) = (split(d.left()), split(d.right()));
        let both = phi.holds(DataOp::Neq, d.left(), d.right());
        let in3 = |x: &VPair| v.v_noneq_neq.contains(x);
        let in1 = |x: &VPair| v.v_eq_neq.contains(x);
        if in3(&p) && in3(&s) {
            if both {
                q.u.insert((p.clone(), s.clone()));
            } else {
                q.z.insert((p.clone(), s.clone()));
                q.z.insert((s.clone(), p.clone()));
            }
        } else if both && in1(&p) && in3(&s) {
            q.u.insert((p.clone(), s.clone()));
        } else if both && in1(&s) && in3(&p) {
            q.u.insert((s.clone(), p.clone()));
        }
    }
    for (a, b) in &q.z {
        for (_, c) in q.z.iter().filter(|(b2, _)| b2 == b) {
            if !q.z.contains(&(a.clone(), c.clone())) {
                return Err(Error::NotConsistent(format!(
                    "Z is not transitive at {} / {} / {}",
                    path_of(a),
                    path_of(b),
                    path_of(c)
                )));
            }
        }
    }
    for u in &q.u {
        let ((psi, alpha), (rho, beta)) = u;
        let in_u1 = q.z.iter().any(|((psi2, gamma), (rho2, delta))| {
            psi2 == psi && rho2 == rho && psi.holds(DataOp::Eq, gamma, alpha) && rho.holds(DataOp::Eq, delta, beta)
        });
        if in_u1 {
            q.u1.insert(u.clone());
        } else {
            q.u2.insert(u.clone());
        }
    }
    Ok((v, q))
}

/// The full-fragment construction, verified.
pub fn build_model_full(r: &Reasoner, phi: &NormalForm) -> Result<DataTree> {
    if phi.fragment() != Fragment::Full {
        return Err(Error::FragmentViolation);
    }
    build_full(r, phi, &mut Vec::new())
}

struct Part {
    tree: DataTree,
    ty: NormalForm,
    x: Option<NodeId>,
}

pub(super) fn build_full(r: &Reasoner, phi: &NormalForm, trace: &mut Vec<String>) -> Result<DataTree> {
    let n = phi.level();
    let mut t = DataTree::leaf(phi.label().clone(), 0);
    if n == 0 {
        return verify(r, t, phi, trace);
    }
    let (v, q) = classify(r, phi)?;
    trace.push(format!(
        "classified: |V=,!=|={} |V=,~!=|={} |V~=,!=|={} |U|={} |Z|={} |U1|={} |U2|={}",
        v.v_eq_neq.len(),
        v.v_eq_noneq.len(),
        v.v_noneq_neq.len(),
        q.u.len(),
        q.z.len(),
        q.u1.len(),
        q.u2.len()
    ));
    let fragment = r.fragment();
    let mut parts: Vec<Part> = Vec::new();
    let plain = |psi: &NormalForm| -> Result<Part> {
        Ok(Part {
            tree: (*model(r, psi)?).clone(),
            ty: psi.clone(),
            x: None,
        })
    };

    // Rule 1: two children per V_{=,≠} pair, one with a witness for the root's class.
    let mut root_witnesses = Vec::new();
    for (psi, alpha) in &v.v_eq_neq {
        let base = model(r, psi)?;
        let partners: Vec<&NormalPath> = v.v_eq_noneq.iter().filter(|(p, _)| p == psi).map(|(_, b)| b).collect();
        let w = if partners.is_empty() {
            let betas = realized_where(&base, fragment, n - 1, |g| v.v_noneq_neq.contains(&(psi.clone(), g.clone())));
            surgery_full(psi, &base, alpha, &betas)?
        } else {
            let mut ty = Typer::new(&base, fragment);
            let ends = ty.endpoints(base.root(), alpha);
            let classes: BTreeSet<u64> = partners
                .iter()
                .flat_map(|b| ty.endpoints(base.root(), b))
                .map(|y| base.data(y))
                .collect();
            let x = ends
                .iter()
                .copied()
                .find(|y| classes.contains(&base.data(*y)))
                .or_else(|| ends.first().copied())
                .ok_or_else(|| Error::NotConsistent(format!("no endpoint of {alpha} below `{psi}`")))?;
            super::WitnessTree {
                tree: (*base).clone(),
                distinguished: Some(x),
            }
        };
        root_witnesses.push(parts.len());
        parts.push(Part {
            tree: w.tree,
            ty: psi.clone(),
            x: w.distinguished,
        });
        parts.push(plain(psi)?);
        trace.push(format!("rule 1 for ({psi}, {alpha}): witness child + plain child"));
    }
    // Rules 2 and 3: one plain child per V_{=,¬≠} and V_{¬=,≠} pair.
    for (psi, _) in v.v_eq_noneq.iter().chain(v.v_noneq_neq.iter()) {
        parts.push(plain(psi)?);
    }
    // Rule 4: plain pairs for U₁, double surgery for U₂.
    for ((psi, _), (rho, _)) in &q.u1 {
        parts.push(plain(psi)?);
        parts.push(plain(rho)?);
    }
    let mut glued = Vec::new();
    for ((psi, alpha), (rho, beta)) in &q.u2 {
        let (w1, w2) = double_surgery(r, phi, (psi, alpha), (rho, beta), surgery_full)?;
        glued.push((parts.len(), parts.len() + 1));
        parts.push(Part {
            tree: w1.tree,
            ty: psi.clone(),
            x: w1.distinguished,
        });
        parts.push(Part {
            tree: w2.tree,
            ty: rho.clone(),
            x: w2.distinguished,
        });
        trace.push(format!("rule 4 (U2) for ({psi}, {alpha}, {rho}, {beta}): two surgeries"));
    }

    // Provisional partition: every child keeps its own classes.
    let root = t.root();
    let mut tops = Vec::with_capacity(parts.len());
    let mut xs = Vec::with_capacity(parts.len());
    for p in &parts {
        let map = hang(&mut t, &p.tree);
        tops.push(map[p.tree.root().0]);
        xs.push(p.x.map(|x| map[x.0]));
    }
    let mut merges: Vec<Vec<NodeId>> = Vec::new();
    {
        let mut ty = Typer::new(&t, fragment);
        for (i, p) in parts.iter().enumerate() {
            if ty.type_at(tops[i], n - 1) != p.ty {
                return Err(Error::Internal(format!("child model lost its type `{}`", p.ty)));
            }
        }
        for &i in &root_witnesses {
            merges.push(vec![root, xs[i].expect("rule-1 witness")]);
        }
        let endpoints = |ty: &mut Typer<'_>, (psi, alpha): &VPair| -> Vec<NodeId> {
            parts
                .iter()
                .enumerate()
                .filter(|(_, p)| p.ty == *psi)
                .flat_map(|(i, _)| ty.endpoints(tops[i], alpha))
                .collect()
        };
        // M: every V_{=,¬≠} endpoint joins the root.
        for pair in &v.v_eq_noneq {
            let mut group = vec![root];
            group.extend(endpoints(&mut ty, pair));
            merges.push(group);
        }
        // L_i: the endpoints of each Z-class form one class.
        for class in z_classes(&q.z) {
            let group: Vec<NodeId> = class.iter().flat_map(|pair| endpoints(&mut ty, pair)).collect();
            merges.push(group);
        }
    }
    for (a, b) in glued {
        merges.push(vec![xs[a].expect("surgery witness"), xs[b].expect("surgery witness")]);
    }

    let before: Vec<Vec<usize>> = tops.iter().map(|&c| partition_snapshot(&t, c)).collect();
    for group in &merges {
        for w in group.windows(2) {
            merge(&mut t, w[0], w[1]);
        }
    }
    for (i, &c) in tops.iter().enumerate() {
        if partition_snapshot(&t, c) != before[i] {
            return Err(Error::NotConsistent(format!(
                "gluing changed the partition inside a child of type `{}`",
                parts[i].ty
            )));
        }
    }
    trace.push(format!("glued {} groups over {} children", merges.len(), parts.len()));
    verify(r, t, phi, trace)
}

/// The equivalence classes of `Z` (a transitive, symmetric relation).
fn z_classes(z: &BTreeSet<Quad>) -> Vec<BTreeSet<VPair>> {
    let mut by_first: BTreeMap<&VPair, BTreeSet<VPair>> = BTreeMap::new();
    for (a, b) in z {
        let e = by_first.entry(a).or_default();
        e.insert(a.clone());
        e.insert(b.clone());
    }
    let mut out: Vec<BTreeSet<VPair>> = Vec::new();
    for (_, class) in by_first {
        if !out.contains(&class) {
            out.push(class);
        }
    }
    out
}
