//! Tree surgery: given a model of `ψ₀` and a normal path `α`, produce a model
//! of `ψ₀` with a distinguished `α`-endpoint `x` whose data class avoids the
//! classes of every endpoint of the forbidden paths `betas`.

use std::collections::HashMap;

use crate::ast::{DataOp, Fragment};
use crate::error::{Error, Result};
use crate::normal_form::{NormalForm, NormalPath, Typer};
use crate::semantics::{DataTree, NodeId};

/// A tree with an optional distinguished node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTree {
    pub tree: DataTree,
    pub distinguished: Option<NodeId>,
}

impl WitnessTree {
    /// The distinguished node (surgery always sets it).
    pub fn x(&self) -> NodeId {
        self.distinguished.expect("surgery output has a distinguished node")
    }
}

/// Equality-only surgery: the first `α`-endpoint `z` (preorder) is duplicated
/// as a new sibling with entirely fresh data classes; the copy of `z` is `x`.
/// For `α = ε` the input is returned with `x` = root.
pub fn surgery_eq(psi0: &NormalForm, t: &DataTree, alpha: &NormalPath, betas: &[NormalPath]) -> Result<WitnessTree> {
    if alpha.is_eps() {
        return check(psi0, t.clone(), t.root(), alpha, betas);
    }
    let z = first_endpoint(psi0, t, alpha)?;
    let parent = t.parent(z).expect("a non-eps endpoint is not the root");
    let mut fresh: HashMap<u64, u64> = HashMap::new();
    let base = t.max_data() + 1;
    for y in t.preorder(z) {
        let next = base + fresh.len() as u64;
        fresh.entry(t.data(y)).or_insert(next);
    }
    let mut out = t.clone();
    let map = out.graft_subtree(parent, t, z, |d| fresh[&d]);
    let x = map[z.0];
    check(psi0, out, x, alpha, betas)
}

/// Full-fragment surgery.  With `ψ_k` the `k`-th type along `α` (`ψ_0 = ψ₀`)
/// and `s_k` the rest of `α` after it, let `k₀` be the least `k` with
/// `¬⟨s_k ≠ s_k⟩` in `ψ_k`.  When `k₀ = 0` every `α`-endpoint has one class and
/// the input is returned with `x` = the first endpoint.  Otherwise the subtree
/// at depth `k₀` above the first endpoint is duplicated as a sibling, keeping
/// all data classes except the endpoint's copy, which gets a fresh class.
pub fn surgery_full(psi0: &NormalForm, t: &DataTree, alpha: &NormalPath, betas: &[NormalPath]) -> Result<WitnessTree> {
    if alpha.is_eps() {
        return check(psi0, t.clone(), t.root(), alpha, betas);
    }
    let x1 = first_endpoint(psi0, t, alpha)?;
    let j0 = alpha.len();
    let k0 = (0..=j0)
        .find(|&k| {
            let psi_k = if k == 0 { psi0 } else { &alpha.steps()[k - 1] };
            let s = alpha.suffix(k);
            !psi_k.holds(DataOp::Neq, &s, &s)
        })
        .expect("¬⟨ε≠ε⟩ holds in every normal form");
    if k0 == 0 {
        return check(psi0, t.clone(), x1, alpha, betas);
    }
    let mut z = x1;
    for _ in k0..j0 {
        z = t.parent(z).expect("endpoint lies at depth j0");
    }
    let parent = t.parent(z).expect("k0 >= 1, so z is not the root");
    let fresh = t.max_data() + 1;
    let mut out = t.clone();
    let map = out.graft_subtree(parent, t, z, |d| d);
    let x = map[x1.0];
    out.set_data(x, fresh);
    check(psi0, out, x, alpha, betas)
}

fn first_endpoint(psi0: &NormalForm, t: &DataTree, alpha: &NormalPath) -> Result<NodeId> {
    Typer::new(t, psi0.fragment())
        .endpoints(t.root(), alpha)
        .into_iter()
        .next()
        .ok_or_else(|| Error::NotConsistent(format!("no endpoint of {alpha} in the model of `{psi0}`")))
}

/// The three surgery guarantees: the root still has type `ψ₀`, `x` is an
/// `α`-endpoint, and no `β`-endpoint shares `x`'s class.
fn check(psi0: &NormalForm, tree: DataTree, x: NodeId, alpha: &NormalPath, betas: &[NormalPath]) -> Result<WitnessTree> {
    let fragment: Fragment = psi0.fragment();
    let mut ty = Typer::new(&tree, fragment);
    if ty.type_at(tree.root(), psi0.level()) != *psi0 {
        return Err(Error::NotConsistent(format!("surgery changed the type of `{psi0}`")));
    }
    if !ty.endpoints(tree.root(), alpha).contains(&x) {
        return Err(Error::NotConsistent(format!("surgery witness is not an endpoint of {alpha}")));
    }
    let class = tree.data(x);
    for beta in betas {
        if ty.endpoints(tree.root(), beta).iter().any(|&y| tree.data(y) == class) {
            return Err(Error::NotConsistent(format!(
                "surgery witness for {alpha} cannot avoid the class of {beta}"
            )));
        }
    }
    Ok(WitnessTree {
        tree,
        distinguished: Some(x),
    })
}
