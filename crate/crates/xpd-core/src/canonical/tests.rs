use std::collections::BTreeSet;

use super::*;
use crate::ast::{parse_node_in, Alphabet};
use crate::semantics::Evaluator;

fn reasoner(f: Fragment) -> Reasoner {
    Reasoner::new(f, Alphabet::parse("a,b").unwrap())
}

fn base(f: Fragment, l: &str) -> NormalForm {
    NormalForm::base(f, Label::new(l).unwrap())
}

fn child(f: Fragment, l: &str) -> NormalPath {
    down(&base(f, l), &NormalPath::eps(0))
}

/// The level-1 EqOnly form `a ∧ ⟨ε=ε⟩ ∧ ⟨↓a'=↓b'⟩ ∧ ⟨↓a'=↓a'⟩ ∧ ⟨↓b'=↓b'⟩`.
fn example_phi(r: &Reasoner) -> NormalForm {
    let (a1, b1) = (child(Fragment::EqOnly, "a"), child(Fragment::EqOnly, "b"));
    let pos = BTreeSet::from([
        DiamondAtom::trivial(1),
        DiamondAtom::new(DataOp::Eq, a1.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Eq, a1.clone(), a1).unwrap(),
        DiamondAtom::new(DataOp::Eq, b1.clone(), b1).unwrap(),
    ]);
    r.normal_form(1, Label::new("a").unwrap(), pos).unwrap()
}

#[test]
fn conjunct_queries() {
    let r = reasoner(Fragment::EqOnly);
    let phi = example_phi(&r);
    let (a1, b1) = (child(Fragment::EqOnly, "a"), child(Fragment::EqOnly, "b"));
    let eps = NormalPath::eps(1);
    // Either orientation is accepted.
    let ab = DiamondAtom::new(DataOp::Eq, b1.clone(), a1.clone()).unwrap();
    assert!(has_conjunct(&phi, &ab, true).unwrap());
    let ea = DiamondAtom::new(DataOp::Eq, eps.clone(), a1).unwrap();
    assert!(!has_conjunct(&phi, &ea, true).unwrap());
    assert!(has_conjunct(&phi, &ea, false).unwrap());
    assert!(has_conjunct(&phi, &DiamondAtom::trivial(1), true).unwrap());
    assert!(has_conjunct(&phi, &DiamondAtom::trivial(0), true).is_err());
}

#[test]
fn example_model_shape() {
    let r = reasoner(Fragment::EqOnly);
    let phi = example_phi(&r);
    let t = build_model_eq(&r, &phi).unwrap();
    let root = t.root();
    assert!(t.ids().all(|x| x == root || t.data(x) != t.data(root)));
    let kids = t.children(root);
    assert!(kids.iter().any(|&x| kids.iter().any(|&y| x != y && t.data(x) == t.data(y))));
    assert!(Evaluator::new(&t).holds(root, &phi.to_expr(&r).unwrap()));
}

#[test]
fn surgery_identity_on_eps() {
    for f in [Fragment::EqOnly, Fragment::Full] {
        let r = reasoner(f);
        let psi = r.enum_n(1).unwrap()[0].clone();
        let t = model(&r, &psi).unwrap();
        let eps = NormalPath::eps(1);
        let w = surgery_eq(&psi, &t, &eps, &[]).unwrap();
        assert_eq!((w.tree, w.distinguished), ((*t).clone(), Some(t.root())));
        if f == Fragment::Full {
            let w = surgery_full(&psi, &t, &eps, &[]).unwrap();
            assert_eq!(w.distinguished, Some(t.root()));
        }
    }
}

#[test]
fn surgery_gives_a_fresh_witness() {
    let r = reasoner(Fragment::EqOnly);
    // `a` with a `b` child sharing the root's data.
    let b1 = child(Fragment::EqOnly, "b");
    let eps = NormalPath::eps(1);
    let pos = BTreeSet::from([
        DiamondAtom::trivial(1),
        DiamondAtom::new(DataOp::Eq, b1.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Eq, eps.clone(), b1.clone()).unwrap(),
    ]);
    let psi = r.normal_form(1, Label::new("a").unwrap(), pos).unwrap();
    let t = model(&r, &psi).unwrap();
    let w = surgery_eq(&psi, &t, &b1, std::slice::from_ref(&eps)).unwrap();
    assert_eq!(w.tree.len(), t.len() + 1);
    assert_ne!(w.tree.data(w.x()), w.tree.data(w.tree.root()));
    // The witness cannot avoid its own path's class when every endpoint is forbidden.
    let only = DiamondAtom::new(DataOp::Eq, b1.clone(), b1.clone()).unwrap();
    let single = r
        .normal_form(1, Label::new("a").unwrap(), BTreeSet::from([DiamondAtom::trivial(1), only]))
        .unwrap();
    let t1 = model(&r, &single).unwrap();
    assert!(matches!(surgery_eq(&single, &t1, &eps, std::slice::from_ref(&eps)), Err(Error::NotConsistent(_))));
}

#[test]
fn full_surgery_duplicates_with_one_fresh_class() {
    let r = reasoner(Fragment::Full);
    let b1 = child(Fragment::Full, "b");
    let eps = NormalPath::eps(1);
    // `a` whose `b` children all share the root's data: k₀ = 0.
    let pos = BTreeSet::from([
        DiamondAtom::trivial(1),
        DiamondAtom::new(DataOp::Eq, b1.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Eq, eps.clone(), b1.clone()).unwrap(),
    ]);
    let psi = r.normal_form(1, Label::new("a").unwrap(), pos).unwrap();
    let t = model(&r, &psi).unwrap();
    let w = surgery_full(&psi, &t, &b1, std::slice::from_ref(&eps));
    // Every `b` witness is in the root's class, so avoiding `ε` is impossible.
    assert!(matches!(w, Err(Error::NotConsistent(_))));
    // With ⟨↓b'≠↓b'⟩ positive, k₀ = 1: the first witness is copied with a fresh class.
    let mut pos2: BTreeSet<DiamondAtom> = psi.positives().clone();
    pos2.insert(DiamondAtom::new(DataOp::Neq, eps.clone(), b1.clone()).unwrap());
    pos2.insert(DiamondAtom::new(DataOp::Neq, b1.clone(), b1.clone()).unwrap());
    let psi2 = r.normal_form(1, Label::new("a").unwrap(), pos2).unwrap();
    let t2 = model(&r, &psi2).unwrap();
    let w2 = surgery_full(&psi2, &t2, &b1, std::slice::from_ref(&eps)).unwrap();
    assert_eq!(w2.tree.len(), t2.len() + 1);
    assert_ne!(w2.tree.data(w2.x()), w2.tree.data(w2.tree.root()));
    // `b` children all in one class different from the root's: k₀ = 0, identity.
    let pos3 = BTreeSet::from([
        DiamondAtom::trivial(1),
        DiamondAtom::new(DataOp::Eq, b1.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Neq, eps.clone(), b1.clone()).unwrap(),
    ]);
    let psi3 = r.normal_form(1, Label::new("a").unwrap(), pos3).unwrap();
    let t3 = model(&r, &psi3).unwrap();
    let w3 = surgery_full(&psi3, &t3, &b1, std::slice::from_ref(&eps)).unwrap();
    assert_eq!(w3.tree, *t3);
}

#[test]
fn classification_of_level_one_forms() {
    let r = reasoner(Fragment::Full);
    let b1 = child(Fragment::Full, "b");
    let eps = NormalPath::eps(1);
    let pos = BTreeSet::from([
        DiamondAtom::trivial(1),
        DiamondAtom::new(DataOp::Eq, b1.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Neq, b1.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Eq, eps.clone(), b1.clone()).unwrap(),
        DiamondAtom::new(DataOp::Neq, eps.clone(), b1.clone()).unwrap(),
    ]);
    let psi = r.normal_form(1, Label::new("a").unwrap(), pos).unwrap();
    let (v, q) = classify(&r, &psi).unwrap();
    let pair = (base(Fragment::Full, "b"), NormalPath::eps(0));
    assert!(v.v_eq_neq.contains(&pair));
    assert!(v.v_noneq_noneq.contains(&(base(Fragment::Full, "a"), NormalPath::eps(0))));
    assert!(q.u.is_empty() && q.z.is_empty());
    let plain = r.enum_n(1).unwrap().iter().find(|p| p.positives().len() == 1).cloned().unwrap();
    let (v, _) = classify(&r, &plain).unwrap();
    assert!(v.v_eq_neq.is_empty() && v.v_eq_noneq.is_empty() && v.v_noneq_neq.is_empty());
    assert_eq!(v.v_noneq_noneq.len(), 2);
}

#[test]
fn every_full_member_model_passes_the_evaluator() {
    let r = reasoner(Fragment::Full);
    for psi in r.enum_n(1).unwrap().iter() {
        let t = build_model_full(&r, psi).unwrap();
        assert!(Evaluator::new(&t).holds(t.root(), &psi.to_expr(&r).unwrap()));
    }
}

#[test]
fn inconsistent_candidates_are_rejected() {
    let r = reasoner(Fragment::EqOnly);
    let a1 = child(Fragment::EqOnly, "a");
    let eps = NormalPath::eps(1);
    // ⟨ε=↓a'⟩ without ⟨↓a'=↓a'⟩.
    let pos = BTreeSet::from([DiamondAtom::trivial(1), DiamondAtom::new(DataOp::Eq, eps, a1).unwrap()]);
    assert!(!is_consistent(&r, 1, &Label::new("a").unwrap(), &pos).unwrap());
    let phi = parse_node_in("<down[a] = down[b]>", r.alphabet(), r.fragment()).unwrap();
    assert!(!r.normalize_node(&phi).unwrap().forms.is_empty());
}

#[test]
fn depth_two_model_from_a_type() {
    let r = reasoner(Fragment::EqOnly);
    let t = crate::semantics::parse_tree("(a 0 (a 1 (b 0)) (b 2 (a 2) (a 3)))", r.alphabet()).unwrap();
    let ty = r.type_of(&t, t.root(), 2);
    let m = build_model(&r, &ty).unwrap();
    assert_eq!(r.type_of(&m, m.root(), 2), ty);
    let rf = reasoner(Fragment::Full);
    let tyf = rf.type_of(&t, t.root(), 2);
    let mf = build_model(&rf, &tyf).unwrap();
    assert_eq!(rf.type_of(&mf, mf.root(), 2), tyf);
}
