//! Property-based tests across modules.  Expressions and trees come from the
//! seeded generators, so every proptest case is identified by its seeds.

use std::sync::OnceLock;

use proptest::prelude::*;
use xpd_core::ast::{parse_node_in, parse_path_in, Alphabet, Fragment, NodeExpr};
use xpd_core::decision::{equiv_node, sat, EquivVerdict};
use xpd_core::generate::{random_tree, rng, ExprGen, ExprShape, TreeShape};
use xpd_core::normal_form::{NormalForm, Reasoner, Typer};
use xpd_core::oracle::{self, canonical_key, Bounds};
use xpd_core::semantics::{parse_tree, print_tree, DataTree, Evaluator, NodeId};

fn ab() -> Alphabet {
    Alphabet::parse("a,b").unwrap()
}

fn fragment(full: bool) -> Fragment {
    if full {
        Fragment::Full
    } else {
        Fragment::EqOnly
    }
}

fn tree(seed: u64) -> DataTree {
    random_tree(&mut rng(seed), &ab(), &TreeShape::default())
}

fn shallow(max_dd: usize) -> ExprShape {
    ExprShape {
        depth: 4,
        max_dd,
        sugar: true,
    }
}

/// Level-1 forms and their (desugared) expressions, per fragment.
fn level_one(f: Fragment) -> &'static (Reasoner, Vec<(NormalForm, NodeExpr)>) {
    static EQ: OnceLock<(Reasoner, Vec<(NormalForm, NodeExpr)>)> = OnceLock::new();
    static FULL: OnceLock<(Reasoner, Vec<(NormalForm, NodeExpr)>)> = OnceLock::new();
    let cell = if f == Fragment::Full { &FULL } else { &EQ };
    cell.get_or_init(|| {
        let r = Reasoner::new(f, ab());
        let forms = r
            .enum_n(1)
            .unwrap()
            .iter()
            .map(|psi| (psi.clone(), psi.to_expr(&r).unwrap().desugar()))
            .collect();
        (r, forms)
    })
}

fn small_trees() -> &'static Vec<DataTree> {
    static TREES: OnceLock<Vec<DataTree>> = OnceLock::new();
    TREES.get_or_init(|| oracle::trees(&ab(), Bounds::default()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_expressions_parse_back(seed in any::<u64>(), full in any::<bool>()) {
        let a = ab();
        let f = fragment(full);
        let gen = ExprGen::new(&a, f, ExprShape::default());
        let mut g = rng(seed);
        let phi = gen.node(&mut g);
        prop_assert_eq!(parse_node_in(&phi.to_string(), &a, f).unwrap(), phi);
        let alpha = gen.path(&mut g);
        prop_assert_eq!(parse_path_in(&alpha.to_string(), &a, f).unwrap(), alpha);
    }

    #[test]
    fn printed_trees_parse_back(seed in any::<u64>()) {
        let t = tree(seed);
        prop_assert_eq!(parse_tree(&print_tree(&t), &ab()).unwrap(), t);
    }

    #[test]
    fn canonical_keys_ignore_class_names(seed in any::<u64>(), shift in 1u64..50) {
        let t = tree(seed);
        let mut u = t.clone();
        for x in u.ids().collect::<Vec<_>>() {
            let d = u.data(x);
            u.set_data(x, d * 7 + shift);
        }
        prop_assert_eq!(canonical_key(&t), canonical_key(&u));
    }

    #[test]
    fn truth_is_local_to_the_subtree(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let a = ab();
        let t = tree(seed);
        let x = NodeId(pick.index(t.len()));
        let sub = t.restrict(x).unwrap();
        let phi = ExprGen::new(&a, Fragment::Full, ExprShape::default()).node(&mut rng(seed ^ 0x5eed)).desugar();
        prop_assert_eq!(Evaluator::new(&t).holds(x, &phi), Evaluator::new(&sub).holds(sub.root(), &phi));
    }

    #[test]
    fn exactly_one_level_one_form_holds_at_each_node(seed in any::<u64>(), full in any::<bool>()) {
        let (r, forms) = level_one(fragment(full));
        let t = tree(seed);
        let mut ev = Evaluator::new(&t);
        let sets: Vec<_> = forms.iter().map(|(_, e)| ev.nodes(e)).collect();
        for x in t.ids() {
            let holding: Vec<&NormalForm> =
                forms.iter().zip(&sets).filter(|(_, s)| s.contains(x.0)).map(|((f, _), _)| f).collect();
            prop_assert_eq!(holding.len(), 1, "node {} of {}", x.0, print_tree(&t));
            prop_assert_eq!(holding[0], &r.type_of(&t, x, 1));
        }
    }

    #[test]
    fn typer_paths_are_well_leveled(seed in any::<u64>(), level in 0usize..3, full in any::<bool>()) {
        let t = tree(seed);
        let mut typer = Typer::new(&t, fragment(full));
        for x in t.ids() {
            for (y, p) in typer.paths_from(x, level) {
                prop_assert!(p.well_leveled());
                prop_assert_eq!(p.level(), level);
                prop_assert!(p.len() <= level);
                prop_assert_eq!(t.depth_of(y) - t.depth_of(x), p.len());
                prop_assert!(typer.endpoints(x, &p).contains(&y));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn normal_forms_denote_their_input(seed in any::<u64>(), full in any::<bool>()) {
        let f = fragment(full);
        let (r, _) = level_one(f);
        let a = ab();
        let phi = ExprGen::new(&a, f, shallow(1)).node(&mut rng(seed));
        let nf = r.normalize_node_at(&phi, 1).unwrap();
        let disjunction = nf.to_expr(r).unwrap().desugar();
        let phi_d = phi.desugar();
        for t in small_trees().iter().step_by(37) {
            let mut ev = Evaluator::new(t);
            prop_assert_eq!(ev.nodes(&phi_d), ev.nodes(&disjunction), "`{}` on {}", phi, print_tree(t));
        }
    }

    #[test]
    fn sat_agrees_with_search(seed in any::<u64>(), full in any::<bool>()) {
        let f = fragment(full);
        let (r, _) = level_one(f);
        let a = ab();
        let phi = ExprGen::new(&a, f, shallow(1)).node(&mut rng(seed));
        let verdict = sat(r, &phi).unwrap();
        let found = oracle::brute_sat_in(&phi, small_trees());
        prop_assert_eq!(verdict.is_sat(), found.is_some(), "`{}`", phi);
    }

    #[test]
    fn differ_witnesses_separate(seed in any::<u64>()) {
        let (r, _) = level_one(Fragment::EqOnly);
        let a = ab();
        let gen = ExprGen::new(&a, Fragment::EqOnly, shallow(1));
        let mut g = rng(seed);
        let (phi, psi) = (gen.node(&mut g), gen.node(&mut g));
        if let EquivVerdict::Differ { tree, node } = equiv_node(r, &phi, &psi).unwrap() {
            let mut ev = Evaluator::new(&tree);
            let (p, q) = (phi.desugar(), psi.desugar());
            prop_assert_ne!(ev.holds(node, &p), ev.holds(node, &q));
        } else {
            prop_assert!(oracle::brute_separate(&phi, &psi, small_trees()).is_none());
        }
    }
}
