//! Soundness fuzzing: random instances of every scheme are compared
//! denotationally on random data trees.

use std::fmt;

use rand::seq::SliceRandom;

use super::{schemes, Binding, Bindings, MetaSort, Pat, Scheme};
use crate::ast::{Alphabet, Expr, Fragment};
use crate::generate::{random_tree, rng, ExprGen, ExprShape, SeededRng, TreeShape};
use crate::semantics::{print_tree, DataTree, Evaluator};

/// One failed instance: the equation and a tree on which its sides differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub scheme: String,
    pub equation: String,
    pub tree: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: `{}` fails on {}", self.scheme, self.equation, self.tree)
    }
}

/// Per-scheme outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeReport {
    pub name: String,
    pub instances: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Outcome of a fuzzing run, one entry per scheme in table order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub fragment: Fragment,
    pub trees: usize,
    pub seed: u64,
    pub schemes: Vec<SchemeReport>,
}

impl FuzzReport {
    /// Total number of counterexamples over all schemes.
    pub fn total_counterexamples(&self) -> usize {
        self.schemes.iter().map(|s| s.counterexamples.len()).sum()
    }

    /// The report for a named scheme.
    pub fn scheme(&self, name: &str) -> Option<&SchemeReport> {
        self.schemes.iter().find(|s| s.name == name)
    }
}

/// Fuzzes all schemes of `fragment` (tables and derived laws).
pub fn fuzz_soundness(fragment: Fragment, alphabet: &Alphabet, trees: usize, seed: u64) -> FuzzReport {
    fuzz_schemes(&schemes(alphabet, fragment), fragment, alphabet, trees, seed)
}

/// Fuzzes the given schemes: for each of `trees` random trees (depth at most
/// 3, at most 8 nodes) every scheme receives a fresh random instantiation,
/// and the denotations of both sides are compared.  At most three
/// counterexamples are kept per scheme.
pub fn fuzz_schemes(list: &[Scheme], fragment: Fragment, alphabet: &Alphabet, trees: usize, seed: u64) -> FuzzReport {
    let mut r = rng(seed);
    let gen = ExprGen::new(
        alphabet,
        fragment,
        ExprShape {
            depth: 3,
            max_dd: 2,
            sugar: true,
        },
    );
    let shape = TreeShape::default();
    let mut reports: Vec<SchemeReport> = list
        .iter()
        .map(|s| SchemeReport {
            name: s.name.to_string(),
            instances: 0,
            counterexamples: Vec::new(),
        })
        .collect();
    for _ in 0..trees {
        let tree = random_tree(&mut r, alphabet, &shape);
        for (scheme, report) in list.iter().zip(reports.iter_mut()) {
            let Some(bindings) = random_bindings(scheme, &gen, alphabet, &mut r) else {
                continue;
            };
            let eq = scheme.instantiate(&bindings).expect("generated bindings are well-sorted");
            report.instances += 1;
            if !same_denotation(&tree, &eq.lhs, &eq.rhs) && report.counterexamples.len() < 3 {
                report.counterexamples.push(Counterexample {
                    scheme: scheme.name.to_string(),
                    equation: eq.to_string(),
                    tree: print_tree(&tree),
                });
            }
        }
    }
    FuzzReport {
        fragment,
        trees,
        seed,
        schemes: reports,
    }
}

/// Random well-sorted bindings; `None` when the scheme needs two distinct
/// labels and the alphabet has only one.
fn random_bindings(scheme: &Scheme, gen: &ExprGen<'_>, alphabet: &Alphabet, r: &mut SeededRng) -> Option<Bindings> {
    let mut b = Bindings::new();
    let labels: Vec<_> = alphabet.labels().to_vec();
    let distinct = scheme.name == "LbAx2";
    if distinct && labels.len() < 2 {
        return None;
    }
    let mut chosen = labels.clone();
    chosen.shuffle(r);
    let mut next_label = chosen.into_iter();
    for (name, sort) in &scheme.metavars {
        let v = match sort {
            MetaSort::Node => Binding::Node(gen.node(r)),
            MetaSort::Path => Binding::Path(gen.path(r)),
            MetaSort::Label if distinct => Binding::Label(next_label.next().expect("two labels")),
            MetaSort::Label => Binding::Label(labels.choose(r).expect("non-empty").clone()),
        };
        b.insert(name.to_string(), v);
    }
    Some(b)
}

fn same_denotation(tree: &DataTree, l: &Expr, r: &Expr) -> bool {
    let (l, r) = (l.desugar(), r.desugar());
    let mut ev = Evaluator::new(tree);
    match (&l, &r) {
        (Expr::Node(a), Expr::Node(b)) => ev.nodes(a) == ev.nodes(b),
        (Expr::Path(a), Expr::Path(b)) => ev.paths(a) == ev.paths(b),
        _ => false,
    }
}

/// For an inequational scheme `l <= r`, the (generally unsound) scheme
/// `r <= l`.  Used as a mutation fixture to show the fuzzer has teeth.
pub fn flipped_inequation(s: &Scheme) -> Option<Scheme> {
    if !s.inequational {
        return None;
    }
    let l = match &s.lhs {
        Pat::Or(l, _) | Pat::Union(l, _) => (**l).clone(),
        _ => return None,
    };
    let mut out = Scheme::leq(s.name, s.group, s.rhs.clone(), l);
    out.metavars = s.metavars.clone();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_schemes_survive_a_short_run() {
        let a = Alphabet::parse("a,b").unwrap();
        let rep = fuzz_soundness(Fragment::Full, &a, 20, 1);
        assert_eq!(rep.total_counterexamples(), 0, "{:?}", rep);
        assert!(rep.schemes.iter().all(|s| s.instances == 20));
    }

    #[test]
    fn flipped_eqax5_is_caught() {
        let a = Alphabet::parse("a,b").unwrap();
        let s = schemes(&a, Fragment::EqOnly).into_iter().find(|s| s.name == "EqAx5").unwrap();
        let bad = flipped_inequation(&s).unwrap();
        let rep = fuzz_schemes(&[bad], Fragment::EqOnly, &a, 200, 7);
        assert!(rep.total_counterexamples() > 0);
    }
}
