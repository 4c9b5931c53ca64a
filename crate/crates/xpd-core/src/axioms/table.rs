//! The scheme tables, in table order.

use super::{Pat, Scheme, SchemeGroup};
use crate::ast::{Alphabet, Fragment};

fn nv(n: &'static str) -> Pat {
    Pat::NodeVar(n)
}
fn pv(n: &'static str) -> Pat {
    Pat::PathVar(n)
}
fn not(x: Pat) -> Pat {
    Pat::Not(Box::new(x))
}
fn and(l: Pat, r: Pat) -> Pat {
    Pat::And(Box::new(l), Box::new(r))
}
fn or(l: Pat, r: Pat) -> Pat {
    Pat::Or(Box::new(l), Box::new(r))
}
fn dia(p: Pat) -> Pat {
    Pat::Diamond(Box::new(p))
}
fn eqd(l: Pat, r: Pat) -> Pat {
    Pat::EqD(Box::new(l), Box::new(r))
}
fn neqd(l: Pat, r: Pat) -> Pat {
    Pat::NeqD(Box::new(l), Box::new(r))
}
fn test(x: Pat) -> Pat {
    Pat::Test(Box::new(x))
}
fn cat(l: Pat, r: Pat) -> Pat {
    Pat::Concat(Box::new(l), Box::new(r))
}
fn uni(l: Pat, r: Pat) -> Pat {
    Pat::Union(Box::new(l), Box::new(r))
}

/// Label, path, Boolean, node and equality schemes, in table order.
pub fn equality_schemes(alphabet: &Alphabet) -> Vec<Scheme> {
    use SchemeGroup::Equality as G;
    let (alpha, beta, gamma) = (|| pv("alpha"), || pv("beta"), || pv("gamma"));
    let (phi, psi) = (|| nv("phi"), || nv("psi"));
    // The big disjunction over the alphabet, right-associated in name order.
    let all_labels = alphabet
        .labels()
        .iter()
        .rev()
        .map(|l| Pat::Label(l.clone()))
        .reduce(|acc, l| or(l, acc))
        .expect("non-empty alphabet");
    vec![
        Scheme::new("LbAx1", G, Pat::True, all_labels),
        Scheme::new("LbAx2", G, Pat::False, and(Pat::LabelVar("a"), Pat::LabelVar("b"))),
        Scheme::new("PrAx1", G, cat(cat(alpha(), test(not(dia(beta())))), beta()), Pat::Bot),
        Scheme::new("PrAx2", G, test(Pat::True), Pat::Eps),
        Scheme::new("PrAx3", G, test(or(phi(), psi())), uni(test(phi()), test(psi()))),
        Scheme::new("IsAx1", G, uni(uni(alpha(), beta()), gamma()), uni(alpha(), uni(beta(), gamma()))),
        Scheme::new("IsAx2", G, uni(alpha(), beta()), uni(beta(), alpha())),
        Scheme::new("IsAx3", G, uni(alpha(), alpha()), alpha()),
        Scheme::new("IsAx4", G, cat(alpha(), cat(beta(), gamma())), cat(cat(alpha(), beta()), gamma())),
        Scheme::new("IsAx5.1", G, cat(Pat::Eps, alpha()), alpha()),
        Scheme::new("IsAx5.2", G, cat(alpha(), Pat::Eps), alpha()),
        Scheme::new(
            "IsAx6.1",
            G,
            cat(alpha(), uni(beta(), gamma())),
            uni(cat(alpha(), beta()), cat(alpha(), gamma())),
        ),
        Scheme::new(
            "IsAx6.2",
            G,
            cat(uni(alpha(), beta()), gamma()),
            uni(cat(alpha(), gamma()), cat(beta(), gamma())),
        ),
        Scheme::new("IsAx7", G, uni(Pat::Bot, alpha()), alpha()),
        Scheme::new(
            "NdAx1",
            G,
            phi(),
            or(not(or(not(phi()), psi())), not(or(not(phi()), not(psi())))),
        ),
        Scheme::new("NdAx2", G, dia(test(phi())), phi()),
        Scheme::new("NdAx3", G, dia(uni(alpha(), beta())), or(dia(alpha()), dia(beta()))),
        Scheme::new("NdAx4", G, dia(cat(alpha(), beta())), dia(cat(alpha(), test(dia(beta()))))),
        Scheme::new("EqAx2", G, eqd(alpha(), beta()), eqd(beta(), alpha())),
        Scheme::new(
            "EqAx3",
            G,
            eqd(uni(alpha(), beta()), gamma()),
            or(eqd(alpha(), gamma()), eqd(beta(), gamma())),
        ),
        Scheme::new("EqAx4", G, and(phi(), eqd(alpha(), beta())), eqd(cat(test(phi()), alpha()), beta())),
        Scheme::leq("EqAx5", G, eqd(alpha(), beta()), dia(alpha())),
        Scheme::leq(
            "EqAx7",
            G,
            dia(cat(gamma(), test(eqd(alpha(), beta())))),
            eqd(cat(gamma(), alpha()), cat(gamma(), beta())),
        ),
        Scheme::new("EqAx1", G, eqd(alpha(), alpha()), dia(alpha())),
        Scheme::leq(
            "EqAx6",
            G,
            and(eqd(alpha(), Pat::Eps), eqd(beta(), Pat::Eps)),
            eqd(alpha(), beta()),
        ),
        Scheme::leq(
            "EqAx8",
            G,
            eqd(alpha(), cat(beta(), test(eqd(Pat::Eps, gamma())))),
            eqd(alpha(), cat(beta(), gamma())),
        ),
    ]
}

/// The inequality schemes, in table order.
pub fn inequality_schemes() -> Vec<Scheme> {
    use SchemeGroup::Inequality as G;
    let (alpha, beta, gamma, eta) = (|| pv("alpha"), || pv("beta"), || pv("gamma"), || pv("eta"));
    let phi = || nv("phi");
    vec![
        Scheme::new("NeqAx1", G, neqd(alpha(), beta()), neqd(beta(), alpha())),
        Scheme::new(
            "NeqAx2",
            G,
            neqd(uni(alpha(), beta()), gamma()),
            or(neqd(alpha(), gamma()), neqd(beta(), gamma())),
        ),
        Scheme::new("NeqAx3", G, and(phi(), neqd(alpha(), beta())), neqd(cat(test(phi()), alpha()), beta())),
        Scheme::leq("NeqAx4", G, neqd(alpha(), beta()), dia(alpha())),
        Scheme::leq(
            "NeqAx5",
            G,
            dia(cat(gamma(), test(neqd(alpha(), beta())))),
            neqd(cat(gamma(), alpha()), cat(gamma(), beta())),
        ),
        Scheme::leq(
            "NeqAx6",
            G,
            and(eqd(alpha(), gamma()), eqd(beta(), eta())),
            or(eqd(alpha(), beta()), neqd(gamma(), eta())),
        ),
        Scheme::leq(
            "NeqAx7",
            G,
            and(neqd(alpha(), gamma()), eqd(beta(), eta())),
            or(neqd(alpha(), beta()), neqd(gamma(), eta())),
        ),
        Scheme::leq(
            "NeqAx8",
            G,
            eqd(gamma(), cat(eta(), cat(test(and(not(eqd(alpha(), beta())), dia(alpha()))), beta()))),
            neqd(gamma(), cat(eta(), alpha())),
        ),
        Scheme::leq(
            "NeqAx9",
            G,
            neqd(gamma(), cat(eta(), cat(test(and(not(neqd(alpha(), beta())), dia(alpha()))), beta()))),
            neqd(gamma(), cat(eta(), alpha())),
        ),
        Scheme::leq(
            "NeqAx10",
            G,
            eqd(gamma(), cat(eta(), cat(test(and(not(neqd(alpha(), alpha())), eqd(alpha(), beta()))), alpha()))),
            eqd(gamma(), cat(eta(), beta())),
        ),
    ]
}

/// Derived laws usable in proofs and checked by the fuzzer.
pub fn derived_schemes() -> Vec<Scheme> {
    use SchemeGroup::Derived as G;
    let (alpha, beta) = (|| pv("alpha"), || pv("beta"));
    let (phi, psi, rho) = (|| nv("phi"), || nv("psi"), || nv("rho"));
    vec![
        Scheme::new("Der1", G, or(phi(), psi()), or(psi(), phi())),
        Scheme::new("Der2", G, or(phi(), or(psi(), rho())), or(or(phi(), psi()), rho())),
        Scheme::leq("Der12", G, dia(cat(alpha(), beta())), dia(alpha())),
        Scheme::new("Der13", G, dia(cat(alpha(), test(Pat::False))), Pat::False),
        Scheme::new(
            "Der21",
            G,
            cat(alpha(), cat(test(phi()), test(psi()))),
            cat(alpha(), test(and(phi(), psi()))),
        ),
    ]
}

/// All schemes for a fragment: the equality table, the inequality table (full
/// fragment only) and the derived laws.
pub fn schemes(alphabet: &Alphabet, fragment: Fragment) -> Vec<Scheme> {
    let mut out = equality_schemes(alphabet);
    if fragment == Fragment::Full {
        out.extend(inequality_schemes());
    }
    out.extend(derived_schemes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes_and_names() {
        let a = Alphabet::parse("a,b").unwrap();
        let eq: Vec<&str> = equality_schemes(&a).iter().map(|s| s.name).collect();
        assert_eq!(eq.len(), 26);
        assert!(eq.contains(&"IsAx6.2") && eq.contains(&"EqAx8"));
        assert_eq!(inequality_schemes().len(), 10);
        assert!(equality_schemes(&a).iter().all(|s| !s.uses_neq()));
        assert_eq!(schemes(&a, Fragment::EqOnly).len(), 31);
        assert_eq!(schemes(&a, Fragment::Full).len(), 41);
    }
}
