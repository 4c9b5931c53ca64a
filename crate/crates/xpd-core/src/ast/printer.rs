//! Pretty-printer producing the concrete syntax accepted by the parser.
//!
//! Parentheses are emitted exactly where the parser's precedence and
//! association rules would otherwise rebuild a different tree, so
//! `parse(print(e)) == e` holds for every expression.

use super::parser::PATH_HOLE;
use super::{NodeExpr, PathExpr};

const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

const UNION: u8 = 1;
const SEQ: u8 = 2;
const FACTOR: u8 = 3;

/// Renders a node expression.
pub fn print_node(e: &NodeExpr) -> String {
    let mut out = String::new();
    node(e, OR, &mut out);
    out
}

/// Renders a path expression.
pub fn print_path(p: &PathExpr) -> String {
    let mut out = String::new();
    path(p, UNION, &mut out);
    out
}

fn node(e: &NodeExpr, ctx: u8, out: &mut String) {
    let prec = match e {
        NodeExpr::Or(..) => OR,
        NodeExpr::And(..) => AND,
        _ => UNARY,
    };
    let wrap = prec < ctx;
    if wrap {
        out.push('(');
    }
    match e {
        NodeExpr::Or(l, r) => {
            node(l, OR, out);
            out.push_str(" | ");
            node(r, AND, out);
        }
        NodeExpr::And(l, r) => {
            node(l, AND, out);
            out.push_str(" & ");
            node(r, UNARY, out);
        }
        NodeExpr::Not(x) => {
            out.push('!');
            node(x, UNARY, out);
        }
        NodeExpr::Atom(l) => out.push_str(l.name()),
        NodeExpr::True => out.push_str("true"),
        NodeExpr::False => out.push_str("false"),
        NodeExpr::Diamond(p) => {
            out.push('<');
            path(p, UNION, out);
            out.push('>');
        }
        NodeExpr::EqDiamond(l, r) | NodeExpr::NeqDiamond(l, r) => {
            out.push('<');
            path(l, UNION, out);
            out.push_str(if matches!(e, NodeExpr::EqDiamond(..)) { " = " } else { " != " });
            path(r, UNION, out);
            out.push('>');
        }
    }
    if wrap {
        out.push(')');
    }
}

fn path(p: &PathExpr, ctx: u8, out: &mut String) {
    let prec = match p {
        PathExpr::Union(..) => UNION,
        PathExpr::Concat(..) => SEQ,
        _ => FACTOR,
    };
    let wrap = prec < ctx;
    if wrap {
        out.push('(');
    }
    match p {
        PathExpr::Union(l, r) => {
            path(l, UNION, out);
            out.push_str(" + ");
            path(r, SEQ, out);
        }
        PathExpr::Concat(l, r) => {
            // Runs are right-associated, so a concatenation on the left needs parentheses.
            path(l, FACTOR, out);
            out.push('/');
            path(r, SEQ, out);
        }
        PathExpr::Eps => out.push_str("eps"),
        PathExpr::Down => out.push_str("down"),
        PathExpr::BotPath => out.push_str("bot"),
        PathExpr::Test(e) => match &**e {
            NodeExpr::Atom(l) if l.name() == PATH_HOLE => out.push('_'),
            _ => {
                out.push('[');
                node(e, OR, out);
                out.push(']');
            }
        },
    }
    if wrap {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{parse_node, parse_path, Alphabet};

    #[test]
    fn printer_examples() {
        let a = Alphabet::parse("a,b").unwrap();
        let la = NodeExpr::Atom(a.get("a").unwrap().clone());
        let lb = NodeExpr::Atom(a.get("b").unwrap().clone());
        assert_eq!(print_node(&NodeExpr::and(la.clone(), lb.clone())), "a & b");
        assert_eq!(print_node(&NodeExpr::eq(PathExpr::Eps, PathExpr::Eps)), "<eps = eps>");
        assert_eq!(print_path(&PathExpr::union(PathExpr::Down, PathExpr::Eps)), "down + eps");
        // Non-default nestings are parenthesized so that they survive a round trip.
        let right_or = NodeExpr::or(la.clone(), NodeExpr::or(lb.clone(), la.clone()));
        assert_eq!(print_node(&right_or), "a | (b | a)");
        assert_eq!(parse_node(&print_node(&right_or), &a).unwrap(), right_or);
        let left_cat = PathExpr::concat(PathExpr::concat(PathExpr::Down, PathExpr::Down), PathExpr::Eps);
        assert_eq!(print_path(&left_cat), "(down/down)/eps");
        assert_eq!(parse_path(&print_path(&left_cat), &a).unwrap(), left_cat);
        assert_eq!(print_node(&NodeExpr::not(NodeExpr::and(la, lb))), "!(a & b)");
    }
}
