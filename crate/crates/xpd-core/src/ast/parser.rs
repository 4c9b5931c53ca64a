//! Recursive-descent parser for the concrete expression syntax.
//!
//! Precedence is `!` > `&` > `|` for nodes and `/` (or juxtaposition) > `+`
//! for paths.  `&`, `|` and `+` nest to the left; a run of concatenated
//! factors is stored right-associated, while a parenthesized factor keeps its
//! own structure so that printing and parsing round-trip exactly.

use super::{is_keyword, is_label_ident, Alphabet, Expr, Fragment, Label, NodeExpr, PathExpr};
use crate::error::{Error, Result};

/// The two expression sorts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Node,
    Path,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Node => "node",
            Sort::Path => "path",
        }
    }
}

/// Label used internally for a node-sorted hole `_`.
pub(crate) const NODE_HOLE: &str = "_";
/// Label used internally (wrapped in a test) for a path-sorted hole `_`.
pub(crate) const PATH_HOLE: &str = "_path";

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Hole,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Eq,
    Neq,
    EqEq,
    Bang,
    Amp,
    Bar,
    Slash,
    Plus,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Hole => "`_`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Plus => "`+`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '/' => Tok::Slash,
            '+' => Tok::Plus,
            '=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::EqEq
                } else {
                    Tok::Eq
                }
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::Neq
                } else {
                    Tok::Bang
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len() && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                i = j;
                out.push((start, if word == "_" { Tok::Hole } else { Tok::Ident(word.to_string()) }));
                continue;
            }
            other => return Err(Error::syntax(i, format!("unexpected character `{other}`"))),
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
    fragment: Fragment,
    holes: bool,
    holes_seen: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, alphabet: &'a Alphabet, fragment: Fragment, holes: bool) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            end: text.len(),
            alphabet,
            fragment,
            holes,
            holes_seen: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::syntax(at, format!("expected {}, found {}", want.describe(), t.describe()))),
            None => Err(Error::syntax(at, format!("expected {}, found end of input", want.describe()))),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Error::syntax(self.offset(), format!("unexpected {} after expression", t.describe()))),
        }
    }

    fn node(&mut self) -> Result<NodeExpr> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            let rhs = self.conj()?;
            lhs = NodeExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<NodeExpr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.unary()?;
            lhs = NodeExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<NodeExpr> {
        if self.peek() == Some(&Tok::Bang) {
            self.bump();
            return Ok(NodeExpr::not(self.unary()?));
        }
        self.node_primary()
    }

    fn node_primary(&mut self) -> Result<NodeExpr> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(w)) => match w.as_str() {
                "true" => Ok(NodeExpr::True),
                "false" => Ok(NodeExpr::False),
                "eps" | "down" | "bot" => Err(Error::syntax(at, format!("`{w}` is a path, expected a node expression"))),
                _ if is_label_ident(&w) => match self.alphabet.get(&w) {
                    Some(l) => Ok(NodeExpr::Atom(l.clone())),
                    None => Err(Error::UnknownLabel(w)),
                },
                _ => Err(Error::syntax(at, format!("`{w}` is not a label"))),
            },
            Some(Tok::Hole) if self.holes => {
                self.holes_seen += 1;
                Ok(NodeExpr::Atom(Label::raw(NODE_HOLE)))
            }
            Some(Tok::Lt) => {
                let l = self.path()?;
                let at = self.offset();
                match self.bump() {
                    Some(Tok::Gt) => Ok(NodeExpr::diamond(l)),
                    Some(Tok::Eq) => {
                        let r = self.path()?;
                        self.expect(Tok::Gt)?;
                        Ok(NodeExpr::eq(l, r))
                    }
                    Some(Tok::Neq) => {
                        if self.fragment == Fragment::EqOnly {
                            return Err(Error::FragmentViolation);
                        }
                        let r = self.path()?;
                        self.expect(Tok::Gt)?;
                        Ok(NodeExpr::neq(l, r))
                    }
                    Some(t) => Err(Error::syntax(at, format!("expected `>`, `=` or `!=`, found {}", t.describe()))),
                    None => Err(Error::syntax(at, "unterminated diamond")),
                }
            }
            Some(Tok::LParen) => {
                let e = self.node()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(t) => Err(Error::syntax(at, format!("expected a node expression, found {}", t.describe()))),
            None => Err(Error::syntax(at, "expected a node expression, found end of input")),
        }
    }

    fn path(&mut self) -> Result<PathExpr> {
        let mut lhs = self.path_seq()?;
        while self.peek() == Some(&Tok::Plus) {
            self.bump();
            let rhs = self.path_seq()?;
            lhs = PathExpr::union(lhs, rhs);
        }
        Ok(lhs)
    }

    fn starts_path_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(w)) => matches!(w.as_str(), "eps" | "down" | "bot"),
            Some(Tok::LBrack) | Some(Tok::LParen) => true,
            Some(Tok::Hole) => self.holes,
            _ => false,
        }
    }

    fn path_seq(&mut self) -> Result<PathExpr> {
        let mut factors = vec![self.path_factor()?];
        loop {
            if self.peek() == Some(&Tok::Slash) {
                self.bump();
                factors.push(self.path_factor()?);
            } else if self.starts_path_factor() {
                factors.push(self.path_factor()?);
            } else {
                break;
            }
        }
        Ok(PathExpr::concat_all(factors))
    }

    fn path_factor(&mut self) -> Result<PathExpr> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(w)) => match w.as_str() {
                "eps" => Ok(PathExpr::Eps),
                "down" => Ok(PathExpr::Down),
                "bot" => Ok(PathExpr::BotPath),
                _ => Err(Error::syntax(at, format!("expected a path expression, found `{w}`"))),
            },
            Some(Tok::Hole) if self.holes => {
                self.holes_seen += 1;
                Ok(PathExpr::test(NodeExpr::Atom(Label::raw(PATH_HOLE))))
            }
            Some(Tok::LBrack) => {
                let e = self.node()?;
                self.expect(Tok::RBrack)?;
                Ok(PathExpr::test(e))
            }
            Some(Tok::LParen) => {
                let p = self.path()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Some(t) => Err(Error::syntax(at, format!("expected a path expression, found {}", t.describe()))),
            None => Err(Error::syntax(at, "expected a path expression, found end of input")),
        }
    }
}

/// Parses a node expression over `alphabet` (full fragment).
pub fn parse_node(text: &str, alphabet: &Alphabet) -> Result<NodeExpr> {
    parse_node_in(text, alphabet, Fragment::Full)
}

/// Parses a node expression, rejecting `!=` when `fragment` is [`Fragment::EqOnly`].
pub fn parse_node_in(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<NodeExpr> {
    let mut p = Parser::new(text, alphabet, fragment, false)?;
    let e = p.node()?;
    p.finish()?;
    Ok(e)
}

/// Parses a path expression over `alphabet` (full fragment).
pub fn parse_path(text: &str, alphabet: &Alphabet) -> Result<PathExpr> {
    parse_path_in(text, alphabet, Fragment::Full)
}

/// Parses a path expression, rejecting `!=` when `fragment` is [`Fragment::EqOnly`].
pub fn parse_path_in(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<PathExpr> {
    let mut p = Parser::new(text, alphabet, fragment, false)?;
    let e = p.path()?;
    p.finish()?;
    Ok(e)
}

/// Parses a node-sorted context; returns the expression and the number of holes.
pub fn parse_node_with_holes(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<(NodeExpr, usize)> {
    let mut p = Parser::new(text, alphabet, fragment, true)?;
    let e = p.node()?;
    p.finish()?;
    Ok((e, p.holes_seen))
}

/// Parses a path-sorted context; returns the expression and the number of holes.
pub fn parse_path_with_holes(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<(PathExpr, usize)> {
    let mut p = Parser::new(text, alphabet, fragment, true)?;
    let e = p.path()?;
    p.finish()?;
    Ok((e, p.holes_seen))
}

/// Parses an expression of either sort, preferring the node reading.
pub fn parse_expr(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<Expr> {
    match parse_node_in(text, alphabet, fragment) {
        Ok(e) => Ok(Expr::Node(e)),
        Err(node_err) => match parse_path_in(text, alphabet, fragment) {
            Ok(p) => Ok(Expr::Path(p)),
            Err(_) => Err(node_err),
        },
    }
}

/// Parses `LHS == RHS`, where both sides share a sort.
pub fn parse_equation_sides(text: &str, alphabet: &Alphabet, fragment: Fragment) -> Result<(Expr, Expr)> {
    let toks = tokenize(text)?;
    let splits: Vec<usize> = toks.iter().filter(|(_, t)| *t == Tok::EqEq).map(|(p, _)| *p).collect();
    match splits.as_slice() {
        [at] => {
            let (l, r) = (&text[..*at], &text[*at + 2..]);
            if let (Ok(a), Ok(b)) = (parse_node_in(l, alphabet, fragment), parse_node_in(r, alphabet, fragment)) {
                return Ok((Expr::Node(a), Expr::Node(b)));
            }
            if let (Ok(a), Ok(b)) = (parse_path_in(l, alphabet, fragment), parse_path_in(r, alphabet, fragment)) {
                return Ok((Expr::Path(a), Expr::Path(b)));
            }
            // Report the error of the more plausible reading.
            let left = parse_expr(l, alphabet, fragment)?;
            let right = match left.sort() {
                Sort::Node => Expr::Node(parse_node_in(r, alphabet, fragment).map_err(|e| shift(e, at + 2))?),
                Sort::Path => Expr::Path(parse_path_in(r, alphabet, fragment).map_err(|e| shift(e, at + 2))?),
            };
            Ok((left, right))
        }
        [] => Err(Error::syntax(text.len(), "expected `==` between the two sides of an equation")),
        [_, second, ..] => Err(Error::syntax(*second, "more than one `==` in an equation")),
    }
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { pos, msg } => Error::Syntax { pos: pos + by, msg },
        other => other,
    }
}

/// Whether `name` can be used as a label in concrete syntax.
pub fn is_label_name(name: &str) -> bool {
    is_label_ident(name) && !is_keyword(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::print_node;

    fn ab() -> Alphabet {
        Alphabet::parse("a,b").unwrap()
    }

    #[test]
    fn grammar_examples() {
        let a = ab();
        let la = || NodeExpr::Atom(a.get("a").unwrap().clone());
        let lb = || NodeExpr::Atom(a.get("b").unwrap().clone());
        assert_eq!(parse_node("a & !b", &a).unwrap(), NodeExpr::and(la(), NodeExpr::not(lb())));
        assert_eq!(
            parse_node("<down[a]/down[b] = eps>", &a).unwrap(),
            NodeExpr::eq(
                PathExpr::concat(
                    PathExpr::Down,
                    PathExpr::concat(PathExpr::test(la()), PathExpr::concat(PathExpr::Down, PathExpr::test(lb())))
                ),
                PathExpr::Eps
            )
        );
        assert_eq!(parse_node("c", &a), Err(Error::UnknownLabel("c".into())));
        assert_eq!(parse_path("eps", &a).unwrap(), PathExpr::Eps);
        assert_eq!(
            parse_path("down/[a]/down", &a).unwrap(),
            PathExpr::concat(PathExpr::Down, PathExpr::concat(PathExpr::test(la()), PathExpr::Down))
        );
        assert_eq!(parse_path("down + eps", &a).unwrap(), PathExpr::union(PathExpr::Down, PathExpr::Eps));
    }

    #[test]
    fn precedence_and_associativity() {
        let a = ab();
        assert_eq!(print_node(&parse_node("!a & b | a", &a).unwrap()), "!a & b | a");
        let e = parse_node("a | b | a", &a).unwrap();
        assert!(matches!(&e, NodeExpr::Or(l, _) if matches!(**l, NodeExpr::Or(_, _))));
        let p = parse_path("down + eps + down", &a).unwrap();
        assert!(matches!(&p, PathExpr::Union(l, _) if matches!(**l, PathExpr::Union(_, _))));
    }

    #[test]
    fn fragment_guard() {
        let a = ab();
        assert_eq!(parse_node_in("<down != eps>", &a, Fragment::EqOnly), Err(Error::FragmentViolation));
        assert!(parse_node_in("<down != eps>", &a, Fragment::Full).is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let a = ab();
        match parse_node("a & ", &a) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_node("<down", &a).is_err());
        assert!(parse_node("a b", &a).is_err());
    }

    #[test]
    fn equations_pick_a_common_sort() {
        let a = ab();
        let (l, r) = parse_equation_sides("eps/down == down", &a, Fragment::Full).unwrap();
        assert_eq!((l.sort(), r.sort()), (Sort::Path, Sort::Path));
        let (l, _) = parse_equation_sides("<[true]> == true", &a, Fragment::Full).unwrap();
        assert_eq!(l.sort(), Sort::Node);
        assert!(parse_equation_sides("a == eps", &a, Fragment::Full).is_err());
    }

    #[test]
    fn holes() {
        let a = ab();
        let (_, n) = parse_node_with_holes("a & <_/down>", &a, Fragment::Full).unwrap();
        assert_eq!(n, 1);
        assert!(parse_node("_", &a).is_err());
    }
}
