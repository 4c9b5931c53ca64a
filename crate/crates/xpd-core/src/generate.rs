//! Seeded random generation of expressions and data trees for fuzzing.
//!
//! All generators take an explicit RNG so that every run is reproducible
//! from its seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Alphabet, Fragment, NodeExpr, PathExpr};
use crate::semantics::{DataTree, NodeId};

/// The deterministic RNG used throughout the toolkit.
pub type SeededRng = ChaCha8Rng;

/// Creates the deterministic RNG for `seed`.
pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape parameters for random expressions.
#[derive(Clone, Debug)]
pub struct ExprShape {
    /// Maximal nesting of constructors.
    pub depth: usize,
    /// Upper bound on the downward depth of generated expressions.
    pub max_dd: usize,
    /// Whether `true`, `false` and `bot` may be emitted.
    pub sugar: bool,
}

impl Default for ExprShape {
    fn default() -> Self {
        ExprShape {
            depth: 4,
            max_dd: 2,
            sugar: true,
        }
    }
}

/// Random expression generator over an alphabet and fragment.
pub struct ExprGen<'a> {
    pub alphabet: &'a Alphabet,
    pub fragment: Fragment,
    pub shape: ExprShape,
}

impl<'a> ExprGen<'a> {
    pub fn new(alphabet: &'a Alphabet, fragment: Fragment, shape: ExprShape) -> Self {
        ExprGen {
            alphabet,
            fragment,
            shape,
        }
    }

    /// A random node expression with downward depth at most `shape.max_dd`.
    pub fn node<R: Rng>(&self, rng: &mut R) -> NodeExpr {
        self.node_at(rng, self.shape.depth, self.shape.max_dd)
    }

    /// A random path expression with downward depth at most `shape.max_dd`.
    pub fn path<R: Rng>(&self, rng: &mut R) -> PathExpr {
        self.path_at(rng, self.shape.depth, self.shape.max_dd)
    }

    fn label<R: Rng>(&self, rng: &mut R) -> NodeExpr {
        NodeExpr::Atom(self.alphabet.labels().choose(rng).expect("non-empty alphabet").clone())
    }

    fn node_at<R: Rng>(&self, rng: &mut R, depth: usize, dd: usize) -> NodeExpr {
        if depth == 0 {
            return match rng.gen_range(0..6) {
                0 if self.shape.sugar => NodeExpr::True,
                1 if self.shape.sugar => NodeExpr::False,
                2 | 3 => NodeExpr::eq(PathExpr::Eps, PathExpr::Eps),
                _ => self.label(rng),
            };
        }
        let d = depth - 1;
        let kinds = if self.fragment == Fragment::Full { 9 } else { 8 };
        match rng.gen_range(0..kinds) {
            0 => self.label(rng),
            1 => NodeExpr::not(self.node_at(rng, d, dd)),
            2 => NodeExpr::and(self.node_at(rng, d, dd), self.node_at(rng, d, dd)),
            3 => NodeExpr::or(self.node_at(rng, d, dd), self.node_at(rng, d, dd)),
            4 => NodeExpr::diamond(self.path_at(rng, d, dd)),
            5 if self.shape.sugar => {
                if rng.gen_bool(0.5) {
                    NodeExpr::True
                } else {
                    NodeExpr::False
                }
            }
            8 => NodeExpr::neq(self.path_at(rng, d, dd), self.path_at(rng, d, dd)),
            _ => NodeExpr::eq(self.path_at(rng, d, dd), self.path_at(rng, d, dd)),
        }
    }

    fn path_at<R: Rng>(&self, rng: &mut R, depth: usize, dd: usize) -> PathExpr {
        if depth == 0 {
            return if dd > 0 && rng.gen_bool(0.6) { PathExpr::Down } else { PathExpr::Eps };
        }
        let d = depth - 1;
        match rng.gen_range(0..7) {
            0 => PathExpr::Eps,
            1 | 2 if dd > 0 => PathExpr::Down,
            3 => PathExpr::test(self.node_at(rng, d, dd)),
            4 => PathExpr::union(self.path_at(rng, d, dd), self.path_at(rng, d, dd)),
            5 if self.shape.sugar && rng.gen_bool(0.3) => PathExpr::BotPath,
            _ => {
                // Keep len(l) + dd(r) within the bound; dd >= len for every path.
                let l = self.path_at(rng, d, dd);
                let r = self.path_at(rng, d, dd - l.len());
                PathExpr::concat(l, r)
            }
        }
    }
}

/// Shape parameters for random data trees.
#[derive(Clone, Debug)]
pub struct TreeShape {
    pub max_depth: usize,
    pub max_nodes: usize,
    pub max_classes: usize,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape {
            max_depth: 3,
            max_nodes: 8,
            max_classes: 4,
        }
    }
}

/// A random data tree within `shape`, with class ids renumbered canonically.
pub fn random_tree<R: Rng>(rng: &mut R, alphabet: &Alphabet, shape: &TreeShape) -> DataTree {
    let labels = alphabet.labels();
    let classes = shape.max_classes.max(1) as u64;
    let mut t = DataTree::leaf(labels.choose(rng).expect("non-empty").clone(), rng.gen_range(0..classes));
    let target = rng.gen_range(1..=shape.max_nodes.max(1));
    let mut depth = vec![0usize];
    while t.len() < target {
        let open: Vec<usize> = (0..t.len()).filter(|&i| depth[i] < shape.max_depth).collect();
        let Some(&p) = open.choose(rng) else { break };
        t.add_child(NodeId(p), labels.choose(rng).expect("non-empty").clone(), rng.gen_range(0..classes));
        depth.push(depth[p] + 1);
    }
    t.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_bounded() {
        let a = Alphabet::parse("a,b").unwrap();
        let g = ExprGen::new(&a, Fragment::EqOnly, ExprShape { depth: 5, max_dd: 1, sugar: true });
        let (mut r1, mut r2) = (rng(3), rng(3));
        for _ in 0..200 {
            let (e1, e2) = (g.node(&mut r1), g.node(&mut r2));
            assert_eq!(e1, e2);
            assert!(e1.dd() <= 1);
            assert!(!e1.uses_neq());
        }
        let shape = TreeShape::default();
        for _ in 0..200 {
            let t = random_tree(&mut r1, &a, &shape);
            assert!(t.len() <= 8 && t.height() <= 3);
        }
    }
}
