//! Level-indexed normal forms.
//!
//! * `P_n` — normal paths `↓[ψ₁]…↓[ψ_k]ε` with `k ≤ n` and `ψ_i ∈ N_{n−i}`;
//! * `D_n` — data diamonds `⟨α∗β⟩` over `P_n`, canonically ordered;
//! * `N_n` — consistent conjunctions `a ∧ ±d₁ ∧ … ∧ ±d_m` fixing one label and
//!   the sign of every atom of `D_n`.
//!
//! A [`NormalForm`] stores only its positive atoms; every other atom of `D_n`
//! is implicitly negated.  Consistency is decided by building and verifying a
//! model (see [`crate::canonical`]).  Members of `N_n` partition the nodes of
//! every data tree: the member true at a node is its *level-n type*, computed
//! directly by [`Typer`].
//!
//! All enumerations and model constructions are owned by a [`Reasoner`], which
//! fixes the fragment, the alphabet and the budgets, and memoizes results.

mod normalize;
mod typing;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use parking_lot::Mutex;

use crate::ast::{Alphabet, DataOp, Fragment, Label, NodeExpr, PathExpr};
use crate::error::{Error, Result};
use crate::oracle::Bounds;
use crate::semantics::DataTree;

pub use normalize::{NormalizedNode, NormalizedPath};
pub use typing::Typer;

/// A normal path at level `n`: `↓[steps₀]↓[steps₁]…ε`, where `steps[i]` has
/// level `n − i − 1`.  The empty path is `ε`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalPath {
    steps: Vec<NormalForm>,
    level: usize,
}

impl NormalPath {
    /// `ε` at level `n`.
    pub fn eps(level: usize) -> Self {
        NormalPath {
            steps: Vec::new(),
            level,
        }
    }

    /// `↓[step]rest`; the result has level `rest.level() + 1`.
    pub fn step(step: NormalForm, rest: &NormalPath) -> Result<Self> {
        if step.level() != rest.level {
            return Err(Error::LevelMismatch {
                expected: rest.level,
                found: step.level(),
            });
        }
        let mut steps = Vec::with_capacity(rest.steps.len() + 1);
        steps.push(step);
        steps.extend(rest.steps.iter().cloned());
        Ok(NormalPath {
            steps,
            level: rest.level + 1,
        })
    }

    pub(crate) fn from_parts(steps: Vec<NormalForm>, level: usize) -> Self {
        NormalPath { steps, level }
    }

    pub fn steps(&self) -> &[NormalForm] {
        &self.steps
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_eps(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_eps()
    }

    /// Splits `↓[ψ]β` into `(ψ, β)`; `None` for `ε`.
    pub fn split_first(&self) -> Option<(&NormalForm, NormalPath)> {
        let (first, rest) = self.steps.split_first()?;
        Some((
            first,
            NormalPath {
                steps: rest.to_vec(),
                level: self.level - 1,
            },
        ))
    }

    /// The path after the first `k` steps (level `n − k`).
    pub fn suffix(&self, k: usize) -> NormalPath {
        NormalPath {
            steps: self.steps[k..].to_vec(),
            level: self.level - k,
        }
    }

    /// Whether the step levels match the path level.
    pub fn well_leveled(&self) -> bool {
        self.steps.len() <= self.level
            && self
                .steps
                .iter()
                .enumerate()
                .all(|(i, s)| s.level() + i + 1 == self.level)
    }

    /// The path as an expression; each step's normal form is written out in full.
    pub fn to_expr(&self, r: &Reasoner) -> Result<PathExpr> {
        let mut out = PathExpr::Eps;
        for s in self.steps.iter().rev() {
            out = PathExpr::concat(PathExpr::Down, PathExpr::concat(PathExpr::test(s.to_expr(r)?), out));
        }
        Ok(out)
    }
}

impl fmt::Display for NormalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "down[{s}]/")?;
        }
        f.write_str("eps")
    }
}

impl fmt::Debug for NormalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A data diamond `⟨left ∗ right⟩` between normal paths of one level, with
/// `left ≤ right`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiamondAtom {
    op: DataOp,
    left: NormalPath,
    right: NormalPath,
}

impl DiamondAtom {
    /// Builds the atom, ordering the two sides canonically.
    pub fn new(op: DataOp, a: NormalPath, b: NormalPath) -> Result<Self> {
        if a.level != b.level {
            return Err(Error::LevelMismatch {
                expected: a.level,
                found: b.level,
            });
        }
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        Ok(DiamondAtom { op, left, right })
    }

    pub(crate) fn of(op: DataOp, a: &NormalPath, b: &NormalPath) -> Self {
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        DiamondAtom {
            op,
            left: left.clone(),
            right: right.clone(),
        }
    }

    /// `⟨ε=ε⟩` at level `n`.
    pub fn trivial(level: usize) -> Self {
        DiamondAtom::of(DataOp::Eq, &NormalPath::eps(level), &NormalPath::eps(level))
    }

    pub fn op(&self) -> DataOp {
        self.op
    }

    pub fn left(&self) -> &NormalPath {
        &self.left
    }

    pub fn right(&self) -> &NormalPath {
        &self.right
    }

    pub fn level(&self) -> usize {
        self.left.level
    }

    pub fn to_expr(&self, r: &Reasoner) -> Result<NodeExpr> {
        Ok(NodeExpr::data(self.op, self.left.to_expr(r)?, self.right.to_expr(r)?))
    }
}

impl fmt::Display for DiamondAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} {} {}>", self.left, self.op.symbol(), self.right)
    }
}

impl fmt::Debug for DiamondAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
struct NormalFormData {
    fragment: Fragment,
    level: usize,
    label: Label,
    positives: BTreeSet<DiamondAtom>,
}

/// A member of `N_n`: a label plus the set of positive atoms of `D_n`.
///
/// Values are cheap to clone.  Outside this module they are obtained only
/// from a [`Reasoner`], which checks consistency first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm(Arc<NormalFormData>);

impl NormalForm {
    /// Builds the record without a consistency check.
    pub(crate) fn unchecked(fragment: Fragment, level: usize, label: Label, positives: BTreeSet<DiamondAtom>) -> Self {
        NormalForm(Arc::new(NormalFormData {
            fragment,
            level,
            label,
            positives,
        }))
    }

    /// The level-0 member for `label`: `a ∧ ⟨ε=ε⟩` (and `¬⟨ε≠ε⟩` in Full).
    pub fn base(fragment: Fragment, label: Label) -> Self {
        NormalForm::unchecked(fragment, 0, label, BTreeSet::from([DiamondAtom::trivial(0)]))
    }

    pub fn fragment(&self) -> Fragment {
        self.0.fragment
    }

    pub fn level(&self) -> usize {
        self.0.level
    }

    pub fn label(&self) -> &Label {
        &self.0.label
    }

    pub fn positives(&self) -> &BTreeSet<DiamondAtom> {
        &self.0.positives
    }

    /// Whether `⟨a ∗ b⟩` is a positive conjunct.
    pub fn holds(&self, op: DataOp, a: &NormalPath, b: &NormalPath) -> bool {
        self.0.positives.contains(&DiamondAtom::of(op, a, b))
    }

    /// The full conjunction: label, then every atom of `D_n` with its sign,
    /// in enumeration order.
    pub fn to_expr(&self, r: &Reasoner) -> Result<NodeExpr> {
        let mut items = vec![NodeExpr::atom(self.label())];
        for d in r.enum_d(self.level())?.iter() {
            let e = d.to_expr(r)?;
            items.push(if self.0.positives.contains(d) { e } else { NodeExpr::not(e) });
        }
        Ok(NodeExpr::and_all(items).expect("non-empty"))
    }

    /// The restriction of this type to a lower level: paths longer than
    /// `level` become invisible and every step is projected recursively.
    pub fn project(&self, level: usize) -> NormalForm {
        if level >= self.level() {
            return self.clone();
        }
        let positives = self
            .positives()
            .iter()
            .filter_map(|d| {
                let l = d.left.project(level)?;
                let r = d.right.project(level)?;
                Some(DiamondAtom::of(d.op, &l, &r))
            })
            .collect();
        NormalForm::unchecked(self.fragment(), level, self.label().clone(), positives)
    }
}

impl NormalPath {
    /// Projection to a lower level; `None` when the path is longer than `level`.
    pub fn project(&self, level: usize) -> Option<NormalPath> {
        if level >= self.level {
            return Some(self.clone());
        }
        if self.steps.len() > level {
            return None;
        }
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| s.project(level - i - 1))
            .collect();
        Some(NormalPath { steps, level })
    }
}

/// Compact display: the label and the positive atoms (negatives implicit).
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())?;
        for d in self.positives() {
            write!(f, " & {d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}({})", self.level(), self)
    }
}

/// Level cap and enumeration budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest level at which `N_n` may be enumerated.
    pub level_cap: usize,
    /// Largest number of candidate conjunctions (or atoms) an enumeration may visit.
    pub budget: u128,
    /// Bounds of the tree search used beyond the level cap.
    pub search: Bounds,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            level_cap: 2,
            budget: 200_000,
            search: Bounds::default(),
        }
    }
}

#[derive(Default)]
pub(crate) struct Memo {
    paths: HashMap<usize, Arc<Vec<NormalPath>>>,
    atoms: HashMap<usize, Arc<Vec<DiamondAtom>>>,
    forms: HashMap<usize, Arc<Vec<NormalForm>>>,
}

/// Owner of the enumerations, normalization and model construction for one
/// fragment and alphabet.  Memo tables are internally synchronized, so a
/// reasoner can be shared across threads.
pub struct Reasoner {
    fragment: Fragment,
    alphabet: Alphabet,
    limits: Limits,
    memo: Mutex<Memo>,
    /// Consistency memo: the verified model, or `None` when the candidate has none.
    pub(crate) models: Mutex<HashMap<NormalForm, Option<Arc<DataTree>>>>,
    search: Mutex<Option<Arc<Vec<DataTree>>>>,
}

impl Reasoner {
    pub fn new(fragment: Fragment, alphabet: Alphabet) -> Self {
        Reasoner::with_limits(fragment, alphabet, Limits::default())
    }

    pub fn with_limits(fragment: Fragment, alphabet: Alphabet, limits: Limits) -> Self {
        Reasoner {
            fragment,
            alphabet,
            limits,
            memo: Mutex::new(Memo::default()),
            models: Mutex::new(HashMap::new()),
            search: Mutex::new(None),
        }
    }

    /// The trees within the search bounds, enumerated once.
    pub fn search_trees(&self) -> Arc<Vec<DataTree>> {
        let mut slot = self.search.lock();
        Arc::clone(slot.get_or_insert_with(|| Arc::new(crate::oracle::trees(&self.alphabet, self.limits.search))))
    }

    pub fn fragment(&self) -> Fragment {
        self.fragment
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    fn ops(&self) -> &'static [DataOp] {
        match self.fragment {
            Fragment::EqOnly => &[DataOp::Eq],
            Fragment::Full => &[DataOp::Eq, DataOp::Neq],
        }
    }

    fn check_level(&self, n: usize, what: &str) -> Result<()> {
        if n > self.limits.level_cap {
            return Err(Error::BudgetExceeded {
                what: format!("{what} at level {n}"),
                needed: n as u128,
                limit: self.limits.level_cap as u128,
            });
        }
        Ok(())
    }

    /// `P_n` in ascending order (`ε` first).
    pub fn enum_p(&self, n: usize) -> Result<Arc<Vec<NormalPath>>> {
        if let Some(p) = self.memo.lock().paths.get(&n) {
            return Ok(Arc::clone(p));
        }
        let mut out = vec![NormalPath::eps(n)];
        if n > 0 {
            let forms = self.enum_n(n - 1)?;
            let lower = self.enum_p(n - 1)?;
            let needed = (forms.len() as u128) * (lower.len() as u128) + 1;
            if needed > self.limits.budget {
                return Err(Error::BudgetExceeded {
                    what: format!("enumerating P_{n}"),
                    needed,
                    limit: self.limits.budget,
                });
            }
            for psi in forms.iter() {
                for beta in lower.iter() {
                    // `↓[ψ]β` is only a path when `β` is realizable below a `ψ` node.
                    if psi.holds(DataOp::Eq, beta, beta) {
                        out.push(NormalPath::step(psi.clone(), beta)?);
                    }
                }
            }
        }
        out.sort();
        let out = Arc::new(out);
        self.memo.lock().paths.insert(n, Arc::clone(&out));
        Ok(out)
    }

    /// `D_n` in ascending order, one atom per unordered pair and comparison.
    pub fn enum_d(&self, n: usize) -> Result<Arc<Vec<DiamondAtom>>> {
        if let Some(d) = self.memo.lock().atoms.get(&n) {
            return Ok(Arc::clone(d));
        }
        let paths = self.enum_p(n)?;
        let k = paths.len() as u128;
        let needed = k * (k + 1) / 2 * self.ops().len() as u128;
        if needed > self.limits.budget {
            return Err(Error::BudgetExceeded {
                what: format!("enumerating D_{n}"),
                needed,
                limit: self.limits.budget,
            });
        }
        let mut out = Vec::with_capacity(needed as usize);
        for &op in self.ops() {
            for (i, a) in paths.iter().enumerate() {
                for b in &paths[i..] {
                    out.push(DiamondAtom::of(op, a, b));
                }
            }
        }
        out.sort();
        let out = Arc::new(out);
        self.memo.lock().atoms.insert(n, Arc::clone(&out));
        Ok(out)
    }

    /// The number of candidate conjunctions `N_n` enumeration has to decide.
    pub fn candidate_count(&self, n: usize) -> Result<u128> {
        if n == 0 {
            return Ok(self.alphabet.len() as u128);
        }
        let free = self.free_atoms(n)?.len() as u32;
        let per_label = if free >= 120 { u128::MAX / 256 } else { 1u128 << free };
        Ok(per_label.saturating_mul(self.alphabet.len() as u128))
    }

    /// Atoms of `D_n` whose sign is not forced (`⟨ε=ε⟩` is always positive,
    /// `⟨ε≠ε⟩` always negative).
    fn free_atoms(&self, n: usize) -> Result<Vec<DiamondAtom>> {
        let eps = NormalPath::eps(n);
        Ok(self
            .enum_d(n)?
            .iter()
            .filter(|d| !(d.left == eps && d.right == eps))
            .cloned()
            .collect())
    }

    /// `N_n`, all members in ascending order.  Memoized.
    pub fn enum_n(&self, n: usize) -> Result<Arc<Vec<NormalForm>>> {
        if let Some(f) = self.memo.lock().forms.get(&n) {
            return Ok(Arc::clone(f));
        }
        let mut out = self.enum_n_lazy(n)?.collect::<Result<Vec<_>>>()?;
        out.sort();
        let out = Arc::new(out);
        self.memo.lock().forms.insert(n, Arc::clone(&out));
        Ok(out)
    }

    /// `N_n` as a lazy stream: candidates are decided one at a time, so a
    /// consumer may stop early.  The budget is checked before the first one.
    pub fn enum_n_lazy(&self, n: usize) -> Result<Box<dyn Iterator<Item = Result<NormalForm>> + '_>> {
        self.check_level(n, "enumerating N_n")?;
        if n == 0 {
            let it = self
                .alphabet
                .labels()
                .iter()
                .map(|a| Ok(NormalForm::base(self.fragment, a.clone())));
            return Ok(Box::new(it));
        }
        let needed = self.candidate_count(n)?;
        if needed > self.limits.budget {
            return Err(Error::BudgetExceeded {
                what: format!("enumerating N_{n} candidates"),
                needed,
                limit: self.limits.budget,
            });
        }
        let free = self.free_atoms(n)?;
        let trivial = DiamondAtom::trivial(n);
        let per_label = 1u64 << free.len();
        let labels = self.alphabet.labels().to_vec();
        let it = labels.into_iter().flat_map(move |a| {
            let free = free.clone();
            let trivial = trivial.clone();
            (0..per_label).filter_map(move |mask| {
                let mut pos = BTreeSet::from([trivial.clone()]);
                for (i, d) in free.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        pos.insert(d.clone());
                    }
                }
                let cand = NormalForm::unchecked(self.fragment, n, a.clone(), pos);
                match crate::canonical::is_consistent_form(self, &cand) {
                    Ok(true) => Some(Ok(cand)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                }
            })
        });
        Ok(Box::new(it))
    }

    /// Builds a normal form from its parts, checking that the atoms belong to
    /// `D_n` of this fragment and that the conjunction is consistent.
    pub fn normal_form(&self, level: usize, label: Label, positives: BTreeSet<DiamondAtom>) -> Result<NormalForm> {
        if !self.alphabet.contains(&label) {
            return Err(Error::UnknownLabel(label.name().to_string()));
        }
        for d in &positives {
            self.check_atom(d, level)?;
        }
        let cand = NormalForm::unchecked(self.fragment, level, label, positives);
        if crate::canonical::is_consistent_form(self, &cand)? {
            Ok(cand)
        } else {
            Err(Error::NotConsistent(format!("{cand}")))
        }
    }

    /// Checks that `d` is an atom of `D_level` for this fragment.
    pub(crate) fn check_atom(&self, d: &DiamondAtom, level: usize) -> Result<()> {
        if d.level() != level {
            return Err(Error::LevelMismatch {
                expected: level,
                found: d.level(),
            });
        }
        if d.op == DataOp::Neq && self.fragment == Fragment::EqOnly {
            return Err(Error::FragmentViolation);
        }
        for p in [&d.left, &d.right] {
            if !p.well_leveled() || p.steps.iter().any(|s| s.fragment() != self.fragment) {
                return Err(Error::Internal(format!("path {p} is not a normal path of level {level}")));
            }
        }
        Ok(())
    }

    /// Recognizes a conjunction of the `N_n` shape (any association and
    /// order, either orientation of each diamond) and returns the record when
    /// it is a consistent member of `N_n`.
    pub fn is_normal_node(&self, e: &NodeExpr, n: usize) -> Option<NormalForm> {
        let mut conj = Vec::new();
        flatten_and(e, &mut conj);
        let mut label = None;
        let mut pos = BTreeSet::new();
        let mut neg = BTreeSet::new();
        for c in conj {
            match c {
                NodeExpr::Atom(a) => {
                    if label.replace(a.clone()).is_some() {
                        return None;
                    }
                }
                NodeExpr::Not(inner) => {
                    let d = self.recognize_atom(inner, n)?;
                    neg.insert(d);
                }
                other => {
                    let d = self.recognize_atom(other, n)?;
                    pos.insert(d);
                }
            }
        }
        let label = label?;
        if !pos.is_disjoint(&neg) {
            return None;
        }
        let all = self.enum_d(n).ok()?;
        if pos.len() + neg.len() != all.len() || !all.iter().all(|d| pos.contains(d) || neg.contains(d)) {
            return None;
        }
        self.normal_form(n, label, pos).ok()
    }

    fn recognize_atom(&self, e: &NodeExpr, n: usize) -> Option<DiamondAtom> {
        let (op, l, r) = match e {
            NodeExpr::EqDiamond(l, r) => (DataOp::Eq, l, r),
            NodeExpr::NeqDiamond(l, r) if self.fragment == Fragment::Full => (DataOp::Neq, l, r),
            _ => return None,
        };
        let l = self.recognize_path(l, n)?;
        let r = self.recognize_path(r, n)?;
        Some(DiamondAtom::of(op, &l, &r))
    }

    fn recognize_path(&self, p: &PathExpr, n: usize) -> Option<NormalPath> {
        match p {
            PathExpr::Eps => Some(NormalPath::eps(n)),
            PathExpr::Concat(first, rest) if **first == PathExpr::Down && n > 0 => {
                let PathExpr::Concat(test, rest) = &**rest else {
                    return None;
                };
                let PathExpr::Test(psi) = &**test else {
                    return None;
                };
                let psi = self.is_normal_node(psi, n - 1)?;
                let rest = self.recognize_path(rest, n - 1)?;
                NormalPath::step(psi, &rest).ok()
            }
            _ => None,
        }
    }

    /// All members of `N_m` whose projection to `ψ`'s level is `ψ`; their
    /// disjunction is equivalent to `ψ`.
    pub fn lift(&self, psi: &NormalForm, m: usize) -> Result<Vec<NormalForm>> {
        if m < psi.level() {
            return Err(Error::LevelMismatch {
                expected: psi.level(),
                found: m,
            });
        }
        if m == psi.level() {
            return Ok(vec![psi.clone()]);
        }
        Ok(self
            .enum_n(m)?
            .iter()
            .filter(|x| x.project(psi.level()) == *psi)
            .cloned()
            .collect())
    }

    /// All paths of `P_m` of the same length as `α` projecting onto `α`.
    pub fn lift_path(&self, alpha: &NormalPath, m: usize) -> Result<Vec<NormalPath>> {
        if m < alpha.level() {
            return Err(Error::LevelMismatch {
                expected: alpha.level(),
                found: m,
            });
        }
        if alpha.is_eps() {
            return Ok(vec![NormalPath::eps(m)]);
        }
        if m == alpha.level() {
            return Ok(vec![alpha.clone()]);
        }
        Ok(self
            .enum_p(m)?
            .iter()
            .filter(|p| p.len() == alpha.len() && p.project(alpha.level()).as_ref() == Some(alpha))
            .cloned()
            .collect())
    }

    /// `{ψ ∈ N_n : label(ψ) = a, d positive in ψ}`.
    pub fn complete_diamond(&self, a: &Label, d: &DiamondAtom) -> Result<Vec<NormalForm>> {
        Ok(self
            .enum_n(d.level())?
            .iter()
            .filter(|psi| psi.label() == a && psi.positives().contains(d))
            .cloned()
            .collect())
    }

    /// The level-`n` type of node `x` of `t`.
    pub fn type_of(&self, t: &DataTree, x: crate::semantics::NodeId, n: usize) -> NormalForm {
        Typer::new(t, self.fragment).type_at(x, n)
    }
}

fn flatten_and<'e>(e: &'e NodeExpr, out: &mut Vec<&'e NodeExpr>) {
    match e {
        NodeExpr::And(l, r) => {
            flatten_and(l, out);
            flatten_and(r, out);
        }
        other => out.push(other),
    }
}
