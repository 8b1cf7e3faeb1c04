//! Many-sorted vocabulary shared by the whole pipeline: sort forests,
//! signatures, terms, formulas of the fully-expressive language, compiled
//! literals, and sorted unification/substitution.
//!
//! Variables start with an uppercase letter and carry exactly one sort;
//! constants and predicates are lowercase. Propositions can be quoted into
//! term position (sort `prop`), which is how `say(doris, assert, desc(..))`
//! carries its payload.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Interned-by-convention identifier (plain `String`; the model is desk scale).
pub type Ident = String;

/// Reserved sort name for quoted propositions.
pub const PROP_SORT: &str = "prop";

/// Reserved pseudo-predicate marking a proposition variable used in formula
/// position (the consequent `W` of `say(X, Y, assert, W) => W`). It never
/// survives grounding: substituting a quoted atom for the variable replaces
/// the whole pseudo-atom with the quoted atom.
pub const PROP_HOLE: &str = "$prop";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicError {
    UndeclaredSort(Ident),
    SortViolation { var: Ident, var_sort: Ident, term: String, term_sort: Ident },
}

impl fmt::Display for LogicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicError::UndeclaredSort(s) => write!(f, "undeclared sort `{s}`"),
            LogicError::SortViolation { var, var_sort, term, term_sort } => write!(
                f,
                "cannot bind {var}:{var_sort} to `{term}` of sort {term_sort}"
            ),
        }
    }
}

/// Sort hierarchy: a forest (every sort has at most one direct supersort,
/// no cycles). Subsorting is the reflexive-transitive closure of the
/// parent relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortForest {
    parent: BTreeMap<Ident, Option<Ident>>,
}

impl SortForest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a root sort. Returns false if the name is already taken.
    pub fn declare_root(&mut self, name: &str) -> bool {
        if self.parent.contains_key(name) {
            return false;
        }
        self.parent.insert(name.to_owned(), None);
        true
    }

    /// Declares `child` with direct supersort `parent`. The parent must
    /// already exist and the child must be new, which keeps the graph a
    /// forest by construction.
    pub fn declare_sub(&mut self, child: &str, parent: &str) -> Result<bool, LogicError> {
        if !self.parent.contains_key(parent) {
            return Err(LogicError::UndeclaredSort(parent.to_owned()));
        }
        if self.parent.contains_key(child) {
            return Ok(false);
        }
        self.parent.insert(child.to_owned(), Some(parent.to_owned()));
        Ok(true)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parent.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Ident> {
        self.parent.keys()
    }

    /// Direct supersort, if any.
    pub fn parent_of(&self, name: &str) -> Option<&Ident> {
        self.parent.get(name).and_then(|p| p.as_ref())
    }

    /// True iff `s1` equals `s2` or lies below it in the forest.
    pub fn is_subsort(&self, s1: &str, s2: &str) -> Result<bool, LogicError> {
        if !self.parent.contains_key(s1) {
            return Err(LogicError::UndeclaredSort(s1.to_owned()));
        }
        if !self.parent.contains_key(s2) {
            return Err(LogicError::UndeclaredSort(s2.to_owned()));
        }
        let mut cur = s1;
        loop {
            if cur == s2 {
                return Ok(true);
            }
            match self.parent.get(cur).and_then(|p| p.as_ref()) {
                Some(p) => cur = p,
                None => return Ok(false),
            }
        }
    }
}

/// Domain signature: sorts, predicate argument sorts, constant sorts, the
/// temporal-relation predicates (replaced by `true` during compilation), and
/// the two agent constants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub sorts: SortForest,
    pub predicates: BTreeMap<Ident, Vec<Ident>>,
    pub constants: BTreeMap<Ident, Ident>,
    pub temporal_relations: BTreeSet<Ident>,
    /// `(first, second)` as declared; orientation into (self, partner) is a
    /// compile-time choice.
    pub agents: (Ident, Ident),
}

impl Signature {
    /// Sort of a constant, if declared.
    pub fn constant_sort(&self, name: &str) -> Option<&Ident> {
        self.constants.get(name)
    }

    /// Sort of a term: declared sort for constants, carried sort for
    /// variables, `prop` for quoted atoms.
    pub fn term_sort(&self, t: &Term) -> Option<Ident> {
        match t {
            Term::Var(_, s) => Some(s.clone()),
            Term::Const(c) => self.constants.get(c).cloned(),
            Term::Quoted(_) => Some(PROP_SORT.to_owned()),
        }
    }

    /// Structural well-formedness of the signature itself.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (p, args) in &self.predicates {
            for s in args {
                if !self.sorts.contains(s) {
                    problems.push(format!("predicate {p}: undeclared argument sort {s}"));
                }
            }
        }
        for (c, s) in &self.constants {
            if !self.sorts.contains(s) {
                problems.push(format!("constant {c}: undeclared sort {s}"));
            }
        }
        for t in &self.temporal_relations {
            match self.predicates.get(t) {
                None => problems.push(format!("temporal relation {t} is not a declared predicate")),
                Some(args) => {
                    if !args.iter().all(|s| s == "time") {
                        problems.push(format!("temporal relation {t} has non-time arguments"));
                    }
                }
            }
        }
        let (a, b) = &self.agents;
        if a == b {
            problems.push("self and partner agents must be distinct".to_owned());
        }
        for ag in [a, b] {
            if !ag.is_empty() && self.constants.get(ag).map(|s| s.as_str()) != Some("agent") {
                problems.push(format!("agent {ag} is not a declared constant of sort agent"));
            }
        }
        problems
    }
}

/// First-order term. There are no function symbols; quotation is the only
/// structured term and quoted atoms are ground and modality free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    /// Variable with its declared sort.
    Var(Ident, Ident),
    Const(Ident),
    Quoted(Box<Atom>),
}

impl Term {
    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(..))
    }

    pub fn var_name(&self) -> Option<&Ident> {
        match self {
            Term::Var(n, _) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) => write!(f, "{n}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Quoted(a) => write!(f, "{a}"),
        }
    }
}

/// Applied predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Ident,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: pred.to_owned(), args }
    }

    /// Pseudo-atom standing for a proposition variable in formula position.
    pub fn prop_hole(t: Term) -> Self {
        Atom { pred: PROP_HOLE.to_owned(), args: alloc::vec![t] }
    }

    pub fn is_prop_hole(&self) -> bool {
        self.pred == PROP_HOLE
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self, out: &mut BTreeSet<(Ident, Ident)>) {
        for t in &self.args {
            if let Term::Var(n, s) = t {
                out.insert((n.clone(), s.clone()));
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_prop_hole() {
            return write!(f, "{}", self.args[0]);
        }
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Formula of the fully-expressive specification language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    Atomic(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll(Ident, Ident, Box<Formula>),
    Exists(Ident, Ident, Box<Formula>),
    /// Mutual knowledge.
    Mk(Box<Formula>),
    /// `bel(agent, time, body)`.
    Bel(Term, Term, Box<Formula>),
    /// Mutual default in the given evidential space.
    MDef(u32, Box<Formula>),
    /// Normal default in the given evidential space.
    Def(u32, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Free variables with their sorts.
    pub fn free_vars(&self) -> BTreeSet<(Ident, Ident)> {
        fn go(f: &Formula, bound: &mut Vec<Ident>, out: &mut BTreeSet<(Ident, Ident)>) {
            match f {
                Formula::True => {}
                Formula::Atomic(a) => {
                    for t in &a.args {
                        if let Term::Var(n, s) = t {
                            if !bound.contains(n) {
                                out.insert((n.clone(), s.clone()));
                            }
                        }
                    }
                }
                Formula::Not(g) | Formula::Mk(g) | Formula::MDef(_, g) | Formula::Def(_, g) => {
                    go(g, bound, out)
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::ForAll(v, _, g) | Formula::Exists(v, _, g) => {
                    bound.push(v.clone());
                    go(g, bound, out);
                    bound.pop();
                }
                Formula::Bel(ag, tm, g) => {
                    for t in [ag, tm] {
                        if let Term::Var(n, s) = t {
                            if !bound.contains(n) {
                                out.insert((n.clone(), s.clone()));
                            }
                        }
                    }
                    go(g, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Precedence-aware canonical renderer; `parse . render` is the identity on
/// parser output.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 0 = implication, 1 = disjunction, 2 = conjunction, 3 = unary.
        fn go(fm: &Formula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let level = match fm {
                Formula::Implies(..) => 0,
                Formula::Or(..) => 1,
                Formula::And(..) => 2,
                _ => 3,
            };
            let paren = level < prec;
            if paren {
                write!(f, "(")?;
            }
            match fm {
                Formula::True => write!(f, "true")?,
                Formula::Atomic(a) => write!(f, "{a}")?,
                Formula::Not(g) => {
                    write!(f, "~")?;
                    go(g, 3, f)?;
                }
                Formula::And(a, b) => {
                    go(a, 2, f)?;
                    write!(f, " & ")?;
                    go(b, 2, f)?;
                }
                Formula::Or(a, b) => {
                    go(a, 1, f)?;
                    write!(f, " | ")?;
                    go(b, 1, f)?;
                }
                Formula::Implies(a, b) => {
                    go(a, 1, f)?;
                    write!(f, " => ")?;
                    go(b, 0, f)?;
                }
                Formula::ForAll(..) | Formula::Exists(..) => {
                    // Collapse a run of same-kind quantifiers into one block.
                    let existential = matches!(fm, Formula::Exists(..));
                    write!(f, "{}", if existential { "exists " } else { "forall " })?;
                    let mut cur = fm;
                    let mut first = true;
                    loop {
                        match (existential, cur) {
                            (false, Formula::ForAll(v, s, g)) | (true, Formula::Exists(v, s, g)) => {
                                if !first {
                                    write!(f, ", ")?;
                                }
                                write!(f, "{v}:{s}")?;
                                first = false;
                                cur = g;
                            }
                            _ => break,
                        }
                    }
                    write!(f, " . ")?;
                    go(cur, 0, f)?;
                }
                Formula::Mk(g) => {
                    write!(f, "mk(")?;
                    go(g, 0, f)?;
                    write!(f, ")")?;
                }
                Formula::Bel(ag, tm, g) => {
                    write!(f, "bel({ag}, {tm}, ")?;
                    go(g, 0, f)?;
                    write!(f, ")")?;
                }
                Formula::MDef(n, g) => {
                    write!(f, "mdef[{n}](")?;
                    go(g, 0, f)?;
                    write!(f, ")")?;
                }
                Formula::Def(n, g) => {
                    write!(f, "def[{n}](")?;
                    go(g, 0, f)?;
                    write!(f, ")")?;
                }
            }
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// The three compiled belief prefixes, ordered by nesting depth only
/// (`Obj` shallowest). Depth order is used by expansion, never as a truth
/// strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prefix {
    Obj,
    Bel,
    Rmb,
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefix::Obj => write!(f, "obj"),
            Prefix::Bel => write!(f, "bel"),
            Prefix::Rmb => write!(f, "rmb"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// Compiled literal: signed, prefixed, time-free atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub sign: Sign,
    pub prefix: Prefix,
    pub atom: Atom,
}

impl Literal {
    pub fn new(sign: Sign, prefix: Prefix, atom: Atom) -> Self {
        Literal { sign, prefix, atom }
    }

    pub fn pos(prefix: Prefix, atom: Atom) -> Self {
        Literal::new(Sign::Pos, prefix, atom)
    }

    pub fn complement(&self) -> Literal {
        Literal { sign: self.sign.flip(), prefix: self.prefix, atom: self.atom.clone() }
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Pos
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Neg {
            write!(f, "~")?;
        }
        write!(f, "{}({})", self.prefix, self.atom)
    }
}

/// Sort-respecting substitution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Ident, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn insert(&mut self, var: Ident, term: Term) {
        self.map.insert(var, term);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Term)> {
        self.map.iter()
    }

    /// Chases variable-to-variable bindings to the final term.
    pub fn walk<'a>(&'a self, t: &'a Term) -> &'a Term {
        let mut cur = t;
        let mut steps = 0usize;
        while let Term::Var(n, _) = cur {
            match self.map.get(n) {
                Some(next) => {
                    cur = next;
                    steps += 1;
                    // Bindings never form cycles, but stay defensive against
                    // a malformed hand-built substitution.
                    if steps > self.map.len() {
                        break;
                    }
                }
                None => break,
            }
        }
        cur
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        self.walk(t).clone()
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply_term(t)).collect() }
    }

    /// Applies the substitution to a literal, unquoting a proposition hole
    /// whose variable got bound to a quoted atom.
    pub fn apply_literal(&self, l: &Literal) -> Literal {
        let atom = self.apply_atom(&l.atom);
        let atom = normalize_prop_hole(atom);
        Literal { sign: l.sign, prefix: l.prefix, atom }
    }

    /// Capture-avoiding application to a formula. Bound occurrences are left
    /// untouched; binders are renamed only if an image term mentions them.
    pub fn apply_formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::True => Formula::True,
            Formula::Atomic(a) => Formula::Atomic(normalize_prop_hole(self.apply_atom(a))),
            Formula::Not(g) => Formula::not(self.apply_formula(g)),
            Formula::And(a, b) => Formula::and(self.apply_formula(a), self.apply_formula(b)),
            Formula::Or(a, b) => Formula::or(self.apply_formula(a), self.apply_formula(b)),
            Formula::Implies(a, b) => {
                Formula::implies(self.apply_formula(a), self.apply_formula(b))
            }
            Formula::Mk(g) => Formula::Mk(Box::new(self.apply_formula(g))),
            Formula::MDef(n, g) => Formula::MDef(*n, Box::new(self.apply_formula(g))),
            Formula::Def(n, g) => Formula::Def(*n, Box::new(self.apply_formula(g))),
            Formula::Bel(ag, tm, g) => {
                Formula::Bel(self.apply_term(ag), self.apply_term(tm), Box::new(self.apply_formula(g)))
            }
            Formula::ForAll(v, s, g) | Formula::Exists(v, s, g) => {
                let mut inner = self.clone();
                inner.map.remove(v);
                // Rename the binder if any image would capture it.
                let captures = inner.map.values().any(|t| t.var_name() == Some(v));
                let (v2, body) = if captures {
                    let mut fresh = format!("{v}'");
                    while inner.map.contains_key(&fresh)
                        || inner.map.values().any(|t| t.var_name() == Some(&fresh))
                    {
                        fresh.push('\'');
                    }
                    let mut ren = Subst::new();
                    ren.insert(v.clone(), Term::Var(fresh.clone(), s.clone()));
                    (fresh, inner.apply_formula(&ren.apply_formula(g)))
                } else {
                    (v.clone(), inner.apply_formula(g))
                };
                if matches!(f, Formula::ForAll(..)) {
                    Formula::ForAll(v2, s.clone(), Box::new(body))
                } else {
                    Formula::Exists(v2, s.clone(), Box::new(body))
                }
            }
        }
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}->{t}")?;
        }
        write!(f, "}}")
    }
}

/// Collapses `$prop(quoted)` into the quoted atom itself.
pub fn normalize_prop_hole(a: Atom) -> Atom {
    if a.is_prop_hole() {
        if let Term::Quoted(inner) = &a.args[0] {
            return (**inner).clone();
        }
    }
    a
}

/// Sorted unification of two atoms under an accumulating substitution.
/// A variable of sort S binds only to terms whose sort is S or below it.
/// A proposition hole `$prop(V)` unifies with any ground quotable atom by
/// binding V to the quotation.
pub fn unify_atoms(a: &Atom, b: &Atom, sig: &Signature, subst: &mut Subst) -> bool {
    match (a.is_prop_hole(), b.is_prop_hole()) {
        (false, false) => {
            if a.pred != b.pred || a.args.len() != b.args.len() {
                return false;
            }
            for (ta, tb) in a.args.iter().zip(b.args.iter()) {
                if !unify_terms(ta, tb, sig, subst) {
                    return false;
                }
            }
            true
        }
        (true, false) => unify_hole(&a.args[0], b, sig, subst),
        (false, true) => unify_hole(&b.args[0], a, sig, subst),
        (true, true) => unify_terms(&a.args[0], &b.args[0], sig, subst),
    }
}

fn unify_hole(hole: &Term, atom: &Atom, sig: &Signature, subst: &mut Subst) -> bool {
    if !atom.is_ground() {
        return false;
    }
    unify_terms(hole, &Term::Quoted(Box::new(atom.clone())), sig, subst)
}

fn unify_terms(a: &Term, b: &Term, sig: &Signature, subst: &mut Subst) -> bool {
    let a = subst.walk(a).clone();
    let b = subst.walk(b).clone();
    match (&a, &b) {
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::Quoted(x), Term::Quoted(y)) => x == y,
        (Term::Var(n1, s1), Term::Var(n2, s2)) => {
            if n1 == n2 {
                return true;
            }
            // Bind the larger-sorted variable to the smaller to keep the
            // unifier most general and well sorted.
            let sub12 = sig.sorts.is_subsort(s1, s2).unwrap_or(false);
            let sub21 = sig.sorts.is_subsort(s2, s1).unwrap_or(false);
            if sub12 {
                subst.insert(n2.clone(), a.clone());
                true
            } else if sub21 {
                subst.insert(n1.clone(), b.clone());
                true
            } else {
                false
            }
        }
        (Term::Var(n, s), t) | (t, Term::Var(n, s)) => {
            let ts = match sig.term_sort(t) {
                Some(ts) => ts,
                None => return false,
            };
            if sig.sorts.is_subsort(&ts, s).unwrap_or(false) {
                subst.insert(n.clone(), t.clone());
                true
            } else {
                false
            }
        }
        _ => false,
    }
}

/// Most general sorted unifier of two literals. Prefixes and signs must
/// match exactly; failure is `None`. Callers are responsible for renaming
/// the literals apart.
pub fn unify_literals(l1: &Literal, l2: &Literal, sig: &Signature) -> Option<Subst> {
    if l1.sign != l2.sign || l1.prefix != l2.prefix {
        return None;
    }
    let mut subst = Subst::new();
    if unify_atoms(&l1.atom, &l2.atom, sig, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

/// Fresh renaming for a quantified clause: every listed variable is mapped
/// to `name#k` with the same sort. The counter is owned by the caller so
/// that runs stay deterministic.
pub fn fresh_renaming(vars: &[(Ident, Ident)], counter: &mut u64) -> Subst {
    let mut s = Subst::new();
    for (name, sort) in vars {
        *counter += 1;
        s.insert(name.clone(), Term::Var(format!("{name}#{counter}"), sort.clone()));
    }
    s
}

/// Strict partial order over evidential-space indices, kept transitively
/// closed. `stronger(a, b)` means conclusions in space `a` defeat
/// conclusions in space `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpaceOrder {
    declared: BTreeSet<u32>,
    stronger: BTreeSet<(u32, u32)>,
}

impl SpaceOrder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, space: u32) {
        self.declared.insert(space);
    }

    pub fn contains(&self, space: u32) -> bool {
        self.declared.contains(&space)
    }

    /// Records `a` stronger-than `b` and closes transitively. Fails if that
    /// would make the order reflexive (a cycle).
    pub fn add_stronger(&mut self, a: u32, b: u32) -> Result<(), String> {
        if a == b || self.stronger.contains(&(b, a)) {
            return Err(format!("evidential-space order would cycle on {a} and {b}"));
        }
        self.declared.insert(a);
        self.declared.insert(b);
        let mut pairs = alloc::vec![(a, b)];
        while let Some((x, y)) = pairs.pop() {
            if !self.stronger.insert((x, y)) {
                continue;
            }
            for &(p, q) in self.stronger.clone().iter() {
                if q == x {
                    pairs.push((p, y));
                }
                if p == y {
                    pairs.push((x, q));
                }
            }
        }
        if self.declared.iter().any(|&s| self.stronger.contains(&(s, s))) {
            return Err(format!("evidential-space order would cycle on {a} and {b}"));
        }
        Ok(())
    }

    pub fn is_stronger(&self, a: u32, b: u32) -> bool {
        self.stronger.contains(&(a, b))
    }

    pub fn comparable(&self, a: u32, b: u32) -> bool {
        a == b || self.is_stronger(a, b) || self.is_stronger(b, a)
    }

    pub fn spaces(&self) -> impl Iterator<Item = u32> + '_ {
        self.declared.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn map_task_signature() -> Signature {
        let mut sorts = SortForest::new();
        for s in ["agent", "time", "map_item", "mood", "relation", "prop"] {
            sorts.declare_root(s);
        }
        sorts.declare_sub("landmark", "map_item").unwrap();
        sorts.declare_sub("route_section", "map_item").unwrap();
        let mut predicates = BTreeMap::new();
        predicates.insert("vivid".to_owned(), vec!["map_item".to_owned()]);
        predicates.insert("mapped".to_owned(), vec!["map_item".to_owned()]);
        predicates.insert(
            "desc".to_owned(),
            vec!["map_item".to_owned(), "relation".to_owned(), "map_item".to_owned()],
        );
        let mut constants = BTreeMap::new();
        for (c, s) in [
            ("fred", "agent"),
            ("doris", "agent"),
            ("swamp_1", "landmark"),
            ("palm_beach_1", "landmark"),
            ("section_1", "route_section"),
            ("left_of", "relation"),
        ] {
            constants.insert(c.to_owned(), s.to_owned());
        }
        Signature {
            sorts,
            predicates,
            constants,
            temporal_relations: BTreeSet::new(),
            agents: ("fred".to_owned(), "doris".to_owned()),
        }
    }

    fn var(n: &str, s: &str) -> Term {
        Term::Var(n.to_owned(), s.to_owned())
    }

    fn cons(n: &str) -> Term {
        Term::Const(n.to_owned())
    }

    #[test]
    fn subsort_is_reflexive_and_respects_forest() {
        let sig = map_task_signature();
        assert!(sig.sorts.is_subsort("landmark", "map_item").unwrap());
        assert!(sig.sorts.is_subsort("map_item", "map_item").unwrap());
        assert!(!sig.sorts.is_subsort("mood", "map_item").unwrap());
        assert!(!sig.sorts.is_subsort("map_item", "landmark").unwrap());
        assert!(sig.sorts.is_subsort("nowhere", "map_item").is_err());
    }

    #[test]
    fn unify_binds_variable_to_subsort_constant() {
        let sig = map_task_signature();
        let l1 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![var("X", "map_item")]));
        let l2 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![cons("swamp_1")]));
        let s = unify_literals(&l1, &l2, &sig).expect("should unify");
        assert_eq!(s.get("X"), Some(&cons("swamp_1")));
    }

    #[test]
    fn unify_rejects_prefix_mismatch() {
        let sig = map_task_signature();
        let l1 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![var("X", "map_item")]));
        let l2 = Literal::pos(Prefix::Bel, Atom::new("mapped", vec![cons("swamp_1")]));
        assert!(unify_literals(&l1, &l2, &sig).is_none());
    }

    #[test]
    fn unify_rejects_supersort_binding() {
        let sig = map_task_signature();
        // X:landmark cannot take a plain map_item variable's place holder of
        // larger sort; a route_section constant is incomparable with landmark.
        let l1 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![var("X", "landmark")]));
        let l2 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![cons("section_1")]));
        assert!(unify_literals(&l1, &l2, &sig).is_none());
    }

    #[test]
    fn unify_multi_argument_atom() {
        let sig = map_task_signature();
        let l1 = Literal::pos(
            Prefix::Obj,
            Atom::new("desc", vec![var("X", "map_item"), var("Y", "relation"), var("Z", "map_item")]),
        );
        let l2 = Literal::pos(
            Prefix::Obj,
            Atom::new("desc", vec![cons("section_1"), cons("left_of"), cons("palm_beach_1")]),
        );
        let s = unify_literals(&l1, &l2, &sig).expect("should unify");
        assert_eq!(s.get("X"), Some(&cons("section_1")));
        assert_eq!(s.get("Y"), Some(&cons("left_of")));
        assert_eq!(s.get("Z"), Some(&cons("palm_beach_1")));
    }

    #[test]
    fn prop_hole_unifies_with_ground_atom_only() {
        let sig = map_task_signature();
        let hole = Literal::pos(Prefix::Obj, Atom::prop_hole(var("W", "prop")));
        let ground = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![cons("swamp_1")]));
        let s = unify_literals(&hole, &ground, &sig).expect("hole should absorb ground atom");
        let applied = s.apply_literal(&hole);
        assert_eq!(applied, ground);

        let open = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![var("X", "map_item")]));
        assert!(unify_literals(&hole, &open, &sig).is_none());
    }

    #[test]
    fn substitution_is_idempotent_on_ground_images() {
        let sig = map_task_signature();
        let l1 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![var("X", "map_item")]));
        let l2 = Literal::pos(Prefix::Obj, Atom::new("mapped", vec![cons("swamp_1")]));
        let s = unify_literals(&l1, &l2, &sig).unwrap();
        let once = s.apply_literal(&l1);
        let twice = s.apply_literal(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn substitute_leaves_bound_occurrences() {
        let f = Formula::ForAll(
            "X".to_owned(),
            "map_item".to_owned(),
            Box::new(Formula::Atomic(Atom::new("mapped", vec![var("X", "map_item")]))),
        );
        let mut s = Subst::new();
        s.insert("X".to_owned(), cons("swamp_1"));
        assert_eq!(s.apply_formula(&f), f);
    }

    #[test]
    fn space_order_transitive_and_acyclic() {
        let mut o = SpaceOrder::new();
        o.add_stronger(1, 5).unwrap();
        o.add_stronger(5, 20).unwrap();
        assert!(o.is_stronger(1, 20));
        assert!(!o.is_stronger(20, 1));
        assert!(o.add_stronger(20, 1).is_err());
        assert!(!o.comparable(5, 7));
    }
}
