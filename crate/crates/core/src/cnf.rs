//! Translation of restriction-checked formulas into the prefixed clausal
//! standard form: a set of clauses, each carrying an outer modality chain
//! (`mk`/`mdef`/`def` head plus pass-through `bel` wrappers), a per-clause
//! universal prefix, and disjuncts that are signed atoms wrapped in at most
//! one `bel`.
//!
//! Mutual knowledge, belief and the default operators distribute over
//! conjunction; belief does not distribute over disjunction, and a belief
//! wrapping a residual disjunction cannot be represented one literal at a
//! time, so it is rejected. Negation inside a belief wrapper lands on the
//! single sign of the compiled literal: the three-prefix model does not
//! distinguish "believes not" from "does not believe".

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{Atom, Formula, Ident, Sign, Subst, Term};

/// One `bel` wrapper. The time argument disappears during time stripping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BelWrap {
    pub agent: Term,
    pub time: Option<Term>,
}

/// Signed atom with its belief wrappers (well-formed clauses carry at most
/// one; deeper stacks are constructible so that `validate_nesting` has
/// something to reject).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClauseLit {
    pub sign: Sign,
    pub wrappers: Vec<BelWrap>,
    pub atom: Atom,
}

impl ClauseLit {
    pub fn plain(sign: Sign, atom: Atom) -> Self {
        ClauseLit { sign, wrappers: Vec::new(), atom }
    }

    fn complement_of(&self, other: &ClauseLit) -> bool {
        self.sign != other.sign && self.wrappers == other.wrappers && self.atom == other.atom
    }
}

/// Outer modality wrapper.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum OuterWrap {
    Mk,
    MDef(u32),
    Def(u32),
    Bel(BelWrap),
}

/// One clause of the standard form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalClause {
    pub outer: Vec<OuterWrap>,
    pub universals: Vec<(Ident, Ident)>,
    pub disjuncts: Vec<ClauseLit>,
}

impl ModalClause {
    /// Folds the clause back into a formula (used by idempotence checks and
    /// the CNF dump).
    pub fn to_formula(&self) -> Formula {
        let mut body: Option<Formula> = None;
        for d in &self.disjuncts {
            let mut f = Formula::Atomic(d.atom.clone());
            for w in d.wrappers.iter().rev() {
                let time = w.time.clone().unwrap_or_else(|| Term::Const("t".to_owned()));
                f = Formula::Bel(w.agent.clone(), time, Box::new(f));
            }
            if d.sign == Sign::Neg {
                f = Formula::not(f);
            }
            body = Some(match body {
                None => f,
                Some(acc) => Formula::or(acc, f),
            });
        }
        let mut f = body.unwrap_or(Formula::True);
        for w in self.outer.iter().rev() {
            f = match w {
                OuterWrap::Mk => Formula::Mk(Box::new(f)),
                OuterWrap::MDef(n) => Formula::MDef(*n, Box::new(f)),
                OuterWrap::Def(n) => Formula::Def(*n, Box::new(f)),
                OuterWrap::Bel(b) => {
                    let time = b.time.clone().unwrap_or_else(|| Term::Const("t".to_owned()));
                    Formula::Bel(b.agent.clone(), time, Box::new(f))
                }
            };
        }
        for (v, s) in self.universals.iter().rev() {
            f = Formula::ForAll(v.clone(), s.clone(), Box::new(f));
        }
        f
    }

    /// Number of `bel` wrappers in the outer chain.
    pub fn outer_bel_depth(&self) -> usize {
        self.outer.iter().filter(|w| matches!(w, OuterWrap::Bel(_))).count()
    }
}

impl fmt::Display for ModalClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.universals.is_empty() {
            write!(f, "forall ")?;
            for (i, (v, s)) in self.universals.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}:{s}")?;
            }
            write!(f, " . ")?;
        }
        let mut close = 0;
        for w in &self.outer {
            match w {
                OuterWrap::Mk => write!(f, "mk(")?,
                OuterWrap::MDef(n) => write!(f, "mdef[{n}](")?,
                OuterWrap::Def(n) => write!(f, "def[{n}](")?,
                OuterWrap::Bel(b) => match &b.time {
                    Some(t) => write!(f, "bel({}, {t}, ", b.agent)?,
                    None => write!(f, "bel({}, ", b.agent)?,
                },
            }
            close += 1;
        }
        if self.disjuncts.is_empty() {
            write!(f, "false")?;
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            if d.sign == Sign::Neg {
                write!(f, "~")?;
            }
            let mut inner_close = 0;
            for w in &d.wrappers {
                match &w.time {
                    Some(t) => write!(f, "bel({}, {t}, ", w.agent)?,
                    None => write!(f, "bel({}, ", w.agent)?,
                }
                inner_close += 1;
            }
            write!(f, "{}", d.atom)?;
            for _ in 0..inner_close {
                write!(f, ")")?;
            }
        }
        for _ in 0..close {
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CnfError {
    /// A clause would need more than one level of belief nesting.
    NestingDepthExceeded(String),
    /// Constructs that have no clausal image (belief in a residual
    /// disjunction, modal operators below a connective, existentials).
    Unsupported(String),
}

impl fmt::Display for CnfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfError::NestingDepthExceeded(m) => write!(f, "NestingDepthExceeded: {m}"),
            CnfError::Unsupported(m) => write!(f, "unsupported construct: {m}"),
        }
    }
}

/// Matrix tree after negation normal form.
enum M {
    True,
    False,
    Lit(ClauseLit),
    And(Box<M>, Box<M>),
    Or(Box<M>, Box<M>),
}

/// Converts a formula into the prefixed clausal standard form. The
/// conjunction of the returned clauses is equivalent to the input under
/// classical rewriting of implication, De Morgan, distribution of the modal
/// operators over conjunction, and per-clause hoisting of universals.
pub fn to_modal_cnf(f: &Formula) -> Result<Vec<ModalClause>, CnfError> {
    let mut out = Vec::new();
    let mut used: BTreeSet<Ident> = BTreeSet::new();
    translate(f, &Vec::new(), &Vec::new(), &mut used, &mut out)?;
    if !validate_nesting(&out) {
        return Err(CnfError::NestingDepthExceeded(
            "a clause exceeds one level of belief nesting".to_owned(),
        ));
    }
    Ok(out)
}

fn translate(
    f: &Formula,
    outer: &Vec<OuterWrap>,
    universals: &Vec<(Ident, Ident)>,
    used: &mut BTreeSet<Ident>,
    out: &mut Vec<ModalClause>,
) -> Result<(), CnfError> {
    match f {
        Formula::True => Ok(()),
        Formula::ForAll(v, s, body) => {
            let (v2, body2) = freshen(v, s, body, used);
            let mut us = universals.clone();
            us.push((v2, s.clone()));
            translate(&body2, outer, &us, used, out)
        }
        Formula::And(a, b) => {
            translate(a, outer, universals, used, out)?;
            translate(b, outer, universals, used, out)
        }
        Formula::Mk(g) => {
            let mut o = outer.clone();
            o.push(OuterWrap::Mk);
            translate(g, &o, universals, used, out)
        }
        Formula::MDef(n, g) => {
            let mut o = outer.clone();
            o.push(OuterWrap::MDef(*n));
            translate(g, &o, universals, used, out)
        }
        Formula::Def(n, g) => {
            let mut o = outer.clone();
            o.push(OuterWrap::Def(*n));
            translate(g, &o, universals, used, out)
        }
        Formula::Bel(agent, time, g) => {
            // Absorb into the outer chain only while the body is itself
            // modal or atomic; a body with connectives keeps the wrapper
            // outside the matrix all the same, so absorption is always safe
            // for belief over conjunction-free content. Distribution over a
            // conjunction happens by recursing first.
            match &**g {
                Formula::And(x, y) => {
                    let fx = Formula::Bel(agent.clone(), time.clone(), x.clone());
                    let fy = Formula::Bel(agent.clone(), time.clone(), y.clone());
                    translate(&fx, outer, universals, used, out)?;
                    translate(&fy, outer, universals, used, out)
                }
                Formula::True => Ok(()),
                _ => {
                    let mut o = outer.clone();
                    o.push(OuterWrap::Bel(BelWrap {
                        agent: agent.clone(),
                        time: Some(time.clone()),
                    }));
                    translate(g, &o, universals, used, out)
                }
            }
        }
        Formula::Exists(..) => Err(CnfError::Unsupported(
            "existential quantifier survived restriction checking".to_owned(),
        )),
        _ => {
            // Matrix position: classical CNF over signed, possibly
            // bel-wrapped atoms.
            let mut hoisted: Vec<(Ident, Ident)> = Vec::new();
            let m = nnf(f, true, used, &mut hoisted)?;
            let clauses = distribute(m);
            for lits in clauses {
                let lits = simplify(lits);
                let Some(lits) = lits else { continue };
                let mut us = universals.clone();
                us.extend(hoisted.iter().cloned());
                let clause = ModalClause {
                    outer: outer.clone(),
                    universals: Vec::new(),
                    disjuncts: lits,
                };
                let scoped = scope_universals(clause, &us);
                out.push(scoped);
            }
            Ok(())
        }
    }
}

/// Renames the bound variable apart if the name is already in use on this
/// path, so hoisting never captures.
fn freshen(v: &Ident, s: &Ident, body: &Formula, used: &mut BTreeSet<Ident>) -> (Ident, Formula) {
    if used.insert(v.clone()) {
        return (v.clone(), body.clone());
    }
    let mut fresh = format!("{v}'");
    while !used.insert(fresh.clone()) {
        fresh.push('\'');
    }
    let mut subst = Subst::new();
    subst.insert(v.clone(), Term::Var(fresh.clone(), s.clone()));
    (fresh, subst.apply_formula(body))
}

fn nnf(
    f: &Formula,
    positive: bool,
    used: &mut BTreeSet<Ident>,
    hoisted: &mut Vec<(Ident, Ident)>,
) -> Result<M, CnfError> {
    match f {
        Formula::True => Ok(if positive { M::True } else { M::False }),
        Formula::Atomic(a) => Ok(M::Lit(ClauseLit::plain(
            if positive { Sign::Pos } else { Sign::Neg },
            a.clone(),
        ))),
        Formula::Not(g) => nnf(g, !positive, used, hoisted),
        Formula::And(a, b) => {
            let x = nnf(a, positive, used, hoisted)?;
            let y = nnf(b, positive, used, hoisted)?;
            Ok(if positive { M::And(Box::new(x), Box::new(y)) } else { M::Or(Box::new(x), Box::new(y)) })
        }
        Formula::Or(a, b) => {
            let x = nnf(a, positive, used, hoisted)?;
            let y = nnf(b, positive, used, hoisted)?;
            Ok(if positive { M::Or(Box::new(x), Box::new(y)) } else { M::And(Box::new(x), Box::new(y)) })
        }
        Formula::Implies(a, b) => {
            let x = nnf(a, !positive, used, hoisted)?;
            let y = nnf(b, positive, used, hoisted)?;
            Ok(if positive { M::Or(Box::new(x), Box::new(y)) } else { M::And(Box::new(x), Box::new(y)) })
        }
        Formula::ForAll(v, s, body) => {
            if !positive {
                return Err(CnfError::Unsupported("negated universal quantifier".to_owned()));
            }
            let (v2, body2) = freshen(v, s, body, used);
            hoisted.push((v2, s.clone()));
            nnf(&body2, positive, used, hoisted)
        }
        Formula::Bel(agent, time, body) => bel_lit(agent, time, body, positive, Vec::new(), used, hoisted),
        Formula::Exists(..) => Err(CnfError::Unsupported(
            "existential quantifier survived restriction checking".to_owned(),
        )),
        Formula::Mk(_) | Formula::MDef(..) | Formula::Def(..) => Err(CnfError::Unsupported(
            "modal operator below a connective has no clausal image".to_owned(),
        )),
    }
}

/// Normalizes a belief applied below a connective into a single wrapped
/// literal, distributing over conjunction and folding inner negation into
/// the literal sign.
fn bel_lit(
    agent: &Term,
    time: &Term,
    body: &Formula,
    positive: bool,
    mut wrappers: Vec<BelWrap>,
    used: &mut BTreeSet<Ident>,
    hoisted: &mut Vec<(Ident, Ident)>,
) -> Result<M, CnfError> {
    wrappers.push(BelWrap { agent: agent.clone(), time: Some(time.clone()) });
    match body {
        Formula::Atomic(a) => Ok(M::Lit(ClauseLit {
            sign: if positive { Sign::Pos } else { Sign::Neg },
            wrappers,
            atom: a.clone(),
        })),
        Formula::Not(g) => bel_lit_inner(g, !positive, wrappers, used, hoisted),
        Formula::Bel(a2, t2, g) => bel_lit(a2, t2, g, positive, wrappers, used, hoisted),
        Formula::True => Ok(if positive { M::True } else { M::False }),
        Formula::And(x, y) => {
            let mx = bel_lit_inner(x, positive, wrappers.clone(), used, hoisted)?;
            let my = bel_lit_inner(y, positive, wrappers, used, hoisted)?;
            Ok(if positive {
                M::And(Box::new(mx), Box::new(my))
            } else {
                M::Or(Box::new(mx), Box::new(my))
            })
        }
        Formula::ForAll(v, s, g) => {
            let (v2, g2) = freshen(v, s, g, used);
            hoisted.push((v2, s.clone()));
            bel_lit_inner(&g2, positive, wrappers, used, hoisted)
        }
        Formula::Or(..) | Formula::Implies(..) => Err(CnfError::Unsupported(
            "belief in a disjunction cannot be split into clause literals".to_owned(),
        )),
        Formula::Exists(..) => Err(CnfError::Unsupported(
            "existential quantifier inside belief".to_owned(),
        )),
        Formula::Mk(_) | Formula::MDef(..) | Formula::Def(..) => Err(CnfError::Unsupported(
            "modal operator inside a belief literal".to_owned(),
        )),
    }
}

fn bel_lit_inner(
    body: &Formula,
    positive: bool,
    wrappers: Vec<BelWrap>,
    used: &mut BTreeSet<Ident>,
    hoisted: &mut Vec<(Ident, Ident)>,
) -> Result<M, CnfError> {
    match body {
        Formula::Atomic(a) => Ok(M::Lit(ClauseLit {
            sign: if positive { Sign::Pos } else { Sign::Neg },
            wrappers,
            atom: a.clone(),
        })),
        Formula::Not(g) => bel_lit_inner(g, !positive, wrappers, used, hoisted),
        Formula::Bel(a2, t2, g) => bel_lit(a2, t2, g, positive, wrappers, used, hoisted),
        Formula::True => Ok(if positive { M::True } else { M::False }),
        Formula::And(x, y) => {
            let mx = bel_lit_inner(x, positive, wrappers.clone(), used, hoisted)?;
            let my = bel_lit_inner(y, positive, wrappers, used, hoisted)?;
            Ok(if positive {
                M::And(Box::new(mx), Box::new(my))
            } else {
                M::Or(Box::new(mx), Box::new(my))
            })
        }
        other => bel_lit_tail_error(other),
    }
}

fn bel_lit_tail_error(body: &Formula) -> Result<M, CnfError> {
    match body {
        Formula::Or(..) | Formula::Implies(..) => Err(CnfError::Unsupported(
            "belief in a disjunction cannot be split into clause literals".to_owned(),
        )),
        _ => Err(CnfError::Unsupported("construct inside a belief literal".to_owned())),
    }
}

fn distribute(m: M) -> Vec<Vec<ClauseLit>> {
    match m {
        M::True => Vec::new(),
        M::False => alloc::vec![Vec::new()],
        M::Lit(l) => alloc::vec![alloc::vec![l]],
        M::And(a, b) => {
            let mut out = distribute(*a);
            out.extend(distribute(*b));
            out
        }
        M::Or(a, b) => {
            let left = distribute(*a);
            let right = distribute(*b);
            if left.is_empty() || right.is_empty() {
                // One side is `true`; the disjunction is `true`.
                return Vec::new();
            }
            let mut out = Vec::new();
            for l in &left {
                for r in &right {
                    let mut c = l.clone();
                    c.extend(r.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
    }
}

/// Factors duplicate literals and deletes tautological clauses. Returns
/// `None` when the clause is trivially true.
fn simplify(lits: Vec<ClauseLit>) -> Option<Vec<ClauseLit>> {
    let mut seen: Vec<ClauseLit> = Vec::new();
    for l in lits {
        if seen.iter().any(|s| s.complement_of(&l)) {
            return None;
        }
        if !seen.contains(&l) {
            seen.push(l);
        }
    }
    Some(seen)
}

/// Keeps only the universals whose variable actually occurs in the clause,
/// in prefix order.
fn scope_universals(mut clause: ModalClause, universals: &[(Ident, Ident)]) -> ModalClause {
    let mut occurring: BTreeSet<Ident> = BTreeSet::new();
    let collect_term = |t: &Term, occ: &mut BTreeSet<Ident>| {
        if let Term::Var(n, _) = t {
            occ.insert(n.clone());
        }
    };
    for w in &clause.outer {
        if let OuterWrap::Bel(b) = w {
            collect_term(&b.agent, &mut occurring);
            if let Some(t) = &b.time {
                collect_term(t, &mut occurring);
            }
        }
    }
    for d in &clause.disjuncts {
        for w in &d.wrappers {
            collect_term(&w.agent, &mut occurring);
            if let Some(t) = &w.time {
                collect_term(t, &mut occurring);
            }
        }
        for t in &d.atom.args {
            collect_term(t, &mut occurring);
        }
    }
    clause.universals = universals
        .iter()
        .filter(|(v, _)| occurring.contains(v))
        .cloned()
        .collect();
    clause
}

/// True iff every clause keeps belief nesting within the rapid model: the
/// outer chain opens with at most one of `mk`/`mdef`/`def`, carries at most
/// two `bel` wrappers, each disjunct carries at most one, and no disjunct
/// sits deeper than two levels in total.
pub fn validate_nesting(clauses: &[ModalClause]) -> bool {
    clauses.iter().all(|c| {
        for (i, w) in c.outer.iter().enumerate() {
            let head = matches!(w, OuterWrap::Mk | OuterWrap::MDef(_) | OuterWrap::Def(_));
            if head && i != 0 {
                return false;
            }
        }
        let chain = c.outer_bel_depth();
        if chain > 2 {
            return false;
        }
        c.disjuncts
            .iter()
            .all(|d| d.wrappers.len() <= 1 && chain + d.wrappers.len() <= 2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Atom;
    use alloc::vec;

    fn var(n: &str, s: &str) -> Term {
        Term::Var(n.to_owned(), s.to_owned())
    }

    fn atomf(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atomic(Atom::new(pred, args))
    }

    #[test]
    fn implication_under_mk_becomes_one_clause() {
        // forall X:map_item . mk(mapped(X) => vivid(X))
        let f = Formula::ForAll(
            "X".to_owned(),
            "map_item".to_owned(),
            Box::new(Formula::Mk(Box::new(Formula::implies(
                atomf("mapped", vec![var("X", "map_item")]),
                atomf("vivid", vec![var("X", "map_item")]),
            )))),
        );
        let clauses = to_modal_cnf(&f).expect("cnf");
        assert_eq!(clauses.len(), 1);
        let c = &clauses[0];
        assert_eq!(c.outer, vec![OuterWrap::Mk]);
        assert_eq!(c.universals, vec![("X".to_owned(), "map_item".to_owned())]);
        assert_eq!(c.disjuncts.len(), 2);
        assert_eq!(c.disjuncts[0].sign, Sign::Neg);
        assert_eq!(c.disjuncts[0].atom.pred, "mapped");
        assert_eq!(c.disjuncts[1].sign, Sign::Pos);
        assert_eq!(c.disjuncts[1].atom.pred, "vivid");
    }

    #[test]
    fn conjunction_consequent_splits_into_two_clauses() {
        // p => (q & r)
        let f = Formula::implies(
            atomf("p", vec![]),
            Formula::and(atomf("q", vec![]), atomf("r", vec![])),
        );
        let clauses = to_modal_cnf(&f).expect("cnf");
        assert_eq!(clauses.len(), 2);
        for c in &clauses {
            assert!(c.outer.is_empty());
            assert_eq!(c.disjuncts.len(), 2);
            assert_eq!(c.disjuncts[0].sign, Sign::Neg);
            assert_eq!(c.disjuncts[0].atom.pred, "p");
        }
        assert_eq!(clauses[0].disjuncts[1].atom.pred, "q");
        assert_eq!(clauses[1].disjuncts[1].atom.pred, "r");
    }

    #[test]
    fn ground_atom_is_a_unit_clause() {
        let f = atomf("mapped", vec![Term::Const("swamp_1".to_owned())]);
        let clauses = to_modal_cnf(&f).expect("cnf");
        assert_eq!(clauses.len(), 1);
        assert!(clauses[0].outer.is_empty());
        assert!(clauses[0].universals.is_empty());
        assert_eq!(clauses[0].disjuncts.len(), 1);
    }

    #[test]
    fn belief_consequent_becomes_wrapped_disjunct() {
        // mk(say(X) => bel(Y, T, say(X)))
        let say = || atomf("say", vec![var("X", "agent")]);
        let f = Formula::Mk(Box::new(Formula::implies(
            say(),
            Formula::Bel(var("Y", "agent"), var("T", "time"), Box::new(say())),
        )));
        let clauses = to_modal_cnf(&f).expect("cnf");
        assert_eq!(clauses.len(), 1);
        let c = &clauses[0];
        assert_eq!(c.outer, vec![OuterWrap::Mk]);
        assert_eq!(c.disjuncts[0].wrappers.len(), 0);
        assert_eq!(c.disjuncts[1].wrappers.len(), 1);
        assert_eq!(c.disjuncts[1].wrappers[0].agent, var("Y", "agent"));
    }

    #[test]
    fn nested_bel_chain_absorbs_into_outer() {
        // mk(bel(W, Y, bel(doris, Z, mapped(X))))
        let f = Formula::Mk(Box::new(Formula::Bel(
            var("W", "agent"),
            var("Y", "time"),
            Box::new(Formula::Bel(
                Term::Const("doris".to_owned()),
                var("Z", "time"),
                Box::new(atomf("mapped", vec![var("X", "route_section")])),
            )),
        )));
        let clauses = to_modal_cnf(&f).expect("cnf");
        assert_eq!(clauses.len(), 1);
        let c = &clauses[0];
        assert_eq!(c.outer.len(), 3);
        assert!(matches!(c.outer[0], OuterWrap::Mk));
        assert!(matches!(c.outer[1], OuterWrap::Bel(_)));
        assert!(matches!(c.outer[2], OuterWrap::Bel(_)));
        assert_eq!(c.disjuncts.len(), 1);
        assert!(c.disjuncts[0].wrappers.is_empty());
        assert!(validate_nesting(&clauses));
    }

    #[test]
    fn mk_distributes_over_conjunction() {
        let f = Formula::Mk(Box::new(Formula::and(atomf("p", vec![]), atomf("q", vec![]))));
        let clauses = to_modal_cnf(&f).expect("cnf");
        assert_eq!(clauses.len(), 2);
        assert!(clauses.iter().all(|c| c.outer == vec![OuterWrap::Mk]));
    }

    #[test]
    fn belief_in_disjunction_is_rejected() {
        let f = Formula::Bel(
            var("A", "agent"),
            var("T", "time"),
            Box::new(Formula::or(atomf("p", vec![]), atomf("q", vec![]))),
        );
        // Top-level absorption keeps the wrapper outside, which is fine.
        assert!(to_modal_cnf(&f).is_ok());
        // Under a disjunction it has no representation.
        let g = Formula::or(atomf("r", vec![]), f);
        assert!(matches!(to_modal_cnf(&g), Err(CnfError::Unsupported(_))));
    }

    #[test]
    fn tautological_clause_is_deleted_and_duplicates_factored() {
        let p = || atomf("p", vec![]);
        let taut = Formula::or(p(), Formula::not(p()));
        assert!(to_modal_cnf(&taut).expect("cnf").is_empty());

        let dup = Formula::or(p(), p());
        let clauses = to_modal_cnf(&dup).expect("cnf");
        assert_eq!(clauses[0].disjuncts.len(), 1);
    }

    #[test]
    fn true_disjunct_deletes_clause() {
        let f = Formula::or(atomf("p", vec![]), Formula::True);
        assert!(to_modal_cnf(&f).expect("cnf").is_empty());
        // ~true vanishes from the clause instead.
        let g = Formula::or(atomf("p", vec![]), Formula::not(Formula::True));
        let clauses = to_modal_cnf(&g).expect("cnf");
        assert_eq!(clauses.len(), 1);
        assert_eq!(clauses[0].disjuncts.len(), 1);
    }

    #[test]
    fn triple_bel_disjunct_fails_validation() {
        let deep = ModalClause {
            outer: Vec::new(),
            universals: Vec::new(),
            disjuncts: vec![ClauseLit {
                sign: Sign::Pos,
                wrappers: vec![
                    BelWrap { agent: Term::Const("a".to_owned()), time: None },
                    BelWrap { agent: Term::Const("b".to_owned()), time: None },
                    BelWrap { agent: Term::Const("c".to_owned()), time: None },
                ],
                atom: Atom::new("p", vec![]),
            }],
        };
        assert!(!validate_nesting(&[deep]));
        assert!(validate_nesting(&[]));
    }

    #[test]
    fn cnf_is_idempotent_on_rendered_output() {
        let f = Formula::ForAll(
            "X".to_owned(),
            "map_item".to_owned(),
            Box::new(Formula::Mk(Box::new(Formula::implies(
                atomf("mapped", vec![var("X", "map_item")]),
                atomf("vivid", vec![var("X", "map_item")]),
            )))),
        );
        let once = to_modal_cnf(&f).expect("cnf");
        let again = to_modal_cnf(&once[0].to_formula()).expect("cnf of rendered");
        assert_eq!(once, again);
    }
}
