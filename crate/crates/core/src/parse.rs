//! Parser for `.bspec` specification documents and the checks run before
//! compilation: the cooperative-domain restrictions and many-sorted
//! well-formedness.
//!
//! The grammar is line oriented. Declarations:
//!
//! ```text
//! sort map_item                  # root sort
//! subsort landmark map_item     # child sort with direct supersort
//! pred desc(map_item, relation, map_item)
//! const left_of: relation
//! temporal before               # predicate replaced by `true` when compiling
//! agents fred doris             # the two agent constants
//! space 20                      # declare an evidential space
//! order 5 < 20                  # space 5 is stronger than space 20
//! axiom mpcv: forall X:map_item . mk(mapped(X) => vivid(X))
//! ```
//!
//! Variables start uppercase and take their sort from the nearest binder;
//! constants and predicates are lowercase. An argument written as a compound
//! term (`desc(section_1, left_of, palm_beach_1)` inside `say(...)`) is a
//! quoted proposition of sort `prop`; a bare uppercase name in formula
//! position is a proposition variable.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{
    Atom, Formula, Ident, Literal, Prefix, Sign, Signature, SpaceOrder, Subst, Term, PROP_SORT,
};

/// Parsed specification: signature, labeled axioms, evidential-space order.
#[derive(Debug, Clone, Default)]
pub struct Spec {
    pub signature: Signature,
    pub axioms: Vec<(Ident, Formula)>,
    pub space_order: SpaceOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    CrossAgentBeliefImplication,
    DefInsideModal,
    UnsortedVariable,
    ArityMismatch,
    ExistentialUnderUniversal,
    UnknownSymbol,
    /// Negated mutual knowledge and similar inputs that fit none of the
    /// allowed construct classes.
    UnclassifiableConstruct,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::CrossAgentBeliefImplication => "CrossAgentBeliefImplication",
            ViolationKind::DefInsideModal => "DefInsideModal",
            ViolationKind::UnsortedVariable => "UnsortedVariable",
            ViolationKind::ArityMismatch => "ArityMismatch",
            ViolationKind::ExistentialUnderUniversal => "ExistentialUnderUniversal",
            ViolationKind::UnknownSymbol => "UnknownSymbol",
            ViolationKind::UnclassifiableConstruct => "UnclassifiableConstruct",
        };
        write!(f, "{s}")
    }
}

/// One rejected construct. Rendered as `LABEL:KIND:message`, one per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom_label: Ident,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.axiom_label, self.kind, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, msg: msg.into() })
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokKind {
    /// Lowercase word: constant, predicate, or keyword.
    Word(String),
    /// Uppercase word: variable.
    UWord(String),
    Nat(u32),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Less,
    Arrow,
}

#[derive(Debug, Clone)]
pub(crate) struct Tok {
    pub kind: TokKind,
    pub col: usize,
}

pub(crate) fn tokenize(line: &str, lineno: usize) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '#' => break,
            '(' => {
                toks.push(Tok { kind: TokKind::LParen, col });
                i += 1;
            }
            ')' => {
                toks.push(Tok { kind: TokKind::RParen, col });
                i += 1;
            }
            '[' => {
                toks.push(Tok { kind: TokKind::LBrack, col });
                i += 1;
            }
            ']' => {
                toks.push(Tok { kind: TokKind::RBrack, col });
                i += 1;
            }
            ',' => {
                toks.push(Tok { kind: TokKind::Comma, col });
                i += 1;
            }
            ':' => {
                toks.push(Tok { kind: TokKind::Colon, col });
                i += 1;
            }
            '.' => {
                toks.push(Tok { kind: TokKind::Dot, col });
                i += 1;
            }
            '~' => {
                toks.push(Tok { kind: TokKind::Tilde, col });
                i += 1;
            }
            '&' => {
                toks.push(Tok { kind: TokKind::Amp, col });
                i += 1;
            }
            '|' => {
                toks.push(Tok { kind: TokKind::Pipe, col });
                i += 1;
            }
            '<' => {
                toks.push(Tok { kind: TokKind::Less, col });
                i += 1;
            }
            '=' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    toks.push(Tok { kind: TokKind::Arrow, col });
                    i += 2;
                } else {
                    return err(lineno, col, "expected `=>`");
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &line[start..i];
                match text.parse::<u32>() {
                    Ok(n) => toks.push(Tok { kind: TokKind::Nat(n), col }),
                    Err(_) => return err(lineno, col, format!("number out of range: {text}")),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let text = line[start..i].to_owned();
                if c.is_ascii_uppercase() {
                    toks.push(Tok { kind: TokKind::UWord(text), col });
                } else {
                    toks.push(Tok { kind: TokKind::Word(text), col });
                }
            }
            other => return err(lineno, col, format!("unexpected character `{other}`")),
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Token-stream parser
// ---------------------------------------------------------------------------

pub(crate) struct P<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> P<'a> {
    pub(crate) fn new(toks: &'a [Tok], line: usize) -> Self {
        P { toks, pos: 0, line }
    }

    fn peek(&self) -> Option<&TokKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or_else(|| {
            self.toks.last().map(|t| t.col + 1).unwrap_or(1)
        })
    }

    fn bump(&mut self) -> Option<TokKind> {
        let t = self.toks.get(self.pos).map(|t| t.kind.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            err(self.line, self.col(), format!("expected {what}"))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            err(self.line, self.col(), "unexpected trailing input")
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.bump() {
            Some(TokKind::Word(w)) => Ok(w),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                err(self.line, self.col(), format!("expected {what}"))
            }
        }
    }

    fn nat(&mut self, what: &str) -> Result<u32, ParseError> {
        match self.bump() {
            Some(TokKind::Nat(n)) => Ok(n),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                err(self.line, self.col(), format!("expected {what}"))
            }
        }
    }

    /// Term in argument position. A compound lowercase application becomes a
    /// quoted proposition; an unbound variable gets the unknown sort `?` and
    /// is flagged later by `sort_check`.
    pub(crate) fn term(&mut self, env: &[(Ident, Ident)]) -> Result<Term, ParseError> {
        match self.bump() {
            Some(TokKind::UWord(v)) => {
                let sort = env
                    .iter()
                    .rev()
                    .find(|(n, _)| *n == v)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(|| "?".to_owned());
                Ok(Term::Var(v, sort))
            }
            Some(TokKind::Word(w)) => {
                if self.peek() == Some(&TokKind::LParen) {
                    let atom = self.atom_args(w, env)?;
                    Ok(Term::Quoted(Box::new(atom)))
                } else {
                    Ok(Term::Const(w))
                }
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                err(self.line, self.col(), "expected a term")
            }
        }
    }

    fn atom_args(&mut self, pred: String, env: &[(Ident, Ident)]) -> Result<Atom, ParseError> {
        self.expect(TokKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if !self.eat(&TokKind::RParen) {
            loop {
                args.push(self.term(env)?);
                if self.eat(&TokKind::RParen) {
                    break;
                }
                self.expect(TokKind::Comma, "`,` or `)`")?;
            }
        }
        Ok(Atom { pred, args })
    }

    /// Bare lowercase word (statement keywords, expectation statuses).
    pub(crate) fn keyword(&mut self) -> Result<String, ParseError> {
        self.word("a keyword")
    }

    /// Ground prefixed literal of the update and query language:
    /// `[~] (obj|bel|rmb) ( atom )`.
    pub(crate) fn prefixed_literal(&mut self) -> Result<Literal, ParseError> {
        let neg = self.eat(&TokKind::Tilde);
        let col = self.col();
        let word = self.word("a belief prefix (obj, bel or rmb)")?;
        let prefix = match word.as_str() {
            "obj" => Prefix::Obj,
            "bel" => Prefix::Bel,
            "rmb" => Prefix::Rmb,
            other => {
                return err(self.line, col, format!("expected obj, bel or rmb, got `{other}`"))
            }
        };
        self.expect(TokKind::LParen, "`(` after the prefix")?;
        let pred = self.word("a predicate name")?;
        let atom = if self.peek() == Some(&TokKind::LParen) {
            self.atom_args(pred, &[])?
        } else {
            Atom { pred, args: Vec::new() }
        };
        self.expect(TokKind::RParen, "`)` closing the literal")?;
        Ok(Literal { sign: if neg { Sign::Neg } else { Sign::Pos }, prefix, atom })
    }

    pub(crate) fn formula(&mut self, env: &mut Vec<(Ident, Ident)>) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(TokKind::Word(w)) if w == "forall" || w == "exists" => {
                let existential = w == "exists";
                self.bump();
                let mut binders = Vec::new();
                loop {
                    let v = match self.bump() {
                        Some(TokKind::UWord(v)) => v,
                        _ => {
                            self.pos = self.pos.saturating_sub(1);
                            return err(self.line, self.col(), "expected a variable binder");
                        }
                    };
                    self.expect(TokKind::Colon, "`:` after bound variable")?;
                    let sort = self.word("a sort name")?;
                    binders.push((v, sort));
                    if !self.eat(&TokKind::Comma) {
                        break;
                    }
                }
                self.expect(TokKind::Dot, "`.` after binders")?;
                let depth = env.len();
                env.extend(binders.iter().cloned());
                let body = self.formula(env)?;
                env.truncate(depth);
                let mut f = body;
                for (v, s) in binders.into_iter().rev() {
                    f = if existential {
                        Formula::Exists(v, s, Box::new(f))
                    } else {
                        Formula::ForAll(v, s, Box::new(f))
                    };
                }
                Ok(f)
            }
            _ => self.implication(env),
        }
    }

    fn implication(&mut self, env: &mut Vec<(Ident, Ident)>) -> Result<Formula, ParseError> {
        let lhs = self.disjunction(env)?;
        if self.eat(&TokKind::Arrow) {
            let rhs = self.formula(env)?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self, env: &mut Vec<(Ident, Ident)>) -> Result<Formula, ParseError> {
        let mut f = self.conjunction(env)?;
        while self.eat(&TokKind::Pipe) {
            let rhs = self.conjunction(env)?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self, env: &mut Vec<(Ident, Ident)>) -> Result<Formula, ParseError> {
        let mut f = self.unary(env)?;
        while self.eat(&TokKind::Amp) {
            let rhs = self.unary(env)?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self, env: &mut Vec<(Ident, Ident)>) -> Result<Formula, ParseError> {
        if self.eat(&TokKind::Tilde) {
            let f = self.unary(env)?;
            return Ok(Formula::not(f));
        }
        self.primary(env)
    }

    fn primary(&mut self, env: &mut Vec<(Ident, Ident)>) -> Result<Formula, ParseError> {
        let start_col = self.col();
        match self.bump() {
            Some(TokKind::LParen) => {
                let f = self.formula(env)?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(f)
            }
            Some(TokKind::UWord(v)) => {
                // Bare variable in formula position: a proposition variable.
                let sort = env
                    .iter()
                    .rev()
                    .find(|(n, _)| *n == v)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(|| "?".to_owned());
                Ok(Formula::Atomic(Atom::prop_hole(Term::Var(v, sort))))
            }
            Some(TokKind::Word(w)) => match w.as_str() {
                "true" => Ok(Formula::True),
                "mk" => {
                    self.expect(TokKind::LParen, "`(` after mk")?;
                    let f = self.formula(env)?;
                    self.expect(TokKind::RParen, "`)`")?;
                    Ok(Formula::Mk(Box::new(f)))
                }
                "bel" => {
                    self.expect(TokKind::LParen, "`(` after bel")?;
                    let agent = self.term(env)?;
                    self.expect(TokKind::Comma, "`,`")?;
                    let time = self.term(env)?;
                    self.expect(TokKind::Comma, "`,`")?;
                    let body = self.formula(env)?;
                    self.expect(TokKind::RParen, "`)`")?;
                    Ok(Formula::Bel(agent, time, Box::new(body)))
                }
                "def" | "mdef" => {
                    let mutual = w == "mdef";
                    self.expect(TokKind::LBrack, "`[` after default operator")?;
                    let n = self.nat("an evidential-space index")?;
                    self.expect(TokKind::RBrack, "`]`")?;
                    self.expect(TokKind::LParen, "`(`")?;
                    let f = self.formula(env)?;
                    self.expect(TokKind::RParen, "`)`")?;
                    Ok(if mutual {
                        Formula::MDef(n, Box::new(f))
                    } else {
                        Formula::Def(n, Box::new(f))
                    })
                }
                _ => {
                    if self.peek() == Some(&TokKind::LParen) {
                        let atom = self.atom_args(w, env)?;
                        Ok(Formula::Atomic(atom))
                    } else {
                        // Zero-ary predicate.
                        Ok(Formula::Atomic(Atom { pred: w, args: Vec::new() }))
                    }
                }
            },
            _ => err(self.line, start_col, "expected a formula"),
        }
    }
}

// ---------------------------------------------------------------------------
// Document parser
// ---------------------------------------------------------------------------

/// Parses a `.bspec` document. Syntax errors and duplicate declarations are
/// reported with line and column; the first error aborts.
pub fn parse_spec(text: &str) -> Result<Spec, ParseError> {
    let mut spec = Spec::default();
    let mut skolem_counter = 0u32;
    let mut seen_labels: BTreeMap<Ident, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = P::new(&toks, line);
        let head = match p.bump() {
            Some(TokKind::Word(w)) => w,
            _ => return err(line, 1, "expected a declaration keyword"),
        };
        match head.as_str() {
            "sort" => {
                let name = p.word("a sort name")?;
                p.expect_end()?;
                if !spec.signature.sorts.declare_root(&name) {
                    return err(line, 1, format!("duplicate sort `{name}`"));
                }
            }
            "subsort" => {
                let child = p.word("a sort name")?;
                let parent = p.word("a parent sort name")?;
                p.expect_end()?;
                match spec.signature.sorts.declare_sub(&child, &parent) {
                    Err(e) => return err(line, 1, e.to_string()),
                    Ok(false) => return err(line, 1, format!("duplicate sort `{child}`")),
                    Ok(true) => {}
                }
            }
            "pred" => {
                let name = p.word("a predicate name")?;
                let mut args = Vec::new();
                if p.eat(&TokKind::LParen) {
                    loop {
                        args.push(p.word("a sort name")?);
                        if p.eat(&TokKind::RParen) {
                            break;
                        }
                        p.expect(TokKind::Comma, "`,` or `)`")?;
                    }
                }
                p.expect_end()?;
                for s in &args {
                    if !spec.signature.sorts.contains(s) {
                        return err(line, 1, format!("undeclared sort `{s}` in predicate {name}"));
                    }
                }
                if spec.signature.predicates.insert(name.clone(), args).is_some() {
                    return err(line, 1, format!("duplicate predicate `{name}`"));
                }
            }
            "const" => {
                let name = p.word("a constant name")?;
                p.expect(TokKind::Colon, "`:`")?;
                let sort = p.word("a sort name")?;
                p.expect_end()?;
                if !spec.signature.sorts.contains(&sort) {
                    return err(line, 1, format!("undeclared sort `{sort}`"));
                }
                if sort == PROP_SORT {
                    return err(line, 1, "constants of sort prop are not allowed; quote an atom instead");
                }
                if spec.signature.constants.insert(name.clone(), sort).is_some() {
                    return err(line, 1, format!("duplicate constant `{name}`"));
                }
            }
            "temporal" => {
                let name = p.word("a predicate name")?;
                p.expect_end()?;
                match spec.signature.predicates.get(&name) {
                    None => return err(line, 1, format!("temporal relation `{name}` is not a declared predicate")),
                    Some(args) if !args.iter().all(|s| s == "time") => {
                        return err(line, 1, format!("temporal relation `{name}` must take only time arguments"))
                    }
                    Some(_) => {}
                }
                spec.signature.temporal_relations.insert(name);
            }
            "agents" => {
                let a = p.word("an agent constant")?;
                let b = p.word("an agent constant")?;
                p.expect_end()?;
                if a == b {
                    return err(line, 1, "the two agents must be distinct");
                }
                if !spec.signature.sorts.contains("agent") {
                    return err(line, 1, "declare `sort agent` before `agents`");
                }
                for name in [&a, &b] {
                    match spec.signature.constants.get(name.as_str()) {
                        Some(s) if s != "agent" => {
                            return err(line, 1, format!("`{name}` is declared with sort {s}, not agent"))
                        }
                        Some(_) => {}
                        None => {
                            spec.signature.constants.insert(name.clone(), "agent".to_owned());
                        }
                    }
                }
                spec.signature.agents = (a, b);
            }
            "space" => {
                let n = p.nat("an evidential-space index")?;
                p.expect_end()?;
                spec.space_order.declare(n);
            }
            "order" => {
                let a = p.nat("an evidential-space index")?;
                p.expect(TokKind::Less, "`<`")?;
                let b = p.nat("an evidential-space index")?;
                p.expect_end()?;
                if let Err(e) = spec.space_order.add_stronger(a, b) {
                    return err(line, 1, e);
                }
            }
            "axiom" => {
                let label = p.word("an axiom label")?;
                p.expect(TokKind::Colon, "`:` after axiom label")?;
                if seen_labels.insert(label.clone(), line).is_some() {
                    return err(line, 1, format!("duplicate axiom label `{label}`"));
                }
                let mut env = Vec::new();
                let f = p.formula(&mut env)?;
                p.expect_end()?;
                let f = skolemize_outer_exists(f, &mut spec.signature, &mut skolem_counter);
                spec.axioms.push((label, f));
            }
            other => return err(line, 1, format!("unknown declaration `{other}`")),
        }
    }

    Ok(spec)
}

/// Replaces a leading chain of existential quantifiers with fresh constants
/// of the bound sort. Inner existentials are left for `check_restrictions`
/// to reject.
fn skolemize_outer_exists(f: Formula, sig: &mut Signature, counter: &mut u32) -> Formula {
    match f {
        Formula::Exists(v, s, body) => {
            *counter += 1;
            let mut name = format!("{}_sk{}", v.to_ascii_lowercase(), counter);
            while sig.constants.contains_key(&name) {
                *counter += 1;
                name = format!("{}_sk{}", v.to_ascii_lowercase(), counter);
            }
            sig.constants.insert(name.clone(), s.clone());
            let mut subst = Subst::new();
            subst.insert(v, Term::Const(name));
            let body = subst.apply_formula(&body);
            skolemize_outer_exists(body, sig, counter)
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Restriction checking
// ---------------------------------------------------------------------------

/// Rejects constructs that cannot be compiled into the three-prefix model:
/// implications carrying beliefs across agents with different content,
/// defaults inside modal scope, existentials under universals, and negated
/// mutual knowledge. Violations are values; order follows the axiom list.
pub fn check_restrictions(spec: &Spec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (label, f) in &spec.axioms {
        walk_restrictions(label, f, false, false, false, &mut out);
    }
    out
}

fn walk_restrictions(
    label: &str,
    f: &Formula,
    in_modal: bool,
    under_universal: bool,
    under_neg: bool,
    out: &mut Vec<Violation>,
) {
    match f {
        Formula::True | Formula::Atomic(_) => {}
        Formula::Not(g) => {
            if matches!(**g, Formula::Mk(_)) {
                out.push(Violation {
                    axiom_label: label.to_owned(),
                    kind: ViolationKind::UnclassifiableConstruct,
                    message: "negated mutual knowledge fits no allowed construct class".to_owned(),
                });
            }
            walk_restrictions(label, g, in_modal, under_universal, true, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            walk_restrictions(label, a, in_modal, under_universal, under_neg, out);
            walk_restrictions(label, b, in_modal, under_universal, under_neg, out);
        }
        Formula::Implies(a, b) => {
            check_cross_agent(label, a, b, out);
            walk_restrictions(label, a, in_modal, under_universal, under_neg, out);
            walk_restrictions(label, b, in_modal, under_universal, under_neg, out);
        }
        Formula::ForAll(_, _, g) => {
            walk_restrictions(label, g, in_modal, true, under_neg, out);
        }
        Formula::Exists(_, _, g) => {
            if under_universal {
                out.push(Violation {
                    axiom_label: label.to_owned(),
                    kind: ViolationKind::ExistentialUnderUniversal,
                    message: "existential quantifier in the scope of a universal".to_owned(),
                });
            }
            walk_restrictions(label, g, in_modal, under_universal, under_neg, out);
        }
        Formula::Mk(g) | Formula::Bel(_, _, g) => {
            walk_restrictions(label, g, true, under_universal, under_neg, out);
        }
        Formula::MDef(_, g) | Formula::Def(_, g) => {
            if in_modal {
                out.push(Violation {
                    axiom_label: label.to_owned(),
                    kind: ViolationKind::DefInsideModal,
                    message: "default operator inside the scope of bel or mk".to_owned(),
                });
            }
            walk_restrictions(label, g, in_modal, under_universal, under_neg, out);
        }
    }
}

/// Flags `bel(A, ..) => bel(B, ..)` when the agents differ and the embedded
/// content is not identical. Identical-content lifts between agents are the
/// allowed "relations between domain properties and beliefs" pattern.
fn check_cross_agent(label: &str, ant: &Formula, cons: &Formula, out: &mut Vec<Violation>) {
    let cons_bel = match strip_quantifiers(cons) {
        Formula::Bel(agent, _, body) => Some((agent.clone(), (**body).clone())),
        _ => None,
    };
    let Some((cons_agent, cons_body)) = cons_bel else {
        return;
    };
    for conj in conjuncts(strip_quantifiers(ant)) {
        if let Formula::Bel(ant_agent, _, ant_body) = conj {
            if *ant_agent != cons_agent && **ant_body != cons_body {
                out.push(Violation {
                    axiom_label: label.to_owned(),
                    kind: ViolationKind::CrossAgentBeliefImplication,
                    message: format!(
                        "implication from a belief of {ant_agent} to a belief of {cons_agent} with different content"
                    ),
                });
            }
        }
    }
}

fn strip_quantifiers(f: &Formula) -> &Formula {
    match f {
        Formula::ForAll(_, _, g) | Formula::Exists(_, _, g) => strip_quantifiers(g),
        other => other,
    }
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut v = conjuncts(a);
            v.extend(conjuncts(b));
            v
        }
        other => alloc::vec![other],
    }
}

// ---------------------------------------------------------------------------
// Sort checking
// ---------------------------------------------------------------------------

/// Validates every atom against the signature: declared predicates, matching
/// arity, argument sorts at or below the declared sort, variables bound and
/// consistently sorted, quoted propositions ground.
pub fn sort_check(spec: &Spec) -> Vec<Violation> {
    let mut out = Vec::new();
    for (label, f) in &spec.axioms {
        sort_check_formula(label, f, spec, &mut out);
    }
    out
}

fn sort_check_formula(label: &str, f: &Formula, spec: &Spec, out: &mut Vec<Violation>) {
    match f {
        Formula::True => {}
        Formula::Atomic(a) => sort_check_atom(label, a, spec, out),
        Formula::Not(g) | Formula::Mk(g) | Formula::ForAll(_, _, g) | Formula::Exists(_, _, g) => {
            sort_check_formula(label, g, spec, out)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            sort_check_formula(label, a, spec, out);
            sort_check_formula(label, b, spec, out);
        }
        Formula::MDef(n, g) | Formula::Def(n, g) => {
            if !spec.space_order.contains(*n) {
                out.push(violation(
                    label,
                    ViolationKind::UnknownSymbol,
                    format!("evidential space {n} is not declared"),
                ));
            }
            sort_check_formula(label, g, spec, out);
        }
        Formula::Bel(agent, time, g) => {
            check_term_sort(label, agent, "agent", spec, out);
            check_term_sort(label, time, "time", spec, out);
            sort_check_formula(label, g, spec, out);
        }
    }
}

fn sort_check_atom(label: &str, a: &Atom, spec: &Spec, out: &mut Vec<Violation>) {
    if a.is_prop_hole() {
        check_term_sort(label, &a.args[0], PROP_SORT, spec, out);
        return;
    }
    let Some(declared) = spec.signature.predicates.get(&a.pred) else {
        out.push(violation(
            label,
            ViolationKind::UnknownSymbol,
            format!("undeclared predicate `{}`", a.pred),
        ));
        return;
    };
    if declared.len() != a.args.len() {
        out.push(violation(
            label,
            ViolationKind::ArityMismatch,
            format!("{} expects {} arguments, got {}", a.pred, declared.len(), a.args.len()),
        ));
        return;
    }
    for (i, (arg, want)) in a.args.iter().zip(declared.iter()).enumerate() {
        if let Term::Quoted(q) = arg {
            if want != PROP_SORT {
                out.push(violation(
                    label,
                    ViolationKind::UnsortedVariable,
                    format!("argument {} of {}: quoted proposition where {want} expected", i + 1, a.pred),
                ));
            }
            if !q.is_ground() {
                out.push(violation(
                    label,
                    ViolationKind::UnsortedVariable,
                    format!("argument {} of {}: quoted propositions must be ground", i + 1, a.pred),
                ));
            }
            sort_check_atom(label, q, spec, out);
            continue;
        }
        check_term_sort(label, arg, want, spec, out);
    }
}

fn check_term_sort(label: &str, t: &Term, want: &str, spec: &Spec, out: &mut Vec<Violation>) {
    let sig = &spec.signature;
    let found = match t {
        Term::Var(name, sort) => {
            if sort == "?" {
                out.push(violation(
                    label,
                    ViolationKind::UnsortedVariable,
                    format!("variable {name} is not bound by any quantifier"),
                ));
                return;
            }
            if !sig.sorts.contains(sort) {
                out.push(violation(
                    label,
                    ViolationKind::UnknownSymbol,
                    format!("variable {name} has undeclared sort {sort}"),
                ));
                return;
            }
            sort.clone()
        }
        Term::Const(name) => match sig.constants.get(name) {
            Some(s) => s.clone(),
            None => {
                out.push(violation(
                    label,
                    ViolationKind::UnknownSymbol,
                    format!("undeclared constant `{name}`"),
                ));
                return;
            }
        },
        Term::Quoted(q) => {
            if !q.is_ground() {
                out.push(violation(
                    label,
                    ViolationKind::UnsortedVariable,
                    "quoted propositions must be ground".to_owned(),
                ));
            }
            sort_check_atom(label, q, spec, out);
            PROP_SORT.to_owned()
        }
    };
    if !sig.sorts.contains(want) || !sig.sorts.is_subsort(&found, want).unwrap_or(false) {
        out.push(violation(
            label,
            ViolationKind::UnsortedVariable,
            format!("`{t}` has sort {found}, which is not a subsort of {want}"),
        ));
    }
}

fn violation(label: &str, kind: ViolationKind, message: String) -> Violation {
    Violation { axiom_label: label.to_owned(), kind, message }
}

impl Spec {
    /// Canonical rendering; `parse_spec . render . parse_spec == parse_spec`.
    pub fn render(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let sig = &self.signature;
        // Roots before children keeps redeclaration order valid.
        let mut emitted: Vec<&Ident> = Vec::new();
        let names: Vec<&Ident> = sig.sorts.names().collect();
        let mut remaining: Vec<&Ident> = names.clone();
        while !remaining.is_empty() {
            let mut progressed = false;
            remaining.retain(|n| {
                let parent_done = match parent_of(sig, n) {
                    None => true,
                    Some(p) => emitted.iter().any(|e| *e == p),
                };
                if parent_done {
                    match parent_of(sig, n) {
                        None => {
                            let _ = writeln!(s, "sort {n}");
                        }
                        Some(p) => {
                            let _ = writeln!(s, "subsort {n} {p}");
                        }
                    }
                    emitted.push(n);
                    progressed = true;
                    false
                } else {
                    true
                }
            });
            if !progressed {
                break;
            }
        }
        for (p, args) in &sig.predicates {
            if args.is_empty() {
                let _ = writeln!(s, "pred {p}");
            } else {
                let _ = writeln!(s, "pred {p}({})", args.join(", "));
            }
        }
        for (c, sort) in &sig.constants {
            if (c == &sig.agents.0 || c == &sig.agents.1) && sort == "agent" {
                continue;
            }
            let _ = writeln!(s, "const {c}: {sort}");
        }
        for t in &sig.temporal_relations {
            let _ = writeln!(s, "temporal {t}");
        }
        if !sig.agents.0.is_empty() {
            let _ = writeln!(s, "agents {} {}", sig.agents.0, sig.agents.1);
        }
        for sp in self.space_order.spaces() {
            let _ = writeln!(s, "space {sp}");
        }
        for a in self.space_order.spaces() {
            for b in self.space_order.spaces() {
                if self.space_order.is_stronger(a, b) {
                    let _ = writeln!(s, "order {a} < {b}");
                }
            }
        }
        for (label, f) in &self.axioms {
            let _ = writeln!(s, "axiom {label}: {f}");
        }
        s
    }
}

fn parent_of<'a>(sig: &'a Signature, name: &str) -> Option<&'a Ident> {
    // SortForest does not expose parents directly; recover it by probing.
    sig.sorts.parent_of(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Prefix;

    const MINI: &str = "\
sort agent
sort time
sort map_item
subsort landmark map_item
sort prop
sort mood
pred mapped(map_item)
pred vivid(map_item)
pred say(agent, time, mood, prop)
pred before(time, time)
temporal before
agents fred doris
space 20
axiom mpcv: forall X:map_item . mk(mapped(X) => vivid(X))
";

    #[test]
    fn parses_minimal_spec() {
        let spec = parse_spec(MINI).expect("parse");
        assert_eq!(spec.axioms.len(), 1);
        assert_eq!(spec.axioms[0].0, "mpcv");
        assert!(spec.signature.sorts.is_subsort("landmark", "map_item").unwrap());
        assert_eq!(spec.signature.agents, ("fred".to_owned(), "doris".to_owned()));
        assert!(spec.space_order.contains(20));
        let rendered = spec.render();
        let reparsed = parse_spec(&rendered).expect("reparse");
        assert_eq!(spec.axioms, reparsed.axioms);
    }

    #[test]
    fn signature_only_document_has_no_axioms() {
        let spec = parse_spec("sort agent\n").expect("parse");
        assert!(spec.axioms.is_empty());
    }

    #[test]
    fn parses_mutual_default_axiom() {
        let text = "\
sort agent
sort time
sort map_item
subsort landmark map_item
pred mapped(map_item)
agents fred doris
space 20
axiom share: forall X:agent, Y:agent, Z:time, W:landmark . mdef[20](bel(X, Z, bel(Y, Z, mapped(W))))
";
        let spec = parse_spec(text).expect("parse");
        let (_, f) = &spec.axioms[0];
        // forall*4 then MDef(20, Bel(X, Z, Bel(Y, Z, mapped(W)))).
        let mut cur = f;
        let mut quantifiers = 0;
        while let Formula::ForAll(_, _, g) = cur {
            quantifiers += 1;
            cur = g;
        }
        assert_eq!(quantifiers, 4);
        match cur {
            Formula::MDef(20, inner) => match &**inner {
                Formula::Bel(_, _, body) => assert!(matches!(&**body, Formula::Bel(..))),
                other => panic!("expected bel, got {other:?}"),
            },
            other => panic!("expected mdef, got {other:?}"),
        }
        assert!(sort_check(&spec).is_empty());
        assert!(check_restrictions(&spec).is_empty());
    }

    #[test]
    fn syntax_error_carries_position() {
        let e = parse_spec("axiom broken: forall X . mapped(X)\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.msg.contains("expected"));
    }

    #[test]
    fn rejects_cross_agent_belief_implication() {
        let text = "\
sort agent
sort time
pred p
pred q
agents a b
axiom bad: forall T:time . mk(bel(a, T, p) => bel(b, T, q))
";
        let spec = parse_spec(text).expect("parse");
        let vs = check_restrictions(&spec);
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].kind, ViolationKind::CrossAgentBeliefImplication);
        assert_eq!(vs[0].axiom_label, "bad");
    }

    #[test]
    fn allows_identical_content_lift() {
        let text = "\
sort agent
sort time
pred p
agents a b
axiom ok: forall T:time . mk(bel(a, T, p) => bel(b, T, p))
";
        let spec = parse_spec(text).expect("parse");
        assert!(check_restrictions(&spec).is_empty());
    }

    #[test]
    fn rejects_default_inside_modal() {
        let text = "\
sort agent
sort time
pred p
agents a b
space 5
axiom bad: forall T:time . bel(a, T, def[5](p))
";
        let spec = parse_spec(text).expect("parse");
        let vs = check_restrictions(&spec);
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].kind, ViolationKind::DefInsideModal);
    }

    #[test]
    fn rejects_negated_mutual_knowledge() {
        let text = "\
sort agent
pred p
agents a b
axiom odd: ~mk(p)
";
        let spec = parse_spec(text).expect("parse");
        let vs = check_restrictions(&spec);
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].kind, ViolationKind::UnclassifiableConstruct);
    }

    #[test]
    fn rejects_existential_under_universal_and_skolemizes_outer() {
        let text = "\
sort agent
sort map_item
pred mapped(map_item)
pred knows(agent, map_item)
agents a b
axiom fact: exists X:map_item . mapped(X)
axiom bad: forall A:agent . exists X:map_item . knows(A, X)
";
        let spec = parse_spec(text).expect("parse");
        // The outer existential became a fresh constant.
        let (_, fact) = &spec.axioms[0];
        assert!(matches!(fact, Formula::Atomic(_)));
        assert!(spec.signature.constants.keys().any(|c| c.starts_with("x_sk")));
        let vs = check_restrictions(&spec);
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].kind, ViolationKind::ExistentialUnderUniversal);
    }

    #[test]
    fn sort_check_flags_arity_and_sort_errors() {
        let text = "\
sort agent
sort map_item
sort relation
pred vivid(map_item)
pred desc(map_item, relation, map_item)
agents doris fred
axiom a1: desc(doris, doris)
axiom a2: vivid(doris)
";
        let spec = parse_spec(text).expect("parse");
        let vs = sort_check(&spec);
        assert!(vs.iter().any(|v| v.axiom_label == "a1" && v.kind == ViolationKind::ArityMismatch));
        assert!(vs
            .iter()
            .any(|v| v.axiom_label == "a2" && v.kind == ViolationKind::UnsortedVariable));
    }

    #[test]
    fn sort_check_accepts_subsort_argument() {
        let text = "\
sort map_item
subsort landmark map_item
pred mapped(map_item)
const swamp_1: landmark
axiom ok: mapped(swamp_1)
";
        let spec = parse_spec(text).expect("parse");
        assert!(sort_check(&spec).is_empty());
    }

    #[test]
    fn violation_renders_in_diagnostic_format() {
        let v = Violation {
            axiom_label: "bad".to_owned(),
            kind: ViolationKind::DefInsideModal,
            message: "default operator inside the scope of bel or mk".to_owned(),
        };
        assert_eq!(
            v.to_string(),
            "bad:DefInsideModal:default operator inside the scope of bel or mk"
        );
    }

    #[test]
    fn prop_variable_parses_as_formula() {
        let text = "\
sort agent
sort time
sort mood
sort prop
pred say(agent, time, mood, prop)
const assert: mood
agents fred doris
axiom truth: forall X:agent, Y:time, W:prop . mk(say(X, Y, assert, W) => W)
";
        let spec = parse_spec(text).expect("parse");
        assert!(sort_check(&spec).is_empty());
        let (_, f) = &spec.axioms[0];
        let mut cur = f;
        while let Formula::ForAll(_, _, g) = cur {
            cur = g;
        }
        match cur {
            Formula::Mk(inner) => match &**inner {
                Formula::Implies(_, rhs) => match &**rhs {
                    Formula::Atomic(a) => assert!(a.is_prop_hole()),
                    other => panic!("expected prop hole, got {other:?}"),
                },
                other => panic!("expected implication, got {other:?}"),
            },
            other => panic!("expected mk, got {other:?}"),
        }
        let _ = Prefix::Obj; // silence unused import in cfg(test)
    }
}
