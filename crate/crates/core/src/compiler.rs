//! Compilation of modal clauses into the rapid model: time stripping, the
//! expansion of mutual knowledge and mutual defaults into the finite
//! `obj`/`bel`/`rmb` prefix scheme, and the split into a quantified rule
//! base plus ground truth-maintenance directives.
//!
//! The compiled model speaks for a single agent. `obj` literals are that
//! agent's own domain beliefs, `bel` its beliefs about the partner's
//! beliefs, and `rmb` the residual summarizing every deeper nesting. Mutual
//! knowledge over an ordinary clause yields the three prefixed images. A
//! clause of shape `~P | bel(A, P)` is the identical-content lift: the
//! partner instance gives `~obj(P) | bel(P)` and the next level collapses to
//! `~bel(P) | rmb(P)`, while the self instance only re-derives those, so a
//! lift axiom compiles to exactly two rules whose agent argument stays
//! universal. Belief chains about a named agent never produce `rmb` rules:
//! a residual about a particular agent's beliefs is not representable.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::cnf::{to_modal_cnf, BelWrap, CnfError, ClauseLit, ModalClause, OuterWrap};
use crate::logic::{Atom, Ident, Literal, Prefix, Sign, Signature, SpaceOrder, Subst, Term};
use crate::parse::Spec;

/// Compiled quantified clause awaiting instantiation against ATMS nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub universals: Vec<(Ident, Ident)>,
    pub disjuncts: Vec<Literal>,
    /// Present iff this is a default schema; the clause is then a single
    /// positive literal.
    pub default_space: Option<u32>,
    /// Identical-content lift rules (`~obj(P) | bel(P)` and the `bel`/`rmb`
    /// rung) are forward-only: backward chaining through them would invent
    /// unheard observations.
    pub lift: bool,
}

impl Rule {
    pub fn is_unit_fact(&self) -> bool {
        self.default_space.is_none()
            && self.disjuncts.len() == 1
            && self.disjuncts[0].sign == Sign::Pos
    }

    /// One-line dump form, e.g.
    /// `share.1: forall W:landmark . def[20] bel(mapped(W))`.
    pub fn render(&self) -> String {
        let mut s = format!("{}: ", self.id);
        if !self.universals.is_empty() {
            s.push_str("forall ");
            for (i, (v, sort)) in self.universals.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&format!("{v}:{sort}"));
            }
            s.push_str(" . ");
        }
        if let Some(space) = self.default_space {
            s.push_str(&format!("def[{space}] "));
        }
        for (i, l) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            s.push_str(&l.to_string());
        }
        s
    }
}

/// Ground instruction for seeding the ATMS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Premise(Literal),
    /// Antecedent contents, consequent content, originating axiom label.
    Justification(Vec<Literal>, Literal, String),
    DefaultAssumption(Literal, u32),
}

/// Output of compilation: everything the runtime needs.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub rule_base: Vec<Rule>,
    pub initial_directives: Vec<Directive>,
    pub space_order: SpaceOrder,
    /// Time-stripped signature; updates and queries are checked against it.
    pub signature: Signature,
    pub self_agent: Ident,
    pub partner_agent: Ident,
    /// Audit trail of dropped tautologies and unrepresentable images.
    pub warnings: Vec<String>,
}

impl CompiledModel {
    /// Deterministic rule-base dump, one rule per line.
    pub fn render_rule_base(&self) -> String {
        let mut s = String::new();
        for r in &self.rule_base {
            s.push_str(&r.render());
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    Cnf { axiom: String, error: CnfError },
    UnrepresentableNesting { axiom: String, detail: String },
    MultiPositiveGroundClause { axiom: String },
    NoPositiveGroundClause { axiom: String },
    MalformedDefault { axiom: String, detail: String },
    MissingAgents,
    UnknownSelfAgent(String),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::Cnf { axiom, error } => write!(f, "axiom {axiom}: {error}"),
            CompileError::UnrepresentableNesting { axiom, detail } => {
                write!(f, "axiom {axiom}: UnrepresentableNesting: {detail}")
            }
            CompileError::MultiPositiveGroundClause { axiom } => {
                write!(f, "axiom {axiom}: ground clause with more than one positive literal")
            }
            CompileError::NoPositiveGroundClause { axiom } => {
                write!(f, "axiom {axiom}: ground clause with no positive literal")
            }
            CompileError::MalformedDefault { axiom, detail } => {
                write!(f, "axiom {axiom}: malformed default: {detail}")
            }
            CompileError::MissingAgents => write!(f, "specification declares no agent pair"),
            CompileError::UnknownSelfAgent(a) => {
                write!(f, "`{a}` is not one of the declared agents")
            }
        }
    }
}

/// Quantified or ground clause produced by prefix expansion; ground means
/// the universal list is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedClause {
    pub universals: Vec<(Ident, Ident)>,
    pub literals: Vec<Literal>,
    pub default_space: Option<u32>,
}

// ---------------------------------------------------------------------------
// Time stripping
// ---------------------------------------------------------------------------

/// Removes every temporal trace from a clause: belief wrappers lose their
/// time argument, predicates lose their time-sorted argument positions,
/// temporal-relation atoms become `true` and are simplified away, and
/// universals that no longer occur are dropped. Returns `None` when a
/// positive temporal disjunct makes the whole clause true.
pub fn strip_time(clause: &ModalClause, sig: &Signature) -> Option<ModalClause> {
    let time_positions = |pred: &str| -> Vec<usize> {
        sig.predicates
            .get(pred)
            .map(|args| {
                args.iter()
                    .enumerate()
                    .filter(|(_, s)| is_time_sort(sig, s))
                    .map(|(i, _)| i)
                    .collect()
            })
            .unwrap_or_default()
    };

    let mut out = ModalClause {
        outer: Vec::new(),
        universals: Vec::new(),
        disjuncts: Vec::new(),
    };
    for w in &clause.outer {
        out.outer.push(match w {
            OuterWrap::Bel(b) => OuterWrap::Bel(BelWrap { agent: b.agent.clone(), time: None }),
            other => other.clone(),
        });
    }
    for d in &clause.disjuncts {
        if sig.temporal_relations.contains(&d.atom.pred) {
            match d.sign {
                // A true disjunct makes the clause true.
                Sign::Pos => return None,
                // `~true` simply vanishes.
                Sign::Neg => continue,
            }
        }
        let drop = time_positions(&d.atom.pred);
        let atom = Atom {
            pred: d.atom.pred.clone(),
            args: d
                .atom
                .args
                .iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, t)| t.clone())
                .collect(),
        };
        out.disjuncts.push(ClauseLit {
            sign: d.sign,
            wrappers: d
                .wrappers
                .iter()
                .map(|w| BelWrap { agent: w.agent.clone(), time: None })
                .collect(),
            atom,
        });
    }
    // Keep only universals that still occur somewhere.
    let mut occurring: Vec<Ident> = Vec::new();
    let see = |t: &Term, occ: &mut Vec<Ident>| {
        if let Term::Var(n, _) = t {
            if !occ.contains(n) {
                occ.push(n.clone());
            }
        }
    };
    for w in &out.outer {
        if let OuterWrap::Bel(b) = w {
            see(&b.agent, &mut occurring);
        }
    }
    for d in &out.disjuncts {
        for w in &d.wrappers {
            see(&w.agent, &mut occurring);
        }
        for t in &d.atom.args {
            see(t, &mut occurring);
        }
    }
    out.universals = clause
        .universals
        .iter()
        .filter(|(v, _)| occurring.contains(v))
        .cloned()
        .collect();
    Some(out)
}

fn is_time_sort(sig: &Signature, sort: &str) -> bool {
    sig.sorts.contains("time") && sig.sorts.is_subsort(sort, "time").unwrap_or(false)
}

/// Signature with time argument positions removed and temporal relations
/// deleted; what the runtime checks updates and queries against.
pub fn strip_signature(sig: &Signature) -> Signature {
    let mut out = sig.clone();
    out.predicates = sig
        .predicates
        .iter()
        .filter(|(p, _)| !sig.temporal_relations.contains(*p))
        .map(|(p, args)| {
            (p.clone(), args.iter().filter(|s| !is_time_sort(sig, s)).cloned().collect())
        })
        .collect();
    out.temporal_relations = Default::default();
    out
}

// ---------------------------------------------------------------------------
// Prefix expansion
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum Level {
    Obj,
    Bel,
    Rmb,
}

impl Level {
    fn prefix(self) -> Prefix {
        match self {
            Level::Obj => Prefix::Obj,
            Level::Bel => Prefix::Bel,
            Level::Rmb => Prefix::Rmb,
        }
    }
}

struct Expander<'a> {
    self_agent: &'a str,
    partner_agent: &'a str,
    axiom: &'a str,
    warnings: &'a mut Vec<String>,
}

/// Expands one time-free clause into its finite prefixed images; see the
/// module docs for the case scheme.
pub fn expand_prefixes(
    clause: &ModalClause,
    self_agent: &str,
    partner_agent: &str,
    axiom: &str,
    warnings: &mut Vec<String>,
) -> Result<Vec<ExpandedClause>, CompileError> {
    let mut ex = Expander { self_agent, partner_agent, axiom, warnings };
    ex.expand(clause)
}

impl<'a> Expander<'a> {
    fn expand(&mut self, clause: &ModalClause) -> Result<Vec<ExpandedClause>, CompileError> {
        let head = clause.outer.first().and_then(|w| match w {
            OuterWrap::Mk => Some(Head::Mk),
            OuterWrap::MDef(n) => Some(Head::MDef(*n)),
            OuterWrap::Def(n) => Some(Head::Def(*n)),
            OuterWrap::Bel(_) => None,
        });
        let chain: Vec<&BelWrap> = clause
            .outer
            .iter()
            .filter_map(|w| match w {
                OuterWrap::Bel(b) => Some(b),
                _ => None,
            })
            .collect();
        if chain.len() > 2 {
            return Err(self.unrepresentable("belief chain deeper than two levels"));
        }

        let mut images: Vec<ExpandedClause> = Vec::new();
        let mut dropped = 0usize;
        match head {
            Some(Head::Mk) if chain.is_empty() => {
                for level in [Level::Obj, Level::Bel, Level::Rmb] {
                    self.matrix_images(clause, level, None, &mut images, &mut dropped);
                }
            }
            Some(Head::Mk) => {
                self.chain_images(clause, &chain, None, &mut images, &mut dropped)?;
            }
            Some(Head::MDef(space)) => {
                self.require_default_shape(clause)?;
                if chain.is_empty() {
                    // A mutual default over plain content holds at every
                    // represented level.
                    for level in [Level::Obj, Level::Bel, Level::Rmb] {
                        self.matrix_images(clause, level, Some(space), &mut images, &mut dropped);
                    }
                } else {
                    self.chain_images(clause, &chain, Some(space), &mut images, &mut dropped)?;
                }
            }
            Some(Head::Def(space)) => {
                self.require_default_shape(clause)?;
                if chain.is_empty() {
                    self.matrix_images(clause, Level::Obj, Some(space), &mut images, &mut dropped);
                } else {
                    // An ordinary default is not mutual: only the depth
                    // images reachable by instantiating the chain.
                    self.named_chain_images(clause, &chain, Some(space), &mut images, &mut dropped);
                }
            }
            None => {
                if chain.is_empty() {
                    self.matrix_images(clause, Level::Obj, None, &mut images, &mut dropped);
                } else {
                    self.named_chain_images(clause, &chain, None, &mut images, &mut dropped);
                }
            }
        }

        dedup(&mut images);
        if images.is_empty() && dropped > 0 {
            return Err(self.unrepresentable(
                "every image requires distinct-content nesting beyond rmb",
            ));
        }
        Ok(images)
    }

    /// Images of a clause whose outer chain is `mk`/`mdef` over one or two
    /// belief wrappers.
    fn chain_images(
        &mut self,
        clause: &ModalClause,
        chain: &[&BelWrap],
        space: Option<u32>,
        images: &mut Vec<ExpandedClause>,
        dropped: &mut usize,
    ) -> Result<(), CompileError> {
        let both_universal = chain.len() == 2
            && chain.iter().all(|w| matches!(w.agent, Term::Var(..)));
        if both_universal {
            // Mutual operator over a doubly universal belief chain: the
            // content lives at belief depth, so the images are the `bel`
            // level and the residual.
            self.matrix_images(clause, Level::Bel, space, images, dropped);
            self.matrix_images(clause, Level::Rmb, space, images, dropped);
            return Ok(());
        }
        // Instantiate chain agent variables over the two agents, collapse
        // leading self references, and keep the depths the model represents.
        // A chain ending in a named agent blocks the residual: an `rmb`
        // about that agent's beliefs in particular is not representable.
        self.named_chain_images(clause, chain, space, images, dropped);
        if images.is_empty() && *dropped > 0 {
            return Err(self.unrepresentable(
                "belief chain about named agents has no representable image",
            ));
        }
        Ok(())
    }

    fn named_chain_images(
        &mut self,
        clause: &ModalClause,
        chain: &[&BelWrap],
        space: Option<u32>,
        images: &mut Vec<ExpandedClause>,
        dropped: &mut usize,
    ) {
        let vars: Vec<(Ident, Ident)> = chain
            .iter()
            .filter_map(|w| match &w.agent {
                Term::Var(n, s) => Some((n.clone(), s.clone())),
                _ => None,
            })
            .collect();
        for theta in self.agent_assignments(&vars) {
            let mut depth_chain: Vec<&str> = alloc::vec![self.self_agent];
            let mut ok = true;
            for w in chain {
                let name = match &w.agent {
                    Term::Const(c) => c.clone(),
                    Term::Var(n, _) => match theta.get(n) {
                        Some(Term::Const(c)) => c.clone(),
                        _ => {
                            ok = false;
                            break;
                        }
                    },
                    Term::Quoted(_) => {
                        ok = false;
                        break;
                    }
                };
                if name == self.self_agent {
                    // Collapse a self reference at the head of the chain:
                    // the model already speaks from self's viewpoint.
                    if depth_chain.last() == Some(&self.self_agent)
                        && depth_chain.len() == 1
                    {
                        continue;
                    }
                    depth_chain.push(self.self_agent);
                } else if name == self.partner_agent {
                    depth_chain.push(self.partner_agent);
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                *dropped += 1;
                self.warn(format!("chain agent outside the two-agent domain"));
                continue;
            }
            let level = match depth_chain.len() - 1 {
                0 => Level::Obj,
                1 => Level::Bel,
                _ => {
                    *dropped += 1;
                    self.warn(format!(
                        "dropped image: named belief chain deeper than the model represents"
                    ));
                    continue;
                }
            };
            self.matrix_images_theta(clause, level, space, &theta, images, dropped);
        }
    }

    /// Images of the clause matrix at one level, enumerating assignments of
    /// the wrapper agent variables.
    fn matrix_images(
        &mut self,
        clause: &ModalClause,
        level: Level,
        space: Option<u32>,
        images: &mut Vec<ExpandedClause>,
        dropped: &mut usize,
    ) {
        let mut wrapper_vars: Vec<(Ident, Ident)> = Vec::new();
        for d in &clause.disjuncts {
            for w in &d.wrappers {
                if let Term::Var(n, s) = &w.agent {
                    if !wrapper_vars.iter().any(|(v, _)| v == n) {
                        wrapper_vars.push((n.clone(), s.clone()));
                    }
                }
            }
        }
        for theta in self.agent_assignments(&wrapper_vars) {
            self.matrix_images_theta(clause, level, space, &theta, images, dropped);
        }
    }

    fn matrix_images_theta(
        &mut self,
        clause: &ModalClause,
        level: Level,
        space: Option<u32>,
        theta: &Subst,
        images: &mut Vec<ExpandedClause>,
        dropped: &mut usize,
    ) {
        // Atoms of unwrapped disjuncts, for the identical-content collapse.
        let unwrapped: Vec<Atom> = clause
            .disjuncts
            .iter()
            .filter(|d| d.wrappers.is_empty())
            .map(|d| theta.apply_atom(&d.atom))
            .collect();

        let mut lits: Vec<Literal> = Vec::new();
        for d in &clause.disjuncts {
            let atom = theta.apply_atom(&d.atom);
            let depth = match level {
                Level::Obj => 0usize,
                Level::Bel => 1,
                Level::Rmb => 2,
            };
            let extra = if d.wrappers.is_empty() {
                0
            } else {
                // One inner wrapper; its agent decides whether the depth
                // grows. At the object level a self belief stays at the
                // object level.
                let agent = theta.apply_term(&d.wrappers[0].agent);
                match (&agent, level) {
                    (Term::Const(c), Level::Obj) if c == self.self_agent => 0,
                    _ => 1,
                }
            };
            let total = depth + extra;
            let prefix = match total {
                0 => Prefix::Obj,
                1 => Prefix::Bel,
                _ => {
                    if unwrapped.contains(&atom) {
                        // Identical content at a shallower position in the
                        // same clause: the deep literal is summarized by the
                        // residual.
                        Prefix::Rmb
                    } else {
                        self.warn(format!(
                            "dropped literal whose expansion exceeds rmb with distinct content"
                        ));
                        *dropped += 1;
                        continue;
                    }
                }
            };
            lits.push(Literal { sign: d.sign, prefix, atom });
        }

        if lits.is_empty() {
            return;
        }
        // Tautological images are deleted but logged.
        for l in &lits {
            if lits.iter().any(|m| *m == l.complement()) {
                self.warn(format!("dropped tautological image at {} level", level.prefix()));
                return;
            }
        }
        let mut seen: Vec<Literal> = Vec::new();
        for l in lits {
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        let universals: Vec<(Ident, Ident)> = clause
            .universals
            .iter()
            .filter(|(v, _)| theta.get(v).is_none())
            .filter(|(v, _)| {
                seen.iter().any(|l| l.atom.args.iter().any(|t| t.var_name() == Some(v)))
            })
            .cloned()
            .collect();
        images.push(ExpandedClause { universals, literals: seen, default_space: space });
    }

    /// All assignments of the given agent variables to the two agents, in a
    /// fixed order (self before partner, leftmost variable slowest).
    fn agent_assignments(&self, vars: &[(Ident, Ident)]) -> Vec<Subst> {
        let mut out = alloc::vec![Subst::new()];
        for (v, _) in vars {
            let mut next = Vec::new();
            for theta in &out {
                for agent in [self.self_agent, self.partner_agent] {
                    let mut t = theta.clone();
                    t.insert(v.clone(), Term::Const(agent.to_owned()));
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }

    fn require_default_shape(&self, clause: &ModalClause) -> Result<(), CompileError> {
        let ok = clause.disjuncts.len() == 1
            && clause.disjuncts[0].sign == Sign::Pos
            && clause.disjuncts[0].wrappers.is_empty();
        if ok {
            Ok(())
        } else {
            Err(CompileError::MalformedDefault {
                axiom: self.axiom.to_owned(),
                detail: "a default wraps a single positive atom".to_owned(),
            })
        }
    }

    fn unrepresentable(&self, detail: &str) -> CompileError {
        CompileError::UnrepresentableNesting {
            axiom: self.axiom.to_owned(),
            detail: detail.to_owned(),
        }
    }

    fn warn(&mut self, msg: String) {
        self.warnings.push(format!("axiom {}: {msg}", self.axiom));
    }
}

enum Head {
    Mk,
    MDef(u32),
    Def(u32),
}

/// Alpha-equivalence key: variables renamed in order of first occurrence.
fn canonical_key(c: &ExpandedClause) -> String {
    let mut names: BTreeMap<Ident, Ident> = BTreeMap::new();
    let mut counter = 0usize;
    let mut renamed = Vec::new();
    for l in &c.literals {
        let args: Vec<String> = l
            .atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(n, s) => {
                    let fresh = names.entry(n.clone()).or_insert_with(|| {
                        counter += 1;
                        format!("_v{counter}")
                    });
                    format!("{fresh}:{s}")
                }
                other => other.to_string(),
            })
            .collect();
        renamed.push(format!(
            "{}{}:{}({})",
            if l.sign == Sign::Neg { "~" } else { "" },
            l.prefix,
            l.atom.pred,
            args.join(",")
        ));
    }
    format!("{:?}|{}", c.default_space, renamed.join("|"))
}

fn dedup(images: &mut Vec<ExpandedClause>) {
    let mut seen: Vec<String> = Vec::new();
    images.retain(|c| {
        let key = canonical_key(c);
        if seen.contains(&key) {
            false
        } else {
            seen.push(key);
            true
        }
    });
}

// ---------------------------------------------------------------------------
// Whole-spec compilation
// ---------------------------------------------------------------------------

/// Runs CNF translation, time stripping and prefix expansion over every
/// axiom, then partitions the results: ground unit clauses become premises
/// (or default assumptions), ground disjunctions become justifications, and
/// quantified clauses form the rule base. Deterministic: rules are ordered
/// by axiom, then by expansion case.
pub fn compile(spec: &Spec, self_agent: &str) -> Result<CompiledModel, CompileError> {
    let (a, b) = &spec.signature.agents;
    if a.is_empty() || b.is_empty() {
        return Err(CompileError::MissingAgents);
    }
    let partner = if self_agent == a {
        b.clone()
    } else if self_agent == b {
        a.clone()
    } else {
        return Err(CompileError::UnknownSelfAgent(self_agent.to_owned()));
    };

    let mut warnings = Vec::new();
    let mut rule_base: Vec<Rule> = Vec::new();
    let mut directives: Vec<Directive> = Vec::new();
    let mut seen_keys: Vec<String> = Vec::new();

    for (label, formula) in &spec.axioms {
        let clauses = to_modal_cnf(formula)
            .map_err(|error| CompileError::Cnf { axiom: label.clone(), error })?;
        let mut emitted = 0usize;
        for clause in &clauses {
            let Some(stripped) = strip_time(clause, &spec.signature) else {
                continue;
            };
            let images = expand_prefixes(&stripped, self_agent, &partner, label, &mut warnings)?;
            for image in images {
                let key = canonical_key(&image);
                if seen_keys.contains(&key) {
                    continue;
                }
                seen_keys.push(key);
                if image.universals.is_empty() {
                    directives.push(directive_from_ground(label, &image)?);
                } else {
                    emitted += 1;
                    let lift = is_lift(&image);
                    rule_base.push(Rule {
                        id: format!("{label}.{emitted}"),
                        universals: image.universals,
                        disjuncts: image.literals,
                        default_space: image.default_space,
                        lift,
                    });
                }
            }
        }
    }

    Ok(CompiledModel {
        rule_base,
        initial_directives: directives,
        space_order: spec.space_order.clone(),
        signature: strip_signature(&spec.signature),
        self_agent: self_agent.to_owned(),
        partner_agent: partner,
        warnings,
    })
}

fn directive_from_ground(label: &str, image: &ExpandedClause) -> Result<Directive, CompileError> {
    if let Some(space) = image.default_space {
        // Shape was validated during expansion.
        return Ok(Directive::DefaultAssumption(image.literals[0].clone(), space));
    }
    if image.literals.len() == 1 {
        return Ok(Directive::Premise(image.literals[0].clone()));
    }
    let positives: Vec<&Literal> = image.literals.iter().filter(|l| l.is_positive()).collect();
    match positives.len() {
        0 => Err(CompileError::NoPositiveGroundClause { axiom: label.to_owned() }),
        1 => {
            let consequent = positives[0].clone();
            let antecedents: Vec<Literal> = image
                .literals
                .iter()
                .filter(|l| !l.is_positive())
                .map(|l| l.complement())
                .collect();
            Ok(Directive::Justification(antecedents, consequent, label.to_owned()))
        }
        _ => Err(CompileError::MultiPositiveGroundClause { axiom: label.to_owned() }),
    }
}

/// A lift rule carries the same atom from one prefix up to the next.
fn is_lift(image: &ExpandedClause) -> bool {
    if image.literals.len() != 2 || image.default_space.is_some() {
        return false;
    }
    let (a, b) = (&image.literals[0], &image.literals[1]);
    let (neg, pos) = match (a.sign, b.sign) {
        (Sign::Neg, Sign::Pos) => (a, b),
        (Sign::Pos, Sign::Neg) => (b, a),
        _ => return false,
    };
    neg.atom == pos.atom && neg.prefix < pos.prefix
}

/// Every literal of every rule and directive is time free: no argument of a
/// time sort and no temporal-relation predicate.
pub fn model_is_time_free(model: &CompiledModel, original: &Signature) -> bool {
    let lit_ok = |l: &Literal| -> bool {
        if original.temporal_relations.contains(&l.atom.pred) {
            return false;
        }
        l.atom.args.iter().all(|t| match t {
            Term::Var(_, s) => !is_time_sort(original, s),
            Term::Const(c) => original
                .constants
                .get(c)
                .map(|s| !is_time_sort(original, s))
                .unwrap_or(true),
            Term::Quoted(_) => true,
        })
    };
    let rules_ok = model.rule_base.iter().all(|r| {
        r.disjuncts.iter().all(lit_ok) && r.universals.iter().all(|(_, s)| !is_time_sort(original, s))
    });
    let dirs_ok = model.initial_directives.iter().all(|d| match d {
        Directive::Premise(l) => lit_ok(l),
        Directive::DefaultAssumption(l, _) => lit_ok(l),
        Directive::Justification(ants, cons, _) => ants.iter().all(lit_ok) && lit_ok(cons),
    });
    rules_ok && dirs_ok
}

// Re-exported for tests that need nesting validation over compiled fixtures.
pub use crate::cnf::validate_nesting as validate_clause_nesting;
