//! The update and query language: the restricted surface through which
//! domain events enter the compiled model and belief status is read back.
//!
//! One statement per line, `#` comments:
//!
//! ```text
//! update obj(mapped(swamp_1))
//! update obj(say(doris, assert, desc(section_1, left_of, palm_beach_1)))
//! update ~rmb(vivid(section_1))
//! query rmb(vivid(section_1))
//! expect rmb(vivid(section_1)) out
//! dump
//! ```
//!
//! Statements are ground and time free; the modal prefixes `obj`, `bel`,
//! `rmb` (optionally negated) apply to whole literals only. Positive
//! updates become premises, at any prefix; a negative `bel` or `rmb` update
//! becomes an assumed node justified by a fresh timestamp assumption, so
//! newer evidence can displace it later. Queries are side-effect free.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::atms::{InconsistencySignal, TruthStatus};
use crate::compiler::CompiledModel;
use crate::engine::{Engine, RunStats, DEFAULT_BUDGET};
use crate::logic::{Literal, Prefix, Sign, Signature, Term, PROP_SORT};
use crate::parse::{tokenize, ParseError, P};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UqlStatement {
    Update(Literal),
    Query(Literal),
    Dump,
    /// Test-harness extension: assert the expected truth status.
    Expect(Literal, ExpectedStatus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedStatus {
    Holds,
    Out,
}

impl fmt::Display for ExpectedStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedStatus::Holds => write!(f, "holds"),
            ExpectedStatus::Out => write!(f, "out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAnswer {
    /// Supported; carries one minimal environment, rendered.
    Yes(String),
    No,
    /// Unordered-spaces outcome: both sides stand in their own spaces.
    Both { own_spaces: BTreeSet<u32>, opposite_spaces: BTreeSet<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuntimeError {
    IllSorted(String),
    Inconsistency(InconsistencySignal),
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuntimeError::IllSorted(m) => write!(f, "ill-sorted statement: {m}"),
            RuntimeError::Inconsistency(s) => write!(f, "{s}"),
        }
    }
}

/// A compiled model plus its live engine state.
pub struct ModelRuntime {
    pub model: CompiledModel,
    pub engine: Engine,
}

impl ModelRuntime {
    /// Seeds the engine with the model's initial directives and runs the
    /// first fixpoint.
    pub fn new(model: CompiledModel) -> Result<Self, RuntimeError> {
        let mut engine = Engine::new(&model);
        engine.seed(&model).map_err(RuntimeError::Inconsistency)?;
        Ok(ModelRuntime { model, engine })
    }

    /// Applies one update: premises for positive (and objective) literals,
    /// a timestamp-assumed node for negative nested beliefs, then chaining
    /// to fixpoint and opposite resolution.
    pub fn apply_update(&mut self, lit: &Literal) -> Result<RunStats, RuntimeError> {
        check_ground_literal(lit, &self.model.signature).map_err(RuntimeError::IllSorted)?;
        match (lit.sign, lit.prefix) {
            (Sign::Neg, Prefix::Bel) | (Sign::Neg, Prefix::Rmb) => {
                self.engine.assert_timestamped(lit);
            }
            _ => {
                self.engine.assert_premise(lit);
            }
        }
        self.engine
            .run_to_fixpoint(DEFAULT_BUDGET)
            .map_err(RuntimeError::Inconsistency)
    }

    /// Side-effect-free query against the resolved state.
    pub fn answer_query(&self, lit: &Literal) -> Result<QueryAnswer, RuntimeError> {
        check_ground_literal(lit, &self.model.signature).map_err(RuntimeError::IllSorted)?;
        Ok(answer_query(&self.engine, lit))
    }
}

/// Query surface over a resolved engine state.
pub fn answer_query(engine: &Engine, lit: &Literal) -> QueryAnswer {
    if let Some((own, opp)) = engine.atms.coexistence(lit) {
        return QueryAnswer::Both { own_spaces: own.clone(), opposite_spaces: opp.clone() };
    }
    match engine.atms.holds(lit) {
        TruthStatus::Holds(label) => {
            let env = label.iter().next().cloned().unwrap_or_default();
            QueryAnswer::Yes(engine.atms.render_env(&env))
        }
        TruthStatus::Out | TruthStatus::Retracted => QueryAnswer::No,
    }
}

/// Validates a ground prefixed literal against the compiled signature.
fn check_ground_literal(lit: &Literal, sig: &Signature) -> Result<(), String> {
    if !lit.is_ground() {
        return Err(format!("`{lit}` is not ground"));
    }
    check_ground_atom(&lit.atom, sig)
}

fn check_ground_atom(atom: &crate::logic::Atom, sig: &Signature) -> Result<(), String> {
    let Some(declared) = sig.predicates.get(&atom.pred) else {
        return Err(format!("undeclared predicate `{}`", atom.pred));
    };
    if declared.len() != atom.args.len() {
        return Err(format!(
            "{} expects {} arguments, got {}",
            atom.pred,
            declared.len(),
            atom.args.len()
        ));
    }
    for (i, (arg, want)) in atom.args.iter().zip(declared.iter()).enumerate() {
        match arg {
            Term::Quoted(q) => {
                if want != PROP_SORT {
                    return Err(format!(
                        "argument {} of {}: quoted proposition where {want} expected",
                        i + 1,
                        atom.pred
                    ));
                }
                check_ground_atom(q, sig)?;
            }
            Term::Const(c) => {
                let Some(have) = sig.constants.get(c) else {
                    return Err(format!("undeclared constant `{c}`"));
                };
                if !sig.sorts.is_subsort(have, want).unwrap_or(false) {
                    return Err(format!(
                        "argument {} of {}: `{c}` has sort {have}, not a subsort of {want}",
                        i + 1,
                        atom.pred
                    ));
                }
            }
            Term::Var(..) => return Err(format!("variable inside `{atom}`")),
        }
    }
    Ok(())
}

/// Parses a `.uql` script: one statement per line, `#` comments.
pub fn parse_script(text: &str) -> Result<Vec<(usize, UqlStatement)>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = P::new(&toks, line);
        let head = p.keyword()?;
        let stmt = match head.as_str() {
            "update" => UqlStatement::Update(p.prefixed_literal()?),
            "query" => UqlStatement::Query(p.prefixed_literal()?),
            "expect" => {
                let lit = p.prefixed_literal()?;
                let status = match p.keyword()?.as_str() {
                    "holds" => ExpectedStatus::Holds,
                    "out" => ExpectedStatus::Out,
                    other => {
                        return Err(ParseError {
                            line,
                            col: 1,
                            msg: format!("expected `holds` or `out`, got `{other}`"),
                        })
                    }
                };
                UqlStatement::Expect(lit, status)
            }
            "dump" => UqlStatement::Dump,
            other => {
                return Err(ParseError {
                    line,
                    col: 1,
                    msg: format!("unknown statement `{other}`"),
                })
            }
        };
        p.expect_end()?;
        out.push((line, stmt));
    }
    Ok(out)
}

/// Result of running a script.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub text: String,
    pub expect_failures: usize,
    pub errors: usize,
}

impl Transcript {
    pub fn passed(&self) -> bool {
        self.expect_failures == 0 && self.errors == 0
    }
}

/// Executes statements in order against the runtime. The transcript is
/// deterministic byte for byte; the first failing expectation is recorded
/// and execution continues.
pub fn run_script(rt: &mut ModelRuntime, statements: &[(usize, UqlStatement)]) -> Transcript {
    let mut text = String::new();
    let mut expect_failures = 0usize;
    let mut errors = 0usize;
    for (_, stmt) in statements {
        match stmt {
            UqlStatement::Update(lit) => {
                text.push_str(&format!("> update {lit}\n"));
                match rt.apply_update(lit) {
                    Ok(stats) => {
                        text.push_str(&format!(
                            "ok (fired {}, nodes {}, justs {})\n",
                            stats.firings,
                            rt.engine.atms.node_count(),
                            rt.engine.atms.justification_count()
                        ));
                    }
                    Err(e) => {
                        errors += 1;
                        text.push_str(&format!("error: {e}\n"));
                    }
                }
            }
            UqlStatement::Query(lit) => {
                text.push_str(&format!("> query {lit}\n"));
                match rt.answer_query(lit) {
                    Ok(QueryAnswer::Yes(env)) => text.push_str(&format!("yes: {lit} {env}\n")),
                    Ok(QueryAnswer::No) => text.push_str(&format!("no: {lit}\n")),
                    Ok(QueryAnswer::Both { own_spaces, opposite_spaces }) => {
                        text.push_str(&format!(
                            "both: {lit} in spaces {}; {} in spaces {}\n",
                            render_spaces(&own_spaces),
                            lit.complement(),
                            render_spaces(&opposite_spaces)
                        ));
                    }
                    Err(e) => {
                        errors += 1;
                        text.push_str(&format!("error: {e}\n"));
                    }
                }
            }
            UqlStatement::Expect(lit, expected) => {
                text.push_str(&format!("> expect {lit} {expected}\n"));
                match rt.answer_query(lit) {
                    Ok(answer) => {
                        let holds = !matches!(answer, QueryAnswer::No);
                        let pass = matches!(
                            (expected, holds),
                            (ExpectedStatus::Holds, true) | (ExpectedStatus::Out, false)
                        );
                        if pass {
                            match answer {
                                QueryAnswer::Yes(env) => {
                                    text.push_str(&format!("PASS: {lit} holds {env}\n"))
                                }
                                QueryAnswer::Both { .. } => {
                                    text.push_str(&format!("PASS: {lit} holds (unordered spaces)\n"))
                                }
                                QueryAnswer::No => text.push_str(&format!("PASS: {lit} out\n")),
                            }
                        } else {
                            expect_failures += 1;
                            text.push_str(&format!(
                                "FAIL: expected {lit} {expected}, got {}\n",
                                if holds { "holds" } else { "out" }
                            ));
                        }
                    }
                    Err(e) => {
                        errors += 1;
                        text.push_str(&format!("error: {e}\n"));
                    }
                }
            }
            UqlStatement::Dump => {
                text.push_str("> dump\n-- state --\n");
                text.push_str(&rt.engine.atms.dump());
                text.push_str("-- end state --\n");
            }
        }
    }
    Transcript { text, expect_failures, errors }
}

fn render_spaces(spaces: &BTreeSet<u32>) -> String {
    let parts: Vec<String> = spaces.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile;
    use crate::parse::parse_spec;

    const MAP_TASK: &str = r#"
sort agent
sort time
sort map_item
subsort landmark map_item
subsort route_section map_item
sort mood
sort relation
sort prop

pred vivid(map_item)
pred mapped(map_item)
pred desc(map_item, relation, map_item)
pred say(agent, time, mood, prop)
pred before(time, time)
temporal before

const assert: mood
const left_of: relation
const right_of: relation
const swamp_1: landmark
const palm_beach_1: landmark
const section_1: route_section

agents fred doris
space 20

axiom mpcv: forall X:map_item . mk(mapped(X) => vivid(X))
axiom percep: forall X:agent, Y:agent, Z:time, W:time, V:mood, U:prop . mk(say(X, Z, V, U) & before(Z, W) => bel(Y, W, say(X, Z, V, U)))
axiom truth: forall X:agent, Y:time, W:prop . mk(say(X, Y, assert, W) => W)
axiom dcv: forall X:map_item, Y:relation, Z:map_item . mk(vivid(Z) & desc(X, Y, Z) => vivid(X))
axiom share: forall X:agent, Y:agent, Z:time, W:landmark . mdef[20](bel(X, Z, bel(Y, Z, mapped(W))))
axiom ig: forall W:agent, X:route_section, Y:time, Z:time . mk(bel(W, Y, bel(doris, Z, mapped(X))))
"#;

    const SCENARIO: &str = r#"
# Fred has a swamp on his map.
update obj(mapped(swamp_1))
expect obj(vivid(swamp_1)) holds
# Doris: "the first part of the route goes left of the palm beach".
update obj(say(doris, assert, desc(section_1, left_of, palm_beach_1)))
expect bel(vivid(section_1)) holds
expect rmb(vivid(section_1)) holds
# Fred signals he has not understood.
update ~rmb(vivid(section_1))
query rmb(vivid(section_1))
expect rmb(vivid(section_1)) out
# Doris re-describes the palm beach relative to the swamp.
update obj(say(doris, assert, desc(palm_beach_1, right_of, swamp_1)))
query rmb(vivid(section_1))
expect rmb(vivid(section_1)) holds
"#;

    fn runtime() -> ModelRuntime {
        let spec = parse_spec(MAP_TASK).expect("parse");
        let model = compile(&spec, "fred").expect("compile");
        ModelRuntime::new(model).expect("runtime")
    }

    #[test]
    fn scenario_checkpoints_pass() {
        let mut rt = runtime();
        let statements = parse_script(SCENARIO).expect("script");
        let transcript = run_script(&mut rt, &statements);
        assert!(transcript.passed(), "transcript:\n{}", transcript.text);
        assert!(transcript.text.contains("no: rmb(vivid(section_1))"));
        assert!(transcript.text.contains("yes: rmb(vivid(section_1))"));
    }

    #[test]
    fn query_is_side_effect_free() {
        let mut rt = runtime();
        let statements = parse_script("update obj(mapped(swamp_1))\n").expect("script");
        run_script(&mut rt, &statements);
        let before = rt.engine.atms.dump();
        let queries = parse_script(
            "query rmb(vivid(section_1))\nquery obj(vivid(never_mentioned))\n",
        );
        // never_mentioned is not declared, so the second query errors; even
        // the error path must not touch state.
        let queries = match queries {
            Ok(q) => q,
            Err(e) => panic!("parse: {e}"),
        };
        run_script(&mut rt, &statements_prefix(&queries, 1));
        let t = run_script(&mut rt, &statements_prefix(&queries, 2));
        assert_eq!(before, rt.engine.atms.dump());
        assert!(t.text.contains("no: rmb(vivid(section_1))") || t.text.contains("error"));
    }

    fn statements_prefix(
        s: &[(usize, UqlStatement)],
        n: usize,
    ) -> Vec<(usize, UqlStatement)> {
        s.iter().take(n).cloned().collect()
    }

    #[test]
    fn replay_is_byte_deterministic() {
        let statements = parse_script(SCENARIO).expect("script");
        let t1 = run_script(&mut runtime(), &statements);
        let t2 = run_script(&mut runtime(), &statements);
        assert_eq!(t1.text, t2.text);
    }

    #[test]
    fn idempotent_premise_update() {
        let mut rt = runtime();
        let statements =
            parse_script("update obj(mapped(swamp_1))\nupdate obj(mapped(swamp_1))\n")
                .expect("script");
        let t = run_script(&mut rt, &statements);
        // Second update fires nothing new.
        assert!(t.text.contains("ok (fired 0"), "transcript:\n{}", t.text);
    }

    #[test]
    fn ill_sorted_update_is_rejected() {
        let mut rt = runtime();
        let statements = parse_script("update obj(mapped(doris))\n").expect("script");
        let t = run_script(&mut rt, &statements);
        assert_eq!(t.errors, 1);
        assert!(t.text.contains("error: ill-sorted"));
    }

    #[test]
    fn failing_expectation_is_recorded_and_execution_continues() {
        let mut rt = runtime();
        let statements = parse_script(
            "expect obj(mapped(swamp_1)) holds\nupdate obj(mapped(swamp_1))\nexpect obj(mapped(swamp_1)) holds\n",
        )
        .expect("script");
        let t = run_script(&mut rt, &statements);
        assert_eq!(t.expect_failures, 1);
        assert!(!t.passed());
        assert!(t.text.contains("FAIL: expected obj(mapped(swamp_1)) holds, got out"));
        assert!(t.text.contains("PASS: obj(mapped(swamp_1)) holds {}"));
    }

    #[test]
    fn empty_script_empty_transcript() {
        let mut rt = runtime();
        let t = run_script(&mut rt, &[]);
        assert!(t.text.is_empty());
        assert!(t.passed());
    }
}
