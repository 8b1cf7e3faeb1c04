//! Compiler and runtime for operational belief models.
//!
//! A domain is written down once, in a many-sorted modal logic with mutual
//! knowledge (`mk`), nested belief (`bel`), and prioritized defaults
//! (`def`/`mdef`). The compiler checks the restrictions that make the domain
//! cooperative, converts axioms to a prefixed clausal form, expands the
//! modalities into the three-level `obj`/`bel`/`rmb` scheme, strips time, and
//! splits the result into a quantified rule base plus ground directives for
//! an assumption-based truth maintenance system. The runtime feeds updates
//! through the same pipeline, chains rules against ATMS nodes to a fixpoint,
//! and answers queries by inspecting node labels.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion binary crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod atms;
pub mod cnf;
pub mod compiler;
pub mod engine;
pub mod logic;
pub mod parse;
pub mod uql;

pub use atms::{Atms, AssumptionKind, NodeId, ResolutionOutcome, TruthStatus};
pub use cnf::{to_modal_cnf, validate_nesting, ClauseLit, ModalClause, OuterWrap};
pub use compiler::{compile, expand_prefixes, strip_time, CompileError, CompiledModel, Directive, Rule};
pub use engine::{Engine, RunStats};
pub use logic::{
    unify_literals, Atom, Formula, Ident, Literal, Prefix, Sign, Signature, SortForest,
    SpaceOrder, Subst, Term,
};
pub use parse::{parse_spec, check_restrictions, sort_check, ParseError, Spec, Violation, ViolationKind};
pub use uql::{answer_query, parse_script, run_script, ModelRuntime, QueryAnswer, UqlStatement};
