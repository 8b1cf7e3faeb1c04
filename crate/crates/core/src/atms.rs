//! Assumption-based truth maintenance. Nodes carry ground prefixed
//! literals; labels are the minimal consistent sets of assumptions under
//! which a node holds, kept sound, consistent, complete and minimal under
//! incremental premise, assumption and justification additions.
//!
//! Two extensions drive belief revision. Default assumptions carry the
//! evidential space of the default that created them; when a node and its
//! complement are both in, the supporting spaces decide which side survives
//! and the loser's environments become nogoods. Timestamp assumptions mark
//! justifications of negative nested beliefs; every assumption also records
//! the ordinal of its creation, so a conflict in which timestamps take part
//! is settled by recency first.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{Literal, SpaceOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AssumptionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Premise,
    Assumed,
    Derived,
    Contradiction,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Premise => "premise",
            NodeKind::Assumed => "assumed",
            NodeKind::Derived => "derived",
            NodeKind::Contradiction => "contradiction",
        };
        write!(f, "{s}")
    }
}

/// Retractable support token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionKind {
    /// Created by a default schema; serial numbers count per space.
    Default { space: u32, serial: u32 },
    /// Attached to justifications of negative nested beliefs.
    Timestamp,
}

#[derive(Debug, Clone)]
pub struct Assumption {
    pub id: AssumptionId,
    pub kind: AssumptionKind,
    /// Global creation ordinal; strictly increasing over the run.
    pub ordinal: u64,
    pub node: NodeId,
}

impl Assumption {
    pub fn name(&self) -> String {
        match self.kind {
            AssumptionKind::Default { space, serial } => format!("def_{space}_{serial}"),
            AssumptionKind::Timestamp => format!("ts_{}", self.ordinal),
        }
    }
}

pub type Env = BTreeSet<AssumptionId>;
pub type Label = BTreeSet<Env>;

#[derive(Debug, Clone)]
pub struct Justification {
    pub antecedents: Vec<NodeId>,
    pub consequent: NodeId,
    pub origin: String,
}

#[derive(Debug, Clone)]
struct NodeData {
    content: Literal,
    kind: NodeKind,
    label: Label,
}

/// Truth status of a content, after opposite resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruthStatus {
    Holds(Label),
    Out,
    /// Support existed but was withdrawn by conflict resolution.
    Retracted,
}

/// Outcome of resolving one complementary pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolutionOutcome {
    /// No conflict: at most one side has support.
    NoConflict,
    PositiveWins,
    NegativeWins,
    /// Both sides justified in spaces not ordered with respect to each
    /// other; both stand, annotated with their spaces.
    Coexist { positive_spaces: BTreeSet<u32>, negative_spaces: BTreeSet<u32> },
    /// Both sides justified in the same space; this should never happen in
    /// a valid domain.
    Inconsistency,
}

/// Raised when a complementary pair is justified in the same space (or both
/// by premises); the current update halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InconsistencySignal {
    pub positive: Literal,
    pub negative: Literal,
    pub positive_label: String,
    pub negative_label: String,
}

impl fmt::Display for InconsistencySignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inconsistency: {} (label {}) against {} (label {})",
            self.positive, self.positive_label, self.negative, self.negative_label
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Atms {
    nodes: Vec<NodeData>,
    index: BTreeMap<Literal, NodeId>,
    justs: Vec<Justification>,
    by_antecedent: BTreeMap<NodeId, Vec<usize>>,
    assumptions: Vec<Assumption>,
    nogoods: BTreeSet<Env>,
    space_order: SpaceOrder,
    ordinal: u64,
    serials: BTreeMap<u32, u32>,
    retracted: BTreeSet<NodeId>,
    /// Space annotations from the unordered-spaces outcome, per node.
    coexist: BTreeMap<NodeId, (BTreeSet<u32>, BTreeSet<u32>)>,
}

impl Atms {
    pub fn new(space_order: SpaceOrder) -> Self {
        Atms { space_order, ..Default::default() }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn justification_count(&self) -> usize {
        self.justs.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn content(&self, n: NodeId) -> &Literal {
        &self.nodes[n.0 as usize].content
    }

    pub fn kind(&self, n: NodeId) -> NodeKind {
        self.nodes[n.0 as usize].kind
    }

    pub fn label(&self, n: NodeId) -> &Label {
        &self.nodes[n.0 as usize].label
    }

    pub fn lookup(&self, content: &Literal) -> Option<NodeId> {
        self.index.get(content).copied()
    }

    pub fn assumptions(&self) -> &[Assumption] {
        &self.assumptions
    }

    pub fn justifications(&self) -> &[Justification] {
        &self.justs
    }

    pub fn nogoods(&self) -> &BTreeSet<Env> {
        &self.nogoods
    }

    pub fn assumption(&self, a: AssumptionId) -> &Assumption {
        &self.assumptions[a.0 as usize]
    }

    pub fn is_unsupported(&self, n: NodeId) -> bool {
        self.nodes[n.0 as usize].label.is_empty()
    }

    /// Registers (or finds) the node for a content. New nodes start derived
    /// and unsupported.
    pub fn intern(&mut self, content: &Literal) -> NodeId {
        debug_assert!(content.is_ground(), "node contents are ground");
        if let Some(&id) = self.index.get(content) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeData {
            content: content.clone(),
            kind: NodeKind::Derived,
            label: Label::new(),
        });
        self.index.insert(content.clone(), id);
        id
    }

    /// Adds a premise: label becomes `{{}}`; an already assumed node is
    /// upgraded. Premises are never retracted.
    pub fn add_premise(&mut self, content: &Literal) -> NodeId {
        let id = self.intern(content);
        let node = &mut self.nodes[id.0 as usize];
        node.kind = NodeKind::Premise;
        let mut l = Label::new();
        l.insert(Env::new());
        if node.label != l {
            node.label = l;
            self.retracted.remove(&id);
            self.propagate_from(id);
        }
        id
    }

    /// Creates an assumption for a content. A default is idempotent per
    /// (space, content): asking again returns the existing assumption. A
    /// premise-supported content needs no assumption and none is created.
    pub fn add_assumption(
        &mut self,
        content: &Literal,
        kind: AssumptionKind,
    ) -> (NodeId, Option<AssumptionId>) {
        let id = self.intern(content);
        if self.nodes[id.0 as usize].label.contains(&Env::new()) {
            return (id, None);
        }
        if let AssumptionKind::Default { space, .. } = kind {
            let existing = self.assumptions.iter().find(|a| {
                a.node == id && matches!(a.kind, AssumptionKind::Default { space: s, .. } if s == space)
            });
            if let Some(a) = existing {
                return (id, Some(a.id));
            }
        }
        let aid = AssumptionId(self.assumptions.len() as u32);
        self.ordinal += 1;
        let kind = match kind {
            AssumptionKind::Default { space, .. } => {
                let serial = self.serials.entry(space).or_insert(0);
                *serial += 1;
                AssumptionKind::Default { space, serial: *serial }
            }
            AssumptionKind::Timestamp => AssumptionKind::Timestamp,
        };
        self.assumptions.push(Assumption { id: aid, kind, ordinal: self.ordinal, node: id });
        if self.nodes[id.0 as usize].kind == NodeKind::Derived {
            self.nodes[id.0 as usize].kind = NodeKind::Assumed;
        }
        let mut env = Env::new();
        env.insert(aid);
        if self.add_envs(id, alloc::vec![env]) {
            self.retracted.remove(&id);
            self.propagate_from(id);
        }
        (id, Some(aid))
    }

    /// Adds a justification and propagates labels to fixpoint. Identical
    /// (antecedents, consequent) pairs are recorded once.
    pub fn add_justification(
        &mut self,
        antecedents: Vec<NodeId>,
        consequent: NodeId,
        origin: &str,
    ) -> bool {
        let mut ants = antecedents;
        ants.sort();
        ants.dedup();
        if self
            .justs
            .iter()
            .any(|j| j.antecedents == ants && j.consequent == consequent)
        {
            return false;
        }
        let idx = self.justs.len();
        for a in &ants {
            self.by_antecedent.entry(*a).or_default().push(idx);
        }
        self.justs.push(Justification { antecedents: ants, consequent, origin: origin.to_owned() });
        if self.recompute(idx) {
            self.retracted.remove(&consequent);
            self.propagate_from(consequent);
        }
        true
    }

    fn is_inconsistent_env(&self, env: &Env) -> bool {
        self.nogoods.iter().any(|n| n.is_subset(env))
    }

    /// Inserts environments into a node's label, keeping it consistent and
    /// minimal. When the empty environment arrives, every other environment
    /// is redundant and removed.
    fn add_envs(&mut self, node: NodeId, envs: Vec<Env>) -> bool {
        let mut changed = false;
        for env in envs {
            if self.is_inconsistent_env(&env) {
                continue;
            }
            let label = &mut self.nodes[node.0 as usize].label;
            if label.iter().any(|e| e.is_subset(&env)) {
                continue;
            }
            label.retain(|e| !env.is_subset(e));
            label.insert(env);
            changed = true;
        }
        changed
    }

    /// Recomputes the environments a justification contributes to its
    /// consequent. Returns true when the consequent label changed.
    fn recompute(&mut self, j_idx: usize) -> bool {
        let j = self.justs[j_idx].clone();
        let mut envs: Vec<Env> = alloc::vec![Env::new()];
        for a in &j.antecedents {
            let alabel = &self.nodes[a.0 as usize].label;
            if alabel.is_empty() {
                return false;
            }
            let mut next = Vec::new();
            for e in &envs {
                for ae in alabel {
                    let mut u = e.clone();
                    u.extend(ae.iter().copied());
                    next.push(u);
                }
            }
            envs = next;
        }
        self.add_envs(j.consequent, envs)
    }

    fn propagate_from(&mut self, start: NodeId) {
        let mut work: Vec<NodeId> = alloc::vec![start];
        let mut guard = 0usize;
        while let Some(n) = work.pop() {
            guard += 1;
            // Labels only grow more general; the bound caps pathological
            // cyclic churn.
            if guard > 100_000 {
                break;
            }
            let indices = self.by_antecedent.get(&n).cloned().unwrap_or_default();
            for idx in indices {
                if self.recompute(idx) {
                    let c = self.justs[idx].consequent;
                    self.retracted.remove(&c);
                    work.push(c);
                }
            }
        }
    }

    /// Declares an environment contradictory and prunes it from every
    /// label. Nodes that lose all support this way are marked retracted.
    pub fn set_nogood(&mut self, env: Env) {
        if self.nogoods.iter().any(|n| n.is_subset(&env)) {
            return;
        }
        self.nogoods.retain(|n| !env.is_subset(n));
        self.nogoods.insert(env.clone());
        for i in 0..self.nodes.len() {
            let node = &mut self.nodes[i];
            let before = node.label.len();
            node.label.retain(|e| !env.is_subset(e));
            if before > 0 && node.label.is_empty() {
                self.retracted.insert(NodeId(i as u32));
            }
        }
    }

    /// Truth of a content, after resolution.
    pub fn holds(&self, content: &Literal) -> TruthStatus {
        match self.index.get(content) {
            None => TruthStatus::Out,
            Some(&id) => {
                let node = &self.nodes[id.0 as usize];
                if !node.label.is_empty() {
                    TruthStatus::Holds(node.label.clone())
                } else if self.retracted.contains(&id) {
                    TruthStatus::Retracted
                } else {
                    TruthStatus::Out
                }
            }
        }
    }

    /// Space annotations recorded for contents in the unordered-spaces
    /// outcome.
    pub fn coexistence(&self, content: &Literal) -> Option<&(BTreeSet<u32>, BTreeSet<u32>)> {
        self.index.get(content).and_then(|id| self.coexist.get(id))
    }

    fn env_max_ordinal(&self, env: &Env) -> u64 {
        env.iter().map(|a| self.assumptions[a.0 as usize].ordinal).max().unwrap_or(0)
    }

    fn env_has_timestamp(&self, env: &Env) -> bool {
        env.iter()
            .any(|a| matches!(self.assumptions[a.0 as usize].kind, AssumptionKind::Timestamp))
    }

    /// Weakest spaces an environment rests on: the maximal elements, under
    /// the stronger-than order, of its default assumptions' spaces. A
    /// conclusion is only as strong as the weakest default it needs.
    fn env_weakest_spaces(&self, env: &Env) -> BTreeSet<u32> {
        let spaces: BTreeSet<u32> = env
            .iter()
            .filter_map(|a| match self.assumptions[a.0 as usize].kind {
                AssumptionKind::Default { space, .. } => Some(space),
                AssumptionKind::Timestamp => None,
            })
            .collect();
        spaces
            .iter()
            .filter(|&&s| !spaces.iter().any(|&t| t != s && self.space_order.is_stronger(s, t)))
            .copied()
            .collect()
    }

    fn side_spaces(&self, label: &Label) -> BTreeSet<u32> {
        label.iter().flat_map(|e| self.env_weakest_spaces(e)).collect()
    }

    fn retract_label(&mut self, node: NodeId) {
        let envs: Vec<Env> = self.nodes[node.0 as usize].label.iter().cloned().collect();
        for e in envs {
            if e.is_empty() {
                continue;
            }
            self.set_nogood(e);
        }
        self.retracted.insert(node);
    }

    /// Resolves one complementary pair per the three evidential outcomes,
    /// with recency taking precedence whenever a timestamp assumption is
    /// involved on either side.
    pub fn resolve_opposites(
        &mut self,
        pos: NodeId,
        neg: NodeId,
    ) -> Result<ResolutionOutcome, InconsistencySignal> {
        debug_assert_eq!(
            self.nodes[pos.0 as usize].content.complement(),
            self.nodes[neg.0 as usize].content
        );
        let plabel = self.nodes[pos.0 as usize].label.clone();
        let nlabel = self.nodes[neg.0 as usize].label.clone();
        if plabel.is_empty() || nlabel.is_empty() {
            return Ok(ResolutionOutcome::NoConflict);
        }
        let p_premise = plabel.contains(&Env::new());
        let n_premise = nlabel.contains(&Env::new());
        if p_premise && n_premise {
            return Err(self.signal(pos, neg));
        }
        if p_premise {
            self.retract_label(neg);
            return Ok(ResolutionOutcome::PositiveWins);
        }
        if n_premise {
            self.retract_label(pos);
            return Ok(ResolutionOutcome::NegativeWins);
        }

        let ts_involved = plabel.iter().chain(nlabel.iter()).any(|e| self.env_has_timestamp(e));
        if ts_involved {
            let p_ord = plabel.iter().map(|e| self.env_max_ordinal(e)).max().unwrap_or(0);
            let n_ord = nlabel.iter().map(|e| self.env_max_ordinal(e)).max().unwrap_or(0);
            if p_ord > n_ord {
                self.retract_label(neg);
                return Ok(ResolutionOutcome::PositiveWins);
            }
            if n_ord > p_ord {
                self.retract_label(pos);
                return Ok(ResolutionOutcome::NegativeWins);
            }
            // Equal recency: fall through to the space comparison.
        }

        let beats = |winner: &Label, loser: &Label| -> bool {
            winner.iter().any(|we| {
                let ws = self.env_weakest_spaces(we);
                !ws.is_empty()
                    && loser.iter().all(|le| {
                        let ls = self.env_weakest_spaces(le);
                        !ls.is_empty()
                            && ls.iter().all(|lsp| ws.iter().any(|wsp| self.space_order.is_stronger(*wsp, *lsp)))
                    })
            })
        };
        if beats(&plabel, &nlabel) {
            self.retract_label(neg);
            return Ok(ResolutionOutcome::PositiveWins);
        }
        if beats(&nlabel, &plabel) {
            self.retract_label(pos);
            return Ok(ResolutionOutcome::NegativeWins);
        }
        let pspaces = self.side_spaces(&plabel);
        let nspaces = self.side_spaces(&nlabel);
        if pspaces.intersection(&nspaces).next().is_some() {
            return Err(self.signal(pos, neg));
        }
        self.coexist.insert(pos, (pspaces.clone(), nspaces.clone()));
        self.coexist.insert(neg, (nspaces.clone(), pspaces.clone()));
        Ok(ResolutionOutcome::Coexist { positive_spaces: pspaces, negative_spaces: nspaces })
    }

    /// Runs opposite resolution over every complementary pair, to fixpoint.
    /// Deterministic: pairs in node-id order, positive side first.
    pub fn resolve_all(&mut self) -> Result<Vec<(Literal, ResolutionOutcome)>, InconsistencySignal> {
        self.coexist.clear();
        let mut outcomes = Vec::new();
        loop {
            let mut changed = false;
            let pairs: Vec<(NodeId, NodeId)> = self
                .node_ids()
                .filter_map(|id| {
                    let c = self.content(id);
                    if c.sign != crate::logic::Sign::Pos {
                        return None;
                    }
                    self.lookup(&c.complement()).map(|neg| (id, neg))
                })
                .collect();
            for (pos, neg) in pairs {
                let outcome = self.resolve_opposites(pos, neg)?;
                match &outcome {
                    ResolutionOutcome::NoConflict => {}
                    ResolutionOutcome::Coexist { .. } => {
                        outcomes.push((self.content(pos).clone(), outcome.clone()));
                    }
                    _ => {
                        outcomes.push((self.content(pos).clone(), outcome.clone()));
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(outcomes);
            }
        }
    }

    fn signal(&self, pos: NodeId, neg: NodeId) -> InconsistencySignal {
        InconsistencySignal {
            positive: self.nodes[pos.0 as usize].content.clone(),
            negative: self.nodes[neg.0 as usize].content.clone(),
            positive_label: self.render_label(self.label(pos)),
            negative_label: self.render_label(self.label(neg)),
        }
    }

    pub fn render_env(&self, env: &Env) -> String {
        let names: Vec<String> = env.iter().map(|a| self.assumptions[a.0 as usize].name()).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn render_label(&self, label: &Label) -> String {
        let envs: Vec<String> = label.iter().map(|e| self.render_env(e)).collect();
        format!("{{{}}}", envs.join(", "))
    }

    /// Deterministic textual listing of the whole state: nodes, then
    /// justifications, then assumptions, then nogoods.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            s.push_str(&format!(
                "node n{} {} {} label {}\n",
                i,
                n.kind,
                n.content,
                self.render_label(&n.label)
            ));
        }
        for (i, j) in self.justs.iter().enumerate() {
            let ants: Vec<String> = j.antecedents.iter().map(|a| a.to_string()).collect();
            s.push_str(&format!(
                "just j{} {} [{}] -> {}\n",
                i,
                j.origin,
                ants.join(", "),
                j.consequent
            ));
        }
        for a in &self.assumptions {
            let detail = match a.kind {
                AssumptionKind::Default { space, serial } => {
                    format!("default space={space} serial={serial}")
                }
                AssumptionKind::Timestamp => "timestamp".to_owned(),
            };
            s.push_str(&format!("assumption {} {} ord={} node={}\n", a.name(), detail, a.ordinal, a.node));
        }
        for n in &self.nogoods {
            s.push_str(&format!("nogood {}\n", self.render_env(n)));
        }
        s
    }

    /// DOT export of the justification graph.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph belief_state {\n  rankdir=LR;\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = match n.kind {
                NodeKind::Premise => "box",
                NodeKind::Assumed => "diamond",
                _ => "ellipse",
            };
            let style = if n.label.is_empty() { ", style=dashed" } else { "" };
            s.push_str(&format!(
                "  n{} [label=\"{}\\n{}\", shape={shape}{style}];\n",
                i,
                n.content,
                self.render_label(&n.label)
            ));
        }
        for (i, j) in self.justs.iter().enumerate() {
            for a in &j.antecedents {
                s.push_str(&format!("  {} -> {} [label=\"j{i}\"];\n", a, j.consequent));
            }
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Atom, Prefix, Term};

    fn lit(prefix: Prefix, pred: &str, arg: &str) -> Literal {
        Literal::pos(prefix, Atom::new(pred, alloc::vec![Term::Const(arg.to_owned())]))
    }

    fn neg(l: &Literal) -> Literal {
        l.complement()
    }

    #[test]
    fn premise_has_empty_environment_label() {
        let mut atms = Atms::new(SpaceOrder::new());
        let p = lit(Prefix::Obj, "mapped", "swamp_1");
        let n = atms.add_premise(&p);
        assert_eq!(atms.label(n).len(), 1);
        assert!(atms.label(n).contains(&Env::new()));
        // Idempotent.
        let n2 = atms.add_premise(&p);
        assert_eq!(n, n2);
        assert_eq!(atms.node_count(), 1);
    }

    #[test]
    fn assumption_label_is_its_singleton_environment() {
        let mut atms = Atms::new(SpaceOrder::new());
        let b = lit(Prefix::Bel, "mapped", "palm_beach_1");
        let (n, a) = atms.add_assumption(&b, AssumptionKind::Default { space: 20, serial: 0 });
        let a = a.expect("assumption created");
        assert_eq!(atms.assumption(a).name(), "def_20_1");
        let mut env = Env::new();
        env.insert(a);
        assert!(atms.label(n).contains(&env));

        // Distinct contents get distinct serials.
        let r = lit(Prefix::Rmb, "mapped", "palm_beach_1");
        let (_, a2) = atms.add_assumption(&r, AssumptionKind::Default { space: 20, serial: 0 });
        assert_eq!(atms.assumption(a2.unwrap()).name(), "def_20_2");

        // Same (space, content) is idempotent.
        let (_, a3) = atms.add_assumption(&b, AssumptionKind::Default { space: 20, serial: 0 });
        assert_eq!(a3, Some(a));
    }

    #[test]
    fn justification_propagates_environments() {
        let mut atms = Atms::new(SpaceOrder::new());
        let p = lit(Prefix::Obj, "mapped", "swamp_1");
        let v = lit(Prefix::Obj, "vivid", "swamp_1");
        let np = atms.add_premise(&p);
        let nv = atms.intern(&v);
        atms.add_justification(alloc::vec![np], nv, "mpcv.1");
        assert!(atms.label(nv).contains(&Env::new()));
        assert_eq!(atms.holds(&v), TruthStatus::Holds(atms.label(nv).clone()));
    }

    #[test]
    fn empty_environment_prunes_redundant_assumptions() {
        let mut atms = Atms::new(SpaceOrder::new());
        let b = lit(Prefix::Bel, "vivid", "section_1");
        let (n, a) = atms.add_assumption(&b, AssumptionKind::Default { space: 20, serial: 0 });
        assert!(a.is_some());
        let m = lit(Prefix::Bel, "mapped", "section_1");
        let nm = atms.add_premise(&m);
        atms.add_justification(alloc::vec![nm], n, "mpcv.2");
        // The premise-backed environment subsumes the assumption.
        assert_eq!(atms.label(n).len(), 1);
        assert!(atms.label(n).contains(&Env::new()));
    }

    #[test]
    fn supersets_are_pruned_from_labels() {
        let mut atms = Atms::new(SpaceOrder::new());
        let a = lit(Prefix::Bel, "p", "x");
        let b = lit(Prefix::Bel, "q", "x");
        let c = lit(Prefix::Bel, "r", "x");
        let (na, _) = atms.add_assumption(&a, AssumptionKind::Default { space: 5, serial: 0 });
        let (nb, _) = atms.add_assumption(&b, AssumptionKind::Default { space: 5, serial: 0 });
        let nc = atms.intern(&c);
        atms.add_justification(alloc::vec![na, nb], nc, "both");
        assert_eq!(atms.label(nc).len(), 1);
        assert_eq!(atms.label(nc).iter().next().unwrap().len(), 2);
        // A shorter path arrives: the superset environment goes away.
        atms.add_justification(alloc::vec![na], nc, "short");
        assert_eq!(atms.label(nc).len(), 1);
        assert_eq!(atms.label(nc).iter().next().unwrap().len(), 1);
    }

    #[test]
    fn unsupported_antecedent_contributes_nothing() {
        let mut atms = Atms::new(SpaceOrder::new());
        let a = lit(Prefix::Obj, "p", "x");
        let b = lit(Prefix::Obj, "q", "x");
        let na = atms.intern(&a);
        let nb = atms.intern(&b);
        atms.add_justification(alloc::vec![na], nb, "r");
        assert!(atms.label(nb).is_empty());
        assert_eq!(atms.holds(&b), TruthStatus::Out);
    }

    #[test]
    fn nogood_retracts_dependents() {
        let mut atms = Atms::new(SpaceOrder::new());
        let a = lit(Prefix::Rmb, "mapped", "pb");
        let v = lit(Prefix::Rmb, "vivid", "pb");
        let (na, aid) = atms.add_assumption(&a, AssumptionKind::Default { space: 20, serial: 0 });
        let nv = atms.intern(&v);
        atms.add_justification(alloc::vec![na], nv, "mpcv.3");
        let mut env = Env::new();
        env.insert(aid.unwrap());
        atms.set_nogood(env);
        assert_eq!(atms.holds(&a), TruthStatus::Retracted);
        assert_eq!(atms.holds(&v), TruthStatus::Retracted);
    }

    #[test]
    fn timestamp_beats_older_default_and_newer_default_beats_timestamp() {
        let mut order = SpaceOrder::new();
        order.declare(20);
        let mut atms = Atms::new(order);
        let p = lit(Prefix::Rmb, "vivid", "s1");
        let (np, _) = atms.add_assumption(&p, AssumptionKind::Default { space: 20, serial: 0 });
        let (nn, _) = atms.add_assumption(&neg(&p), AssumptionKind::Timestamp);
        // Timestamp (ordinal 2) is newer than the default (ordinal 1).
        let out = atms.resolve_opposites(np, nn).expect("no signal");
        assert_eq!(out, ResolutionOutcome::NegativeWins);
        assert_eq!(atms.holds(&p), TruthStatus::Retracted);

        // New evidence arrives along another route: a default on fresh
        // content, created after the timestamp, justifying p again.
        let q = lit(Prefix::Rmb, "mapped", "sw1");
        let (nq, _) = atms.add_assumption(&q, AssumptionKind::Default { space: 20, serial: 0 });
        atms.add_justification(alloc::vec![nq], np, "redescription");
        let out = atms.resolve_opposites(np, nn).expect("no signal");
        assert_eq!(out, ResolutionOutcome::PositiveWins);
        match atms.holds(&p) {
            TruthStatus::Holds(_) => {}
            other => panic!("expected holds, got {other:?}"),
        }
        assert_eq!(atms.holds(&neg(&p)), TruthStatus::Retracted);
    }

    #[test]
    fn stronger_space_wins_and_retracts_the_weaker() {
        let mut order = SpaceOrder::new();
        order.add_stronger(5, 20).unwrap();
        let mut atms = Atms::new(order);
        let p = lit(Prefix::Obj, "flies", "wilbur");
        let (np, _) = atms.add_assumption(&p, AssumptionKind::Default { space: 5, serial: 0 });
        let (nn, _) = atms.add_assumption(&neg(&p), AssumptionKind::Default { space: 20, serial: 0 });
        let out = atms.resolve_opposites(np, nn).expect("no signal");
        assert_eq!(out, ResolutionOutcome::PositiveWins);
        assert_eq!(atms.holds(&neg(&p)), TruthStatus::Retracted);
        match atms.holds(&p) {
            TruthStatus::Holds(_) => {}
            other => panic!("expected holds, got {other:?}"),
        }
    }

    #[test]
    fn unordered_spaces_coexist_with_annotations() {
        let mut order = SpaceOrder::new();
        order.declare(5);
        order.declare(6);
        let mut atms = Atms::new(order);
        let p = lit(Prefix::Obj, "p", "x");
        let (np, _) = atms.add_assumption(&p, AssumptionKind::Default { space: 5, serial: 0 });
        let (nn, _) = atms.add_assumption(&neg(&p), AssumptionKind::Default { space: 6, serial: 0 });
        let out = atms.resolve_opposites(np, nn).expect("no signal");
        match out {
            ResolutionOutcome::Coexist { positive_spaces, negative_spaces } => {
                assert!(positive_spaces.contains(&5));
                assert!(negative_spaces.contains(&6));
            }
            other => panic!("expected coexist, got {other:?}"),
        }
        // No retraction on either side.
        assert!(matches!(atms.holds(&p), TruthStatus::Holds(_)));
        assert!(matches!(atms.holds(&neg(&p)), TruthStatus::Holds(_)));
        assert!(atms.coexistence(&p).is_some());
    }

    #[test]
    fn same_space_conflict_signals_inconsistency() {
        let mut order = SpaceOrder::new();
        order.declare(20);
        let mut atms = Atms::new(order);
        let p = lit(Prefix::Obj, "p", "x");
        let (np, _) = atms.add_assumption(&p, AssumptionKind::Default { space: 20, serial: 0 });
        let (nn, _) = atms.add_assumption(&neg(&p), AssumptionKind::Default { space: 20, serial: 0 });
        assert!(atms.resolve_opposites(np, nn).is_err());
    }

    #[test]
    fn premise_conflict_signals_inconsistency() {
        let mut atms = Atms::new(SpaceOrder::new());
        let p = lit(Prefix::Obj, "p", "x");
        atms.add_premise(&p);
        atms.add_premise(&neg(&p));
        assert!(atms.resolve_all().is_err());
    }
}
