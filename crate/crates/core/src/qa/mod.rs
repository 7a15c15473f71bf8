//! Question answering.
//!
//! [`answer`] works in stages and stops at the first that decides:
//!
//! 1. lookup in the KB as given;
//! 2. singleton promotion and syllogistic closure, then lookup again;
//! 3. defeasible rules, head-noun and membership abduction, promotion and
//!    closure again, then a decision in the plausible view.
//!
//! Stages 1 and 2 give `Proven` answers. Stage 3 never gives a definite
//! verdict: it reports `unknown (plausible)` together with the suggested
//! answer and the evidence trace.
//!
//! All derivation happens on a private copy of the KB.

pub mod repl;
mod session;

use std::collections::BTreeSet;
use std::fmt;

pub use session::{Accepted, PersistError, Session, SessionError};

use crate::abduction::{abduce_head_nouns, abduce_membership, apply_rules, record, Claim, Hypothesis};
use crate::kb::{EntityId, Item, ItemId, Kb, KbError, Provenance, ProvenanceKind, View};
use crate::lang::{QuestionAst, StatementAst};
use crate::logic3::Value3;
use crate::syllogistics::{closure, evaluate_proposition, Basis, CategoricalProposition, Evaluation, Form};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Proven,
    Plausible,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub operation: String,
    pub inputs: Vec<String>,
    pub output: String,
    pub provenance: ProvenanceKind,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inputs.is_empty() {
            write!(f, "{}: {} [{}]", self.operation, self.output, self.provenance)
        } else {
            write!(f, "{}: {} => {} [{}]", self.operation, self.inputs.join(" + "), self.output, self.provenance)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub verdict: Value3,
    pub modality: Modality,
    /// The answer the evidence points to, for plausible answers.
    pub suggestion: Option<Value3>,
    pub trace: Vec<TraceStep>,
}

impl Answer {
    pub fn unknown() -> Self {
        Answer { verdict: Value3::Unknown, modality: Modality::None, suggestion: None, trace: Vec::new() }
    }

    /// `yes (proven)`, `unknown (plausible)`, or a bare `unknown`.
    pub fn headline(&self) -> String {
        match self.modality {
            Modality::Proven => format!("{} (proven)", self.verdict),
            Modality::Plausible => format!("{} (plausible)", self.verdict),
            Modality::None => self.verdict.to_string(),
        }
    }

    /// Headline, suggestion line if any, then numbered trace steps when
    /// `with_trace` is set.
    pub fn render(&self, with_trace: bool) -> String {
        let mut out = self.headline();
        if let Some(s) = self.suggestion {
            out.push_str(&format!("\nsuggested: {s}"));
        }
        if with_trace {
            for (i, step) in self.trace.iter().enumerate() {
                out.push_str(&format!("\n  {}. {step}", i + 1));
            }
        }
        out
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.headline())
    }
}

/// Per-question settings. Fixed for the duration of a question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    pub existential_import: bool,
    pub seed: u64,
    pub trace: bool,
}

fn singleton_label(label: &str) -> String {
    format!("{{{label}}}")
}

fn is_singleton(label: &str) -> bool {
    label.starts_with('{')
}

/// For every informative membership `x ∈ S`, adds the singleton `{x}` with
/// `x ∈ {x}` and `All {x} are S` (or `No {x} are S` when `x ∉ S`).
/// Promotions of abduced memberships are themselves abduced and `Unknown`.
pub fn promote_singletons(kb: &mut Kb) -> Result<usize, KbError> {
    let mut todo: Vec<(EntityId, EntityId, ItemId, Value3, ProvenanceKind)> = kb
        .memberships()
        .filter(|m| !is_singleton(kb.label(m.element)) && !is_singleton(kb.label(m.set)))
        .filter(|m| m.value.is_definite() || m.provenance.kind == ProvenanceKind::Abduced)
        .map(|m| (m.element, m.set, m.id, m.value, m.provenance.kind))
        .collect();
    // strong evidence first, so x ∈ {x} is never left weaker than it could be
    todo.sort_by_key(|&(_, _, id, v, k)| (k == ProvenanceKind::Abduced || !v.is_definite(), id));
    let mut added = 0;
    for (x, set, mid, value, kind) in todo {
        if x == set {
            continue;
        }
        let single = kb.upsert_entity(&singleton_label(kb.label(x)))?;
        let form = if value == Value3::False { Form::E } else { Form::A };
        let prop = CategoricalProposition::new(form, single, set);
        let weak = kind == ProvenanceKind::Abduced || !value.is_definite();
        let (v, prov) = if weak {
            (Value3::Unknown, Provenance::abduced(crate::kb::Method::Singleton, vec![mid]))
        } else {
            (Value3::True, Provenance::deduced(crate::kb::Method::Singleton, vec![mid]))
        };
        if kb.membership(x, single).is_none_or(|m| m.provenance.kind < prov.kind) {
            kb.assert_membership(x, single, v, prov.clone())?;
        }
        if kb.proposition(&prop).is_none_or(|r| r.provenance.kind < prov.kind) {
            kb.assert_proposition(prop, v, prov)?;
            added += 1;
        }
    }
    Ok(added)
}

pub fn render_item(kb: &Kb, item: Item<'_>) -> String {
    match item {
        Item::Membership(m) => {
            let text = StatementAst::Membership {
                proper: kb.label(m.element).to_string(),
                set: kb.label(m.set).to_string(),
            }
            .to_string();
            if m.value == Value3::False {
                text.replacen(" is ", " is not ", 1)
            } else {
                text
            }
        }
        Item::Edge(e) => StatementAst::Spo {
            subject: kb.label(e.from).to_string(),
            verb: e.name.clone(),
            object: kb.label(e.to).to_string(),
        }
        .to_string(),
        Item::Proposition(p) => render_proposition(kb, &p.proposition),
        Item::Rule(r) => StatementAst::Rule(r.rule.clone()).to_string(),
    }
}

pub fn render_proposition(kb: &Kb, p: &CategoricalProposition) -> String {
    StatementAst::Categorical {
        form: p.form,
        subject: kb.label(p.subject).to_string(),
        predicate: kb.label(p.predicate).to_string(),
    }
    .to_string()
}

pub fn render_claim(kb: &Kb, claim: &Claim) -> String {
    match claim {
        Claim::Membership { element, set } => StatementAst::Membership {
            proper: kb.label(*element).to_string(),
            set: kb.label(*set).to_string(),
        }
        .to_string(),
        Claim::Categorical(p) => render_proposition(kb, p),
        Claim::NewSet { label, members } => {
            let names: Vec<&str> = members.iter().map(|m| kb.label(*m)).collect();
            format!("New set {label}: {}.", names.join(", "))
        }
    }
}

fn render_id(kb: &Kb, id: ItemId) -> String {
    kb.item(id).map_or_else(|| id.to_string(), |i| render_item(kb, i))
}

/// Deduced when every item rests on definite, non-abduced ground;
/// abduced otherwise.
fn derived_kind(kb: &Kb, ids: &[ItemId]) -> ProvenanceKind {
    let weak = ids.iter().filter_map(|&id| kb.item(id)).any(|i| {
        i.provenance().kind == ProvenanceKind::Abduced || !i.value().is_definite()
    });
    if weak {
        ProvenanceKind::Abduced
    } else {
        ProvenanceKind::Deduced
    }
}

struct Decision {
    value: Value3,
    support: Vec<ItemId>,
    steps: Vec<TraceStep>,
}

fn synth(kb: &Kb, operation: &str, inputs: Vec<String>, output: String, basis: &[ItemId]) -> TraceStep {
    TraceStep { operation: operation.to_string(), inputs, output, provenance: derived_kind(kb, basis) }
}

fn from_evaluation(kb: &Kb, p: &CategoricalProposition, e: Evaluation) -> Option<Decision> {
    if !e.value.is_definite() {
        return None;
    }
    let inputs: Vec<String> = e.support.iter().map(|&id| render_id(kb, id)).collect();
    let step = |op: &str, out: &CategoricalProposition| {
        synth(kb, op, inputs.clone(), render_proposition(kb, out), &e.support)
    };
    let steps = match e.basis {
        Basis::Stored => Vec::new(),
        Basis::Converse => vec![step("conversion", p)],
        Basis::Witness(_) => vec![step("witness", p)],
        Basis::Counterexample(_) => vec![step("counterexample", &p.contradictory())],
        Basis::Contradictory => vec![step("contradiction", &p.contradictory())],
        Basis::Open => return None,
    };
    Some(Decision { value: e.value, support: e.support, steps })
}

fn decide_is_a(kb: &Kb, proper: &str, set: &str, view: View) -> Option<Decision> {
    let (x, s) = (kb.find(proper)?, kb.find(set)?);
    if let Some(m) = kb.membership(x, s) {
        if view.admits(m.value, m.provenance.kind) || m.value == Value3::False {
            let value = if m.value == Value3::False { Value3::False } else { Value3::True };
            return Some(Decision { value, support: vec![m.id], steps: Vec::new() });
        }
    }
    let single = kb.find(&singleton_label(proper))?;
    let all = CategoricalProposition::new(Form::A, single, s);
    if let Some(d) = from_evaluation(kb, &all, evaluate_proposition(kb, &all, view)) {
        return Some(d);
    }
    let none = CategoricalProposition::new(Form::E, single, s);
    let mut d = from_evaluation(kb, &none, evaluate_proposition(kb, &none, view))?;
    d.value = !d.value;
    Some(d)
}

fn decide_categorical(kb: &Kb, form: Form, subject: &str, predicate: &str, view: View) -> Option<Decision> {
    let p = CategoricalProposition::new(form, kb.find(subject)?, kb.find(predicate)?);
    if p.subject == p.predicate {
        return None;
    }
    from_evaluation(kb, &p, evaluate_proposition(kb, &p, view))
}

/// `Did X V O?` holds when some `Y V O` holds with `Y` equal to `X`, an
/// element of `X`, overlapping `X`, or included in `X`. Inclusion is read
/// as overlap by conversion; `Y` acted, so it is not empty. Only a stored
/// `X V O` edge can make the answer `no`.
fn decide_did(kb: &Kb, subject: &str, verb: &str, object: &str, view: View) -> Option<Decision> {
    let (x, o) = (kb.find(subject)?, kb.find(object)?);
    if let Some(e) = kb.edge(x, verb, o) {
        if view.admits(e.value, e.provenance.kind) {
            return Some(Decision { value: Value3::True, support: vec![e.id], steps: Vec::new() });
        }
        if e.value == Value3::False {
            return Some(Decision { value: Value3::False, support: vec![e.id], steps: Vec::new() });
        }
    }
    let claim = StatementAst::Spo { subject: subject.to_string(), verb: verb.to_string(), object: object.to_string() }
        .to_string();
    let candidates = kb
        .edges()
        .filter(|e| e.name == verb && e.to == o && e.from != x && view.admits(e.value, e.provenance.kind));
    for e in candidates {
        let y = e.from;
        let edge_text = render_item(kb, Item::Edge(e));
        if let Some(m) = kb.membership(y, x).filter(|m| view.admits(m.value, m.provenance.kind)) {
            let support = vec![e.id, m.id];
            let step = synth(kb, "instance", vec![render_item(kb, Item::Membership(m)), edge_text], claim, &support);
            return Some(Decision { value: Value3::True, support, steps: vec![step] });
        }
        let overlap = CategoricalProposition::new(Form::I, x, y);
        let overlap_text = render_proposition(kb, &overlap);
        if let Some(mut d) = from_evaluation(kb, &overlap, evaluate_proposition(kb, &overlap, view)) {
            if d.value == Value3::True {
                d.support.insert(0, e.id);
                let step = synth(kb, "instance", vec![overlap_text, edge_text], claim, &d.support);
                d.steps.push(step);
                return Some(d);
            }
        }
        let inclusion = CategoricalProposition::new(Form::A, y, x);
        if let Some(r) = kb.proposition(&inclusion).filter(|r| view.admits(r.value, r.provenance.kind)) {
            let support = vec![e.id, r.id];
            let steps = vec![
                synth(
                    kb,
                    "conversion",
                    vec![render_proposition(kb, &inclusion), edge_text.clone()],
                    overlap_text.clone(),
                    &support,
                ),
                synth(kb, "instance", vec![overlap_text, edge_text], claim, &support),
            ];
            return Some(Decision { value: Value3::True, support, steps });
        }
    }
    None
}

fn decide(kb: &Kb, q: &QuestionAst, view: View) -> Option<Decision> {
    match q {
        QuestionAst::IsA { proper, set } => decide_is_a(kb, proper, set, view),
        QuestionAst::AreAll { subject, predicate } => decide_categorical(kb, Form::A, subject, predicate, view),
        QuestionAst::AreAny { subject, predicate } => decide_categorical(kb, Form::I, subject, predicate, view),
        QuestionAst::DidSpo { subject, verb, object } => decide_did(kb, subject, verb, object, view),
    }
}

fn visit(kb: &Kb, id: ItemId, top: bool, seen: &mut BTreeSet<ItemId>, out: &mut Vec<TraceStep>) {
    let Some(item) = kb.item(id) else { return };
    let prov = item.provenance();
    if prov.kind == ProvenanceKind::Asserted {
        if top && seen.insert(id) {
            out.push(TraceStep {
                operation: "lookup".into(),
                inputs: Vec::new(),
                output: render_item(kb, item),
                provenance: ProvenanceKind::Asserted,
            });
        }
        return;
    }
    if !seen.insert(id) {
        return;
    }
    for &s in &prov.sources {
        visit(kb, s, false, seen, out);
    }
    out.push(TraceStep {
        operation: prov.method.to_string(),
        inputs: prov.sources.iter().map(|&s| render_id(kb, s)).collect(),
        output: render_item(kb, item),
        provenance: prov.kind,
    });
}

/// Derivation steps behind `d`, sources before conclusions.
fn trace(kb: &Kb, d: Decision) -> Vec<TraceStep> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &id in &d.support {
        visit(kb, id, true, &mut seen, &mut out);
    }
    out.extend(d.steps);
    out
}

fn question_entities(kb: &Kb, q: &QuestionAst) -> Vec<EntityId> {
    let labels: Vec<&str> = match q {
        QuestionAst::IsA { proper, set } => vec![proper, set],
        QuestionAst::AreAll { subject, predicate } | QuestionAst::AreAny { subject, predicate } => {
            vec![subject, predicate]
        }
        QuestionAst::DidSpo { subject, object, .. } => vec![subject, object],
    };
    labels.into_iter().filter_map(|l| kb.find(l)).collect()
}

fn record_all(kb: &mut Kb, hypotheses: &[Hypothesis]) {
    for h in hypotheses {
        // a hypothesis that would override firmer knowledge is dropped
        let _ = record(kb, h);
    }
}

fn proven(kb: &Kb, d: Decision) -> Answer {
    let value = d.value;
    Answer { verdict: value, modality: Modality::Proven, suggestion: None, trace: trace(kb, d) }
}

fn derive(kb: &mut Kb, import: bool) -> Result<(), KbError> {
    promote_singletons(kb)?;
    closure(kb, import)?;
    Ok(())
}

fn abduce(kb: &mut Kb, q: &QuestionAst, import: bool) -> Result<(), KbError> {
    let rules = kb.rule_ids();
    apply_rules(kb, &rules)?;
    let heads = abduce_head_nouns(kb);
    record_all(kb, &heads);
    for e in question_entities(kb, q) {
        let hs = abduce_membership(kb, e);
        record_all(kb, &hs);
    }
    derive(kb, import)
}

/// Answers `q` (already canonical) against `kb`. Also returns the copy of
/// the KB the last stage reasoned over.
pub fn answer_with_workspace(kb: &Kb, q: &QuestionAst, flags: &Flags) -> (Answer, Kb) {
    if let Some(d) = decide(kb, q, View::Strict).filter(|d| d.value.is_definite()) {
        return (proven(kb, d), kb.clone());
    }
    let mut work = kb.clone();
    if derive(&mut work, flags.existential_import).is_err() {
        return (Answer::unknown(), work);
    }
    if let Some(d) = decide(&work, q, View::Strict).filter(|d| d.value.is_definite()) {
        return (proven(&work, d), work);
    }
    if abduce(&mut work, q, flags.existential_import).is_err() {
        return (Answer::unknown(), work);
    }
    let Some(d) = decide(&work, q, View::Plausible).filter(|d| d.value.is_definite()) else {
        return (Answer::unknown(), work);
    };
    let suggestion = d.value;
    let mut steps = trace(&work, d);
    if !steps.iter().any(|s| s.provenance == ProvenanceKind::Abduced) {
        return (Answer::unknown(), work);
    }
    let last = steps.last().map(|s| s.output.clone()).unwrap_or_default();
    steps.push(TraceStep {
        operation: "suggest".into(),
        inputs: vec![last],
        output: suggestion.to_string(),
        provenance: ProvenanceKind::Abduced,
    });
    let answer =
        Answer { verdict: Value3::Unknown, modality: Modality::Plausible, suggestion: Some(suggestion), trace: steps };
    (answer, work)
}

pub fn answer(kb: &Kb, q: &QuestionAst, flags: &Flags) -> Answer {
    answer_with_workspace(kb, q, flags).0
}
