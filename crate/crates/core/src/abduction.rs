//! Hypothesis generation.
//!
//! Everything produced here is a conjecture: hypotheses carry `Unknown`,
//! and whatever gets written into the KB is written as `Unknown` with
//! abduced provenance. Plausibility travels in the provenance and the
//! score, not in the truth value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kb::{EntityId, ItemId, Kb, KbError, Method, Provenance, ProvenanceKind, View};
use crate::logic3::Value3;
use crate::syllogistics::{CategoricalProposition, Form};

/// Template variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "X",
            Var::Y => "Y",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpoTemplate {
    pub subject: Var,
    pub verb: String,
    pub object: Var,
}

impl SpoTemplate {
    pub fn new(subject: Var, verb: &str, object: Var) -> Self {
        SpoTemplate { subject, verb: crate::kb::canonical_label(verb), object }
    }

    fn vars(&self) -> BTreeSet<Var> {
        BTreeSet::from([self.subject, self.object])
    }
}

impl fmt::Display for SpoTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.verb, self.object)
    }
}

/// `premise ⇒ conclusion` over relation edges. Always defeasible: its
/// conclusions are written as `Unknown`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefeasibleRule {
    pub premise: SpoTemplate,
    pub conclusion: SpoTemplate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbductionError {
    #[error("conclusion variable {0} does not occur in the premise")]
    UnboundVariable(Var),
    #[error("generalization needs at least two elements, got {0}")]
    TooFewElements(usize),
    #[error(transparent)]
    Kb(#[from] KbError),
}

impl DefeasibleRule {
    pub fn new(premise: SpoTemplate, conclusion: SpoTemplate) -> Result<Self, AbductionError> {
        let bound = premise.vars();
        if let Some(&v) = conclusion.vars().iter().find(|v| !bound.contains(v)) {
            return Err(AbductionError::UnboundVariable(v));
        }
        Ok(DefeasibleRule { premise, conclusion })
    }

    pub fn defeasible(&self) -> bool {
        true
    }

    /// Matches an edge `from -verb-> to` against the premise and returns the
    /// conclusion's (subject, object).
    pub fn fire(&self, from: EntityId, verb: &str, to: EntityId) -> Option<(EntityId, EntityId)> {
        if verb != self.premise.verb {
            return None;
        }
        if self.premise.subject == self.premise.object && from != to {
            return None;
        }
        let lookup = |v: Var| if v == self.premise.subject { from } else { to };
        Some((lookup(self.conclusion.subject), lookup(self.conclusion.object)))
    }
}

impl fmt::Display for DefeasibleRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.premise, self.conclusion)
    }
}

/// A property an entity can hold: an outgoing `True` edge (by relation
/// name and object) or a `True` membership.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Edge { name: String, object: EntityId },
    Member(EntityId),
}

/// `True` properties of `x`, each with the id of the item that states it.
pub fn properties_of(kb: &Kb, x: EntityId) -> BTreeMap<Property, ItemId> {
    let mut out = BTreeMap::new();
    for e in kb.edges_from(x).filter(|e| e.value == Value3::True) {
        out.insert(Property::Edge { name: e.name.clone(), object: e.to }, e.id);
    }
    for m in kb.sets_of(x).filter(|m| m.value == Value3::True) {
        out.insert(Property::Member(m.set), m.id);
    }
    out
}

fn property_sort_key(kb: &Kb, p: &Property) -> (u8, String, String) {
    match p {
        Property::Edge { name, object } => (0, name.clone(), kb.label(*object).to_string()),
        Property::Member(set) => (1, String::new(), kb.label(*set).to_string()),
    }
}

fn property_slug(kb: &Kb, p: &Property) -> String {
    let text = match p {
        Property::Edge { name, object } => format!("{name} {}", kb.label(*object)),
        Property::Member(set) => format!("in {}", kb.label(*set)),
    };
    text.split_whitespace().collect::<Vec<_>>().join("-")
}

/// What a hypothesis conjectures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    Membership { element: EntityId, set: EntityId },
    Categorical(CategoricalProposition),
    /// A new set, to be labelled `label`, containing `members`.
    NewSet { label: String, members: Vec<EntityId> },
}

/// Ordered lexicographically: shared properties first, then members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score {
    pub shared_properties: usize,
    pub supporting_members: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub claim: Claim,
    pub evidence: Vec<ItemId>,
    pub score: Score,
    pub method: Method,
}

impl Hypothesis {
    /// A hypothesis says "may be", never "must be".
    pub fn value(&self) -> Value3 {
        Value3::Unknown
    }
}

/// Conjectures `x ∈ S` for every set S whose known members all share a
/// property that `x` also has.
///
/// Candidate sets have at least one known (`True`) member and no definite
/// membership of `x` yet. Sorted by score descending, ties by set label.
pub fn abduce_membership(kb: &Kb, x: EntityId) -> Vec<Hypothesis> {
    let own = properties_of(kb, x);
    if own.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for set in kb.entities().iter().map(|e| e.id) {
        if kb.exists(x, set).is_definite() {
            continue;
        }
        let members: Vec<(EntityId, ItemId)> = kb
            .members_of(set)
            .filter(|m| m.value == Value3::True)
            .map(|m| (m.element, m.id))
            .collect();
        let Some(((first, _), rest)) = members.split_first() else { continue };
        let mut common: BTreeSet<Property> = properties_of(kb, *first).into_keys().collect();
        for (m, _) in rest {
            let theirs = properties_of(kb, *m);
            common.retain(|p| theirs.contains_key(p));
            if common.is_empty() {
                break;
            }
        }
        let shared: Vec<&Property> = common.iter().filter(|p| own.contains_key(p)).collect();
        if shared.is_empty() {
            continue;
        }
        let mut evidence: Vec<ItemId> = shared.iter().map(|p| own[*p]).collect();
        evidence.extend(members.iter().map(|(_, id)| *id));
        evidence.sort();
        evidence.dedup();
        out.push(Hypothesis {
            claim: Claim::Membership { element: x, set },
            evidence,
            score: Score { shared_properties: shared.len(), supporting_members: members.len() },
            method: Method::CommonProperty,
        });
    }
    out.sort_by(|a, b| {
        b.score.cmp(&a.score).then_with(|| match (&a.claim, &b.claim) {
            (Claim::Membership { set: sa, .. }, Claim::Membership { set: sb, .. }) => {
                kb.label(*sa).cmp(kb.label(*sb))
            }
            _ => std::cmp::Ordering::Equal,
        })
    });
    out
}

/// Fires the given rules over every `True` or abduced edge until nothing
/// new appears. Each conclusion is written `Unknown` with abduced
/// provenance citing the rule and the matched edge, unless any edge for
/// that triple already exists. Returns the number of edges added.
pub fn apply_rules(kb: &mut Kb, rules: &[ItemId]) -> Result<usize, KbError> {
    let mut active = Vec::with_capacity(rules.len());
    for &id in rules {
        match kb.item(id) {
            Some(crate::kb::Item::Rule(r)) => active.push((id, r.rule.clone())),
            _ => return Err(KbError::UnknownItem(id)),
        }
    }
    let mut added = 0;
    loop {
        let mut fresh: BTreeMap<(EntityId, String, EntityId), Vec<ItemId>> = BTreeMap::new();
        for (rule_id, rule) in &active {
            for edge in kb.edges().filter(|e| View::Plausible.admits(e.value, e.provenance.kind)) {
                let Some((s, o)) = rule.fire(edge.from, &edge.name, edge.to) else { continue };
                let verb = rule.conclusion.verb.clone();
                if kb.edge(s, &verb, o).is_some() {
                    continue;
                }
                fresh.entry((s, verb, o)).or_insert_with(|| vec![*rule_id, edge.id]);
            }
        }
        if fresh.is_empty() {
            return Ok(added);
        }
        for ((s, verb, o), sources) in fresh {
            kb.assert_edge(s, &verb, o, Value3::Unknown, Provenance::abduced(Method::Rule, sources))?;
            added += 1;
        }
    }
}

/// Proposes a new set for elements that all share a property. The label
/// is derived from the first shared property in label order, e.g.
/// `lives-in-athens`.
pub fn generalize(kb: &Kb, elements: &[EntityId]) -> Result<Option<Hypothesis>, AbductionError> {
    if elements.len() < 2 {
        return Err(AbductionError::TooFewElements(elements.len()));
    }
    let held: Vec<BTreeMap<Property, ItemId>> = elements.iter().map(|&e| properties_of(kb, e)).collect();
    let mut common: Vec<&Property> =
        held[0].keys().filter(|p| held[1..].iter().all(|h| h.contains_key(*p))).collect();
    if common.is_empty() {
        return Ok(None);
    }
    common.sort_by_cached_key(|p| property_sort_key(kb, p));
    let label = property_slug(kb, common[0]);
    let mut evidence: Vec<ItemId> = held.iter().flat_map(|h| common.iter().map(move |p| h[*p])).collect();
    evidence.sort();
    evidence.dedup();
    Ok(Some(Hypothesis {
        claim: Claim::NewSet { label, members: elements.to_vec() },
        evidence,
        score: Score { shared_properties: common.len(), supporting_members: elements.len() },
        method: Method::Generalization,
    }))
}

fn first_item_mentioning(kb: &Kb, e: EntityId) -> Option<ItemId> {
    kb.items()
        .find(|item| match item {
            crate::kb::Item::Membership(m) => m.element == e || m.set == e,
            crate::kb::Item::Edge(ed) => ed.from == e || ed.to == e,
            crate::kb::Item::Proposition(p) => p.proposition.subject == e || p.proposition.predicate == e,
            crate::kb::Item::Rule(_) => false,
        })
        .map(|i| i.id())
}

/// For a multi-word term whose trailing words name another entity
/// ("american astronauts" / "astronauts"), conjectures that the modified
/// term is a subset of its head: `All american astronauts are astronauts`.
/// Only the longest matching head is used.
pub fn abduce_head_nouns(kb: &Kb) -> Vec<Hypothesis> {
    let mut out = Vec::new();
    for entity in kb.entities() {
        let words: Vec<&str> = entity.label.split(' ').collect();
        let head = (1..words.len()).find_map(|k| kb.find(&words[k..].join(" ")).map(|h| (h, words.len() - k)));
        let Some((head, head_words)) = head else { continue };
        let p = CategoricalProposition::new(Form::A, entity.id, head);
        if kb.proposition(&p).is_some() {
            continue;
        }
        let mut evidence: Vec<ItemId> =
            [first_item_mentioning(kb, entity.id), first_item_mentioning(kb, head)].into_iter().flatten().collect();
        evidence.dedup();
        if evidence.is_empty() {
            continue;
        }
        out.push(Hypothesis {
            claim: Claim::Categorical(p),
            evidence,
            score: Score { shared_properties: 1, supporting_members: head_words },
            method: Method::HeadNoun,
        });
    }
    out
}

/// Writes a hypothesis into the KB as `Unknown`, abduced. Returns the ids
/// written. Fails with a conflict if it would override a stronger item.
pub fn record(kb: &mut Kb, h: &Hypothesis) -> Result<Vec<ItemId>, KbError> {
    let provenance = Provenance { kind: ProvenanceKind::Abduced, sources: h.evidence.clone(), method: h.method };
    match &h.claim {
        Claim::Membership { element, set } => {
            Ok(vec![kb.assert_membership(*element, *set, Value3::Unknown, provenance)?])
        }
        Claim::Categorical(p) => Ok(vec![kb.assert_proposition(*p, Value3::Unknown, provenance)?]),
        Claim::NewSet { label, members } => {
            let set = kb.upsert_entity(label)?;
            members
                .iter()
                .map(|&m| kb.assert_membership(m, set, Value3::Unknown, provenance.clone()))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Value3::*;

    fn setup(labels: &[&str]) -> (Kb, Vec<EntityId>) {
        let mut kb = Kb::new();
        let ids = labels.iter().map(|l| kb.upsert_entity(l).unwrap()).collect();
        (kb, ids)
    }

    #[test]
    fn rule_variables_must_be_bound() {
        let premise = SpoTemplate::new(Var::X, "loves", Var::X);
        let conclusion = SpoTemplate::new(Var::X, "knows", Var::Y);
        assert_eq!(DefeasibleRule::new(premise, conclusion), Err(AbductionError::UnboundVariable(Var::Y)));
        let swap = DefeasibleRule::new(
            SpoTemplate::new(Var::X, "sees", Var::Y),
            SpoTemplate::new(Var::Y, "is seen by", Var::X),
        )
        .unwrap();
        let (a, b) = (EntityId::from_test(1), EntityId::from_test(2));
        assert_eq!(swap.fire(a, "sees", b), Some((b, a)));
        assert_eq!(swap.fire(a, "hears", b), None);
        assert_eq!(swap.to_string(), "X sees Y => Y is seen by X");
    }

    #[test]
    fn abduce_common_property() {
        let (mut kb, ids) = setup(&["alice", "bob", "people", "astronaut", "air", "rock"]);
        let [alice, bob, people, astronaut, air, rock] = ids[..] else { unreachable!() };
        for m in [alice, bob] {
            kb.assert_membership(m, people, True, Provenance::asserted()).unwrap();
            kb.assert_edge(m, "breathes", air, True, Provenance::asserted()).unwrap();
        }
        kb.assert_edge(astronaut, "breathes", air, True, Provenance::asserted()).unwrap();
        let hs = abduce_membership(&kb, astronaut);
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].claim, Claim::Membership { element: astronaut, set: people });
        assert_eq!(hs[0].score, Score { shared_properties: 1, supporting_members: 2 });
        assert_eq!(hs[0].value(), Unknown);
        assert!(!hs[0].evidence.is_empty());
        assert!(abduce_membership(&kb, rock).is_empty());
        assert!(abduce_membership(&Kb::new(), Kb::new().root()).is_empty());
    }

    #[test]
    fn defeasible_rule_application() {
        let (mut kb, ids) = setup(&["astronauts", "moon"]);
        let [astronauts, moon] = ids[..] else { unreachable!() };
        let rule = kb
            .add_rule(
                DefeasibleRule::new(
                    SpoTemplate::new(Var::X, "flew to", Var::Y),
                    SpoTemplate::new(Var::X, "was at", Var::Y),
                )
                .unwrap(),
            )
            .unwrap();
        kb.assert_edge(astronauts, "flew to", moon, True, Provenance::asserted()).unwrap();
        assert_eq!(apply_rules(&mut kb, &[rule]).unwrap(), 1);
        let e = kb.edge(astronauts, "was at", moon).unwrap();
        assert_eq!(e.value, Unknown);
        assert_eq!(e.provenance.kind, ProvenanceKind::Abduced);
        assert_eq!(e.provenance.sources[0], rule);
        assert_eq!(apply_rules(&mut kb, &[rule]).unwrap(), 0);
    }

    #[test]
    fn false_premise_does_not_fire() {
        let (mut kb, ids) = setup(&["astronauts", "mars"]);
        let rule = kb
            .add_rule(
                DefeasibleRule::new(
                    SpoTemplate::new(Var::X, "flew to", Var::Y),
                    SpoTemplate::new(Var::X, "was at", Var::Y),
                )
                .unwrap(),
            )
            .unwrap();
        kb.assert_edge(ids[0], "flew to", ids[1], False, Provenance::asserted()).unwrap();
        assert_eq!(apply_rules(&mut kb, &[rule]).unwrap(), 0);
    }

    #[test]
    fn asserted_conclusion_is_not_overridden() {
        let (mut kb, ids) = setup(&["astronauts", "moon"]);
        let rule = kb
            .add_rule(
                DefeasibleRule::new(
                    SpoTemplate::new(Var::X, "flew to", Var::Y),
                    SpoTemplate::new(Var::X, "was at", Var::Y),
                )
                .unwrap(),
            )
            .unwrap();
        kb.assert_edge(ids[0], "flew to", ids[1], True, Provenance::asserted()).unwrap();
        kb.assert_edge(ids[0], "was at", ids[1], False, Provenance::asserted()).unwrap();
        assert_eq!(apply_rules(&mut kb, &[rule]).unwrap(), 0);
        assert_eq!(kb.edge(ids[0], "was at", ids[1]).unwrap().value, False);
    }

    #[test]
    fn generalize_shared_edge() {
        let (mut kb, ids) = setup(&["socrates", "plato", "athens", "sparta"]);
        let [socrates, plato, athens, sparta] = ids[..] else { unreachable!() };
        kb.assert_edge(socrates, "lives in", athens, True, Provenance::asserted()).unwrap();
        kb.assert_edge(plato, "lives in", athens, True, Provenance::asserted()).unwrap();
        let h = generalize(&kb, &[socrates, plato]).unwrap().unwrap();
        assert_eq!(h.claim, Claim::NewSet { label: "lives-in-athens".into(), members: vec![socrates, plato] });
        let written = record(&mut kb, &h).unwrap();
        assert_eq!(written.len(), 2);
        let set = kb.find("lives-in-athens").unwrap();
        assert_eq!(kb.exists(socrates, set), Unknown);
        assert_eq!(kb.membership(plato, set).unwrap().provenance.kind, ProvenanceKind::Abduced);

        kb.assert_edge(sparta, "lies in", athens, False, Provenance::asserted()).unwrap();
        assert_eq!(generalize(&kb, &[socrates, sparta]).unwrap(), None);
        assert_eq!(generalize(&kb, &[socrates]), Err(AbductionError::TooFewElements(1)));
    }

    #[test]
    fn abduction_never_overrides_assertions() {
        let (mut kb, ids) = setup(&["x", "s"]);
        kb.assert_membership(ids[0], ids[1], False, Provenance::asserted()).unwrap();
        let h = Hypothesis {
            claim: Claim::Membership { element: ids[0], set: ids[1] },
            evidence: vec![kb.membership(ids[0], ids[1]).unwrap().id],
            score: Score { shared_properties: 1, supporting_members: 1 },
            method: Method::CommonProperty,
        };
        assert!(matches!(record(&mut kb, &h), Err(KbError::Conflict { .. })));
        assert_eq!(kb.exists(ids[0], ids[1]), False);
    }

    #[test]
    fn head_noun_subset() {
        let (mut kb, ids) = setup(&["american astronauts", "astronauts", "moon", "person"]);
        let [american, astronauts, moon, person] = ids[..] else { unreachable!() };
        kb.assert_edge(american, "flew to", moon, True, Provenance::asserted()).unwrap();
        kb.assert_proposition(CategoricalProposition::new(Form::A, astronauts, person), True, Provenance::asserted())
            .unwrap();
        let hs = abduce_head_nouns(&kb);
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].claim, Claim::Categorical(CategoricalProposition::new(Form::A, american, astronauts)));
        record(&mut kb, &hs[0]).unwrap();
        assert!(abduce_head_nouns(&kb).is_empty());
    }
}
