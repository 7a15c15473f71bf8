//! The existence graph.
//!
//! Entities are plain labelled nodes; any entity may act both as an element
//! and as a set. Knowledge about them lives in four item kinds, each with a
//! stable [`ItemId`] and a [`Provenance`]:
//!
//! * membership assertions `element ∈ set`,
//! * directed relation edges `from -name-> to`,
//! * categorical propositions (see [`crate::syllogistics`]),
//! * defeasible rules (see [`crate::abduction`]).
//!
//! Absence of an assertion is `Unknown`, never `False`. Writes obey an
//! override table: asserted facts beat deductions, deductions beat
//! abductions, equal kinds replace each other. A lower-ranked write over a
//! higher-ranked item is rejected with [`KbError::Conflict`].
//!
//! A [`Kb`] is a plain value. Readers share snapshots behind an `Arc`;
//! the single writer mutates through `Arc::make_mut`, which leaves any
//! outstanding snapshot untouched.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::abduction::DefeasibleRule;
use crate::logic3::{and3, Value3};
use crate::syllogistics::{CategoricalProposition, Mood};

/// Label of the root entity whose existence is taken as given.
pub const ROOT_LABEL: &str = "universe";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[cfg(test)]
    pub(crate) fn from_test(n: u32) -> Self {
        EntityId(n)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Identifier of a membership, edge, proposition or rule. Never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(u64);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub label: String,
}

/// Lowercase, trim and collapse internal whitespace.
pub fn canonical_label(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// How an item came to be known. Ordered by override rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProvenanceKind {
    Abduced,
    Deduced,
    Asserted,
}

impl fmt::Display for ProvenanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProvenanceKind::Asserted => "asserted",
            ProvenanceKind::Deduced => "deduced",
            ProvenanceKind::Abduced => "abduced",
        })
    }
}

/// The inference step that produced a derived item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Assertion,
    Syllogism(Mood),
    /// An individual's membership promoted to a proposition over its singleton set.
    Singleton,
    Rule,
    CommonProperty,
    HeadNoun,
    Generalization,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Assertion => f.write_str("assertion"),
            Method::Syllogism(mood) => write!(f, "syllogism {mood}"),
            Method::Singleton => f.write_str("singleton"),
            Method::Rule => f.write_str("rule"),
            Method::CommonProperty => f.write_str("common-property"),
            Method::HeadNoun => f.write_str("head-noun"),
            Method::Generalization => f.write_str("generalize"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub kind: ProvenanceKind,
    pub sources: Vec<ItemId>,
    pub method: Method,
}

impl Provenance {
    pub fn asserted() -> Self {
        Provenance { kind: ProvenanceKind::Asserted, sources: Vec::new(), method: Method::Assertion }
    }

    pub fn deduced(method: Method, sources: Vec<ItemId>) -> Self {
        Provenance { kind: ProvenanceKind::Deduced, sources, method }
    }

    pub fn abduced(method: Method, sources: Vec<ItemId>) -> Self {
        Provenance { kind: ProvenanceKind::Abduced, sources, method }
    }
}

/// Ground facts are data; single rules and propositions are meanings; the
/// collection of all meanings is knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentationKind {
    Datum,
    Meaning,
    Knowledge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipAssertion {
    pub id: ItemId,
    pub element: EntityId,
    pub set: EntityId,
    pub value: Value3,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEdge {
    pub id: ItemId,
    pub name: String,
    /// The perceiver / actor.
    pub from: EntityId,
    /// The perceived / acted-on.
    pub to: EntityId,
    pub value: Value3,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropositionRecord {
    pub id: ItemId,
    pub proposition: CategoricalProposition,
    pub value: Value3,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleRecord {
    pub id: ItemId,
    pub rule: DefeasibleRule,
    pub provenance: Provenance,
}

/// Borrowed view of any stored item.
#[derive(Debug, Clone, Copy)]
pub enum Item<'a> {
    Membership(&'a MembershipAssertion),
    Edge(&'a RelationEdge),
    Proposition(&'a PropositionRecord),
    Rule(&'a RuleRecord),
}

impl<'a> Item<'a> {
    pub fn id(&self) -> ItemId {
        match self {
            Item::Membership(m) => m.id,
            Item::Edge(e) => e.id,
            Item::Proposition(p) => p.id,
            Item::Rule(r) => r.id,
        }
    }

    pub fn provenance(&self) -> &'a Provenance {
        match self {
            Item::Membership(m) => &m.provenance,
            Item::Edge(e) => &e.provenance,
            Item::Proposition(p) => &p.provenance,
            Item::Rule(r) => &r.provenance,
        }
    }

    /// Rules carry no truth value of their own; they report `True`.
    pub fn value(&self) -> Value3 {
        match self {
            Item::Membership(m) => m.value,
            Item::Edge(e) => e.value,
            Item::Proposition(p) => p.value,
            Item::Rule(_) => Value3::True,
        }
    }

    pub fn representation_kind(&self) -> RepresentationKind {
        match self {
            Item::Membership(_) | Item::Edge(_) => RepresentationKind::Datum,
            Item::Proposition(_) | Item::Rule(_) => RepresentationKind::Meaning,
        }
    }
}

/// Which stored values count as support when evaluating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    /// Only `True` values.
    Strict,
    /// `True` values, plus abduced items (which always carry `Unknown`).
    Plausible,
}

impl View {
    pub fn admits(self, value: Value3, kind: ProvenanceKind) -> bool {
        match self {
            View::Strict => value == Value3::True,
            View::Plausible => {
                value == Value3::True || (value == Value3::Unknown && kind == ProvenanceKind::Abduced)
            }
        }
    }
}

/// The named collection of all meanings held by a KB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeSet {
    pub meanings: Vec<ItemId>,
}

impl KnowledgeSet {
    pub fn representation_kind(&self) -> RepresentationKind {
        RepresentationKind::Knowledge
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("entity label is empty")]
    EmptyLabel,
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("unknown item {0}")]
    UnknownItem(ItemId),
    #[error("{attempted} write cannot override {existing} item {id}")]
    Conflict { id: ItemId, existing: ProvenanceKind, attempted: ProvenanceKind },
    #[error("invalid provenance: {0}")]
    InvalidProvenance(&'static str),
    #[error("provenance source {0} does not resolve")]
    UnknownSource(ItemId),
    #[error("proposition has the same subject and predicate")]
    TrivialProposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ItemKey {
    Membership(EntityId, EntityId),
    Edge(EntityId, u32, EntityId),
    Proposition(CategoricalProposition),
    Rule,
}

#[derive(Debug, Clone)]
pub struct Kb {
    entities: Vec<Entity>,
    by_label: BTreeMap<String, EntityId>,
    memberships: BTreeMap<(EntityId, EntityId), MembershipAssertion>,
    members_index: BTreeSet<(EntityId, EntityId)>,
    relation_names: Vec<String>,
    edges: BTreeMap<(EntityId, u32, EntityId), RelationEdge>,
    propositions: BTreeMap<CategoricalProposition, PropositionRecord>,
    rules: BTreeMap<ItemId, RuleRecord>,
    items: BTreeMap<ItemId, ItemKey>,
    next_item: u64,
    revision: u64,
    root: EntityId,
}

impl Default for Kb {
    fn default() -> Self {
        Kb::new()
    }
}

impl Kb {
    pub fn new() -> Self {
        let root = EntityId(0);
        let mut by_label = BTreeMap::new();
        by_label.insert(ROOT_LABEL.to_string(), root);
        Kb {
            entities: vec![Entity { id: root, label: ROOT_LABEL.to_string() }],
            by_label,
            memberships: BTreeMap::new(),
            members_index: BTreeSet::new(),
            relation_names: Vec::new(),
            edges: BTreeMap::new(),
            propositions: BTreeMap::new(),
            rules: BTreeMap::new(),
            items: BTreeMap::new(),
            next_item: 1,
            revision: 0,
            root,
        }
    }

    /// The axiomatically existing root entity, labelled [`ROOT_LABEL`].
    pub fn root(&self) -> EntityId {
        self.root
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    // -- entities ----------------------------------------------------------

    pub fn upsert_entity(&mut self, label: &str) -> Result<EntityId, KbError> {
        let label = canonical_label(label);
        if label.is_empty() {
            return Err(KbError::EmptyLabel);
        }
        if let Some(&id) = self.by_label.get(&label) {
            return Ok(id);
        }
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(Entity { id, label: label.clone() });
        self.by_label.insert(label, id);
        self.revision += 1;
        Ok(id)
    }

    pub fn find(&self, label: &str) -> Option<EntityId> {
        self.by_label.get(&canonical_label(label)).copied()
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.get(id.index())
    }

    /// Label of an entity id; panics on ids from another KB.
    pub fn label(&self, id: EntityId) -> &str {
        &self.entities[id.index()].label
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    fn check_entity(&self, id: EntityId) -> Result<(), KbError> {
        if id.index() < self.entities.len() {
            Ok(())
        } else {
            Err(KbError::UnknownEntity(id))
        }
    }

    // -- writes ------------------------------------------------------------

    fn check_provenance(&self, provenance: &Provenance) -> Result<(), KbError> {
        match provenance.kind {
            ProvenanceKind::Asserted if !provenance.sources.is_empty() => {
                Err(KbError::InvalidProvenance("asserted items carry no sources"))
            }
            ProvenanceKind::Deduced | ProvenanceKind::Abduced if provenance.sources.is_empty() => {
                Err(KbError::InvalidProvenance("derived items need at least one source"))
            }
            _ => match provenance.sources.iter().find(|s| !self.items.contains_key(s)) {
                Some(&missing) => Err(KbError::UnknownSource(missing)),
                None => Ok(()),
            },
        }
    }

    fn fresh_id(&mut self) -> ItemId {
        let id = ItemId(self.next_item);
        self.next_item += 1;
        id
    }

    fn check_override(id: ItemId, existing: ProvenanceKind, attempted: ProvenanceKind) -> Result<(), KbError> {
        if attempted < existing {
            Err(KbError::Conflict { id, existing, attempted })
        } else {
            Ok(())
        }
    }

    pub fn assert_membership(
        &mut self,
        element: EntityId,
        set: EntityId,
        value: Value3,
        provenance: Provenance,
    ) -> Result<ItemId, KbError> {
        self.check_entity(element)?;
        self.check_entity(set)?;
        self.check_provenance(&provenance)?;
        if let Some(existing) = self.memberships.get_mut(&(element, set)) {
            Self::check_override(existing.id, existing.provenance.kind, provenance.kind)?;
            existing.value = value;
            existing.provenance = provenance;
            self.revision += 1;
            return Ok(existing.id);
        }
        let id = self.fresh_id();
        self.memberships
            .insert((element, set), MembershipAssertion { id, element, set, value, provenance });
        self.members_index.insert((set, element));
        self.items.insert(id, ItemKey::Membership(element, set));
        self.revision += 1;
        Ok(id)
    }

    fn relation_index(&mut self, name: &str) -> u32 {
        match self.relation_names.iter().position(|n| n == name) {
            Some(i) => i as u32,
            None => {
                self.relation_names.push(name.to_string());
                (self.relation_names.len() - 1) as u32
            }
        }
    }

    fn find_relation(&self, name: &str) -> Option<u32> {
        self.relation_names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn assert_edge(
        &mut self,
        from: EntityId,
        name: &str,
        to: EntityId,
        value: Value3,
        provenance: Provenance,
    ) -> Result<ItemId, KbError> {
        self.check_entity(from)?;
        self.check_entity(to)?;
        let name = canonical_label(name);
        if name.is_empty() {
            return Err(KbError::EmptyLabel);
        }
        self.check_provenance(&provenance)?;
        let rel = self.relation_index(&name);
        if let Some(existing) = self.edges.get_mut(&(from, rel, to)) {
            Self::check_override(existing.id, existing.provenance.kind, provenance.kind)?;
            existing.value = value;
            existing.provenance = provenance;
            self.revision += 1;
            return Ok(existing.id);
        }
        let id = self.fresh_id();
        self.edges.insert((from, rel, to), RelationEdge { id, name, from, to, value, provenance });
        self.items.insert(id, ItemKey::Edge(from, rel, to));
        self.revision += 1;
        Ok(id)
    }

    pub fn assert_proposition(
        &mut self,
        proposition: CategoricalProposition,
        value: Value3,
        provenance: Provenance,
    ) -> Result<ItemId, KbError> {
        self.check_entity(proposition.subject)?;
        self.check_entity(proposition.predicate)?;
        if proposition.subject == proposition.predicate {
            return Err(KbError::TrivialProposition);
        }
        self.check_provenance(&provenance)?;
        if let Some(existing) = self.propositions.get_mut(&proposition) {
            Self::check_override(existing.id, existing.provenance.kind, provenance.kind)?;
            existing.value = value;
            existing.provenance = provenance;
            self.revision += 1;
            return Ok(existing.id);
        }
        let id = self.fresh_id();
        self.propositions.insert(proposition, PropositionRecord { id, proposition, value, provenance });
        self.items.insert(id, ItemKey::Proposition(proposition));
        self.revision += 1;
        Ok(id)
    }

    /// Adds a rule; an identical rule already present is returned as is.
    pub fn add_rule(&mut self, rule: DefeasibleRule) -> Result<ItemId, KbError> {
        if let Some(existing) = self.rules.values().find(|r| r.rule == rule) {
            return Ok(existing.id);
        }
        let id = self.fresh_id();
        self.rules.insert(id, RuleRecord { id, rule, provenance: Provenance::asserted() });
        self.items.insert(id, ItemKey::Rule);
        self.revision += 1;
        Ok(id)
    }

    /// Removes an item and, transitively, every derived item that cites a
    /// removed item as a source. Returns the removed ids in removal order.
    pub fn retract(&mut self, id: ItemId) -> Result<Vec<ItemId>, KbError> {
        if !self.items.contains_key(&id) {
            return Err(KbError::UnknownItem(id));
        }
        let mut removed = vec![id];
        let mut gone: BTreeSet<ItemId> = BTreeSet::from([id]);
        self.remove_item(id);
        loop {
            let dependents: Vec<ItemId> = self
                .items()
                .filter(|item| item.provenance().sources.iter().any(|s| gone.contains(s)))
                .map(|item| item.id())
                .collect();
            if dependents.is_empty() {
                break;
            }
            for d in dependents {
                self.remove_item(d);
                gone.insert(d);
                removed.push(d);
            }
        }
        self.revision += 1;
        Ok(removed)
    }

    fn remove_item(&mut self, id: ItemId) {
        match self.items.remove(&id) {
            Some(ItemKey::Membership(e, s)) => {
                self.memberships.remove(&(e, s));
                self.members_index.remove(&(s, e));
            }
            Some(ItemKey::Edge(f, r, t)) => {
                self.edges.remove(&(f, r, t));
            }
            Some(ItemKey::Proposition(p)) => {
                self.propositions.remove(&p);
            }
            Some(ItemKey::Rule) => {
                self.rules.remove(&id);
            }
            None => {}
        }
    }

    // -- reads -------------------------------------------------------------

    pub fn item(&self, id: ItemId) -> Option<Item<'_>> {
        Some(match self.items.get(&id)? {
            ItemKey::Membership(e, s) => Item::Membership(&self.memberships[&(*e, *s)]),
            ItemKey::Edge(f, r, t) => Item::Edge(&self.edges[&(*f, *r, *t)]),
            ItemKey::Proposition(p) => Item::Proposition(&self.propositions[p]),
            ItemKey::Rule => Item::Rule(&self.rules[&id]),
        })
    }

    /// Every item in id order.
    pub fn items(&self) -> impl Iterator<Item = Item<'_>> + '_ {
        self.items.keys().filter_map(move |&id| self.item(id))
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn membership(&self, element: EntityId, set: EntityId) -> Option<&MembershipAssertion> {
        self.memberships.get(&(element, set))
    }

    pub fn memberships(&self) -> impl Iterator<Item = &MembershipAssertion> + '_ {
        self.memberships.values()
    }

    /// Memberships `element ∈ _`.
    pub fn sets_of(&self, element: EntityId) -> impl Iterator<Item = &MembershipAssertion> + '_ {
        self.memberships
            .range((element, EntityId(0))..=(element, EntityId(u32::MAX)))
            .map(|(_, m)| m)
    }

    /// Memberships `_ ∈ set`.
    pub fn members_of(&self, set: EntityId) -> impl Iterator<Item = &MembershipAssertion> + '_ {
        self.members_index
            .range((set, EntityId(0))..=(set, EntityId(u32::MAX)))
            .map(move |&(s, e)| &self.memberships[&(e, s)])
    }

    /// Members of `set` whose membership is `True`.
    pub fn known_members(&self, set: EntityId) -> impl Iterator<Item = EntityId> + '_ {
        self.members_of(set).filter(|m| m.value == Value3::True).map(|m| m.element)
    }

    pub fn edge(&self, from: EntityId, name: &str, to: EntityId) -> Option<&RelationEdge> {
        let rel = self.find_relation(&canonical_label(name))?;
        self.edges.get(&(from, rel, to))
    }

    pub fn edges(&self) -> impl Iterator<Item = &RelationEdge> + '_ {
        self.edges.values()
    }

    pub fn edges_from(&self, from: EntityId) -> impl Iterator<Item = &RelationEdge> + '_ {
        self.edges
            .range((from, 0, EntityId(0))..=(from, u32::MAX, EntityId(u32::MAX)))
            .map(|(_, e)| e)
    }

    pub fn proposition(&self, p: &CategoricalProposition) -> Option<&PropositionRecord> {
        self.propositions.get(p)
    }

    pub fn propositions(&self) -> impl Iterator<Item = &PropositionRecord> + '_ {
        self.propositions.values()
    }

    pub fn rules(&self) -> impl Iterator<Item = &RuleRecord> + '_ {
        self.rules.values()
    }

    pub fn rule_ids(&self) -> Vec<ItemId> {
        self.rules.keys().copied().collect()
    }

    pub fn representation_kind(&self, id: ItemId) -> Option<RepresentationKind> {
        self.item(id).map(|i| i.representation_kind())
    }

    pub fn knowledge(&self) -> KnowledgeSet {
        KnowledgeSet {
            meanings: self
                .items()
                .filter(|i| i.representation_kind() == RepresentationKind::Meaning)
                .map(|i| i.id())
                .collect(),
        }
    }

    /// Derived items whose sources no longer resolve. Empty while
    /// retraction cascades correctly.
    pub fn dangling_sources(&self) -> Vec<ItemId> {
        self.items()
            .filter(|i| i.provenance().sources.iter().any(|s| !self.items.contains_key(s)))
            .map(|i| i.id())
            .collect()
    }

    // -- evaluation --------------------------------------------------------

    /// Value of the `element ∈ context_set` assertion; `Unknown` if none.
    pub fn exists(&self, element: EntityId, context_set: EntityId) -> Value3 {
        self.membership(element, context_set).map_or(Value3::Unknown, |m| m.value)
    }

    /// Existence of `element` relative to [`Kb::root`].
    pub fn existence(&self, element: EntityId) -> Value3 {
        self.existence_degree(element, self.root)
    }

    /// An element exists to the same extent as the set containing it.
    ///
    /// Disjunction over every membership chain from `element` of the
    /// conjunction of the chain's values. A chain reaching `root` ends in
    /// `True`; a chain that revisits an entity, or stops at an entity with no
    /// memberships, ends in `Unknown`.
    pub fn existence_degree(&self, element: EntityId, root: EntityId) -> Value3 {
        let mut path = Vec::new();
        self.degree_along(element, root, &mut path)
    }

    fn degree_along(&self, node: EntityId, root: EntityId, path: &mut Vec<EntityId>) -> Value3 {
        if node == root {
            return Value3::True;
        }
        if path.contains(&node) {
            return Value3::Unknown;
        }
        path.push(node);
        let mut any_chain = false;
        let mut acc = Value3::False;
        for m in self.sets_of(node) {
            any_chain = true;
            // and3(False, _) is False regardless of the tail.
            let chain = if m.value == Value3::False {
                Value3::False
            } else {
                and3(m.value, self.degree_along(m.set, root, path))
            };
            acc = crate::logic3::or3(acc, chain);
            if acc == Value3::True {
                break;
            }
        }
        path.pop();
        if any_chain {
            acc
        } else {
            Value3::Unknown
        }
    }

    /// Disjunction over all relation edges from `observer` to `object`.
    pub fn perceives(&self, observer: EntityId, object: EntityId) -> Value3 {
        let mut found = false;
        let value = Value3::any(self.edges_from(observer).filter(|e| e.to == object).map(|e| {
            found = true;
            e.value
        }));
        if found {
            value
        } else {
            Value3::Unknown
        }
    }

    /// Sets of sets: entities with a non-`False` member that itself has a
    /// non-`False` member. Ordered by label.
    pub fn meta_sets(&self) -> Vec<EntityId> {
        let has_members =
            |s: EntityId| self.members_of(s).any(|m| m.value != Value3::False);
        let mut out: Vec<EntityId> = self
            .entities
            .iter()
            .map(|e| e.id)
            .filter(|&s| self.members_of(s).any(|m| m.value != Value3::False && has_members(m.element)))
            .collect();
        out.sort_by(|a, b| self.label(*a).cmp(self.label(*b)));
        out
    }
}
