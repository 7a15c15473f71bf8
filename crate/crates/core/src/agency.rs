//! Triggers, aims and choice.
//!
//! A trigger reacts to a newly perceived item by forming an aim. Aims are
//! classified from two three-valued facts: are the actions clear, and are
//! they resourced.
//!
//! | actions clear | resourced | classification |
//! |---------------|-----------|----------------|
//! | yes           | yes       | Task           |
//! | yes           | no        | Goal           |
//! | no            | any       | Dream          |
//! | unknown in either         || Undetermined   |
//!
//! `choose` picks among alternatives by motivation ranking when one
//! applies, otherwise uniformly with a ChaCha8 generator seeded from the
//! caller's seed (`rand_chacha::ChaCha8Rng::seed_from_u64`), which is
//! reproducible across platforms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kb::{Item, Kb};
use crate::logic3::Value3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgencyError {
    #[error("trigger pattern needs at least one concrete slot")]
    NoConcreteSlot,
    #[error("nothing to choose from")]
    NoAlternatives,
    #[error("motivation ranking lists `{0}` twice")]
    DuplicateRanking(String),
}

/// A pattern slot: a wildcard or a canonical term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Any,
    Term(String),
}

impl Slot {
    fn matches(&self, label: &str) -> bool {
        match self {
            Slot::Any => true,
            Slot::Term(t) => t == label,
        }
    }

    fn is_concrete(&self) -> bool {
        matches!(self, Slot::Term(_))
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Any => f.write_str("*"),
            Slot::Term(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriggerPattern {
    Spo { subject: Slot, verb: Slot, object: Slot },
    Membership { element: Slot, set: Slot },
}

impl TriggerPattern {
    fn concrete_slots(&self) -> usize {
        match self {
            TriggerPattern::Spo { subject, verb, object } => {
                [subject, verb, object].iter().filter(|s| s.is_concrete()).count()
            }
            TriggerPattern::Membership { element, set } => {
                [element, set].iter().filter(|s| s.is_concrete()).count()
            }
        }
    }

    pub fn matches(&self, item: &Observation) -> bool {
        match (self, item) {
            (TriggerPattern::Spo { subject, verb, object }, Observation::Edge { subject: s, verb: v, object: o }) => {
                subject.matches(s) && verb.matches(v) && object.matches(o)
            }
            (TriggerPattern::Membership { element, set }, Observation::Membership { element: e, set: s }) => {
                element.matches(e) && set.matches(s)
            }
            _ => false,
        }
    }
}

/// A newly perceived item, by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Edge { subject: String, verb: String, object: String },
    Membership { element: String, set: String },
}

impl Observation {
    pub fn from_item(kb: &Kb, item: Item<'_>) -> Option<Observation> {
        match item {
            Item::Edge(e) => Some(Observation::Edge {
                subject: kb.label(e.from).to_string(),
                verb: e.name.clone(),
                object: kb.label(e.to).to_string(),
            }),
            Item::Membership(m) => Some(Observation::Membership {
                element: kb.label(m.element).to_string(),
                set: kb.label(m.set).to_string(),
            }),
            Item::Proposition(_) | Item::Rule(_) => None,
        }
    }

    /// Values for `{subject}`, `{verb}`, `{object}`. For memberships the
    /// verb is `is a`.
    fn slots(&self) -> (&str, &str, &str) {
        match self {
            Observation::Edge { subject, verb, object } => (subject, verb, object),
            Observation::Membership { element, set } => (element, "is a", set),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger {
    pub id: usize,
    pub pattern: TriggerPattern,
    /// Aim text; `{subject}`, `{verb}` and `{object}` are filled in.
    pub reaction: String,
}

impl Trigger {
    pub fn new(id: usize, pattern: TriggerPattern, reaction: impl Into<String>) -> Result<Self, AgencyError> {
        if pattern.concrete_slots() == 0 {
            return Err(AgencyError::NoConcreteSlot);
        }
        Ok(Trigger { id, pattern, reaction: reaction.into() })
    }

    fn instantiate(&self, item: &Observation) -> String {
        let (s, v, o) = item.slots();
        self.reaction.replace("{subject}", s).replace("{verb}", v).replace("{object}", o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Task,
    Goal,
    Dream,
    Undetermined,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Task => "task",
            Classification::Goal => "goal",
            Classification::Dream => "dream",
            Classification::Undetermined => "undetermined",
        })
    }
}

pub fn classify_aim(actions_clear: Value3, resourced: Value3) -> Classification {
    match (actions_clear, resourced) {
        (Value3::Unknown, _) | (_, Value3::Unknown) => Classification::Undetermined,
        (Value3::True, Value3::True) => Classification::Task,
        (Value3::True, Value3::False) => Classification::Goal,
        (Value3::False, _) => Classification::Dream,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aim {
    pub description: String,
    pub actions_clear: Value3,
    pub resourced: Value3,
    pub classification: Classification,
}

impl Aim {
    pub fn new(description: impl Into<String>) -> Self {
        Aim::assessed(description, Value3::Unknown, Value3::Unknown)
    }

    pub fn assessed(description: impl Into<String>, actions_clear: Value3, resourced: Value3) -> Self {
        Aim {
            description: description.into(),
            actions_clear,
            resourced,
            classification: classify_aim(actions_clear, resourced),
        }
    }
}

/// One aim per matching trigger, in trigger-id order.
pub fn fire_triggers(item: &Observation, triggers: &[Trigger]) -> Vec<Aim> {
    let mut matching: Vec<&Trigger> = triggers.iter().filter(|t| t.pattern.matches(item)).collect();
    matching.sort_by_key(|t| t.id);
    matching.into_iter().map(|t| Aim::new(t.instantiate(item))).collect()
}

/// Preference order over alternative labels, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MotivationRanking {
    labels: Vec<String>,
}

impl MotivationRanking {
    pub fn new<I, S>(labels: I) -> Result<Self, AgencyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for l in labels {
            let l = l.into();
            if out.contains(&l) {
                return Err(AgencyError::DuplicateRanking(l));
            }
            out.push(l);
        }
        Ok(MotivationRanking { labels: out })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// The highest-ranked alternative present in `ranking`; otherwise a
/// uniform draw seeded by `seed`.
pub fn choose<'a, S: AsRef<str>>(
    alternatives: &'a [S],
    ranking: Option<&MotivationRanking>,
    seed: u64,
) -> Result<&'a S, AgencyError> {
    if alternatives.is_empty() {
        return Err(AgencyError::NoAlternatives);
    }
    if let Some(ranking) = ranking {
        for preferred in ranking.labels() {
            if let Some(alt) = alternatives.iter().find(|a| a.as_ref() == preferred) {
                return Ok(alt);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(&alternatives[rng.random_range(0..alternatives.len())])
}
