//! Categorical propositions, valid-mood inference and forward-chaining
//! closure.

mod moods;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::kb::{EntityId, ItemId, Kb, KbError, Method, Provenance, View};
use crate::logic3::Value3;

use moods::MOOD_TABLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Form {
    /// All S are P.
    A,
    /// No S are P.
    E,
    /// Some S are P.
    I,
    /// Some S are not P.
    O,
}

impl Form {
    pub const ALL: [Form; 4] = [Form::A, Form::E, Form::I, Form::O];

    pub fn letter(self) -> char {
        match self {
            Form::A => 'A',
            Form::E => 'E',
            Form::I => 'I',
            Form::O => 'O',
        }
    }

    pub fn contradictory(self) -> Form {
        match self {
            Form::A => Form::O,
            Form::O => Form::A,
            Form::E => Form::I,
            Form::I => Form::E,
        }
    }

    /// E and I convert simply: `E(S,P) ⇔ E(P,S)`, `I(S,P) ⇔ I(P,S)`.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Form::E | Form::I)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CategoricalProposition {
    pub form: Form,
    pub subject: EntityId,
    pub predicate: EntityId,
}

impl CategoricalProposition {
    pub fn new(form: Form, subject: EntityId, predicate: EntityId) -> Self {
        CategoricalProposition { form, subject, predicate }
    }

    pub fn contradictory(&self) -> Self {
        CategoricalProposition { form: self.form.contradictory(), ..*self }
    }

    pub fn converse(&self) -> Self {
        CategoricalProposition { form: self.form, subject: self.predicate, predicate: self.subject }
    }
}

/// A term of a syllogism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Subject,
    Middle,
    Predicate,
}

/// Figure plus (major, minor, conclusion) forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mood {
    pub figure: u8,
    pub forms: [Form; 3],
    /// The term that must be non-empty for the mood to be valid.
    pub restricted: Option<Term>,
}

impl Mood {
    pub fn requires_import(&self) -> bool {
        self.restricted.is_some()
    }
}

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.forms;
        write!(f, "{}{}{}-{}", a.letter(), b.letter(), c.letter(), self.figure)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyllogismError {
    #[error("mood {0} is not in the table of valid moods")]
    InvalidMood(Mood),
}

/// The fifteen unconditionally valid moods, plus the nine that need a
/// non-empty term when `existential_import` is on.
pub fn valid_moods(existential_import: bool) -> Vec<Mood> {
    MOOD_TABLE.iter().filter(|m| existential_import || !m.requires_import()).copied().collect()
}

/// Applies `mood` to the premises. Returns `None` when the premises do not
/// have the mood's forms, do not share exactly one middle term in the
/// figure's arrangement, or when the restricted term has no known member.
pub fn infer_syllogism(
    kb: &Kb,
    major: &CategoricalProposition,
    minor: &CategoricalProposition,
    mood: &Mood,
) -> Result<Option<CategoricalProposition>, SyllogismError> {
    if !MOOD_TABLE.contains(mood) {
        return Err(SyllogismError::InvalidMood(*mood));
    }
    Ok(apply_mood(kb, major, minor, mood))
}

fn apply_mood(
    kb: &Kb,
    major: &CategoricalProposition,
    minor: &CategoricalProposition,
    mood: &Mood,
) -> Option<CategoricalProposition> {
    if major.form != mood.forms[0] || minor.form != mood.forms[1] {
        return None;
    }
    // (middle, predicate) from the major, (subject, middle) from the minor
    let (middle, predicate, subject, middle2) = match mood.figure {
        1 => (major.subject, major.predicate, minor.subject, minor.predicate),
        2 => (major.predicate, major.subject, minor.subject, minor.predicate),
        3 => (major.subject, major.predicate, minor.predicate, minor.subject),
        4 => (major.predicate, major.subject, minor.predicate, minor.subject),
        _ => return None,
    };
    if middle != middle2 || subject == predicate || subject == middle || predicate == middle {
        return None;
    }
    if let Some(term) = mood.restricted {
        let entity = match term {
            Term::Subject => subject,
            Term::Middle => middle,
            Term::Predicate => predicate,
        };
        kb.known_members(entity).next()?;
    }
    Some(CategoricalProposition::new(mood.forms[2], subject, predicate))
}

fn sort_key(kb: &Kb, p: &CategoricalProposition) -> (Form, String, String) {
    (p.form, kb.label(p.subject).to_string(), kb.label(p.predicate).to_string())
}

/// Runs every valid mood over every ordered pair of stored propositions
/// until nothing new is derived. Conclusions from two `True` premises are
/// stored `True` with deduced provenance; a conclusion drawing on an
/// abduced premise is itself abduced and stays `Unknown`. Returns the
/// number of propositions added.
pub fn closure(kb: &mut Kb, existential_import: bool) -> Result<usize, KbError> {
    let moods = valid_moods(existential_import);
    let mut added = 0;
    loop {
        let mut premises: Vec<(CategoricalProposition, ItemId, bool)> = kb
            .propositions()
            .filter(|r| View::Plausible.admits(r.value, r.provenance.kind))
            .map(|r| (r.proposition, r.id, r.value == Value3::True))
            .collect();
        premises.sort_by_cached_key(|(p, _, _)| sort_key(kb, p));

        let mut fresh: BTreeMap<CategoricalProposition, (Value3, Provenance)> = BTreeMap::new();
        for (major, major_id, major_true) in &premises {
            for (minor, minor_id, minor_true) in &premises {
                if major_id == minor_id {
                    continue;
                }
                for mood in &moods {
                    let Some(conclusion) = apply_mood(kb, major, minor, mood) else { continue };
                    let sources = vec![*major_id, *minor_id];
                    let (value, provenance) = if *major_true && *minor_true {
                        (Value3::True, Provenance::deduced(Method::Syllogism(*mood), sources))
                    } else {
                        (Value3::Unknown, Provenance::abduced(Method::Syllogism(*mood), sources))
                    };
                    if kb.proposition(&conclusion).is_some_and(|r| r.provenance.kind >= provenance.kind) {
                        continue;
                    }
                    match fresh.get(&conclusion) {
                        Some((_, existing)) if existing.kind >= provenance.kind => {}
                        _ => {
                            fresh.insert(conclusion, (value, provenance));
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(added);
        }
        for (conclusion, (value, provenance)) in fresh {
            if kb.proposition(&conclusion).is_none() {
                added += 1;
            }
            kb.assert_proposition(conclusion, value, provenance)?;
        }
    }
}

/// Why an evaluation came out the way it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// The proposition itself is stored.
    Stored,
    /// Its simple converse is stored (E and I only).
    Converse,
    /// An individual is a member of both terms (I), or of S but not P (O).
    Witness(EntityId),
    /// An individual refutes it: member of S and not of P (A), or of both (E).
    Counterexample(EntityId),
    /// Its contradictory is stored.
    Contradictory,
    /// Nothing is known.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Value3,
    pub basis: Basis,
    /// The stored items the verdict rests on.
    pub support: Vec<ItemId>,
}

impl Evaluation {
    fn open() -> Self {
        Evaluation { value: Value3::Unknown, basis: Basis::Open, support: Vec::new() }
    }
}

fn stored(kb: &Kb, p: &CategoricalProposition, view: View) -> Option<ItemId> {
    kb.proposition(p).filter(|r| view.admits(r.value, r.provenance.kind)).map(|r| r.id)
}

fn member_in(kb: &Kb, x: EntityId, set: EntityId, view: View) -> Option<ItemId> {
    kb.membership(x, set).filter(|m| view.admits(m.value, m.provenance.kind)).map(|m| m.id)
}

fn member_out(kb: &Kb, x: EntityId, set: EntityId) -> Option<ItemId> {
    kb.membership(x, set).filter(|m| m.value == Value3::False).map(|m| m.id)
}

/// First individual (in entity order) in S and in P.
fn common_member(kb: &Kb, s: EntityId, p: EntityId, view: View) -> Option<(EntityId, ItemId, ItemId)> {
    kb.members_of(s)
        .filter(|m| view.admits(m.value, m.provenance.kind))
        .find_map(|m| member_in(kb, m.element, p, view).map(|pid| (m.element, m.id, pid)))
}

/// First individual in S and known not in P.
fn excluded_member(kb: &Kb, s: EntityId, p: EntityId, view: View) -> Option<(EntityId, ItemId, ItemId)> {
    kb.members_of(s)
        .filter(|m| view.admits(m.value, m.provenance.kind))
        .find_map(|m| member_out(kb, m.element, p).map(|pid| (m.element, m.id, pid)))
}

/// Evaluates a proposition against the store and the membership facts.
/// Refutations are checked before confirmations, so a proposition that is
/// stored but also refuted comes out `False`; see [`contradictions`].
pub fn evaluate_proposition(kb: &Kb, p: &CategoricalProposition, view: View) -> Evaluation {
    let verdict = |value, basis, support| Evaluation { value, basis, support };
    let (s, pr) = (p.subject, p.predicate);

    // refutation
    match p.form {
        Form::A => {
            if let Some((x, a, b)) = excluded_member(kb, s, pr, view) {
                return verdict(Value3::False, Basis::Counterexample(x), vec![a, b]);
            }
        }
        Form::E => {
            if let Some((x, a, b)) = common_member(kb, s, pr, view) {
                return verdict(Value3::False, Basis::Counterexample(x), vec![a, b]);
            }
        }
        Form::I | Form::O => {}
    }
    let contra = p.contradictory();
    let contra_hit = stored(kb, &contra, view)
        .or_else(|| contra.form.is_symmetric().then(|| stored(kb, &contra.converse(), view)).flatten());
    if let Some(id) = contra_hit {
        return verdict(Value3::False, Basis::Contradictory, vec![id]);
    }

    // confirmation
    if let Some(id) = stored(kb, p, view) {
        return verdict(Value3::True, Basis::Stored, vec![id]);
    }
    if p.form.is_symmetric() {
        if let Some(id) = stored(kb, &p.converse(), view) {
            return verdict(Value3::True, Basis::Converse, vec![id]);
        }
    }
    let witness = match p.form {
        Form::I => common_member(kb, s, pr, view),
        Form::O => excluded_member(kb, s, pr, view),
        Form::A | Form::E => None,
    };
    if let Some((x, a, b)) = witness {
        return verdict(Value3::True, Basis::Witness(x), vec![a, b]);
    }
    Evaluation::open()
}

pub fn eval_proposition(kb: &Kb, p: &CategoricalProposition) -> Value3 {
    evaluate_proposition(kb, p, View::Strict).value
}

/// A stored `True` proposition that the KB also refutes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contradiction {
    pub proposition: ItemId,
    pub refutation: Evaluation,
}

pub fn contradictions(kb: &Kb) -> Vec<Contradiction> {
    kb.propositions()
        .filter(|r| r.value == Value3::True)
        .filter_map(|r| {
            let e = evaluate_proposition(kb, &r.proposition, View::Strict);
            (e.value == Value3::False).then_some(Contradiction { proposition: r.id, refutation: e })
        })
        .collect()
}
