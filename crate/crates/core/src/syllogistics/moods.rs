//! Valid categorical moods.
//!
//! Generated by exhaustive model enumeration over universes of up to four
//! elements (see `tests/oracle/mod.rs`, checked by the acceptance suite).
//! A mood with a `restricted` term is valid only when that term is
//! non-empty; the other fifteen are valid unconditionally.

use super::{Form::*, Mood, Term::*};

const fn mood(figure: u8, major: super::Form, minor: super::Form, conclusion: super::Form) -> Mood {
    Mood { figure, forms: [major, minor, conclusion], restricted: None }
}

const fn needs(figure: u8, major: super::Form, minor: super::Form, conclusion: super::Form, term: super::Term) -> Mood {
    Mood { figure, forms: [major, minor, conclusion], restricted: Some(term) }
}

pub(crate) const MOOD_TABLE: [Mood; 24] = [
    mood(1, A, A, A),
    needs(1, A, A, I, Subject),
    mood(1, A, I, I),
    mood(1, E, A, E),
    needs(1, E, A, O, Subject),
    mood(1, E, I, O),
    mood(2, A, E, E),
    needs(2, A, E, O, Subject),
    mood(2, A, O, O),
    mood(2, E, A, E),
    needs(2, E, A, O, Subject),
    mood(2, E, I, O),
    needs(3, A, A, I, Middle),
    mood(3, A, I, I),
    needs(3, E, A, O, Middle),
    mood(3, E, I, O),
    mood(3, I, A, I),
    mood(3, O, A, O),
    needs(4, A, A, I, Predicate),
    mood(4, A, E, E),
    needs(4, A, E, O, Subject),
    needs(4, E, A, O, Middle),
    mood(4, E, I, O),
    mood(4, I, A, I),
];
