//! Strong-Kleene three-valued logic.
//!
//! Every verdict produced by the engine is a [`Value3`]. `Unknown` is the
//! initial value of anything that has not been evaluated, and it sits below
//! both definite values in the knowledge order: refining an `Unknown` input
//! can only turn an `Unknown` output definite, never flip `True` and `False`.

use std::fmt;
use std::str::FromStr;

/// A three-valued truth scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Value3 {
    True,
    False,
    #[default]
    Unknown,
}

impl Value3 {
    pub const ALL: [Value3; 3] = [Value3::True, Value3::False, Value3::Unknown];

    #[must_use]
    pub const fn is_definite(self) -> bool {
        !matches!(self, Value3::Unknown)
    }

    #[must_use]
    pub const fn to_bool(self) -> Option<bool> {
        match self {
            Value3::True => Some(true),
            Value3::False => Some(false),
            Value3::Unknown => None,
        }
    }

    /// `self` is at most as informative as `other`: either `Unknown`, or
    /// equal to `other`.
    #[must_use]
    pub fn below_in_knowledge(self, other: Value3) -> bool {
        self == Value3::Unknown || self == other
    }

    /// Disjunction over an iterator; `False` for an empty iterator.
    pub fn any<I: IntoIterator<Item = Value3>>(values: I) -> Value3 {
        values.into_iter().fold(Value3::False, or3)
    }

    /// Conjunction over an iterator; `True` for an empty iterator.
    pub fn all<I: IntoIterator<Item = Value3>>(values: I) -> Value3 {
        values.into_iter().fold(Value3::True, and3)
    }
}

impl From<bool> for Value3 {
    fn from(b: bool) -> Self {
        if b {
            Value3::True
        } else {
            Value3::False
        }
    }
}

#[must_use]
pub fn and3(a: Value3, b: Value3) -> Value3 {
    match (a, b) {
        (Value3::False, _) | (_, Value3::False) => Value3::False,
        (Value3::True, Value3::True) => Value3::True,
        _ => Value3::Unknown,
    }
}

#[must_use]
pub fn or3(a: Value3, b: Value3) -> Value3 {
    match (a, b) {
        (Value3::True, _) | (_, Value3::True) => Value3::True,
        (Value3::False, Value3::False) => Value3::False,
        _ => Value3::Unknown,
    }
}

#[must_use]
pub fn not3(a: Value3) -> Value3 {
    match a {
        Value3::True => Value3::False,
        Value3::False => Value3::True,
        Value3::Unknown => Value3::Unknown,
    }
}

/// Material implication: `or3(not3(a), b)`.
#[must_use]
pub fn implies3(a: Value3, b: Value3) -> Value3 {
    or3(not3(a), b)
}

impl std::ops::Not for Value3 {
    type Output = Value3;

    fn not(self) -> Value3 {
        not3(self)
    }
}

impl std::ops::BitAnd for Value3 {
    type Output = Value3;

    fn bitand(self, rhs: Value3) -> Value3 {
        and3(self, rhs)
    }
}

impl std::ops::BitOr for Value3 {
    type Output = Value3;

    fn bitor(self, rhs: Value3) -> Value3 {
        or3(self, rhs)
    }
}

impl fmt::Display for Value3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Value3::True => "yes",
            Value3::False => "no",
            Value3::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected one of `yes`, `no`, `unknown`, found `{0}`")]
pub struct ParseValue3Error(pub String);

impl FromStr for Value3 {
    type Err = ParseValue3Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "yes" => Ok(Value3::True),
            "no" => Ok(Value3::False),
            "unknown" => Ok(Value3::Unknown),
            other => Err(ParseValue3Error(other.to_string())),
        }
    }
}
