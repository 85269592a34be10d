//! Pass/fail records for the bound checks.

use num_traits::Signed;
use serde::Serialize;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// Required relation between the two sides of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "==")]
    Equal,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Equal => "==",
        }
    }

    pub fn holds(self, lhs: Rational, rhs: Rational) -> bool {
        match self {
            Relation::AtLeast => lhs >= rhs,
            Relation::AtMost => lhs <= rhs,
            Relation::Equal => lhs == rhs,
        }
    }
}

/// One exact check `lhs <relation> rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub lhs: Option<Rational>,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub rhs: Option<Rational>,
    pub relation: Relation,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Verdict {
    pub fn check(name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        let status = if relation.holds(lhs, rhs) {
            Status::Pass
        } else {
            Status::Fail
        };
        Verdict {
            name: name.into(),
            status,
            lhs: Some(lhs),
            rhs: Some(rhs),
            relation,
            note: String::new(),
        }
    }

    pub fn at_least(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Self::check(name, lhs, Relation::AtLeast, rhs)
    }

    pub fn at_most(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Self::check(name, lhs, Relation::AtMost, rhs)
    }

    pub fn equal(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        Self::check(name, lhs, Relation::Equal, rhs)
    }

    pub fn skip(name: impl Into<String>, relation: Relation, note: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            status: Status::Skip,
            lhs: None,
            rhs: None,
            relation,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// How far the check is from failing: `lhs - rhs` for `>=`, `rhs - lhs` for `<=`.
    pub fn slack(&self) -> Option<Rational> {
        let (lhs, rhs) = (self.lhs?, self.rhs?);
        Some(match self.relation {
            Relation::AtLeast => lhs - rhs,
            Relation::AtMost => rhs - lhs,
            Relation::Equal => -(lhs - rhs).abs(),
        })
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}
