//! Semigroup identities of tropical matrices: construction, length
//! accounting, randomized falsification and exact verification.

mod construct;
mod exact;
mod expr;
mod falsify;
mod library;
mod lp;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

pub use construct::{
    construct_identity, construction_length, ConstructOptions, LengthParams, LengthReport, TriangularBase, Variant,
};
pub use exact::{verify_exact, ExactVerdict, Refutation, DEFAULT_EXACT_BUDGET};
pub use expr::WordExpr;
pub use falsify::{falsify, try_separate, Counterexample, FalsifyConfig, Separator};
pub use library::{BaseLibrary, LibraryEntry};

/// Where an identity is meant to hold: all `n×n` matrices, or the
/// upper-triangular ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monoid {
    Full(usize),
    UpperTriangular(usize),
}

impl Monoid {
    pub fn n(self) -> usize {
        match self {
            Monoid::Full(n) | Monoid::UpperTriangular(n) => n,
        }
    }

    pub fn is_triangular(self) -> bool {
        matches!(self, Monoid::UpperTriangular(_))
    }

    /// Whether entry `(i, j)` may be finite.
    pub fn allows(self, i: usize, j: usize) -> bool {
        !self.is_triangular() || i <= j
    }
}

impl fmt::Display for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monoid::Full(n) => write!(f, "M{n}"),
            Monoid::UpperTriangular(n) => write!(f, "U{n}"),
        }
    }
}

impl FromStr for Monoid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Monoid> {
        let bad = || Error::Parse(format!("monoid must look like M3 or U2, got {s:?}"));
        let (kind, digits) = s.trim().split_at_checked(1).ok_or_else(bad)?;
        let n: usize = digits.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match kind {
            "M" => Ok(Monoid::Full(n)),
            "U" => Ok(Monoid::UpperTriangular(n)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Monoid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monoid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A pair of distinct words, optionally with the monoid it is claimed for and
/// the expressions it was built from (used for fast evaluation).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Identity {
    pub u: Word,
    pub v: Word,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<Monoid>,
    #[serde(skip)]
    pub structure: Option<Arc<(WordExpr, WordExpr)>>,
}

impl PartialEq for Identity {
    fn eq(&self, other: &Self) -> bool {
        self.u == other.u && self.v == other.v && self.monoid == other.monoid
    }
}

impl Eq for Identity {}

impl Identity {
    pub fn new(u: Word, v: Word) -> Result<Identity> {
        if u == v {
            return Err(Error::TrivialIdentity);
        }
        Ok(Identity { u, v, monoid: None, structure: None })
    }

    pub fn parse(u: &str, v: &str) -> Result<Identity> {
        Identity::new(u.parse()?, v.parse()?)
    }

    pub fn with_monoid(mut self, monoid: Monoid) -> Identity {
        self.monoid = Some(monoid);
        self
    }

    pub fn length(&self) -> u64 {
        self.u.len().max(self.v.len())
    }

    /// Same number of `a`s and of `b`s on both sides.
    pub fn is_balanced(&self) -> bool {
        [Letter::A, Letter::B].iter().all(|&l| self.u.count(l) == self.v.count(l))
    }

    /// The two sides as expressions: the recorded structure if any, else the
    /// plain words.
    pub fn sides(&self) -> (WordExpr, WordExpr) {
        match &self.structure {
            Some(s) => s.as_ref().clone(),
            None => (WordExpr::word(self.u.clone()), WordExpr::word(self.v.clone())),
        }
    }

    /// `(u⟨w1, w2⟩, v⟨w1, w2⟩)`.
    pub fn substitute(&self, w1: &Word, w2: &Word) -> Result<Identity> {
        let mut out = Identity::new(self.u.substitute(w1, w2), self.v.substitute(w1, w2))?;
        out.monoid = self.monoid;
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("identity serializes")
    }

    pub fn from_json(s: &str) -> Result<Identity> {
        let id: Identity = serde_json::from_str(s)?;
        Identity::new(id.u, id.v).map(|fresh| Identity { monoid: id.monoid, ..fresh })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_basics() {
        assert!(matches!(Identity::parse("ab", "ab"), Err(Error::TrivialIdentity)));
        let id = Identity::parse("abba", "a^2 b^3").unwrap();
        assert_eq!(id.length(), 5);
        assert!(!id.is_balanced());
        assert!(Identity::parse("ab", "ba").unwrap().is_balanced());
    }

    #[test]
    fn json_round_trip() {
        let id = Identity::parse("ab", "ba").unwrap().with_monoid(Monoid::Full(1));
        let s = id.to_json();
        assert!(s.contains("\"M1\""));
        assert_eq!(Identity::from_json(&s).unwrap(), id);
        let plain = Identity::from_json(r#"{"u": "a^3 b", "v": "baaa"}"#).unwrap();
        assert_eq!(plain.monoid, None);
        assert_eq!(plain.u.to_plain(), "aaab");
        assert!(Identity::from_json(r#"{"u": "ab", "v": "ab"}"#).is_err());
    }

    #[test]
    fn monoid_parsing() {
        assert_eq!("U3".parse::<Monoid>().unwrap(), Monoid::UpperTriangular(3));
        assert_eq!("M12".parse::<Monoid>().unwrap(), Monoid::Full(12));
        for bad in ["", "M", "X3", "M0", "Mx"] {
            assert!(bad.parse::<Monoid>().is_err(), "{bad}");
        }
    }
}
