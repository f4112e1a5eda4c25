use std::path::Path;

use serde::{Deserialize, Serialize};

use super::construct::TriangularBase;
use super::exact::{verify_exact, ExactVerdict};
use super::falsify::{falsify, FalsifyConfig};
use super::{Identity, Monoid};
use crate::error::{Error, Result};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum EntryWords {
    Triple { p: Word, q_hat: Word, r_hat: Word },
    Pair { u: Word, v: Word },
}

/// A base identity with the monoid it is claimed for and where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryEntry {
    pub name: String,
    pub monoid: Monoid,
    #[serde(flatten)]
    words: EntryWords,
    #[serde(default)]
    pub note: String,
}

impl LibraryEntry {
    pub fn from_json(s: &str) -> Result<LibraryEntry> {
        let entry: LibraryEntry = serde_json::from_str(s)?;
        entry.identity()?;
        Ok(entry)
    }

    pub fn from_path(path: &Path) -> Result<LibraryEntry> {
        LibraryEntry::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn new_pair(name: &str, monoid: Monoid, u: Word, v: Word, note: &str) -> LibraryEntry {
        LibraryEntry { name: name.into(), monoid, words: EntryWords::Pair { u, v }, note: note.into() }
    }

    pub fn identity(&self) -> Result<Identity> {
        let (u, v) = match &self.words {
            EntryWords::Pair { u, v } => (u.clone(), v.clone()),
            EntryWords::Triple { p, q_hat, r_hat } => {
                TriangularBase::Triple { p: p.clone(), q_hat: q_hat.clone(), r_hat: r_hat.clone() }.pair()
            }
        };
        Ok(Identity::new(u, v)?.with_monoid(self.monoid))
    }

    /// The entry as input to the inductive step, keeping `p` when known.
    pub fn triangular_base(&self) -> TriangularBase {
        match &self.words {
            EntryWords::Triple { p, q_hat, r_hat } => {
                TriangularBase::Triple { p: p.clone(), q_hat: q_hat.clone(), r_hat: r_hat.clone() }
            }
            EntryWords::Pair { u, v } => TriangularBase::Pair { q: u.clone(), r: v.clone() },
        }
    }

    /// Runs the falsifier on the claimed monoid.
    pub fn admit(&self, config: &FalsifyConfig) -> Result<()> {
        let id = self.identity()?;
        match falsify(&id, self.monoid, config) {
            None => Ok(()),
            Some(ce) => Err(Error::AdmissionFailed {
                name: self.name.clone(),
                detail: format!(
                    "trial {}: entry ({}, {}) is {} vs {} for A = {}, B = {}",
                    ce.trial, ce.i, ce.j, ce.u_value, ce.v_value, ce.a, ce.b
                ),
            }),
        }
    }
}

/// Base identities for the induction: identities of full matrix monoids and
/// of upper-triangular ones.
#[derive(Clone, Debug, Default)]
pub struct BaseLibrary {
    pub entries: Vec<LibraryEntry>,
}

const BUILTIN: [&str; 4] = [
    include_str!("../../fixtures/m1.json"),
    include_str!("../../fixtures/m2.json"),
    include_str!("../../fixtures/u2.json"),
    include_str!("../../fixtures/u3.json"),
];

impl BaseLibrary {
    /// The bundled fixtures, not yet admitted.
    pub fn builtin() -> BaseLibrary {
        let entries = BUILTIN.iter().map(|s| LibraryEntry::from_json(s).expect("bundled fixture parses")).collect();
        BaseLibrary { entries }
    }

    /// Adds an entry after it survives falsification.
    pub fn insert(&mut self, entry: LibraryEntry, config: &FalsifyConfig) -> Result<()> {
        entry.admit(config)?;
        self.entries.retain(|e| e.monoid != entry.monoid);
        self.entries.push(entry);
        Ok(())
    }

    /// Admits every entry, failing on the first refuted one.
    pub fn admit_all(&self, config: &FalsifyConfig) -> Result<()> {
        self.entries.iter().try_for_each(|e| e.admit(config))
    }

    /// Exact verdicts for every entry, under one budget.
    pub fn certify(&self, budget: usize) -> Result<Vec<(String, ExactVerdict)>> {
        self.entries.iter().map(|e| Ok((e.name.clone(), verify_exact(&e.identity()?, e.monoid, budget)?))).collect()
    }

    pub fn get(&self, monoid: Monoid) -> Option<&LibraryEntry> {
        self.entries.iter().find(|e| e.monoid == monoid)
    }

    pub fn full(&self, n: usize) -> Option<&LibraryEntry> {
        self.get(Monoid::Full(n))
    }

    pub fn triangular(&self, n: usize) -> Option<&LibraryEntry> {
        self.get(Monoid::UpperTriangular(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_entries() {
        let lib = BaseLibrary::builtin();
        assert_eq!(lib.full(1).unwrap().identity().unwrap(), Identity::parse("ab", "ba").unwrap().with_monoid(Monoid::Full(1)));
        assert_eq!(lib.full(2).unwrap().identity().unwrap().length(), 17);
        let u2 = lib.triangular(2).unwrap().identity().unwrap();
        assert_eq!((u2.u.to_plain().as_str(), u2.v.to_plain().as_str()), ("abbaababba", "abbabaabba"));
        assert_eq!(lib.triangular(3).unwrap().identity().unwrap().length(), 22);
        assert!(lib.full(3).is_none());
    }

    #[test]
    fn admission_rejects_false_entries() {
        let bad = LibraryEntry::new_pair("bad", Monoid::Full(2), "ab".parse().unwrap(), "ba".parse().unwrap(), "");
        let cfg = FalsifyConfig { trials: 200, ..Default::default() };
        assert!(matches!(bad.admit(&cfg), Err(Error::AdmissionFailed { .. })));
        let mut lib = BaseLibrary::default();
        assert!(lib.insert(bad, &cfg).is_err());
        assert!(lib.entries.is_empty());
        BaseLibrary::builtin().admit_all(&cfg).unwrap();
    }

    #[test]
    fn entry_json_forms() {
        assert!(LibraryEntry::from_json(r#"{"name": "x", "monoid": "M1", "u": "ab", "v": "ab"}"#).is_err());
        assert!(LibraryEntry::from_json(r#"{"name": "x", "monoid": "Q1", "u": "ab", "v": "ba"}"#).is_err());
        let e = LibraryEntry::from_json(r#"{"name": "x", "monoid": "U2", "p": "ab", "q_hat": "a", "r_hat": "b"}"#).unwrap();
        assert_eq!(e.identity().unwrap().u.to_plain(), "abaab");
    }
}
