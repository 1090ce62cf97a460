//! Bracket-path addressing of hierarchy units, e.g. `[R][01][10]:12`.
//!
//! Each hop is written column digit first, then row digit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One step down the hierarchy: a unit position in the current map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hop {
    pub row: u8,
    pub col: u8,
}

/// Route from the root to a unit; empty for the root itself.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPath(Vec<Hop>);

impl UnitPath {
    pub fn root() -> Self {
        UnitPath(Vec::new())
    }

    pub fn hops(&self) -> &[Hop] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, row: usize, col: usize) -> Self {
        assert!(row < 10 && col < 10, "grid position ({row}, {col}) does not fit a path label");
        let mut hops = self.0.clone();
        hops.push(Hop { row: row as u8, col: col as u8 });
        UnitPath(hops)
    }

    pub fn parent(&self) -> Option<Self> {
        (!self.0.is_empty()).then(|| UnitPath(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn last(&self) -> Option<Hop> {
        self.0.last().copied()
    }

    pub fn starts_with(&self, prefix: &UnitPath) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Label with a `:count` suffix, as used in leaf listings.
    pub fn label_with_count(&self, count: usize) -> String {
        format!("{self}:{count}")
    }
}

impl fmt::Display for UnitPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[R]")?;
        for hop in &self.0 {
            write!(f, "[{}{}]", hop.col, hop.row)?;
        }
        Ok(())
    }
}

/// A parsed label: the path plus the optional sample-count suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLabel {
    pub path: UnitPath,
    pub count: Option<usize>,
}

impl FromStr for PathLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::MalformedPath(s.to_string());
        let mut rest = s.strip_prefix("[R]").ok_or_else(bad)?;
        let mut hops = Vec::new();
        while let Some(after) = rest.strip_prefix('[') {
            let b = after.as_bytes();
            if b.len() < 3 || !b[0].is_ascii_digit() || !b[1].is_ascii_digit() || b[2] != b']' {
                return Err(bad());
            }
            hops.push(Hop { col: b[0] - b'0', row: b[1] - b'0' });
            rest = &after[3..];
        }
        let count = match rest.strip_prefix(':') {
            None if rest.is_empty() => None,
            None => return Err(bad()),
            Some(digits) if !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit()) => {
                Some(digits.parse().map_err(|_| bad())?)
            }
            Some(_) => return Err(bad()),
        };
        Ok(PathLabel { path: UnitPath(hops), count })
    }
}

impl FromStr for UnitPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let label: PathLabel = s.parse()?;
        if label.count.is_some() {
            return Err(Error::MalformedPath(s.to_string()));
        }
        Ok(label.path)
    }
}

impl Serialize for UnitPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for UnitPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
