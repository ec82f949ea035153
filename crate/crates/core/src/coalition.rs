//! Coalitions and coalition structures over the link set.
//!
//! Links are indexed from 0 internally. Everything that leaves the process
//! (JSON, CSV member lists, `Display`) numbers links from 1. A [`Coalition`]
//! is a bitmask where bit `i` stands for link `i + 1`, which caps scenarios
//! at 64 links.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard limit imposed by the bitmask representation.
pub const MAX_LINKS: usize = 64;

/// Zero-based link index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub usize);

impl LinkId {
    pub fn index(self) -> usize {
        self.0
    }

    /// One-based link number, as used in reports.
    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A nonempty set of links, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u64);

impl Coalition {
    /// Builds a coalition from a raw mask. Returns `None` for the empty mask.
    pub fn from_mask(mask: u64) -> Option<Self> {
        (mask != 0).then_some(Coalition(mask))
    }

    pub fn singleton(link: usize) -> Self {
        assert!(link < MAX_LINKS, "link index {link} out of range");
        Coalition(1 << link)
    }

    /// The grand coalition of `k` links.
    pub fn grand(k: usize) -> Self {
        assert!((1..=MAX_LINKS).contains(&k), "link count {k} out of range");
        Coalition(if k == 64 { u64::MAX } else { (1u64 << k) - 1 })
    }

    /// Builds a coalition from zero-based member indices.
    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Result<Self> {
        let mut mask = 0u64;
        for m in members {
            if m >= MAX_LINKS {
                return Err(Error::InvalidDeviation(format!("link index {m} out of range")));
            }
            mask |= 1 << m;
        }
        Coalition::from_mask(mask).ok_or_else(|| Error::InvalidDeviation("empty coalition".into()))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, link: usize) -> bool {
        link < MAX_LINKS && self.0 & (1 << link) != 0
    }

    /// Smallest member, used for canonical ordering.
    pub fn first(self) -> usize {
        self.0.trailing_zeros() as usize
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending order (zero-based).
    pub fn members(self) -> Members {
        Members(self.0)
    }
}

/// Iterator over the members of a coalition, ascending.
#[derive(Debug, Clone)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, m) in self.members().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        f.write_str("}")
    }
}

impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members().map(|m| m + 1))
    }
}

impl<'de> Deserialize<'de> for Coalition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let numbers = Vec::<usize>::deserialize(d)?;
        if numbers.contains(&0) {
            return Err(serde::de::Error::custom("link numbers start at 1"));
        }
        Coalition::from_members(numbers.into_iter().map(|n| n - 1)).map_err(serde::de::Error::custom)
    }
}

/// A partition of `{0..k}` into disjoint coalitions, kept in canonical order
/// (coalitions sorted by smallest member).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct CoalitionStructure {
    coalitions: Vec<Coalition>,
}

impl CoalitionStructure {
    /// Validates that `coalitions` partition `{0..k}` and canonicalizes.
    pub fn new(k: usize, mut coalitions: Vec<Coalition>) -> Result<Self> {
        if k == 0 || k > MAX_LINKS {
            return Err(Error::InvalidDeviation(format!("link count {k} out of range")));
        }
        let mut seen = 0u64;
        for c in &coalitions {
            if c.mask() & seen != 0 {
                return Err(Error::InvalidDeviation(format!("coalition {c} overlaps another")));
            }
            seen |= c.mask();
        }
        if seen != Coalition::grand(k).mask() {
            return Err(Error::InvalidDeviation(format!("coalitions do not cover exactly links 1..={k}")));
        }
        coalitions.sort_by_key(|c| c.first());
        Ok(CoalitionStructure { coalitions })
    }

    /// Every link on its own: the noncooperative starting point.
    pub fn singletons(k: usize) -> Self {
        CoalitionStructure { coalitions: (0..k).map(Coalition::singleton).collect() }
    }

    pub fn grand(k: usize) -> Self {
        CoalitionStructure { coalitions: vec![Coalition::grand(k)] }
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    pub fn num_links(&self) -> usize {
        self.coalitions.iter().map(|c| c.len()).sum()
    }

    /// The coalition holding `link`.
    pub fn coalition_of(&self, link: usize) -> Option<Coalition> {
        self.coalitions.iter().copied().find(|c| c.contains(link))
    }

    pub fn is_all_singletons(&self) -> bool {
        self.coalitions.iter().all(|c| c.len() == 1)
    }

    /// Merges the coalitions at the given positions into one. Positions refer
    /// to the canonical order and must be distinct; at least two are needed.
    pub fn merge_positions(&self, positions: &[usize]) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidDeviation("a merge needs at least two coalitions".into()));
        }
        let mut picked = vec![false; self.coalitions.len()];
        let mut merged = 0u64;
        for &p in positions {
            if p >= self.coalitions.len() || picked[p] {
                return Err(Error::InvalidDeviation(format!("coalition position {p} is out of range or repeated")));
            }
            picked[p] = true;
            merged |= self.coalitions[p].mask();
        }
        let mut coalitions: Vec<Coalition> =
            self.coalitions.iter().zip(&picked).filter(|(_, &p)| !p).map(|(&c, _)| c).collect();
        coalitions.push(Coalition(merged));
        coalitions.sort_by_key(|c| c.first());
        Ok(CoalitionStructure { coalitions })
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, c) in self.coalitions.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

impl<'de> Deserialize<'de> for CoalitionStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coalitions = Vec::<Coalition>::deserialize(d)?;
        let k = coalitions.iter().map(|c| c.len()).sum();
        CoalitionStructure::new(k, coalitions).map_err(serde::de::Error::custom)
    }
}
