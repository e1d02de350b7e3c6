use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A partition of a positive integer, stored in weakly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Invalid("empty partition".into()));
        }
        if parts.contains(&0) {
            return Err(Error::Invalid("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// The partition `(1, 1, ..., 1)` of `n`.
    pub fn ones(n: u32) -> Self {
        Partition {
            parts: vec![1; n as usize],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of times `part` occurs.
    pub fn multiplicity(&self, part: u32) -> usize {
        self.parts.iter().filter(|&&p| p == part).count()
    }

    /// Whether every value of `sub` occurs in `self` at least as often as in `sub`.
    pub fn contains_multiset(&self, sub: &[u32]) -> bool {
        let mut needed: BTreeMap<u32, usize> = BTreeMap::new();
        for &v in sub {
            *needed.entry(v).or_default() += 1;
        }
        needed.iter().all(|(&v, &n)| self.multiplicity(v) >= n)
    }

    /// Multiset equality with `other`, order ignored.
    pub fn equals_multiset(&self, other: &[u32]) -> bool {
        let mut sorted = other.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted == self.parts
    }

    /// Parts left over after removing the multiset `used`, or `None` if `used`
    /// is not a submultiset.
    pub fn remainder(&self, used: &[u32]) -> Option<Vec<u32>> {
        let mut rest = self.parts.clone();
        for v in used {
            let pos = rest.iter().position(|p| p == v)?;
            rest.remove(pos);
        }
        Some(rest)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
