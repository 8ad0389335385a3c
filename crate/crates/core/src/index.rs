//! Per-node index tables mapping exact keyword sets to object references.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keyword::{KeywordSet, NodeId};

pub const ROOT_LEN: usize = 81;
pub const TRYTE_ALPHABET: &[u8; 27] = b"9ABCDEFGHIJKLMNOPQRSTUVWXYZ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("keyword set {keywords} belongs to {owner}, not {node}")]
    WrongOwner {
        keywords: String,
        owner: NodeId,
        node: NodeId,
    },
    #[error("node {node} is outside the sub-hypercube of {root}")]
    OutsideSubHypercube { node: NodeId, root: NodeId },
    #[error("invalid object root: {0}")]
    InvalidObjectRef(String),
    #[error("limit must be at least 1")]
    ZeroLimit,
}

/// Reference to a ledger object: an 81-tryte MAM message root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ObjectRef(String);

impl ObjectRef {
    pub fn new(root: impl Into<String>) -> Result<Self, IndexError> {
        let root = root.into();
        let ok = root.len() == ROOT_LEN && root.bytes().all(|b| b == b'9' || b.is_ascii_uppercase());
        if !ok {
            return Err(IndexError::InvalidObjectRef(root));
        }
        Ok(Self(root))
    }

    /// Deterministic root encoding `n` in base 27, right-aligned and padded
    /// with `9`.
    pub fn from_index(mut n: u64) -> Self {
        let mut s = [b'9'; ROOT_LEN];
        let mut i = ROOT_LEN;
        while n > 0 {
            i -= 1;
            s[i] = TRYTE_ALPHABET[(n % 27) as usize];
            n /= 27;
        }
        Self(String::from_utf8(s.to_vec()).expect("ascii"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl<'de> Deserialize<'de> for ObjectRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ObjectRef::new(s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ObjectRef {
    type Err = IndexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjectRef::new(s)
    }
}

/// How a stored keyword set is matched against a query.
///
/// `Keywords` compares keyword membership and is what the routing engine
/// uses. `Bits` accepts every entry stored on the node, i.e. it only trusts
/// the hash image and lets collision aliases through; it exists so oracle
/// checks can demonstrate that they catch such a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchRule {
    #[default]
    Keywords,
    Bits,
}

/// One row of a node's table, also the snapshot record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub node: NodeId,
    pub keywords: KeywordSet,
    pub objects: Vec<ObjectRef>,
}

/// The table held by one logical node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTable {
    node: NodeId,
    entries: BTreeMap<KeywordSet, Vec<ObjectRef>>,
}

impl IndexTable {
    pub fn new(node: NodeId) -> Self {
        Self {
            node,
            entries: BTreeMap::new(),
        }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct keyword sets.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn object_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    fn check_owner(&self, keywords: &KeywordSet) -> Result<(), IndexError> {
        let owner = keywords.node_id(self.node.dim());
        if owner != self.node {
            return Err(IndexError::WrongOwner {
                keywords: keywords.to_string(),
                owner,
                node: self.node,
            });
        }
        Ok(())
    }

    /// Appends `object` under `keywords`. Returns `false` if it was already there.
    pub fn publish(&mut self, keywords: KeywordSet, object: ObjectRef) -> Result<bool, IndexError> {
        self.check_owner(&keywords)?;
        let objects = self.entries.entry(keywords).or_default();
        if objects.contains(&object) {
            return Ok(false);
        }
        objects.push(object);
        Ok(true)
    }

    /// Objects stored under exactly `keywords`.
    pub fn pin_lookup(&self, keywords: &KeywordSet) -> Result<Vec<ObjectRef>, IndexError> {
        self.pin_lookup_with(keywords, MatchRule::Keywords)
    }

    pub fn pin_lookup_with(&self, keywords: &KeywordSet, rule: MatchRule) -> Result<Vec<ObjectRef>, IndexError> {
        self.check_owner(keywords)?;
        Ok(match rule {
            MatchRule::Keywords => self.entries.get(keywords).cloned().unwrap_or_default(),
            MatchRule::Bits => self.entries.values().flatten().cloned().collect(),
        })
    }

    /// Up to `limit` objects whose keyword sets contain `keywords`, entries in
    /// canonical order and objects in insertion order.
    pub fn superset_lookup(&self, keywords: &KeywordSet, limit: usize) -> Result<Vec<ObjectRef>, IndexError> {
        self.superset_lookup_with(keywords, limit, MatchRule::Keywords)
    }

    pub fn superset_lookup_with(
        &self,
        keywords: &KeywordSet,
        limit: usize,
        rule: MatchRule,
    ) -> Result<Vec<ObjectRef>, IndexError> {
        if limit == 0 {
            return Err(IndexError::ZeroLimit);
        }
        let root = keywords.node_id(self.node.dim());
        if self.node.bits() & root.bits() != root.bits() {
            return Err(IndexError::OutsideSubHypercube { node: self.node, root });
        }
        Ok(self
            .entries
            .iter()
            .filter(|(stored, _)| match rule {
                MatchRule::Keywords => keywords.is_subset(stored),
                MatchRule::Bits => true,
            })
            .flat_map(|(_, objects)| objects.iter().cloned())
            .take(limit)
            .collect())
    }

    /// Entries in canonical keyword-set order.
    pub fn entries(&self) -> impl Iterator<Item = IndexEntry> + '_ {
        self.entries.iter().map(|(k, objects)| IndexEntry {
            node: self.node,
            keywords: k.clone(),
            objects: objects.clone(),
        })
    }
}
