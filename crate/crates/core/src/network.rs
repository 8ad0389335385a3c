//! A complete logical hypercube: one index table per vertex.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::index::{IndexEntry, IndexError, IndexTable, ObjectRef};
use crate::keyword::{Dimension, KeywordSet, NodeId};

/// Largest dimension [`Network::build`] accepts by default.
pub const DEFAULT_MAX_DIMENSION: u32 = 20;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("dimension {r} exceeds the configured bound {max}")]
    TooLarge { r: u32, max: u32 },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },
    #[error("snapshot line {line}: node {node} has dimension {found}, network has {expected}")]
    SnapshotDimension {
        line: usize,
        node: NodeId,
        found: Dimension,
        expected: Dimension,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    dim: Dimension,
    tables: Vec<IndexTable>,
}

impl Network {
    /// All `2^r` vertices with empty tables.
    pub fn build(r: Dimension) -> Result<Self, NetworkError> {
        Self::build_bounded(r, DEFAULT_MAX_DIMENSION)
    }

    pub fn build_bounded(r: Dimension, max: u32) -> Result<Self, NetworkError> {
        if r.get() > max {
            return Err(NetworkError::TooLarge { r: r.get(), max });
        }
        let tables = (0..r.node_count())
            .map(|bits| IndexTable::new(NodeId::new(bits as u32, r).expect("bits < 2^r")))
            .collect();
        Ok(Self { dim: r, tables })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.tables.len()
    }

    pub fn node(&self, bits: u32) -> Option<NodeId> {
        NodeId::new(bits, self.dim).ok()
    }

    /// Panics if `node` has a different dimension.
    pub fn table(&self, node: NodeId) -> &IndexTable {
        assert_eq!(node.dim(), self.dim, "node from another hypercube");
        &self.tables[node.index()]
    }

    pub fn tables(&self) -> &[IndexTable] {
        &self.tables
    }

    /// Responsible vertex for `keywords`.
    pub fn owner(&self, keywords: &KeywordSet) -> NodeId {
        keywords.node_id(self.dim)
    }

    /// Publishes on `node`, which must own `keywords`.
    pub fn publish_at(&mut self, node: NodeId, keywords: KeywordSet, object: ObjectRef) -> Result<bool, NetworkError> {
        assert_eq!(node.dim(), self.dim, "node from another hypercube");
        Ok(self.tables[node.index()].publish(keywords, object)?)
    }

    /// Publishes on the responsible vertex.
    pub fn publish(&mut self, keywords: KeywordSet, object: ObjectRef) -> Result<bool, NetworkError> {
        let owner = self.owner(&keywords);
        self.publish_at(owner, keywords, object)
    }

    pub fn object_count(&self) -> usize {
        self.tables.iter().map(IndexTable::object_count).sum()
    }

    /// Every entry, nodes ascending, keyword sets in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = IndexEntry> + '_ {
        self.tables.iter().flat_map(IndexTable::entries)
    }

    /// Writes the JSON Lines snapshot, one entry per line.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<(), NetworkError> {
        for entry in self.entries() {
            serde_json::to_writer(&mut out, &entry).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Rebuilds a network of dimension `r` from a snapshot.
    pub fn read_snapshot<R: BufRead>(r: Dimension, input: R) -> Result<Self, NetworkError> {
        let mut net = Self::build(r)?;
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: IndexEntry = serde_json::from_str(&line).map_err(|e| NetworkError::Snapshot {
                line: line_no,
                message: e.to_string(),
            })?;
            if entry.node.dim() != r {
                return Err(NetworkError::SnapshotDimension {
                    line: line_no,
                    node: entry.node,
                    found: entry.node.dim(),
                    expected: r,
                });
            }
            if entry.objects.is_empty() {
                return Err(NetworkError::Snapshot {
                    line: line_no,
                    message: "entry has no objects".into(),
                });
            }
            for object in entry.objects {
                net.publish_at(entry.node, entry.keywords.clone(), object)?;
            }
        }
        Ok(net)
    }
}
