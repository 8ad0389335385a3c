//! Combinatorics of the complete `r`-dimensional hypercube.

use thiserror::Error;

use crate::keyword::{Dimension, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dimension, Dimension),
    #[error("node {node} is not in the sub-hypercube rooted at {root}")]
    NotInSubHypercube { node: NodeId, root: NodeId },
}

fn same_dim(u: NodeId, v: NodeId) -> Result<(), TopologyError> {
    if u.dim() != v.dim() {
        return Err(TopologyError::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(())
}

/// Number of differing bit positions.
pub fn hamming(u: NodeId, v: NodeId) -> Result<u32, TopologyError> {
    same_dim(u, v)?;
    Ok((u.bits() ^ v.bits()).count_ones())
}

/// The `r` neighbors of `u`, ordered by flipped bit position ascending.
pub fn neighbors(u: NodeId) -> Vec<NodeId> {
    (0..u.dim().get()).map(|i| u.with_bits(u.bits() ^ (1 << i))).collect()
}

/// Induced sub-hypercube of all vertices whose ids contain `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubHypercube {
    root: NodeId,
    free_positions: Vec<u32>,
}

impl SubHypercube {
    pub fn new(root: NodeId) -> Self {
        let free_positions = (0..root.dim().get()).filter(|&i| !root.bit(i)).collect();
        Self { root, free_positions }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Bit positions where the root is 0, ascending.
    pub fn free_positions(&self) -> &[u32] {
        &self.free_positions
    }

    /// `2^m` for `m` free positions.
    pub fn size(&self) -> u64 {
        1u64 << self.free_positions.len()
    }

    /// `(root AND w) = root`.
    pub fn contains(&self, w: NodeId) -> Result<bool, TopologyError> {
        same_dim(self.root, w)?;
        Ok(w.bits() & self.root.bits() == self.root.bits())
    }

    /// `w` restricted to the free positions, packed into `m` low bits.
    pub fn relative_address(&self, w: NodeId) -> Result<u32, TopologyError> {
        if !self.contains(w)? {
            return Err(TopologyError::NotInSubHypercube {
                node: w,
                root: self.root,
            });
        }
        Ok(self
            .free_positions
            .iter()
            .enumerate()
            .filter(|&(_, &p)| w.bit(p))
            .fold(0u32, |acc, (j, _)| acc | (1 << j)))
    }

    /// Children of `v` in the spanning binomial tree rooted at `root`.
    ///
    /// With `x` the relative address of `v`, a child sets one more free bit at
    /// relative position `j` for every `j` below the lowest set bit of `x` (all
    /// `m` positions when `v` is the root). Ascending `j`.
    pub fn sbt_children(&self, v: NodeId) -> Result<Vec<NodeId>, TopologyError> {
        let x = self.relative_address(v)?;
        let limit = if x == 0 {
            self.free_positions.len()
        } else {
            x.trailing_zeros() as usize
        };
        Ok(self.free_positions[..limit]
            .iter()
            .map(|&p| v.with_bits(v.bits() | (1 << p)))
            .collect())
    }

    /// Depth-first preorder over the binomial tree, children ascending.
    ///
    /// Equivalent to visiting relative addresses `0, 1, .., 2^m - 1` in order.
    pub fn dfs(&self) -> SbtWalk<'_> {
        SbtWalk {
            sub: self,
            stack: vec![self.root],
        }
    }

    /// Preorder over the subtree hanging below `v`, `v` first.
    pub fn dfs_from(&self, v: NodeId) -> SbtWalk<'_> {
        debug_assert!(self.contains(v).unwrap_or(false));
        SbtWalk {
            sub: self,
            stack: vec![v],
        }
    }
}

/// `contains(sub, w)`.
pub fn contains(sub: &SubHypercube, w: NodeId) -> Result<bool, TopologyError> {
    sub.contains(w)
}

/// `sbt_children(sub, v)`.
pub fn sbt_children(sub: &SubHypercube, v: NodeId) -> Result<Vec<NodeId>, TopologyError> {
    sub.sbt_children(v)
}

/// Iterator returned by [`SubHypercube::dfs`].
pub struct SbtWalk<'a> {
    sub: &'a SubHypercube,
    stack: Vec<NodeId>,
}

impl Iterator for SbtWalk<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let v = self.stack.pop()?;
        let children = self.sub.sbt_children(v).expect("walk only reaches members");
        self.stack.extend(children.into_iter().rev());
        Some(v)
    }
}
