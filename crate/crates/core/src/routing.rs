//! Query routing and resolution.
//!
//! A query injected by a user at any vertex is forwarded greedily to the
//! neighbor closest (in Hamming distance) to the responsible vertex
//! `u = one(K)`. Each greedy hop flips the lowest differing bit, so routing
//! always costs exactly `hamming(start, u)` hops.
//!
//! Pin queries are answered by `u` alone. Superset queries collect matches at
//! `u`, then walk the spanning binomial tree of the sub-hypercube rooted at `u`
//! depth-first (children ascending) until the limit is met or the tree is
//! exhausted. Every tree node reached after the root costs one hop; returns
//! along tree edges are free.

use serde::{Deserialize, Serialize};

use crate::index::{IndexError, MatchRule, ObjectRef};
use crate::keyword::{KeywordSet, NodeId};
use crate::network::Network;
use crate::topology::SubHypercube;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueryKind {
    PinSearch,
    SupersetSearch,
}

/// Who handed the query to the current vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sender {
    User,
    Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub keywords: KeywordSet,
    /// Object limit; `usize::MAX` means unlimited. Ignored for pin queries.
    pub limit: usize,
    pub from: Sender,
    pub start: NodeId,
}

impl Query {
    pub fn pin(keywords: KeywordSet, start: NodeId) -> Self {
        Self {
            kind: QueryKind::PinSearch,
            keywords,
            limit: usize::MAX,
            from: Sender::User,
            start,
        }
    }

    pub fn superset(keywords: KeywordSet, limit: usize, start: NodeId) -> Result<Self, IndexError> {
        if limit == 0 {
            return Err(IndexError::ZeroLimit);
        }
        Ok(Self {
            kind: QueryKind::SupersetSearch,
            keywords,
            limit,
            from: Sender::User,
            start,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopTrace {
    /// Routing phase, start through responsible vertex inclusive.
    pub path: Vec<NodeId>,
    /// Tree nodes reached after the responsible vertex, in visit order.
    pub traversal: Vec<NodeId>,
    pub total_hops: usize,
}

impl HopTrace {
    pub fn routing_hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn traversal_hops(&self) -> usize {
        self.traversal.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub objects: Vec<ObjectRef>,
    pub trace: HopTrace,
}

/// Greedy walk from `start` to `one(K)`. Returns the target and the path,
/// both endpoints included.
pub fn route_to_responsible(net: &Network, start: NodeId, keywords: &KeywordSet) -> (NodeId, Vec<NodeId>) {
    let target = net.owner(keywords);
    (target, greedy_path(start, target))
}

/// Path that repeatedly flips the lowest bit where `current` and `target` differ.
pub fn greedy_path(start: NodeId, target: NodeId) -> Vec<NodeId> {
    assert_eq!(start.dim(), target.dim(), "dimension mismatch");
    let mut path = vec![start];
    let mut current = start;
    loop {
        let diff = current.bits() ^ target.bits();
        if diff == 0 {
            break;
        }
        let lowest = diff & diff.wrapping_neg();
        current = current.with_bits(current.bits() ^ lowest);
        path.push(current);
    }
    path
}

pub fn execute(net: &Network, query: &Query) -> QueryResult {
    execute_with(net, query, MatchRule::Keywords)
}

pub fn execute_with(net: &Network, query: &Query, rule: MatchRule) -> QueryResult {
    match query.kind {
        QueryKind::PinSearch => execute_pin_with(net, query, rule),
        QueryKind::SupersetSearch => execute_superset_with(net, query, rule),
    }
}

fn routing_phase(net: &Network, query: &Query) -> (NodeId, Vec<NodeId>) {
    match query.from {
        Sender::User => route_to_responsible(net, query.start, &query.keywords),
        Sender::Node => (query.start, vec![query.start]),
    }
}

/// Pin search: every object stored under exactly `K`.
pub fn execute_pin(net: &Network, query: &Query) -> QueryResult {
    execute_pin_with(net, query, MatchRule::Keywords)
}

pub fn execute_pin_with(net: &Network, query: &Query, rule: MatchRule) -> QueryResult {
    debug_assert_eq!(query.kind, QueryKind::PinSearch);
    let (at, path) = routing_phase(net, query);
    // a node-originated pin that did not land on the owner finds nothing
    let objects = net.table(at).pin_lookup_with(&query.keywords, rule).unwrap_or_default();
    let total_hops = path.len() - 1;
    QueryResult {
        objects,
        trace: HopTrace {
            path,
            traversal: Vec::new(),
            total_hops,
        },
    }
}

/// Superset search: up to `limit` objects whose keyword sets contain `K`.
pub fn execute_superset(net: &Network, query: &Query) -> QueryResult {
    execute_superset_with(net, query, MatchRule::Keywords)
}

pub fn execute_superset_with(net: &Network, query: &Query, rule: MatchRule) -> QueryResult {
    debug_assert_eq!(query.kind, QueryKind::SupersetSearch);
    assert!(query.limit >= 1, "superset limit must be positive");
    let (at, path) = routing_phase(net, query);
    let routing_hops = path.len() - 1;
    let root = net.owner(&query.keywords);
    let sub = SubHypercube::new(root);

    let mut objects = Vec::new();
    let mut traversal = Vec::new();
    // the guard one(u) ⊆ one(v): a vertex outside the sub-hypercube answers nothing
    if sub.contains(at).unwrap_or(false) {
        let mut remaining = query.limit;
        let collect = |node: NodeId, remaining: &mut usize, objects: &mut Vec<ObjectRef>| {
            let found = net
                .table(node)
                .superset_lookup_with(&query.keywords, *remaining, rule)
                .expect("tree nodes lie in the sub-hypercube");
            *remaining -= found.len();
            objects.extend(found);
        };
        collect(at, &mut remaining, &mut objects);
        let mut walk = sub.dfs_from(at).skip(1);
        while remaining > 0 {
            let Some(child) = walk.next() else { break };
            debug_assert!(sub.contains(child).unwrap());
            traversal.push(child);
            collect(child, &mut remaining, &mut objects);
        }
    }

    let total_hops = routing_hops + traversal.len();
    QueryResult {
        objects,
        trace: HopTrace {
            path,
            traversal,
            total_hops,
        },
    }
}
