//! Hypercube-structured DHT for multiple-keyword search.
//!
//! Keyword sets are hashed onto `r`-bit identifiers of a complete logical
//! hypercube. Each vertex keeps an index table from exact keyword sets to
//! ledger object references (mock IOTA MAM roots). Queries are routed greedily
//! along Hamming distance to the responsible vertex, and superset queries then
//! walk the spanning binomial tree of the induced sub-hypercube until a result
//! limit is met.
//!
//! - [`keyword`]: keywords, keyword sets, the position hash and [`NodeId`].
//! - [`topology`]: neighbors, Hamming distance, sub-hypercubes and binomial tree children.
//! - [`index`]: per-node index tables with pin and superset lookups.
//! - [`network`]: a complete hypercube of index tables plus snapshot I/O.
//! - [`routing`]: query routing and resolution with hop accounting.
//! - [`ledger`]: mock MAM root generator and fixture files.
//! - [`sim`]: seeded workloads, experiment cells and CSV output.
//! - [`stats`]: mean, sample deviation and 95% confidence intervals.
//! - [`verify`]: brute-force oracle checks used by tests and the CLI.

pub mod index;
pub mod keyword;
pub mod ledger;
pub mod network;
pub mod routing;
pub mod sim;
pub mod stats;
pub mod topology;
pub mod verify;

pub use index::{IndexEntry, IndexError, IndexTable, MatchRule, ObjectRef};
pub use keyword::{Dimension, Keyword, KeywordError, KeywordSet, NodeId};
pub use ledger::{LedgerError, MockLedger};
pub use network::{Network, NetworkError};
pub use routing::{HopTrace, Query, QueryKind, QueryResult, Sender};
pub use sim::{ExperimentConfig, SearchKind};
pub use stats::StatsSummary;
pub use topology::{SubHypercube, TopologyError};
