//! Seeded experiment driver.
//!
//! One experiment cell builds a complete hypercube, publishes `object_count`
//! random keyword-set/root pairs, then runs `repetitions` trials of
//! `query_count` queries each from uniformly random start vertices. The
//! statistic of record per repetition is the mean total hop count.
//!
//! The default workload uses one vocabulary word per dimension and draws each
//! object's keyword set uniformly over all non-empty subsets, which spreads
//! objects evenly over the hypercube. A synthetic `kw0000..` vocabulary with
//! sized draws is available for collision-heavy workloads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::ObjectRef;
use crate::keyword::{Dimension, Keyword, KeywordSet};
use crate::ledger::MockLedger;
use crate::network::{Network, NetworkError};
use crate::routing::{execute, Query, QueryResult};
use crate::stats::{self, InsufficientData, StatsSummary};

const LEDGER_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Stats(#[from] InsufficientData),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchKind {
    Pin,
    Superset,
}

impl fmt::Display for SearchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchKind::Pin => "pin",
            SearchKind::Superset => "superset",
        })
    }
}

impl FromStr for SearchKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pin" => Ok(SearchKind::Pin),
            "superset" => Ok(SearchKind::Superset),
            other => Err(format!("unknown search kind {other:?} (expected pin or superset)")),
        }
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    pub const fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }
}

/// Keyword pool objects and queries draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vocabulary {
    /// `r` words, one hashing to each bit position, so keyword containment
    /// and bit containment coincide.
    PerDimension,
    /// `kw0000, kw0001, ..` of the given size; hash collisions are common.
    Synthetic(usize),
}

/// How an object's keyword set is drawn from the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKeywords {
    /// Each word independently with probability 1/2, redrawn if empty: every
    /// non-empty subset is equally likely.
    UniformSubset,
    /// Size uniform in the range, then that many distinct words.
    Sized(SizeRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub r: Dimension,
    pub object_count: usize,
    pub query_count: usize,
    pub repetitions: usize,
    pub limit: usize,
    pub search_kind: SearchKind,
    pub seed: u64,
    pub vocabulary: Vocabulary,
    pub keywords_per_object: ObjectKeywords,
    pub query_keywords: SizeRange,
    /// Probability that a superset query is drawn as a subset of a published
    /// keyword set rather than from the vocabulary.
    pub match_bias: f64,
}

impl ExperimentConfig {
    pub const DEFAULT_REPETITIONS: usize = 50;
    pub const DEFAULT_QUERIES: usize = 1;
    pub const DEFAULT_LIMIT: usize = 10;
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_VOCABULARY: Vocabulary = Vocabulary::PerDimension;
    pub const DEFAULT_SYNTHETIC_VOCABULARY: usize = 1000;
    pub const DEFAULT_KEYWORDS_PER_OBJECT: ObjectKeywords = ObjectKeywords::UniformSubset;
    pub const DEFAULT_KEYWORD_RANGE: SizeRange = SizeRange::new(1, 5);
    pub const DEFAULT_QUERY_KEYWORDS: SizeRange = SizeRange::new(1, 3);
    pub const DEFAULT_MATCH_BIAS: f64 = 0.5;

    pub fn new(r: Dimension, object_count: usize, search_kind: SearchKind) -> Self {
        Self {
            r,
            object_count,
            query_count: Self::DEFAULT_QUERIES,
            repetitions: Self::DEFAULT_REPETITIONS,
            limit: Self::DEFAULT_LIMIT,
            search_kind,
            seed: Self::DEFAULT_SEED,
            vocabulary: Self::DEFAULT_VOCABULARY,
            keywords_per_object: Self::DEFAULT_KEYWORDS_PER_OBJECT,
            query_keywords: Self::DEFAULT_QUERY_KEYWORDS,
            match_bias: Self::DEFAULT_MATCH_BIAS,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::Config(msg.to_owned()));
        if self.object_count == 0 {
            return bad("object count must be at least 1");
        }
        if self.query_count == 0 {
            return bad("query count must be at least 1");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.limit == 0 {
            return bad("limit must be at least 1");
        }
        if self.vocabulary == Vocabulary::Synthetic(0) {
            return bad("vocabulary size must be at least 1");
        }
        let mut ranges = vec![("query keywords", self.query_keywords)];
        if let ObjectKeywords::Sized(range) = self.keywords_per_object {
            ranges.push(("keywords per object", range));
        }
        for (name, range) in ranges {
            if range.min == 0 || range.min > range.max {
                return Err(SimError::Config(format!(
                    "{name}: need 1 <= min <= max, got [{}, {}]",
                    range.min, range.max
                )));
            }
            // the per-dimension vocabulary has only r words; sizes are clamped to it
            if let Vocabulary::Synthetic(size) = self.vocabulary {
                if range.max > size {
                    return Err(SimError::Config(format!(
                        "{name}: max {} exceeds vocabulary size {size}",
                        range.max
                    )));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.match_bias) {
            return bad("match bias must lie in [0, 1]");
        }
        Ok(())
    }
}

fn synthetic_word(i: usize) -> Keyword {
    Keyword::new(&format!("kw{i:04}")).expect("non-empty")
}

/// Synthetic vocabulary `kw0000, kw0001, ..`.
pub fn vocabulary(size: usize) -> Vec<Keyword> {
    (0..size).map(synthetic_word).collect()
}

/// For each bit position ascending, the first synthetic word hashing there.
pub fn per_dimension_vocabulary(r: Dimension) -> Vec<Keyword> {
    (0..r.get())
        .map(|bit| {
            (0..)
                .map(synthetic_word)
                .find(|k| u32::from(k.position(r)) == bit)
                .expect("FNV-1a reaches every residue")
        })
        .collect()
}

pub fn vocabulary_for(config: &ExperimentConfig) -> Vec<Keyword> {
    match config.vocabulary {
        Vocabulary::PerDimension => per_dimension_vocabulary(config.r),
        Vocabulary::Synthetic(size) => vocabulary(size),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub keywords: KeywordSet,
    pub object: ObjectRef,
}

/// Complete network of dimension `r` with empty tables.
pub fn build_network(r: Dimension) -> Result<Network, SimError> {
    Ok(Network::build(r)?)
}

fn sample_set<R: Rng>(rng: &mut R, pool: &[Keyword], range: SizeRange) -> KeywordSet {
    let max = range.max.min(pool.len());
    let min = range.min.min(max);
    // u32 keeps the draw identical on 32- and 64-bit targets
    let size = rng.gen_range(min as u32..=max as u32) as usize;
    let picked = index::sample(rng, pool.len(), size)
        .into_iter()
        .map(|i| pool[i].clone());
    KeywordSet::new(picked).expect("size >= 1")
}

fn draw_object_keywords<R: Rng>(rng: &mut R, vocab: &[Keyword], how: ObjectKeywords) -> KeywordSet {
    match how {
        ObjectKeywords::Sized(range) => sample_set(rng, vocab, range),
        ObjectKeywords::UniformSubset => loop {
            let picked: Vec<Keyword> = vocab.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if let Ok(set) = KeywordSet::new(picked) {
                break set;
            }
        },
    }
}

/// Publishes `object_count` random associations; returns them in order.
pub fn populate(net: &mut Network, config: &ExperimentConfig) -> Result<Vec<Publication>, SimError> {
    config.validate()?;
    let vocab = vocabulary_for(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ledger = MockLedger::new(config.seed ^ LEDGER_SALT);
    let mut log = Vec::with_capacity(config.object_count);
    for _ in 0..config.object_count {
        let keywords = draw_object_keywords(&mut rng, &vocab, config.keywords_per_object);
        let object = ledger.next_root();
        net.publish(keywords.clone(), object.clone())?;
        log.push(Publication { keywords, object });
    }
    Ok(log)
}

fn trial_rng(seed: u64, trial_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial_index as u64);
    rng.set_stream(1);
    rng
}

/// Draws one query keyword set for `config`.
pub fn draw_query_keywords<R: Rng>(
    rng: &mut R,
    vocab: &[Keyword],
    log: &[Publication],
    config: &ExperimentConfig,
) -> KeywordSet {
    let biased = config.search_kind == SearchKind::Superset && !log.is_empty() && rng.gen_bool(config.match_bias);
    if biased {
        let source = &log.choose(rng).expect("non-empty").keywords;
        let members: Vec<Keyword> = source.iter().cloned().collect();
        sample_set(rng, &members, config.query_keywords)
    } else {
        sample_set(rng, vocab, config.query_keywords)
    }
}

/// Runs the queries of one repetition.
pub fn run_trial(
    net: &Network,
    log: &[Publication],
    config: &ExperimentConfig,
    trial_index: usize,
) -> Vec<QueryResult> {
    let vocab = vocabulary_for(config);
    let mut rng = trial_rng(config.seed, trial_index);
    let r = net.dim();
    (0..config.query_count)
        .map(|_| {
            let keywords = draw_query_keywords(&mut rng, &vocab, log, config);
            let start = net.node(rng.gen_range(0..=r.mask())).expect("drawn below 2^r");
            let query = match config.search_kind {
                SearchKind::Pin => Query::pin(keywords, start),
                SearchKind::Superset => Query::superset(keywords, config.limit, start).expect("limit validated"),
            };
            execute(net, &query)
        })
        .collect()
}

/// Per-repetition aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionRow {
    pub nodes: u64,
    pub objects: usize,
    pub search: SearchKind,
    pub repetition: usize,
    pub mean_hops: f64,
    pub queries: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repetition {
    pub row: RepetitionRow,
    pub mean_routing_hops: f64,
    pub mean_traversal_hops: f64,
    pub mean_results: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub nodes: u64,
    pub objects: usize,
    pub search: SearchKind,
    pub mean: f64,
    pub stddev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub config: ExperimentConfig,
    pub repetitions: Vec<Repetition>,
    pub total: StatsSummary,
    pub routing: StatsSummary,
    pub traversal: StatsSummary,
}

impl CellOutcome {
    pub fn summary_row(&self) -> SummaryRow {
        SummaryRow {
            nodes: self.config.r.node_count(),
            objects: self.config.object_count,
            search: self.config.search_kind,
            mean: self.total.mean,
            stddev: self.total.stddev,
            ci_low: self.total.ci_low,
            ci_high: self.total.ci_high,
            n: self.total.n,
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &RepetitionRow> {
        self.repetitions.iter().map(|rep| &rep.row)
    }
}

/// Mean hop counts over a batch of query results.
pub fn summarize_trial(results: &[QueryResult]) -> (f64, f64, f64, f64) {
    let f = |g: fn(&QueryResult) -> usize| stats::mean(&results.iter().map(|q| g(q) as f64).collect::<Vec<_>>());
    (
        f(|q| q.trace.total_hops),
        f(|q| q.trace.routing_hops()),
        f(|q| q.trace.traversal_hops()),
        f(|q| q.objects.len()),
    )
}

/// Summary across repetition means.
pub fn summarize(repetition_means: &[f64]) -> Result<StatsSummary, InsufficientData> {
    StatsSummary::from_samples(repetition_means)
}

/// Builds, populates and runs every repetition of one cell.
pub fn run_cell(config: &ExperimentConfig) -> Result<CellOutcome, SimError> {
    config.validate()?;
    let mut net = build_network(config.r)?;
    let log = populate(&mut net, config)?;
    let repetitions: Vec<Repetition> = (0..config.repetitions)
        .map(|i| {
            let results = run_trial(&net, &log, config, i);
            let (total, routing, traversal, found) = summarize_trial(&results);
            Repetition {
                row: RepetitionRow {
                    nodes: config.r.node_count(),
                    objects: config.object_count,
                    search: config.search_kind,
                    repetition: i,
                    mean_hops: total,
                    queries: results.len(),
                },
                mean_routing_hops: routing,
                mean_traversal_hops: traversal,
                mean_results: found,
            }
        })
        .collect();
    let column = |f: fn(&Repetition) -> f64| repetitions.iter().map(f).collect::<Vec<_>>();
    let total = summarize(&column(|r| r.row.mean_hops))?;
    let routing = summarize(&column(|r| r.mean_routing_hops))?;
    let traversal = summarize(&column(|r| r.mean_traversal_hops))?;
    Ok(CellOutcome {
        config: config.clone(),
        repetitions,
        total,
        routing,
        traversal,
    })
}

pub fn write_results_csv<'a, W, I>(out: W, rows: I) -> Result<(), SimError>
where
    W: Write,
    I: IntoIterator<Item = &'a RepetitionRow>,
{
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<'a, W, I>(out: W, rows: I) -> Result<(), SimError>
where
    W: Write,
    I: IntoIterator<Item = &'a SummaryRow>,
{
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(r: u32, objects: usize, kind: SearchKind) -> ExperimentConfig {
        ExperimentConfig::new(Dimension::new(r).unwrap(), objects, kind)
    }

    #[test]
    fn defaults() {
        let c = config(7, 100, SearchKind::Pin);
        assert_eq!(c.repetitions, 50);
        assert_eq!(c.limit, 10);
        assert_eq!(c.seed, 42);
        c.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut c = config(5, 0, SearchKind::Pin);
        assert!(c.validate().is_err());
        c.object_count = 1;
        c.keywords_per_object = ObjectKeywords::Sized(SizeRange::new(3, 2));
        assert!(c.validate().is_err());
        c.keywords_per_object = ObjectKeywords::Sized(SizeRange::new(1, 2));
        c.vocabulary = Vocabulary::Synthetic(1);
        assert!(c.validate().is_err());
        c.vocabulary = Vocabulary::Synthetic(0);
        assert!(c.validate().is_err());
        c.vocabulary = Vocabulary::PerDimension;
        c.validate().unwrap();
        c.match_bias = 1.5;
        assert!(c.validate().is_err());
        c.match_bias = 0.0;
        c.limit = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn populate_publishes_every_object_on_its_owner() {
        let c = config(7, 100, SearchKind::Pin);
        let mut net = build_network(c.r).unwrap();
        let log = populate(&mut net, &c).unwrap();
        assert_eq!(log.len(), 100);
        assert_eq!(net.object_count(), 100);
        for p in &log {
            let owner = net.owner(&p.keywords);
            assert!(net.table(owner).pin_lookup(&p.keywords).unwrap().contains(&p.object));
            assert!((1..=7).contains(&p.keywords.len()));
        }
    }

    #[test]
    fn sized_draws_stay_in_range() {
        let mut c = config(8, 300, SearchKind::Pin);
        c.vocabulary = Vocabulary::Synthetic(1000);
        c.keywords_per_object = ObjectKeywords::Sized(SizeRange::new(2, 4));
        let mut net = build_network(c.r).unwrap();
        let log = populate(&mut net, &c).unwrap();
        let mut seen = [false; 5];
        for p in &log {
            let n = p.keywords.len();
            assert!((2..=4).contains(&n));
            seen[n] = true;
            assert!(p.keywords.iter().all(|k| k.as_str().starts_with("kw")));
        }
        assert!(seen[2] && seen[3] && seen[4]);
    }

    #[test]
    fn per_dimension_vocabulary_is_injective() {
        for r in 1..=20 {
            let r = Dimension::new(r).unwrap();
            let vocab = per_dimension_vocabulary(r);
            let positions: Vec<u32> = vocab.iter().map(|k| u32::from(k.position(r))).collect();
            assert_eq!(positions, (0..r.get()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn uniform_subsets_spread_over_nodes() {
        // every non-empty node of the 4-cube is equally likely: 15 cells
        let mut c = config(4, 15_000, SearchKind::Pin);
        c.seed = 3;
        let mut net = build_network(c.r).unwrap();
        populate(&mut net, &c).unwrap();
        assert_eq!(net.tables()[0].object_count(), 0);
        for t in &net.tables()[1..] {
            let n = t.object_count() as f64;
            assert!((n - 1000.0).abs() < 150.0, "{}: {n}", t.node());
        }
    }

    #[test]
    fn populate_is_deterministic() {
        let c = config(6, 50, SearchKind::Superset);
        let mut a = build_network(c.r).unwrap();
        let mut b = build_network(c.r).unwrap();
        assert_eq!(populate(&mut a, &c).unwrap(), populate(&mut b, &c).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn trials_are_deterministic_and_kind_shaped() {
        let mut c = config(6, 200, SearchKind::Pin);
        c.query_count = 20;
        let mut net = build_network(c.r).unwrap();
        let log = populate(&mut net, &c).unwrap();
        let pin = run_trial(&net, &log, &c, 3);
        assert_eq!(pin, run_trial(&net, &log, &c, 3));
        assert_ne!(pin, run_trial(&net, &log, &c, 4));
        assert!(pin.iter().all(|q| q.trace.traversal.is_empty()));

        c.search_kind = SearchKind::Superset;
        for q in run_trial(&net, &log, &c, 0) {
            assert!(q.objects.len() <= 10);
        }
    }

    #[test]
    fn cell_summary_shape() {
        let mut c = config(3, 10, SearchKind::Superset);
        c.repetitions = 2;
        let out = run_cell(&c).unwrap();
        assert_eq!(out.repetitions.len(), 2);
        let row = out.summary_row();
        assert_eq!((row.nodes, row.objects, row.n), (8, 10, 2));
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, [&row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("nodes,objects,search,mean,stddev,ci_low,ci_high,n\n8,10,superset,"));
        let mut buf = Vec::new();
        write_results_csv(&mut buf, out.rows()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("nodes,objects,search,repetition,mean_hops,queries\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn single_repetition_cannot_be_summarized() {
        let mut c = config(3, 10, SearchKind::Pin);
        c.repetitions = 1;
        assert!(matches!(run_cell(&c), Err(SimError::Stats(InsufficientData(1)))));
    }
}
