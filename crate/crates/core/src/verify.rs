//! Exhaustive checks against brute-force oracles.
//!
//! The oracles never touch routing or index tables: query answers are
//! recomputed by scanning the publication log, and tree coverage is compared
//! against a direct filter over all `2^r` ids.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::index::{MatchRule, ObjectRef};
use crate::keyword::{Dimension, Keyword, KeywordSet, NodeId};
use crate::routing::{execute_with, route_to_responsible, Query};
use crate::sim::{
    build_network, populate, vocabulary, vocabulary_for, ExperimentConfig, ObjectKeywords, Publication, SearchKind,
    SimError, Vocabulary,
};
use crate::topology::{hamming, SubHypercube};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub detail: String,
}

impl PropertyReport {
    fn new(name: &'static str, checked: usize, failure: Option<String>) -> Self {
        Self {
            name,
            passed: failure.is_none(),
            checked,
            detail: failure.unwrap_or_default(),
        }
    }
}

/// `{o | K_o = K}` by linear scan.
pub fn scan_exact(log: &[Publication], keywords: &KeywordSet) -> Vec<ObjectRef> {
    sorted(log.iter().filter(|p| &p.keywords == keywords).map(|p| p.object.clone()))
}

/// `{o | K_o ⊇ K}` by linear scan.
pub fn scan_superset(log: &[Publication], keywords: &KeywordSet) -> Vec<ObjectRef> {
    sorted(
        log.iter()
            .filter(|p| keywords.is_subset(&p.keywords))
            .map(|p| p.object.clone()),
    )
}

fn sorted(it: impl Iterator<Item = ObjectRef>) -> Vec<ObjectRef> {
    let mut v: Vec<_> = it.collect();
    v.sort();
    v
}

/// Replaces one member of `keywords` by a different vocabulary word that
/// hashes to the same position, keeping `one(K)` unchanged.
pub fn collision_alias<R: Rng>(
    rng: &mut R,
    keywords: &KeywordSet,
    vocab: &[Keyword],
    r: Dimension,
) -> Option<KeywordSet> {
    let members: Vec<&Keyword> = keywords.iter().collect();
    let victim = *members.choose(rng)?;
    let position = victim.position(r);
    let candidates: Vec<&Keyword> = vocab
        .iter()
        .filter(|k| k.position(r) == position && !keywords.contains(k))
        .collect();
    let replacement = (*candidates.choose(rng)?).clone();
    let swapped = members
        .into_iter()
        .filter(|k| *k != victim)
        .cloned()
        .chain(std::iter::once(replacement));
    KeywordSet::new(swapped).ok()
}

/// Query keyword sets mixing vocabulary draws, subsets of published sets and
/// collision aliases of published sets.
pub fn oracle_queries(
    log: &[Publication],
    vocab: &[Keyword],
    r: Dimension,
    count: usize,
    seed: u64,
) -> Vec<KeywordSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let published = &log.choose(&mut rng).expect("non-empty log").keywords;
        let q = match out.len() % 4 {
            0 => {
                let n = rng.gen_range(1..=3usize.min(vocab.len()));
                KeywordSet::new(vocab.choose_multiple(&mut rng, n).cloned()).expect("n >= 1")
            }
            1 => published.clone(),
            2 => {
                let members: Vec<Keyword> = published.iter().cloned().collect();
                let n = rng.gen_range(1..=members.len());
                KeywordSet::new(members.choose_multiple(&mut rng, n).cloned()).expect("n >= 1")
            }
            _ => match collision_alias(&mut rng, published, vocab, r) {
                Some(alias) => alias,
                None => continue,
            },
        };
        out.push(q);
    }
    out
}

/// Pin and unlimited superset answers equal the brute-force scan as multisets.
pub fn oracle_equivalence(
    r: Dimension,
    objects: usize,
    queries: usize,
    seed: u64,
    rule: MatchRule,
) -> Result<Vec<PropertyReport>, SimError> {
    let mut config = ExperimentConfig::new(r, objects, SearchKind::Pin);
    config.seed = seed;
    // a small vocabulary makes repeated keyword sets and collisions common
    config.vocabulary = Vocabulary::Synthetic(40);
    config.keywords_per_object = ObjectKeywords::Sized(ExperimentConfig::DEFAULT_KEYWORD_RANGE);
    let mut net = build_network(r)?;
    let log = populate(&mut net, &config)?;
    let vocab = vocabulary_for(&config);
    let query_sets = oracle_queries(&log, &vocab, r, queries, seed.wrapping_add(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));

    let mut pin_failure = None;
    let mut superset_failure = None;
    let mut aliases = 0;
    for keywords in &query_sets {
        let start = net.node(rng.gen_range(0..=r.mask())).expect("in range");
        if !log.iter().any(|p| &p.keywords == keywords)
            && log.iter().any(|p| p.keywords.node_id(r) == keywords.node_id(r))
        {
            aliases += 1;
        }

        let pin = execute_with(&net, &Query::pin(keywords.clone(), start), rule);
        let mut got = pin.objects.clone();
        got.sort();
        if pin_failure.is_none() && got != scan_exact(&log, keywords) {
            pin_failure = Some(format!("pin {keywords} from {start}: {} vs oracle", got.len()));
        }

        let q = Query::superset(keywords.clone(), usize::MAX, start).expect("limit > 0");
        let sup = execute_with(&net, &q, rule);
        let mut got = sup.objects.clone();
        got.sort();
        if superset_failure.is_none() && got != scan_superset(&log, keywords) {
            superset_failure = Some(format!("superset {keywords} from {start}: {} vs oracle", got.len()));
        }
    }
    let mut pin = PropertyReport::new("pin-oracle-equivalence", query_sets.len(), pin_failure);
    if pin.passed {
        pin.detail = format!("{aliases} queries shared a node with a different keyword set");
    }
    Ok(vec![
        pin,
        PropertyReport::new("superset-oracle-equivalence", query_sets.len(), superset_failure),
    ])
}

/// Every binomial tree reaches each sub-hypercube member exactly once over
/// hypercube edges, for every root.
pub fn sbt_coverage(r: Dimension) -> PropertyReport {
    let all: Vec<NodeId> = (0..=r.mask()).map(|b| NodeId::new(b, r).expect("in range")).collect();
    let mut failure = None;
    'roots: for &root in &all {
        let sub = SubHypercube::new(root);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            if !seen.insert(v) {
                failure = Some(format!("root {root}: {v} reached twice"));
                break 'roots;
            }
            for c in sub.sbt_children(v).expect("reached nodes are members") {
                if hamming(v, c) != Ok(1) {
                    failure = Some(format!("root {root}: edge {v}-{c} is not a hypercube edge"));
                    break 'roots;
                }
                queue.push_back(c);
            }
        }
        let members: HashSet<NodeId> = all
            .iter()
            .copied()
            .filter(|w| w.bits() & root.bits() == root.bits())
            .collect();
        if seen != members {
            failure = Some(format!(
                "root {root}: reached {} of {} members",
                seen.len(),
                members.len()
            ));
            break;
        }
    }
    PropertyReport::new("sbt-spanning", all.len(), failure)
}

/// Routing hops equal `hamming(start, one(K))` for random pairs, and each hop
/// reduces the distance by one.
pub fn routing_length_law(r: Dimension, pairs: usize, seed: u64) -> Result<PropertyReport, SimError> {
    let net = build_network(r)?;
    let vocab = vocabulary(ExperimentConfig::DEFAULT_SYNTHETIC_VOCABULARY);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    for _ in 0..pairs {
        let n = rng.gen_range(1..=5);
        let keywords = KeywordSet::new(vocab.choose_multiple(&mut rng, n).cloned()).expect("n >= 1");
        let start = net.node(rng.gen_range(0..=r.mask())).expect("in range");
        let (target, path) = route_to_responsible(&net, start, &keywords);
        let expected = hamming(start, target).expect("same dimension") as usize;
        let monotone = path.windows(2).all(|w| {
            hamming(w[1], target).expect("same dimension") + 1 == hamming(w[0], target).expect("same dimension")
        });
        if path.len() - 1 != expected || !monotone || path.last() != Some(&target) {
            failure = Some(format!(
                "{keywords} from {start}: {} hops, hamming {expected}",
                path.len() - 1
            ));
            break;
        }
    }
    Ok(PropertyReport::new("routing-length-law", pairs, failure))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(r: u32) -> Dimension {
        Dimension::new(r).unwrap()
    }

    #[test]
    fn aliases_keep_the_node() {
        let vocab = vocabulary(100);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let k = KeywordSet::new(vocab[..3].iter().cloned()).unwrap();
        let alias = collision_alias(&mut rng, &k, &vocab, dim(4)).unwrap();
        assert_ne!(alias, k);
        assert_eq!(alias.node_id(dim(4)), k.node_id(dim(4)));
    }

    #[test]
    fn oracle_passes_on_real_engine() {
        for report in oracle_equivalence(dim(4), 200, 120, 7, MatchRule::Keywords).unwrap() {
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn oracle_catches_bit_matching() {
        let reports = oracle_equivalence(dim(4), 200, 120, 7, MatchRule::Bits).unwrap();
        assert!(reports.iter().all(|r| !r.passed), "{reports:?}");
    }

    #[test]
    fn sbt_and_routing_checks_pass() {
        assert!(sbt_coverage(dim(5)).passed);
        assert!(routing_length_law(dim(8), 500, 1).unwrap().passed);
    }
}
