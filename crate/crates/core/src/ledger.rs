//! Mock ledger adapter.
//!
//! Stands in for an IOTA Tangle client: [`MockLedger`] issues syntactically
//! valid MAM roots from a seeded generator, and fixture files pair keyword sets
//! with roots as JSON Lines: `{"keywords": [...], "root": "<81 trytes>"}`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::{ObjectRef, ROOT_LEN, TRYTE_ALPHABET};
use crate::keyword::{KeywordError, KeywordSet};

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid root {root:?}")]
    InvalidRoot { line: usize, root: String },
    #[error("line {line}: empty keywords")]
    EmptyKeywords { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Seeded generator of unique 81-tryte roots.
#[derive(Debug, Clone)]
pub struct MockLedger {
    seed: u64,
    rng: ChaCha8Rng,
    issued: u64,
    seen: HashSet<ObjectRef>,
}

impl MockLedger {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            issued: 0,
            seen: HashSet::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn issued(&self) -> u64 {
        self.issued
    }

    pub fn next_root(&mut self) -> ObjectRef {
        loop {
            let root: String = (0..ROOT_LEN)
                .map(|_| char::from(TRYTE_ALPHABET[self.rng.gen_range(0..27u32) as usize]))
                .collect();
            let root = ObjectRef::new(root).expect("alphabet and length are fixed");
            if self.seen.insert(root.clone()) {
                self.issued += 1;
                return root;
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FixtureRecord {
    keywords: Vec<String>,
    root: String,
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<Vec<(KeywordSet, ObjectRef)>, LedgerError> {
    read_fixture(BufReader::new(File::open(path)?))
}

/// Parses fixture lines in order. Blank lines are skipped.
pub fn read_fixture<R: BufRead>(input: R) -> Result<Vec<(KeywordSet, ObjectRef)>, LedgerError> {
    let mut pairs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FixtureRecord = serde_json::from_str(&line).map_err(|e| LedgerError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let keywords = KeywordSet::parse(&record.keywords).map_err(|e| match e {
            KeywordError::EmptyKeywordSet => LedgerError::EmptyKeywords { line: line_no },
            other => LedgerError::Parse {
                line: line_no,
                message: other.to_string(),
            },
        })?;
        let root = ObjectRef::new(record.root.clone()).map_err(|_| LedgerError::InvalidRoot {
            line: line_no,
            root: record.root,
        })?;
        pairs.push((keywords, root));
    }
    Ok(pairs)
}

pub fn write_fixture<'a, W, I>(mut out: W, pairs: I) -> Result<(), LedgerError>
where
    W: Write,
    I: IntoIterator<Item = &'a (KeywordSet, ObjectRef)>,
{
    for (keywords, root) in pairs {
        let record = FixtureRecord {
            keywords: keywords.to_strings(),
            root: root.as_str().to_owned(),
        };
        serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
