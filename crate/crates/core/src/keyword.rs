//! Keywords, keyword sets and their mapping onto hypercube vertices.
//!
//! A keyword hashes to one bit position in `[0, r)` with FNV-1a 64-bit reduced
//! modulo `r`. A keyword set maps to the [`NodeId`] whose set bits are exactly
//! the positions of its members. Bit position 0 is the least significant bit;
//! ids render most-significant bit first, so `1010` at `r = 4` has bits 3 and 1
//! set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeywordError {
    #[error("keyword is empty after trimming whitespace")]
    EmptyKeyword,
    #[error("keyword set is empty")]
    EmptyKeywordSet,
    #[error("dimension {0} outside 1..={max}", max = Dimension::MAX)]
    InvalidDimension(u32),
    #[error("bits {bits:#x} do not fit in {r} dimensions")]
    BitsOutOfRange { bits: u64, r: u8 },
    #[error("invalid node id string {0:?}")]
    InvalidNodeString(String),
}

/// FNV-1a, 64-bit.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET_BASIS, |hash, &b| {
        (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// A single trimmed, non-empty keyword. Case is preserved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Keyword(String);

impl Keyword {
    pub fn new(text: &str) -> Result<Self, KeywordError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(KeywordError::EmptyKeyword);
        }
        Ok(Self(trimmed.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Bit position of this keyword in an `r`-dimensional id.
    pub fn position(&self, r: Dimension) -> u8 {
        (fnv1a64(self.0.as_bytes()) % u64::from(r.get())) as u8
    }
}

impl<'de> Deserialize<'de> for Keyword {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Keyword::new(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Keyword {
    type Err = KeywordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Keyword::new(s)
    }
}

/// `hash_keyword`: position of `k` in `[0, r)`.
pub fn hash_keyword(k: &Keyword, r: Dimension) -> u8 {
    k.position(r)
}

/// A non-empty, duplicate-free set of keywords.
///
/// Ordering is lexicographic over the sorted members, which is the canonical
/// order used for index tables and snapshots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Keyword>", into = "Vec<Keyword>")]
pub struct KeywordSet(BTreeSet<Keyword>);

impl KeywordSet {
    pub fn new<I>(keywords: I) -> Result<Self, KeywordError>
    where
        I: IntoIterator<Item = Keyword>,
    {
        let set: BTreeSet<Keyword> = keywords.into_iter().collect();
        if set.is_empty() {
            return Err(KeywordError::EmptyKeywordSet);
        }
        Ok(Self(set))
    }

    /// Builds a set from raw strings, trimming each one.
    pub fn parse<I, S>(words: I) -> Result<Self, KeywordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let keywords = words
            .into_iter()
            .map(|w| Keyword::new(w.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(keywords)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Keyword> {
        self.0.iter()
    }

    pub fn contains(&self, k: &Keyword) -> bool {
        self.0.contains(k)
    }

    /// Keyword-membership containment: every member of `self` is in `other`.
    pub fn is_subset(&self, other: &KeywordSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// `one(K)`: the vertex whose set bits are the members' hash positions.
    pub fn node_id(&self, r: Dimension) -> NodeId {
        let bits = self.0.iter().fold(0u64, |acc, k| acc | (1u64 << k.position(r)));
        NodeId { bits: bits as u32, r }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|k| k.0.clone()).collect()
    }
}

impl TryFrom<Vec<Keyword>> for KeywordSet {
    type Error = KeywordError;
    fn try_from(v: Vec<Keyword>) -> Result<Self, Self::Error> {
        KeywordSet::new(v)
    }
}

impl From<KeywordSet> for Vec<Keyword> {
    fn from(set: KeywordSet) -> Self {
        set.0.into_iter().collect()
    }
}

impl fmt::Display for KeywordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(k.as_str())?;
        }
        f.write_str("}")
    }
}

/// `one(K, r)`.
pub fn one(keywords: &KeywordSet, r: Dimension) -> NodeId {
    keywords.node_id(r)
}

/// Number of hypercube dimensions, `1..=32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u8);

impl Dimension {
    pub const MAX: u32 = 32;

    pub fn new(r: u32) -> Result<Self, KeywordError> {
        if r == 0 || r > Self::MAX {
            return Err(KeywordError::InvalidDimension(r));
        }
        Ok(Self(r as u8))
    }

    pub fn get(self) -> u32 {
        u32::from(self.0)
    }

    /// Mask with the low `r` bits set.
    pub fn mask(self) -> u32 {
        if self.0 == 32 {
            u32::MAX
        } else {
            (1u32 << self.0) - 1
        }
    }

    /// `2^r`.
    pub fn node_count(self) -> u64 {
        1u64 << self.0
    }
}

impl TryFrom<u32> for Dimension {
    type Error = KeywordError;
    fn try_from(r: u32) -> Result<Self, Self::Error> {
        Dimension::new(r)
    }
}

impl From<Dimension> for u32 {
    fn from(r: Dimension) -> u32 {
        r.get()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An `r`-bit hypercube vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    bits: u32,
    r: Dimension,
}

impl NodeId {
    pub fn new(bits: u32, r: Dimension) -> Result<Self, KeywordError> {
        if bits & !r.mask() != 0 {
            return Err(KeywordError::BitsOutOfRange {
                bits: u64::from(bits),
                r: r.0,
            });
        }
        Ok(Self { bits, r })
    }

    /// Parses an MSB-first bit string; its length fixes `r`.
    pub fn parse(s: &str) -> Result<Self, KeywordError> {
        let bad = || KeywordError::InvalidNodeString(s.to_owned());
        let r = Dimension::new(s.len() as u32).map_err(|_| bad())?;
        let bits = s.bytes().try_fold(0u32, |acc, b| match b {
            b'0' => Ok(acc << 1),
            b'1' => Ok((acc << 1) | 1),
            _ => Err(bad()),
        })?;
        Ok(Self { bits, r })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn dim(self) -> Dimension {
        self.r
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn bit(self, position: u32) -> bool {
        (self.bits >> position) & 1 == 1
    }

    /// Number of set bits, `|one(u)|`.
    pub fn popcount(self) -> u32 {
        self.bits.count_ones()
    }

    /// Set bit positions in ascending order.
    pub fn ones(self) -> impl Iterator<Item = u32> {
        (0..self.r.get()).filter(move |&i| self.bit(i))
    }

    pub(crate) fn with_bits(self, bits: u32) -> Self {
        debug_assert_eq!(bits & !self.r.mask(), 0);
        Self { bits, r: self.r }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.r.get()).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for NodeId {
    type Err = KeywordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeId::parse(s)
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        NodeId::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(r: u32) -> Dimension {
        Dimension::new(r).unwrap()
    }

    fn kw(s: &str) -> Keyword {
        Keyword::new(s).unwrap()
    }

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
        assert_eq!(fnv1a64("Bologna".as_bytes()), 0x844d6aeb388c129d);
    }

    #[test]
    fn position_is_stable_and_bounded() {
        assert_eq!(hash_keyword(&kw("Bologna"), dim(4)), 1);
        assert_eq!(hash_keyword(&kw("Bologna"), dim(13)), 8);
        assert_eq!(
            hash_keyword(&kw("Bologna"), dim(4)),
            hash_keyword(&kw("Bologna"), dim(4))
        );
        for w in ["a", "Celsius", "San Donato", "kw0042"] {
            assert_eq!(hash_keyword(&kw(w), dim(1)), 0);
        }
    }

    #[test]
    fn marketplace_vocabulary_fixture() {
        // Bologna and Temperature collide at r = 4 (both land on bit 1).
        let r = dim(4);
        assert_eq!(kw("San Donato").position(r), 2);
        assert_eq!(kw("Celsius").position(r), 3);
        let k = KeywordSet::parse(["Bologna", "Temperature"]).unwrap();
        assert_eq!(one(&k, r).to_string(), "0010");
        let k = KeywordSet::parse(["Bologna", "San Donato", "Celsius"]).unwrap();
        assert_eq!(one(&k, r).to_string(), "1110");
    }

    #[test]
    fn one_is_union_of_positions() {
        let r = dim(4);
        // "a" hashes to 0 at r = 4; find a word on bit 2 for the single-bit case
        let two = (0..)
            .map(|i| kw(&format!("w{i}")))
            .find(|k| k.position(r) == 2)
            .unwrap();
        let other_two = (0..)
            .map(|i| kw(&format!("v{i}")))
            .find(|k| k.position(r) == 2)
            .unwrap();
        let single = KeywordSet::new([two.clone()]).unwrap();
        assert_eq!(one(&single, r).to_string(), "0100");
        let collided = KeywordSet::new([two, other_two]).unwrap();
        assert_eq!(one(&collided, r).to_string(), "0100");
    }

    #[test]
    fn keyword_normalization() {
        assert_eq!(kw("  Bologna \t").as_str(), "Bologna");
        assert_ne!(kw("Bologna"), kw("bologna"));
        assert_eq!(Keyword::new("   "), Err(KeywordError::EmptyKeyword));
    }

    #[test]
    fn empty_set_rejected() {
        assert_eq!(KeywordSet::new([]), Err(KeywordError::EmptyKeywordSet));
        assert_eq!(
            KeywordSet::parse(Vec::<String>::new()),
            Err(KeywordError::EmptyKeywordSet)
        );
    }

    #[test]
    fn set_semantics() {
        let a = KeywordSet::parse(["x", "y", "x"]).unwrap();
        let b = KeywordSet::parse(["y", " x"]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_eq!(one(&a, dim(8)), one(&b, dim(8)));
    }

    #[test]
    fn dimension_bounds() {
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(33).is_err());
        assert_eq!(dim(32).mask(), u32::MAX);
        assert_eq!(dim(7).node_count(), 128);
    }

    #[test]
    fn node_id_text_is_msb_first() {
        let u = NodeId::parse("1010").unwrap();
        assert_eq!(u.bits(), 0b1010);
        assert!(u.bit(3) && u.bit(1) && !u.bit(0));
        assert_eq!(u.to_string(), "1010");
        assert_eq!(u.ones().collect::<Vec<_>>(), vec![1, 3]);
        assert!(NodeId::parse("10a0").is_err());
        assert!(NodeId::parse("").is_err());
        assert!(NodeId::new(0b10000, dim(4)).is_err());
    }

    #[test]
    fn uniformity_smoke() {
        use rand::{Rng, SeedableRng};
        let r = dim(13);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0u32; 13];
        for _ in 0..10_000 {
            let len = rng.gen_range(3..12);
            let word: String = (0..len).map(|_| char::from(rng.gen_range(b'a'..=b'z'))).collect();
            counts[usize::from(kw(&word).position(r))] += 1;
        }
        let expected = 10_000.0 / 13.0;
        for c in counts {
            let c = f64::from(c);
            assert!((c - expected).abs() <= 0.25 * expected, "{counts:?}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn order_insensitive(words in proptest::collection::vec("[a-z]{1,8}", 1..8), r in 1u32..=32) {
                let r = Dimension::new(r).unwrap();
                let fwd = KeywordSet::parse(&words).unwrap();
                let rev = KeywordSet::parse(words.iter().rev()).unwrap();
                prop_assert_eq!(one(&fwd, r), one(&rev, r));
            }

            #[test]
            fn popcount_bounded_by_set_size(words in proptest::collection::vec("[a-z]{1,8}", 1..8), r in 1u32..=32) {
                let r = Dimension::new(r).unwrap();
                let set = KeywordSet::parse(&words).unwrap();
                let id = one(&set, r);
                let distinct: BTreeSet<u8> = set.iter().map(|k| k.position(r)).collect();
                prop_assert!(id.popcount() as usize <= set.len());
                prop_assert_eq!(id.popcount() as usize == set.len(), distinct.len() == set.len());
            }

            #[test]
            fn node_string_round_trip(bits in any::<u32>(), r in 1u32..=32) {
                let r = Dimension::new(r).unwrap();
                let id = NodeId::new(bits & r.mask(), r).unwrap();
                prop_assert_eq!(NodeId::parse(&id.to_string()).unwrap(), id);
            }
        }
    }
}
