//! Subsets of a data universe as vertices of the Boolean cube `{0,1}^n`.
//!
//! Bit `i` of a [`PointSet`] marks data point `i` as included. Universes are
//! capped at [`MAX_UNIVERSE`] points so a vertex fits in one machine word.
//! The textual form is a fixed-length string of `'0'`/`'1'` whose leftmost
//! character is bit 0, e.g. `"1010111"`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported universe (number of data points).
pub const MAX_UNIVERSE: usize = 64;

/// Largest universe for routines that enumerate the whole cube.
pub const MAX_ENUMERATION: usize = 25;

/// A vertex of the `n`-cube: the subset of `{0, .., n-1}` whose bits are set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    bits: u64,
    n: u8,
}

#[inline]
fn universe_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PointSet {
    fn check_universe(n: usize) -> Result<()> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge {
                n,
                max: MAX_UNIVERSE,
            });
        }
        Ok(())
    }

    /// The empty subset (bottom of the cube).
    pub fn empty(n: usize) -> Result<Self> {
        Self::check_universe(n)?;
        Ok(Self {
            bits: 0,
            n: n as u8,
        })
    }

    /// The full subset (top of the cube).
    pub fn full(n: usize) -> Result<Self> {
        Self::check_universe(n)?;
        Ok(Self {
            bits: universe_mask(n),
            n: n as u8,
        })
    }

    /// Builds a set from a raw bitmask. Bits at positions `>= n` must be clear.
    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        Self::check_universe(n)?;
        if bits & !universe_mask(n) != 0 {
            return Err(Error::BitsOutOfUniverse { bits, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Builds a set from a list of member indices.
    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for &i in indices {
            set = set.with(i)?;
        }
        Ok(set)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Universe size.
    #[inline]
    pub fn universe(&self) -> usize {
        self.n as usize
    }

    /// Number of members (the Hamming weight / 1-norm of the vertex).
    #[inline]
    pub fn level(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.bits == universe_mask(self.universe())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.universe() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.universe(),
            });
        }
        Ok(())
    }

    fn check_same_universe(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::UniverseMismatch {
                left: self.universe(),
                right: other.universe(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe() && (self.bits >> i) & 1 == 1
    }

    /// Toggles membership of `i`; an involution.
    pub fn flip(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        Ok(Self {
            bits: self.bits ^ (1u64 << i),
            n: self.n,
        })
    }

    pub fn with(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        Ok(Self {
            bits: self.bits | (1u64 << i),
            n: self.n,
        })
    }

    pub fn without(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        Ok(Self {
            bits: self.bits & !(1u64 << i),
            n: self.n,
        })
    }

    /// Number of positions where the two vertices differ.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_same_universe(other)?;
        Ok((self.bits ^ other.bits).count_ones() as usize)
    }

    /// True iff every member of `self` is a member of `other`, i.e. `self`
    /// lies in the downward shadow of `other`.
    pub fn is_below(&self, other: &Self) -> Result<bool> {
        self.check_same_universe(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_same_universe(other)?;
        Ok(Self {
            bits: self.bits & other.bits,
            n: self.n,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same_universe(other)?;
        Ok(Self {
            bits: self.bits | other.bits,
            n: self.n,
        })
    }

    /// Members of the universe not in `self`.
    pub fn complement(&self) -> Self {
        Self {
            bits: !self.bits & universe_mask(self.universe()),
            n: self.n,
        }
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> Members {
        Members { bits: self.bits }
    }

    /// Excluded indices in ascending order.
    pub fn non_members(&self) -> Members {
        self.complement().members()
    }
}

/// Ascending iterator over set bits.
#[derive(Clone, Debug)]
pub struct Members {
    bits: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let i = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.bits.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Members {}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.universe() {
            f.write_str(if self.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSet({self})")
    }
}

impl FromStr for PointSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        Self::check_universe(n)?;
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1u64 << i,
                '0' => {}
                _ => return Err(Error::Parse(format!("invalid bit string {s:?}"))),
            }
        }
        Ok(Self { bits, n: n as u8 })
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All vertices of the `n`-cube in ascending bitmask order.
pub fn vertices(n: usize) -> Result<impl Iterator<Item = PointSet>> {
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    Ok((0u64..(1u64 << n)).map(move |bits| PointSet { bits, n: n as u8 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PointSet {
        s.parse().unwrap()
    }

    #[test]
    fn level_examples() {
        assert_eq!(ps("1010111").level(), 5);
        assert_eq!(PointSet::empty(7).unwrap().level(), 0);
        assert_eq!(PointSet::full(9).unwrap().level(), 9);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(ps("1010111").hamming(&ps("1010111")).unwrap(), 0);
        assert_eq!(ps("1110").hamming(&ps("0110")).unwrap(), 1);
        assert_eq!(ps("11110000").hamming(&ps("00001111")).unwrap(), 8);
        assert!(matches!(
            ps("111").hamming(&ps("1111")),
            Err(Error::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn is_below_examples() {
        assert!(ps("0010101").is_below(&ps("1010111")).unwrap());
        assert!(!ps("0100000").is_below(&ps("1010111")).unwrap());
        let z = ps("1010111");
        assert!(z.is_below(&z).unwrap());
        assert!(ps("01").is_below(&ps("011")).is_err());
    }

    #[test]
    fn flip_examples() {
        assert_eq!(ps("0000").flip(0).unwrap(), ps("1000"));
        assert_eq!(ps("1010111").flip(1).unwrap(), ps("1110111"));
        let x = ps("1010111");
        assert_eq!(x.flip(4).unwrap().flip(4).unwrap(), x);
        assert!(matches!(
            x.flip(7),
            Err(Error::IndexOutOfRange { index: 7, n: 7 })
        ));
    }

    #[test]
    fn string_form_is_leftmost_bit_zero() {
        let x = ps("1010111");
        assert_eq!(x.members().collect::<Vec<_>>(), vec![0, 2, 4, 5, 6]);
        assert_eq!(x.non_members().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(x.to_string(), "1010111");
        assert!("10a1".parse::<PointSet>().is_err());
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"1010111\"");
        assert_eq!(serde_json::from_str::<PointSet>(&json).unwrap(), x);
    }

    #[test]
    fn universe_caps() {
        assert!(PointSet::full(64).unwrap().is_full());
        assert!(PointSet::empty(65).is_err());
        assert!(PointSet::from_bits(0b1000, 3).is_err());
        assert!(vertices(26).is_err());
        assert_eq!(vertices(4).unwrap().count(), 16);
    }

    #[test]
    fn hamming_is_a_metric_exhaustive() {
        let n = 6;
        let all: Vec<_> = vertices(n).unwrap().collect();
        for x in &all {
            for y in &all {
                let dxy = x.hamming(y).unwrap();
                assert_eq!(dxy, y.hamming(x).unwrap());
                assert_eq!(dxy == 0, x == y);
                for z in &all {
                    assert!(x.hamming(z).unwrap() <= dxy + y.hamming(z).unwrap());
                }
            }
        }
    }

    #[test]
    fn is_below_is_transitive_exhaustive() {
        let n = 5;
        let all: Vec<_> = vertices(n).unwrap().collect();
        for x in &all {
            for z in all.iter().filter(|z| x.is_below(z).unwrap()) {
                for w in all.iter().filter(|w| z.is_below(w).unwrap()) {
                    assert!(x.is_below(w).unwrap());
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_set() -> impl Strategy<Value = PointSet> {
            (1usize..=64).prop_flat_map(|n| {
                any::<u64>()
                    .prop_map(move |b| PointSet::from_bits(b & universe_mask(n), n).unwrap())
            })
        }

        proptest! {
            #[test]
            fn flip_changes_level_by_one(x in arb_set(), i in 0usize..64) {
                let i = i % x.universe();
                let y = x.flip(i).unwrap();
                prop_assert_eq!(x.level().abs_diff(y.level()), 1);
                prop_assert_eq!(y.flip(i).unwrap(), x);
            }

            #[test]
            fn string_round_trip(x in arb_set()) {
                prop_assert_eq!(x.to_string().parse::<PointSet>().unwrap(), x);
            }
        }
    }
}
