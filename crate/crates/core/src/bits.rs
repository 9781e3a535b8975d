//! Input and outcome words plus the long bit strings used for parity
//! functions and truth tables.
//!
//! Party `i` (1-based) lives at bit position `i - 1` of every word, so party 1
//! is the least significant bit.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub const MIN_PARTIES: usize = 2;
pub const MAX_PARTIES: usize = 12;

fn check_word(m: usize, bits: u32) -> Result<()> {
    if m == 0 || m > MAX_PARTIES {
        return Err(Error::PartyCount { m, min: 1, max: MAX_PARTIES });
    }
    if (bits as u64) >> m != 0 {
        return Err(Error::Dimension(format!("word {bits:#x} does not fit {m} parties")));
    }
    Ok(())
}

/// Measurement settings `(x_1, ..., x_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputVector {
    m: usize,
    bits: u32,
}

impl InputVector {
    pub fn new(m: usize, bits: u32) -> Result<Self> {
        check_word(m, bits)?;
        Ok(Self { m, bits })
    }

    /// Builds from per-party bits, party 1 first.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        Self::new(bits.len(), pack(bits)?)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Setting of 1-based party `i`.
    pub fn get(&self, i: usize) -> u8 {
        ((self.bits >> (i - 1)) & 1) as u8
    }

    /// Every party's setting flipped.
    pub fn complement(&self) -> Self {
        Self { m: self.m, bits: !self.bits & full_mask(self.m) }
    }

    pub fn all(m: usize) -> impl Iterator<Item = InputVector> {
        (0..1u32 << m).map(move |bits| InputVector { m, bits })
    }
}

/// Outcomes `(a_1, ..., a_m)` in bit form; `A_i = (-1)^{a_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeVector {
    m: usize,
    bits: u32,
}

impl OutcomeVector {
    pub fn new(m: usize, bits: u32) -> Result<Self> {
        check_word(m, bits)?;
        Ok(Self { m, bits })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        Self::new(bits.len(), pack(bits)?)
    }

    /// Inverse of [`OutcomeVector::signed`]; entries must be `+1` or `-1`.
    pub fn from_signed(signs: &[i8]) -> Result<Self> {
        let bits = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(0),
                -1 => Ok(1),
                _ => Err(Error::InvalidParams(format!("outcome sign {s} is not ±1"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        ((self.bits >> (i - 1)) & 1) as u8
    }

    /// `A_i = (-1)^{a_i}` for each party.
    pub fn signed(&self) -> Vec<i8> {
        (1..=self.m).map(|i| if self.get(i) == 0 { 1 } else { -1 }).collect()
    }

    pub fn parity(&self) -> u8 {
        parity(self.bits)
    }
}

fn pack(bits: &[u8]) -> Result<u32> {
    bits.iter().enumerate().try_fold(0u32, |acc, (i, &b)| match b {
        0 => Ok(acc),
        1 => Ok(acc | 1 << i),
        _ => Err(Error::InvalidParams(format!("bit value {b} at position {i}"))),
    })
}

/// `Σ_i a_i mod 2`.
pub fn parity(word: u32) -> u8 {
    (word.count_ones() & 1) as u8
}

pub fn full_mask(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// `(-1)^{bit}` as an integer.
pub(crate) fn sign_of(bit: u8) -> i64 {
    1 - 2 * bit as i64
}

/// A fixed-length bit string, stored little-endian in 64-bit limbs.
///
/// Used for parity functions (`2^m` bits, one per input word) and for party
/// truth tables. Ordering compares the strings as unsigned integers with the
/// highest position most significant, which is also the order of their hex
/// rendering.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    limbs: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        Self { len, limbs: vec![0; len.div_ceil(64).max(1)] }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut w = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                w.set(i, true);
            }
        }
        w
    }

    pub fn from_limbs(len: usize, mut limbs: Vec<u64>) -> Self {
        limbs.resize(len.div_ceil(64).max(1), 0);
        let mut w = Self { len, limbs };
        w.clear_tail();
        w
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            let last = self.limbs.len() - 1;
            self.limbs[last] &= (1u64 << r) - 1;
        } else if self.len == 0 {
            self.limbs[0] = 0;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitWord) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    /// All bits flipped.
    pub fn not(&self) -> Self {
        let mut w = Self { len: self.len, limbs: self.limbs.iter().map(|l| !l).collect() };
        w.clear_tail();
        w
    }

    pub fn count_ones(&self) -> u32 {
        self.limbs.iter().map(|l| l.count_ones()).sum()
    }

    pub fn hamming(&self, other: &BitWord) -> u32 {
        self.limbs.iter().zip(&other.limbs).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    /// Big-endian hex, zero padded to `ceil(len / 4)` digits (at least one).
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut nibble = 0u32;
                for b in 0..4 {
                    let i = 4 * d + b;
                    if i < self.len && self.get(i) {
                        nibble |= 1 << b;
                    }
                }
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    /// Parses big-endian hex (optional `0x` prefix); bits beyond `len` must be zero.
    pub fn from_hex(len: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
        if s.is_empty() {
            return Err(Error::Parse("empty hex word".into()));
        }
        let mut w = Self::zeros(len);
        for (d, c) in s.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit `{c}`")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let i = 4 * d + b;
                    if i >= len {
                        return Err(Error::Parse(format!("hex word `{s}` exceeds {len} bits")));
                    }
                    w.set(i, true);
                }
            }
        }
        Ok(w)
    }
}

impl Ord for BitWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for BitWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({}; 0x{})", self.len, self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parity_examples() {
        assert_eq!(parity(0b0000), 0);
        assert_eq!(OutcomeVector::from_bits(&[1, 1, 1, 0]).unwrap().parity(), 1);
        assert_eq!(parity(0b1111), 0);
    }

    #[test]
    fn party_one_is_lsb() {
        let x = InputVector::from_bits(&[1, 0, 0]).unwrap();
        assert_eq!(x.bits(), 1);
        assert_eq!(x.get(1), 1);
        assert_eq!(x.complement().bits(), 0b110);
    }

    #[test]
    fn rejects_oversized_words() {
        assert!(InputVector::new(3, 8).is_err());
        assert!(OutcomeVector::new(13, 0).is_err());
    }

    #[test]
    fn hex_rendering() {
        let w = BitWord::from_fn(16, |i| i == 0 || i == 15);
        assert_eq!(w.to_hex(), "8001");
        assert_eq!(BitWord::from_hex(16, "0x8001").unwrap(), w);
        assert_eq!(BitWord::from_fn(2, |_| true).to_hex(), "3");
        assert!(BitWord::from_hex(2, "4").is_err());
    }

    #[test]
    fn ordering_is_numeric() {
        let lo = BitWord::from_fn(128, |i| i < 64);
        let hi = BitWord::from_fn(128, |i| i == 64);
        assert!(lo < hi);
    }

    proptest! {
        #[test]
        fn signed_round_trip(bits in 0u32..4096) {
            let a = OutcomeVector::new(12, bits).unwrap();
            prop_assert_eq!(OutcomeVector::from_signed(&a.signed()).unwrap(), a);
        }

        #[test]
        fn hex_round_trip(limbs in proptest::collection::vec(any::<u64>(), 2), len in 1usize..128) {
            let w = BitWord::from_limbs(len, limbs);
            prop_assert_eq!(BitWord::from_hex(len, &w.to_hex()).unwrap(), w);
        }
    }
}
