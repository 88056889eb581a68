//! Bit strings and their hex text form.
//!
//! The text form packs the bits MSB-first into the smallest whole number of
//! hex digits, right-aligned: the unused high bits of the first digit are
//! zero. A 30-bit message is therefore 8 hex digits with the top 2 bits clear.
//! The bit length always travels separately.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_binary_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("'{other}' is not a binary digit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bools)
    }

    /// Big-endian binary representation of `value` in exactly `width` bits.
    pub fn from_uint(value: u128, width: usize) -> Self {
        let bits = (0..width)
            .rev()
            .map(|shift| shift < 128 && (value >> shift) & 1 == 1)
            .collect();
        Self { bits }
    }

    /// Reads the bits as a big-endian unsigned integer. `None` past 128 bits.
    pub fn to_uint(&self) -> Option<u128> {
        if self.bits.len() > 128 {
            return None;
        }
        Some(
            self.bits
                .iter()
                .fold(0u128, |acc, &b| (acc << 1) | u128::from(b)),
        )
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString::from_bools(self.bits[start..end].to_vec())
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    pub fn set(&mut self, index: usize, bit: bool) {
        self.bits[index] = bit;
    }

    pub fn flip(&mut self, index: usize) {
        self.bits[index] = !self.bits[index];
    }

    pub fn complement(&self) -> BitString {
        BitString::from_bools(self.bits.iter().map(|b| !b).collect())
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of positions where the two strings differ. Lengths must match.
    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::invalid(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self.iter().zip(other.iter()).filter(|(a, b)| a != b).count())
    }

    /// Hex text form, `ceil(len / 4)` digits, right-aligned.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        let pad = digits * 4 - self.len();
        let mut out = String::with_capacity(digits);
        let mut nibble = 0u8;
        for (i, bit) in std::iter::repeat_n(false, pad)
            .chain(self.iter())
            .enumerate()
        {
            nibble = (nibble << 1) | u8::from(bit);
            if i % 4 == 3 {
                out.push(char::from_digit(u32::from(nibble), 16).unwrap());
                nibble = 0;
            }
        }
        out
    }

    /// Parses the hex text form for a string of exactly `len` bits.
    ///
    /// Extra leading digits are accepted as long as every bit above `len` is
    /// zero, so byte-aligned producers interoperate.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        let hex = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        let mut all = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidHex(format!("'{c}' is not a hex digit")))?;
            all.extend((0..4).rev().map(|s| (v >> s) & 1 == 1));
        }
        if all.len() < len {
            return Err(Error::InvalidHex(format!(
                "{} hex digits hold {} bits, need {len}",
                hex.len(),
                all.len()
            )));
        }
        let excess = all.len() - len;
        if all[..excess].iter().any(|&b| b) {
            return Err(Error::InvalidHex(format!(
                "nonzero bits above bit length {len}"
            )));
        }
        Ok(Self::from_bools(all.split_off(excess)))
    }

    /// Packs into `ceil(len / 8)` bytes, right-aligned like the hex form.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let bytes = self.len().div_ceil(8);
        let pad = bytes * 8 - self.len();
        let mut out = vec![0u8; bytes];
        for (i, bit) in std::iter::repeat_n(false, pad)
            .chain(self.iter())
            .enumerate()
        {
            if bit {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }
}

impl Index<usize> for BitString {
    type Output = bool;

    fn index(&self, index: usize) -> &bool {
        &self.bits[index]
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bools(iter.into_iter().collect())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}b:{})", self.len(), self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Serialized as `{ "bits": <len>, "hex": "<digits>" }`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HexForm {
    bits: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        HexForm {
            bits: self.len(),
            hex: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let form = HexForm::deserialize(deserializer)?;
        BitString::from_hex(&form.hex, form.bits).map_err(serde::de::Error::custom)
    }
}
