use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{GptError, Result};

pub const MAX_LEN: usize = 64;

/// A bit string of length at most 64. Bit `i` of `bits` is the `i`-th
/// character; bits past `len` are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: u64,
    len: u8,
}

fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl BitString {
    pub const EMPTY: BitString = BitString { bits: 0, len: 0 };

    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(GptError::TooLong { len });
        }
        Ok(Self {
            bits: bits & mask(len),
            len: len as u8,
        })
    }

    /// The `len`-bit string whose `i`-th character is bit `len − 1 − i` of
    /// `value`, so strings of one length enumerate in numeric order.
    pub fn from_index(value: u64, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(GptError::TooLong { len });
        }
        let mut bits = 0;
        for i in 0..len {
            if value >> (len - 1 - i) & 1 == 1 {
                bits |= 1 << i;
            }
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        i < self.len() && self.bits >> i & 1 == 1
    }

    pub fn prefix(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            bits: self.bits & mask(len),
            len: len as u8,
        }
    }

    pub fn push(&self, bit: bool) -> Result<Self> {
        if self.len() == MAX_LEN {
            return Err(GptError::TooLong { len: MAX_LEN + 1 });
        }
        Ok(Self {
            bits: self.bits | (bit as u64) << self.len,
            len: self.len + 1,
        })
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && other.prefix(self.len()) == *self
    }

    /// Whether truncating the longer string to the shorter one's length
    /// makes them equal.
    pub fn compatible(&self, other: &BitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// All strings of length `len`, in numeric order.
    pub fn all_of_length(len: usize) -> Result<Vec<BitString>> {
        if len > 30 {
            return Err(GptError::TooLarge {
                what: "enumerated length",
                value: len,
                cap: 30,
            });
        }
        (0..1u64 << len).map(|v| Self::from_index(v, len)).collect()
    }

    /// All strings of length at most `len`, shortest first.
    pub fn all_up_to(len: usize) -> Result<Vec<BitString>> {
        let mut out = Vec::new();
        for l in 0..=len {
            out.extend(Self::all_of_length(l)?);
        }
        Ok(out)
    }
}

impl Ord for BitString {
    /// Shorter strings first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.bits.reverse_bits().cmp(&other.bits.reverse_bits()))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_LEN {
            return Err(GptError::TooLong { len: s.len() });
        }
        let mut out = BitString::EMPTY;
        for c in s.chars() {
            out = match c {
                '0' => out.push(false)?,
                '1' => out.push(true)?,
                _ => return Err(GptError::Parse(format!("not a bit string: {s:?}"))),
            };
        }
        Ok(out)
    }
}
