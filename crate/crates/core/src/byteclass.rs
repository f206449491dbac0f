//! Byte classes: sets over the 256-value byte alphabet, stored as bitmaps.
//!
//! Every transition of an [`Nfa`](crate::nfa::Nfa) carries one `ByteClass`.
//! The textual form (used by the NFA file format and DOT labels) is a
//! comma-joined list of `0xNN` singletons and `0xNN-0xMM` ranges.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A set of byte values 0..=255, represented as a 256-bit bitmap.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ByteClass([u64; 4]);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ByteClassParseError {
    #[error("empty byte-class specification")]
    Empty,
    #[error("malformed byte literal `{0}`, expected 0xNN")]
    BadLiteral(String),
    #[error("descending range `{0}`")]
    DescendingRange(String),
}

impl ByteClass {
    pub const EMPTY: ByteClass = ByteClass([0; 4]);
    pub const ALL: ByteClass = ByteClass([u64::MAX; 4]);

    pub fn single(byte: u8) -> Self {
        let mut c = Self::EMPTY;
        c.insert(byte);
        c
    }

    /// Inclusive range of bytes.
    pub fn range(lo: u8, hi: u8) -> Self {
        let mut c = Self::EMPTY;
        c.insert_range(lo, hi);
        c
    }

    pub fn contains(&self, byte: u8) -> bool {
        self.0[(byte >> 6) as usize] >> (byte & 63) & 1 == 1
    }

    pub fn insert(&mut self, byte: u8) {
        self.0[(byte >> 6) as usize] |= 1u64 << (byte & 63);
    }

    pub fn insert_range(&mut self, lo: u8, hi: u8) {
        for b in lo..=hi {
            self.insert(b);
        }
    }

    pub fn union_with(&mut self, other: &ByteClass) {
        for (w, o) in self.0.iter_mut().zip(other.0.iter()) {
            *w |= o;
        }
    }

    pub fn union(mut self, other: &ByteClass) -> ByteClass {
        self.union_with(other);
        self
    }

    /// Complement within the full byte alphabet.
    pub fn negate(&self) -> ByteClass {
        ByteClass([!self.0[0], !self.0[1], !self.0[2], !self.0[3]])
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    /// Widen over ASCII letters: for every cased letter present, insert the
    /// letter of the opposite case as well.
    pub fn ascii_case_fold(&self) -> ByteClass {
        let mut out = *self;
        for b in b'a'..=b'z' {
            if self.contains(b) {
                out.insert(b - 32);
            }
        }
        for b in b'A'..=b'Z' {
            if self.contains(b) {
                out.insert(b + 32);
            }
        }
        out
    }

    /// Smallest member byte, if any.
    pub fn first_byte(&self) -> Option<u8> {
        for (i, &word) in self.0.iter().enumerate() {
            if word != 0 {
                return Some((i * 64 + word.trailing_zeros() as usize) as u8);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0u16..256).filter_map(|b| {
            let b = b as u8;
            self.contains(b).then_some(b)
        })
    }

    /// Maximal runs of consecutive member bytes, as inclusive ranges.
    pub fn ranges(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        let mut run: Option<(u8, u8)> = None;
        for b in self.iter() {
            match run {
                Some((lo, hi)) if hi as u16 + 1 == b as u16 => run = Some((lo, b)),
                Some(done) => {
                    out.push(done);
                    run = Some((b, b));
                }
                None => run = Some((b, b)),
            }
        }
        if let Some(done) = run {
            out.push(done);
        }
        out
    }
}

impl fmt::Display for ByteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (lo, hi) in self.ranges() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if lo == hi {
                write!(f, "0x{lo:02x}")?;
            } else {
                write!(f, "0x{lo:02x}-0x{hi:02x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ByteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ByteClass({self})")
    }
}

fn parse_byte_literal(s: &str) -> Result<u8, ByteClassParseError> {
    let hex = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .ok_or_else(|| ByteClassParseError::BadLiteral(s.to_string()))?;
    if hex.is_empty() || hex.len() > 2 {
        return Err(ByteClassParseError::BadLiteral(s.to_string()));
    }
    u8::from_str_radix(hex, 16).map_err(|_| ByteClassParseError::BadLiteral(s.to_string()))
}

impl FromStr for ByteClass {
    type Err = ByteClassParseError;

    /// Parses a symbol specification: `0xNN`, `0xNN-0xMM`, or a comma-joined
    /// list of those.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ByteClassParseError::Empty);
        }
        let mut class = ByteClass::EMPTY;
        for part in s.split(',') {
            let part = part.trim();
            match part.split_once('-') {
                Some((lo, hi)) => {
                    let lo = parse_byte_literal(lo.trim())?;
                    let hi = parse_byte_literal(hi.trim())?;
                    if lo > hi {
                        return Err(ByteClassParseError::DescendingRange(part.to_string()));
                    }
                    class.insert_range(lo, hi);
                }
                None => class.insert(parse_byte_literal(part)?),
            }
        }
        Ok(class)
    }
}
