//! Bit-level strings, writers and readers used by every certificate format.
//!
//! Bits are packed most-significant-first. Varints use 7-bit groups with a
//! leading continuation bit, at most ten groups.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unexpected end of bitstring at bit {0}")]
    Eof(usize),
    #[error("varint longer than 64 bits")]
    VarintOverflow,
    #[error("invalid hex bitstring: {0}")]
    Hex(String),
}

/// A packed bitstring with an exact bit length.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 1 << (7 - self.len % 8);
        }
        self.len += 1;
    }

    pub fn flip(&mut self, i: usize) {
        if i < self.len {
            self.bytes[i / 8] ^= 1 << (7 - i % 8);
        }
    }

    pub fn extend(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push(other.get(i).unwrap_or(false));
        }
    }

    /// Bits `start..end`, clamped to the string.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        let end = end.min(self.len);
        let mut out = BitString::new();
        for i in start.min(end)..end {
            out.push(self.get(i).unwrap_or(false));
        }
        out
    }

    pub fn truncate(&mut self, len: usize) {
        if len < self.len {
            *self = self.slice(0, len);
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut out = BitString::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// `LEN:HEX`, the exact bit length followed by the packed bytes.
    pub fn to_hex(&self) -> String {
        let mut s = format!("{}:", self.len);
        for b in &self.bytes {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_hex(text: &str) -> Result<Self, DecodeError> {
        let bad = || DecodeError::Hex(text.to_string());
        let (len, hex) = text.split_once(':').ok_or_else(bad)?;
        let len: usize = len.parse().map_err(|_| bad())?;
        if hex.len() % 2 != 0 || hex.len() / 2 != len.div_ceil(8) {
            return Err(bad());
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad()))
            .collect::<Result<Vec<u8>, _>>()?;
        let mut out = BitString { bytes, len };
        // Padding bits are kept zero so equality stays structural.
        if !len.is_multiple_of(8) {
            let last = out.bytes.len() - 1;
            out.bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Ok(out)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_hex())
    }
}

/// Number of bits of a fixed-width id field for `n` distinct ids (at least 1).
pub fn id_width(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Encoded size of a varint.
pub fn gamma_bits(v: u64) -> usize {
    let x = u128::from(v) + 1;
    2 * (127 - x.leading_zeros() as usize) + 1
}

pub fn varint_bits(mut v: u64) -> usize {
    let mut groups = 1;
    while v >= 0x80 {
        v >>= 7;
        groups += 1;
    }
    groups * 8
}

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    out: BitString,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn bit(&mut self, b: bool) {
        self.out.push(b);
    }

    /// Low `width` bits of `value`, most significant first.
    pub fn bits(&mut self, value: u64, width: u32) {
        debug_assert!(width == 64 || value >> width == 0, "value {value} exceeds {width} bits");
        for i in (0..width).rev() {
            self.out.push(value >> i & 1 == 1);
        }
    }

    pub fn varint(&mut self, mut v: u64) {
        loop {
            let group = v & 0x7f;
            v >>= 7;
            self.bit(v != 0);
            self.bits(group, 7);
            if v == 0 {
                break;
            }
        }
    }

    /// Elias gamma code of `v + 1`: small values take few bits.
    pub fn gamma(&mut self, v: u64) {
        let x = u128::from(v) + 1;
        let n = 127 - x.leading_zeros();
        for _ in 0..n {
            self.bit(false);
        }
        for i in (0..=n).rev() {
            self.bit(x >> i & 1 == 1);
        }
    }

    pub fn bitstring(&mut self, s: &BitString) {
        self.out.extend(s);
    }

    pub fn finish(self) -> BitString {
        self.out
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    src: &'a BitString,
    pos: usize,
    end: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(src: &'a BitString) -> Self {
        Self { src, pos: 0, end: src.len() }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.end - self.pos
    }

    pub fn is_at_end(&self) -> bool {
        self.pos == self.end
    }

    pub fn bit(&mut self) -> Result<bool, DecodeError> {
        if self.pos >= self.end {
            return Err(DecodeError::Eof(self.pos));
        }
        let b = self.src.get(self.pos).unwrap_or(false);
        self.pos += 1;
        Ok(b)
    }

    pub fn bits(&mut self, width: u32) -> Result<u64, DecodeError> {
        if self.remaining() < width as usize {
            return Err(DecodeError::Eof(self.end));
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | u64::from(self.bit()?);
        }
        Ok(v)
    }

    pub fn varint(&mut self) -> Result<u64, DecodeError> {
        let mut v = 0u64;
        for shift in (0..70).step_by(7) {
            let more = self.bit()?;
            let group = self.bits(7)?;
            if shift >= 64 || (shift > 57 && group >> (64 - shift) != 0) {
                return Err(DecodeError::VarintOverflow);
            }
            v |= group << shift;
            if !more {
                return Ok(v);
            }
        }
        Err(DecodeError::VarintOverflow)
    }

    pub fn gamma(&mut self) -> Result<u64, DecodeError> {
        let mut n = 0;
        while !self.bit()? {
            n += 1;
            if n > 64 {
                return Err(DecodeError::VarintOverflow);
            }
        }
        let mut x: u128 = 1;
        for _ in 0..n {
            x = x << 1 | u128::from(self.bit()?);
        }
        u64::try_from(x - 1).map_err(|_| DecodeError::VarintOverflow)
    }

    /// A sub-reader over the next `len` bits; the parent skips past them.
    pub fn take(&mut self, len: usize) -> Result<BitReader<'a>, DecodeError> {
        if self.remaining() < len {
            return Err(DecodeError::Eof(self.end));
        }
        let sub = BitReader { src: self.src, pos: self.pos, end: self.pos + len };
        self.pos += len;
        Ok(sub)
    }

    pub fn bitstring(&mut self, len: usize) -> Result<BitString, DecodeError> {
        if self.remaining() < len {
            return Err(DecodeError::Eof(self.end));
        }
        let s = self.src.slice(self.pos, self.pos + len);
        self.pos += len;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_round_trip() {
        let values = [0, 1, 2, 3, 7, 8, 1000, u64::MAX - 1, u64::MAX];
        let mut w = BitWriter::new();
        for &v in &values {
            w.gamma(v);
        }
        assert_eq!(w.len(), values.iter().map(|&v| gamma_bits(v)).sum::<usize>());
        let bits = w.finish();
        let mut r = BitReader::new(&bits);
        for &v in &values {
            assert_eq!(r.gamma().unwrap(), v);
        }
        assert!(r.is_at_end());
        assert_eq!(gamma_bits(0), 1);
        assert_eq!(gamma_bits(2), 3);
    }

    #[test]
    fn gamma_rejects_long_prefix() {
        let bits = BitString::from_bits(std::iter::repeat_n(false, 80));
        assert!(BitReader::new(&bits).gamma().is_err());
    }

    #[test]
    fn id_width_is_ceil_log2() {
        assert_eq!(id_width(1), 1);
        assert_eq!(id_width(2), 1);
        assert_eq!(id_width(3), 2);
        assert_eq!(id_width(4), 2);
        assert_eq!(id_width(5), 3);
        assert_eq!(id_width(1024), 10);
        assert_eq!(id_width(1025), 11);
    }

    #[test]
    fn varint_round_trip() {
        for v in [0u64, 1, 127, 128, 300, 1 << 35, u64::MAX] {
            let mut w = BitWriter::new();
            w.varint(v);
            assert_eq!(w.len(), varint_bits(v));
            let s = w.finish();
            let mut r = BitReader::new(&s);
            assert_eq!(r.varint().unwrap(), v);
            assert!(r.is_at_end());
        }
    }

    #[test]
    fn hex_round_trip_keeps_length() {
        let s = BitString::from_bits([true, false, true, true, false]);
        let h = s.to_hex();
        assert_eq!(h, "5:b0");
        assert_eq!(BitString::from_hex(&h).unwrap(), s);
        assert!(BitString::from_hex("9:ff").is_err());
        assert_eq!(BitString::from_hex("0:").unwrap(), BitString::new());
    }

    #[test]
    fn reader_errors_instead_of_panicking() {
        let s = BitString::from_bits([true; 3]);
        let mut r = BitReader::new(&s);
        assert!(r.bits(4).is_err());
        assert!(r.varint().is_err());
        let all_ones = BitString::from_bits([true; 120]);
        assert_eq!(BitReader::new(&all_ones).varint(), Err(DecodeError::VarintOverflow));
    }

    #[test]
    fn take_bounds_subreader() {
        let mut w = BitWriter::new();
        w.bits(0b1011, 4);
        w.bits(0b11, 2);
        let s = w.finish();
        let mut r = BitReader::new(&s);
        let mut sub = r.take(4).unwrap();
        assert_eq!(sub.bits(4).unwrap(), 0b1011);
        assert!(sub.bit().is_err());
        assert_eq!(r.bits(2).unwrap(), 0b11);
    }
}
