//! The bit-sequence type shared by generators and statistical tests, plus
//! its two file formats:
//!
//! * ASCII — one character per bit ('0'/'1'), all whitespace ignored on
//!   read, wrapped at 64 columns on write. The default interchange format.
//! * RAW — packed bytes, most significant bit first, zero-padded in the
//!   last byte; the exact bit count travels out of band (CLI flag).

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

/// An ordered sequence of bits. Stored one value per byte (0 or 1), which
/// keeps the statistical tests simple and cheap to index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bitstream {
    bits: Vec<u8>,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n_bits: usize) -> Self {
        Self { bits: Vec::with_capacity(n_bits) }
    }

    /// Builds from anything yielding 0/1 values.
    pub fn from_bits<I: IntoIterator<Item = u8>>(iter: I) -> Result<Self> {
        let mut bs = Bitstream::new();
        for (i, b) in iter.into_iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidParam(format!("bit {i} has value {b}, expected 0 or 1")));
            }
            bs.bits.push(b);
        }
        Ok(bs)
    }

    /// Convenience constructor from a '0'/'1' literal (whitespace ignored).
    pub fn from_ascii_str(s: &str) -> Result<Self> {
        Self::read_ascii(s.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn push_bit(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit & 1);
    }

    /// Appends the 32 bits of `word`, most significant bit first.
    pub fn push_word_msb(&mut self, word: u32) {
        for shift in (0..32).rev() {
            self.bits.push(((word >> shift) & 1) as u8);
        }
    }

    pub fn truncate(&mut self, n_bits: usize) {
        self.bits.truncate(n_bits);
    }

    /// Bitwise complement (used by the symmetry tests).
    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|&b| 1 - b).collect() }
    }

    /// Parses the ASCII format: '0'/'1' kept, whitespace skipped, anything
    /// else is a format error carrying its byte offset.
    pub fn read_ascii<R: Read>(reader: R) -> Result<Self> {
        let mut bs = Bitstream::new();
        let mut reader = BufReader::new(reader);
        let mut offset = 0usize;
        loop {
            let buf = reader.fill_buf()?;
            if buf.is_empty() {
                break;
            }
            for &byte in buf {
                match byte {
                    b'0' => bs.bits.push(0),
                    b'1' => bs.bits.push(1),
                    b if b.is_ascii_whitespace() => {}
                    b => return Err(Error::Format { offset, byte: b }),
                }
                offset += 1;
            }
            let consumed = buf.len();
            reader.consume(consumed);
        }
        Ok(bs)
    }

    /// Writes the ASCII format, 64 bits per line.
    pub fn write_ascii<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        for chunk in self.bits.chunks(64) {
            let line: String = chunk.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
            writeln!(writer, "{line}")?;
        }
        Ok(())
    }

    /// Parses the RAW format: packed bytes, MSB first. `n_bits` limits the
    /// result; `None` means all 8·len bits.
    pub fn read_raw<R: Read>(reader: R, n_bits: Option<usize>) -> Result<Self> {
        let mut bytes = Vec::new();
        BufReader::new(reader).read_to_end(&mut bytes)?;
        let available = bytes.len() * 8;
        let n = n_bits.unwrap_or(available);
        if n > available {
            return Err(Error::InvalidParam(format!(
                "requested {n} bits but the file holds only {available}"
            )));
        }
        let mut bs = Bitstream::with_capacity(n);
        for i in 0..n {
            let byte = bytes[i / 8];
            bs.bits.push((byte >> (7 - i % 8)) & 1);
        }
        Ok(bs)
    }

    /// Writes the RAW format. The final partial byte, if any, is padded
    /// with zero bits.
    pub fn write_raw<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        let mut out = Vec::with_capacity(self.bits.len().div_ceil(8));
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                byte |= b << (7 - i);
            }
            out.push(byte);
        }
        writer.write_all(&out)
    }
}

impl std::ops::Index<usize> for Bitstream {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_parse_skips_whitespace_and_reports_bad_bytes() {
        let bs = Bitstream::from_ascii_str("10 1\n1\t0").unwrap();
        assert_eq!(bs.as_slice(), &[1, 0, 1, 1, 0]);

        let err = Bitstream::from_ascii_str("101x01").unwrap_err();
        match err {
            Error::Format { offset, byte } => {
                assert_eq!(offset, 3);
                assert_eq!(byte, b'x');
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn raw_round_trip_preserves_exact_length() {
        let bs = Bitstream::from_ascii_str("110100101").unwrap();
        let mut buf = Vec::new();
        bs.write_raw(&mut buf).unwrap();
        assert_eq!(buf.len(), 2);
        let back = Bitstream::read_raw(&buf[..], Some(9)).unwrap();
        assert_eq!(back, bs);
        // Without the explicit count the zero padding is surfaced.
        let untrimmed = Bitstream::read_raw(&buf[..], None).unwrap();
        assert_eq!(untrimmed.len(), 16);
        assert_eq!(&untrimmed.as_slice()[..9], bs.as_slice());
    }

    #[test]
    fn word_push_is_msb_first() {
        let mut bs = Bitstream::new();
        bs.push_word_msb(0x8000_0001);
        assert_eq!(bs[0], 1);
        assert_eq!(bs[31], 1);
        assert_eq!(bs.ones(), 2);
    }

    #[test]
    fn raw_read_rejects_overlong_request() {
        assert!(Bitstream::read_raw(&[0xFFu8][..], Some(9)).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ascii_round_trip(bits in proptest::collection::vec(0u8..=1, 0..512)) {
                let bs = Bitstream::from_bits(bits).unwrap();
                let mut buf = Vec::new();
                bs.write_ascii(&mut buf).unwrap();
                let back = Bitstream::read_ascii(&buf[..]).unwrap();
                prop_assert_eq!(back, bs);
            }

            #[test]
            fn raw_round_trip(bits in proptest::collection::vec(0u8..=1, 0..512)) {
                let bs = Bitstream::from_bits(bits).unwrap();
                let mut buf = Vec::new();
                bs.write_raw(&mut buf).unwrap();
                let back = Bitstream::read_raw(&buf[..], Some(bs.len())).unwrap();
                prop_assert_eq!(back, bs);
            }
        }
    }
}
