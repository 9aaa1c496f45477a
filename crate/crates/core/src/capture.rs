//! `NFB1` bitstream capture files.
//!
//! Layout, all numbers little-endian:
//!
//! | offset | size | field                                    |
//! |--------|------|------------------------------------------|
//! | 0      | 4    | magic `NFB1`                             |
//! | 4      | 4    | version (u32, currently 1)               |
//! | 8      | 8    | sample rate in Hz (f64)                  |
//! | 16     | 8    | number of bits (u64)                     |
//! | 24     | ..   | bits, 8 per byte, LSB first, 1 means +1  |
//!
//! The payload is exactly `ceil(n / 8)` bytes and unused bits of the last
//! byte are zero.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::digitizer::BitStream;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"NFB1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;

/// Pack ±1 values into bytes, LSB first.
pub fn pack_bits(bits: &[i8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b > 0 {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

fn unpack_bits(payload: &[u8], n: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if payload[i / 8] >> (i % 8) & 1 == 1 { 1 } else { -1 })
        .collect()
}

pub fn write_capture_to<W: Write>(mut w: W, bits: &BitStream) -> std::io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&bits.sample_rate_hz().to_le_bytes())?;
    w.write_all(&(bits.len() as u64).to_le_bytes())?;
    w.write_all(&pack_bits(bits.bits()))?;
    w.flush()
}

pub fn write_capture(path: impl AsRef<Path>, bits: &BitStream) -> Result<()> {
    let path = path.as_ref();
    if bits.is_empty() {
        return Err(Error::invalid("bits", "refusing to write an empty capture"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_capture_to(BufWriter::new(file), bits).map_err(|e| Error::io(path, e))
}

/// Decode a capture from an in-memory image of the whole file.
pub fn decode_capture(bytes: &[u8]) -> Result<BitStream> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        let shown = String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned();
        return Err(Error::UnsupportedFormat(format!("bad magic {shown:?}, expected \"NFB1\"")));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::CorruptFile(format!(
            "header truncated at {} of {HEADER_LEN} bytes",
            bytes.len()
        )));
    }
    let word = |at: usize| -> [u8; 8] { bytes[at..at + 8].try_into().expect("8-byte slice") };
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4-byte slice"));
    if version != VERSION {
        return Err(Error::UnsupportedFormat(format!("version {version}, expected {VERSION}")));
    }
    let rate = f64::from_le_bytes(word(8));
    let n = u64::from_le_bytes(word(16));
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::CorruptFile(format!("sample rate {rate}")));
    }
    if n == 0 {
        return Err(Error::CorruptFile("capture holds no bits".into()));
    }
    let n = usize::try_from(n).map_err(|_| Error::CorruptFile(format!("bit count {n} too large")))?;
    let payload = &bytes[HEADER_LEN..];
    let expected = n.div_ceil(8);
    if payload.len() < expected {
        return Err(Error::CorruptFile(format!(
            "payload truncated: {} of {expected} bytes",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(Error::CorruptFile(format!(
            "{} trailing bytes after payload",
            payload.len() - expected
        )));
    }
    if n % 8 != 0 && payload[expected - 1] >> (n % 8) != 0 {
        return Err(Error::CorruptFile("nonzero padding bits".into()));
    }
    BitStream::new(rate, unpack_bits(payload, n))
}

pub fn read_capture_from<R: Read>(mut r: R) -> std::io::Result<Vec<u8>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    Ok(bytes)
}

pub fn read_capture(path: impl AsRef<Path>) -> Result<BitStream> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let bytes = read_capture_from(BufReader::new(file)).map_err(|e| Error::io(path, e))?;
    decode_capture(&bytes)
}
