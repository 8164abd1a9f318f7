//! On-disk formats for the simulated storage medium.
//!
//! | format | layout |
//! |--------|--------|
//! | bit file (`NTCF`) | magic `NTCF`, version `0x01`, bit count `u64` LE, bits packed MSB-first, last byte zero-padded |
//! | sample file (`NTCS`) | magic `NTCS`, version `0x01`, sample count `u64` LE, samples as `f32` LE |
//! | manifest | UTF-8 `key=value` lines; blank lines and `#` comments ignored |

use crate::rs::{pack_bits, unpack_bits};
use crate::{Bit, Error, Result};

pub const BIT_MAGIC: [u8; 4] = *b"NTCF";
pub const SAMPLE_MAGIC: [u8; 4] = *b"NTCS";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 13;

fn header(magic: [u8; 4], count: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&magic);
    out.push(VERSION);
    out.extend_from_slice(&count.to_le_bytes());
    out
}

fn parse_header(bytes: &[u8], magic: [u8; 4]) -> Result<(u64, &[u8])> {
    let name = String::from_utf8_lossy(&magic).into_owned();
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("{name} header truncated")));
    }
    if bytes[..4] != magic {
        return Err(Error::Format(format!("bad magic, expected {name}")));
    }
    if bytes[4] != VERSION {
        return Err(Error::Format(format!("unsupported {name} version {}", bytes[4])));
    }
    let count = u64::from_le_bytes(bytes[5..HEADER_LEN].try_into().expect("8 bytes"));
    Ok((count, &bytes[HEADER_LEN..]))
}

pub fn is_bit_file(bytes: &[u8]) -> bool {
    bytes.starts_with(&BIT_MAGIC)
}

pub fn encode_bit_file(bits: &[Bit]) -> Vec<u8> {
    let mut out = header(BIT_MAGIC, bits.len() as u64);
    out.extend(pack_bits(bits));
    out
}

pub fn decode_bit_file(bytes: &[u8]) -> Result<Vec<Bit>> {
    let (count, payload) = parse_header(bytes, BIT_MAGIC)?;
    let expected = count.div_ceil(8);
    if payload.len() as u64 != expected {
        return Err(Error::Format(format!(
            "NTCF declares {count} bits but carries {} payload bytes",
            payload.len()
        )));
    }
    Ok(unpack_bits(payload, count as usize))
}

pub fn encode_sample_file(samples: &[f64]) -> Vec<u8> {
    let mut out = header(SAMPLE_MAGIC, samples.len() as u64);
    out.reserve(samples.len() * 4);
    for &s in samples {
        out.extend_from_slice(&(s as f32).to_le_bytes());
    }
    out
}

pub fn decode_sample_file(bytes: &[u8]) -> Result<Vec<f64>> {
    let (count, payload) = parse_header(bytes, SAMPLE_MAGIC)?;
    if payload.len() as u64 != count * 4 {
        return Err(Error::Format(format!(
            "NTCS declares {count} samples but carries {} payload bytes",
            payload.len()
        )));
    }
    payload
        .chunks_exact(4)
        .enumerate()
        .map(|(index, c)| {
            let v = f32::from_le_bytes(c.try_into().expect("4 bytes"));
            if v.is_finite() {
                Ok(v as f64)
            } else {
                Err(Error::Format(format!("sample {index} is not finite")))
            }
        })
        .collect()
}

/// Ordered `key=value` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let mut manifest = Self::default();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("manifest line {} has no `=`", line_no + 1)))?;
            manifest.set(key.trim(), value.trim());
        }
        Ok(manifest)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}
