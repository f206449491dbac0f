//! Traffic samples: multisets of packet payloads.
//!
//! A sample stores each distinct payload once together with its occurrence
//! count, plus the derived totals used throughout (packet count and summed
//! byte length). Merging samples adds counts, so parallel ingestion of
//! several capture files commutes.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RawFormatError {
    #[error("truncated record header at byte offset {offset}")]
    TruncatedHeader { offset: usize },
    #[error("truncated record body at byte offset {offset}: expected {expected} payload bytes, found {found}")]
    TruncatedBody {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A multiset of packets (byte strings) with occurrence counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrafficSample {
    packets: BTreeMap<Vec<u8>, u64>,
    total_packets: u64,
    total_bytes: u64,
}

impl TrafficSample {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` occurrences of `packet`. Adding zero occurrences is a
    /// no-op, so stored counts stay positive.
    pub fn insert(&mut self, packet: impl Into<Vec<u8>>, count: u64) {
        if count == 0 {
            return;
        }
        let packet = packet.into();
        self.total_packets += count;
        self.total_bytes += packet.len() as u64 * count;
        *self.packets.entry(packet).or_insert(0) += count;
    }

    pub fn merge(&mut self, other: &TrafficSample) {
        for (packet, &count) in &other.packets {
            self.insert(packet.clone(), count);
        }
    }

    /// Distinct payloads in byte order, with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (&[u8], u64)> + '_ {
        self.packets.iter().map(|(p, &c)| (p.as_slice(), c))
    }

    pub fn count_of(&self, packet: &[u8]) -> u64 {
        self.packets.get(packet).copied().unwrap_or(0)
    }

    /// |S|: the number of packet occurrences.
    pub fn total_packets(&self) -> u64 {
        self.total_packets
    }

    /// k: the summed payload length over all occurrences.
    pub fn total_bytes(&self) -> u64 {
        self.total_bytes
    }

    pub fn distinct_packets(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total_packets == 0
    }
}

impl FromIterator<(Vec<u8>, u64)> for TrafficSample {
    fn from_iter<T: IntoIterator<Item = (Vec<u8>, u64)>>(iter: T) -> Self {
        let mut sample = TrafficSample::new();
        for (packet, count) in iter {
            sample.insert(packet, count);
        }
        sample
    }
}

/// Parses the raw record format: each record is a 4-byte little-endian
/// payload length followed by that many payload bytes.
pub fn parse_raw(bytes: &[u8]) -> Result<TrafficSample, RawFormatError> {
    let mut sample = TrafficSample::new();
    let mut offset = 0usize;
    while offset < bytes.len() {
        if bytes.len() - offset < 4 {
            return Err(RawFormatError::TruncatedHeader { offset });
        }
        let len = u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap()) as usize;
        let body = offset + 4;
        if bytes.len() - body < len {
            return Err(RawFormatError::TruncatedBody {
                offset,
                expected: len,
                found: bytes.len() - body,
            });
        }
        sample.insert(bytes[body..body + len].to_vec(), 1);
        offset = body + len;
    }
    Ok(sample)
}

/// Serializes a sample in the raw record format. Each occurrence becomes one
/// record; distinct payloads are emitted in byte order, so output is
/// deterministic.
pub fn format_raw(sample: &TrafficSample) -> Vec<u8> {
    let mut out =
        Vec::with_capacity(sample.total_bytes() as usize + 4 * sample.total_packets() as usize);
    for (packet, count) in sample.iter() {
        for _ in 0..count {
            out.extend_from_slice(&(packet.len() as u32).to_le_bytes());
            out.extend_from_slice(packet);
        }
    }
    out
}

pub fn read_raw(path: impl AsRef<Path>) -> Result<TrafficSample, RawFormatError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| RawFormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_raw(&bytes)
}

pub fn write_raw(sample: &TrafficSample, path: impl AsRef<Path>) -> Result<(), RawFormatError> {
    let path = path.as_ref();
    std::fs::write(path, format_raw(sample)).map_err(|source| RawFormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
