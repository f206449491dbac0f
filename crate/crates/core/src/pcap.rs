//! Classic libpcap capture reader: extracts TCP/UDP payloads as the packet
//! words of a [`TrafficSample`].
//!
//! Only the classic format is handled (magic `0xa1b2c3d4`, microsecond or
//! nanosecond variant, either byte order) with the Ethernet link type.
//! Frames are parsed Ethernet → IPv4/IPv6 → TCP/UDP; a single 802.1Q VLAN
//! tag is unwrapped. Frames without a parseable L4 payload (non-IP
//! ethertypes, other protocols, non-first fragments, malformed headers) are
//! tallied as skipped rather than failing the whole capture. Payloads are
//! taken per frame with no stream reassembly, and empty payloads are kept:
//! they are the empty word.

use std::path::Path;

use thiserror::Error;

use crate::traffic::TrafficSample;

const MAGIC_US: u32 = 0xa1b2_c3d4;
const MAGIC_NS: u32 = 0xa1b2_3c4d;
const LINKTYPE_ETHERNET: u32 = 1;

#[derive(Debug, Error)]
pub enum PcapError {
    #[error("bad pcap magic 0x{0:08x}")]
    BadMagic(u32),
    #[error("truncated pcap global header: {0} bytes")]
    TruncatedGlobalHeader(usize),
    #[error("truncated pcap record at byte offset {offset}")]
    TruncatedRecord { offset: usize },
    #[error("unsupported link type {0} (only Ethernet is supported)")]
    UnsupportedLinkType(u32),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PcapOptions {
    /// Stop after this many extracted payloads.
    pub max_packets: Option<u64>,
    /// Truncate each payload to this many bytes.
    pub truncate: Option<usize>,
}

/// Ingestion tally. `skipped` counts frames without a parseable L4 payload.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PcapStats {
    pub frames: u64,
    pub payloads: u64,
    pub skipped: u64,
}

pub fn parse_pcap(
    bytes: &[u8],
    options: &PcapOptions,
) -> Result<(TrafficSample, PcapStats), PcapError> {
    if bytes.len() < 24 {
        return Err(PcapError::TruncatedGlobalHeader(bytes.len()));
    }
    let magic = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    // Determine byte order by testing the magic in both orders.
    let little = match magic {
        MAGIC_US | MAGIC_NS => true,
        m if m.swap_bytes() == MAGIC_US || m.swap_bytes() == MAGIC_NS => false,
        m => return Err(PcapError::BadMagic(m)),
    };
    let read_u32 = |buf: &[u8]| -> u32 {
        let raw: [u8; 4] = buf.try_into().unwrap();
        if little {
            u32::from_le_bytes(raw)
        } else {
            u32::from_be_bytes(raw)
        }
    };
    let linktype = read_u32(&bytes[20..24]);
    if linktype != LINKTYPE_ETHERNET {
        return Err(PcapError::UnsupportedLinkType(linktype));
    }

    let mut sample = TrafficSample::new();
    let mut stats = PcapStats::default();
    let mut offset = 24usize;
    while offset < bytes.len() {
        if options.max_packets.is_some_and(|max| stats.payloads >= max) {
            break;
        }
        if bytes.len() - offset < 16 {
            return Err(PcapError::TruncatedRecord { offset });
        }
        let incl_len = read_u32(&bytes[offset + 8..offset + 12]) as usize;
        let frame_start = offset + 16;
        if bytes.len() - frame_start < incl_len {
            return Err(PcapError::TruncatedRecord { offset });
        }
        let frame = &bytes[frame_start..frame_start + incl_len];
        stats.frames += 1;
        match l4_payload(frame) {
            Some(payload) => {
                let payload = match options.truncate {
                    Some(limit) if payload.len() > limit => &payload[..limit],
                    _ => payload,
                };
                sample.insert(payload.to_vec(), 1);
                stats.payloads += 1;
            }
            None => stats.skipped += 1,
        }
        offset = frame_start + incl_len;
    }
    Ok((sample, stats))
}

/// Extracts the TCP/UDP payload of one Ethernet frame, or `None` when the
/// frame has no parseable L4 payload.
fn l4_payload(frame: &[u8]) -> Option<&[u8]> {
    if frame.len() < 14 {
        return None;
    }
    let mut ethertype = u16::from_be_bytes([frame[12], frame[13]]);
    let mut ip_start = 14usize;
    if ethertype == 0x8100 {
        // single 802.1Q tag: 2 bytes TCI, then the real ethertype
        if frame.len() < 18 {
            return None;
        }
        ethertype = u16::from_be_bytes([frame[16], frame[17]]);
        ip_start = 18;
    }
    match ethertype {
        0x0800 => ipv4_payload(frame, ip_start),
        0x86dd => ipv6_payload(frame, ip_start),
        _ => None,
    }
}

fn ipv4_payload(frame: &[u8], ip_start: usize) -> Option<&[u8]> {
    let ip = frame.get(ip_start..)?;
    if ip.len() < 20 || ip[0] >> 4 != 4 {
        return None;
    }
    let ihl = (ip[0] & 0x0f) as usize * 4;
    if ihl < 20 || ip.len() < ihl {
        return None;
    }
    let total_len = u16::from_be_bytes([ip[2], ip[3]]) as usize;
    if total_len < ihl {
        return None;
    }
    // Ethernet frames are padded to a minimum size; the IP total length
    // bounds the real datagram.
    let ip_end = total_len.min(ip.len());
    let frag = u16::from_be_bytes([ip[6], ip[7]]);
    if frag & 0x1fff != 0 {
        return None; // non-first fragment: no L4 header present
    }
    l4_slice(&ip[..ip_end], ihl, ip[9])
}

fn ipv6_payload(frame: &[u8], ip_start: usize) -> Option<&[u8]> {
    let ip = frame.get(ip_start..)?;
    if ip.len() < 40 || ip[0] >> 4 != 6 {
        return None;
    }
    let payload_len = u16::from_be_bytes([ip[4], ip[5]]) as usize;
    let ip_end = (40 + payload_len).min(ip.len());
    // extension headers are not walked; only direct TCP/UDP
    l4_slice(&ip[..ip_end], 40, ip[6])
}

fn l4_slice(ip: &[u8], l4_start: usize, protocol: u8) -> Option<&[u8]> {
    let l4 = ip.get(l4_start..)?;
    match protocol {
        6 => {
            if l4.len() < 20 {
                return None;
            }
            let data_offset = (l4[12] >> 4) as usize * 4;
            if data_offset < 20 || l4.len() < data_offset {
                return None;
            }
            Some(&l4[data_offset..])
        }
        17 => {
            if l4.len() < 8 {
                return None;
            }
            let udp_len = u16::from_be_bytes([l4[4], l4[5]]) as usize;
            if udp_len < 8 {
                return None;
            }
            Some(&l4[8..udp_len.min(l4.len())])
        }
        _ => None,
    }
}

pub fn read_pcap(
    path: impl AsRef<Path>,
    options: &PcapOptions,
) -> Result<(TrafficSample, PcapStats), PcapError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| PcapError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pcap(&bytes, options)
}
