//! Builders for classic pcap capture fixtures.

const MAGIC_US: u32 = 0xa1b2_c3d4;

fn push32(out: &mut Vec<u8>, little: bool, v: u32) {
    out.extend_from_slice(&if little {
        v.to_le_bytes()
    } else {
        v.to_be_bytes()
    });
}

fn push16(out: &mut Vec<u8>, little: bool, v: u16) {
    out.extend_from_slice(&if little {
        v.to_le_bytes()
    } else {
        v.to_be_bytes()
    });
}

/// Classic pcap global header: microsecond magic, Ethernet link type.
pub fn global_header(little: bool) -> Vec<u8> {
    let mut out = Vec::with_capacity(24);
    push32(&mut out, little, MAGIC_US);
    push16(&mut out, little, 2);
    push16(&mut out, little, 4);
    push32(&mut out, little, 0);
    push32(&mut out, little, 0);
    push32(&mut out, little, 65535);
    push32(&mut out, little, 1);
    out
}

/// Ethernet/IPv4/UDP frame around the payload.
pub fn udp_frame(payload: &[u8]) -> Vec<u8> {
    let mut frame = vec![0u8; 14];
    frame[12] = 0x08;
    let udp_len = 8 + payload.len();
    let mut ip = vec![0u8; 20];
    ip[0] = 0x45;
    ip[2..4].copy_from_slice(&((20 + udp_len) as u16).to_be_bytes());
    ip[8] = 64; // ttl
    ip[9] = 17; // udp
    frame.extend_from_slice(&ip);
    let mut udp = vec![0u8; 8];
    udp[0..2].copy_from_slice(&40000u16.to_be_bytes());
    udp[2..4].copy_from_slice(&80u16.to_be_bytes());
    udp[4..6].copy_from_slice(&(udp_len as u16).to_be_bytes());
    frame.extend_from_slice(&udp);
    frame.extend_from_slice(payload);
    frame
}

/// A whole capture from raw frames.
pub fn capture(little: bool, frames: &[Vec<u8>]) -> Vec<u8> {
    let mut out = global_header(little);
    for frame in frames {
        push32(&mut out, little, 1_700_000_000);
        push32(&mut out, little, 0);
        push32(&mut out, little, frame.len() as u32);
        push32(&mut out, little, frame.len() as u32);
        out.extend_from_slice(frame);
    }
    out
}

/// Convenience: a capture carrying the given UDP payloads.
pub fn udp_capture(payloads: &[&[u8]]) -> Vec<u8> {
    let frames: Vec<Vec<u8>> = payloads.iter().map(|p| udp_frame(p)).collect();
    capture(true, &frames)
}
