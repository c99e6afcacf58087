//! Capture file reading: classic PCAP (both byte orders, usec and nsec
//! timestamps) and PCAPNG, down to the TCP layer.
//!
//! Frame numbers count every packet record in file order, like a packet
//! analyzer would display them; non-TCP packets keep their number but are
//! not emitted.

use std::io::Cursor;
use std::net::{IpAddr, Ipv4Addr, Ipv6Addr};
use std::path::Path;

use pcap_parser::traits::PcapReaderIterator;
use pcap_parser::{Block, LegacyPcapReader, PcapBlockOwned, PcapError, PcapNGReader};
use thiserror::Error;

/// IP endpoint of one packet direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub ip: IpAddr,
    pub port: u16,
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.ip {
            IpAddr::V4(ip) => write!(f, "{}:{}", ip, self.port),
            IpAddr::V6(ip) => write!(f, "[{}]:{}", ip, self.port),
        }
    }
}

pub mod tcp_flags {
    pub const FIN: u8 = 0x01;
    pub const SYN: u8 = 0x02;
    pub const RST: u8 = 0x04;
    pub const ACK: u8 = 0x10;
}

/// One TCP packet as read from the capture.
#[derive(Debug, Clone)]
pub struct CapturePacket {
    /// 1-based position in the capture file.
    pub frame_number: u32,
    pub ts_secs: u64,
    pub ts_nanos: u32,
    pub src: Endpoint,
    pub dst: Endpoint,
    pub seq: u32,
    pub flags: u8,
    pub payload: Vec<u8>,
}

/// Packets plus any non-fatal diagnostics.
#[derive(Debug, Default)]
pub struct CaptureRead {
    pub packets: Vec<CapturePacket>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CaptureError {
    #[error("file is neither PCAP nor PCAPNG")]
    UnrecognizedCaptureFormat,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub fn read_capture(path: &Path) -> Result<CaptureRead, CaptureError> {
    let data = std::fs::read(path).map_err(|e| CaptureError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_capture_bytes(&data)
}

pub fn read_capture_bytes(data: &[u8]) -> Result<CaptureRead, CaptureError> {
    if data.len() < 4 {
        return Err(CaptureError::UnrecognizedCaptureFormat);
    }
    let magic = u32::from_le_bytes([data[0], data[1], data[2], data[3]]);
    const PCAPNG_SHB: u32 = 0x0a0d_0d0a;
    match magic {
        0xa1b2_c3d4 | 0xd4c3_b2a1 | 0xa1b2_3c4d | 0x4d3c_b2a1 => read_legacy(data),
        PCAPNG_SHB => read_pcapng(data),
        _ => Err(CaptureError::UnrecognizedCaptureFormat),
    }
}

fn read_legacy(data: &[u8]) -> Result<CaptureRead, CaptureError> {
    let capacity = data.len().max(65536) + 4096;
    let mut reader = LegacyPcapReader::new(capacity, Cursor::new(data.to_vec()))
        .map_err(|_| CaptureError::UnrecognizedCaptureFormat)?;
    let mut out = CaptureRead::default();
    let mut decoder = LinkDecoder::default();
    let mut linktype = 1i32;
    let mut nanosecond = false;
    let mut frame = 0u32;
    let mut stalled = false;
    loop {
        match reader.next() {
            Ok((offset, block)) => {
                stalled = false;
                match block {
                    PcapBlockOwned::LegacyHeader(header) => {
                        linktype = header.network.0;
                        nanosecond = header.is_nanosecond_precision();
                    }
                    PcapBlockOwned::Legacy(packet) => {
                        frame += 1;
                        let nanos = if nanosecond {
                            packet.ts_usec
                        } else {
                            packet.ts_usec.saturating_mul(1000)
                        };
                        decoder.push(
                            &mut out,
                            frame,
                            u64::from(packet.ts_sec),
                            nanos,
                            linktype,
                            packet.data,
                        );
                    }
                    PcapBlockOwned::NG(_) => {}
                }
                reader.consume(offset);
            }
            Err(PcapError::Eof) => break,
            Err(PcapError::Incomplete(_)) | Err(PcapError::UnexpectedEof) => {
                // A refill may complete the block; a second stall means the
                // file really ends inside a packet record.
                if stalled || reader.refill().is_err() {
                    out.warnings
                        .push("capture file is truncated mid-packet".to_string());
                    break;
                }
                stalled = true;
            }
            Err(_) => {
                out.warnings
                    .push("capture parsing stopped on malformed data".to_string());
                break;
            }
        }
    }
    Ok(out)
}

fn read_pcapng(data: &[u8]) -> Result<CaptureRead, CaptureError> {
    let capacity = data.len().max(65536) + 4096;
    let mut reader = PcapNGReader::new(capacity, Cursor::new(data.to_vec()))
        .map_err(|_| CaptureError::UnrecognizedCaptureFormat)?;
    let mut out = CaptureRead::default();
    let mut decoder = LinkDecoder::default();
    // Per-section interface table: (linktype, ticks per second).
    let mut interfaces: Vec<(i32, u64)> = Vec::new();
    let mut frame = 0u32;
    let mut stalled = false;
    loop {
        match reader.next() {
            Ok((offset, block)) => {
                stalled = false;
                match block {
                    PcapBlockOwned::NG(Block::SectionHeader(_)) => interfaces.clear(),
                    PcapBlockOwned::NG(Block::InterfaceDescription(idb)) => {
                        let resolution = idb.ts_resolution().unwrap_or(1_000_000);
                        interfaces.push((idb.linktype.0, resolution));
                    }
                    PcapBlockOwned::NG(Block::EnhancedPacket(epb)) => {
                        frame += 1;
                        let (linktype, resolution) = interfaces
                            .get(epb.if_id as usize)
                            .copied()
                            .unwrap_or((1, 1_000_000));
                        let ts = (u64::from(epb.ts_high) << 32) | u64::from(epb.ts_low);
                        let secs = ts / resolution;
                        let rem = ts % resolution;
                        let nanos = (rem.saturating_mul(1_000_000_000) / resolution) as u32;
                        decoder.push(&mut out, frame, secs, nanos, linktype, epb.data);
                    }
                    PcapBlockOwned::NG(Block::SimplePacket(spb)) => {
                        frame += 1;
                        let (linktype, _) =
                            interfaces.first().copied().unwrap_or((1, 1_000_000));
                        decoder.push(&mut out, frame, 0, 0, linktype, spb.data);
                    }
                    _ => {}
                }
                reader.consume(offset);
            }
            Err(PcapError::Eof) => break,
            Err(PcapError::Incomplete(_)) | Err(PcapError::UnexpectedEof) => {
                if stalled || reader.refill().is_err() {
                    out.warnings
                        .push("capture file is truncated mid-packet".to_string());
                    break;
                }
                stalled = true;
            }
            Err(_) => {
                out.warnings
                    .push("capture parsing stopped on malformed data".to_string());
                break;
            }
        }
    }
    Ok(out)
}

/// Strips link and network layers down to TCP.
#[derive(Default)]
struct LinkDecoder {
    unsupported_linktypes: Vec<i32>,
    fragment_warned: bool,
}

impl LinkDecoder {
    fn push(
        &mut self,
        out: &mut CaptureRead,
        frame: u32,
        ts_secs: u64,
        ts_nanos: u32,
        linktype: i32,
        data: &[u8],
    ) {
        let ip = match self.strip_link(out, linktype, data) {
            Some(ip) => ip,
            None => return,
        };
        if let Some(packet) = self.parse_ip(out, frame, ts_secs, ts_nanos, ip) {
            out.packets.push(packet);
        }
    }

    fn strip_link<'d>(
        &mut self,
        out: &mut CaptureRead,
        linktype: i32,
        data: &'d [u8],
    ) -> Option<&'d [u8]> {
        match linktype {
            // Ethernet
            1 => {
                if data.len() < 14 {
                    return None;
                }
                let mut ethertype = u16::from_be_bytes([data[12], data[13]]);
                let mut offset = 14;
                // 802.1Q tags
                while ethertype == 0x8100 || ethertype == 0x88a8 {
                    if data.len() < offset + 4 {
                        return None;
                    }
                    ethertype = u16::from_be_bytes([data[offset + 2], data[offset + 3]]);
                    offset += 4;
                }
                match ethertype {
                    0x0800 | 0x86dd => Some(&data[offset..]),
                    _ => None,
                }
            }
            // Linux cooked capture (SLL)
            113 => {
                if data.len() < 16 {
                    return None;
                }
                let proto = u16::from_be_bytes([data[14], data[15]]);
                match proto {
                    0x0800 | 0x86dd => Some(&data[16..]),
                    _ => None,
                }
            }
            // Linux cooked capture v2 (SLL2)
            276 => {
                if data.len() < 20 {
                    return None;
                }
                let proto = u16::from_be_bytes([data[0], data[1]]);
                match proto {
                    0x0800 | 0x86dd => Some(&data[20..]),
                    _ => None,
                }
            }
            // Raw IP
            101 | 12 => Some(data),
            // BSD loopback: 4-byte family in host byte order
            0 => {
                if data.len() < 4 {
                    return None;
                }
                Some(&data[4..])
            }
            other => {
                if !self.unsupported_linktypes.contains(&other) {
                    self.unsupported_linktypes.push(other);
                    out.warnings
                        .push(format!("unsupported link type {other}, packets skipped"));
                }
                None
            }
        }
    }

    fn parse_ip(
        &mut self,
        out: &mut CaptureRead,
        frame: u32,
        ts_secs: u64,
        ts_nanos: u32,
        data: &[u8],
    ) -> Option<CapturePacket> {
        if data.is_empty() {
            return None;
        }
        match data[0] >> 4 {
            4 => {
                if data.len() < 20 {
                    return None;
                }
                let ihl = usize::from(data[0] & 0x0f) * 4;
                if ihl < 20 || data.len() < ihl {
                    return None;
                }
                let total_len = usize::from(u16::from_be_bytes([data[2], data[3]]));
                let frag = u16::from_be_bytes([data[6], data[7]]);
                // More-fragments flag or a nonzero offset
                if frag & 0x2000 != 0 || frag & 0x1fff != 0 {
                    if !self.fragment_warned {
                        self.fragment_warned = true;
                        out.warnings.push(
                            "IP fragments are not reassembled, fragmented packets skipped"
                                .to_string(),
                        );
                    }
                    return None;
                }
                if data[9] != 6 {
                    return None;
                }
                let src_ip = IpAddr::V4(Ipv4Addr::new(data[12], data[13], data[14], data[15]));
                let dst_ip = IpAddr::V4(Ipv4Addr::new(data[16], data[17], data[18], data[19]));
                let end = total_len.clamp(ihl, data.len());
                self.parse_tcp(frame, ts_secs, ts_nanos, src_ip, dst_ip, &data[ihl..end])
            }
            6 => {
                if data.len() < 40 {
                    return None;
                }
                let payload_len = usize::from(u16::from_be_bytes([data[4], data[5]]));
                let src_ip = IpAddr::V6(Ipv6Addr::from(
                    <[u8; 16]>::try_from(&data[8..24]).unwrap(),
                ));
                let dst_ip = IpAddr::V6(Ipv6Addr::from(
                    <[u8; 16]>::try_from(&data[24..40]).unwrap(),
                ));
                let mut next = data[6];
                let mut offset = 40usize;
                let end = (40 + payload_len).min(data.len());
                loop {
                    match next {
                        6 => {
                            return self.parse_tcp(
                                frame,
                                ts_secs,
                                ts_nanos,
                                src_ip,
                                dst_ip,
                                &data[offset..end],
                            );
                        }
                        // hop-by-hop, routing, destination options
                        0 | 43 | 60 => {
                            if data.len() < offset + 2 {
                                return None;
                            }
                            let ext_len = (usize::from(data[offset + 1]) + 1) * 8;
                            next = data[offset];
                            offset += ext_len;
                            if offset >= end {
                                return None;
                            }
                        }
                        44 => {
                            if !self.fragment_warned {
                                self.fragment_warned = true;
                                out.warnings.push(
                                    "IP fragments are not reassembled, fragmented packets skipped"
                                        .to_string(),
                                );
                            }
                            return None;
                        }
                        _ => return None,
                    }
                }
            }
            _ => None,
        }
    }

    fn parse_tcp(
        &mut self,
        frame: u32,
        ts_secs: u64,
        ts_nanos: u32,
        src_ip: IpAddr,
        dst_ip: IpAddr,
        data: &[u8],
    ) -> Option<CapturePacket> {
        if data.len() < 20 {
            return None;
        }
        let src_port = u16::from_be_bytes([data[0], data[1]]);
        let dst_port = u16::from_be_bytes([data[2], data[3]]);
        let seq = u32::from_be_bytes([data[4], data[5], data[6], data[7]]);
        let data_offset = usize::from(data[12] >> 4) * 4;
        if data_offset < 20 || data.len() < data_offset {
            return None;
        }
        let flags = data[13];
        Some(CapturePacket {
            frame_number: frame,
            ts_secs,
            ts_nanos,
            src: Endpoint {
                ip: src_ip,
                port: src_port,
            },
            dst: Endpoint {
                ip: dst_ip,
                port: dst_port,
            },
            seq,
            flags,
            payload: data[data_offset..].to_vec(),
        })
    }
}
