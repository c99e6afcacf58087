//! TCP stream reassembly.
//!
//! Bytes are delivered per direction in sequence order. Retransmissions are
//! deduplicated by sequence range and overlaps keep the first-arrived bytes;
//! a retransmission carrying different bytes is recorded as an anomaly.
//! Missing ranges become gap records once the stream ends.

use std::collections::HashMap;

use super::pcap::{tcp_flags, CapturePacket, Endpoint};

/// Keeps per-direction reassembly buffers bounded.
const MAX_DIRECTION_BYTES: u64 = 64 * 1024 * 1024;

/// Which way data flows inside a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ClientToServer,
    ServerToClient,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::ClientToServer => Direction::ServerToClient,
            Direction::ServerToClient => Direction::ClientToServer,
        }
    }
}

/// Frame provenance for a run of delivered bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameRun {
    pub len: usize,
    pub frame: u32,
}

/// A missing byte range, located after `delivered_offset` delivered bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub delivered_offset: usize,
    pub missing: u64,
}

/// In-order byte delivery of one direction.
#[derive(Debug, Default)]
pub struct DirectionData {
    pub bytes: Vec<u8>,
    pub frame_runs: Vec<FrameRun>,
    pub gaps: Vec<Gap>,
}

impl DirectionData {
    /// Frame number that delivered the byte at `offset`.
    pub fn frame_at(&self, offset: usize) -> u32 {
        let mut cursor = 0usize;
        for run in &self.frame_runs {
            cursor += run.len;
            if offset < cursor {
                return run.frame;
            }
        }
        self.frame_runs.last().map(|r| r.frame).unwrap_or(0)
    }

    /// Delivered-offset boundaries at which a gap precedes the byte.
    pub fn gap_offsets(&self) -> Vec<usize> {
        self.gaps.iter().map(|g| g.delivered_offset).collect()
    }

    fn push_run(&mut self, frame: u32, byte: u8) {
        self.bytes.push(byte);
        match self.frame_runs.last_mut() {
            Some(run) if run.frame == frame => run.len += 1,
            _ => self.frame_runs.push(FrameRun { len: 1, frame }),
        }
    }
}

/// One reassembled bidirectional stream.
#[derive(Debug)]
pub struct TcpStream {
    /// Assigned in order of first appearance in the capture.
    pub stream_id: u32,
    pub client: Endpoint,
    pub server: Endpoint,
    pub client_data: DirectionData,
    pub server_data: DirectionData,
    pub notes: Vec<String>,
    /// True when the stream start was not captured (no SYN from the client).
    pub midstream: bool,
}

impl TcpStream {
    pub fn data(&self, direction: Direction) -> &DirectionData {
        match direction {
            Direction::ClientToServer => &self.client_data,
            Direction::ServerToClient => &self.server_data,
        }
    }
}

#[derive(Debug, Clone)]
struct Segment {
    seq: u32,
    data: Vec<u8>,
    frame: u32,
}

#[derive(Debug, Default)]
struct DirectionState {
    syn_base: Option<u32>,
    syn_seen: bool,
    segments: Vec<Segment>,
}

impl DirectionState {
    fn accept(&mut self, packet: &CapturePacket, _notes: &mut [String]) {
        if packet.flags & tcp_flags::SYN != 0 {
            // SYN consumes one sequence number; data starts right after.
            self.syn_base = Some(packet.seq.wrapping_add(1));
            self.syn_seen = true;
            return;
        }
        if packet.payload.is_empty() {
            return;
        }
        self.segments.push(Segment {
            seq: packet.seq,
            data: packet.payload.clone(),
            frame: packet.frame_number,
        });
    }

    fn finish(self, notes: &mut Vec<String>) -> DirectionData {
        let mut out = DirectionData::default();
        if self.segments.is_empty() {
            return out;
        }
        // Without a SYN the base is the first-arrived segment; segments that
        // arrived out of order before it get negative distances and shift
        // the whole direction.
        let base = self.syn_base.unwrap_or(self.segments[0].seq);
        let signed: Vec<(i64, &Segment)> = self
            .segments
            .iter()
            .map(|s| (wrap_distance(s.seq, base), s))
            .collect();
        let shift = if self.syn_seen {
            0
        } else {
            signed.iter().map(|(d, _)| *d).min().unwrap_or(0).min(0)
        };
        let mut end = 0u64;
        let mut placed: Vec<(u64, &Segment, usize)> = Vec::new();
        for (delta, segment) in signed {
            let delta = delta - shift;
            // Data preceding the post-SYN base (keepalive probes) is clipped.
            let skip = if delta < 0 { (-delta) as usize } else { 0 };
            if skip >= segment.data.len() {
                continue;
            }
            let offset = (delta + skip as i64) as u64;
            let len = (segment.data.len() - skip) as u64;
            if offset + len > MAX_DIRECTION_BYTES {
                notes.push(format!(
                    "frame {}: stream direction exceeds the reassembly limit, bytes dropped",
                    segment.frame
                ));
                continue;
            }
            end = end.max(offset + len);
            placed.push((offset, segment, skip));
        }
        let mut cells: Vec<Option<(u8, u32)>> = vec![None; end as usize];
        for (offset, segment, skip) in &placed {
            let mut conflicting = false;
            for (i, byte) in segment.data[*skip..].iter().enumerate() {
                let cell = &mut cells[*offset as usize + i];
                match cell {
                    None => *cell = Some((*byte, segment.frame)),
                    // First-arrived bytes win.
                    Some((existing, _)) => {
                        if *existing != *byte {
                            conflicting = true;
                        }
                    }
                }
            }
            if conflicting {
                notes.push(format!(
                    "frame {}: retransmission carries different bytes, first-arrived kept",
                    segment.frame
                ));
            }
        }
        let mut hole = 0u64;
        for cell in cells {
            match cell {
                Some((byte, frame)) => {
                    if hole > 0 {
                        out.gaps.push(Gap {
                            delivered_offset: out.bytes.len(),
                            missing: hole,
                        });
                        hole = 0;
                    }
                    out.push_run(frame, byte);
                }
                None => hole += 1,
            }
        }
        out
    }
}

/// Signed 32-bit sequence distance from `base` to `seq`.
fn wrap_distance(seq: u32, base: u32) -> i64 {
    let raw = seq.wrapping_sub(base);
    if raw >= 0x8000_0000 {
        i64::from(raw) - (1i64 << 32)
    } else {
        i64::from(raw)
    }
}

struct StreamBuilder {
    stream_id: u32,
    client: Endpoint,
    server: Endpoint,
    client_state: DirectionState,
    server_state: DirectionState,
    notes: Vec<String>,
}

/// Groups packets into streams and reassembles both directions.
pub fn reassemble_tcp(packets: &[CapturePacket]) -> Vec<TcpStream> {
    let mut order: Vec<(Endpoint, Endpoint)> = Vec::new();
    let mut builders: HashMap<(Endpoint, Endpoint), StreamBuilder> = HashMap::new();

    for packet in packets {
        let key = if packet.src <= packet.dst {
            (packet.src, packet.dst)
        } else {
            (packet.dst, packet.src)
        };
        let builder = builders.entry(key).or_insert_with(|| {
            order.push(key);
            // The client is the SYN sender when the handshake is captured;
            // otherwise the first packet's source stands in and message
            // direction gets corrected from the decoded headers later.
            let syn_only = packet.flags & (tcp_flags::SYN | tcp_flags::ACK) == tcp_flags::SYN;
            let (client, server) = if syn_only || packet.flags & tcp_flags::SYN == 0 {
                (packet.src, packet.dst)
            } else {
                // SYN|ACK arrives first: the sender is the server.
                (packet.dst, packet.src)
            };
            StreamBuilder {
                stream_id: (order.len() - 1) as u32,
                client,
                server,
                client_state: DirectionState::default(),
                server_state: DirectionState::default(),
                notes: Vec::new(),
            }
        });
        if packet.src == builder.client {
            builder.client_state.accept(packet, &mut builder.notes);
        } else {
            builder.server_state.accept(packet, &mut builder.notes);
        }
    }

    let mut streams = Vec::with_capacity(order.len());
    for key in order {
        let builder = builders.remove(&key).expect("stream builder exists");
        let midstream = !builder.client_state.syn_seen;
        let mut notes = builder.notes;
        let client_data = builder.client_state.finish(&mut notes);
        let server_data = builder.server_state.finish(&mut notes);
        streams.push(TcpStream {
            stream_id: builder.stream_id,
            client: builder.client,
            server: builder.server,
            client_data,
            server_data,
            notes,
            midstream,
        });
    }
    streams
}
