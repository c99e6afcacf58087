//! Cleartext HTTP/2 framing: stream start detection and frame parsing.

/// The h2c client connection preface.
pub const CLIENT_PREFACE: &[u8] = b"PRI * HTTP/2.0\r\n\r\nSM\r\n\r\n";

/// Frames that must chain for mid-stream start detection to accept an
/// offset. Three is conservative enough to reject ASCII protocols.
pub const DEFAULT_DETECT_CHAIN: usize = 3;

pub mod flags {
    pub const END_STREAM: u8 = 0x01;
    pub const ACK: u8 = 0x01;
    pub const END_HEADERS: u8 = 0x04;
    pub const PADDED: u8 = 0x08;
    pub const PRIORITY: u8 = 0x20;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameType {
    Data,
    Headers,
    Priority,
    RstStream,
    Settings,
    PushPromise,
    Ping,
    Goaway,
    WindowUpdate,
    Continuation,
    Unknown(u8),
}

impl From<u8> for FrameType {
    fn from(value: u8) -> FrameType {
        match value {
            0x0 => FrameType::Data,
            0x1 => FrameType::Headers,
            0x2 => FrameType::Priority,
            0x3 => FrameType::RstStream,
            0x4 => FrameType::Settings,
            0x5 => FrameType::PushPromise,
            0x6 => FrameType::Ping,
            0x7 => FrameType::Goaway,
            0x8 => FrameType::WindowUpdate,
            0x9 => FrameType::Continuation,
            other => FrameType::Unknown(other),
        }
    }
}

/// One parsed frame. The payload is kept as on the wire; the accessors
/// strip padding and priority information.
#[derive(Debug, Clone)]
pub struct Http2Frame {
    pub frame_type: FrameType,
    pub flags: u8,
    pub stream_id: u32,
    pub payload: Vec<u8>,
    /// Capture frame that delivered the first byte of this frame.
    pub origin_frame: u32,
}

impl Http2Frame {
    pub fn has_flag(&self, flag: u8) -> bool {
        self.flags & flag != 0
    }

    /// DATA content with padding removed.
    pub fn data_content(&self) -> &[u8] {
        if self.has_flag(flags::PADDED) && !self.payload.is_empty() {
            let pad = usize::from(self.payload[0]);
            let body = &self.payload[1..];
            &body[..body.len().saturating_sub(pad)]
        } else {
            &self.payload
        }
    }

    /// HEADERS / PUSH_PROMISE / CONTINUATION header block fragment.
    pub fn header_fragment(&self) -> &[u8] {
        let mut body: &[u8] = &self.payload;
        let mut pad = 0usize;
        if matches!(self.frame_type, FrameType::Headers | FrameType::PushPromise)
            && self.has_flag(flags::PADDED)
            && !body.is_empty()
        {
            pad = usize::from(body[0]);
            body = &body[1..];
        }
        match self.frame_type {
            FrameType::Headers if self.has_flag(flags::PRIORITY) => {
                body = body.get(5..).unwrap_or(&[]);
            }
            FrameType::PushPromise => {
                body = body.get(4..).unwrap_or(&[]);
            }
            _ => {}
        }
        &body[..body.len().saturating_sub(pad)]
    }

    /// SETTINGS identifier/value pairs.
    pub fn settings_entries(&self) -> Vec<(u16, u32)> {
        let mut out = Vec::new();
        if self.frame_type != FrameType::Settings || self.has_flag(flags::ACK) {
            return out;
        }
        for chunk in self.payload.chunks_exact(6) {
            let id = u16::from_be_bytes([chunk[0], chunk[1]]);
            let value = u32::from_be_bytes([chunk[2], chunk[3], chunk[4], chunk[5]]);
            out.push((id, value));
        }
        out
    }
}

pub const SETTINGS_HEADER_TABLE_SIZE: u16 = 0x1;

/// Where HTTP/2 framing starts inside a byte stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H2Start {
    /// Client preface present; frames start after it.
    Preface(usize),
    /// No preface, but a plausible frame alignment was found.
    FrameAligned(usize),
    NotHttp2,
}

/// Finds the start of HTTP/2 framing. With no preface, scans for the first
/// position from which at least `min_chain` frames with known types chain
/// to the stream end (a truncated final frame is tolerated).
pub fn detect_h2(data: &[u8], min_chain: usize) -> H2Start {
    if data.starts_with(CLIENT_PREFACE) {
        return H2Start::Preface(CLIENT_PREFACE.len());
    }
    for start in 0..data.len().saturating_sub(9) {
        if chain_is_plausible(&data[start..], min_chain) {
            return H2Start::FrameAligned(start);
        }
    }
    H2Start::NotHttp2
}

fn chain_is_plausible(data: &[u8], min_chain: usize) -> bool {
    let mut pos = 0usize;
    let mut complete = 0usize;
    loop {
        let remaining = data.len() - pos;
        if remaining == 0 {
            return complete >= min_chain;
        }
        if remaining < 9 {
            // Header cut off by the end of capture.
            return complete >= min_chain;
        }
        let header = &data[pos..pos + 9];
        let length = u32::from_be_bytes([0, header[0], header[1], header[2]]) as usize;
        let type_code = header[3];
        if type_code > 0x9 {
            return false;
        }
        if !type_specific_length_ok(type_code, length) {
            return false;
        }
        if 9 + length > remaining {
            // Truncated final frame.
            return complete >= min_chain;
        }
        pos += 9 + length;
        complete += 1;
    }
}

fn type_specific_length_ok(type_code: u8, length: usize) -> bool {
    match FrameType::from(type_code) {
        FrameType::Settings => length.is_multiple_of(6),
        FrameType::Ping => length == 8,
        FrameType::RstStream | FrameType::WindowUpdate => length == 4,
        FrameType::Priority => length == 5,
        FrameType::Goaway => length >= 8,
        _ => true,
    }
}

/// Outcome of a frame parsing pass.
#[derive(Debug, Default)]
pub struct FrameParse {
    pub frames: Vec<Http2Frame>,
    /// Set when a frame header was inconsistent; remaining bytes skipped.
    pub desync: Option<String>,
}

/// Parses frames from `offset` to the end of the delivered bytes.
/// `frame_of` maps a byte offset to its originating capture frame.
pub fn parse_frames<F: Fn(usize) -> u32>(data: &[u8], offset: usize, frame_of: F) -> FrameParse {
    let mut out = FrameParse::default();
    let mut pos = offset;
    while pos < data.len() {
        let remaining = data.len() - pos;
        if remaining < 9 {
            out.desync = Some(format!(
                "{remaining} trailing bytes do not form a frame header"
            ));
            break;
        }
        let header = &data[pos..pos + 9];
        let length = u32::from_be_bytes([0, header[0], header[1], header[2]]) as usize;
        let frame_type = FrameType::from(header[3]);
        let frame_flags = header[4];
        let stream_id =
            u32::from_be_bytes([header[5], header[6], header[7], header[8]]) & 0x7fff_ffff;
        if 9 + length > remaining {
            out.desync = Some(format!(
                "frame of {length} bytes overruns the {remaining} bytes left in the stream"
            ));
            break;
        }
        out.frames.push(Http2Frame {
            frame_type,
            flags: frame_flags,
            stream_id,
            payload: data[pos + 9..pos + 9 + length].to_vec(),
            origin_frame: frame_of(pos),
        });
        pos += 9 + length;
    }
    out
}

/// Serializes one frame (used by tests and fixture tooling).
pub fn encode_frame(frame_type: u8, frame_flags: u8, stream_id: u32, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(9 + payload.len());
    let len = payload.len() as u32;
    out.extend_from_slice(&len.to_be_bytes()[1..]);
    out.push(frame_type);
    out.push(frame_flags);
    out.extend_from_slice(&stream_id.to_be_bytes());
    out.extend_from_slice(payload);
    out
}
