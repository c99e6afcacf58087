//! From reassembled byte streams to HTTP messages.
//!
//! Header blocks are decoded strictly in stream-byte order per direction
//! (HPACK state is order-dependent), while DATA payloads are demultiplexed
//! per HTTP/2 stream id. Streams that start mid-connection or resume after
//! a reassembly gap decode their header blocks in degraded mode.

use super::hpack::{HeaderList, HpackDecoder};
use super::http2::{
    detect_h2, flags, parse_frames, FrameType, H2Start, SETTINGS_HEADER_TABLE_SIZE,
};
use super::tcp::{Direction, TcpStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MessageDirection {
    Request,
    Response,
}

/// One HTTP/2 message (a request or a response).
#[derive(Debug)]
pub struct HttpMessage {
    pub direction: MessageDirection,
    pub headers: HeaderList,
    pub body: Vec<u8>,
    pub trailers: Option<HeaderList>,
    pub end_stream_seen: bool,
    pub h2_stream_id: u32,
    pub tcp_stream_id: u32,
    pub first_frame: u32,
    pub last_frame: u32,
    pub notes: Vec<String>,
}

/// Decoder tuning; the detection chain length is deliberately adjustable.
#[derive(Debug, Clone)]
pub struct DecodeOptions {
    pub detect_chain: usize,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            detect_chain: super::http2::DEFAULT_DETECT_CHAIN,
        }
    }
}

/// All messages of a capture plus decoder diagnostics.
#[derive(Debug, Default)]
pub struct DecodedCapture {
    pub messages: Vec<HttpMessage>,
    pub warnings: Vec<String>,
}

/// Assembles messages from every stream of a capture.
pub fn assemble_messages(streams: &[TcpStream], options: &DecodeOptions) -> DecodedCapture {
    let mut out = DecodedCapture::default();
    for stream in streams {
        decode_stream(stream, options, &mut out);
    }
    out.messages.sort_by_key(|m| {
        (
            m.tcp_stream_id,
            m.h2_stream_id,
            m.direction,
            m.first_frame,
        )
    });
    out
}

fn decode_stream(stream: &TcpStream, options: &DecodeOptions, out: &mut DecodedCapture) {
    for note in &stream.notes {
        out.warnings.push(format!("tcp stream {}: {note}", stream.stream_id));
    }
    // SETTINGS sent by one side size the table its peer encodes against, so
    // each direction's decoder takes the announcement from the other side.
    let mut client_decoder = HpackDecoder::new();
    let mut server_decoder = HpackDecoder::new();
    if let Some(size) = first_table_size_setting(stream, Direction::ServerToClient) {
        client_decoder.set_protocol_max_size(size);
    }
    if let Some(size) = first_table_size_setting(stream, Direction::ClientToServer) {
        server_decoder.set_protocol_max_size(size);
    }

    for direction in [Direction::ClientToServer, Direction::ServerToClient] {
        let decoder = match direction {
            Direction::ClientToServer => &mut client_decoder,
            Direction::ServerToClient => &mut server_decoder,
        };
        decode_direction(stream, direction, decoder, options, out);
    }
}

fn first_table_size_setting(stream: &TcpStream, direction: Direction) -> Option<usize> {
    let data = stream.data(direction);
    if data.bytes.is_empty() {
        return None;
    }
    let start = find_start(&data.bytes, direction, stream.midstream, 3)?;
    let parse = parse_frames(&data.bytes, start, |_| 0);
    for frame in &parse.frames {
        if frame.frame_type == FrameType::Settings {
            for (id, value) in frame.settings_entries() {
                if id == SETTINGS_HEADER_TABLE_SIZE {
                    return usize::try_from(value).ok();
                }
            }
        }
    }
    None
}

fn find_start(
    bytes: &[u8],
    direction: Direction,
    midstream: bool,
    detect_chain: usize,
) -> Option<usize> {
    if !midstream {
        // Captured from the handshake: framing starts at a known offset.
        if direction == Direction::ClientToServer {
            if bytes.starts_with(super::http2::CLIENT_PREFACE) {
                return Some(super::http2::CLIENT_PREFACE.len());
            }
        } else {
            return Some(0);
        }
    }
    match detect_h2(bytes, detect_chain) {
        H2Start::Preface(offset) => Some(offset),
        H2Start::FrameAligned(offset) => Some(offset),
        H2Start::NotHttp2 => None,
    }
}

struct MessageBuilder {
    h2_stream_id: u32,
    headers: Option<HeaderList>,
    body: Vec<u8>,
    trailers: Option<HeaderList>,
    end_stream_seen: bool,
    first_frame: u32,
    last_frame: u32,
    notes: Vec<String>,
}

impl MessageBuilder {
    fn new(h2_stream_id: u32) -> MessageBuilder {
        MessageBuilder {
            h2_stream_id,
            headers: None,
            body: Vec::new(),
            trailers: None,
            end_stream_seen: false,
            first_frame: 0,
            last_frame: 0,
            notes: Vec::new(),
        }
    }

    fn touch(&mut self, frame: u32) {
        if self.first_frame == 0 {
            self.first_frame = frame;
        }
        self.last_frame = self.last_frame.max(frame);
    }
}

fn decode_direction(
    stream: &TcpStream,
    direction: Direction,
    decoder: &mut HpackDecoder,
    options: &DecodeOptions,
    out: &mut DecodedCapture,
) {
    let data = stream.data(direction);
    if data.bytes.is_empty() {
        return;
    }
    if data.bytes[0] == 0x16 && data.bytes.get(1) == Some(&0x03) {
        out.warnings.push(format!(
            "tcp stream {}: looks like TLS, skipped (only cleartext h2c is decoded)",
            stream.stream_id
        ));
        return;
    }

    // Contiguous runs of delivered bytes; every gap forces a re-alignment.
    let mut run_bounds: Vec<usize> = vec![0];
    run_bounds.extend(data.gap_offsets());
    run_bounds.push(data.bytes.len());
    run_bounds.dedup();

    let mut builders: Vec<MessageBuilder> = Vec::new();
    // An unterminated header block: (stream id, END_STREAM pending, fragments).
    let mut open_block: Option<(u32, bool, Vec<u8>)> = None;
    let mut degraded = stream.midstream;

    for window in run_bounds.windows(2) {
        let (run_start, run_end) = (window[0], window[1]);
        if run_start >= run_end {
            continue;
        }
        let run = &data.bytes[run_start..run_end];
        let is_first_run = run_start == 0;
        if !is_first_run {
            // Bytes lost in a gap: whatever block was open is unfinishable,
            // and table state may have been missed.
            if open_block.take().is_some() {
                out.warnings.push(format!(
                    "tcp stream {}: header block interrupted by a reassembly gap",
                    stream.stream_id
                ));
            }
            degraded = true;
        }
        let start = match find_start(
            run,
            direction,
            stream.midstream || !is_first_run,
            options.detect_chain,
        ) {
            Some(s) => s,
            None => {
                if is_first_run {
                    out.warnings.push(format!(
                        "tcp stream {}: no HTTP/2 framing found, skipped",
                        stream.stream_id
                    ));
                }
                continue;
            }
        };
        let parse = parse_frames(run, start, |offset| data.frame_at(run_start + offset));
        if let Some(desync) = &parse.desync {
            out.warnings.push(format!(
                "tcp stream {}: framing desync: {desync}",
                stream.stream_id
            ));
        }

        for frame in &parse.frames {
            let builder_of = |builders: &mut Vec<MessageBuilder>, id: u32| -> usize {
                match builders.iter().position(|b| b.h2_stream_id == id) {
                    Some(i) => i,
                    None => {
                        builders.push(MessageBuilder::new(id));
                        builders.len() - 1
                    }
                }
            };
            match frame.frame_type {
                FrameType::Headers | FrameType::PushPromise => {
                    if open_block.is_some() {
                        out.warnings.push(format!(
                            "tcp stream {}: header block without END_HEADERS interrupted",
                            stream.stream_id
                        ));
                    }
                    let fragments = frame.header_fragment().to_vec();
                    let end_stream = frame.has_flag(flags::END_STREAM)
                        && frame.frame_type == FrameType::Headers;
                    let target = if frame.frame_type == FrameType::PushPromise {
                        // Promised streams are not validated, but the block
                        // must still run through the decoder to keep the
                        // dynamic table aligned.
                        u32::MAX
                    } else {
                        frame.stream_id
                    };
                    if frame.has_flag(flags::END_HEADERS) {
                        finish_block(
                            target,
                            end_stream,
                            &fragments,
                            decoder,
                            degraded,
                            &mut builders,
                            frame.origin_frame,
                        );
                    } else {
                        open_block = Some((target, end_stream, fragments));
                    }
                    if frame.frame_type == FrameType::Headers {
                        let idx = builder_of(&mut builders, frame.stream_id);
                        builders[idx].touch(frame.origin_frame);
                    }
                }
                FrameType::Continuation => match open_block.take() {
                    Some((id, end_stream, mut fragments)) => {
                        fragments.extend_from_slice(frame.header_fragment());
                        if frame.has_flag(flags::END_HEADERS) {
                            finish_block(
                                id,
                                end_stream,
                                &fragments,
                                decoder,
                                degraded,
                                &mut builders,
                                frame.origin_frame,
                            );
                        } else {
                            open_block = Some((id, end_stream, fragments));
                        }
                        if id != u32::MAX {
                            let idx = builder_of(&mut builders, id);
                            builders[idx].touch(frame.origin_frame);
                        }
                    }
                    None => out.warnings.push(format!(
                        "tcp stream {}: CONTINUATION without an open header block",
                        stream.stream_id
                    )),
                },
                FrameType::Data => {
                    let idx = builder_of(&mut builders, frame.stream_id);
                    builders[idx].body.extend_from_slice(frame.data_content());
                    builders[idx].touch(frame.origin_frame);
                    if frame.has_flag(flags::END_STREAM) {
                        builders[idx].end_stream_seen = true;
                    }
                }
                _ => {}
            }
        }
    }

    for builder in builders {
        let Some(headers) = builder.headers else {
            // DATA without any decodable HEADERS: not attributable.
            if !builder.body.is_empty() {
                out.warnings.push(format!(
                    "tcp stream {} h2 stream {}: data without decodable headers dropped",
                    stream.stream_id, builder.h2_stream_id
                ));
            }
            continue;
        };
        let direction_kind = if headers.get(":method").is_some() {
            MessageDirection::Request
        } else if headers.get(":status").is_some() {
            MessageDirection::Response
        } else if direction == Direction::ClientToServer {
            MessageDirection::Request
        } else {
            MessageDirection::Response
        };
        out.messages.push(HttpMessage {
            direction: direction_kind,
            headers,
            body: builder.body,
            trailers: builder.trailers,
            end_stream_seen: builder.end_stream_seen,
            h2_stream_id: builder.h2_stream_id,
            tcp_stream_id: stream.stream_id,
            first_frame: builder.first_frame,
            last_frame: builder.last_frame,
            notes: builder.notes,
        });
    }
}

fn finish_block(
    h2_stream_id: u32,
    end_stream: bool,
    fragments: &[u8],
    decoder: &mut HpackDecoder,
    degraded: bool,
    builders: &mut Vec<MessageBuilder>,
    origin_frame: u32,
) {
    let mut list = decoder.decode_block(fragments, degraded);
    // Keep pseudo-headers in front even if degradation dropped fields.
    list.fields.sort_by_key(|(name, _)| !name.starts_with(':'));
    if h2_stream_id == u32::MAX {
        return; // PUSH_PROMISE: state update only
    }
    let idx = match builders.iter().position(|b| b.h2_stream_id == h2_stream_id) {
        Some(i) => i,
        None => {
            builders.push(MessageBuilder::new(h2_stream_id));
            builders.len() - 1
        }
    };
    let builder = &mut builders[idx];
    builder.touch(origin_frame);
    if end_stream {
        builder.end_stream_seen = true;
    }
    if builder.headers.is_none() {
        if list.is_degraded() {
            builder.notes.push("header block decoded in degraded mode".to_string());
        }
        builder.headers = Some(list);
    } else {
        builder.trailers = Some(list);
    }
}
