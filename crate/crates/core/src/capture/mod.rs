//! Capture decoding: PCAP reading, TCP reassembly, HTTP/2 framing and HPACK.

pub mod hpack;
mod hpack_tables;
pub mod http2;
pub mod message;
pub mod pcap;
pub mod tcp;

#[cfg(test)]
pub(crate) mod testutil;

pub use hpack::{Completeness, HeaderList, HpackDecoder};
pub use http2::{detect_h2, parse_frames, FrameType, H2Start, Http2Frame};
pub use message::{assemble_messages, DecodeOptions, DecodedCapture, HttpMessage, MessageDirection};
pub use pcap::{read_capture, read_capture_bytes, CaptureError, CapturePacket, CaptureRead, Endpoint};
pub use tcp::{reassemble_tcp, Direction, DirectionData, TcpStream};
