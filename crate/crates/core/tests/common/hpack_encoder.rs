//! Test-only HPACK encoder, written directly from RFC 7541 and independent
//! of the decoder under test. It mirrors the dynamic table so it can emit
//! indexed references, and can randomize representation choices to exercise
//! every decoder path.

use std::collections::VecDeque;

use rand::prelude::*;

#[path = "huffman_codes.rs"]
mod huffman_codes;
use huffman_codes::HUFFMAN_CODES;

const STATIC_PAIRS: &[(u64, &str, &str)] = &[
    (2, ":method", "GET"),
    (3, ":method", "POST"),
    (4, ":path", "/"),
    (6, ":scheme", "http"),
    (7, ":scheme", "https"),
    (8, ":status", "200"),
    (9, ":status", "204"),
    (13, ":status", "404"),
];

const STATIC_NAMES: &[(u64, &str)] = &[
    (1, ":authority"),
    (2, ":method"),
    (4, ":path"),
    (8, ":status"),
    (24, "cache-control"),
    (28, "content-length"),
    (31, "content-type"),
    (46, "location"),
    (58, "user-agent"),
];

pub struct TestEncoder {
    table: VecDeque<(String, String)>,
    size: usize,
    max_size: usize,
}

impl Default for TestEncoder {
    fn default() -> Self {
        TestEncoder::new()
    }
}

impl TestEncoder {
    pub fn new() -> TestEncoder {
        TestEncoder {
            table: VecDeque::new(),
            size: 0,
            max_size: 4096,
        }
    }

    /// Encodes a header list, randomizing representation and Huffman use.
    pub fn encode_randomized(
        &mut self,
        headers: &[(String, String)],
        rng: &mut StdRng,
    ) -> Vec<u8> {
        let mut out = Vec::new();
        for (name, value) in headers {
            self.encode_field(&mut out, name, value, rng);
        }
        out
    }

    fn encode_field(&mut self, out: &mut Vec<u8>, name: &str, value: &str, rng: &mut StdRng) {
        // Prefer an existing full match some of the time.
        if rng.random_bool(0.7) {
            if let Some(pos) = self.table.iter().position(|(n, v)| n == name && v == value) {
                encode_integer(out, 62 + pos as u64, 7, 0x80);
                return;
            }
            if let Some((idx, _, _)) = STATIC_PAIRS
                .iter()
                .find(|(_, n, v)| *n == name && *v == value)
            {
                encode_integer(out, *idx, 7, 0x80);
                return;
            }
        }
        let huffman = rng.random_bool(0.5);
        let name_index = if rng.random_bool(0.5) {
            self.table
                .iter()
                .position(|(n, _)| n == name)
                .map(|p| 62 + p as u64)
                .or_else(|| {
                    STATIC_NAMES
                        .iter()
                        .find(|(_, n)| *n == name)
                        .map(|(i, _)| *i)
                })
        } else {
            None
        };
        match rng.random_range(0..3u8) {
            // Literal with incremental indexing.
            0 => {
                match name_index {
                    Some(idx) => encode_integer(out, idx, 6, 0x40),
                    None => {
                        out.push(0x40);
                        encode_string(out, name.as_bytes(), huffman);
                    }
                }
                encode_string(out, value.as_bytes(), huffman);
                self.insert(name, value);
            }
            // Literal without indexing.
            1 => {
                match name_index {
                    Some(idx) => encode_integer(out, idx, 4, 0x00),
                    None => {
                        out.push(0x00);
                        encode_string(out, name.as_bytes(), huffman);
                    }
                }
                encode_string(out, value.as_bytes(), huffman);
            }
            // Literal never indexed.
            _ => {
                match name_index {
                    Some(idx) => encode_integer(out, idx, 4, 0x10),
                    None => {
                        out.push(0x10);
                        encode_string(out, name.as_bytes(), huffman);
                    }
                }
                encode_string(out, value.as_bytes(), huffman);
            }
        }
    }

    fn insert(&mut self, name: &str, value: &str) {
        let entry = name.len() + value.len() + 32;
        if entry > self.max_size {
            self.table.clear();
            self.size = 0;
            return;
        }
        while self.size + entry > self.max_size {
            if let Some((n, v)) = self.table.pop_back() {
                self.size -= n.len() + v.len() + 32;
            } else {
                break;
            }
        }
        self.table.push_front((name.to_string(), value.to_string()));
        self.size += entry;
    }
}

pub fn encode_integer(out: &mut Vec<u8>, value: u64, prefix_bits: u8, pattern: u8) {
    let max_prefix = (1u64 << prefix_bits) - 1;
    if value < max_prefix {
        out.push(pattern | value as u8);
        return;
    }
    out.push(pattern | max_prefix as u8);
    let mut rest = value - max_prefix;
    while rest >= 128 {
        out.push((rest % 128) as u8 | 0x80);
        rest /= 128;
    }
    out.push(rest as u8);
}

pub fn encode_string(out: &mut Vec<u8>, data: &[u8], huffman: bool) {
    if !huffman {
        encode_integer(out, data.len() as u64, 7, 0x00);
        out.extend_from_slice(data);
        return;
    }
    let encoded = huffman_encode(data);
    encode_integer(out, encoded.len() as u64, 7, 0x80);
    out.extend_from_slice(&encoded);
}

fn huffman_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut acc: u64 = 0;
    let mut bits: u32 = 0;
    for byte in data {
        let (code, len) = HUFFMAN_CODES[*byte as usize];
        acc = (acc << len) | u64::from(code);
        bits += u32::from(len);
        while bits >= 8 {
            bits -= 8;
            out.push(((acc >> bits) & 0xff) as u8);
        }
    }
    if bits > 0 {
        // Pad with the most significant bits of EOS (all ones).
        let pad = 8 - bits;
        acc = (acc << pad) | ((1 << pad) - 1);
        out.push((acc & 0xff) as u8);
    }
    out
}
