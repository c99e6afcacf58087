//! RFC 7541 Appendix C worked-example sequences and the random round-trip
//! runner, shared by the focused and acceptance suites.

use rand::prelude::*;

use sbilint_core::capture::hpack::{Completeness, HpackDecoder};

use super::hpack_encoder::TestEncoder;

fn fields(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(n, v)| (n.to_string(), v.to_string()))
        .collect()
}

struct Step {
    block: &'static [u8],
    expect: &'static [(&'static str, &'static str)],
}

fn run_sequence(decoder: &mut HpackDecoder, steps: &[Step]) {
    for (i, step) in steps.iter().enumerate() {
        let list = decoder.decode_block(step.block, false);
        assert_eq!(
            list.completeness,
            Completeness::Complete,
            "step {i} complete"
        );
        assert_eq!(list.fields, fields(step.expect), "step {i} fields");
    }
}

const REQUEST_HEADERS_1: &[(&str, &str)] = &[
    (":method", "GET"),
    (":scheme", "http"),
    (":path", "/"),
    (":authority", "www.example.com"),
];
const REQUEST_HEADERS_2: &[(&str, &str)] = &[
    (":method", "GET"),
    (":scheme", "http"),
    (":path", "/"),
    (":authority", "www.example.com"),
    ("cache-control", "no-cache"),
];
const REQUEST_HEADERS_3: &[(&str, &str)] = &[
    (":method", "GET"),
    (":scheme", "https"),
    (":path", "/index.html"),
    (":authority", "www.example.com"),
    ("custom-key", "custom-value"),
];

const RESPONSE_HEADERS_1: &[(&str, &str)] = &[
    (":status", "302"),
    ("cache-control", "private"),
    ("date", "Mon, 21 Oct 2013 20:13:21 GMT"),
    ("location", "https://www.example.com"),
];
const RESPONSE_HEADERS_2: &[(&str, &str)] = &[
    (":status", "307"),
    ("cache-control", "private"),
    ("date", "Mon, 21 Oct 2013 20:13:21 GMT"),
    ("location", "https://www.example.com"),
];
const RESPONSE_HEADERS_3: &[(&str, &str)] = &[
    (":status", "200"),
    ("cache-control", "private"),
    ("date", "Mon, 21 Oct 2013 20:13:22 GMT"),
    ("location", "https://www.example.com"),
    ("content-encoding", "gzip"),
    (
        "set-cookie",
        "foo=ASDJKHQKBZXOQWEOPIUAXQWEOIU; max-age=3600; version=1",
    ),
];

pub fn rfc7541_c3_request_sequence_without_huffman() {
    let mut decoder = HpackDecoder::new();
    run_sequence(
        &mut decoder,
        &[
            Step {
                block: &[
                    0x82, 0x86, 0x84, 0x41, 0x0f, 0x77, 0x77, 0x77, 0x2e, 0x65, 0x78, 0x61, 0x6d,
                    0x70, 0x6c, 0x65, 0x2e, 0x63, 0x6f, 0x6d,
                ],
                expect: REQUEST_HEADERS_1,
            },
            Step {
                block: &[
                    0x82, 0x86, 0x84, 0xbe, 0x58, 0x08, 0x6e, 0x6f, 0x2d, 0x63, 0x61, 0x63, 0x68,
                    0x65,
                ],
                expect: REQUEST_HEADERS_2,
            },
            Step {
                block: &[
                    0x82, 0x87, 0x85, 0xbf, 0x40, 0x0a, 0x63, 0x75, 0x73, 0x74, 0x6f, 0x6d, 0x2d,
                    0x6b, 0x65, 0x79, 0x0c, 0x63, 0x75, 0x73, 0x74, 0x6f, 0x6d, 0x2d, 0x76, 0x61,
                    0x6c, 0x75, 0x65,
                ],
                expect: REQUEST_HEADERS_3,
            },
        ],
    );
}

pub fn rfc7541_c4_request_sequence_with_huffman() {
    let mut decoder = HpackDecoder::new();
    run_sequence(
        &mut decoder,
        &[
            Step {
                block: &[
                    0x82, 0x86, 0x84, 0x41, 0x8c, 0xf1, 0xe3, 0xc2, 0xe5, 0xf2, 0x3a, 0x6b, 0xa0,
                    0xab, 0x90, 0xf4, 0xff,
                ],
                expect: REQUEST_HEADERS_1,
            },
            Step {
                block: &[
                    0x82, 0x86, 0x84, 0xbe, 0x58, 0x86, 0xa8, 0xeb, 0x10, 0x64, 0x9c, 0xbf,
                ],
                expect: REQUEST_HEADERS_2,
            },
            Step {
                block: &[
                    0x82, 0x87, 0x85, 0xbf, 0x40, 0x88, 0x25, 0xa8, 0x49, 0xe9, 0x5b, 0xa9, 0x7d,
                    0x7f, 0x89, 0x25, 0xa8, 0x49, 0xe9, 0x5b, 0xb8, 0xe8, 0xb4, 0xbf,
                ],
                expect: REQUEST_HEADERS_3,
            },
        ],
    );
}

pub fn rfc7541_c5_response_sequence_without_huffman() {
    let mut decoder = HpackDecoder::new();
    // The example runs with SETTINGS_HEADER_TABLE_SIZE = 256.
    decoder.set_protocol_max_size(256);
    run_sequence(
        &mut decoder,
        &[
            Step {
                block: &[
                    0x48, 0x03, 0x33, 0x30, 0x32, 0x58, 0x07, 0x70, 0x72, 0x69, 0x76, 0x61, 0x74,
                    0x65, 0x61, 0x1d, 0x4d, 0x6f, 0x6e, 0x2c, 0x20, 0x32, 0x31, 0x20, 0x4f, 0x63,
                    0x74, 0x20, 0x32, 0x30, 0x31, 0x33, 0x20, 0x32, 0x30, 0x3a, 0x31, 0x33, 0x3a,
                    0x32, 0x31, 0x20, 0x47, 0x4d, 0x54, 0x6e, 0x17, 0x68, 0x74, 0x74, 0x70, 0x73,
                    0x3a, 0x2f, 0x2f, 0x77, 0x77, 0x77, 0x2e, 0x65, 0x78, 0x61, 0x6d, 0x70, 0x6c,
                    0x65, 0x2e, 0x63, 0x6f, 0x6d,
                ],
                expect: RESPONSE_HEADERS_1,
            },
            Step {
                block: &[0x48, 0x03, 0x33, 0x30, 0x37, 0xc1, 0xc0, 0xbf],
                expect: RESPONSE_HEADERS_2,
            },
            Step {
                block: &[
                    0x88, 0xc1, 0x61, 0x1d, 0x4d, 0x6f, 0x6e, 0x2c, 0x20, 0x32, 0x31, 0x20, 0x4f,
                    0x63, 0x74, 0x20, 0x32, 0x30, 0x31, 0x33, 0x20, 0x32, 0x30, 0x3a, 0x31, 0x33,
                    0x3a, 0x32, 0x32, 0x20, 0x47, 0x4d, 0x54, 0xc0, 0x5a, 0x04, 0x67, 0x7a, 0x69,
                    0x70, 0x77, 0x38, 0x66, 0x6f, 0x6f, 0x3d, 0x41, 0x53, 0x44, 0x4a, 0x4b, 0x48,
                    0x51, 0x4b, 0x42, 0x5a, 0x58, 0x4f, 0x51, 0x57, 0x45, 0x4f, 0x50, 0x49, 0x55,
                    0x41, 0x58, 0x51, 0x57, 0x45, 0x4f, 0x49, 0x55, 0x3b, 0x20, 0x6d, 0x61, 0x78,
                    0x2d, 0x61, 0x67, 0x65, 0x3d, 0x33, 0x36, 0x30, 0x30, 0x3b, 0x20, 0x76, 0x65,
                    0x72, 0x73, 0x69, 0x6f, 0x6e, 0x3d, 0x31,
                ],
                expect: RESPONSE_HEADERS_3,
            },
        ],
    );
}

pub fn rfc7541_c6_response_sequence_with_huffman() {
    let mut decoder = HpackDecoder::new();
    decoder.set_protocol_max_size(256);
    run_sequence(
        &mut decoder,
        &[
            Step {
                block: &[
                    0x48, 0x82, 0x64, 0x02, 0x58, 0x85, 0xae, 0xc3, 0x77, 0x1a, 0x4b, 0x61, 0x96,
                    0xd0, 0x7a, 0xbe, 0x94, 0x10, 0x54, 0xd4, 0x44, 0xa8, 0x20, 0x05, 0x95, 0x04,
                    0x0b, 0x81, 0x66, 0xe0, 0x82, 0xa6, 0x2d, 0x1b, 0xff, 0x6e, 0x91, 0x9d, 0x29,
                    0xad, 0x17, 0x18, 0x63, 0xc7, 0x8f, 0x0b, 0x97, 0xc8, 0xe9, 0xae, 0x82, 0xae,
                    0x43, 0xd3,
                ],
                expect: RESPONSE_HEADERS_1,
            },
            Step {
                block: &[0x48, 0x83, 0x64, 0x0e, 0xff, 0xc1, 0xc0, 0xbf],
                expect: RESPONSE_HEADERS_2,
            },
            Step {
                block: &[
                    0x88, 0xc1, 0x61, 0x96, 0xd0, 0x7a, 0xbe, 0x94, 0x10, 0x54, 0xd4, 0x44, 0xa8,
                    0x20, 0x05, 0x95, 0x04, 0x0b, 0x81, 0x66, 0xe0, 0x84, 0xa6, 0x2d, 0x1b, 0xff,
                    0xc0, 0x5a, 0x83, 0x9b, 0xd9, 0xab, 0x77, 0xad, 0x94, 0xe7, 0x82, 0x1d, 0xd7,
                    0xf2, 0xe6, 0xc7, 0xb3, 0x35, 0xdf, 0xdf, 0xcd, 0x5b, 0x39, 0x60, 0xd5, 0xaf,
                    0x27, 0x08, 0x7f, 0x36, 0x72, 0xc1, 0xab, 0x27, 0x0f, 0xb5, 0x29, 0x1f, 0x95,
                    0x87, 0x31, 0x60, 0x65, 0xc0, 0x03, 0xed, 0x4e, 0xe5, 0xb1, 0x06, 0x3d, 0x50,
                    0x07,
                ],
                expect: RESPONSE_HEADERS_3,
            },
        ],
    );
}

/// Random header list; names lower-case, values printable with occasional
/// non-ASCII UTF-8.
pub fn random_headers(rng: &mut StdRng) -> Vec<(String, String)> {
    let name_pool = [
        ":method",
        ":path",
        ":status",
        ":authority",
        "content-type",
        "content-length",
        "user-agent",
        "location",
        "x-correlation-id",
    ];
    let count = rng.random_range(1..8usize);
    (0..count)
        .map(|_| {
            let name = if rng.random_bool(0.6) {
                name_pool[rng.random_range(0..name_pool.len())].to_string()
            } else {
                let len = rng.random_range(1..12usize);
                (0..len)
                    .map(|_| char::from(rng.random_range(b'a'..=b'z')))
                    .collect()
            };
            let value = if rng.random_bool(0.9) {
                let len = rng.random_range(0..24usize);
                (0..len)
                    .map(|_| char::from(rng.random_range(b' '..=b'~')))
                    .collect()
            } else {
                "päyload-ünïcode".to_string()
            };
            (name, value)
        })
        .collect()
}

/// Encodes and decodes `iterations` random header lists; returns how many
/// did not round-trip exactly.
pub fn run_roundtrips(iterations: usize, seed: u64) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut encoder = TestEncoder::new();
    let mut decoder = HpackDecoder::new();
    let mut mismatches = 0;
    for i in 0..iterations {
        let headers = random_headers(&mut rng);
        let block = encoder.encode_randomized(&headers, &mut rng);
        let list = decoder.decode_block(&block, false);
        if list.completeness != Completeness::Complete || list.fields != headers {
            eprintln!("round-trip {i} mismatch: {headers:?} -> {:?}", list.fields);
            mismatches += 1;
        }
    }
    mismatches
}
