//! Generates the synthetic capture files under fixtures/.
//!
//! Each fixture pairs a trimmed specification (committed as YAML next to the
//! captures) with a bad.pcap reproducing one documented conformance issue
//! and a good.pcap carrying the corrected variant. The generator is
//! deterministic: rerunning it reproduces the committed bytes.
//!
//! Usage: fixturegen [repo-root]

use std::io::Write;
use std::path::{Path, PathBuf};

// ---------------------------------------------------------------------------
// PCAP + TCP synthesis
// ---------------------------------------------------------------------------

struct PcapFile {
    packets: Vec<Vec<u8>>,
}

impl PcapFile {
    fn new() -> PcapFile {
        PcapFile {
            packets: Vec::new(),
        }
    }

    fn header() -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&0xa1b2_c3d4u32.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&4u16.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&65535u32.to_le_bytes());
        out.extend_from_slice(&1u32.to_le_bytes()); // ethernet
        out
    }

    fn render(&self, skip_packets: usize) -> Vec<u8> {
        let mut out = PcapFile::header();
        for (i, frame) in self.packets.iter().enumerate() {
            if i < skip_packets {
                continue;
            }
            let ts_sec = 1_700_000_000u32 + i as u32;
            out.extend_from_slice(&ts_sec.to_le_bytes());
            out.extend_from_slice(&0u32.to_le_bytes());
            out.extend_from_slice(&(frame.len() as u32).to_le_bytes());
            out.extend_from_slice(&(frame.len() as u32).to_le_bytes());
            out.extend_from_slice(frame);
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Peer {
    ip: [u8; 4],
    port: u16,
}

/// One TCP connection being written into a capture.
struct Session<'f> {
    file: &'f mut PcapFile,
    client: Peer,
    server: Peer,
    client_seq: u32,
    server_seq: u32,
}

impl<'f> Session<'f> {
    fn new(file: &'f mut PcapFile, client: Peer, server: Peer) -> Session<'f> {
        let mut session = Session {
            file,
            client,
            server,
            client_seq: 0x1000_0000,
            server_seq: 0x2000_0000,
        };
        session.raw_packet(true, 0x02, &[]); // SYN
        session.client_seq = session.client_seq.wrapping_add(1);
        session.raw_packet(false, 0x12, &[]); // SYN|ACK
        session.server_seq = session.server_seq.wrapping_add(1);
        session.raw_packet(true, 0x10, &[]); // ACK
        session
    }

    fn client_send(&mut self, payload: &[u8]) {
        self.raw_packet(true, 0x18, payload);
        self.client_seq = self.client_seq.wrapping_add(payload.len() as u32);
    }

    fn server_send(&mut self, payload: &[u8]) {
        self.raw_packet(false, 0x18, payload);
        self.server_seq = self.server_seq.wrapping_add(payload.len() as u32);
    }

    fn raw_packet(&mut self, from_client: bool, flags: u8, payload: &[u8]) {
        let (src, dst, seq) = if from_client {
            (self.client, self.server, self.client_seq)
        } else {
            (self.server, self.client, self.server_seq)
        };
        let mut ip = Vec::new();
        let total_len = 40 + payload.len();
        ip.push(0x45);
        ip.push(0);
        ip.extend_from_slice(&(total_len as u16).to_be_bytes());
        ip.extend_from_slice(&[0, 0, 0x40, 0, 64, 6, 0, 0]);
        ip.extend_from_slice(&src.ip);
        ip.extend_from_slice(&dst.ip);
        ip.extend_from_slice(&src.port.to_be_bytes());
        ip.extend_from_slice(&dst.port.to_be_bytes());
        ip.extend_from_slice(&seq.to_be_bytes());
        ip.extend_from_slice(&0u32.to_be_bytes());
        ip.push(5 << 4);
        ip.push(flags);
        ip.extend_from_slice(&[0xff, 0xff, 0, 0, 0, 0]);
        ip.extend_from_slice(payload);

        let mut frame = Vec::new();
        frame.extend_from_slice(&[0x02, 0, 0, 0, 0, 1]);
        frame.extend_from_slice(&[0x02, 0, 0, 0, 0, 2]);
        frame.extend_from_slice(&0x0800u16.to_be_bytes());
        frame.extend_from_slice(&ip);
        self.file.packets.push(frame);
    }
}

// ---------------------------------------------------------------------------
// HTTP/2 + HPACK synthesis
// ---------------------------------------------------------------------------

const CLIENT_PREFACE: &[u8] = b"PRI * HTTP/2.0\r\n\r\nSM\r\n\r\n";

fn frame(frame_type: u8, flags: u8, stream_id: u32, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(9 + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes()[1..]);
    out.push(frame_type);
    out.push(flags);
    out.extend_from_slice(&stream_id.to_be_bytes());
    out.extend_from_slice(payload);
    out
}

/// Minimal HPACK encoder. Headers are written as literals; with indexing
/// enabled they enter a dynamic table and repeat encodings become indexed
/// references, which is what the mid-stream fixture needs to lose.
struct Encoder {
    table: Vec<(String, String)>,
}

impl Encoder {
    fn new() -> Encoder {
        Encoder { table: Vec::new() }
    }

    fn encode(&mut self, headers: &[(&str, &str)], index: bool) -> Vec<u8> {
        self.encode_mixed(headers, if index { &[":path"] } else { &[] }, index)
    }

    /// `never_index` headers stay literal even when indexing is on; request
    /// paths routinely stay unindexed in real encoders, and the mid-stream
    /// fixture depends on paths surviving the cut.
    fn encode_mixed(
        &mut self,
        headers: &[(&str, &str)],
        never_index: &[&str],
        index: bool,
    ) -> Vec<u8> {
        let mut out = Vec::new();
        for (name, value) in headers {
            if let Some(i) = static_full_index(name, value) {
                out.push(0x80 | i);
                continue;
            }
            if index && !never_index.contains(name) {
                if let Some(pos) = self.table.iter().position(|(n, v)| n == name && v == value) {
                    let idx = 62 + pos as u64;
                    encode_integer(&mut out, idx, 7, 0x80);
                    continue;
                }
                // Literal with incremental indexing, new name.
                out.push(0x40);
                encode_string(&mut out, name);
                encode_string(&mut out, value);
                self.table.insert(0, (name.to_string(), value.to_string()));
            } else {
                // Literal never indexed, new name.
                out.push(0x10);
                encode_string(&mut out, name);
                encode_string(&mut out, value);
            }
        }
        out
    }
}

/// Static table entries that match on name and value.
fn static_full_index(name: &str, value: &str) -> Option<u8> {
    match (name, value) {
        (":method", "GET") => Some(2),
        (":method", "POST") => Some(3),
        (":path", "/") => Some(4),
        (":scheme", "http") => Some(6),
        (":scheme", "https") => Some(7),
        (":status", "200") => Some(8),
        (":status", "204") => Some(9),
        (":status", "404") => Some(13),
        (":status", "500") => Some(14),
        _ => None,
    }
}

fn encode_integer(out: &mut Vec<u8>, value: u64, prefix_bits: u8, pattern: u8) {
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

fn encode_string(out: &mut Vec<u8>, text: &str) {
    encode_integer(out, text.len() as u64, 7, 0);
    out.extend_from_slice(text.as_bytes());
}

// ---------------------------------------------------------------------------
// Exchange description
// ---------------------------------------------------------------------------

struct Exchange {
    method: &'static str,
    path: String,
    authority: &'static str,
    request_content_type: Option<&'static str>,
    request_body: Option<String>,
    status: &'static str,
    location: Option<String>,
    response_content_type: Option<&'static str>,
    response_body: Option<String>,
}

impl Exchange {
    fn new(method: &'static str, path: &str, status: &'static str) -> Exchange {
        Exchange {
            method,
            path: path.to_string(),
            authority: "core.testbed.local:7777",
            request_content_type: None,
            request_body: None,
            status,
            location: None,
            response_content_type: None,
            response_body: None,
        }
    }

    fn request_json(mut self, body: &str) -> Exchange {
        self.request_content_type = Some("application/json");
        self.request_body = Some(body.to_string());
        self
    }

    fn response_body(mut self, content_type: &'static str, body: &str) -> Exchange {
        self.response_content_type = Some(content_type);
        self.response_body = Some(body.to_string());
        self
    }

    fn location(mut self, value: &str) -> Exchange {
        self.location = Some(value.to_string());
        self
    }
}

/// Writes a single-connection capture holding the given exchanges, one h2
/// stream each, all headers as never-indexed literals.
fn capture_of(exchanges: &[Exchange]) -> Vec<u8> {
    let mut file = PcapFile::new();
    {
        let client = Peer {
            ip: [10, 20, 0, 2],
            port: 41852,
        };
        let server = Peer {
            ip: [10, 20, 0, 10],
            port: 7777,
        };
        let mut session = Session::new(&mut file, client, server);
        let mut encoder = Encoder::new();

        let mut client_bytes = CLIENT_PREFACE.to_vec();
        client_bytes.extend_from_slice(&frame(0x4, 0, 0, &[]));
        session.client_send(&client_bytes);
        session.server_send(&frame(0x4, 0, 0, &[]));
        session.client_send(&frame(0x4, 0x1, 0, &[])); // SETTINGS ack

        for (i, exchange) in exchanges.iter().enumerate() {
            let stream_id = (2 * i + 1) as u32;
            let mut request_headers: Vec<(&str, &str)> = vec![
                (":method", exchange.method),
                (":scheme", "http"),
                (":path", &exchange.path),
                (":authority", exchange.authority),
            ];
            if let Some(ct) = exchange.request_content_type {
                request_headers.push(("content-type", ct));
            }
            let request_block = encoder.encode(&request_headers, false);
            match &exchange.request_body {
                Some(body) => {
                    session.client_send(&frame(0x1, 0x4, stream_id, &request_block));
                    session.client_send(&frame(0x0, 0x1, stream_id, body.as_bytes()));
                }
                None => {
                    session.client_send(&frame(0x1, 0x4 | 0x1, stream_id, &request_block));
                }
            }

            let mut response_headers: Vec<(&str, &str)> =
                vec![(":status", exchange.status)];
            if let Some(location) = &exchange.location {
                response_headers.push(("location", location));
            }
            if let Some(ct) = exchange.response_content_type {
                response_headers.push(("content-type", ct));
            }
            let response_block = encoder.encode(&response_headers, false);
            match &exchange.response_body {
                Some(body) => {
                    session.server_send(&frame(0x1, 0x4, stream_id, &response_block));
                    session.server_send(&frame(0x0, 0x1, stream_id, body.as_bytes()));
                }
                None => {
                    session.server_send(&frame(0x1, 0x4 | 0x1, stream_id, &response_block));
                }
            }
        }
    }
    file.render(0)
}

// ---------------------------------------------------------------------------
// Fixture definitions
// ---------------------------------------------------------------------------

struct Fixture {
    dir: &'static str,
    bad: Vec<Exchange>,
    good: Vec<Exchange>,
}

fn fixtures() -> Vec<Fixture> {
    let nf_profile = |services: &str| {
        format!(
            r#"{{"nfInstanceId":"6ba7b810-9dad-11d1-80b4-00c04fd430c8","nfType":"AMF","nfStatus":"REGISTERED","fqdn":"amf.5gc.mnc001.mcc262.example.org","nfServiceList":{services}}}"#
        )
    };
    let auth_event = r#"{"nfInstanceId":"6ba7b810-9dad-11d1-80b4-00c04fd430c8","success":true,"timeStamp":"2024-05-01T12:30:00Z","authType":"5G_AKA","servingNetworkName":"5G:mnc001.mcc262.3gppnetwork.org"}"#;

    vec![
        Fixture {
            dir: "empty_nf_service_list",
            bad: vec![Exchange::new(
                "PUT",
                "/nnrf-nfm/v1/nf-instances/6ba7b810-9dad-11d1-80b4-00c04fd430c8",
                "200",
            )
            .request_json(&nf_profile("[]"))
            .response_body("application/json", &nf_profile(r#"[{"serviceInstanceId":"nfm-01","serviceName":"nnrf-nfm"}]"#))],
            good: vec![Exchange::new(
                "PUT",
                "/nnrf-nfm/v1/nf-instances/6ba7b810-9dad-11d1-80b4-00c04fd430c8",
                "200",
            )
            .request_json(&nf_profile(r#"[{"serviceInstanceId":"nfm-01","serviceName":"nnrf-nfm"}]"#))
            .response_body("application/json", &nf_profile(r#"[{"serviceInstanceId":"nfm-01","serviceName":"nnrf-nfm"}]"#))],
        },
        Fixture {
            dir: "udr_api_version",
            // The body is deliberately invalid under the v2 schema: version
            // mismatch must suppress payload validation entirely.
            bad: vec![Exchange::new(
                "PUT",
                "/nudr-dr/v1/subscription-data/imsi-262011234567890/authentication-data",
                "204",
            )
            .request_json(r#"{"permanentKey":{"encryptionKey":0}}"#)],
            good: vec![Exchange::new(
                "PUT",
                "/nudr-dr/v2/subscription-data/imsi-262011234567890/authentication-data",
                "204",
            )
            .request_json(
                r#"{"authenticationMethod":"5G_AKA","permanentKey":{"encryptionKey":0},"sequenceNumber":{"sqn":"000000000020"}}"#,
            )],
        },
        Fixture {
            dir: "subscription_id_format",
            bad: vec![Exchange::new("POST", "/nnrf-nfm/v1/subscriptions", "201")
                .request_json(r#"{"nfStatusNotificationUri":"http://amf.5gc.example.org:80/nnrf-notify"}"#)
                .location("/nnrf-nfm/v1/subscriptions/e0b72846-afa6-4f27-9b05-d815a17eb4b6")
                .response_body(
                    "application/json",
                    r#"{"nfStatusNotificationUri":"http://amf.5gc.example.org:80/nnrf-notify","subscriptionId":"e0b72846-afa6-4f27-9b05-d815a17eb4b6"}"#,
                )],
            good: vec![Exchange::new("POST", "/nnrf-nfm/v1/subscriptions", "201")
                .request_json(r#"{"nfStatusNotificationUri":"http://amf.5gc.example.org:80/nnrf-notify"}"#)
                .location("/nnrf-nfm/v1/subscriptions/26201-e0b72846afa64f27")
                .response_body(
                    "application/json",
                    r#"{"nfStatusNotificationUri":"http://amf.5gc.example.org:80/nnrf-notify","subscriptionId":"26201-e0b72846afa64f27"}"#,
                )],
        },
        Fixture {
            dir: "nf_profile_no_address",
            bad: vec![Exchange::new(
                "PUT",
                "/nnrf-nfm/v1/nf-instances/7cc8b0a2-1d34-45f8-9c1e-0a8f3b2d4e5f",
                "200",
            )
            .request_json(
                r#"{"nfInstanceId":"7cc8b0a2-1d34-45f8-9c1e-0a8f3b2d4e5f","nfType":"SMF","nfStatus":"REGISTERED","fqdn":"smf.example.org"}"#,
            )
            .response_body(
                "application/json",
                r#"{"nfInstanceId":"7cc8b0a2-1d34-45f8-9c1e-0a8f3b2d4e5f","nfType":"SMF","nfStatus":"REGISTERED"}"#,
            )],
            good: vec![Exchange::new(
                "PUT",
                "/nnrf-nfm/v1/nf-instances/7cc8b0a2-1d34-45f8-9c1e-0a8f3b2d4e5f",
                "200",
            )
            .request_json(
                r#"{"nfInstanceId":"7cc8b0a2-1d34-45f8-9c1e-0a8f3b2d4e5f","nfType":"SMF","nfStatus":"REGISTERED","fqdn":"smf.example.org"}"#,
            )
            .response_body(
                "application/json",
                r#"{"nfInstanceId":"7cc8b0a2-1d34-45f8-9c1e-0a8f3b2d4e5f","nfType":"SMF","nfStatus":"REGISTERED","fqdn":"smf.example.org"}"#,
            )],
        },
        Fixture {
            dir: "allowed_ssc_modes",
            bad: vec![Exchange::new(
                "GET",
                "/nudm-sdm/v2/imsi-262011234567890/sm-data",
                "200",
            )
            .response_body(
                "application/json",
                r#"{"dnnConfigurations":{"ims":{"sscModes":{"defaultSscMode":"SSC_MODE_1","allowedSscModes":["SSC_MODE_1","SSC_MODE_2","SSC_MODE_3"]}},"internet":{"sscModes":{"defaultSscMode":"SSC_MODE_1","allowedSscModes":["SSC_MODE_2"]}}}}"#,
            )],
            good: vec![Exchange::new(
                "GET",
                "/nudm-sdm/v2/imsi-262011234567890/sm-data",
                "200",
            )
            .response_body(
                "application/json",
                r#"{"dnnConfigurations":{"ims":{"sscModes":{"defaultSscMode":"SSC_MODE_1","allowedSscModes":["SSC_MODE_2","SSC_MODE_3"]}},"internet":{"sscModes":{"defaultSscMode":"SSC_MODE_1","allowedSscModes":["SSC_MODE_2"]}}}}"#,
            )],
        },
        Fixture {
            dir: "hal_content_type",
            bad: vec![Exchange::new("POST", "/nausf-auth/v1/ue-authentications", "201")
                .request_json(
                    r#"{"supiOrSuci":"suci-0-262-01-0000-0-0-1234567890","servingNetworkName":"5G:mnc001.mcc262.3gppnetwork.org"}"#,
                )
                .location("/nausf-auth/v1/ue-authentications/auth-ctx-4711")
                .response_body(
                    "application/json",
                    r#"{"authType":"5G_AKA","_links":{"5g-aka":{"href":"/nausf-auth/v1/ue-authentications/auth-ctx-4711/5g-aka-confirmation"}}}"#,
                )],
            good: vec![Exchange::new("POST", "/nausf-auth/v1/ue-authentications", "201")
                .request_json(
                    r#"{"supiOrSuci":"suci-0-262-01-0000-0-0-1234567890","servingNetworkName":"5G:mnc001.mcc262.3gppnetwork.org"}"#,
                )
                .location("/nausf-auth/v1/ue-authentications/auth-ctx-4711")
                .response_body(
                    "application/3gppHal+json",
                    r#"{"authType":"5G_AKA","_links":{"5g-aka":{"href":"/nausf-auth/v1/ue-authentications/auth-ctx-4711/5g-aka-confirmation"}}}"#,
                )],
        },
        Fixture {
            dir: "confirm_auth_null",
            bad: vec![Exchange::new(
                "POST",
                "/nudm-ueau/v1/imsi-262011234567890/auth-events",
                "201",
            )
            .request_json(auth_event)
            .response_body("application/json", "null")],
            good: vec![Exchange::new(
                "POST",
                "/nudm-ueau/v1/imsi-262011234567890/auth-events",
                "201",
            )
            .request_json(auth_event)
            .location("/nudm-ueau/v1/imsi-262011234567890/auth-events/1")
            .response_body("application/json", auth_event)],
        },
        Fixture {
            dir: "nulled_nf_instances",
            bad: vec![Exchange::new(
                "GET",
                "/nnrf-disc/v1/nf-instances?target-nf-type=SMF&requester-nf-type=AMF",
                "200",
            )
            .response_body(
                "application/json",
                r#"{"validityPeriod":3600,"nfInstances":null}"#,
            )],
            good: vec![Exchange::new(
                "GET",
                "/nnrf-disc/v1/nf-instances?target-nf-type=SMF&requester-nf-type=AMF",
                "200",
            )
            .response_body(
                "application/json",
                r#"{"validityPeriod":3600,"nfInstances":[]}"#,
            )],
        },
        Fixture {
            dir: "age_of_location",
            bad: vec![Exchange::new(
                "POST",
                "/nsmf-pdusession/v1/sm-contexts/sm-ctx-000042/modify",
                "204",
            )
            .request_json(
                r#"{"upCnxState":"ACTIVATED","ueLocation":{"nrLocation":{"tai":{"plmnId":{"mcc":"262","mnc":"01"},"tac":"0001"},"ageOfLocationInformation":-1,"ueLocationTimestamp":"2024-05-01T12:30:00Z"}}}"#,
            )],
            good: vec![Exchange::new(
                "POST",
                "/nsmf-pdusession/v1/sm-contexts/sm-ctx-000042/modify",
                "204",
            )
            .request_json(
                r#"{"upCnxState":"ACTIVATED","ueLocation":{"nrLocation":{"tai":{"plmnId":{"mcc":"262","mnc":"01"},"tac":"0001"},"ageOfLocationInformation":120,"ueLocationTimestamp":"2024-05-01T12:30:00Z"}}}"#,
            )],
        },
        Fixture {
            dir: "wrapped_subscr_cond",
            bad: vec![Exchange::new("POST", "/nnrf-nfm/v1/subscriptions", "201")
                .request_json(
                    r#"{"nfStatusNotificationUri":"http://smf.5gc.example.org:80/nnrf-notify","subscrCond":{"nfTypeCond":{"nfType":"AMF"}}}"#,
                )
                .response_body(
                    "application/json",
                    r#"{"nfStatusNotificationUri":"http://smf.5gc.example.org:80/nnrf-notify","subscrCond":{"nfType":"AMF"}}"#,
                )],
            good: vec![Exchange::new("POST", "/nnrf-nfm/v1/subscriptions", "201")
                .request_json(
                    r#"{"nfStatusNotificationUri":"http://smf.5gc.example.org:80/nnrf-notify","subscrCond":{"nfType":"AMF"}}"#,
                )
                .response_body(
                    "application/json",
                    r#"{"nfStatusNotificationUri":"http://smf.5gc.example.org:80/nnrf-notify","subscrCond":{"nfType":"AMF"}}"#,
                )],
        },
        Fixture {
            dir: "boolean_auth_result",
            bad: vec![Exchange::new(
                "PUT",
                "/nausf-auth/v1/ue-authentications/auth-ctx-4711/5g-aka-confirmation",
                "200",
            )
            .request_json(r#"{"resStar":"00112233445566778899aabbccddeeff"}"#)
            .response_body("application/json", r#"{"authResult":true}"#)],
            good: vec![Exchange::new(
                "PUT",
                "/nausf-auth/v1/ue-authentications/auth-ctx-4711/5g-aka-confirmation",
                "200",
            )
            .request_json(r#"{"resStar":"00112233445566778899aabbccddeeff"}"#)
            .response_body(
                "application/json",
                r#"{"authResult":"AUTHENTICATION_SUCCESS","supi":"imsi-262011234567890"}"#,
            )],
        },
        Fixture {
            dir: "sd_encoding",
            bad: vec![Exchange::new("POST", "/nsmf-pdusession/v1/sm-contexts", "201")
                .request_json(
                    r#"{"supi":"imsi-262011234567890","dnn":"internet","sNssai":{"sst":1,"sd":"1F"}}"#,
                )
                .location("/nsmf-pdusession/v1/sm-contexts/sm-ctx-000042")
                .response_body("application/json", r#"{"upCnxState":"ACTIVATED"}"#)],
            good: vec![Exchange::new("POST", "/nsmf-pdusession/v1/sm-contexts", "201")
                .request_json(
                    r#"{"supi":"imsi-262011234567890","dnn":"internet","sNssai":{"sst":1,"sd":"A08923"}}"#,
                )
                .location("/nsmf-pdusession/v1/sm-contexts/sm-ctx-000042")
                .response_body("application/json", r#"{"upCnxState":"ACTIVATED"}"#)],
        },
    ]
}

// ---------------------------------------------------------------------------
// Mid-stream fixture
// ---------------------------------------------------------------------------

/// Builds the heartbeat capture used for mid-stream robustness: headers that
/// repeat across requests are incrementally indexed, so chopping away the
/// connection start also removes the dynamic-table context. Returns the
/// packet file plus the packet count that covers the preface, both SETTINGS
/// and the first ten HTTP/2 frames.
fn midstream_capture() -> (PcapFile, usize) {
    let mut file = PcapFile::new();
    let client = Peer {
        ip: [10, 20, 0, 3],
        port: 50411,
    };
    let server = Peer {
        ip: [10, 20, 0, 10],
        port: 7777,
    };
    let mut session = Session::new(&mut file, client, server);
    let mut encoder = Encoder::new();

    let mut opening = CLIENT_PREFACE.to_vec();
    opening.extend_from_slice(&frame(0x4, 0, 0, &[]));
    session.client_send(&opening); // packet 3 (after handshake)
    session.server_send(&frame(0x4, 0, 0, &[])); // packet 4

    // Six heartbeat exchanges. Each HEADERS and DATA frame rides its own
    // packet so a packet cut maps exactly onto a frame cut.
    for i in 0..6u32 {
        let stream_id = 2 * i + 1;
        let body = format!(r#"{{"load":{},"status":"OPERATIVE"}}"#, 10 + i);
        let request_headers = encoder.encode(
            &[
                (":method", "POST"),
                (":scheme", "http"),
                (":path", "/nsbi-hb/v1/heartbeats"),
                (":authority", "hb.core.testbed.local:7777"),
                ("content-type", "application/json"),
                ("user-agent", "nf-heartbeat-agent/1.4"),
            ],
            true,
        );
        session.client_send(&frame(0x1, 0x4, stream_id, &request_headers));
        session.client_send(&frame(0x0, 0x1, stream_id, body.as_bytes()));
        let response_headers = encoder.encode(&[(":status", "204")], true);
        session.server_send(&frame(0x1, 0x4 | 0x1, stream_id, &response_headers));
    }

    // Handshake (3 packets) + opening pair (2 packets) + the first three
    // full exchanges (3 packets each): preface, both SETTINGS and eleven
    // h2 frames are gone.
    let skip = 3 + 2 + 9;
    (file, skip)
}

// ---------------------------------------------------------------------------

fn write(path: &Path, bytes: &[u8]) {
    let mut f = std::fs::File::create(path)
        .unwrap_or_else(|e| panic!("cannot create {}: {e}", path.display()));
    f.write_all(bytes).expect("write fixture bytes");
    println!("wrote {} ({} bytes)", path.display(), bytes.len());
}

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let fixtures_dir = root.join("fixtures");
    if !fixtures_dir.is_dir() {
        eprintln!(
            "fixtures directory not found at {}; pass the repository root",
            fixtures_dir.display()
        );
        std::process::exit(2);
    }

    for fixture in fixtures() {
        let dir = fixtures_dir.join(fixture.dir);
        std::fs::create_dir_all(&dir).expect("fixture dir");
        write(&dir.join("bad.pcap"), &capture_of(&fixture.bad));
        write(&dir.join("good.pcap"), &capture_of(&fixture.good));
    }

    let (midstream, skip) = midstream_capture();
    let dir = fixtures_dir.join("midstream");
    std::fs::create_dir_all(&dir).expect("fixture dir");
    write(&dir.join("full.pcap"), &midstream.render(0));
    write(&dir.join("midstream.pcap"), &midstream.render(skip));
}
