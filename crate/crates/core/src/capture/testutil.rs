//! Test-only builders for synthetic capture bytes.

/// Specification of one Ethernet/IPv4/TCP packet.
pub struct TcpPacketSpec {
    pub src_ip: [u8; 4],
    pub dst_ip: [u8; 4],
    pub src_port: u16,
    pub dst_port: u16,
    pub seq: u32,
    pub flags: u8,
    pub ts_sec: u32,
    pub ts_usec: u32,
    pub payload: Vec<u8>,
    /// Pad the link-layer frame with zero bytes up to this length.
    pub pad_frame_to: usize,
}

impl TcpPacketSpec {
    pub fn basic(payload: &[u8]) -> TcpPacketSpec {
        TcpPacketSpec {
            src_ip: [10, 0, 0, 1],
            dst_ip: [10, 0, 0, 2],
            src_port: 40000,
            dst_port: 8080,
            seq: 1000,
            flags: 0x18, // PSH|ACK
            ts_sec: 1_700_000_000,
            ts_usec: 0,
            payload: payload.to_vec(),
            pad_frame_to: 0,
        }
    }

    pub fn frame_bytes(&self) -> Vec<u8> {
        let mut ip = Vec::new();
        let total_len = 20 + 20 + self.payload.len();
        ip.push(0x45);
        ip.push(0);
        ip.extend_from_slice(&(total_len as u16).to_be_bytes());
        ip.extend_from_slice(&[0, 0, 0x40, 0, 64, 6, 0, 0]); // DF, TTL 64, TCP, checksum 0
        ip.extend_from_slice(&self.src_ip);
        ip.extend_from_slice(&self.dst_ip);
        // TCP header
        ip.extend_from_slice(&self.src_port.to_be_bytes());
        ip.extend_from_slice(&self.dst_port.to_be_bytes());
        ip.extend_from_slice(&self.seq.to_be_bytes());
        ip.extend_from_slice(&0u32.to_be_bytes()); // ack
        ip.push(5 << 4); // data offset 5 words
        ip.push(self.flags);
        ip.extend_from_slice(&[0xff, 0xff, 0, 0, 0, 0]); // window, checksum, urgent
        ip.extend_from_slice(&self.payload);

        let mut frame = Vec::new();
        frame.extend_from_slice(&[0x02; 6]); // dst mac
        frame.extend_from_slice(&[0x04; 6]); // src mac
        frame.extend_from_slice(&0x0800u16.to_be_bytes());
        frame.extend_from_slice(&ip);
        while frame.len() < self.pad_frame_to {
            frame.push(0);
        }
        frame
    }
}

/// Writes classic PCAP bytes, optionally with byte-swapped headers.
pub struct PcapWriter {
    swapped: bool,
    out: Vec<u8>,
}

impl PcapWriter {
    pub fn new(swapped: bool) -> PcapWriter {
        let mut w = PcapWriter {
            swapped,
            out: Vec::new(),
        };
        w.u32(0xa1b2_c3d4);
        w.u16(2);
        w.u16(4);
        w.u32(0); // thiszone
        w.u32(0); // sigfigs
        w.u32(65535); // snaplen
        w.u32(1); // ethernet
        w
    }

    fn u16(&mut self, v: u16) {
        let bytes = if self.swapped {
            v.to_be_bytes()
        } else {
            v.to_le_bytes()
        };
        self.out.extend_from_slice(&bytes);
    }

    fn u32(&mut self, v: u32) {
        let bytes = if self.swapped {
            v.to_be_bytes()
        } else {
            v.to_le_bytes()
        };
        self.out.extend_from_slice(&bytes);
    }

    pub fn push_frame(&mut self, ts_sec: u32, ts_usec: u32, frame: &[u8]) {
        self.u32(ts_sec);
        self.u32(ts_usec);
        self.u32(frame.len() as u32);
        self.u32(frame.len() as u32);
        self.out.extend_from_slice(frame);
    }

    pub fn push_tcp(&mut self, spec: &TcpPacketSpec) {
        let frame = spec.frame_bytes();
        self.push_frame(spec.ts_sec, spec.ts_usec, &frame);
    }

    /// A UDP packet that the TCP pipeline must skip.
    pub fn push_udp_noise(&mut self) {
        let mut frame = Vec::new();
        frame.extend_from_slice(&[0x02; 6]);
        frame.extend_from_slice(&[0x04; 6]);
        frame.extend_from_slice(&0x0800u16.to_be_bytes());
        let payload = b"noise";
        let total_len = 20 + 8 + payload.len();
        frame.push(0x45);
        frame.push(0);
        frame.extend_from_slice(&(total_len as u16).to_be_bytes());
        frame.extend_from_slice(&[0, 0, 0x40, 0, 64, 17, 0, 0]); // UDP
        frame.extend_from_slice(&[10, 0, 0, 1]);
        frame.extend_from_slice(&[10, 0, 0, 2]);
        frame.extend_from_slice(&5353u16.to_be_bytes());
        frame.extend_from_slice(&5353u16.to_be_bytes());
        frame.extend_from_slice(&((8 + payload.len()) as u16).to_be_bytes());
        frame.extend_from_slice(&[0, 0]);
        frame.extend_from_slice(payload);
        self.push_frame(1_700_000_000, 0, &frame);
    }

    pub fn finish(self) -> Vec<u8> {
        self.out
    }
}

/// Minimal PCAPNG encoding (SHB + IDB + one EPB per frame, little-endian,
/// microsecond resolution) of the same frames a [`PcapWriter`] would write.
pub fn pcapng_bytes(frames: &[(u32, u32, Vec<u8>)]) -> Vec<u8> {
    fn block(out: &mut Vec<u8>, block_type: u32, body: &[u8]) {
        let total = 12 + body.len().div_ceil(4) * 4;
        out.extend_from_slice(&block_type.to_le_bytes());
        out.extend_from_slice(&(total as u32).to_le_bytes());
        out.extend_from_slice(body);
        for _ in 0..(total - 12 - body.len()) {
            out.push(0);
        }
        out.extend_from_slice(&(total as u32).to_le_bytes());
    }

    let mut out = Vec::new();
    let mut shb = Vec::new();
    shb.extend_from_slice(&0x1a2b_3c4du32.to_le_bytes());
    shb.extend_from_slice(&1u16.to_le_bytes());
    shb.extend_from_slice(&0u16.to_le_bytes());
    shb.extend_from_slice(&(-1i64).to_le_bytes());
    block(&mut out, 0x0a0d_0d0a, &shb);

    let mut idb = Vec::new();
    idb.extend_from_slice(&1u16.to_le_bytes()); // ethernet
    idb.extend_from_slice(&0u16.to_le_bytes());
    idb.extend_from_slice(&65535u32.to_le_bytes());
    block(&mut out, 0x0000_0001, &idb);

    for (ts_sec, ts_usec, frame) in frames {
        let ts = u64::from(*ts_sec) * 1_000_000 + u64::from(*ts_usec);
        let mut epb = Vec::new();
        epb.extend_from_slice(&0u32.to_le_bytes()); // interface id
        epb.extend_from_slice(&((ts >> 32) as u32).to_le_bytes());
        epb.extend_from_slice(&(ts as u32).to_le_bytes());
        epb.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        epb.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        epb.extend_from_slice(frame);
        while epb.len() % 4 != 0 {
            epb.push(0);
        }
        block(&mut out, 0x0000_0006, &epb);
    }
    out
}
