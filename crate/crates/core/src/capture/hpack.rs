//! HPACK header block decoding (RFC 7541) with mid-stream tolerance.
//!
//! A capture that starts inside a running connection misses the header
//! blocks that populated the peer's dynamic table. When a block is decoded
//! in that degraded mode, an indexed reference into an unknown table slot is
//! skipped and counted instead of aborting, so later literal headers still
//! come out.

use std::collections::VecDeque;
use std::sync::OnceLock;

use super::hpack_tables::{HUFFMAN_CODES, STATIC_TABLE};

/// Default dynamic table size before any SETTINGS is seen.
pub const DEFAULT_TABLE_SIZE: usize = 4096;

/// Per-entry overhead defined by the RFC.
const ENTRY_OVERHEAD: usize = 32;

/// Whether every reference in a block could be resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    Degraded { undecodable: u32 },
}

/// Decoded header list, names lower-case, pseudo-headers first on the wire.
#[derive(Debug, Clone, PartialEq)]
pub struct HeaderList {
    pub fields: Vec<(String, String)>,
    pub completeness: Completeness,
}

impl HeaderList {
    pub fn complete(fields: Vec<(String, String)>) -> HeaderList {
        HeaderList {
            fields,
            completeness: Completeness::Complete,
        }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn is_degraded(&self) -> bool {
        matches!(self.completeness, Completeness::Degraded { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DecodeError {
    IntegerOverflow,
    HuffmanPadding,
    InvalidIndex,
    Truncated,
}

/// Connection-direction HPACK state.
#[derive(Debug)]
pub struct HpackDecoder {
    dynamic: VecDeque<(String, String)>,
    dynamic_size: usize,
    max_size: usize,
    /// Upper bound announced via SETTINGS_HEADER_TABLE_SIZE.
    protocol_max: usize,
}

impl Default for HpackDecoder {
    fn default() -> Self {
        HpackDecoder::new()
    }
}

impl HpackDecoder {
    pub fn new() -> HpackDecoder {
        HpackDecoder {
            dynamic: VecDeque::new(),
            dynamic_size: 0,
            max_size: DEFAULT_TABLE_SIZE,
            protocol_max: DEFAULT_TABLE_SIZE,
        }
    }

    /// Applies a SETTINGS_HEADER_TABLE_SIZE announcement.
    pub fn set_protocol_max_size(&mut self, size: usize) {
        self.protocol_max = size;
        if self.max_size > size {
            self.set_max_size(size);
        }
    }

    fn set_max_size(&mut self, size: usize) {
        self.max_size = size;
        self.evict_to_fit(0);
    }

    fn evict_to_fit(&mut self, incoming: usize) {
        while self.dynamic_size + incoming > self.max_size {
            match self.dynamic.pop_back() {
                Some((name, value)) => {
                    self.dynamic_size -= name.len() + value.len() + ENTRY_OVERHEAD;
                }
                None => break,
            }
        }
    }

    fn insert(&mut self, name: String, value: String) {
        let entry_size = name.len() + value.len() + ENTRY_OVERHEAD;
        if entry_size > self.max_size {
            // An oversized entry empties the table (RFC 7541 section 4.4).
            self.dynamic.clear();
            self.dynamic_size = 0;
            return;
        }
        self.evict_to_fit(entry_size);
        self.dynamic_size += entry_size;
        self.dynamic.push_front((name, value));
    }

    fn lookup(&self, index: u64) -> Option<(String, String)> {
        if index == 0 {
            return None;
        }
        let index = usize::try_from(index).ok()?;
        if index <= STATIC_TABLE.len() {
            let (n, v) = STATIC_TABLE[index - 1];
            return Some((n.to_string(), v.to_string()));
        }
        self.dynamic.get(index - STATIC_TABLE.len() - 1).cloned()
    }

    #[cfg(test)]
    pub(crate) fn dynamic_entries(&self) -> Vec<(String, String)> {
        self.dynamic.iter().cloned().collect()
    }

    /// Decodes one header block. With `degraded_start` set, references into
    /// unknown dynamic slots are skipped and counted; otherwise any decode
    /// error abandons the rest of the block and the list is marked degraded.
    pub fn decode_block(&mut self, block: &[u8], degraded_start: bool) -> HeaderList {
        let mut fields = Vec::new();
        let mut undecodable = 0u32;
        let mut pos = 0usize;
        let mut hard_error = false;

        while pos < block.len() {
            match self.decode_field(block, &mut pos, degraded_start, &mut undecodable, &mut fields)
            {
                Ok(()) => {}
                Err(_) => {
                    undecodable += 1;
                    hard_error = true;
                    break;
                }
            }
        }

        let completeness = if undecodable > 0 || hard_error {
            Completeness::Degraded { undecodable }
        } else {
            Completeness::Complete
        };
        HeaderList {
            fields,
            completeness,
        }
    }

    fn decode_field(
        &mut self,
        block: &[u8],
        pos: &mut usize,
        degraded: bool,
        undecodable: &mut u32,
        fields: &mut Vec<(String, String)>,
    ) -> Result<(), DecodeError> {
        let first = block[*pos];
        if first & 0x80 != 0 {
            // Indexed header field.
            let index = decode_integer(block, pos, 7)?;
            match self.lookup(index) {
                Some((name, value)) => fields.push((name, value)),
                None => {
                    if degraded {
                        *undecodable += 1;
                    } else {
                        return Err(DecodeError::InvalidIndex);
                    }
                }
            }
            return Ok(());
        }
        if first & 0xc0 == 0x40 {
            // Literal with incremental indexing.
            let name_index = decode_integer(block, pos, 6)?;
            let (name, name_known) = if name_index == 0 {
                (self.decode_string(block, pos)?.to_ascii_lowercase(), true)
            } else {
                match self.lookup(name_index) {
                    Some((name, _)) => (name, true),
                    None if degraded => (String::new(), false),
                    None => return Err(DecodeError::InvalidIndex),
                }
            };
            let value = self.decode_string(block, pos)?;
            if name_known {
                fields.push((name.clone(), value.clone()));
            } else {
                *undecodable += 1;
            }
            // Insert even with an unknown name so later indices stay aligned.
            self.insert(name, value);
            return Ok(());
        }
        if first & 0xe0 == 0x20 {
            // Dynamic table size update.
            let size = decode_integer(block, pos, 5)? as usize;
            if size > self.protocol_max {
                if !degraded {
                    return Err(DecodeError::InvalidIndex);
                }
                self.set_max_size(self.protocol_max);
            } else {
                self.set_max_size(size);
            }
            return Ok(());
        }
        // Literal without indexing (0000) or never indexed (0001): both use
        // a 4-bit prefix and leave the table untouched.
        let name_index = decode_integer(block, pos, 4)?;
        let name = if name_index == 0 {
            self.decode_string(block, pos)?.to_ascii_lowercase()
        } else {
            match self.lookup(name_index) {
                Some((name, _)) => name,
                None if degraded => {
                    // Skip the value string to stay in sync.
                    let _ = self.decode_string(block, pos)?;
                    *undecodable += 1;
                    return Ok(());
                }
                None => return Err(DecodeError::InvalidIndex),
            }
        };
        let value = self.decode_string(block, pos)?;
        fields.push((name, value));
        Ok(())
    }

    fn decode_string(&self, block: &[u8], pos: &mut usize) -> Result<String, DecodeError> {
        if *pos >= block.len() {
            return Err(DecodeError::Truncated);
        }
        let huffman = block[*pos] & 0x80 != 0;
        let length = decode_integer(block, pos, 7)? as usize;
        if *pos + length > block.len() {
            return Err(DecodeError::Truncated);
        }
        let raw = &block[*pos..*pos + length];
        *pos += length;
        let bytes = if huffman {
            huffman_decode(raw)?
        } else {
            raw.to_vec()
        };
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }
}

/// Prefix-coded integer (RFC 7541 section 5.1). Values above 2^32-1 are refused.
fn decode_integer(block: &[u8], pos: &mut usize, prefix_bits: u8) -> Result<u64, DecodeError> {
    if *pos >= block.len() {
        return Err(DecodeError::Truncated);
    }
    let mask = (1u16 << prefix_bits) - 1;
    let mut value = u64::from(block[*pos] & mask as u8);
    *pos += 1;
    if value < u64::from(mask) {
        return Ok(value);
    }
    let mut shift = 0u32;
    loop {
        if *pos >= block.len() {
            return Err(DecodeError::Truncated);
        }
        let byte = block[*pos];
        *pos += 1;
        value += u64::from(byte & 0x7f) << shift;
        if value > u64::from(u32::MAX) {
            return Err(DecodeError::IntegerOverflow);
        }
        if byte & 0x80 == 0 {
            return Ok(value);
        }
        shift += 7;
        if shift > 28 {
            return Err(DecodeError::IntegerOverflow);
        }
    }
}

/// Binary trie over the 257 Huffman codes; built once.
struct HuffmanTrie {
    /// node -> [zero-child, one-child]; negative values encode symbols as
    /// -(symbol + 1), zero means unassigned.
    nodes: Vec<[i32; 2]>,
}

fn huffman_trie() -> &'static HuffmanTrie {
    static TRIE: OnceLock<HuffmanTrie> = OnceLock::new();
    TRIE.get_or_init(|| {
        let mut nodes: Vec<[i32; 2]> = vec![[0, 0]];
        for (symbol, (code, bits)) in HUFFMAN_CODES.iter().enumerate() {
            let mut node = 0usize;
            for i in (0..*bits).rev() {
                let bit = ((code >> i) & 1) as usize;
                if i == 0 {
                    nodes[node][bit] = -(symbol as i32 + 1);
                } else {
                    let next = nodes[node][bit];
                    let next = if next > 0 {
                        next as usize
                    } else {
                        nodes.push([0, 0]);
                        let idx = nodes.len() - 1;
                        nodes[node][bit] = idx as i32;
                        idx
                    };
                    node = next;
                }
            }
        }
        HuffmanTrie { nodes }
    })
}

fn huffman_decode(data: &[u8]) -> Result<Vec<u8>, DecodeError> {
    let trie = huffman_trie();
    let mut out = Vec::with_capacity(data.len() * 2);
    let mut node = 0usize;
    let mut padding_ones = true;
    let mut bits_in_symbol = 0u8;
    for byte in data {
        for i in (0..8).rev() {
            let bit = usize::from((byte >> i) & 1);
            if bit == 0 {
                padding_ones = false;
            }
            bits_in_symbol += 1;
            match trie.nodes[node][bit] {
                0 => return Err(DecodeError::HuffmanPadding),
                n if n < 0 => {
                    let symbol = (-n - 1) as u32;
                    if symbol == 256 {
                        // EOS inside the string is a coding error.
                        return Err(DecodeError::HuffmanPadding);
                    }
                    out.push(symbol as u8);
                    node = 0;
                    padding_ones = true;
                    bits_in_symbol = 0;
                }
                n => node = n as usize,
            }
        }
    }
    // Leftover bits must be a strict prefix of EOS: fewer than 8 set bits.
    if bits_in_symbol >= 8 || !padding_ones {
        return Err(DecodeError::HuffmanPadding);
    }
    Ok(out)
}
