//! Words on the wire and path framing.
//!
//! A word is `W = ceil(log2 n) + 8` bits: an 8-bit tag above an id field
//! wide enough for one node id. Paths travel as a header word (tag carries
//! the edge count, id field carries the origin) followed by one word per
//! node, so a path of `λ` edges costs `λ + 2` words.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, SimplePath};

pub const TAG_BITS: u32 = 8;

const TAG_ID: u8 = 0x00;
const TAG_DEGREE: u8 = 0x80;
const TAG_PATH: u8 = 0x40;
const PATH_LEN_MASK: u8 = 0x3f;

/// Bit layout shared by every node of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordFormat {
    pub id_bits: u32,
}

impl WordFormat {
    pub fn for_nodes(n: usize) -> Self {
        let id_bits = if n <= 1 { 0 } else { usize::BITS - (n - 1).leading_zeros() };
        WordFormat { id_bits }
    }

    /// Total capacity `W` in bits.
    pub fn width(&self) -> u32 {
        self.id_bits + TAG_BITS
    }

    pub fn fits(&self, word: Word) -> bool {
        self.width() >= 64 || word.0 >> self.width() == 0
    }

    fn pack(&self, tag: u8, payload: u64) -> Word {
        debug_assert!(self.id_bits >= 64 || payload >> self.id_bits == 0);
        Word(((tag as u64) << self.id_bits) | payload)
    }

    pub fn id_word(&self, id: NodeId) -> Word {
        self.pack(TAG_ID, id as u64)
    }

    /// Degree announcement; the receiver learns the sender from the label.
    pub fn degree_word(&self, degree: usize) -> Word {
        self.pack(TAG_DEGREE, degree as u64)
    }

    pub fn path_header(&self, origin: NodeId, edges: usize) -> Word {
        assert!(edges <= PATH_LEN_MASK as usize, "path too long to frame");
        self.pack(TAG_PATH | edges as u8, origin as u64)
    }

    pub fn decode(&self, word: Word) -> Decoded {
        let tag = (word.0 >> self.id_bits) as u8;
        let payload = if self.id_bits >= 64 { word.0 } else { word.0 & ((1u64 << self.id_bits) - 1) };
        match tag {
            TAG_ID => Decoded::Id(payload as NodeId),
            TAG_DEGREE => Decoded::Degree(payload as usize),
            t if t & !PATH_LEN_MASK == TAG_PATH => Decoded::PathHeader {
                origin: payload as NodeId,
                edges: (t & PATH_LEN_MASK) as usize,
            },
            t => Decoded::Unknown(t),
        }
    }
}

/// One word of payload. Only the low `W` bits may be set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub u64);

impl fmt::LowerHex for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoded {
    Id(NodeId),
    Degree(usize),
    PathHeader { origin: NodeId, edges: usize },
    Unknown(u8),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("expected a path header, got {0:?}")]
    MissingHeader(Decoded),
    #[error("expected a node id inside a path body, got {0:?}")]
    UnexpectedWord(Decoded),
    #[error("first node {first} disagrees with header origin {origin}")]
    OriginMismatch { origin: NodeId, first: NodeId },
    #[error("stream ended inside a path ({missing} words missing)")]
    Truncated { missing: usize },
    #[error("{0} trailing words after the path")]
    Trailing(usize),
}

/// Header plus one word per node.
pub fn serialize_path(path: &SimplePath, format: &WordFormat) -> Vec<Word> {
    let mut words = Vec::with_capacity(path.nodes().len() + 1);
    words.push(format.path_header(path.origin(), path.len()));
    words.extend(path.nodes().iter().map(|&v| format.id_word(v)));
    words
}

/// Inverse of [`serialize_path`] for a single framed path.
pub fn deserialize_path(words: &[Word], format: &WordFormat) -> Result<SimplePath, DecodeError> {
    let mut stream = PathStream::default();
    let mut out = None;
    for (i, &w) in words.iter().enumerate() {
        if let Some(p) = stream.push(w, format)? {
            if i + 1 != words.len() {
                return Err(DecodeError::Trailing(words.len() - i - 1));
            }
            out = Some(p);
        }
    }
    match out {
        Some(p) => Ok(p),
        None => Err(DecodeError::Truncated { missing: stream.missing().max(1) }),
    }
}

/// Incremental decoder for one sender's stream of framed paths.
#[derive(Debug, Default, Clone)]
pub struct PathStream {
    pending: Option<(NodeId, usize, Vec<NodeId>)>,
}

impl PathStream {
    pub fn push(&mut self, word: Word, format: &WordFormat) -> Result<Option<SimplePath>, DecodeError> {
        let decoded = format.decode(word);
        match self.pending.take() {
            None => match decoded {
                Decoded::PathHeader { origin, edges } => {
                    self.pending = Some((origin, edges, Vec::with_capacity(edges + 1)));
                    Ok(None)
                }
                other => Err(DecodeError::MissingHeader(other)),
            },
            Some((origin, edges, mut nodes)) => {
                let Decoded::Id(v) = decoded else {
                    return Err(DecodeError::UnexpectedWord(decoded));
                };
                if nodes.is_empty() && v != origin {
                    return Err(DecodeError::OriginMismatch { origin, first: v });
                }
                nodes.push(v);
                if nodes.len() == edges + 1 {
                    Ok(Some(SimplePath(nodes)))
                } else {
                    self.pending = Some((origin, edges, nodes));
                    Ok(None)
                }
            }
        }
    }

    /// Words still expected to finish the current path (0 when idle).
    pub fn missing(&self) -> usize {
        self.pending.as_ref().map_or(0, |(_, edges, nodes)| edges + 1 - nodes.len())
    }
}

/// Per-sender demultiplexer: one [`PathStream`] per neighbor.
#[derive(Debug, Default, Clone)]
pub struct PathDemux {
    streams: BTreeMap<NodeId, PathStream>,
}

impl PathDemux {
    pub fn push(&mut self, from: NodeId, word: Word, format: &WordFormat) -> Result<Option<SimplePath>, DecodeError> {
        self.streams.entry(from).or_default().push(word, format)
    }

    /// Errors if some sender stopped mid-path.
    pub fn finish(&mut self) -> Result<(), DecodeError> {
        let missing: usize = self.streams.values().map(PathStream::missing).sum();
        self.streams.clear();
        if missing > 0 {
            Err(DecodeError::Truncated { missing })
        } else {
            Ok(())
        }
    }
}
