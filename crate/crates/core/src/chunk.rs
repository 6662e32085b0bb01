//! Recursive character splitting with overlap.
//!
//! The document is first cut into pieces no longer than `chunk_size`,
//! trying paragraph breaks, then line breaks, then sentence ends, then
//! spaces, and finally single characters. Separators stay attached to the
//! piece they end, so pieces tile the document exactly. Pieces are then
//! packed greedily into chunks; each new chunk starts with the trailing
//! pieces of the previous one that fit in `overlap` characters.
//!
//! Offsets and sizes count characters, not bytes.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub id: String,
    pub text: String,
    /// Character offset of the first character.
    pub start: usize,
    /// Character offset one past the last character.
    pub end: usize,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkingConfig {
    chunk_size: usize,
    overlap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChunkingError {
    #[error("chunk size must be positive")]
    ZeroSize,
    #[error("overlap {overlap} must be smaller than chunk size {chunk_size}")]
    OverlapTooLarge { chunk_size: usize, overlap: usize },
}

impl ChunkingConfig {
    pub fn new(chunk_size: usize, overlap: usize) -> Result<Self, ChunkingError> {
        if chunk_size == 0 {
            return Err(ChunkingError::ZeroSize);
        }
        if overlap >= chunk_size {
            return Err(ChunkingError::OverlapTooLarge {
                chunk_size,
                overlap,
            });
        }
        Ok(ChunkingConfig {
            chunk_size,
            overlap,
        })
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }
}

impl Default for ChunkingConfig {
    fn default() -> Self {
        ChunkingConfig {
            chunk_size: 1000,
            overlap: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Paragraph,
    Line,
    Sentence,
    Word,
    Char,
}

impl Level {
    fn next(self) -> Level {
        match self {
            Level::Paragraph => Level::Line,
            Level::Line => Level::Sentence,
            Level::Sentence => Level::Word,
            Level::Word | Level::Char => Level::Char,
        }
    }
}

/// Positions (exclusive piece ends) strictly inside `start..end` where
/// `level` allows a cut.
fn boundaries(chars: &[char], start: usize, end: usize, level: Level) -> Vec<usize> {
    let mut cuts = Vec::new();
    let mut i = start;
    while i < end {
        let cut = match level {
            Level::Paragraph => {
                (chars[i] == '\n' && i + 1 < end && chars[i + 1] == '\n').then_some(i + 2)
            }
            Level::Line => (chars[i] == '\n').then_some(i + 1),
            Level::Sentence => {
                (matches!(chars[i], '.' | '!' | '?') && i + 1 < end && chars[i + 1].is_whitespace())
                    .then_some(i + 2)
            }
            Level::Word => (chars[i] == ' ').then_some(i + 1),
            Level::Char => Some(i + 1),
        };
        match cut {
            Some(c) => {
                if c < end {
                    cuts.push(c);
                }
                i = c;
            }
            None => i += 1,
        }
    }
    cuts
}

fn split_pieces(
    chars: &[char],
    start: usize,
    end: usize,
    level: Level,
    size: usize,
    out: &mut Vec<(usize, usize)>,
) {
    if end - start <= size {
        out.push((start, end));
        return;
    }
    let cuts = boundaries(chars, start, end, level);
    if cuts.is_empty() {
        split_pieces(chars, start, end, level.next(), size, out);
        return;
    }
    let mut s = start;
    for e in cuts.into_iter().chain(core::iter::once(end)) {
        if e - s <= size {
            out.push((s, e));
        } else {
            split_pieces(chars, s, e, level.next(), size, out);
        }
        s = e;
    }
}

/// Splits `document` into overlapping chunks with ids `<source>#<n>`.
pub fn chunk_text(source: &str, document: &str, config: &ChunkingConfig) -> Vec<Chunk> {
    let chars: Vec<char> = document.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    let mut byte_at = Vec::with_capacity(chars.len() + 1);
    byte_at.extend(document.char_indices().map(|(b, _)| b));
    byte_at.push(document.len());

    let size = config.chunk_size;
    let mut pieces = Vec::new();
    split_pieces(&chars, 0, chars.len(), Level::Paragraph, size, &mut pieces);

    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut current: VecDeque<(usize, usize)> = VecDeque::new();
    let mut len = 0;
    for (s, e) in pieces {
        let plen = e - s;
        if !current.is_empty() && len + plen > size {
            spans.push((current[0].0, current[current.len() - 1].1));
            while !current.is_empty() && (len > config.overlap || len + plen > size) {
                let (ds, de) = current.pop_front().unwrap_or_default();
                len -= de - ds;
            }
        }
        current.push_back((s, e));
        len += plen;
    }
    if let (Some(first), Some(last)) = (current.front(), current.back()) {
        spans.push((first.0, last.1));
    }

    spans
        .into_iter()
        .enumerate()
        .map(|(i, (start, end))| Chunk {
            id: format!("{source}#{i}"),
            text: String::from(&document[byte_at[start]..byte_at[end]]),
            start,
            end,
            source: String::from(source),
        })
        .collect()
}

/// Rebuilds the document from its chunks by dropping each overlap.
pub fn reconstruct(chunks: &[Chunk]) -> String {
    let mut out = String::new();
    let mut covered: usize = 0;
    for c in chunks {
        let skip = covered.saturating_sub(c.start);
        out.extend(c.text.chars().skip(skip));
        covered = covered.max(c.end);
    }
    out
}
