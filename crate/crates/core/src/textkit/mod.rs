//! Shared text machinery: span-atomic tokenization, fuzzy matching, value
//! detection, spoken-number expansion, pronunciation lookup.

mod detect;
mod fuzzy;
mod lexicon;
mod numbers;
mod thesaurus;
mod tokenize;

pub(crate) use detect::detect_value_excluding;
pub use detect::{detect_value, Detection};
pub use fuzzy::{fuzzy_ratio, lcs_len};
pub use lexicon::{phonemes, Lexicon, PhonemeSeq};
pub use numbers::{cardinal, number_to_spoken};
pub use thesaurus::Thesaurus;
pub use tokenize::{lex, tokenize_with_spans, Token, TokenKind, TokenSeq};

/// Number of characters (Unicode scalar values) in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset of character offset `pos` (clamped to the end).
pub fn byte_offset(s: &str, pos: usize) -> usize {
    s.char_indices().nth(pos).map(|(b, _)| b).unwrap_or(s.len())
}

/// Substring by character offsets `[start, end)`.
pub fn char_slice(s: &str, start: usize, end: usize) -> &str {
    let b0 = byte_offset(s, start);
    let b1 = b0 + byte_offset(&s[b0..], end.saturating_sub(start));
    &s[b0..b1]
}

/// Lowercases and collapses whitespace runs to single spaces.
pub fn normalize_value(s: &str) -> String {
    s.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

/// Levenshtein distance over arbitrary sequences.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
