//! Editable token view of an utterance that keeps the original spacing and
//! re-derives character spans on render.

use crate::corpus::{SpanAnnotation, Utterance};
use crate::error::Result;
use crate::record::Insertion;
use crate::textkit::{char_slice, tokenize_with_spans, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Piece {
    /// Whitespace preceding the token in the source text.
    pub gap: String,
    pub surface: String,
    pub kind: TokenKind,
    /// DA item index for atoms.
    pub item: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Draft {
    pub pieces: Vec<Piece>,
    pub trailing: String,
}

impl Draft {
    pub fn from_utterance(u: &Utterance) -> Result<Self> {
        let seq = tokenize_with_spans(&u.text, &u.spans)?;
        let mut pieces = Vec::with_capacity(seq.len());
        let mut cursor = 0;
        for tok in seq.tokens {
            pieces.push(Piece {
                gap: char_slice(&u.text, cursor, tok.char_start).to_string(),
                surface: tok.surface,
                kind: tok.kind,
                item: tok.span_ref.map(|k| u.spans[k].item_index),
            });
            cursor = tok.char_end;
        }
        let total = u.text.chars().count();
        Ok(Draft { pieces, trailing: char_slice(&u.text, cursor, total).to_string() })
    }

    pub fn word_positions(&self) -> Vec<usize> {
        self.pieces.iter().enumerate().filter(|(_, p)| p.kind == TokenKind::Word).map(|(i, _)| i).collect()
    }

    /// Removes the piece at `index`; the gap before it is dropped and a
    /// leading gap of the new first piece is preserved.
    pub fn delete(&mut self, index: usize) {
        let removed = self.pieces.remove(index);
        if index == 0 {
            if let Some(first) = self.pieces.first_mut() {
                first.gap = removed.gap;
            }
        }
    }

    /// Inserts a word before position `index` (`index == len` appends).
    pub fn insert_word(&mut self, index: usize, word: &str) {
        let gap = if index == 0 {
            let first_gap = self.pieces.first().map(|p| p.gap.clone()).unwrap_or_default();
            if let Some(first) = self.pieces.first_mut() {
                first.gap = " ".into();
            }
            first_gap
        } else {
            " ".into()
        };
        self.pieces.insert(index, Piece { gap, surface: word.to_string(), kind: TokenKind::Word, item: None });
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let sa = std::mem::take(&mut self.pieces[a].surface);
        let sb = std::mem::replace(&mut self.pieces[b].surface, sa);
        self.pieces[a].surface = sb;
    }

    /// Text and spans (one per atom, in order) of the current draft.
    pub fn render(&self) -> (String, Vec<SpanAnnotation>) {
        let mut text = String::new();
        let mut spans = Vec::new();
        let mut pos = 0;
        for p in &self.pieces {
            text.push_str(&p.gap);
            pos += p.gap.chars().count();
            let len = p.surface.chars().count();
            text.push_str(&p.surface);
            if let Some(item) = p.item {
                spans.push(SpanAnnotation::new(item, pos, pos + len));
            }
            pos += len;
        }
        text.push_str(&self.trailing);
        (text, spans)
    }
}

/// Applies insertions (character offsets into `text`) and shifts spans.
///
/// Spans starting at or after an insertion point move right; a span ending
/// exactly at the point is unaffected. Insertions at equal offsets keep
/// their given order.
pub(crate) fn apply_insertions(
    text: &str,
    spans: &[SpanAnnotation],
    insertions: &[Insertion],
) -> (String, Vec<SpanAnnotation>) {
    let mut order: Vec<&Insertion> = insertions.iter().collect();
    order.sort_by_key(|i| i.at);
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 32);
    let mut cursor = 0;
    for ins in &order {
        out.extend(&chars[cursor..ins.at]);
        out.push_str(&ins.text);
        cursor = ins.at;
    }
    out.extend(&chars[cursor..]);
    let shifted = spans
        .iter()
        .map(|s| {
            let shift: usize = order.iter().filter(|i| i.at <= s.start).map(|i| i.text.chars().count()).sum();
            SpanAnnotation::new(s.item_index, s.start + shift, s.end + shift)
        })
        .collect();
    (out, shifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cambridge_turn() -> Utterance {
        Utterance::user("I want to go to Cambridge .").with_value("attraction", "inform", "dest", "Cambridge")
    }

    #[test]
    fn unchanged_draft_renders_identically() {
        let u = Utterance::user("  Hi,  I'm off to Ely!  ").with_value("train", "inform", "dest", "Ely");
        let (text, spans) = Draft::from_utterance(&u).unwrap().render();
        assert_eq!(text, u.text);
        assert_eq!(spans, u.spans);
    }

    #[test]
    fn delete_swap_insert() {
        let mut d = Draft::from_utterance(&cambridge_turn()).unwrap();
        d.delete(2);
        assert_eq!(d.render().0, "I want go to Cambridge .");
        let mut d = Draft::from_utterance(&cambridge_turn()).unwrap();
        d.swap(1, 2);
        assert_eq!(d.render().0, "I to want go to Cambridge .");
        let mut d = Draft::from_utterance(&cambridge_turn()).unwrap();
        d.insert_word(1, "need");
        let (text, spans) = d.render();
        assert_eq!(text, "I need want to go to Cambridge .");
        assert_eq!((spans[0].start, spans[0].end), (21, 30));
        let mut d = Draft::from_utterance(&cambridge_turn()).unwrap();
        d.insert_word(0, "so");
        d.delete(0);
        assert_eq!(d.render().0, cambridge_turn().text);
    }

    #[test]
    fn insertions_shift_later_spans() {
        let u = Utterance::user("I want to go to Cambridge.").with_value("a", "inform", "dest", "Cambridge");
        let ins =
            [Insertion { at: 16, text: "Liverpool, sorry I mean ".into() }, Insertion { at: 9, text: " um".into() }];
        let (text, spans) = apply_insertions(&u.text, &u.spans, &ins);
        assert_eq!(text, "I want to um go to Liverpool, sorry I mean Cambridge.");
        assert_eq!(char_slice(&text, spans[0].start, spans[0].end), "Cambridge");
    }
}
