use crate::corpus::SpanAnnotation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    /// A whole annotated slot value, never split.
    Atom,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub char_start: usize,
    pub char_end: usize,
    /// Index into the span list the sequence was built from (atoms only).
    pub span_ref: Option<usize>,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<Token>,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word()).count()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }
}

fn is_connector(c: char, prev: char, next: char) -> bool {
    match c {
        '\'' | '’' | '-' => prev.is_alphanumeric() && next.is_alphanumeric(),
        ':' | '.' | ',' => prev.is_ascii_digit() && next.is_ascii_digit(),
        _ => false,
    }
}

/// Splits text into word and punctuation tokens with character offsets.
///
/// Words are alphanumeric runs; an apostrophe or hyphen between
/// alphanumerics and `:`, `.`, `,` between digits stay inside the word
/// (`I'm`, `20:45`, `3.50`). Every other non-space character is a
/// one-character punctuation token.
pub fn lex(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                if d.is_alphanumeric() {
                    i += 1;
                } else if i + 1 < chars.len() && is_connector(d, chars[i - 1], chars[i + 1]) {
                    i += 2;
                } else {
                    break;
                }
            }
            out.push(Token {
                surface: chars[start..i].iter().collect(),
                kind: TokenKind::Word,
                char_start: start,
                char_end: i,
                span_ref: None,
            });
        } else {
            out.push(Token {
                surface: c.to_string(),
                kind: TokenKind::Punct,
                char_start: i,
                char_end: i + 1,
                span_ref: None,
            });
            i += 1;
        }
    }
    out
}

/// Tokenizes `text`, turning each span into exactly one atom token.
///
/// Span edges are trimmed of whitespace and must then coincide with token
/// boundaries of [`lex`]; a span starting or ending inside a word is an error.
pub fn tokenize_with_spans(text: &str, spans: &[SpanAnnotation]) -> Result<TokenSeq> {
    let chars: Vec<char> = text.chars().collect();
    let raw = lex(text);
    let mut bounds: Vec<(usize, usize, usize)> = Vec::with_capacity(spans.len());
    for (k, span) in spans.iter().enumerate() {
        let boundary_err = || Error::SpanBoundary { text: text.to_string(), start: span.start, end: span.end };
        if span.start >= span.end || span.end > chars.len() {
            return Err(boundary_err());
        }
        let (mut s, mut e) = (span.start, span.end);
        while s < e && chars[s].is_whitespace() {
            s += 1;
        }
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        let starts_ok = raw.iter().any(|t| t.char_start == s);
        let ends_ok = raw.iter().any(|t| t.char_end == e);
        if s == e || !starts_ok || !ends_ok {
            return Err(boundary_err());
        }
        bounds.push((s, e, k));
    }
    bounds.sort();
    for pair in bounds.windows(2) {
        if pair[0].1 > pair[1].0 {
            return Err(Error::SpanBoundary { text: text.to_string(), start: pair[1].0, end: pair[1].1 });
        }
    }

    let mut tokens = Vec::with_capacity(raw.len());
    let mut next_span = bounds.iter().peekable();
    let mut iter = raw.into_iter().peekable();
    while let Some(tok) = iter.next() {
        if let Some(&&(s, e, k)) = next_span.peek() {
            if tok.char_start == s {
                while iter.peek().is_some_and(|t| t.char_end <= e) {
                    iter.next();
                }
                tokens.push(Token {
                    surface: chars[s..e].iter().collect(),
                    kind: TokenKind::Atom,
                    char_start: s,
                    char_end: e,
                    span_ref: Some(k),
                });
                next_span.next();
                continue;
            }
        }
        tokens.push(tok);
    }
    Ok(TokenSeq { tokens })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(seq: &TokenSeq) -> Vec<String> {
        seq.iter()
            .map(|t| match t.kind {
                TokenKind::Atom => format!("{}:atom", t.surface),
                _ => t.surface.clone(),
            })
            .collect()
    }

    #[test]
    fn cambridge_is_one_atom() {
        let text = "I want to go to Cambridge .";
        let seq = tokenize_with_spans(text, &[SpanAnnotation::new(0, 16, 25)]).unwrap();
        assert_eq!(shape(&seq), ["I", "want", "to", "go", "to", "Cambridge:atom", "."]);
        assert_eq!(seq.tokens[6].kind, TokenKind::Punct);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize_with_spans("", &[]).unwrap().is_empty());
    }

    #[test]
    fn clock_time_atom() {
        let seq = tokenize_with_spans("arrive by 20:45", &[SpanAnnotation::new(0, 10, 15)]).unwrap();
        assert_eq!(shape(&seq), ["arrive", "by", "20:45:atom"]);
    }

    #[test]
    fn multiword_atom_and_contractions() {
        let text = "I'm going to King's College, thanks.";
        let seq = tokenize_with_spans(text, &[SpanAnnotation::new(0, 13, 27)]).unwrap();
        assert_eq!(shape(&seq), ["I'm", "going", "to", "King's College:atom", ",", "thanks", "."]);
    }

    #[test]
    fn mid_word_span_is_rejected() {
        let err = tokenize_with_spans("Cambridgeshire", &[SpanAnnotation::new(0, 0, 9)]);
        assert!(matches!(err, Err(Error::SpanBoundary { .. })));
    }

    #[test]
    fn whitespace_edges_are_trimmed() {
        let seq = tokenize_with_spans("go to  Ely ", &[SpanAnnotation::new(0, 5, 11)]).unwrap();
        let atom = &seq.tokens[2];
        assert_eq!((atom.char_start, atom.char_end, atom.surface.as_str()), (7, 10, "Ely"));
    }
}
