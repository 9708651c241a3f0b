use super::{char_slice, fuzzy_ratio, lex, Token};

/// A fuzzy match of a value in text, by character offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub start: usize,
    pub end: usize,
    pub score: f64,
}

/// Finds the best token-aligned window of `text` matching `value`.
///
/// Windows start and end on word tokens and span between `len - 2` and
/// `len + 2` words, `len` being the value's word count. The best window has
/// the highest score, then the leftmost start, then the shortest extent.
pub fn detect_value(text: &str, value: &str, threshold: f64) -> Option<Detection> {
    detect_value_excluding(text, value, threshold, &[])
}

/// [`detect_value`] ignoring windows that overlap any `claimed` range.
pub(crate) fn detect_value_excluding(
    text: &str,
    value: &str,
    threshold: f64,
    claimed: &[(usize, usize)],
) -> Option<Detection> {
    let words: Vec<Token> = lex(text).into_iter().filter(Token::is_word).collect();
    if words.is_empty() {
        return None;
    }
    let value_len = lex(value).iter().filter(|t| t.is_word()).count().max(1);
    let min_len = value_len.saturating_sub(2).max(1);
    let max_len = value_len + 2;
    let mut best: Option<Detection> = None;
    for i in 0..words.len() {
        for len in min_len..=max_len {
            let Some(last) = words.get(i + len - 1) else { break };
            let (start, end) = (words[i].char_start, last.char_end);
            if claimed.iter().any(|&(s, e)| start < e && s < end) {
                continue;
            }
            let score = fuzzy_ratio(char_slice(text, start, end), value);
            if score < threshold {
                continue;
            }
            let cand = Detection { start, end, score };
            let better = match best {
                None => true,
                Some(b) => {
                    score > b.score
                        || (score == b.score
                            && (start < b.start || (start == b.start && end - start < b.end - b.start)))
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_substring() {
        let d = detect_value("i want to go to cambridge", "Cambridge", 0.9).unwrap();
        assert_eq!((d.start, d.end, d.score), (16, 25, 1.0));
    }

    #[test]
    fn fuzzy_match_over_threshold() {
        let text = "leaving from lester";
        let d = detect_value(text, "leicester", 0.7).unwrap();
        assert_eq!(char_slice(text, d.start, d.end), "lester");
        assert!((d.score - 0.8).abs() < 1e-12);
        assert!(detect_value(text, "leicester", 0.9).is_none());
    }

    #[test]
    fn leftmost_wins_ties() {
        let d = detect_value("ely or ely", "ely", 1.0).unwrap();
        assert_eq!(d.start, 0);
    }

    #[test]
    fn multiword_value_across_punctuation() {
        let text = "by thirteen forty five.";
        let d = detect_value(text, "thirteen forty five", 0.7).unwrap();
        assert_eq!(char_slice(text, d.start, d.end), "thirteen forty five");
        assert_eq!(d.score, 1.0);
    }

    #[test]
    fn empty_text_has_no_match() {
        assert!(detect_value("", "x", 0.5).is_none());
    }
}
