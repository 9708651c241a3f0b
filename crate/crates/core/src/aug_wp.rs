//! Word perturbation: label-preserving EDA operations that never touch slot
//! values, plus slot value replacement with unseen values.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{Corpus, Utterance};
use crate::draft::Draft;
use crate::error::{Error, Result};
use crate::record::{AugmentationRecord, Method};
use crate::resources::{parse_stopwords, BUNDLED_STOPWORDS};
use crate::textkit::{normalize_value, Thesaurus};

#[derive(Debug, Clone)]
pub struct WpConfig {
    /// Edits per word token; `n = max(1, round(alpha * l))`.
    pub alpha: f64,
    /// Probability of slot value replacement instead of an EDA operation.
    pub p_svr: f64,
    pub stopwords: HashSet<String>,
}

impl Default for WpConfig {
    fn default() -> Self {
        WpConfig { alpha: 0.1, p_svr: 0.2, stopwords: parse_stopwords(BUNDLED_STOPWORDS) }
    }
}

impl WpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("wp.alpha", "must be in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.p_svr) {
            return Err(Error::config("wp.p_svr", "must be in [0, 1]"));
        }
        Ok(())
    }

    /// Edit count for an utterance with `words` word tokens.
    pub fn edit_budget(&self, words: usize) -> usize {
        ((self.alpha * words as f64).round() as usize).max(1)
    }
}

/// Replacement values per `domain-slot` key, unseen in training data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnseenValuePool {
    pub values: BTreeMap<String, Vec<String>>,
}

impl UnseenValuePool {
    /// Parses `domain-slot: value1 | value2 | ...` lines.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::resource(origin, n + 1, "expected `domain-slot: v1 | v2`"))?;
            let key = key.trim().to_lowercase();
            if !key.contains('-') {
                return Err(Error::resource(origin, n + 1, format!("key `{key}` is not domain-slot")));
            }
            let list = values.entry(key).or_default();
            for v in rest.split('|').map(str::trim).filter(|v| !v.is_empty()) {
                list.push(v.to_string());
            }
        }
        values.retain(|_, v| !v.is_empty());
        Ok(UnseenValuePool { values })
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, key: &str) -> &[String] {
        self.values.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(slot key, value)` pairs that occur in the training split.
    pub fn conflicts(&self, corpus: &Corpus) -> Vec<(String, String)> {
        let seen = corpus.train_values();
        let mut out = Vec::new();
        for (key, vals) in &self.values {
            for v in vals {
                if seen.get(key).is_some_and(|s| s.contains(&normalize_value(v))) {
                    out.push((key.clone(), v.clone()));
                }
            }
        }
        out
    }

    /// Copy without values that occur in the training split.
    pub fn unseen_in(&self, corpus: &Corpus) -> Self {
        let bad: HashSet<(String, String)> = self.conflicts(corpus).into_iter().collect();
        let mut values = self.values.clone();
        for (key, list) in values.iter_mut() {
            list.retain(|v| !bad.contains(&(key.clone(), v.clone())));
        }
        values.retain(|_, v| !v.is_empty());
        UnseenValuePool { values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdaOp {
    Synonym,
    Insert,
    Swap,
    Delete,
}

impl EdaOp {
    pub const ALL: [EdaOp; 4] = [EdaOp::Synonym, EdaOp::Insert, EdaOp::Swap, EdaOp::Delete];
}

/// One concrete edit on the draft's piece list, applied in sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdaEdit {
    Replace { index: usize, with: String },
    Insert { position: usize, word: String },
    Swap(usize, usize),
    Delete(usize),
}

fn match_case(template: &str, word: &str) -> String {
    let upper =
        template.chars().next().is_some_and(char::is_uppercase) && template.chars().skip(1).all(|c| !c.is_uppercase());
    if upper && template != "I" {
        let mut c = word.chars();
        match c.next() {
            Some(f) => f.to_uppercase().chain(c).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}

/// Applies explicit edits to a user utterance. Indices address the token
/// list (words, atoms, punctuation) as it stands when each edit runs; atoms
/// may not be targeted.
pub fn eda_apply(u: &Utterance, edits: &[EdaEdit], source: (&str, usize)) -> Result<AugmentationRecord> {
    let mut draft = Draft::from_utterance(u)?;
    let mut notes = Vec::new();
    let word_at = |draft: &Draft, i: usize| -> Result<()> {
        match draft.pieces.get(i) {
            Some(p) if p.kind == crate::textkit::TokenKind::Word => Ok(()),
            _ => Err(Error::NoCandidate(format!("token {i} is not a word"))),
        }
    };
    for edit in edits {
        match edit {
            EdaEdit::Replace { index, with } => {
                word_at(&draft, *index)?;
                let old = std::mem::take(&mut draft.pieces[*index].surface);
                draft.pieces[*index].surface = match_case(&old, with);
                notes.push(format!("synonym {old} -> {}", draft.pieces[*index].surface));
            }
            EdaEdit::Insert { position, word } => {
                if *position > draft.pieces.len() {
                    return Err(Error::NoCandidate(format!("insert position {position}")));
                }
                draft.insert_word(*position, word);
                notes.push(format!("insert {word} at {position}"));
            }
            EdaEdit::Swap(a, b) => {
                word_at(&draft, *a)?;
                word_at(&draft, *b)?;
                notes.push(format!("swap {} <-> {}", draft.pieces[*a].surface, draft.pieces[*b].surface));
                draft.swap(*a, *b);
            }
            EdaEdit::Delete(i) => {
                word_at(&draft, *i)?;
                if draft.word_positions().len() <= 1 {
                    return Err(Error::NoCandidate("delete would remove the last word".into()));
                }
                notes.push(format!("delete {}", draft.pieces[*i].surface));
                draft.delete(*i);
            }
        }
    }
    let (text, spans) = draft.render();
    let mut rec = AugmentationRecord::new(Method::WordPerturbation, source, text, u.da.clone(), spans);
    rec.notes = notes;
    Ok(rec)
}

/// Samples the edits for one EDA operation without applying them.
pub fn plan_eda<R: Rng + ?Sized>(
    u: &Utterance,
    op: EdaOp,
    rng: &mut R,
    cfg: &WpConfig,
    thesaurus: &Thesaurus,
) -> Result<Vec<EdaEdit>> {
    let draft = Draft::from_utterance(u)?;
    let words = draft.word_positions();
    if words.is_empty() {
        return Err(Error::NoCandidate(format!("{op:?}: no word tokens")));
    }
    let n = cfg.edit_budget(words.len());
    let has_syn = |i: &usize| {
        let w = draft.pieces[*i].surface.to_lowercase();
        !cfg.stopwords.contains(&w) && !thesaurus.synonyms(&w).is_empty()
    };
    match op {
        EdaOp::Synonym => {
            let mut cands: Vec<usize> = words.iter().copied().filter(has_syn).collect();
            if cands.is_empty() {
                return Err(Error::NoCandidate("synonym: no word with synonyms".into()));
            }
            cands.shuffle(rng);
            Ok(cands
                .into_iter()
                .take(n)
                .map(|index| {
                    let syns = thesaurus.synonyms(&draft.pieces[index].surface);
                    EdaEdit::Replace { index, with: syns.choose(rng).unwrap().clone() }
                })
                .collect())
        }
        EdaOp::Insert => {
            let sources: Vec<usize> = words.iter().copied().filter(has_syn).collect();
            if sources.is_empty() {
                return Err(Error::NoCandidate("insert: no word with synonyms".into()));
            }
            // each insertion lengthens the piece list seen by the next
            Ok((draft.pieces.len()..)
                .take(n)
                .map(|len| {
                    let src = *sources.choose(rng).unwrap();
                    let word = thesaurus.synonyms(&draft.pieces[src].surface).choose(rng).unwrap().clone();
                    let position = rng.gen_range(0..=len);
                    EdaEdit::Insert { position, word }
                })
                .collect())
        }
        EdaOp::Swap => {
            if words.len() < 2 {
                return Err(Error::NoCandidate("swap: fewer than two words".into()));
            }
            Ok((0..n)
                .map(|_| {
                    let pair: Vec<&usize> = words.choose_multiple(rng, 2).collect();
                    EdaEdit::Swap(*pair[0], *pair[1])
                })
                .collect())
        }
        EdaOp::Delete => {
            if words.len() <= n {
                return Err(Error::NoCandidate("delete: would remove every word".into()));
            }
            let mut picked: Vec<usize> = words.choose_multiple(rng, n).copied().collect();
            picked.sort_unstable_by(|a, b| b.cmp(a));
            Ok(picked.into_iter().map(EdaEdit::Delete).collect())
        }
    }
}

/// One EDA operation with `n = max(1, round(alpha * l))` edits; DA unchanged.
pub fn eda_perturb<R: Rng + ?Sized>(
    u: &Utterance,
    op: EdaOp,
    rng: &mut R,
    cfg: &WpConfig,
    thesaurus: &Thesaurus,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let edits = plan_eda(u, op, rng, cfg, thesaurus)?;
    let mut rec = eda_apply(u, &edits, source)?;
    rec.notes.insert(0, format!("eda {op:?}"));
    Ok(rec)
}

/// Replaces the value of the span at `span_index` in text and label.
pub fn replace_slot_value(
    u: &Utterance,
    span_index: usize,
    new_value: &str,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let span = u.spans.get(span_index).ok_or_else(|| Error::NoCandidate(format!("span {span_index}")))?;
    let mut draft = Draft::from_utterance(u)?;
    let piece = draft.pieces.iter_mut().find(|p| p.item == Some(span.item_index)).expect("every span becomes an atom");
    let old = std::mem::replace(&mut piece.surface, new_value.to_string());
    let (text, spans) = draft.render();
    let mut da = u.da.clone();
    let item = &mut da[span.item_index];
    let note = format!("svr {}: {} -> {}", item.slot_key(), old, new_value);
    item.value = new_value.to_string();
    let mut rec = AugmentationRecord::new(Method::WordPerturbation, source, text, da, spans);
    rec.notes.push(note);
    Ok(rec)
}

/// Slot value replacement with a uniformly chosen span and pool value.
pub fn slot_value_replace<R: Rng + ?Sized>(
    u: &Utterance,
    pool: &UnseenValuePool,
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let eligible: Vec<(usize, Vec<&String>)> = u
        .spans
        .iter()
        .enumerate()
        .filter_map(|(k, s)| {
            let item = &u.da[s.item_index];
            let current = normalize_value(&item.value);
            let vals: Vec<&String> =
                pool.get(&item.slot_key()).iter().filter(|v| normalize_value(v) != current).collect();
            (!vals.is_empty()).then_some((k, vals))
        })
        .collect();
    let (k, vals) = eligible.choose(rng).ok_or(Error::NoSlot)?;
    let value = vals.choose(rng).unwrap();
    replace_slot_value(u, *k, value, source)
}

/// SC-EDA: slot value replacement with probability `p_svr`, otherwise one
/// uniformly chosen EDA operation. Falls back to the remaining EDA
/// operations when the chosen one has no candidate.
pub fn wp_augment<R: Rng + ?Sized>(
    u: &Utterance,
    cfg: &WpConfig,
    pool: &UnseenValuePool,
    thesaurus: &Thesaurus,
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    if rng.gen_bool(cfg.p_svr) {
        match slot_value_replace(u, pool, rng, source) {
            Err(Error::NoSlot) => {}
            other => return other,
        }
    }
    let mut ops = EdaOp::ALL.to_vec();
    let first = rng.gen_range(0..ops.len());
    ops.swap(0, first);
    ops[1..].shuffle(rng);
    let mut last_err = None;
    for op in ops {
        match eda_perturb(u, op, rng, cfg, thesaurus, source) {
            Ok(rec) => return Ok(rec),
            Err(e @ Error::NoCandidate(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::NoCandidate("wp".into())))
}
