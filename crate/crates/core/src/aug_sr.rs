//! Speech-recognition noise: a rule- and lexicon-driven channel producing
//! spoken-number expansion, liaison merges and similar-sound substitutions,
//! followed by fuzzy re-detection of slot values in the noisy transcript.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{SpanAnnotation, Utterance};
use crate::error::{Error, Result};
use crate::record::{AugmentationRecord, Method};
use crate::textkit::{char_slice, detect_value_excluding, lex, number_to_spoken, Lexicon, TokenKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrConfig {
    /// Per-word probability of a similar-sound substitution.
    pub p_confuse: f64,
    /// Per-adjacent-pair probability of a liaison merge.
    pub p_liaison: f64,
    /// Fuzzy threshold for re-detecting values in the transcript.
    pub redetect_threshold: f64,
    /// Lowercase and drop punctuation, as ASR transcripts do.
    pub strip_case_punct: bool,
}

impl Default for SrConfig {
    fn default() -> Self {
        SrConfig { p_confuse: 0.08, p_liaison: 0.05, redetect_threshold: 0.7, strip_case_punct: true }
    }
}

impl SrConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, p) in [("sr.p_confuse", self.p_confuse), ("sr.p_liaison", self.p_liaison)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(field, "must be in [0, 1]"));
            }
        }
        if !(self.redetect_threshold > 0.0 && self.redetect_threshold <= 1.0) {
            return Err(Error::config("sr.redetect_threshold", "must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Weighted confusables per word and liaison merges per word pair.
///
/// File lines: `word => cand1:w1, cand2:w2` and `w1 + w2 => merged`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfusionTable {
    pub confusions: HashMap<String, Vec<(String, f64)>>,
    pub liaisons: HashMap<(String, String), String>,
}

impl ConfusionTable {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut table = ConfusionTable::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::resource(origin, n + 1, m);
            let (lhs, rhs) = line.split_once("=>").ok_or_else(|| err("expected `=>`".into()))?;
            let (lhs, rhs) = (lhs.trim().to_lowercase(), rhs.trim());
            if let Some((a, b)) = lhs.split_once('+') {
                let (a, b) = (a.trim().to_string(), b.trim().to_string());
                if a.is_empty() || b.is_empty() || rhs.is_empty() {
                    return Err(err("liaison needs `w1 + w2 => merged`".into()));
                }
                table.liaisons.insert((a, b), rhs.to_lowercase());
                continue;
            }
            let mut list = Vec::new();
            for entry in rhs.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let (cand, weight) = match entry.rsplit_once(':') {
                    Some((c, w)) => {
                        (c.trim(), w.trim().parse::<f64>().map_err(|_| err(format!("bad weight in `{entry}`")))?)
                    }
                    None => (entry, 1.0),
                };
                if cand.eq_ignore_ascii_case(&lhs) {
                    return Err(err(format!("`{cand}` confuses with itself")));
                }
                if weight <= 0.0 || !weight.is_finite() {
                    return Err(err(format!("weight of `{cand}` must be positive")));
                }
                list.push((cand.to_lowercase(), weight));
            }
            if list.is_empty() {
                return Err(err(format!("`{lhs}` has no candidates")));
            }
            table.confusions.entry(lhs).or_default().extend(list);
        }
        Ok(table)
    }
}

/// One stochastic or deterministic channel edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsrEdit {
    pub kind: AsrEditKind,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsrEditKind {
    Spoken,
    Liaison,
    Similar,
}

struct Piece {
    gap: String,
    surface: String,
    kind: TokenKind,
}

fn pieces(text: &str) -> (Vec<Piece>, String) {
    let mut out = Vec::new();
    let mut cursor = 0;
    for tok in lex(text) {
        out.push(Piece {
            gap: char_slice(text, cursor, tok.char_start).to_string(),
            surface: tok.surface,
            kind: tok.kind,
        });
        cursor = tok.char_end;
    }
    let trailing = char_slice(text, cursor, text.chars().count()).to_string();
    (out, trailing)
}

fn boundary_merge(a: &str, b: &str) -> String {
    if a.chars().last().map(|c| c.to_ascii_lowercase()) == b.chars().next().map(|c| c.to_ascii_lowercase()) {
        let mut rest = b.chars();
        rest.next();
        format!("{a}{}", rest.as_str())
    } else {
        format!("{a}{b}")
    }
}

fn liaison_target(a: &str, b: &str, table: &ConfusionTable, lexicon: &Lexicon) -> Option<String> {
    let (la, lb) = (a.to_lowercase(), b.to_lowercase());
    if let Some(m) = table.liaisons.get(&(la.clone(), lb.clone())) {
        return Some(m.clone());
    }
    let (pa, pb) = (lexicon.lookup(&la)?, lexicon.lookup(&lb)?);
    (pa.last().is_some() && pa.last() == pb.first()).then(|| boundary_merge(a, b))
}

fn confusables(word: &str, table: &ConfusionTable, lexicon: &Lexicon) -> Vec<(String, f64)> {
    let lw = word.to_lowercase();
    let mut out: Vec<(String, f64)> = table.confusions.get(&lw).cloned().unwrap_or_default();
    for n in lexicon.neighbors(&lw) {
        if !out.iter().any(|(c, _)| *c == n) {
            out.push((n, 1.0));
        }
    }
    out
}

/// Passes a user utterance through the simulated recognition channel.
///
/// Order: spoken-number expansion, liaison merges, similar-sound
/// substitutions, then optional lowercasing and punctuation removal. Slot
/// values are not protected.
pub fn simulate_asr<R: Rng + ?Sized>(
    u: &Utterance,
    cfg: &SrConfig,
    table: &ConfusionTable,
    lexicon: &Lexicon,
    rng: &mut R,
) -> (String, Vec<AsrEdit>) {
    let mut trace = Vec::new();
    let spoken = number_to_spoken(&u.text);
    if spoken != u.text {
        for a in lex(&u.text).iter().filter(|t| t.surface.chars().any(|c| c.is_ascii_digit())) {
            let one = number_to_spoken(&a.surface);
            if one != a.surface {
                trace.push(AsrEdit { kind: AsrEditKind::Spoken, from: a.surface.clone(), to: one });
            }
        }
    }
    let (mut ps, trailing) = pieces(&spoken);

    let mut i = 0;
    while i + 1 < ps.len() {
        let eligible = ps[i].kind == TokenKind::Word && ps[i + 1].kind == TokenKind::Word;
        if eligible {
            if let Some(merged) = liaison_target(&ps[i].surface, &ps[i + 1].surface, table, lexicon) {
                if rng.gen_bool(cfg.p_liaison) {
                    let next = ps.remove(i + 1);
                    trace.push(AsrEdit {
                        kind: AsrEditKind::Liaison,
                        from: format!("{} {}", ps[i].surface, next.surface),
                        to: merged.clone(),
                    });
                    ps[i].surface = merged;
                }
            }
        }
        i += 1;
    }

    for p in ps.iter_mut().filter(|p| p.kind == TokenKind::Word) {
        let cands = confusables(&p.surface, table, lexicon);
        if cands.is_empty() || !rng.gen_bool(cfg.p_confuse) {
            continue;
        }
        let (to, _) = cands.choose_weighted(rng, |c| c.1).expect("positive weights");
        trace.push(AsrEdit { kind: AsrEditKind::Similar, from: p.surface.clone(), to: to.clone() });
        p.surface = to.clone();
    }

    let text = if cfg.strip_case_punct {
        ps.iter().filter(|p| p.kind == TokenKind::Word).map(|p| p.surface.to_lowercase()).collect::<Vec<_>>().join(" ")
    } else {
        let mut s: String = ps.iter().map(|p| format!("{}{}", p.gap, p.surface)).collect();
        s.push_str(&trailing);
        s
    };
    (text, trace)
}

/// Locates each original value (in spoken form) in the noisy text. Found
/// values adopt the noisy surface; lost ones are dropped with their items.
pub fn redetect_values(
    noisy_text: &str,
    original: &Utterance,
    cfg: &SrConfig,
    source: (&str, usize),
) -> AugmentationRecord {
    let spanned: HashMap<usize, SpanAnnotation> = original.spans.iter().map(|s| (s.item_index, *s)).collect();
    let mut claimed: Vec<(usize, usize)> = Vec::new();
    let mut found: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut notes = Vec::new();
    for span in original.sorted_spans() {
        let target = number_to_spoken(original.span_text(&span));
        match detect_value_excluding(noisy_text, &target, cfg.redetect_threshold, &claimed) {
            Some(d) => {
                claimed.push((d.start, d.end));
                found.insert(span.item_index, (d.start, d.end));
            }
            None => {
                let item = &original.da[span.item_index];
                notes.push(format!("dropped {} (value {:?} not recognized)", item.slot_key(), item.value));
            }
        }
    }
    let mut da = Vec::new();
    let mut spans = Vec::new();
    for (idx, item) in original.da.iter().enumerate() {
        if !spanned.contains_key(&idx) {
            da.push(item.clone());
            continue;
        }
        if let Some(&(s, e)) = found.get(&idx) {
            let mut item = item.clone();
            let surface = char_slice(noisy_text, s, e).to_string();
            if surface != item.value {
                notes.push(format!("value {}: {:?} -> {:?}", item.slot_key(), item.value, surface));
            }
            item.value = surface;
            da.push(item);
            spans.push(SpanAnnotation::new(da.len() - 1, s, e));
        }
    }
    let mut rec = AugmentationRecord::new(Method::SpeechRecognition, source, noisy_text.to_string(), da, spans);
    rec.notes = notes;
    rec
}

/// Channel simulation followed by value re-detection.
pub fn sr_augment<R: Rng + ?Sized>(
    u: &Utterance,
    cfg: &SrConfig,
    table: &ConfusionTable,
    lexicon: &Lexicon,
    rng: &mut R,
    source: (&str, usize),
) -> AugmentationRecord {
    let (noisy, trace) = simulate_asr(u, cfg, table, lexicon, rng);
    let mut rec = redetect_values(&noisy, u, cfg, source);
    let mut notes: Vec<String> =
        trace.iter().map(|e| format!("{:?}: {} -> {}", e.kind, e.from, e.to).to_lowercase()).collect();
    notes.append(&mut rec.notes);
    rec.notes = notes;
    rec
}
