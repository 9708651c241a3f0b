//! Annotated dialog data model, corpus I/O and LU example extraction.
//!
//! Offsets in [`SpanAnnotation`] are Unicode scalar (character) offsets into
//! the utterance text, never byte offsets.

mod io;
pub mod multiwoz;
mod window;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::textkit::{char_len, char_slice, normalize_value};

pub use io::{load_corpus, load_corpus_strict, parse_corpus, save_corpus, to_json_string};
pub use window::{extract_lu_examples, LuExample};

/// Value of a requested slot.
pub const REQUEST_VALUE: &str = "?";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    User,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

/// One `(domain, intent, slot, value)` tuple.
///
/// Domain, intent and slot are stored lowercased and trimmed. The value keeps
/// its annotated casing; equality and hashing compare the canonical
/// (lowercased, whitespace-normalized) form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DialogActItem {
    pub domain: String,
    pub intent: String,
    #[serde(default)]
    pub slot: String,
    #[serde(default)]
    pub value: String,
}

impl DialogActItem {
    pub fn new(domain: &str, intent: &str, slot: &str, value: &str) -> Self {
        DialogActItem {
            domain: domain.trim().to_lowercase(),
            intent: intent.trim().to_lowercase(),
            slot: slot.trim().to_lowercase(),
            value: value.trim().to_string(),
        }
    }

    /// Canonical `(domain, intent, slot, value)` key used for equality.
    pub fn canonical(&self) -> (String, String, String, String) {
        (
            self.domain.trim().to_lowercase(),
            self.intent.trim().to_lowercase(),
            self.slot.trim().to_lowercase(),
            normalize_value(&self.value),
        )
    }

    /// `domain-slot`, the key used by ontologies and value pools.
    pub fn slot_key(&self) -> String {
        slot_key(&self.domain, &self.slot)
    }

    pub fn is_request(&self) -> bool {
        self.value.trim() == REQUEST_VALUE
    }

    /// True for items that carry a concrete value realized in the text.
    pub fn has_value(&self) -> bool {
        !self.slot.is_empty() && !self.value.trim().is_empty() && !self.is_request()
    }

    pub(crate) fn check(&self) -> std::result::Result<(), String> {
        if self.domain.trim().is_empty() || self.intent.trim().is_empty() {
            return Err("domain and intent must be non-empty".into());
        }
        if !self.slot.trim().is_empty() && self.value.trim().is_empty() {
            return Err(format!("slot `{}` has an empty value", self.slot));
        }
        Ok(())
    }
}

impl PartialEq for DialogActItem {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for DialogActItem {}

impl Hash for DialogActItem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state)
    }
}

impl fmt::Display for DialogActItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}({}={})", self.domain, self.intent, self.slot, self.value)
    }
}

pub fn slot_key(domain: &str, slot: &str) -> String {
    format!("{}-{}", domain.trim().to_lowercase(), slot.trim().to_lowercase())
}

/// Compares two DA lists as sets.
pub fn same_da_set(a: &[DialogActItem], b: &[DialogActItem]) -> bool {
    let sa: HashSet<&DialogActItem> = a.iter().collect();
    let sb: HashSet<&DialogActItem> = b.iter().collect();
    sa == sb
}

/// Drops duplicate items, keeping the first occurrence.
pub fn dedup_da(items: Vec<DialogActItem>) -> Vec<DialogActItem> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|i| seen.insert(i.clone())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanAnnotation {
    /// Index into the owning utterance's DA list.
    #[serde(rename = "item")]
    pub item_index: usize,
    pub start: usize,
    pub end: usize,
}

impl SpanAnnotation {
    pub fn new(item_index: usize, start: usize, end: usize) -> Self {
        SpanAnnotation { item_index, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &SpanAnnotation) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: Speaker,
    pub text: String,
    #[serde(default)]
    pub da: Vec<DialogActItem>,
    #[serde(default)]
    pub spans: Vec<SpanAnnotation>,
}

impl Utterance {
    pub fn user(text: &str) -> Self {
        Utterance { speaker: Speaker::User, text: text.to_string(), da: Vec::new(), spans: Vec::new() }
    }

    pub fn system(text: &str) -> Self {
        Utterance { speaker: Speaker::System, ..Utterance::user(text) }
    }

    /// Adds an item whose value is the first occurrence of `surface` in the
    /// text, with a span over it. Panics if `surface` is absent; meant for
    /// building fixtures by hand.
    pub fn with_value(mut self, domain: &str, intent: &str, slot: &str, surface: &str) -> Self {
        let byte = self.text.find(surface).unwrap_or_else(|| panic!("{surface:?} not in {:?}", self.text));
        let start = self.text[..byte].chars().count();
        let end = start + surface.chars().count();
        self.da.push(DialogActItem::new(domain, intent, slot, surface));
        self.spans.push(SpanAnnotation::new(self.da.len() - 1, start, end));
        self
    }

    /// Adds an item without a span (requests, slot-less intents).
    pub fn with_act(mut self, domain: &str, intent: &str, slot: &str, value: &str) -> Self {
        self.da.push(DialogActItem::new(domain, intent, slot, value));
        self
    }

    pub fn span_text(&self, span: &SpanAnnotation) -> &str {
        char_slice(&self.text, span.start, span.end)
    }

    /// Spans sorted by start offset.
    pub fn sorted_spans(&self) -> Vec<SpanAnnotation> {
        let mut spans = self.spans.clone();
        spans.sort_by_key(|s| (s.start, s.end));
        spans
    }

    /// Checks the DA and span invariants, returning a message per problem.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for item in &self.da {
            if let Err(msg) = item.check() {
                problems.push(msg);
            }
        }
        let mut seen = HashSet::new();
        for item in &self.da {
            if !seen.insert(item) {
                problems.push(format!("duplicate DA item {item}"));
            }
        }
        let len = char_len(&self.text);
        for (k, span) in self.spans.iter().enumerate() {
            let Some(item) = self.da.get(span.item_index) else {
                problems.push(format!("span {k} points to missing item {}", span.item_index));
                continue;
            };
            if !item.has_value() {
                problems.push(format!("span {k} points to valueless item {item}"));
                continue;
            }
            if span.start >= span.end || span.end > len {
                problems.push(format!("span {k} [{}, {}) out of range for text of length {len}", span.start, span.end));
                continue;
            }
            let surface = self.span_text(span);
            if surface.trim() != surface {
                problems.push(format!("span {k} text {surface:?} has surrounding whitespace"));
                continue;
            }
            if normalize_value(surface) != normalize_value(&item.value) {
                problems.push(format!("span {k} text {surface:?} does not match value {:?}", item.value));
            }
        }
        let sorted = self.sorted_spans();
        for pair in sorted.windows(2) {
            if pair[0].overlaps(&pair[1]) {
                problems.push(format!(
                    "spans [{}, {}) and [{}, {}) overlap",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                ));
            }
        }
        problems
    }
}

/// Provenance of an augmented single-turn dialog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedFrom {
    pub method: String,
    pub dialog: String,
    pub turn: usize,
    /// Preceding utterances of the source turn, oldest first.
    #[serde(default)]
    pub context: Vec<ContextTurn>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextTurn {
    pub speaker: Speaker,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialog {
    pub id: String,
    pub split: Split,
    pub turns: Vec<Utterance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmented_from: Option<AugmentedFrom>,
}

impl Dialog {
    pub fn new(id: &str, split: Split, turns: Vec<Utterance>) -> Self {
        Dialog { id: id.to_string(), split, turns, augmented_from: None }
    }

    pub fn user_turn_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.turns.iter().enumerate().filter(|(_, t)| t.speaker == Speaker::User).map(|(i, _)| i)
    }

    /// Collects validation issues for this dialog.
    pub fn check(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let expected = |i: usize| {
            if i.is_multiple_of(2) {
                Speaker::User
            } else {
                Speaker::System
            }
        };
        for (i, turn) in self.turns.iter().enumerate() {
            if turn.speaker != expected(i) {
                issues.push(ValidationIssue {
                    dialog: self.id.clone(),
                    turn: i,
                    message: format!("speaker {:?} breaks user/system alternation", turn.speaker),
                });
            }
            for message in turn.check() {
                issues.push(ValidationIssue { dialog: self.id.clone(), turn: i, message });
            }
        }
        issues
    }
}

/// A problem found while validating a dialog, located by dialog id and turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub dialog: String,
    pub turn: usize,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dialog {} turn {}: {}", self.dialog, self.turn, self.message)
    }
}

/// Known values per `domain-slot` key, in first-seen order.
pub type Ontology = BTreeMap<String, Vec<String>>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub dialogs: Vec<Dialog>,
    pub ontology: Ontology,
    /// Dialog ids with annotation problems; excluded from augmentation.
    pub quarantine: BTreeMap<String, Vec<ValidationIssue>>,
}

impl Corpus {
    /// Builds a corpus, validating every dialog and growing the ontology with
    /// annotated values. Invalid dialogs are quarantined, not dropped.
    pub fn from_dialogs(dialogs: Vec<Dialog>, ontology: Ontology) -> Self {
        let mut corpus = Corpus { dialogs, ontology, quarantine: BTreeMap::new() };
        corpus.revalidate();
        corpus
    }

    pub(crate) fn revalidate(&mut self) {
        self.quarantine.clear();
        let mut ids = HashSet::new();
        for dialog in &self.dialogs {
            let mut issues = dialog.check();
            if !ids.insert(dialog.id.as_str()) {
                issues.push(ValidationIssue {
                    dialog: dialog.id.clone(),
                    turn: 0,
                    message: "duplicate dialog id".into(),
                });
            }
            if !issues.is_empty() {
                self.quarantine.entry(dialog.id.clone()).or_default().extend(issues);
            }
        }
        let mut additions: Vec<(String, String)> = Vec::new();
        for dialog in &self.dialogs {
            for turn in &dialog.turns {
                for span in &turn.spans {
                    if let Some(item) = turn.da.get(span.item_index) {
                        if item.has_value() {
                            additions.push((item.slot_key(), item.value.clone()));
                        }
                    }
                }
            }
        }
        for (key, value) in additions {
            add_ontology_value(&mut self.ontology, &key, &value);
        }
    }

    pub fn issues(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.quarantine.values().flatten()
    }

    pub fn is_quarantined(&self, dialog_id: &str) -> bool {
        self.quarantine.contains_key(dialog_id)
    }

    pub fn dialog(&self, id: &str) -> Option<&Dialog> {
        self.dialogs.iter().find(|d| d.id == id)
    }

    pub fn dialogs_in(&self, split: Split) -> impl Iterator<Item = &Dialog> {
        self.dialogs.iter().filter(move |d| d.split == split)
    }

    /// `(dialog id, turn index)` of every user turn in `split`, in corpus order.
    pub fn user_turns(&self, split: Split) -> Vec<(String, usize)> {
        self.dialogs_in(split).flat_map(|d| d.user_turn_indices().map(|i| (d.id.clone(), i))).collect()
    }

    /// Canonical values annotated in training-split user turns, per slot key.
    pub fn train_values(&self) -> BTreeMap<String, HashSet<String>> {
        let mut out: BTreeMap<String, HashSet<String>> = BTreeMap::new();
        for dialog in self.dialogs_in(Split::Train) {
            for turn in &dialog.turns {
                for item in turn.da.iter().filter(|i| i.has_value()) {
                    out.entry(item.slot_key()).or_default().insert(normalize_value(&item.value));
                }
            }
        }
        out
    }
}

pub(crate) fn add_ontology_value(ontology: &mut Ontology, key: &str, value: &str) {
    let values = ontology.entry(key.to_string()).or_default();
    let canon = normalize_value(value);
    if !values.iter().any(|v| normalize_value(v) == canon) {
        values.push(value.trim().to_string());
    }
}
