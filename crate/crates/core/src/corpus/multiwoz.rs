//! Importer for MultiWOZ-2.3-shaped `data.json` files.
//!
//! The input maps dialog ids to `{ "log": [turn, ...] }`, with user turns at
//! even positions. Each turn carries `dialog_act`
//! (`{"Train-Inform": [["Dest", "cambridge"], ...]}`) and `span_info`
//! (`[["Train-Inform", "Dest", "cambridge", start_word, end_word], ...]`,
//! inclusive whitespace-token indices). Word indices are converted to
//! character offsets; a spanned value takes the surface form found in the
//! text so that span and value always agree.

use std::collections::HashSet;

use serde_json::Value;

use super::{dedup_da, Corpus, Dialog, DialogActItem, Ontology, SpanAnnotation, Speaker, Split, Utterance};
use crate::error::{Error, Result};

/// Dialog ids assigned to the validation and test splits; the rest is train.
#[derive(Debug, Default, Clone)]
pub struct SplitLists {
    pub validation: HashSet<String>,
    pub test: HashSet<String>,
}

impl SplitLists {
    /// Reads the `valListFile.txt` / `testListFile.txt` layout: one id per line.
    pub fn from_lists(validation: &str, test: &str) -> Self {
        let ids = |s: &str| s.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
        SplitLists { validation: ids(validation), test: ids(test) }
    }

    fn split_of(&self, id: &str) -> Split {
        if self.test.contains(id) {
            Split::Test
        } else if self.validation.contains(id) {
            Split::Validation
        } else {
            Split::Train
        }
    }
}

pub fn import_multiwoz(json: &str, splits: &SplitLists) -> Result<Corpus> {
    let root: Value = serde_json::from_str(json).map_err(|e| parse_err(e.to_string()))?;
    let dialogs = root.as_object().ok_or_else(|| parse_err("top level must be an object of dialogs"))?;
    let mut out = Vec::with_capacity(dialogs.len());
    for (id, body) in dialogs {
        let log = body
            .get("log")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(format!("dialog {id} has no `log` array")))?;
        let mut turns = Vec::with_capacity(log.len());
        for (i, turn) in log.iter().enumerate() {
            let speaker = if i % 2 == 0 { Speaker::User } else { Speaker::System };
            turns.push(convert_turn(id, i, speaker, turn)?);
        }
        out.push(Dialog::new(id, splits.split_of(id), turns));
    }
    Ok(Corpus::from_dialogs(out, Ontology::new()))
}

fn parse_err(message: impl Into<String>) -> Error {
    Error::Parse { origin: "multiwoz".into(), message: message.into() }
}

fn split_act(act: &str) -> (String, String) {
    match act.split_once('-') {
        Some((d, i)) => (d.to_lowercase(), i.to_lowercase()),
        None => (act.to_lowercase(), String::new()),
    }
}

fn slot_value(slot: &str, value: &str) -> (String, String) {
    if slot.eq_ignore_ascii_case("none") {
        (String::new(), String::new())
    } else {
        (slot.to_lowercase(), value.to_string())
    }
}

/// Character offsets of whitespace-separated words.
fn word_offsets(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut n = 0;
    for (pos, c) in text.chars().enumerate() {
        n = pos + 1;
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(pos),
            (true, Some(s)) => {
                out.push((s, pos));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, n));
    }
    out
}

fn convert_turn(id: &str, index: usize, speaker: Speaker, turn: &Value) -> Result<Utterance> {
    let text = turn
        .get("text")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err(format!("dialog {id} turn {index} has no text")))?
        .to_string();
    let mut utt = Utterance { speaker, text, da: Vec::new(), spans: Vec::new() };
    if speaker == Speaker::System {
        return Ok(utt);
    }
    let words = word_offsets(&utt.text);
    let mut spanned: Vec<(DialogActItem, usize, usize)> = Vec::new();
    if let Some(info) = turn.get("span_info").and_then(Value::as_array) {
        for entry in info {
            let fields = entry.as_array().filter(|f| f.len() == 5);
            let Some(f) = fields else { continue };
            let (Some(act), Some(slot), Some(ws), Some(we)) =
                (f[0].as_str(), f[1].as_str(), f[3].as_u64(), f[4].as_u64())
            else {
                continue;
            };
            let (ws, we) = (ws as usize, we as usize);
            if ws > we || we >= words.len() {
                log::warn!("dialog {id} turn {index}: span word range {ws}..={we} out of bounds");
                continue;
            }
            let (start, end) = (words[ws].0, words[we].1);
            let surface = crate::textkit::char_slice(&utt.text, start, end);
            let (domain, intent) = split_act(act);
            let (slot, _) = slot_value(slot, "");
            spanned.push((DialogActItem::new(&domain, &intent, &slot, surface), start, end));
        }
    }
    let mut items: Vec<DialogActItem> = Vec::new();
    if let Some(acts) = turn.get("dialog_act").and_then(Value::as_object) {
        for (act, pairs) in acts {
            let (domain, intent) = split_act(act);
            for pair in pairs.as_array().into_iter().flatten() {
                let (Some(slot), Some(value)) =
                    (pair.get(0).and_then(Value::as_str), pair.get(1).and_then(Value::as_str))
                else {
                    continue;
                };
                let (slot, value) = slot_value(slot, value);
                let has_span =
                    spanned.iter().any(|(s, _, _)| s.domain == domain && s.intent == intent && s.slot == slot);
                if !has_span {
                    items.push(DialogActItem::new(&domain, &intent, &slot, &value));
                }
            }
        }
    }
    let mut taken: Vec<(usize, usize)> = Vec::new();
    for (item, start, end) in spanned {
        if taken.iter().any(|&(s, e)| start < e && s < end) || items.contains(&item) {
            continue;
        }
        taken.push((start, end));
        items.push(item);
        utt.spans.push(SpanAnnotation::new(items.len() - 1, start, end));
    }
    utt.da = dedup_da(items);
    Ok(utt)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
      "SNG0001.json": { "log": [
        { "text": "I need a train to Cambridge on Friday .",
          "dialog_act": { "Train-Inform": [["Dest", "cambridge"], ["Day", "friday"]] },
          "span_info": [["Train-Inform", "Dest", "cambridge", 5, 5], ["Train-Inform", "Day", "friday", 7, 7]] },
        { "text": "When would you like to leave ?", "dialog_act": {}, "span_info": [] },
        { "text": "Thanks , what is the price ?",
          "dialog_act": { "general-thank": [["none", "none"]], "Train-Request": [["Price", "?"]] },
          "span_info": [] }
      ] }
    }"#;

    #[test]
    fn converts_acts_and_word_spans() {
        let mut splits = SplitLists::default();
        splits.test.insert("SNG0001.json".into());
        let c = import_multiwoz(SAMPLE, &splits).unwrap();
        assert!(c.quarantine.is_empty(), "{:?}", c.quarantine);
        let d = &c.dialogs[0];
        assert_eq!(d.split, Split::Test);
        let u = &d.turns[0];
        assert_eq!(u.da.len(), 2);
        assert_eq!(u.span_text(&u.spans[0]), "Cambridge");
        assert_eq!(u.da[u.spans[0].item_index].value, "Cambridge");
        let last = &d.turns[2];
        assert!(last.da.contains(&DialogActItem::new("general", "thank", "", "")));
        assert!(last.da.contains(&DialogActItem::new("train", "request", "price", "?")));
        assert!(d.turns[1].da.is_empty());
    }

    #[test]
    fn split_lists_parse_lines() {
        let s = SplitLists::from_lists("a.json\nb.json\n", "\nc.json");
        assert_eq!(s.split_of("b.json"), Split::Validation);
        assert_eq!(s.split_of("c.json"), Split::Test);
        assert_eq!(s.split_of("z.json"), Split::Train);
    }
}
