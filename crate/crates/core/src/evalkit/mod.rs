//! Overall F1, change-rate statistics and a lexicon-lookup LU baseline.

mod lexicon_lu;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DialogActItem};
use crate::error::{Error, Result};
use crate::record::AugmentationRecord;
use crate::textkit::{edit_distance, lex};

pub use lexicon_lu::LexiconLu;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl F1Report {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        F1Report { true_positives: tp, false_positives: fp, false_negatives: fn_, precision, recall, f1 }
    }
}

/// Micro-averaged F1 over (predicted, gold) DA sets. Items match on their
/// canonical tuple; duplicates within a set count once.
pub fn overall_f1(predicted: &[Vec<DialogActItem>], gold: &[Vec<DialogActItem>]) -> Result<F1Report> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch { predicted: predicted.len(), gold: gold.len() });
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (p, g) in predicted.iter().zip(gold) {
        let p: HashSet<&DialogActItem> = p.iter().collect();
        let g: HashSet<&DialogActItem> = g.iter().collect();
        let hit = p.intersection(&g).count();
        tp += hit;
        fp += p.len() - hit;
        fn_ += g.len() - hit;
    }
    Ok(F1Report::from_counts(tp, fp, fn_))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangeRateReport {
    pub records: usize,
    pub char_rate: f64,
    pub word_rate: f64,
    pub slot_rate: f64,
}

fn normalized_distance<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let den = a.len().max(b.len());
    if den == 0 {
        0.0
    } else {
        edit_distance(a, b) as f64 / den as f64
    }
}

fn words(text: &str) -> Vec<String> {
    lex(text).into_iter().filter(|t| t.is_word()).map(|t| t.surface.to_lowercase()).collect()
}

/// Value fields of `original` with no identical counterpart in `augmented`
/// (each counterpart used once), and the number of value fields.
fn changed_values(original: &[DialogActItem], augmented: &[DialogActItem]) -> (usize, usize) {
    let mut pool: HashMap<&DialogActItem, usize> = HashMap::new();
    for item in augmented {
        *pool.entry(item).or_default() += 1;
    }
    let mut changed = 0;
    let mut total = 0;
    for item in original.iter().filter(|i| i.has_value()) {
        total += 1;
        match pool.get_mut(item) {
            Some(n) if *n > 0 => *n -= 1,
            _ => changed += 1,
        }
    }
    (changed, total)
}

/// Character and word rates are per-record normalized edit distances,
/// averaged; the slot rate pools changed-or-dropped value fields over all
/// records.
pub fn change_rates(orig: &Corpus, records: &[AugmentationRecord]) -> Result<ChangeRateReport> {
    let mut char_sum = 0.0;
    let mut word_sum = 0.0;
    let (mut changed, mut total) = (0, 0);
    for rec in records {
        let source = orig
            .dialog(&rec.dialog)
            .and_then(|d| d.turns.get(rec.turn))
            .ok_or_else(|| Error::UnresolvedSource { dialog: rec.dialog.clone(), turn: rec.turn })?;
        let a: Vec<char> = source.text.chars().collect();
        let b: Vec<char> = rec.text.chars().collect();
        char_sum += normalized_distance(&a, &b);
        word_sum += normalized_distance(&words(&source.text), &words(&rec.text));
        let (c, t) = changed_values(&source.da, &rec.da);
        changed += c;
        total += t;
    }
    let n = records.len();
    let mean = |s: f64| if n == 0 { 0.0 } else { s / n as f64 };
    Ok(ChangeRateReport {
        records: n,
        char_rate: mean(char_sum),
        word_rate: mean(word_sum),
        slot_rate: if total == 0 { 0.0 } else { changed as f64 / total as f64 },
    })
}

/// The combined report document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f1: Option<F1Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub change_rates: Option<ChangeRateReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text table with percentages.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        if let Some(r) = &self.change_rates {
            let _ = writeln!(out, "{:<10} {:>8} {:>8} {:>8}", "records", "char%", "word%", "slot%");
            let _ = writeln!(
                out,
                "{:<10} {:>8.1} {:>8.1} {:>8.1}",
                r.records,
                100.0 * r.char_rate,
                100.0 * r.word_rate,
                100.0 * r.slot_rate
            );
        }
        if let Some(f) = &self.f1 {
            let _ = writeln!(out, "{:<10} {:>8} {:>8} {:>8}", "", "P%", "R%", "F1%");
            let _ = writeln!(
                out,
                "{:<10} {:>8.1} {:>8.1} {:>8.1}",
                "overall",
                100.0 * f.precision,
                100.0 * f.recall,
                100.0 * f.f1
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Dialog, Ontology, Split, Utterance};
    use crate::record::Method;

    fn item(slot: &str, value: &str) -> DialogActItem {
        DialogActItem::new("train", "inform", slot, value)
    }

    #[test]
    fn partial_recall() {
        let r = overall_f1(&[vec![item("dest", "ely")]], &[vec![item("dest", "ely"), item("day", "monday")]]).unwrap();
        assert_eq!((r.precision, r.recall), (1.0, 0.5));
        assert!((r.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_against_empty_is_perfect() {
        let r = overall_f1(&[vec![]], &[vec![]]).unwrap();
        assert_eq!(r.f1, 1.0);
        let r = overall_f1(&[vec![]], &[vec![item("dest", "ely")]]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 0.0, 0.0));
        assert!(matches!(overall_f1(&[vec![]], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn hand_counted_contingency() {
        let pred = vec![
            vec![item("dest", "ely"), item("day", "monday")],
            vec![item("dest", "Ely"), item("leave", "9:00")],
            vec![],
        ];
        let gold = vec![
            vec![item("dest", "ely"), item("day", "tuesday")],
            vec![item("dest", "ely")],
            vec![item("people", "2"), DialogActItem::new("general", "thank", "", "")],
        ];
        // tp: ely, Ely; fp: monday, 9:00; fn: tuesday, people, thank.
        let r = overall_f1(&pred, &gold).unwrap();
        assert_eq!((r.true_positives, r.false_positives, r.false_negatives), (2, 2, 3));
    }

    fn corpus() -> Corpus {
        let u = Utterance::user("to Ely on Monday")
            .with_value("train", "inform", "dest", "Ely")
            .with_value("train", "inform", "day", "Monday");
        Corpus::from_dialogs(vec![Dialog::new("d", Split::Train, vec![u])], Ontology::new())
    }

    #[test]
    fn identical_copies_change_nothing() {
        let c = corpus();
        let u = &c.dialogs[0].turns[0];
        let rec =
            AugmentationRecord::new(Method::SpeechDisfluency, ("d", 0), u.text.clone(), u.da.clone(), u.spans.clone());
        let r = change_rates(&c, &[rec]).unwrap();
        assert_eq!((r.char_rate, r.word_rate, r.slot_rate), (0.0, 0.0, 0.0));
    }

    #[test]
    fn one_replaced_value_of_twenty() {
        let c = corpus();
        let u = &c.dialogs[0].turns[0];
        let mut recs = Vec::new();
        for k in 0..10 {
            let mut da = u.da.clone();
            if k == 0 {
                da[0].value = "Leeds".into();
            }
            recs.push(AugmentationRecord::new(Method::WordPerturbation, ("d", 0), u.text.clone(), da, vec![]));
        }
        let r = change_rates(&c, &recs).unwrap();
        assert_eq!(r.slot_rate, 1.0 / 20.0);
        let bad = AugmentationRecord::new(Method::WordPerturbation, ("x", 0), String::new(), vec![], vec![]);
        assert!(matches!(change_rates(&c, &[bad]), Err(Error::UnresolvedSource { .. })));
    }

    #[test]
    fn word_rate_ignores_case_and_punctuation() {
        let c = corpus();
        let rec = AugmentationRecord::new(
            Method::SpeechRecognition,
            ("d", 0),
            "to ely, on monday".into(),
            c.dialogs[0].turns[0].da.clone(),
            vec![],
        );
        let r = change_rates(&c, &[rec]).unwrap();
        assert_eq!(r.word_rate, 0.0);
        assert_eq!(r.slot_rate, 0.0);
        assert!(r.char_rate > 0.0);
    }

    #[test]
    fn report_formats() {
        let rep = EvalReport { f1: Some(F1Report::from_counts(1, 0, 1)), change_rates: None };
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["f1"]["true_positives"], 1);
        assert!(v.get("change_rates").is_none());
        assert!(rep.to_table().contains("66.7"));
    }
}
