//! Speech disfluency injection: filled pauses, repeats, restarts and repairs
//! inserted around (never inside) annotated slot values.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Ontology, Utterance};
use crate::draft::apply_insertions;
use crate::error::{Error, Result};
use crate::record::{AugmentationRecord, Insertion, Method};
use crate::textkit::{char_slice, normalize_value, tokenize_with_spans, TokenKind, TokenSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisfluencyType {
    Pause,
    Repeat,
    Restart,
    Repair,
}

impl DisfluencyType {
    pub const ALL: [DisfluencyType; 4] =
        [DisfluencyType::Pause, DisfluencyType::Repeat, DisfluencyType::Restart, DisfluencyType::Repair];

    pub fn name(self) -> &'static str {
        match self {
            DisfluencyType::Pause => "pause",
            DisfluencyType::Repeat => "repeat",
            DisfluencyType::Restart => "restart",
            DisfluencyType::Repair => "repair",
        }
    }
}

pub const DEFAULT_POINT_PROBABILITY: f64 = 0.06;

/// Term distributions and the per-gap interruption probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct DisfluencyDistributions {
    pub fillers: Vec<(String, f64)>,
    pub edit_terms: Vec<(String, f64)>,
    pub restart_terms: Vec<(String, f64)>,
    /// Keys: `word/3`, `atom/*`, `*/0`; `default` is stored separately.
    pub points: HashMap<String, f64>,
    pub default_point: f64,
    pub type_mix: Vec<(DisfluencyType, f64)>,
}

impl DisfluencyDistributions {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut fillers = Vec::new();
        let mut edit_terms = Vec::new();
        let mut restart_terms = Vec::new();
        let mut points = HashMap::new();
        let mut default_point = DEFAULT_POINT_PROBABILITY;
        let mut type_mix = Vec::new();
        let mut section = String::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::resource(origin, n + 1, m);
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (item, weight) =
                line.rsplit_once(char::is_whitespace).ok_or_else(|| err("expected `item weight`".into()))?;
            let item = item.trim().to_string();
            let weight: f64 = weight.parse().map_err(|_| err(format!("bad number `{weight}`")))?;
            if !weight.is_finite() || weight < 0.0 {
                return Err(err(format!("`{item}` has a negative weight")));
            }
            match section.as_str() {
                "fillers" | "edit_terms" | "restart_terms" | "type_mix" if weight == 0.0 => {
                    return Err(err(format!("`{item}` must have a positive weight")));
                }
                _ => {}
            }
            match section.as_str() {
                "fillers" => fillers.push((item, weight)),
                "edit_terms" => edit_terms.push((item, weight)),
                "restart_terms" => restart_terms.push((item, weight)),
                "points" => {
                    if weight > 1.0 {
                        return Err(err(format!("probability of `{item}` exceeds 1")));
                    }
                    if item == "default" {
                        default_point = weight;
                    } else {
                        let valid = item.split_once('/').is_some_and(|(k, d)| {
                            matches!(k, "word" | "atom" | "*") && (d == "*" || d.parse::<u8>().is_ok_and(|d| d < 10))
                        });
                        if !valid {
                            return Err(err(format!("bad point key `{item}`")));
                        }
                        points.insert(item, weight);
                    }
                }
                "type_mix" => {
                    let t = DisfluencyType::ALL
                        .into_iter()
                        .find(|t| t.name() == item)
                        .ok_or_else(|| err(format!("unknown disfluency type `{item}`")))?;
                    type_mix.push((t, weight));
                }
                "" => return Err(err("entry outside a section".into())),
                other => return Err(err(format!("unknown section `{other}`"))),
            }
        }
        for (name, list) in [("fillers", &fillers), ("edit_terms", &edit_terms), ("restart_terms", &restart_terms)] {
            if list.is_empty() {
                return Err(Error::resource(origin, 0, format!("section [{name}] is empty")));
            }
        }
        if type_mix.is_empty() {
            type_mix = DisfluencyType::ALL.iter().map(|&t| (t, 1.0)).collect();
        }
        Ok(DisfluencyDistributions { fillers, edit_terms, restart_terms, points, default_point, type_mix })
    }

    /// Interruption probability for the gap after a token of `kind` at
    /// position decile `decile`.
    pub fn point_probability(&self, kind: TokenKind, decile: usize) -> f64 {
        let k = match kind {
            TokenKind::Atom => "atom",
            _ => "word",
        };
        [format!("{k}/{decile}"), format!("{k}/*"), format!("*/{decile}")]
            .iter()
            .find_map(|key| self.points.get(key).copied())
            .unwrap_or(self.default_point)
    }

    /// Sets every gap probability to `p`.
    pub fn with_uniform_points(mut self, p: f64) -> Self {
        self.points.clear();
        self.default_point = p;
        self
    }

    /// Restricts the type mix to a single type.
    pub fn only(mut self, t: DisfluencyType) -> Self {
        self.type_mix = vec![(t, 1.0)];
        self
    }
}

fn pick<'a, R: Rng + ?Sized>(list: &'a [(String, f64)], rng: &mut R) -> &'a str {
    &list.choose_weighted(rng, |e| e.1).expect("non-empty positive weights").0
}

/// Gaps eligible for interruption: after every word or atom token.
fn eligible_gaps(toks: &TokenSeq) -> Vec<usize> {
    toks.iter().enumerate().filter(|(_, t)| t.kind != TokenKind::Punct).map(|(i, _)| i).collect()
}

/// Samples interruption points. A point `i` denotes the gap right after
/// token `i`; each eligible gap is chosen independently.
pub fn sample_interruption_points<R: Rng + ?Sized>(
    toks: &TokenSeq,
    dist: &DisfluencyDistributions,
    rng: &mut R,
) -> Vec<usize> {
    let n = toks.len().max(1);
    eligible_gaps(toks)
        .into_iter()
        .filter(|&i| {
            let p = dist.point_probability(toks.tokens[i].kind, i * 10 / n);
            rng.gen_bool(p.clamp(0.0, 1.0))
        })
        .collect()
}

fn record(u: &Utterance, insertions: Vec<Insertion>, notes: Vec<String>, source: (&str, usize)) -> AugmentationRecord {
    let (text, spans) = apply_insertions(&u.text, &u.spans, &insertions);
    let mut rec = AugmentationRecord::new(Method::SpeechDisfluency, source, text, u.da.clone(), spans);
    rec.notes = notes;
    rec.insertions = insertions;
    rec
}

/// Inserts a sampled filler after each point.
pub fn inject_pauses<R: Rng + ?Sized>(
    u: &Utterance,
    points: &[usize],
    dist: &DisfluencyDistributions,
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let toks = tokenize_with_spans(&u.text, &u.spans)?;
    let mut insertions = Vec::new();
    let mut notes = Vec::new();
    for &p in points {
        let filler = pick(&dist.fillers, rng);
        let at = toks.tokens[p].char_end;
        notes.push(format!("pause: {filler:?} at {at}"));
        insertions.push(Insertion { at, text: format!(" {filler}") });
    }
    Ok(record(u, insertions, notes, source))
}

/// Repeats the 1–2 word tokens before each point, comma-separated. Points
/// after an atom or punctuation are skipped.
pub fn inject_repeats<R: Rng + ?Sized>(
    u: &Utterance,
    points: &[usize],
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let widths: Vec<usize> = points.iter().map(|_| rng.gen_range(1..=2)).collect();
    inject_repeats_with(u, points, &widths, source)
}

/// [`inject_repeats`] with explicit widths (1 or 2) per point.
pub fn inject_repeats_with(
    u: &Utterance,
    points: &[usize],
    widths: &[usize],
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let toks = tokenize_with_spans(&u.text, &u.spans)?;
    let mut insertions = Vec::new();
    let mut notes = Vec::new();
    for (&p, &w) in points.iter().zip(widths) {
        if toks.tokens[p].kind != TokenKind::Word {
            continue;
        }
        let w = if w == 2 && p > 0 && toks.tokens[p - 1].kind == TokenKind::Word { 2 } else { 1 };
        let from = toks.tokens[p + 1 - w].char_start;
        let at = toks.tokens[p].char_end;
        let repeated = char_slice(&u.text, from, at);
        notes.push(format!("repeat: {repeated:?} at {at}"));
        insertions.push(Insertion { at, text: format!(", {repeated}") });
    }
    Ok(record(u, insertions, notes, source))
}

/// Prefixes a sampled restart phrase.
pub fn inject_restart<R: Rng + ?Sized>(
    u: &Utterance,
    dist: &DisfluencyDistributions,
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    if u.text.trim().is_empty() {
        return Err(Error::EmptyUtterance);
    }
    let term = pick(&dist.restart_terms, rng);
    let lead = u.text.chars().take_while(|c| c.is_whitespace()).count();
    let notes = vec![format!("restart: {term:?}")];
    Ok(record(u, vec![Insertion { at: lead, text: format!("{term} ") }], notes, source))
}

fn match_case(template: &str, value: &str) -> String {
    if template.chars().next().is_some_and(char::is_uppercase) {
        value
            .split(' ')
            .map(|w| {
                let mut c = w.chars();
                c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
            })
            .collect::<Vec<String>>()
            .join(" ")
    } else {
        value.to_string()
    }
}

/// Inserts `<reparandum>, <edit term> ` before one slot value. The
/// reparandum is another ontology value of the same slot key.
pub fn inject_repair<R: Rng + ?Sized>(
    u: &Utterance,
    ontology: &Ontology,
    dist: &DisfluencyDistributions,
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let alternatives = |k: usize| -> Vec<&String> {
        let span = &u.spans[k];
        let item = &u.da[span.item_index];
        let own = normalize_value(u.span_text(span));
        let own_value = normalize_value(&item.value);
        ontology
            .get(&item.slot_key())
            .map(|vals| {
                vals.iter()
                    .filter(|v| {
                        let v = normalize_value(v);
                        !v.is_empty() && v != own && v != own_value
                    })
                    .collect()
            })
            .unwrap_or_default()
    };
    let eligible: Vec<usize> = (0..u.spans.len()).filter(|&k| !alternatives(k).is_empty()).collect();
    let &k = eligible.choose(rng).ok_or(Error::NoRepairableSlot)?;
    let reparandum = match_case(u.span_text(&u.spans[k]), alternatives(k).choose(rng).unwrap());
    let term = pick(&dist.edit_terms, rng);
    inject_repair_with(u, k, &reparandum, term, source)
}

/// [`inject_repair`] with the span, reparandum and edit term given.
pub fn inject_repair_with(
    u: &Utterance,
    span_index: usize,
    reparandum: &str,
    term: &str,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let span = &u.spans[span_index];
    let notes = vec![format!("repair: {reparandum:?} before {:?} via {term:?}", u.span_text(span))];
    Ok(record(u, vec![Insertion { at: span.start, text: format!("{reparandum}, {term} ") }], notes, source))
}

/// Applies one disfluency type drawn from the mix. Pauses and repeats get at
/// least one interruption point so the output always differs; a repair with
/// no repairable slot, or a repeat with no word gap, becomes a pause.
pub fn sd_augment<R: Rng + ?Sized>(
    u: &Utterance,
    ontology: &Ontology,
    dist: &DisfluencyDistributions,
    rng: &mut R,
    source: (&str, usize),
) -> Result<AugmentationRecord> {
    let toks = tokenize_with_spans(&u.text, &u.spans)?;
    if eligible_gaps(&toks).is_empty() {
        return Err(Error::EmptyUtterance);
    }
    let kind = dist.type_mix.choose_weighted(rng, |e| e.1).expect("non-empty type mix").0;
    let pauses = |rng: &mut R| {
        let mut points = sample_interruption_points(&toks, dist, rng);
        if points.is_empty() {
            points.push(*eligible_gaps(&toks).choose(rng).unwrap());
        }
        inject_pauses(u, &points, dist, rng, source)
    };
    match kind {
        DisfluencyType::Pause => pauses(rng),
        DisfluencyType::Restart => inject_restart(u, dist, rng, source),
        DisfluencyType::Repair => match inject_repair(u, ontology, dist, rng, source) {
            Err(Error::NoRepairableSlot) => pauses(rng),
            other => other,
        },
        DisfluencyType::Repeat => {
            let word_gaps: Vec<usize> =
                eligible_gaps(&toks).into_iter().filter(|&i| toks.tokens[i].kind == TokenKind::Word).collect();
            if word_gaps.is_empty() {
                return pauses(rng);
            }
            let mut points: Vec<usize> =
                sample_interruption_points(&toks, dist, rng).into_iter().filter(|i| word_gaps.contains(i)).collect();
            if points.is_empty() {
                points.push(*word_gaps.choose(rng).unwrap());
            }
            inject_repeats(u, &points, rng, source)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::ResourceBundle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SRC: (&str, usize) = ("d", 0);

    fn disfluency_turn() -> Utterance {
        Utterance::user("I want to go to Cambridge.").with_value("attraction", "inform", "dest", "Cambridge")
    }

    fn dist(fillers: &str, edits: &str, restarts: &str) -> DisfluencyDistributions {
        DisfluencyDistributions::parse(
            &format!("[fillers]\n{fillers}\n[edit_terms]\n{edits}\n[restart_terms]\n{restarts}\n"),
            "t",
        )
        .unwrap()
    }

    #[test]
    fn pauses_row() {
        // Weighted sampling over a one-element list is forced.
        let u = disfluency_turn();
        let one = |f: &str| dist(&format!("{f} 1"), "I mean 1", "so 1");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = inject_pauses(&u, &[2], &one("um"), &mut rng, SRC).unwrap();
        let b = inject_pauses(&a.to_utterance(), &[5], &one("uh"), &mut rng, SRC).unwrap();
        assert_eq!(b.text, "I want to um go to uh Cambridge.");
        assert_eq!(b.to_utterance().span_text(&b.spans[0]), "Cambridge");
    }

    #[test]
    fn repeats_row() {
        let u = disfluency_turn();
        let rec = inject_repeats_with(&u, &[0, 4], &[1, 2], SRC).unwrap();
        assert_eq!(rec.text, "I, I want to go to, go to Cambridge.");
        assert_eq!(rec.strip_insertions(), u.text);
    }

    #[test]
    fn restart_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = inject_restart(&disfluency_turn(), &dist("um 1", "I mean 1", "I just 1"), &mut rng, SRC).unwrap();
        assert_eq!(rec.text, "I just I want to go to Cambridge.");
        assert!(inject_restart(&Utterance::user("  "), &dist("um 1", "x 1", "y 1"), &mut rng, SRC).is_err());
    }

    #[test]
    fn repair_row() {
        let rec = inject_repair_with(&disfluency_turn(), 0, "Liverpool", "sorry I mean", SRC).unwrap();
        assert_eq!(rec.text, "I want to go to Liverpool, sorry I mean Cambridge.");
        assert_eq!(rec.da, disfluency_turn().da);
        assert_eq!(rec.to_utterance().span_text(&rec.spans[0]), "Cambridge");
    }

    #[test]
    fn repair_samples_a_different_value() {
        let mut onto = Ontology::new();
        onto.insert("attraction-dest".into(), vec!["cambridge".into(), "liverpool".into()]);
        let d = dist("um 1", "sorry I mean 1", "so 1");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rec = inject_repair(&disfluency_turn(), &onto, &d, &mut rng, SRC).unwrap();
        assert_eq!(rec.text, "I want to go to Liverpool, sorry I mean Cambridge.");

        onto.insert("attraction-dest".into(), vec!["cambridge".into()]);
        assert!(matches!(inject_repair(&disfluency_turn(), &onto, &d, &mut rng, SRC), Err(Error::NoRepairableSlot)));
        let plain = Utterance::user("hello there");
        assert!(matches!(inject_repair(&plain, &onto, &d, &mut rng, SRC), Err(Error::NoRepairableSlot)));
    }

    #[test]
    fn point_sampling_extremes() {
        let u = Utterance::user("I want tea.");
        let toks = tokenize_with_spans(&u.text, &u.spans).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = ResourceBundle::bundled().disfluency;
        assert!(sample_interruption_points(&toks, &d.clone().with_uniform_points(0.0), &mut rng).is_empty());
        assert_eq!(sample_interruption_points(&toks, &d.with_uniform_points(1.0), &mut rng), [0, 1, 2]);
    }

    #[test]
    fn repeat_skips_atoms() {
        let u = disfluency_turn();
        let rec = inject_repeats_with(&u, &[5], &[2], SRC).unwrap();
        assert_eq!(rec.text, u.text);
    }

    #[test]
    fn point_lookup_order() {
        let d = ResourceBundle::bundled().disfluency;
        assert_eq!(d.point_probability(TokenKind::Word, 0), 0.12);
        assert_eq!(d.point_probability(TokenKind::Atom, 0), 0.05);
        assert_eq!(d.point_probability(TokenKind::Word, 7), d.default_point);
    }

    #[test]
    fn parse_errors() {
        assert!(DisfluencyDistributions::parse("[fillers]\num 1\n", "t").is_err());
        assert!(DisfluencyDistributions::parse("um 1\n", "t").is_err());
        let base = "[fillers]\num 1\n[edit_terms]\nI mean 1\n[restart_terms]\nso 1\n";
        assert!(DisfluencyDistributions::parse(&format!("{base}[points]\nword/x 0.1\n"), "t").is_err());
        assert!(DisfluencyDistributions::parse(&format!("{base}[points]\ndefault 1.5\n"), "t").is_err());
        assert!(DisfluencyDistributions::parse(&format!("{base}[type_mix]\nstutter 1\n"), "t").is_err());
        assert!(DisfluencyDistributions::parse(&base.replace("um 1", "um 0"), "t").is_err());
    }

    #[test]
    fn forced_repair_mix() {
        let b = ResourceBundle::bundled();
        let d = b.disfluency.clone().only(DisfluencyType::Repair);
        let mut onto = Ontology::new();
        onto.insert("attraction-dest".into(), vec!["cambridge".into(), "liverpool".into()]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rec = sd_augment(&disfluency_turn(), &onto, &d, &mut rng, SRC).unwrap();
        assert!(rec.text.starts_with("I want to go to Liverpool, "));
        assert!(rec.text.ends_with(" Cambridge."));
    }
}
