//! Text paraphrasing: dialog-act serialization with first-mention marks,
//! pluggable paraphrase generators, and value validation/repair.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use rand::{Rng, RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::corpus::{Dialog, DialogActItem, Ontology, SpanAnnotation, Speaker, Utterance};
use crate::error::{Error, Result};
use crate::record::{AugmentationRecord, Method};
use crate::textkit::{char_len, char_slice, detect_value_excluding, lex, normalize_value};

/// Fuzzy threshold for locating original values in a paraphrase.
pub const TP_THRESHOLD: f64 = 0.9;

/// Ontology values shorter than this are ignored by the redundancy check.
const REDUNDANT_MIN_CHARS: usize = 4;

/// Flat text form of a DA set, e.g.
/// `train * { inform ( dest = Cambridge ; arrive = 20:45 ) }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerializedDa(pub String);

impl SerializedDa {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Groups items by domain (alphabetical), intent (alphabetical), keeping
/// annotation order for slots. A domain in `first_mention` gets a `*`.
/// Slot-less items serialize as an empty `intent ( )` group.
pub fn serialize_da(da: &[DialogActItem], first_mention: &BTreeSet<String>) -> SerializedDa {
    let mut domains: BTreeMap<&str, BTreeMap<&str, Vec<&DialogActItem>>> = BTreeMap::new();
    for item in da {
        domains.entry(item.domain.as_str()).or_default().entry(item.intent.as_str()).or_default().push(item);
    }
    let mut parts = Vec::new();
    for (domain, intents) in domains {
        let mut s = domain.to_string();
        if first_mention.contains(domain) {
            s.push_str(" *");
        }
        s.push_str(" {");
        for (intent, items) in intents {
            let (bare, slotted): (Vec<_>, Vec<_>) = items.into_iter().partition(|i| i.slot.is_empty());
            if !bare.is_empty() {
                s.push_str(&format!(" {intent} ( )"));
            }
            if !slotted.is_empty() {
                let pairs: Vec<String> = slotted.iter().map(|i| format!("{} = {}", i.slot, i.value)).collect();
                s.push_str(&format!(" {intent} ( {} )", pairs.join(" ; ")));
            }
        }
        s.push_str(" }");
        parts.push(s);
    }
    SerializedDa(parts.join(" "))
}

/// Inverse of [`serialize_da`]: the items and the starred domains.
pub fn parse_serialized_da(s: &str) -> Result<(Vec<DialogActItem>, BTreeSet<String>)> {
    let err = |m: &str| Error::Parse { origin: "serialized DA".into(), message: format!("{m} in {s:?}") };
    let toks: Vec<&str> = s.split_whitespace().collect();
    let mut i = 0;
    let mut items = Vec::new();
    let mut starred = BTreeSet::new();
    while i < toks.len() {
        let domain = toks[i];
        i += 1;
        if toks.get(i) == Some(&"*") {
            starred.insert(domain.to_string());
            i += 1;
        }
        if toks.get(i) != Some(&"{") {
            return Err(err("expected `{`"));
        }
        i += 1;
        loop {
            match toks.get(i) {
                Some(&"}") => {
                    i += 1;
                    break;
                }
                Some(intent) => {
                    if toks.get(i + 1) != Some(&"(") {
                        return Err(err("expected `(`"));
                    }
                    let close = toks[i + 2..]
                        .iter()
                        .position(|t| *t == ")")
                        .map(|p| p + i + 2)
                        .ok_or_else(|| err("unclosed `(`"))?;
                    let body = toks[i + 2..close].join(" ");
                    if body.is_empty() {
                        items.push(DialogActItem::new(domain, intent, "", ""));
                    } else {
                        for pair in body.split(" ; ") {
                            let (slot, value) = pair.split_once(" = ").ok_or_else(|| err("expected `slot = value`"))?;
                            items.push(DialogActItem::new(domain, intent, slot, value));
                        }
                    }
                    i = close + 1;
                }
                None => return Err(err("unclosed `{`")),
            }
        }
    }
    Ok((items, starred))
}

/// Domains of turn `turn_index` that no earlier turn of the dialog mentions.
pub fn first_mention_domains(d: &Dialog, turn_index: usize) -> BTreeSet<String> {
    let earlier: BTreeSet<&str> =
        d.turns[..turn_index].iter().flat_map(|t| t.da.iter().map(|i| i.domain.as_str())).collect();
    d.turns[turn_index]
        .da
        .iter()
        .map(|i| i.domain.as_str())
        .filter(|dom| !earlier.contains(dom))
        .map(String::from)
        .collect()
}

/// Request sent to a paraphrase generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub da: String,
    pub context: Vec<String>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationResponse {
    pub candidates: Vec<String>,
}

/// Produces up to `k` candidate paraphrases for a serialized DA.
pub trait ParaphraseGenerator: Send + Sync {
    fn generate(&self, request: &GenerationRequest, rng: &mut dyn RngCore) -> Result<Vec<String>>;
}

/// Client for an externally hosted paraphraser speaking the JSON contract
/// `{da, context, k}` -> `{candidates}` over HTTP POST.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    endpoint: String,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub const ENV_VAR: &'static str = "LAUG_TP_ENDPOINT";
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

    pub fn new(endpoint: &str, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        HttpGenerator { endpoint: endpoint.to_string(), agent }
    }

    /// Client for the endpoint in `LAUG_TP_ENDPOINT`, if set.
    pub fn from_env(timeout: Duration) -> Option<Self> {
        std::env::var(Self::ENV_VAR).ok().filter(|s| !s.trim().is_empty()).map(|url| Self::new(url.trim(), timeout))
    }
}

impl ParaphraseGenerator for HttpGenerator {
    fn generate(&self, request: &GenerationRequest, _rng: &mut dyn RngCore) -> Result<Vec<String>> {
        let unavailable = |e: ureq::Error| Error::GeneratorUnavailable(format!("{}: {e}", self.endpoint));
        let response = self.agent.post(&self.endpoint).send_json(request).map_err(unavailable)?;
        let body: GenerationResponse = response.into_body().read_json().map_err(unavailable)?;
        Ok(body.candidates.into_iter().filter(|c| !c.trim().is_empty()).take(request.k).collect())
    }
}

/// Offline generator filling per-(domain, intent) sentence templates.
///
/// Starred domains get full sentences naming the domain; unstarred ones get
/// elliptical follow-up phrasing.
#[derive(Debug, Clone, Default)]
pub struct TemplateGenerator;

fn domain_noun(domain: &str) -> &str {
    match domain {
        "hotel" => "place to stay",
        "restaurant" => "place to eat",
        "attraction" => "place to visit",
        "train" => "train",
        "taxi" => "taxi",
        other => other,
    }
}

fn slot_phrases(slot: &str) -> &'static [&'static str] {
    match slot {
        "dest" => &["going to {v}", "heading to {v}", "to {v}"],
        "depart" => &["leaving from {v}", "departing from {v}", "from {v}"],
        "leave" => &["leaving after {v}", "departing after {v}", "after {v}"],
        "arrive" => &["arriving by {v}", "getting there by {v}", "by {v}"],
        "day" => &["on {v}", "for {v}", "this {v}"],
        "people" => &["for {v} people", "for a group of {v}", "for {v} of us"],
        "stay" => &["for {v} nights", "staying {v} nights"],
        "stars" => &["with a {v} star rating", "rated {v} stars"],
        "area" => &["in the {v} part of town", "located in the {v}", "in the {v}"],
        "price" => &["in the {v} price range", "that is {v}"],
        "food" => &["serving {v} food", "that does {v} dishes", "with {v} cuisine"],
        "name" => &["called {v}", "named {v}"],
        "type" => &["that is a {v}", "like a {v}"],
        "time" => &["at {v}", "around {v}"],
        _ => &["with {s} {v}"],
    }
}

fn slot_name(slot: &str) -> &str {
    match slot {
        "phone" => "phone number",
        "trainid" => "train ID",
        "duration" => "travel time",
        "fee" => "entrance fee",
        "car" => "car type",
        "parking" => "parking situation",
        other => other,
    }
}

fn join_list(parts: &[String]) -> String {
    match parts.len() {
        0 => String::new(),
        1 => parts[0].clone(),
        n => format!("{} and {}", parts[..n - 1].join(", "), parts[n - 1]),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl TemplateGenerator {
    fn sentence(domain: &str, intent: &str, items: &[&DialogActItem], starred: bool, variant: usize) -> String {
        let noun = domain_noun(domain);
        let pick = |opts: &[&str], k: usize| opts[(variant + k) % opts.len()].to_string();
        match intent {
            "inform" | "book" => {
                let phrases: Vec<String> = items
                    .iter()
                    .enumerate()
                    .filter(|(_, i)| !i.slot.is_empty())
                    .map(|(k, i)| pick(slot_phrases(&i.slot), k).replace("{s}", &i.slot).replace("{v}", &i.value))
                    .collect();
                let body = join_list(&phrases);
                if starred {
                    let frames = [
                        "Hello, I am looking for a {n} {p}, could you help me with that?",
                        "I would like to find a {n} {p} if possible.",
                        "Could you please help me find a {n} {p}?",
                    ];
                    pick(&frames, 0).replace("{n}", noun).replace("{p}", &body)
                } else {
                    let frames = ["{P}, please.", "Yes, {p}.", "Okay, {p}."];
                    pick(&frames, 0).replace("{P}", &capitalize(&body)).replace("{p}", &body)
                }
            }
            "request" => {
                let names: Vec<String> = items.iter().map(|i| slot_name(&i.slot).to_string()).collect();
                let what = join_list(&names);
                if starred {
                    let frames =
                        ["Could you tell me the {w} of the {n}?", "I need to know the {w} for that {n}, please."];
                    pick(&frames, 0).replace("{w}", &what).replace("{n}", noun)
                } else {
                    let frames = ["What is the {w}?", "And the {w}?"];
                    pick(&frames, 0).replace("{w}", &what)
                }
            }
            "thank" => pick(&["Thank you so much for your help.", "Great, thanks a lot."], 0),
            "bye" => pick(&["Goodbye.", "Bye, have a good day."], 0),
            "greet" => pick(&["Hello there.", "Hi."], 0),
            other => {
                let pairs: Vec<String> =
                    items.iter().filter(|i| !i.slot.is_empty()).map(|i| format!("{} {}", i.slot, i.value)).collect();
                format!("{} {}.", capitalize(other), join_list(&pairs)).replace(" .", ".")
            }
        }
    }

    /// Renders candidate `variant` for parsed items.
    pub fn render(items: &[DialogActItem], starred: &BTreeSet<String>, variant: usize) -> String {
        let mut groups: BTreeMap<(&str, &str), Vec<&DialogActItem>> = BTreeMap::new();
        for item in items {
            groups.entry((&item.domain, &item.intent)).or_default().push(item);
        }
        let mut seen_domains = BTreeSet::new();
        let mut sentences = Vec::new();
        // inform before request so requests can refer back to the entity
        let mut keys: Vec<(&str, &str)> = groups.keys().copied().collect();
        keys.sort_by_key(|(d, i)| (*d == "general", *i == "request", *d, *i));
        for key in keys {
            let (domain, intent) = key;
            let star = starred.contains(domain) && seen_domains.insert(domain);
            sentences.push(Self::sentence(domain, intent, &groups[&key], star, variant));
        }
        sentences.join(" ")
    }
}

impl ParaphraseGenerator for TemplateGenerator {
    fn generate(&self, request: &GenerationRequest, rng: &mut dyn RngCore) -> Result<Vec<String>> {
        let (items, starred) = parse_serialized_da(&request.da)?;
        let offset = rng.gen_range(0..6);
        let mut out: Vec<String> = Vec::new();
        for i in 0..request.k {
            let cand = Self::render(&items, &starred, offset + i);
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
        Ok(out)
    }
}

fn contains_phrase(haystack: &[String], needle: &[String]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len()).filter(|&i| haystack[i..i + needle.len()] == *needle).collect()
}

/// Checks a candidate against the original utterance's values.
///
/// Every spanned value must be found with score >= 0.9; near misses are
/// overwritten with the original surface form. Candidates mentioning an
/// ontology value of a slot key absent from the original DA (outside the
/// matched value spans) are rejected as redundant.
pub fn validate_and_repair(
    candidate: &str,
    original: &Utterance,
    ontology: &Ontology,
    source: (&str, usize),
) -> Option<AugmentationRecord> {
    let mut text = candidate.trim().to_string();
    if text.is_empty() {
        return None;
    }
    let mut claimed: Vec<(usize, usize, usize)> = Vec::new();
    let mut notes = Vec::new();
    for span in original.sorted_spans() {
        let surface = original.span_text(&span).to_string();
        let ranges: Vec<(usize, usize)> = claimed.iter().map(|&(s, e, _)| (s, e)).collect();
        let found = detect_value_excluding(&text, &surface, TP_THRESHOLD, &ranges)?;
        let window = char_slice(&text, found.start, found.end).to_string();
        let mut end = found.end;
        if window != surface {
            let before = char_slice(&text, 0, found.start).to_string();
            let after = char_slice(&text, found.end, char_len(&text)).to_string();
            text = format!("{before}{surface}{after}");
            let new_end = found.start + char_len(&surface);
            let delta = new_end as isize - found.end as isize;
            for c in claimed.iter_mut().filter(|c| c.0 >= found.end) {
                c.0 = (c.0 as isize + delta) as usize;
                c.1 = (c.1 as isize + delta) as usize;
            }
            end = new_end;
            notes.push(format!("repair {window:?} -> {surface:?}"));
        }
        claimed.push((found.start, end, span.item_index));
    }

    let original_keys: BTreeSet<String> = original.da.iter().map(DialogActItem::slot_key).collect();
    let original_values: BTreeSet<String> = original.da.iter().map(|i| normalize_value(&i.value)).collect();
    let words: Vec<(String, usize, usize)> = lex(&text)
        .into_iter()
        .filter(|t| t.is_word())
        .map(|t| (t.surface.to_lowercase(), t.char_start, t.char_end))
        .collect();
    let word_strs: Vec<String> = words.iter().map(|w| w.0.clone()).collect();
    for (key, values) in ontology {
        if original_keys.contains(key) {
            continue;
        }
        for value in values {
            let canon = normalize_value(value);
            if canon.chars().count() < REDUNDANT_MIN_CHARS || original_values.contains(&canon) {
                continue;
            }
            let needle: Vec<String> = lex(&canon).into_iter().filter(|t| t.is_word()).map(|t| t.surface).collect();
            for at in contains_phrase(&word_strs, &needle) {
                let (start, end) = (words[at].1, words[at + needle.len() - 1].2);
                let inside = claimed.iter().any(|&(s, e, _)| s <= start && end <= e);
                if !inside {
                    return None;
                }
            }
        }
    }

    claimed.sort();
    let spans = claimed.into_iter().map(|(s, e, item)| SpanAnnotation::new(item, s, e)).collect();
    let mut rec = AugmentationRecord::new(Method::TextParaphrasing, source, text, original.da.clone(), spans);
    rec.notes = notes;
    Some(rec)
}

/// Paraphrases user turn `turn_index` of `d`, returning the first valid
/// candidate that differs from the original text.
pub fn tp_augment<R: Rng + ?Sized>(
    d: &Dialog,
    turn_index: usize,
    gen: &dyn ParaphraseGenerator,
    k: usize,
    ontology: &Ontology,
    rng: &mut R,
) -> Result<Option<AugmentationRecord>> {
    let turn = &d.turns[turn_index];
    if turn.speaker != Speaker::User || turn.da.is_empty() {
        return Ok(None);
    }
    let starred = first_mention_domains(d, turn_index);
    let da = serialize_da(&turn.da, &starred);
    let context = d.turns[turn_index.saturating_sub(2)..turn_index].iter().map(|t| t.text.clone()).collect();
    let request = GenerationRequest { da: da.0.clone(), context, k };
    let mut seed = rand_chacha::ChaCha8Rng::seed_from_u64(rng.next_u64());
    let candidates = gen.generate(&request, &mut seed)?;
    let original = normalize_value(&turn.text);
    for cand in candidates {
        if normalize_value(&cand) == original {
            continue;
        }
        if let Some(mut rec) = validate_and_repair(&cand, turn, ontology, (&d.id, turn_index)) {
            rec.notes.insert(0, format!("da {}", da.0));
            return Ok(Some(rec));
        }
    }
    Ok(None)
}
